#include <gtest/gtest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>

#include "dcl/errors.hpp"
#include "dcl/mnist.hpp"
#include "dcl/mnist_experiment.hpp"

using namespace dcl;
namespace fs = std::filesystem;

namespace {

void put_be32(std::ofstream& f, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
  f.write(reinterpret_cast<const char*>(b), 4);
}

// Two raw IDX images: the first all zero except pixel 0 = 255, the second all 255.
fs::path write_tiny_idx(const std::string& tag, bool truncate = false) {
  const fs::path dir = fs::temp_directory_path() / ("dcl_idx_" + tag);
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "images", std::ios::binary);
    put_be32(f, 0x803);
    put_be32(f, 2);
    put_be32(f, 28);
    put_be32(f, 28);
    std::vector<char> px(784, 0);
    px[0] = static_cast<char>(255);
    f.write(px.data(), static_cast<std::streamsize>(px.size()));
    std::vector<char> full(truncate ? 100 : 784, static_cast<char>(255));
    f.write(full.data(), static_cast<std::streamsize>(full.size()));
  }
  {
    std::ofstream f(dir / "labels", std::ios::binary);
    put_be32(f, 0x801);
    put_be32(f, 2);
    const char labels[2] = {7, 0};
    f.write(labels, 2);
  }
  return dir;
}

}  // namespace

TEST(Mnist, PixelScalingEndpoints) {
  const auto dir = write_tiny_idx("ok");
  const auto set = mnist::load_idx((dir / "images").string(), (dir / "labels").string());
  ASSERT_EQ(set.size(), 2u);
  EXPECT_EQ(set.images(0, 0), 1.0);
  EXPECT_EQ(set.images(1, 0), 0.0);
  EXPECT_EQ(set.images(783, 1), 1.0);
  EXPECT_EQ(set.labels[0], 7);
}

TEST(Mnist, TaskSplit) {
  EXPECT_EQ(mnist::task_of_label(7), 3u);
  EXPECT_EQ(mnist::task_of_label(0), 0u);
  EXPECT_EQ(mnist::task_of_label(9), 4u);
}

TEST(Mnist, MissingFileNamesPath) {
  try {
    mnist::load_idx("/nonexistent/images", "/nonexistent/labels");
    FAIL();
  } catch (const IoError& e) {
    EXPECT_EQ(e.path(), "/nonexistent/images");
  }
}

TEST(Mnist, TruncatedFileRejected) {
  const auto dir = write_tiny_idx("trunc", true);
  EXPECT_THROW(mnist::load_idx((dir / "images").string(), (dir / "labels").string()), IoError);
}

TEST(Mnist, FixtureCountsMatchHeaders) {
  const auto data = mnist::load_mnist(DCL_TEST_MNIST_DIR);
  EXPECT_EQ(data.train.size(), static_cast<std::size_t>(data.train.images.cols()));
  EXPECT_EQ(data.test.size(), static_cast<std::size_t>(data.test.images.cols()));
  EXPECT_GT(data.train.size(), 0u);
  EXPECT_GE(data.train.images.minCoeff(), 0.0);
  EXPECT_LE(data.train.images.maxCoeff(), 1.0);
  const auto split = mnist::split_by_task(data.test);
  std::size_t total = 0;
  for (const auto& s : split) total += s.size();
  EXPECT_EQ(total, data.test.size());
}

class MnistRun : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { data_ = new mnist::Dataset(mnist::load_mnist(DCL_TEST_MNIST_DIR)); }
  static void TearDownTestSuite() { delete data_; }
  static mnist::Dataset* data_;
};
mnist::Dataset* MnistRun::data_ = nullptr;

TEST_F(MnistRun, DeterministicUnderFixedSeed) {
  MnistConfig cfg;
  cfg.p = 400;
  cfg.repetitions = 3;
  const auto a = run_mnist(*data_, cfg);
  const auto b = run_mnist(*data_, cfg);
  EXPECT_EQ(a.error_rate, b.error_rate);
  ASSERT_EQ(a.error_rate.size(), 3u);
}

TEST_F(MnistRun, BetterThanChanceAndTaskOrdering) {
  MnistConfig cfg;
  cfg.p = 1000;
  cfg.repetitions = 20;
  const auto res = run_mnist(*data_, cfg);
  for (double e : res.final_error()) EXPECT_LT(e, 0.5);
  EXPECT_LT(res.final_error()[0], res.final_error()[4]);
}

TEST_F(MnistRun, ReshuffleChangesTrainingDraws) {
  MnistConfig cfg;
  cfg.p = 200;
  cfg.repetitions = 2;
  const auto fixed = run_mnist(*data_, cfg);
  cfg.reshuffle = true;
  const auto shuffled = run_mnist(*data_, cfg);
  EXPECT_EQ(fixed.error_rate[0], shuffled.error_rate[0]);
  EXPECT_NE(fixed.error_rate[1], shuffled.error_rate[1]);
}

TEST_F(MnistRun, TestSizeCappedByAvailableSamples) {
  MnistConfig cfg;
  cfg.p = 100;
  cfg.repetitions = 1;
  cfg.test_per_task = 20;
  const auto res = run_mnist(*data_, cfg);
  for (auto n : res.test_size) EXPECT_EQ(n, 20u);
}
