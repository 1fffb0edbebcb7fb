#include "dcl/mnist.hpp"

#include <cstdint>
#include <filesystem>

#include <zlib.h>

#include "dcl/errors.hpp"

namespace dcl::mnist {

namespace {

std::vector<unsigned char> read_all(const std::string& path) {
  if (!std::filesystem::exists(path)) throw IoError(path, "file not found");
  gzFile f = gzopen(path.c_str(), "rb");  // reads plain files transparently
  if (f == nullptr) throw IoError(path, "cannot open");
  std::vector<unsigned char> out;
  unsigned char buf[1 << 16];
  int got = 0;
  while ((got = gzread(f, buf, sizeof buf)) > 0) out.insert(out.end(), buf, buf + got);
  const bool failed = got < 0;
  gzclose(f);
  if (failed) throw IoError(path, "read error (corrupt gzip stream?)");
  return out;
}

std::uint32_t be32(const std::vector<unsigned char>& b, std::size_t off) {
  return (std::uint32_t{b[off]} << 24) | (std::uint32_t{b[off + 1]} << 16) | (std::uint32_t{b[off + 2]} << 8) |
         std::uint32_t{b[off + 3]};
}

std::string pick(const std::string& dir, const std::string& name) {
  const auto raw = std::filesystem::path(dir) / name;
  if (std::filesystem::exists(raw)) return raw.string();
  return raw.string() + ".gz";
}

}  // namespace

ImageSet load_idx(const std::string& images_path, const std::string& labels_path) {
  const auto img = read_all(images_path);
  const auto lab = read_all(labels_path);

  if (img.size() < 16 || be32(img, 0) != 0x00000803) throw IoError(images_path, "not an IDX3 ubyte image file");
  if (lab.size() < 8 || be32(lab, 0) != 0x00000801) throw IoError(labels_path, "not an IDX1 ubyte label file");

  const std::size_t count = be32(img, 4);
  const std::size_t rows = be32(img, 8);
  const std::size_t cols = be32(img, 12);
  if (rows * cols != kPixels) throw IoError(images_path, "expected 28x28 images");
  if (img.size() != 16 + count * kPixels) throw IoError(images_path, "payload size does not match header");
  if (be32(lab, 4) != count) throw IoError(labels_path, "label count does not match image count");
  if (lab.size() != 8 + count) throw IoError(labels_path, "payload size does not match header");

  ImageSet set;
  set.images.resize(static_cast<Eigen::Index>(kPixels), static_cast<Eigen::Index>(count));
  set.labels.resize(count);
  for (std::size_t j = 0; j < count; ++j) {
    const unsigned char* px = img.data() + 16 + j * kPixels;
    for (std::size_t i = 0; i < kPixels; ++i)
      set.images(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = px[i] / 255.0;
    const int label = lab[8 + j];
    if (label > 9) throw IoError(labels_path, "label out of range");
    set.labels[j] = label;
  }
  return set;
}

Dataset load_mnist(const std::string& dir) {
  Dataset d;
  d.train = load_idx(pick(dir, "train-images-idx3-ubyte"), pick(dir, "train-labels-idx1-ubyte"));
  d.test = load_idx(pick(dir, "t10k-images-idx3-ubyte"), pick(dir, "t10k-labels-idx1-ubyte"));
  return d;
}

std::array<std::vector<std::size_t>, kTasks> split_by_task(const ImageSet& set) {
  std::array<std::vector<std::size_t>, kTasks> out;
  for (std::size_t j = 0; j < set.size(); ++j) out[task_of_label(set.labels[j])].push_back(j);
  return out;
}

}  // namespace dcl::mnist
