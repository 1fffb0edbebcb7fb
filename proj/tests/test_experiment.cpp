#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "json.hpp"

#include "dcl/errors.hpp"
#include "dcl/experiment.hpp"

using namespace dcl;

namespace {

double num(const Table& t, std::size_t row, const std::string& col) { return std::get<double>(t.at(row, col)); }
bool empty(const Table& t, std::size_t row, const std::string& col) {
  return std::holds_alternative<std::monostate>(t.at(row, col));
}

}  // namespace

TEST(Config, UnknownKeyNamed) {
  try {
    parse_config("experiment: custom\ntrails: 10\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "trails");
  }
}

TEST(Config, InvalidValuesNameTheirKey) {
  auto key_of = [](const std::string& yaml) {
    try {
      parse_config(yaml);
    } catch (const ConfigError& e) {
      return e.key();
    }
    return std::string("<none>");
  };
  EXPECT_EQ(key_of("p: 64\nK: [3]\n"), "K");
  EXPECT_EQ(key_of("p: 64\np_S: [65]\n"), "p_S");
  EXPECT_EQ(key_of("eps: [1.0]\n"), "eps");
  EXPECT_EQ(key_of("method: [sgd]\n"), "method");
  EXPECT_EQ(key_of("experiment: fig99\n"), "experiment");
  EXPECT_EQ(key_of("mode: maybe\n"), "mode");
  EXPECT_EQ(key_of("trials: 0\n"), "trials");
}

TEST(Config, OverridesAndModeDefaults) {
  const auto c = parse_config("experiment: fig2\nT: [3]\nseed: 9\nformat: json\n");
  EXPECT_EQ(c.T, std::vector<std::size_t>{3});
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.format, Format::json);
  EXPECT_EQ(c.scale, Scale::desk);
  EXPECT_EQ(c.p, 256u);
  const auto th = parse_config("experiment: fig2\n", RunMode::theory);
  EXPECT_EQ(th.mode, RunMode::theory);
  EXPECT_EQ(th.scale, Scale::paper);
  EXPECT_EQ(th.p, 1024u);
}

TEST(Config, MnistKeysMapToMnistConfig) {
  const auto c = parse_config("experiment: mnist\np: 500\nK: 5\nrepetitions: 3\nreshuffle: true\n");
  EXPECT_EQ(c.mnist.p, 500u);
  EXPECT_EQ(c.mnist.K, 5u);
  EXPECT_EQ(c.mnist.repetitions, 3u);
  EXPECT_TRUE(c.mnist.reshuffle);
}

TEST(Presets, PaperDimensions) {
  const auto a = preset("fig2", Scale::paper, "a");
  EXPECT_EQ(a.p, 1024u);
  EXPECT_EQ(a.p_S, std::vector<std::size_t>{768});
  EXPECT_EQ(a.n_t, std::vector<std::size_t>{2048});
  EXPECT_EQ(a.K.back(), 512u);
  EXPECT_EQ(a.figure, "Fig. 4(a)");
  const auto b = preset("fig2", Scale::paper, "b");
  EXPECT_EQ(b.n_t, std::vector<std::size_t>{32});
  EXPECT_EQ(b.T_c, std::vector<std::size_t>{100});
  const auto desk = preset("fig2", Scale::desk, "a");
  EXPECT_EQ(desk.scale_factor, 4.0);
  EXPECT_EQ(desk.p, 256u);
  EXPECT_EQ(preset("fig3", Scale::desk).method, (std::vector<std::string>{"cocoa", "ls"}));
  EXPECT_EQ(preset("fig7", Scale::desk).passes, 3u);
  for (const auto& id : experiment_ids()) EXPECT_FALSE(preset(id, Scale::desk).figure.empty()) << id;
}

TEST(Run, TheoryOnlyIgnoresSeedAndFillsTheoryColumn) {
  auto cfg = parse_config("p: 64\np_S: [0, 32]\nn_t: [16]\nK: [1, 2]\nT: [2]\n", RunMode::theory);
  const auto a = run_experiment(cfg);
  cfg.seed = 12345;
  const auto b = run_experiment(cfg);
  const auto& t = a.table;
  ASSERT_EQ(t.rows.size(), 4u);
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    EXPECT_TRUE(std::isfinite(num(t, r, "theory")));
    EXPECT_TRUE(empty(t, r, "mc_mean"));
    EXPECT_TRUE(empty(t, r, "mc_stderr"));
    EXPECT_EQ(num(t, r, "theory"), num(b.table, r, "theory"));
  }
}

TEST(Run, SimulationIsReproducible) {
  auto cfg = parse_config("p: 16\np_S: [8]\nn_t: [4]\nK: [1, 2]\nT: [2]\ntrials: 20\nseed: 3\n", RunMode::simulation);
  const auto a = run_experiment(cfg), b = run_experiment(cfg);
  EXPECT_EQ(to_string(without_wall_time(a.table), Format::csv), to_string(without_wall_time(b.table), Format::csv));
  for (std::size_t r = 0; r < a.table.rows.size(); ++r) EXPECT_TRUE(empty(a.table, r, "theory"));
}

TEST(Run, TheoryAgreesWithSimulation) {
  auto cfg = parse_config("p: 32\np_S: [16]\nn_t: [4]\nK: [1, 2, 4]\nT: [1, 3]\nsigma2: [0.05]\ntrials: 2000\n");
  const auto out = run_experiment(cfg);
  ASSERT_EQ(out.table.rows.size(), 6u);
  for (std::size_t r = 0; r < out.table.rows.size(); ++r)
    EXPECT_LE(std::abs(num(out.table, r, "theory") - num(out.table, r, "mc_mean")),
              3.0 * num(out.table, r, "mc_stderr"))
        << r;
}

TEST(Run, LeastSquaresRowsHaveNoNodeCount) {
  auto cfg = parse_config("p: 16\np_S: [8]\nn_t: [4]\nK: [2]\nT: [2]\nmethod: [cocoa, ls]\ntrials: 5\n",
                          RunMode::simulation);
  const auto out = run_experiment(cfg);
  ASSERT_EQ(out.table.rows.size(), 2u);
  EXPECT_EQ(std::get<std::string>(out.table.at(1, "method")), "ls");
  EXPECT_TRUE(empty(out.table, 1, "K"));
}

TEST(Run, MoreSharedStructureLowersTheError) {
  auto cfg = parse_config("experiment: fig5\nK: [4, 16]\nT: [4, 16]\n", RunMode::theory);
  const auto out = run_experiment(cfg);
  const auto& t = out.table;
  for (std::size_t r = 0; r + 1 < t.rows.size(); ++r)
    for (std::size_t s = r + 1; s < t.rows.size(); ++s) {
      if (num(t, r, "K") == num(t, s, "K") && num(t, r, "T") == num(t, s, "T") && num(t, r, "p_S") < num(t, s, "p_S")) {
        EXPECT_GE(num(t, r, "theory"), num(t, s, "theory"));
      }
    }
}

TEST(Run, LearningCurveRows) {
  auto cfg = parse_config("p: 16\np_S: [8]\nn_t: [4]\nK: [2]\nT: [3]\nT_c: [2]\npasses: 2\ntrials: 4\n",
                          RunMode::simulation);
  const auto out = run_experiment(cfg);
  EXPECT_EQ(out.table.rows.size(), 2u * 3u * 2u);
  EXPECT_EQ(num(out.table, 0, "iter"), 1.0);
}

TEST(Output, WritesTableAndMetadata) {
  const auto dir = std::filesystem::temp_directory_path() / "dcl_experiment_out";
  std::filesystem::create_directories(dir);
  auto cfg = parse_config("p: 16\np_S: [8]\nn_t: [4]\nK: [2]\nT: [2]\nformat: json\n", RunMode::theory);
  cfg.out = (dir / "run.json").string();
  const auto out = run_experiment(cfg);
  write_output(out, cfg);
  EXPECT_EQ(read_table(cfg.out, Format::json), out.table);
  std::ifstream meta(cfg.out + ".meta.json");
  ASSERT_TRUE(meta.good());
  const auto j = nlohmann::json::parse(meta);
  EXPECT_EQ(j["experiment"], "custom");
  EXPECT_EQ(j["seed"], 1);
  cfg.out.clear();
  EXPECT_THROW(write_output(out, cfg), ConfigError);
}
