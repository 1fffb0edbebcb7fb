#include "dcl/experiment.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>
#include <json.hpp>

#include "dcl/errors.hpp"
#include "dcl/metrics.hpp"
#include "dcl/theory.hpp"

namespace dcl {

namespace {

using json = nlohmann::ordered_json;

std::vector<std::size_t> powers_of_two(std::size_t lo, std::size_t hi) {
  std::vector<std::size_t> out;
  for (std::size_t v = lo; v <= hi; v *= 2) out.push_back(v);
  return out;
}

std::vector<std::size_t> steps(std::size_t lo, std::size_t hi, std::size_t step) {
  std::vector<std::size_t> out;
  for (std::size_t v = lo; v <= hi; v += step) out.push_back(v);
  return out;
}

std::size_t div_scale(std::size_t v, double f) { return static_cast<std::size_t>(std::llround(static_cast<double>(v) / f)); }

std::vector<std::size_t> div_scale(std::vector<std::size_t> v, double f) {
  for (auto& x : v) x = div_scale(x, f);
  return v;
}

const char* mode_name(RunMode m) {
  switch (m) {
    case RunMode::theory: return "theory";
    case RunMode::simulation: return "simulation";
    case RunMode::both: return "both";
  }
  return "";
}

RunMode parse_mode(const std::string& s) {
  if (s == "theory") return RunMode::theory;
  if (s == "simulation") return RunMode::simulation;
  if (s == "both") return RunMode::both;
  throw ConfigError("mode", "expected theory, simulation or both, got '" + s + "'");
}

Scale parse_scale(const std::string& s) {
  if (s == "desk") return Scale::desk;
  if (s == "paper") return Scale::paper;
  throw ConfigError("scale", "expected desk or paper, got '" + s + "'");
}

// Stable sub-seed for one grid coordinate tuple.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> key) {
  RngStream s(seed, key);
  return s.engine()();
}

}  // namespace

const std::vector<std::string>& experiment_ids() {
  static const std::vector<std::string> ids{"fig2", "fig3", "fig4", "fig5", "fig6", "fig7",
                                            "fig8", "fig_vs_nt", "mnist", "custom"};
  return ids;
}

ExperimentConfig preset(const std::string& id, Scale scale, const std::string& panel) {
  if (std::find(experiment_ids().begin(), experiment_ids().end(), id) == experiment_ids().end())
    throw ConfigError("experiment", "unknown experiment '" + id + "'");
  if (panel != "a" && panel != "b") throw ConfigError("panel", "expected a or b");

  ExperimentConfig c;
  c.experiment = id;
  c.panel = panel;
  c.scale = scale;
  const bool desk = scale == Scale::desk;
  const double f = desk ? 4.0 : 1.0;

  // error versus K, in the one-shot (a) or overparameterized many-round (b) setting
  auto g_vs_k = [&](ExperimentConfig& e) {
    e.p = div_scale(1024, f);
    e.p_S = {div_scale(768, f)};
    e.sigma2 = {0.01};
    if (panel == "a") {
      e.n_t = {div_scale(2048, f)};
      e.T_c = {1};
      e.K = powers_of_two(1, desk ? 64 : 512);
    } else {
      e.n_t = {div_scale(32, f)};
      e.T_c = {100};
      e.K = powers_of_two(1, 32);
    }
    e.scale_factor = f;
  };

  if (id == "fig2") {
    g_vs_k(c);
    c.T = {1, 2, 4, 8, 16};
    c.figure = panel == "a" ? "Fig. 4(a)" : "Fig. 4(b)";
    c.description = "generalization error versus K for several T";
  } else if (id == "fig3") {
    c.p = 32;
    c.p_S = {24};
    c.param_model = "random_energy";
    c.e_w = 1.0;
    c.n_t = {64, 1};
    c.sigma2 = {0.01, 1.0};
    c.K = powers_of_two(1, 32);
    c.T = powers_of_two(1, 512);
    c.method = {"cocoa", "ls"};
    c.figure = "Figs. 2 and 3";
    c.description = "expected error versus T under the shared-prefix task model, with the LS benchmark";
  } else if (id == "fig4") {
    g_vs_k(c);
    c.T = {16};
    c.p_S = div_scale(std::vector<std::size_t>{0, 256, 512, 768, 1024}, f);
    c.figure = "Fig. 5";
    c.description = "generalization error versus K for several p_S";
  } else if (id == "fig5") {
    g_vs_k(c);
    c.K = {4, 16};
    c.T = {1, 2, 4, 8, 16};
    c.p_S = div_scale(steps(0, 1024, 128), f);
    c.figure = "Fig. 6";
    c.description = "generalization error versus p_S for several T at K = 4 and K = 16";
  } else if (id == "fig6") {
    c.p = div_scale(1024, f);
    c.n_t = {div_scale(32, f)};
    c.p_S = div_scale(std::vector<std::size_t>{0, 256, 512, 768, 1024}, f);
    c.K = {2};
    c.T = {16};
    c.T_c = {100};
    c.passes = 3;
    c.scale_factor = f;
    c.figure = "Fig. 7";
    c.description = "learning curves over repeated task passes, locally overparameterized";
  } else if (id == "fig7") {
    c.p = 64;
    c.n_t = {128};
    c.p_S = {0, 16, 32, 48, 64};
    c.K = {2};
    c.T = {16};
    c.T_c = {100};
    c.passes = 3;
    c.figure = "Fig. 8";
    c.description = "learning curves over repeated task passes, locally underparameterized";
  } else if (id == "fig8") {
    g_vs_k(c);
    c.T = {8};
    c.eps = {0.0, 0.25, 0.5, 0.75, 0.95};
    c.figure = panel == "a" ? "Fig. 10(a)" : "Fig. 10(b)";
    c.description = "generalization error versus K with Toeplitz-correlated regressors";
  } else if (id == "fig_vs_nt") {
    // p / K = 32 is kept at both scales so the interpolation peak stays at n_t = 32
    c.p = div_scale(1024, f);
    c.K = {div_scale(32, f)};
    c.p_S = {div_scale(512, f)};
    c.n_t = {4, 8, 16, 24, 28, 30, 31, 32, 33, 34, 36, 40, 48, 64, 96, 128};
    c.T = {1, 4, 16};
    c.T_c = {1, 100};
    c.scale_factor = f;
    c.figure = "Fig. 9";
    c.description = "generalization error versus n_t for T_c = 1 and T_c = 100";
  } else if (id == "mnist") {
    c.figure = "Fig. 11";
    c.description = "odd/even MNIST classification over five digit-pair tasks";
  } else {
    c.p = 64;
    c.p_S = {32};
    c.n_t = {16};
    c.K = {2};
    c.T = {2};
    c.figure = "none";
    c.description = "user-defined grid";
  }
  return c;
}

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "experiment", "panel",  "scale",       "mode",          "method",  "K",
      "T",          "p_S",    "n_t",         "T_c",           "eps",     "sigma2",
      "p",          "param_model", "E_w",    "passes",        "trials",  "seed",
      "out",        "format", "exclude_nonfinite", "parallel", "mnist_dir", "repetitions",
      "test_per_task", "reshuffle", "feature_variance"};
  return keys;
}

template <class T>
T scalar(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) throw ConfigError(key, "expected a single value");
  try {
    return node.as<T>();
  } catch (const YAML::Exception& e) {
    throw ConfigError(key, "cannot parse value '" + node.Scalar() + "'");
  }
}

template <class T>
std::vector<T> list(const YAML::Node& node, const std::string& key) {
  std::vector<T> out;
  if (node.IsSequence()) {
    for (const auto& item : node) out.push_back(scalar<T>(item, key));
  } else {
    out.push_back(scalar<T>(node, key));
  }
  if (out.empty()) throw ConfigError(key, "grid axis must not be empty");
  return out;
}

std::size_t single(const std::vector<std::size_t>& v, const std::string& key) {
  if (v.size() != 1) throw ConfigError(key, "the mnist experiment takes a single value");
  return v.front();
}

void validate(const ExperimentConfig& c) {
  if (c.experiment == "mnist") {
    if (c.mnist.p < 1) throw ConfigError("p", "must be >= 1");
    if (c.mnist.K < 1 || c.mnist.p % c.mnist.K != 0) throw ConfigError("K", "must divide p");
    if (c.mnist.n_t < 2) throw ConfigError("n_t", "must be >= 2");
    if (c.mnist.T_c < 1) throw ConfigError("T_c", "must be >= 1");
    if (c.mnist.repetitions < 1) throw ConfigError("repetitions", "must be >= 1");
    if (c.mnist.test_per_task < 1) throw ConfigError("test_per_task", "must be >= 1");
    return;
  }
  if (c.p < 1) throw ConfigError("p", "must be >= 1");
  for (const auto& m : c.method)
    if (m != "cocoa" && m != "ls") throw ConfigError("method", "expected cocoa or ls, got '" + m + "'");
  const bool cocoa = std::find(c.method.begin(), c.method.end(), "cocoa") != c.method.end();
  for (auto k : c.K)
    if (cocoa && (k < 1 || c.p % k != 0)) throw ConfigError("K", "every K must divide p = " + std::to_string(c.p));
  for (auto v : c.T)
    if (v < 1) throw ConfigError("T", "must be >= 1");
  for (auto v : c.p_S)
    if (v > c.p) throw ConfigError("p_S", "must not exceed p");
  for (auto v : c.n_t)
    if (v < 1) throw ConfigError("n_t", "must be >= 1");
  for (auto v : c.T_c)
    if (v < 1) throw ConfigError("T_c", "must be >= 1");
  for (auto v : c.eps)
    if (!(v >= 0.0 && v < 1.0)) throw ConfigError("eps", "must lie in [0, 1)");
  for (auto v : c.sigma2)
    if (!(v >= 0.0)) throw ConfigError("sigma2", "must be >= 0");
  if (c.param_model != "normalized" && c.param_model != "random_energy")
    throw ConfigError("param_model", "expected normalized or random_energy");
  if (!(c.e_w > 0.0)) throw ConfigError("E_w", "must be > 0");
  if (c.mode != RunMode::theory && c.trials < 1) throw ConfigError("trials", "simulation needs trials >= 1");
}

}  // namespace

ExperimentConfig parse_config(const std::string& yaml_text, std::optional<RunMode> mode_override) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("", std::string("malformed config: ") + e.what());
  }
  if (root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  if (!root.IsMap()) throw ConfigError("", "config must be a key-value map");

  for (const auto& kv : root) {
    const auto key = kv.first.as<std::string>();
    if (!known_keys().count(key)) throw ConfigError(key, "unknown key");
  }

  const std::string id = root["experiment"] ? scalar<std::string>(root["experiment"], "experiment") : "custom";
  RunMode mode = root["mode"] ? parse_mode(scalar<std::string>(root["mode"], "mode")) : RunMode::both;
  if (mode_override) mode = *mode_override;
  // closed forms are cheap, so theory-only runs default to full-size dimensions
  const Scale scale = root["scale"] ? parse_scale(scalar<std::string>(root["scale"], "scale"))
                                    : (mode == RunMode::theory ? Scale::paper : Scale::desk);
  const std::string panel = root["panel"] ? scalar<std::string>(root["panel"], "panel") : "a";

  ExperimentConfig c = preset(id, scale, panel);
  c.mode = mode;
  const bool mnist = id == "mnist";

  for (const auto& kv : root) {
    const auto key = kv.first.as<std::string>();
    const YAML::Node& v = kv.second;
    if (key == "experiment" || key == "mode" || key == "scale" || key == "panel") continue;
    if (key == "method") c.method = list<std::string>(v, key);
    else if (key == "K") (mnist ? void(c.mnist.K = single(list<std::size_t>(v, key), key)) : void(c.K = list<std::size_t>(v, key)));
    else if (key == "n_t") (mnist ? void(c.mnist.n_t = single(list<std::size_t>(v, key), key)) : void(c.n_t = list<std::size_t>(v, key)));
    else if (key == "T_c") (mnist ? void(c.mnist.T_c = single(list<std::size_t>(v, key), key)) : void(c.T_c = list<std::size_t>(v, key)));
    else if (key == "p") (mnist ? void(c.mnist.p = scalar<std::size_t>(v, key)) : void(c.p = scalar<std::size_t>(v, key)));
    else if (key == "T") c.T = list<std::size_t>(v, key);
    else if (key == "p_S") c.p_S = list<std::size_t>(v, key);
    else if (key == "eps") c.eps = list<double>(v, key);
    else if (key == "sigma2") c.sigma2 = list<double>(v, key);
    else if (key == "param_model") c.param_model = scalar<std::string>(v, key);
    else if (key == "E_w") c.e_w = scalar<double>(v, key);
    else if (key == "passes") c.passes = scalar<std::size_t>(v, key);
    else if (key == "trials") c.trials = scalar<std::size_t>(v, key);
    else if (key == "seed") c.seed = scalar<std::uint64_t>(v, key);
    else if (key == "out") c.out = scalar<std::string>(v, key);
    else if (key == "format") c.format = parse_format(scalar<std::string>(v, key));
    else if (key == "exclude_nonfinite") c.exclude_nonfinite = scalar<bool>(v, key);
    else if (key == "parallel") c.threads = scalar<int>(v, key);
    else if (key == "mnist_dir") c.mnist_dir = scalar<std::string>(v, key);
    else if (key == "repetitions") c.mnist.repetitions = scalar<std::size_t>(v, key);
    else if (key == "test_per_task") c.mnist.test_per_task = scalar<std::size_t>(v, key);
    else if (key == "reshuffle") c.mnist.reshuffle = scalar<bool>(v, key);
    else if (key == "feature_variance") c.mnist.feature_variance = scalar<double>(v, key);
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path, std::optional<RunMode> mode) {
  std::ifstream in(path);
  if (!in) throw IoError(path, "cannot open config");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), mode);
}

namespace {

const std::vector<std::string> kValueColumns{"theory",           "mc_mean",  "mc_stderr", "forgetting_mean",
                                             "forgetting_stderr", "trials",   "nonfinite", "diverged",
                                             "wall_time_s"};

std::vector<std::string> with_values(std::vector<std::string> coords) {
  coords.insert(coords.end(), kValueColumns.begin(), kValueColumns.end());
  return coords;
}

double as_cell(std::size_t v) { return static_cast<double>(v); }

TaskSequenceSpec make_spec(const ExperimentConfig& c, std::size_t p_S, std::size_t T, std::size_t n, double eps,
                           double sigma2) {
  auto spec = TaskSequenceSpec::uniform(c.p, p_S, T, n, sigma2, c.seed);
  if (eps > 0.0) spec.regressors = RegressorModel::toeplitz(eps);
  spec.params = c.param_model == "normalized" ? ParamModel::normalized() : ParamModel::random_energy(c.e_w);
  return spec;
}

// Sub-seeds: parameters depend only on (p, p_S, T) so curves across K, n_t and noise share
// one parameter set; data are shared across K, T_c and method for the same reason.
std::uint64_t param_seed(const ExperimentConfig& c, std::size_t p_S, std::size_t T) {
  return derive_seed(c.seed, {1, c.p, p_S, T});
}

std::uint64_t data_seed(const ExperimentConfig& c, std::size_t p_S, std::size_t T, std::size_t n, double eps,
                        double sigma2) {
  return derive_seed(c.seed, {2, c.p, p_S, T, n, std::bit_cast<std::uint64_t>(eps), std::bit_cast<std::uint64_t>(sigma2)});
}

bool theory_applies(std::size_t n, std::size_t p, std::size_t K, std::size_t T_c, double eps) {
  if (eps != 0.0) return false;
  return T_c == 1 || p / K > n + 1;
}

// Theory at a grid point. `w` empty means use the expected parameter Gram.
double theory_value(const ExperimentConfig& c, const std::vector<Vector>& w, std::size_t p_S, std::size_t T,
                    std::size_t n, std::size_t K, std::size_t T_c, double sigma2, std::size_t t) {
  const auto dims = theory::TheoryDims::equal(n, c.p, K, T);
  const std::vector<double> s2(T, sigma2);
  if (!w.empty()) return theory::theorem1_error(w, s2, dims, t, T_c == 1 ? theory::Regime::one_shot : theory::Regime::overparameterized);
  if (c.param_model == "random_energy" && t == T) {
    try {
      return theory::corollary4_error(c.p, p_S, c.e_w, sigma2, n, K, T);
    } catch (const DegenerateParameterError&) {
      // closed form undefined at b == h or h == 1; the Gram route has no such gap
    }
  }
  const double e_w = c.param_model == "random_energy" ? c.e_w : 1.0;
  return theory::theorem1_error(theory::expected_block_gram(c.p, p_S, e_w, dims.sizes(), T), s2, dims, t);
}

Table run_grid(const ExperimentConfig& c) {
  Table table;
  table.columns = with_values({"method", "p", "p_S", "K", "T", "n_t", "T_c", "eps", "sigma2"});
  const bool want_theory = c.mode != RunMode::simulation;
  const bool want_mc = c.mode != RunMode::theory;

  McOptions opts;
  opts.exclude_nonfinite = c.exclude_nonfinite;
  opts.resample_parameters = c.param_model == "random_energy";

  for (const auto& method : c.method) {
    const bool ls = method == "ls";
    const std::vector<std::size_t> Ks = ls ? std::vector<std::size_t>{1} : c.K;
    const std::vector<std::size_t> Tcs = ls ? std::vector<std::size_t>{1} : c.T_c;
    for (auto p_S : c.p_S)
      for (auto T : c.T) {
        std::vector<Vector> w;
        if (want_mc && c.param_model == "normalized") {
          auto spec = make_spec(c, p_S, T, 1, 0.0, 0.0);
          RngStream prng = parameter_stream(param_seed(c, p_S, T));
          w = generate_parameters(spec, prng);
        }
        for (auto n : c.n_t)
          for (auto T_c : Tcs)
            for (auto eps : c.eps)
              for (auto sigma2 : c.sigma2)
                for (auto K : Ks) {
                  const auto start = std::chrono::steady_clock::now();
                  std::map<std::string, Cell> row{{"method", method}, {"p", as_cell(c.p)}, {"p_S", as_cell(p_S)},
                                                  {"T", as_cell(T)},  {"n_t", as_cell(n)}, {"eps", eps},
                                                  {"sigma2", sigma2}};
                  if (!ls) {
                    row["K"] = as_cell(K);
                    row["T_c"] = as_cell(T_c);
                  }
                  bool diverged = false;
                  bool any = false;
                  if (want_theory && !ls && theory_applies(n, c.p, K, T_c, eps)) {
                    const double th = theory_value(c, w, p_S, T, n, K, T_c, sigma2, T);
                    row["theory"] = th;
                    diverged = diverged || !std::isfinite(th);
                    any = true;
                  }
                  if (want_mc) {
                    const auto spec = make_spec(c, p_S, T, n, eps, sigma2);
                    AlgoConfig algo;
                    algo.method = ls ? Method::offline_ls : Method::cocoa;
                    algo.K = K;
                    algo.T_c = T_c;
                    const auto mc = run_monte_carlo(spec, w, algo, c.trials, data_seed(c, p_S, T, n, eps, sigma2), opts);
                    row["mc_mean"] = mc.generalization.mean;
                    row["mc_stderr"] = mc.generalization.std_error;
                    row["forgetting_mean"] = mc.forgetting.mean;
                    row["forgetting_stderr"] = mc.forgetting.std_error;
                    row["trials"] = as_cell(c.trials);
                    row["nonfinite"] = as_cell(mc.generalization.nonfinite);
                    diverged = diverged || mc.generalization.nonfinite > 0;
                    any = true;
                  }
                  if (!any) continue;
                  row["diverged"] = diverged;
                  row["wall_time_s"] =
                      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
                  table.add(row);
                }
      }
  }
  return table;
}

Table run_curves(const ExperimentConfig& c) {
  Table table;
  table.columns = with_values({"p", "p_S", "K", "T", "n_t", "T_c", "sigma2", "pass", "task", "iter"});
  const bool want_theory = c.mode != RunMode::simulation;
  const bool want_mc = c.mode != RunMode::theory;
  McOptions opts;
  opts.exclude_nonfinite = c.exclude_nonfinite;

  for (auto p_S : c.p_S)
    for (auto T : c.T)
      for (auto n : c.n_t)
        for (auto T_c : c.T_c)
          for (auto sigma2 : c.sigma2)
            for (auto K : c.K) {
              const auto start = std::chrono::steady_clock::now();
              const auto spec = make_spec(c, p_S, T, n, 0.0, sigma2);
              std::vector<Vector> w;
              if (want_mc) {
                RngStream prng = parameter_stream(param_seed(c, p_S, T));
                w = generate_parameters(spec, prng);
              }
              const bool has_theory = want_theory && theory_applies(n, c.p, K, T_c, 0.0);
              std::vector<double> theory_at(T + 1, 0.0);
              if (has_theory)
                for (std::size_t t = 1; t <= T; ++t) theory_at[t] = theory_value(c, w, p_S, T, n, K, T_c, sigma2, t);

              std::vector<CurvePoint> curve;
              if (want_mc) {
                AlgoConfig algo;
                algo.K = K;
                algo.T_c = T_c;
                curve = learning_curve(spec, w, algo, c.passes, c.trials, data_seed(c, p_S, T, n, 0.0, sigma2), opts);
              } else {
                for (std::size_t t = 1; t <= T; ++t)
                  for (std::size_t it = 1; it <= T_c; ++it) curve.push_back({1, t, it, {}, {}});
              }
              const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
              for (const auto& pt : curve) {
                std::map<std::string, Cell> row{{"p", as_cell(c.p)},   {"p_S", as_cell(p_S)},   {"K", as_cell(K)},
                                                {"T", as_cell(T)},     {"n_t", as_cell(n)},     {"T_c", as_cell(T_c)},
                                                {"sigma2", sigma2},    {"pass", as_cell(pt.pass)}, {"task", as_cell(pt.task)},
                                                {"iter", as_cell(pt.iter)}};
                bool diverged = false;
                // the closed form describes the first pass only
                if (has_theory && pt.pass == 1) {
                  row["theory"] = theory_at[pt.task];
                  diverged = !std::isfinite(theory_at[pt.task]);
                }
                if (want_mc) {
                  row["mc_mean"] = pt.generalization.mean;
                  row["mc_stderr"] = pt.generalization.std_error;
                  row["forgetting_mean"] = pt.training.mean;
                  row["forgetting_stderr"] = pt.training.std_error;
                  row["trials"] = as_cell(c.trials);
                  row["nonfinite"] = as_cell(pt.generalization.nonfinite);
                  diverged = diverged || pt.generalization.nonfinite > 0;
                } else if (pt.pass != 1 || !has_theory) {
                  continue;
                }
                row["diverged"] = diverged;
                row["wall_time_s"] = elapsed;
                table.add(row);
              }
            }
  return table;
}

Table run_mnist_table(const ExperimentConfig& c) {
  std::string dir = c.mnist_dir;
  if (dir.empty())
    if (const char* env = std::getenv("DCL_MNIST_DIR")) dir = env;
  if (dir.empty()) throw ConfigError("mnist_dir", "no MNIST directory given (config key or DCL_MNIST_DIR)");
  const auto data = mnist::load_mnist(dir);
  MnistConfig mc = c.mnist;
  mc.seed = c.seed;
  const auto res = run_mnist(data, mc);

  Table table;
  table.columns = {"repetition", "task", "error_rate", "test_size"};
  for (std::size_t r = 0; r < res.error_rate.size(); ++r)
    for (std::size_t t = 0; t < mnist::kTasks; ++t)
      table.add({{"repetition", as_cell(r + 1)},
                 {"task", as_cell(t)},
                 {"error_rate", res.error_rate[r][t]},
                 {"test_size", as_cell(res.test_size[t])}});
  return table;
}

std::string metadata(const ExperimentConfig& c, const Table& table) {
  json m;
  m["experiment"] = c.experiment;
  m["figure"] = c.figure;
  m["description"] = c.description;
  m["scale"] = c.scale == Scale::desk ? "desk" : "paper";
  m["scale_factor"] = c.scale_factor;
  m["mode"] = mode_name(c.mode);
  m["seed"] = c.seed;
  if (c.experiment == "mnist") {
    m["parameters"] = {{"p", c.mnist.p},
                       {"n_t", c.mnist.n_t},
                       {"K", c.mnist.K},
                       {"T_c", c.mnist.T_c},
                       {"T", mnist::kTasks},
                       {"repetitions", c.mnist.repetitions},
                       {"test_per_task", c.mnist.test_per_task},
                       {"reshuffle", c.mnist.reshuffle},
                       {"feature_variance", c.mnist.feature_variance},
                       {"targets", "+1 own parity, -1 other parity"}};
  } else {
    m["panel"] = c.panel;
    m["parameters"] = {{"p", c.p},           {"param_model", c.param_model}, {"E_w", c.e_w},
                       {"trials", c.trials}, {"passes", c.passes},           {"method", c.method},
                       {"K", c.K},           {"T", c.T},                     {"p_S", c.p_S},
                       {"n_t", c.n_t},       {"T_c", c.T_c},                 {"eps", c.eps},
                       {"sigma2", c.sigma2}, {"exclude_nonfinite", c.exclude_nonfinite}};
  }
  m["columns"] = table.columns;
  m["rows"] = table.rows.size();
  return m.dump(2) + "\n";
}

}  // namespace

ExperimentOutput run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  ExperimentOutput out;
  if (cfg.experiment == "mnist")
    out.table = run_mnist_table(cfg);
  else if (cfg.passes > 0)
    out.table = run_curves(cfg);
  else
    out.table = run_grid(cfg);
  out.metadata_json = metadata(cfg, out.table);
  return out;
}

void write_output(const ExperimentOutput& out, const ExperimentConfig& cfg) {
  if (cfg.out.empty()) throw ConfigError("out", "no output path");
  emit(out.table, cfg.format, cfg.out);
  const std::string meta_path = cfg.out + ".meta.json";
  std::ofstream meta(meta_path, std::ios::binary);
  if (!meta) throw IoError(meta_path, "cannot open for writing");
  meta << out.metadata_json;
}

Table without_wall_time(Table t) {
  const auto it = std::find(t.columns.begin(), t.columns.end(), "wall_time_s");
  if (it == t.columns.end()) return t;
  const auto idx = static_cast<std::size_t>(it - t.columns.begin());
  t.columns.erase(it);
  for (auto& row : t.rows) row.erase(row.begin() + static_cast<std::ptrdiff_t>(idx));
  return t;
}

}  // namespace dcl
