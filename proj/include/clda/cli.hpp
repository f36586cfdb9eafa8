#pragma once

/**
 * @brief Command-line front end: fit, eval, artificial, noise.
 *
 * Exit codes: 0 success, 1 module error (bad parameter, solver failure),
 * 2 I/O or parse failure (unreadable file, malformed CSV, bad flags).
 * CLDA_THREADS caps the number of worker threads.
 */

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "clda/csv.hpp"
#include "clda/discriminant.hpp"
#include "clda/eval.hpp"
#include "clda/synth.hpp"

namespace clda {

/// Worker count: CLDA_THREADS when set to a positive integer, else the
/// hardware concurrency.
inline int thread_budget() {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("CLDA_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  return static_cast<int>(hw);
}

/// Angle of a 2-D direction to the x-axis in degrees, folded into (-90, 90].
inline double angle_to_x_deg(const Vector& w) {
  if (w(0) == 0.0) return 90.0;
  return std::atan(w(1) / w(0)) * 180.0 / std::numbers::pi;
}

struct ArtificialOutcome {
  Method method = Method::Lda;
  double accuracy = 0.0;
  double angle_deg = 0.0;
  double epsilon = 0.0;  // 0 for LDA
  int iterations = 0;
  Vector direction;
};

struct ArtificialOptions {
  double between_multiple = 1.0;
  /// Min-max scale both splits to [0, 1] with training statistics before any noise.
  bool normalize = false;
  std::optional<NoiseSpec> noise;
};

/// One seed of the two-strip experiment: fits 1-D LDA and CLDA on the
/// training split (optionally noise-polluted) and scores 1-NN on the test split.
/// CLDA's epsilon is between_multiple times the between-class bound.
inline std::vector<ArtificialOutcome> artificial_trial(std::uint64_t seed, const ArtificialSpec& spec = {},
                                                       const ArtificialOptions& opts = {}) {
  TrainTest tt = make_artificial(seed, spec);
  if (opts.normalize) {
    const MinMaxScaler scaler = MinMaxScaler::fit(tt.train.features());
    tt.train = with_features(tt.train, scaler.apply(tt.train.features()));
    tt.test = with_features(tt.test, scaler.apply(tt.test.features()));
  }
  if (opts.noise) tt.train = add_gaussian_noise(tt.train, *opts.noise);
  std::vector<ArtificialOutcome> out;
  for (Method m : {Method::Lda, Method::Clda}) {
    ArtificialOutcome o;
    o.method = m;
    Projection p;
    if (m == Method::Lda) {
      p = lda_fit(tt.train, 1);
    } else {
      CldaOptions cfg;
      cfg.d = 1;
      cfg.epsilon = opts.between_multiple * between_bound(tt.train, 1);
      o.epsilon = cfg.epsilon;
      p = clda_fit(tt.train, cfg);
    }
    Vector w = p.w.col(0);
    w /= w.norm();
    o.direction = w;
    o.angle_deg = angle_to_x_deg(w);
    o.iterations = p.iterations;
    const std::vector<int> pred = nn_classify(project(p, tt.train.features()), tt.train.labels(),
                                              project(p, tt.test.features()));
    int correct = 0;
    for (std::size_t t = 0; t < pred.size(); ++t) correct += pred[t] == tt.test.labels()[t];
    o.accuracy = 100.0 * correct / static_cast<double>(pred.size());
    out.push_back(std::move(o));
  }
  return out;
}

namespace detail {

inline std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline Method parse_method(const std::string& s) {
  if (s == "lda") return Method::Lda;
  if (s == "clda") return Method::Clda;
  throw Error(ErrorCode::InvalidArgument, "unknown method '" + s + "' (expected lda or clda)");
}

struct NoiseFlags {
  std::optional<double> features, samples, variance;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--noise-features", features, "fraction of features polluted per selected sample");
    cmd->add_option("--noise-samples", samples, "fraction of samples polluted");
    cmd->add_option("--noise-variance", variance, "variance of the added Gaussian noise");
  }

  std::optional<NoiseSpec> spec(std::uint64_t seed) const {
    if (!features && !samples && !variance) return std::nullopt;
    NoiseSpec n;
    if (features) n.feature_fraction = *features;
    if (samples) n.sample_fraction = *samples;
    if (variance) n.variance = *variance;
    n.seed = derive_seed(seed, 0x4015E);
    n.validate();
    return n;
  }
};

inline std::string with_suffix(const std::string& path, const std::string& suffix) {
  const auto dot = path.rfind('.');
  const auto slash = path.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + suffix;
  return path.substr(0, dot) + suffix;
}

}  // namespace detail

struct FitArgs {
  std::string method = "clda", input, label_col, out, trace;
  int d = 1;
  std::optional<double> epsilon, epsilon_quantile, epsilon_between;
  int max_iter = 50;
  double tol = 1e-6, ridge = 1e-8;
};

inline int cmd_fit(const FitArgs& a, std::ostream& out) {
  const Method method = detail::parse_method(a.method);
  const LoadedData loaded = load_dataset(a.input, a.label_col);
  const Dataset& data = loaded.data;
  Projection p;
  double eps = 0.0;
  if (method == Method::Lda) {
    p = lda_fit(data, a.d, a.ridge);
  } else {
    CldaOptions cfg;
    cfg.d = a.d;
    cfg.max_iter = a.max_iter;
    cfg.tol = a.tol;
    cfg.ridge = a.ridge;
    cfg.validate(data.num_features());
    EpsilonRule rule{EpsilonRule::Kind::WithinQuantile, a.epsilon_quantile.value_or(0.9)};
    if (a.epsilon) rule = {EpsilonRule::Kind::Absolute, *a.epsilon};
    if (a.epsilon_between) rule = {EpsilonRule::Kind::BetweenMultiple, *a.epsilon_between};
    cfg.epsilon = rule.resolve(data, a.d, cfg.zero_guard);
    eps = cfg.epsilon;
    p = clda_fit(data, cfg);
  }
  write_matrix(a.out, p.w);
  const std::string trace_path = a.trace.empty() ? detail::with_suffix(a.out, ".trace.csv") : a.trace;
  std::vector<std::vector<std::string>> rows;
  for (std::size_t t = 0; t < p.objective_trace.size(); ++t)
    rows.push_back({std::to_string(t), format_double(p.objective_trace[t])});
  write_csv(trace_path, {"iteration", "objective"}, rows);

  out << "method=" << to_string(method) << " d=" << a.d;
  if (method == Method::Clda) out << " epsilon=" << format_double(eps);
  out << " iterations=" << p.iterations << " converged=" << (p.converged ? "yes" : "no");
  if (p.stalled) out << " stalled=yes";
  if (p.padded) out << " padded=yes";
  out << " objective=" << format_double(p.objective_trace.back()) << '\n';
  return 0;
}

struct EvalArgs {
  std::string method = "clda", input, label_col, out;
  int folds = 10, repetitions = 1;
  std::uint64_t seed = 0;
  std::optional<int> d;
  bool no_normalize = false;
  detail::NoiseFlags noise;
};

inline int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const Method method = detail::parse_method(a.method);
  if (a.repetitions < 1) throw Error(ErrorCode::InvalidArgument, "repetitions must be at least 1");
  const LoadedData loaded = load_dataset(a.input, a.label_col);
  const Dataset& data = loaded.data;

  CvOptions base;
  base.k = a.folds;
  base.method = method;
  base.threads = thread_budget();
  base.normalize = !a.no_normalize;
  base.grid = default_grid(method, data.num_features(), data.num_classes());
  if (a.d) {
    std::erase_if(base.grid, [&](const GridPoint& g) { return g.d != *a.d; });
    if (base.grid.empty()) throw Error(ErrorCode::InvalidArgument, "--d " + std::to_string(*a.d) + " is outside the grid");
  }

  const std::vector<std::string> header = {"repetition", "method", "accuracy", "std_dev", "d", "epsilon_rule",
                                           "epsilon", "ridge", "failed_folds", "stratified", "noise_features",
                                           "noise_samples", "noise_variance", "noise_seed"};
  std::vector<std::vector<std::string>> rows;
  std::vector<double> accs;
  out << "rep  method  accuracy         d  epsilon\n";
  for (int r = 0; r < a.repetitions; ++r) {
    CvOptions opts = base;
    opts.seed = derive_seed(a.seed, static_cast<std::uint64_t>(r));
    opts.train_noise = a.noise.spec(opts.seed);
    const EvalReport rep = kfold_cv(data, opts);
    accs.push_back(rep.accuracy);
    const NoiseSpec ns = opts.train_noise.value_or(NoiseSpec{0, 0, 0, 0});
    rows.push_back({std::to_string(r), std::string(to_string(method)), format_double(rep.accuracy),
                    format_double(rep.std_dev), std::to_string(rep.chosen.d),
                    method == Method::Clda ? rep.chosen.epsilon.describe() : "none",
                    format_double(rep.mean_epsilon), format_double(rep.chosen.ridge),
                    std::to_string(rep.failed_folds), rep.stratified ? "1" : "0",
                    format_double(ns.feature_fraction), format_double(ns.sample_fraction),
                    format_double(ns.variance), std::to_string(ns.seed)});
    char line[160];
    std::snprintf(line, sizeof line, "%-4d %-7s %6.2f ± %-6.2f %-2d %s\n", r, std::string(to_string(method)).c_str(),
                  rep.accuracy, rep.std_dev, rep.chosen.d,
                  method == Method::Clda ? rep.chosen.epsilon.describe().c_str() : "-");
    out << line;
    for (const auto& msg : rep.diagnostics) out << "  note: " << msg << '\n';
  }
  const double mean = detail::mean(accs);
  const double sd = detail::sample_std(accs);
  rows.push_back({"mean", std::string(to_string(method)), format_double(mean), format_double(sd), "", "", "", "",
                  "", "", "", "", "", ""});
  out << "mean " << std::string(to_string(method)) << "    " << detail::fixed2(mean) << " ± " << detail::fixed2(sd)
      << '\n';
  if (!a.out.empty()) write_csv(a.out, header, rows);
  return 0;
}

struct ArtificialArgs {
  std::string out = "artificial.csv", points, directions;
  std::uint64_t seed = 0;
  int seeds = 10;
  double epsilon_between = 1.0;
  bool normalize = false;
  detail::NoiseFlags noise;
};

inline int cmd_artificial(const ArtificialArgs& a, std::ostream& out) {
  if (a.seeds < 1) throw Error(ErrorCode::InvalidArgument, "--seeds must be at least 1");
  std::vector<std::vector<ArtificialOutcome>> trials(static_cast<std::size_t>(a.seeds));
  {
    const int workers = std::clamp(thread_budget(), 1, a.seeds);
    std::vector<std::jthread> pool;
    std::vector<std::string> errors(static_cast<std::size_t>(a.seeds));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int s = w; s < a.seeds; s += workers) {
          const std::uint64_t seed = a.seed + static_cast<std::uint64_t>(s);
          try {
            trials[static_cast<std::size_t>(s)] =
                artificial_trial(seed, {}, {a.epsilon_between, a.normalize, a.noise.spec(seed)});
          } catch (const Error& e) {
            errors[static_cast<std::size_t>(s)] = e.what();
          }
        }
      });
    }
    pool.clear();
    for (int s = 0; s < a.seeds; ++s)
      if (!errors[static_cast<std::size_t>(s)].empty()) throw Error(ErrorCode::GridPointFailed, errors[static_cast<std::size_t>(s)]);
  }

  std::vector<std::vector<std::string>> rows;
  double sum[2] = {0, 0}, ang[2] = {0, 0};
  for (int s = 0; s < a.seeds; ++s) {
    for (const auto& o : trials[static_cast<std::size_t>(s)]) {
      const int k = o.method == Method::Lda ? 0 : 1;
      sum[k] += o.accuracy;
      ang[k] += std::abs(o.angle_deg);
      rows.push_back({std::to_string(a.seed + static_cast<std::uint64_t>(s)), std::string(to_string(o.method)),
                      format_double(o.accuracy), format_double(o.angle_deg), format_double(o.epsilon),
                      std::to_string(o.iterations)});
    }
  }
  for (int k = 0; k < 2; ++k) {
    rows.push_back({"mean", k == 0 ? "lda" : "clda", format_double(sum[k] / a.seeds), format_double(ang[k] / a.seeds),
                    "", ""});
    out << (k == 0 ? "lda   " : "clda  ") << "accuracy " << detail::fixed2(sum[k] / a.seeds) << "  |angle| "
        << detail::fixed2(ang[k] / a.seeds) << " deg\n";
  }
  write_csv(a.out, {"seed", "method", "accuracy", "angle_deg", "epsilon", "iterations"}, rows);

  // Plot data for the first seed.
  TrainTest tt = make_artificial(a.seed);
  if (a.normalize) {
    const MinMaxScaler scaler = MinMaxScaler::fit(tt.train.features());
    tt.train = with_features(tt.train, scaler.apply(tt.train.features()));
    tt.test = with_features(tt.test, scaler.apply(tt.test.features()));
  }
  if (auto ns = a.noise.spec(a.seed)) tt.train = add_gaussian_noise(tt.train, *ns);
  std::vector<std::vector<std::string>> pts;
  auto dump = [&](const Dataset& d, const char* split) {
    for (int j = 0; j < d.num_samples(); ++j)
      pts.push_back({split, format_double(d.features()(0, j)), format_double(d.features()(1, j)),
                     std::to_string(d.labels()[static_cast<std::size_t>(j)])});
  };
  dump(tt.train, "train");
  dump(tt.test, "test");
  write_csv(a.points.empty() ? detail::with_suffix(a.out, ".points.csv") : a.points, {"split", "x", "y", "label"}, pts);
  std::vector<std::vector<std::string>> dirs;
  for (const auto& o : trials.front())
    dirs.push_back({std::string(to_string(o.method)), format_double(o.direction(0)), format_double(o.direction(1)),
                    format_double(o.angle_deg)});
  write_csv(a.directions.empty() ? detail::with_suffix(a.out, ".directions.csv") : a.directions,
            {"method", "dx", "dy", "angle_deg"}, dirs);
  return 0;
}

struct NoiseArgs {
  std::string input, label_col, out;
  double features = 0.3, samples = 0.1, variance = 0.05;
  std::uint64_t seed = 0;
};

/// Rewrites the input CSV with polluted feature values; the label column and
/// header are kept in place.
inline int cmd_noise(const NoiseArgs& a, std::ostream& out) {
  const LoadedData loaded = load_dataset(a.input, a.label_col);
  const NoiseSpec spec{a.features, a.samples, a.variance, a.seed};
  const Dataset noisy = add_gaussian_noise(loaded.data, spec);
  std::vector<std::vector<std::string>> rows = loaded.table.rows;
  int changed = 0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    Eigen::Index f = 0;
    for (std::size_t j = 0; j < rows[r].size(); ++j) {
      if (static_cast<int>(j) == loaded.label_column) continue;
      const double before = loaded.data.features()(f, static_cast<Eigen::Index>(r));
      const double after = noisy.features()(f, static_cast<Eigen::Index>(r));
      if (after != before) {
        rows[r][j] = format_double(after);
        ++changed;
      }
      ++f;
    }
  }
  write_csv(a.out, loaded.table.header, rows);
  out << "polluted " << changed << " entries\n";
  return 0;
}

/// Parses args (without the program name) and dispatches.
inline int run_cli(std::vector<std::string> args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Capped l2,1-norm linear discriminant analysis", "clda_cli"};
  app.require_subcommand(1);

  FitArgs fit;
  auto* f = app.add_subcommand("fit", "fit a projection and write W and the objective trace");
  f->add_option("--method", fit.method, "lda or clda")->capture_default_str();
  f->add_option("--input", fit.input, "input CSV")->required();
  f->add_option("--label-col", fit.label_col, "label column name or 0-based index (default: last)");
  f->add_option("--d", fit.d, "projection dimension")->capture_default_str();
  auto* e_abs = f->add_option("--epsilon", fit.epsilon, "absolute cap");
  auto* e_q = f->add_option("--epsilon-quantile", fit.epsilon_quantile, "cap as a within-class residual quantile (default 0.9)");
  auto* e_b = f->add_option("--epsilon-between", fit.epsilon_between, "cap as a multiple of the between-class bound");
  e_abs->excludes(e_q)->excludes(e_b);
  e_q->excludes(e_b);
  f->add_option("--max-iter", fit.max_iter)->capture_default_str();
  f->add_option("--tol", fit.tol)->capture_default_str();
  f->add_option("--ridge", fit.ridge, "ridge relative to the scatter trace")->capture_default_str();
  f->add_option("--out", fit.out, "output CSV for W (n x d)")->required();
  f->add_option("--trace", fit.trace, "output CSV for the objective trace (default: <out>.trace.csv)");

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "k-fold cross-validated 1-NN accuracy with parameter search");
  e->add_option("--method", ev.method, "lda or clda")->capture_default_str();
  e->add_option("--input", ev.input, "input CSV")->required();
  e->add_option("--label-col", ev.label_col, "label column name or 0-based index (default: last)");
  e->add_option("--folds", ev.folds)->capture_default_str();
  e->add_option("--repetitions", ev.repetitions)->capture_default_str();
  e->add_option("--seed", ev.seed)->capture_default_str();
  e->add_option("--d", ev.d, "restrict the grid to one dimension");
  e->add_flag("--no-normalize", ev.no_normalize, "skip [0,1] scaling");
  e->add_option("--out", ev.out, "report CSV");
  ev.noise.add_to(e);

  ArtificialArgs ar;
  auto* r = app.add_subcommand("artificial", "two-strip experiment with outliers, LDA vs CLDA");
  r->add_option("--seed", ar.seed, "first seed")->capture_default_str();
  r->add_option("--seeds", ar.seeds, "number of consecutive seeds")->capture_default_str();
  r->add_option("--epsilon-between", ar.epsilon_between, "CLDA cap as a multiple of the between-class bound")
      ->capture_default_str();
  r->add_option("--out", ar.out)->capture_default_str();
  r->add_option("--points", ar.points, "point file (default: <out>.points.csv)");
  r->add_option("--directions", ar.directions, "direction file (default: <out>.directions.csv)");
  r->add_flag("--normalize", ar.normalize, "min-max scale to [0,1] with training statistics before noise");
  ar.noise.add_to(r);

  NoiseArgs nz;
  auto* n = app.add_subcommand("noise", "add Gaussian noise to random features of random samples");
  n->add_option("--input", nz.input)->required();
  n->add_option("--label-col", nz.label_col, "label column name or 0-based index (default: last)");
  n->add_option("--out", nz.out)->required();
  n->add_option("--feature-fraction", nz.features)->capture_default_str();
  n->add_option("--sample-fraction", nz.samples)->capture_default_str();
  n->add_option("--variance", nz.variance)->capture_default_str();
  n->add_option("--seed", nz.seed)->capture_default_str();

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& ex) {
    return app.exit(ex, out, err);
  } catch (const CLI::CallForAllHelp& ex) {
    return app.exit(ex, out, err);
  } catch (const CLI::ParseError& ex) {
    app.exit(ex, out, err);
    return 2;
  }

  try {
    if (*f) return cmd_fit(fit, out);
    if (*e) return cmd_eval(ev, out);
    if (*r) return cmd_artificial(ar, out);
    if (*n) return cmd_noise(nz, out);
  } catch (const Error& ex) {
    err << "error: " << ex.what() << '\n';
    return ex.code() == ErrorCode::Io || ex.code() == ErrorCode::Parse ? 2 : 1;
  }
  return 1;
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return run_cli(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

}  // namespace clda
