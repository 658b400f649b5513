// Command-line front end: load matrices, run solvers/oracles/experiments,
// emit machine-readable reports. Exit codes: 0 success, 2 input/parse error,
// 3 precondition violation, 4 numerical failure.

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <string>
#include <vector>

#include "l1pca/baselines.hpp"
#include "l1pca/data_matrix.hpp"
#include "l1pca/errors.hpp"
#include "l1pca/experiments.hpp"
#include "l1pca/io.hpp"
#include "l1pca/parallel.hpp"
#include "l1pca/rng.hpp"
#include "l1pca/solver_k1.hpp"
#include "l1pca/solver_kk.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct SolveOptions {
  std::string matrix_path;
  std::string solver = "l1bf";
  int k = 1;
  int restarts = 1;
  std::uint64_t seed = 0;
  int budget = 0;
  double tol = -1.0;
  std::string init = "svsign";
  bool transpose = false;
  std::string out;
};

struct ExperimentOptions {
  std::string name;
  std::string config_path;
  std::string out_dir;
  int threads = 0;
};

json q_to_json(const Eigen::MatrixXd& q) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < q.cols(); ++j)
      row.push_back(l1pca::io::round_12sig(q(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

int run_solve(const SolveOptions& opt) {
  const Eigen::MatrixXd m =
      l1pca::io::load_matrix_csv(opt.matrix_path, opt.transpose);
  const l1pca::DataMatrix x(m);

  l1pca::SolverConfig cfg;
  cfg.restarts = opt.restarts;
  cfg.seed = opt.seed;
  cfg.flip_budget = opt.budget;
  cfg.tol = opt.tol;
  cfg.init = opt.init == "random" ? l1pca::InitMode::Random
                                  : l1pca::InitMode::SvSign;

  json report;
  report["solver"] = opt.solver;
  report["k"] = opt.k;
  double wall = 0.0;
  if (opt.solver == "oracle") {
    const l1pca::OracleResult oracle = l1pca::exhaustive_oracle(x, opt.k);
    report["l1_metric"] =
        l1pca::io::round_12sig(l1pca::l1_metric_k(x, oracle.optimal_q));
    report["quad_or_nuclear_metric"] = l1pca::io::round_12sig(oracle.best_value);
    report["flips"] = 0;
    report["restarts"] = 0;
    report["converged"] = true;
    report["q"] = q_to_json(oracle.optimal_q);
  } else {
    l1pca::SolverReport rep;
    if (opt.solver == "l1bf") {
      rep = opt.k == 1 ? l1pca::bit_flip_solve(x, cfg)
                       : l1pca::bit_flip_solve_k(x, opt.k, cfg);
    } else if (opt.solver == "fp") {
      rep = l1pca::fixed_point_solve(x, opt.k, cfg);
    } else if (opt.solver == "ao") {
      rep = l1pca::alt_opt_solve(x, opt.k, cfg);
    } else {
      throw l1pca::InputError("unknown solver: " + opt.solver);
    }
    report["l1_metric"] = l1pca::io::round_12sig(rep.l1_metric);
    report["quad_or_nuclear_metric"] = l1pca::io::round_12sig(rep.quad_metric);
    report["flips"] = rep.flips;
    report["restarts"] = opt.restarts;
    report["restart_winner"] = rep.restart_winner;
    report["converged"] = rep.converged;
    report["basis_completed"] = rep.basis_completed;
    report["q"] = q_to_json(rep.q);
    wall = rep.wall_time_sec;
  }

  std::ofstream out(opt.out, std::ios::binary);
  if (!out) throw l1pca::InputError("cannot write report: " + opt.out);
  out << report.dump(2) << '\n';
  // Timing is reported on stderr only, keeping artifacts byte-identical
  // across repeated runs.
  std::fprintf(stderr, "wall_time_sec %.6f\n", wall);
  return 0;
}

// ---------------------------------------------------------------------------
// Experiments

json default_config(const std::string& name) {
  if (name == "compare")
    return {{"D", 4},        {"N", 16},     {"K", 1},
            {"trials", 1000}, {"restarts", 1}, {"seed", 7},
            {"solvers", json::array({"l1bf", "fp", "ao"})}};
  if (name == "sets")
    return {{"d", 2}, {"N_min", 2}, {"N_max", 7}, {"trials", 1000}, {"seed", 7}};
  if (name == "linefit")
    return {{"n_nominal", 100}, {"repetitions", 200}, {"seed", 7}};
  if (name == "classify")
    return {{"D", 9},
            {"N_per_class", 19},
            {"N_train", 10},
            {"K", 3},
            {"rank_n", 5},
            {"scale_n", 2.5},
            {"splits", 2000},
            {"noise", 0.2},
            {"p_mislabel", json::array({0, 2, 4})},
            {"methods", json::array({"l2", "l1bf"})},
            {"data_seed", 11},
            {"seed", 7}};
  if (name == "initcdf")
    return {{"D", 3}, {"N", 20}, {"trials", 1000}, {"seed", 7}};
  throw l1pca::InputError("unknown experiment name: " + name);
}

json load_config(const ExperimentOptions& opt) {
  json config = default_config(opt.name);
  if (!opt.config_path.empty()) {
    std::ifstream in(opt.config_path);
    if (!in)
      throw l1pca::InputError("cannot open config: " + opt.config_path);
    json user;
    try {
      in >> user;
    } catch (const json::parse_error& e) {
      throw l1pca::InputError(std::string("config parse error: ") + e.what());
    }
    for (auto it = user.begin(); it != user.end(); ++it)
      config[it.key()] = it.value();
  }
  return config;
}

std::vector<std::string> cdf_lines(std::vector<double> values,
                                   const std::string& header) {
  std::sort(values.begin(), values.end());
  std::vector<std::string> lines{header};
  const double n = static_cast<double>(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    lines.push_back(l1pca::io::format_double(values[i]) + "," +
                    l1pca::io::format_double((i + 1.0) / n));
  return lines;
}

void write_manifest(const ExperimentOptions& opt, const json& config,
                    const std::vector<std::string>& artifacts) {
  json manifest;
  manifest["command"] = "experiment";
  manifest["name"] = opt.name;
  manifest["config"] = config;
  manifest["output_dir"] = opt.out_dir;
  json files = json::array();
  std::vector<std::string> sorted = artifacts;
  std::sort(sorted.begin(), sorted.end());
  for (const auto& f : sorted)
    files.push_back({{"file", f},
                     {"fnv1a64", l1pca::io::file_checksum_hex(
                                     fs::path(opt.out_dir) / f)}});
  manifest["artifacts"] = files;
  std::ofstream out(fs::path(opt.out_dir) / "manifest.json", std::ios::binary);
  out << manifest.dump(2) << '\n';
}

int run_compare(const ExperimentOptions& opt, const json& config) {
  l1pca::TrialBatch batch;
  batch.dims = config.at("D").get<int>();
  batch.samples = config.at("N").get<int>();
  batch.components = config.at("K").get<int>();
  batch.trials = config.at("trials").get<int>();
  batch.restarts = config.at("restarts").get<int>();
  batch.seed = config.at("seed").get<std::uint64_t>();

  std::vector<l1pca::SolverKind> kinds;
  for (const auto& s : config.at("solvers")) {
    const std::string name = s.get<std::string>();
    if (name == "l1bf") kinds.push_back(l1pca::SolverKind::L1Bf);
    else if (name == "fp") kinds.push_back(l1pca::SolverKind::FixedPoint);
    else if (name == "ao") kinds.push_back(l1pca::SolverKind::AltOpt);
    else throw l1pca::InputError("unknown solver in config: " + name);
  }

  const l1pca::ComparisonResult result =
      l1pca::run_comparison(batch, kinds, opt.threads);

  std::vector<std::string> artifacts;
  std::vector<std::string> summary{"solver,status,exact_rate,mean_flips"};
  for (const auto& sc : result.solvers) {
    const std::string name = l1pca::solver_name(sc.kind);
    const std::string file = "cdf_" + name + ".csv";
    l1pca::io::write_lines(fs::path(opt.out_dir) / file,
                           cdf_lines(sc.deltas, "delta,cum_prob"));
    artifacts.push_back(file);
    summary.push_back(name + ",ok," + l1pca::io::format_double(sc.exact_rate) +
                      "," + l1pca::io::format_double(sc.mean_flips));
    std::printf("%s: exact_rate %.4f mean_flips %.2f mean_wall_sec %.6f\n",
                name.c_str(), sc.exact_rate, sc.mean_flips, sc.mean_wall_sec);
  }
  summary.push_back("sdp,not_implemented,,");
  l1pca::io::write_lines(fs::path(opt.out_dir) / "compare_summary.csv",
                         summary);
  artifacts.push_back("compare_summary.csv");
  write_manifest(opt, config, artifacts);
  return 0;
}

int run_sets(const ExperimentOptions& opt, const json& config) {
  const int d = config.at("d").get<int>();
  const int n_min = config.at("N_min").get<int>();
  const int n_max = config.at("N_max").get<int>();
  const int trials = config.at("trials").get<int>();
  const std::uint64_t seed = config.at("seed").get<std::uint64_t>();

  std::vector<std::string> lines{"n,mean_phi,mean_omega,mean_bset,violations"};
  for (int n = n_min; n <= n_max; ++n) {
    double phi = 0, omega = 0, bset = 0;
    long violations = 0;
    const std::uint64_t batch_seed =
        l1pca::Rng::mix(seed, static_cast<std::uint64_t>(n));
    for (int t = 0; t < trials; ++t) {
      const l1pca::DataMatrix x(l1pca::trial_matrix(d, n, 0, batch_seed, t));
      l1pca::SetEnumeration sets = l1pca::enumerate_sets(x);
      phi += static_cast<double>(sets.phi_size());
      omega += static_cast<double>(sets.omega_size());
      bset += static_cast<double>(sets.bset_size());
      auto sorted = [](std::vector<std::uint32_t> v) {
        std::sort(v.begin(), v.end());
        return v;
      };
      const auto b_sorted = sorted(sets.maximizers);
      const auto o_sorted = sorted(sets.flip_stable);
      const auto p_sorted = sorted(sets.fixed_points);
      if (!std::includes(o_sorted.begin(), o_sorted.end(), b_sorted.begin(),
                         b_sorted.end()) ||
          !std::includes(p_sorted.begin(), p_sorted.end(), o_sorted.begin(),
                         o_sorted.end()))
        ++violations;
    }
    lines.push_back(std::to_string(n) + "," +
                    l1pca::io::format_double(phi / trials) + "," +
                    l1pca::io::format_double(omega / trials) + "," +
                    l1pca::io::format_double(bset / trials) + "," +
                    std::to_string(violations));
  }
  l1pca::io::write_lines(fs::path(opt.out_dir) / "sets_summary.csv", lines);
  write_manifest(opt, config, {"sets_summary.csv"});
  return 0;
}

int run_linefit(const ExperimentOptions& opt, const json& config) {
  const int n_nominal = config.at("n_nominal").get<int>();
  const int repetitions = config.at("repetitions").get<int>();
  const std::uint64_t seed = config.at("seed").get<std::uint64_t>();
  const Eigen::Matrix2d cov = l1pca::default_line_fit_covariance();
  const Eigen::MatrixXd outliers = l1pca::default_line_fit_outliers(cov);

  const l1pca::LineFitResult first =
      l1pca::line_fit_demo(n_nominal, cov, outliers, seed);

  std::vector<std::string> points{"x,y,kind"};
  for (Eigen::Index i = 0; i < first.nominal.cols(); ++i)
    points.push_back(l1pca::io::format_double(first.nominal(0, i)) + "," +
                     l1pca::io::format_double(first.nominal(1, i)) +
                     ",nominal");
  for (Eigen::Index i = 0; i < first.outliers.cols(); ++i)
    points.push_back(l1pca::io::format_double(first.outliers(0, i)) + "," +
                     l1pca::io::format_double(first.outliers(1, i)) +
                     ",outlier");
  l1pca::io::write_lines(fs::path(opt.out_dir) / "linefit_points.csv", points);

  auto line_row = [](const std::string& name, const Eigen::Vector2d& v) {
    return name + "," + l1pca::io::format_double(v[0]) + "," +
           l1pca::io::format_double(v[1]);
  };
  l1pca::io::write_lines(
      fs::path(opt.out_dir) / "linefit_lines.csv",
      {"name,dx,dy", line_row("true", first.true_direction),
       line_row("l2_clean", first.l2_clean),
       line_row("l1_clean", first.l1_clean),
       line_row("l2_corrupted", first.l2_corrupted),
       line_row("l1_corrupted", first.l1_corrupted)});

  std::vector<std::string> angles{"rep,l2_angle_rad,l1_angle_rad"};
  for (int rep = 0; rep < repetitions; ++rep) {
    const l1pca::LineFitResult r = l1pca::line_fit_demo(
        n_nominal, cov, outliers, l1pca::Rng::mix(seed, rep));
    angles.push_back(
        std::to_string(rep) + "," +
        l1pca::io::format_double(
            l1pca::angle_between(r.l2_corrupted, r.true_direction)) +
        "," +
        l1pca::io::format_double(
            l1pca::angle_between(r.l1_corrupted, r.true_direction)));
  }
  l1pca::io::write_lines(fs::path(opt.out_dir) / "linefit_angles.csv", angles);

  write_manifest(opt, config,
                 {"linefit_points.csv", "linefit_lines.csv",
                  "linefit_angles.csv"});
  return 0;
}

int run_classify(const ExperimentOptions& opt, const json& config) {
  l1pca::SurrogateSpec spec;
  spec.dims = config.at("D").get<int>();
  spec.per_class = config.at("N_per_class").get<int>();
  spec.subspace_dim = config.at("K").get<int>();
  spec.rank_n = config.at("rank_n").get<int>();
  spec.scale_n = config.at("scale_n").get<double>();
  spec.noise = config.at("noise").get<double>();
  spec.seed = config.at("data_seed").get<std::uint64_t>();
  const auto [class_m, class_n] = l1pca::surrogate_classes(spec);

  l1pca::ClassifyConfig ccfg;
  ccfg.components = spec.subspace_dim;
  ccfg.n_train = config.at("N_train").get<int>();
  ccfg.splits = config.at("splits").get<int>();
  ccfg.seed = config.at("seed").get<std::uint64_t>();
  ccfg.threads = opt.threads;

  std::vector<std::string> artifacts;
  std::vector<std::string> summary{"method,p,auc"};
  for (const auto& method_json : config.at("methods")) {
    const std::string mname = method_json.get<std::string>();
    const l1pca::PcaMethod method =
        mname == "l2" ? l1pca::PcaMethod::L2 : l1pca::PcaMethod::L1Bf;
    for (const auto& p_json : config.at("p_mislabel")) {
      ccfg.p_mislabel = p_json.get<int>();
      const l1pca::RocCurve roc =
          l1pca::subspace_classify(class_m, class_n, method, ccfg);
      std::vector<std::string> lines{"lambda,ffa,fd"};
      for (std::size_t i = 0; i < roc.lambdas.size(); ++i)
        lines.push_back(l1pca::io::format_double(roc.lambdas[i]) + "," +
                        l1pca::io::format_double(roc.false_alarm[i]) + "," +
                        l1pca::io::format_double(roc.detection[i]));
      const std::string file =
          "roc_" + mname + "_p" + std::to_string(ccfg.p_mislabel) + ".csv";
      l1pca::io::write_lines(fs::path(opt.out_dir) / file, lines);
      artifacts.push_back(file);
      summary.push_back(mname + "," + std::to_string(ccfg.p_mislabel) + "," +
                        l1pca::io::format_double(roc.area_under_curve()));
    }
  }
  l1pca::io::write_lines(fs::path(opt.out_dir) / "classify_summary.csv",
                         summary);
  artifacts.push_back("classify_summary.csv");
  write_manifest(opt, config, artifacts);
  return 0;
}

int run_initcdf(const ExperimentOptions& opt, const json& config) {
  const int d = config.at("D").get<int>();
  const int n = config.at("N").get<int>();
  const int trials = config.at("trials").get<int>();
  const std::uint64_t seed = config.at("seed").get<std::uint64_t>();

  const l1pca::InitStudyResult res =
      l1pca::init_comparison(d, n, trials, seed, opt.threads);

  auto as_doubles = [](const std::vector<int>& v) {
    return std::vector<double>(v.begin(), v.end());
  };
  l1pca::io::write_lines(fs::path(opt.out_dir) / "initcdf_svsign.csv",
                         cdf_lines(as_doubles(res.svsign_flips),
                                   "flips,cum_prob"));
  l1pca::io::write_lines(fs::path(opt.out_dir) / "initcdf_random.csv",
                         cdf_lines(as_doubles(res.random_flips),
                                   "flips,cum_prob"));

  auto median_max = [](std::vector<int> v) {
    std::sort(v.begin(), v.end());
    return std::pair<int, int>(v[v.size() / 2], v.back());
  };
  const auto [med_sv, max_sv] = median_max(res.svsign_flips);
  const auto [med_rnd, max_rnd] = median_max(res.random_flips);
  l1pca::io::write_lines(
      fs::path(opt.out_dir) / "initcdf_summary.csv",
      {"init,median_flips,max_flips,svsign_win_fraction",
       "svsign," + std::to_string(med_sv) + "," + std::to_string(max_sv) +
           "," + l1pca::io::format_double(res.svsign_win_fraction),
       "random," + std::to_string(med_rnd) + "," + std::to_string(max_rnd) +
           ","});
  write_manifest(opt, config,
                 {"initcdf_svsign.csv", "initcdf_random.csv",
                  "initcdf_summary.csv"});
  return 0;
}

int run_experiment(ExperimentOptions opt) {
  if (opt.threads <= 0) opt.threads = l1pca::default_thread_count();
  const json config = load_config(opt);
  fs::create_directories(opt.out_dir);
  if (opt.name == "compare") return run_compare(opt, config);
  if (opt.name == "sets") return run_sets(opt, config);
  if (opt.name == "linefit") return run_linefit(opt, config);
  if (opt.name == "classify") return run_classify(opt, config);
  if (opt.name == "initcdf") return run_initcdf(opt, config);
  throw l1pca::InputError("unknown experiment name: " + opt.name);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"L1-norm principal-component analysis via bit flipping"};
  app.require_subcommand(1);

  SolveOptions solve_opt;
  CLI::App* solve = app.add_subcommand(
      "solve", "Compute L1 principal components of a CSV matrix");
  solve->add_option("matrix", solve_opt.matrix_path,
                    "CSV matrix, rows = dimensions, columns = samples")
      ->required();
  solve->add_option("--solver", solve_opt.solver, "l1bf|fp|ao|oracle")
      ->check(CLI::IsMember({"l1bf", "fp", "ao", "oracle"}));
  solve->add_option("--k", solve_opt.k, "number of components");
  solve->add_option("--restarts", solve_opt.restarts, "initializations L");
  solve->add_option("--seed", solve_opt.seed, "root seed");
  solve->add_option("--budget", solve_opt.budget,
                    "flip budget (0 = N or N*K)");
  solve->add_option("--tol", solve_opt.tol,
                    "improvement tolerance (<0 = scaled default)");
  solve->add_option("--init", solve_opt.init, "svsign|random")
      ->check(CLI::IsMember({"svsign", "random"}));
  solve->add_flag("--transpose", solve_opt.transpose,
                  "input file is sample-major");
  solve->add_option("--out", solve_opt.out, "JSON report path")->required();

  ExperimentOptions exp_opt;
  CLI::App* experiment =
      app.add_subcommand("experiment", "Run a named experiment");
  experiment->add_option("--name", exp_opt.name,
                         "compare|sets|linefit|classify|initcdf")
      ->required();
  experiment->add_option("--config", exp_opt.config_path,
                         "JSON config overriding the defaults");
  experiment->add_option("--out", exp_opt.out_dir, "output directory")
      ->required();
  experiment->add_option("--threads", exp_opt.threads,
                         "worker cap (default: L1PCA_THREADS or hardware)");

  try {
    app.parse(argc, argv);
    if (solve->parsed()) return run_solve(solve_opt);
    return run_experiment(exp_opt);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const l1pca::InputError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 2;
  } catch (const l1pca::PreconditionError& e) {
    std::fprintf(stderr, "precondition violated: %s\n", e.what());
    return 3;
  } catch (const l1pca::NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  }
}
