// Experiment runner: simulate paths, check ergodic averages, emit Fisher
// matrices, verify the quadratic likelihood expansion, estimate (theta, T)
// and measure convergence rates.  See README.md for the config schema.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "lanlab/config.hpp"
#include "lanlab/ergodic.hpp"
#include "lanlab/estimator.hpp"
#include "lanlab/fisher.hpp"
#include "lanlab/lan.hpp"
#include "lanlab/sde.hpp"

namespace {

using namespace lanlab;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitStatFailure = 3;
constexpr int kExitUsage = 64;
constexpr int kExitNoInput = 66;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json metadata_block() {
  const auto now = std::chrono::system_clock::now();
  Json m;
  m["timestamp"] =
      std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch())
          .count();
  return m;
}

struct Options {
  std::string config_path;
  std::string output_dir_override;
  unsigned threads = 0;
  bool assert_thresholds = false;
  std::int64_t n_override = -1;
  int replications_override = -1;
  std::vector<double> h_override;
};

ExperimentConfig load_config(const Options& opt) {
  std::ifstream in(opt.config_path);
  if (!in) {
    std::cerr << "cannot read config file: " << opt.config_path << "\n";
    std::exit(kExitNoInput);
  }
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    std::cerr << "config parse error: " << e.what() << "\n";
    std::exit(kExitNoInput);
  }
  ExperimentConfig c = config_from_json(j);
  if (opt.n_override > 0) c.n = opt.n_override;
  if (opt.replications_override > 0) c.replications = opt.replications_override;
  if (!opt.h_override.empty()) {
    if (opt.h_override.size() == 1) {
      c.h = Vector::Constant(c.signal.d + 1, opt.h_override[0]);
    } else {
      c.h = Vector(static_cast<Eigen::Index>(opt.h_override.size()));
      for (std::size_t i = 0; i < opt.h_override.size(); ++i)
        c.h[static_cast<Eigen::Index>(i)] = opt.h_override[i];
    }
  }
  if (const char* env = std::getenv("LANLAB_OUTPUT_DIR")) c.output_dir = env;
  if (!opt.output_dir_override.empty()) c.output_dir = opt.output_dir_override;
  c.validate();
  return c;
}

fs::path prepare_output(const ExperimentConfig& c) {
  fs::path dir(c.output_dir);
  fs::create_directories(dir);
  return dir;
}

void write_summary(const fs::path& dir, const std::string& name,
                   const ExperimentConfig& c, Json body) {
  body["config"] = to_json(c);
  body["metadata"] = metadata_block();
  std::ofstream out(dir / name);
  out << body.dump(2) << "\n";
}

unsigned pick_threads(const Options& opt) {
  return opt.threads == 0 ? default_threads() : opt.threads;
}

int cmd_simulate(const Options& opt) {
  ExperimentConfig c = load_config(opt);
  const double horizon =
      c.horizon > 0.0 ? c.horizon : static_cast<double>(c.n);
  PathRecord path =
      simulate_path(c.model, c.signal, c.theta, c.T, horizon, c.dt, c.seed);
  const fs::path dir = prepare_output(c);
  std::ofstream csv(dir / "path.csv");
  write_path_csv(csv, path);
  Json body;
  body["horizon"] = horizon;
  body["steps"] = path.steps();
  body["xi_final"] = path.xi.back();
  write_summary(dir, "simulate_summary.json", c, body);
  std::cout << "simulate: " << path.steps() << " steps, xi_final="
            << fmt(path.xi.back()) << " -> " << (dir / "path.csv").string()
            << "\n";
  return kExitOk;
}

int cmd_ergodic_check(const Options& opt) {
  ExperimentConfig c = load_config(opt);
  const double horizon =
      c.horizon > 0.0 ? c.horizon : static_cast<double>(c.n);
  PathRecord path =
      simulate_path(c.model, c.signal, c.theta, c.T, horizon, c.dt, c.seed);
  struct Case {
    const char* name;
    std::function<double(double)> f;
    double unit_integral;  // int_0^1 f du
  };
  const std::vector<Case> cases = {
      {"one", [](double) { return 1.0; }, 1.0},
      {"sin2_2pi",
       [](double u) {
         const double s = std::sin(kTwoPi * u);
         return s * s;
       },
       0.5},
  };
  const fs::path dir = prepare_output(c);
  std::ofstream csv(dir / "ergodic.csv");
  csv << "f,k,estimate,closed_form\n";
  Json body;
  Json rows = Json::array();
  for (const auto& cs : cases) {
    for (int k = 0; k <= 2; ++k) {
      const double est = weighted_time_average(path, c.model, cs.f, k);
      Json row;
      row["f"] = cs.name;
      row["k"] = k;
      row["estimate"] = est;
      if (c.model.sigma_is_constant()) {
        const double cf =
            cs.unit_integral / (c.model.sigma_c * c.model.sigma_c);
        row["closed_form"] = cf;
        csv << cs.name << "," << k << "," << fmt(est) << "," << fmt(cf)
            << "\n";
      } else {
        csv << cs.name << "," << k << "," << fmt(est) << ",\n";
      }
      rows.push_back(row);
    }
  }
  body["averages"] = rows;
  write_summary(dir, "ergodic_summary.json", c, body);
  std::cout << "ergodic-check: horizon=" << horizon << " -> "
            << (dir / "ergodic.csv").string() << "\n";
  return kExitOk;
}

int cmd_fisher(const Options& opt) {
  ExperimentConfig c = load_config(opt);
  if (!c.model.sigma_is_constant()) {
    std::cerr << "fisher: closed form requires constant sigma\n";
    return kExitValidation;
  }
  const FisherMatrix fm =
      fisher_matrix(c.signal, c.theta, c.T, c.fisher_t, c.model.sigma_c);
  const fs::path dir = prepare_output(c);
  std::ofstream csv(dir / "fisher.csv");
  write_fisher_csv(csv, fm);
  Json body;
  body["t"] = fm.t;
  body["S7"] = check_S7(fm);
  write_summary(dir, "fisher_summary.json", c, body);
  std::cout << "fisher: t=" << fm.t << " F(0,0)=" << fmt(fm.F(0, 0))
            << " F(d,d)=" << fmt(fm.F(fm.F.rows() - 1, fm.F.cols() - 1))
            << " S7=" << (check_S7(fm) ? "ok" : "violated") << " -> "
            << (dir / "fisher.csv").string() << "\n";
  return kExitOk;
}

int cmd_lan_check(const Options& opt) {
  ExperimentConfig c = load_config(opt);
  LanReport rep;
  try {
    rep = lan_report(c.model, c.signal, c.theta, c.T, c.h, c.n,
                     c.replications, c.dt, c.seed, pick_threads(opt));
  } catch (const S7Violation& e) {
    std::cerr << e.what() << "\n";
    return kExitValidation;
  }
  const fs::path dir = prepare_output(c);
  const int d = c.signal.d;
  {
    std::ofstream csv(dir / "lan_replications.csv");
    csv << "rep";
    for (int q = 0; q < d; ++q) csv << ",score_theta" << (q + 1);
    csv << ",score_T,lambda,quad,R_integral,R_residual,U,V\n";
    for (int r = 0; r < rep.replications; ++r) {
      const auto u = static_cast<std::size_t>(r);
      csv << r;
      for (int q = 0; q <= d; ++q) csv << "," << fmt(rep.scores(r, q));
      csv << "," << fmt(rep.lambda[u]) << "," << fmt(rep.quad[u]) << ","
          << fmt(rep.r_integral[u]) << "," << fmt(rep.r_residual[u]) << ","
          << fmt(rep.u_term[u]) << "," << fmt(rep.v_term[u]) << "\n";
    }
  }
  Json body;
  body["n"] = rep.n;
  body["replications"] = rep.replications;
  body["identity_max_rel_error"] = rep.identity_max_rel_error;
  body["cov_rel_error"] = rep.cov_rel_error;
  body["ks_distance"] = rep.ks_distance;
  body["ks_critical_1pct"] = rep.ks_critical_1pct;
  body["residual_median"] = rep.residual_median;
  body["residual_q90"] = rep.residual_q90;
  bool pass = rep.identity_max_rel_error <= 1e-8 &&
              rep.cov_rel_error < 0.15;
  for (double ksd : rep.ks_distance) pass = pass && ksd < rep.ks_critical_1pct;
  body["pass"] = pass;
  write_summary(dir, "lan_summary.json", c, body);
  std::cout << "lan-check: n=" << rep.n << " reps=" << rep.replications
            << " identity_err=" << fmt(rep.identity_max_rel_error)
            << " cov_err=" << fmt(rep.cov_rel_error)
            << " residual_median=" << fmt(rep.residual_median)
            << (pass ? " PASS" : " FAIL") << "\n";
  if (opt.assert_thresholds && !pass) return kExitStatFailure;
  return kExitOk;
}

int cmd_estimate(const Options& opt) {
  ExperimentConfig c = load_config(opt);
  const double horizon =
      c.horizon > 0.0 ? c.horizon : static_cast<double>(c.n);
  PathRecord path =
      simulate_path(c.model, c.signal, c.theta, c.T, horizon, c.dt, c.seed);
  EstimationResult est;
  try {
    est = profile_mle(path, c.model, c.signal, c.T_bracket_lo, c.T_bracket_hi,
                      c.grid_points);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return kExitValidation;
  }
  const fs::path dir = prepare_output(c);
  {
    std::ofstream csv(dir / "profile_curve.csv");
    csv << "T,profiled_loglik\n";
    for (const auto& [t, ll] : est.profile_curve)
      csv << fmt(t) << "," << fmt(ll) << "\n";
  }
  Json body;
  Json th = Json::array();
  for (Eigen::Index i = 0; i < est.theta_hat.size(); ++i)
    th.push_back(est.theta_hat[i]);
  body["theta_hat"] = th;
  body["T_hat"] = est.T_hat;
  body["loglik"] = est.loglik;
  if (est.stderr_.size() > 0) {
    Json se = Json::array();
    for (Eigen::Index i = 0; i < est.stderr_.size(); ++i)
      se.push_back(est.stderr_[i]);
    body["stderr"] = se;
  }
  write_summary(dir, "estimate_summary.json", c, body);
  std::cout << "estimate: T_hat=" << fmt(est.T_hat) << " theta_hat[0]="
            << fmt(est.theta_hat[0]) << " -> "
            << (dir / "estimate_summary.json").string() << "\n";
  return kExitOk;
}

int cmd_rates(const Options& opt) {
  ExperimentConfig c = load_config(opt);
  if (c.n_list.size() < 3) {
    std::cerr << "rates: n_list must have length >= 3\n";
    return kExitValidation;
  }
  RateTable table;
  try {
    table = rate_experiment(c.model, c.signal, c.theta, c.T, c.n_list,
                            c.replications, c.dt, c.seed, c.T_bracket_lo,
                            c.T_bracket_hi, c.grid_points, pick_threads(opt));
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return kExitValidation;
  }
  const fs::path dir = prepare_output(c);
  {
    std::ofstream csv(dir / "rates.csv");
    csv << "n,component,sd,dropped\n";
    for (const auto& row : table.rows) {
      for (Eigen::Index q = 0; q < row.theta_sd.size(); ++q)
        csv << row.n << ",theta" << (q + 1) << "," << fmt(row.theta_sd[q])
            << "," << row.dropped << "\n";
      csv << row.n << ",T," << fmt(row.T_sd) << "," << row.dropped << "\n";
    }
  }
  Json body;
  Json slopes = Json::array();
  for (Eigen::Index q = 0; q < table.theta_slopes.size(); ++q)
    slopes.push_back(table.theta_slopes[q]);
  body["theta_slopes"] = slopes;
  body["T_slope"] = table.T_slope;
  body["degenerate_variance"] = table.degenerate_variance;
  bool pass = !table.degenerate_variance &&
              std::abs(table.T_slope + 1.5) <= 0.15;
  for (Eigen::Index q = 0; q < table.theta_slopes.size(); ++q)
    pass = pass && std::abs(table.theta_slopes[q] + 0.5) <= 0.1;
  body["pass"] = pass;
  write_summary(dir, "rates_summary.json", c, body);
  std::cout << "rates: T_slope=" << fmt(table.T_slope) << " theta_slope[0]="
            << fmt(table.theta_slopes[0]) << (pass ? " PASS" : " FAIL")
            << "\n";
  if (opt.assert_thresholds && !pass) return kExitStatFailure;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"periodic-signal diffusion laboratory"};
  app.require_subcommand(1);
  app.allow_extras(false);
  app.set_help_flag("--help", "print usage");

  Options opt;
  auto add_common = [&](CLI::App* sub) {
    // long-only help so that --h stays available for the local parameter
    sub->set_help_flag("--help", "print usage");
    sub->add_option("--config", opt.config_path, "JSON config file")
        ->required();
    sub->add_option("--output-dir", opt.output_dir_override,
                    "override output directory");
    sub->add_option("--threads", opt.threads,
                    "worker threads (0 = hardware default)");
    sub->add_option("--n", opt.n_override, "override n");
    sub->add_option("--replications", opt.replications_override,
                    "override replication count");
    sub->add_option("--h", opt.h_override,
                    "override local parameter h (one value broadcasts)");
    sub->add_flag("--assert", opt.assert_thresholds,
                  "exit 3 when statistical checks fail");
    return sub;
  };
  auto* sim = add_common(app.add_subcommand("simulate", "simulate one path"));
  auto* erg = add_common(
      app.add_subcommand("ergodic-check", "weighted time averages"));
  auto* fis = add_common(
      app.add_subcommand("fisher", "closed-form information matrix"));
  auto* lan = add_common(
      app.add_subcommand("lan-check", "quadratic expansion Monte Carlo"));
  auto* est = add_common(
      app.add_subcommand("estimate", "profile MLE on one path"));
  auto* rat = add_common(
      app.add_subcommand("rates", "convergence-rate experiment"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << app.help();
    return kExitUsage;
  }

  try {
    if (sim->parsed()) return cmd_simulate(opt);
    if (erg->parsed()) return cmd_ergodic_check(opt);
    if (fis->parsed()) return cmd_fisher(opt);
    if (lan->parsed()) return cmd_lan_check(opt);
    if (est->parsed()) return cmd_estimate(opt);
    if (rat->parsed()) return cmd_rates(opt);
  } catch (const InvalidParameter& e) {
    std::cerr << e.what() << "\n";
    return kExitValidation;
  } catch (const InvalidModel& e) {
    std::cerr << e.what() << "\n";
    return kExitValidation;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cerr << app.help();
  return kExitUsage;
}
