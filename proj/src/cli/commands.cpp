#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"
#include "nhmetro/cli.hpp"
#include "nhmetro/dilation.hpp"
#include "nhmetro/dynamics.hpp"
#include "nhmetro/error.hpp"
#include "nhmetro/estimate.hpp"
#include "nhmetro/fisher.hpp"

namespace nhmetro::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

double to_degrees(double rad) { return rad * 180.0 / std::numbers::pi; }

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void header(const std::vector<const char*>& cols) {
    bool first = true;
    for (const char* c : cols) {
      out_ << (first ? "" : ",") << c;
      first = false;
    }
    out_ << '\n';
    out_.flush();
  }

  // Cells are numbers or short status strings.
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
    out_.flush();
  }

 private:
  std::ostream& out_;
};

std::string num(double v) { return std::isnan(v) ? std::string() : format_number(v); }

double relative_spread(const std::vector<double>& vals) {
  const auto [lo, hi] = std::minmax_element(vals.begin(), vals.end());
  const double scale = std::max(std::abs(*hi), std::abs(*lo));
  if (scale == 0.0) return 0.0;
  return (*hi - *lo) / scale;
}

std::vector<std::pair<double, std::optional<double>>> sweep_points(const ExperimentConfig& cfg) {
  std::vector<std::pair<double, std::optional<double>>> pts;
  if (!cfg.probe_sweep.empty()) {
    for (double t : cfg.times)
      for (double phi : cfg.probe_sweep) pts.emplace_back(t, phi);
  } else {
    for (double t : cfg.times) pts.emplace_back(t, cfg.probe_phi);
  }
  return pts;
}

int cmd_qfi(const ExperimentConfig& cfg, std::ostream& out, std::ostream& log, bool quiet) {
  const HamiltonianModel& model = *cfg.model;
  const double theta = model.theta();
  const bool by_angle = !cfg.probe_sweep.empty();
  CsvWriter csv(out);
  std::vector<const char*> cols{"t", "F", "sqrtF", "K", "I", "sqrtI", "gap", "F_closed_form", "route_deviation"};
  if (by_angle) cols.insert(cols.begin(), "phi_deg");
  csv.header(cols);
  int failures = 0;
  for (const auto& [t, phi_angle] : sweep_points(cfg)) {
    const ComplexVector probe = phi_angle ? probe_from_angle(*phi_angle) : cfg.probe;
    std::vector<std::string> cells;
    if (by_angle) cells.push_back(num(to_degrees(*phi_angle)));
    cells.push_back(num(t));
    try {
      const QFIRecord rec = qfi_record(model, theta, t, probe);
      const ComplexVector phi = evolve(model, theta, t, probe).phi_out;
      std::vector<double> routes{rec.F};
      routes.push_back(qfi_generator(generator_fd(model, theta, t), phi));
      routes.push_back(qfi_state_derivative(model, theta, t, probe));
      double closed = kNaN;
      try {
        closed = qfi_closed_form(model, theta, t, probe);
        routes.push_back(closed);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::UnsupportedFamily && e.kind() != ErrorKind::UnsupportedProbe) throw;
      }
      for (double v : {rec.F, std::sqrt(rec.F), rec.K, rec.I, std::sqrt(rec.I), rec.gap, closed,
                       relative_spread(routes)})
        cells.push_back(num(v));
    } catch (const Error& e) {
      ++failures;
      if (!quiet) log << "qfi: t=" << format_number(t) << " failed: " << e.what() << '\n';
      cells.resize(cols.size());
    }
    csv.row(cells);
  }
  return failures ? kPartial : kOk;
}


int cmd_estimate(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& out, std::ostream& log) {
  if (!cfg.estimation) throw Error(ErrorKind::Config, "/estimation: required by the estimate command");
  const HamiltonianModel& model = *cfg.model;
  const Observable& obs = *cfg.measurement;
  const EstimationSpec& es = *cfg.estimation;
  const std::uint64_t seed = opts.seed.value_or(es.seed);
  const double theta = model.theta();

  std::ofstream hist;
  if (!cfg.histogram_path.empty()) {
    hist.open(cfg.histogram_path);
    if (!hist) throw Error(ErrorKind::Config, "/output/histogram_path: cannot open '" + cfg.histogram_path + "'");
    hist << "t,phi_deg,trial,estimate\n";
  }

  CsvWriter csv(out);
  csv.header({"t", "precision", "precision_err", "mean_estimate", "bias_pct", "failed_trials", "phi_deg", "p0",
              "sqrtF", "status"});
  int failures = 0;
  const auto pts = sweep_points(cfg);
  for (std::size_t idx = 0; idx < pts.size(); ++idx) {
    const auto [t, phi] = pts[idx];
    const ComplexVector probe = phi ? probe_from_angle(*phi) : cfg.probe;
    const double phi_deg = phi ? to_degrees(*phi) : kNaN;
    double p0 = kNaN, sqrt_f = kNaN;
    try {
      p0 = outcome_probability(model, theta, t, probe, obs);
      sqrt_f = std::sqrt(qfi_record(model, theta, t, probe).F);
      const std::pair<double, double> bracket =
          es.bracket ? *es.bracket : monotone_bracket(model, t, probe, obs, theta, es.half_width);
      TrialOptions to;
      to.n = es.n;
      to.trials = es.trials;
      to.seed = seed + idx * kGoldenGamma;
      to.threads = es.threads;
      const EstimationRun run = run_trials(model, theta, t, probe, obs, to, bracket);
      const char* status = run.failed_trials ? "some_trials_failed" : "ok";
      csv.row({num(t), num(run.precision), num(run.precision_err), num(run.mean), num(bias_percent(run, theta)),
               std::to_string(run.failed_trials), num(phi_deg), num(p0), num(sqrt_f), status});
      if (hist) {
        for (std::size_t k = 0; k < run.estimates.size(); ++k) {
          hist << num(t) << ',' << num(phi_deg) << ',' << k << ',' << format_number(run.estimates[k]) << '\n';
        }
      }
    } catch (const Error& e) {
      ++failures;
      if (!opts.quiet) log << "estimate: point " << idx << " failed: " << e.what() << '\n';
      const std::string status = e.kind() == ErrorKind::AllTrialsFailed ? "all_trials_failed" : "error";
      csv.row({num(t), "", "", "", "", e.kind() == ErrorKind::AllTrialsFailed ? std::to_string(es.trials) : "",
               num(phi_deg), num(p0), num(sqrt_f), status});
    }
  }
  return failures ? kPartial : kOk;
}

int cmd_optimal(const ExperimentConfig& cfg, std::ostream& out, std::ostream& log, bool quiet) {
  const HamiltonianModel& model = *cfg.model;
  const Observable& obs = *cfg.measurement;
  const double theta = model.theta();
  const bool by_angle = !cfg.probe_sweep.empty();
  CsvWriter csv(out);
  if (by_angle) {
    csv.header({"phi_deg", "t", "residual", "c_real", "c_imag_fraction", "precision_ep", "sqrtF", "status"});
  } else {
    csv.header({"t", "residual", "c_real", "c_imag_fraction", "precision_ep", "sqrtF", "status"});
  }
  int failures = 0;
  for (const auto& [t, phi] : sweep_points(cfg)) {
    const ComplexVector probe = phi ? probe_from_angle(*phi) : cfg.probe;
    double residual = kNaN, c_real = kNaN, c_imag = kNaN, prec = kNaN, sqrt_f = kNaN;
    std::string status;
    try {
      const QFIRecord rec = qfi_record(model, theta, t, probe);
      sqrt_f = std::sqrt(rec.F);
      try {
        const OptimalityReport rep = optimality_residual(rec.h, evolve(model, theta, t, probe).phi_out, obs.matrix());
        residual = rep.residual;
        c_real = rep.c.real();
        c_imag = rep.c_imag_fraction;
        status = rep.optimal() ? "optimal" : "suboptimal";
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::ZeroG) throw;
        status = "zero_g";
      }
      try {
        prec = error_propagation_precision(model, theta, t, probe, obs);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::Degenerate) throw;
        status = "degenerate";
      }
    } catch (const Error& e) {
      ++failures;
      status = "error";
      if (!quiet) log << "optimal: t=" << format_number(t) << " failed: " << e.what() << '\n';
    }
    std::vector<std::string> cells;
    if (by_angle) cells.push_back(num(to_degrees(*phi)));
    for (double v : {t, residual, c_real, c_imag, prec, sqrt_f}) cells.push_back(num(v));
    cells.push_back(status);
    csv.row(cells);
  }
  return failures ? kPartial : kOk;
}

int cmd_dilate(const ExperimentConfig& cfg, std::ostream& out, std::ostream& log, bool quiet) {
  const HamiltonianModel& model = *cfg.model;
  const double theta = model.theta();
  CsvWriter csv(out);
  csv.header({"t", "fidelity", "success_prob", "norm_drift", "eta_residual"});
  const ComplexMatrix H = hamiltonian(model, theta);
  const DilationSystem sys = build_dilation(H);
  const double eta_res = dilation_residuals(sys).pseudo_hermiticity;
  const double norm0 = sys.c * expectation(sys.eta, cfg.probe).real();
  int failures = 0;
  for (double t : cfg.times) {
    try {
      const DilatedState ds = evolve_dilated(sys, cfg.probe, t);
      const EvolutionResult direct = evolve(model, theta, t, cfg.probe);
      const double fid = std::norm(inner(ds.recovered, direct.phi_out));
      const double drift = std::abs(ds.norm_squared - norm0) / norm0;
      csv.row({num(t), num(fid), num(ds.success_prob), num(drift), num(eta_res)});
    } catch (const Error& e) {
      ++failures;
      if (!quiet) log << "dilate: t=" << format_number(t) << " failed: " << e.what() << '\n';
      csv.row({num(t), "", "", "", ""});
    }
  }
  return failures ? kPartial : kOk;
}

}  // namespace

int run_command(const std::string& command, const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& csv,
                std::ostream& log) {
  if (command == "validate") {
    if (!opts.quiet) log << "config ok\n";
    return kOk;
  }
  if (command == "qfi") return cmd_qfi(cfg, csv, log, opts.quiet);
  if (command == "estimate") return cmd_estimate(cfg, opts, csv, log);
  if (command == "optimal") return cmd_optimal(cfg, csv, log, opts.quiet);
  if (command == "dilate") return cmd_dilate(cfg, csv, log, opts.quiet);
  throw Error(ErrorKind::Config, "unknown command '" + command + "'");
}

int main_entry(int argc, char** argv) {
  CLI::App app{"Non-Hermitian parameter estimation: QFI, optimal measurement, dilation, Monte-Carlo MLE"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_path;
  bool quiet = false;

  for (const char* name : {"qfi", "estimate", "optimal", "dilate", "validate"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "experiment JSON")->required();
    sub->add_option("--seed", seed, "overrides estimation.seed");
    sub->add_option("--out", out_path, "CSV destination (default: output.csv_path or stdout)");
    sub->add_flag("--quiet", quiet, "suppress diagnostics on stderr");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfigError;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    const ExperimentConfig cfg = load_config(config_path);
    RunOptions opts{seed, out_path, quiet};
    const std::string dest = !out_path.empty() ? out_path : cfg.csv_path;
    if (command == "validate" || dest.empty() || dest == "-") {
      return run_command(command, cfg, opts, std::cout, std::cerr);
    }
    std::ofstream file(dest);
    if (!file) throw Error(ErrorKind::Config, "/output/csv_path: cannot open '" + dest + "'");
    return run_command(command, cfg, opts, file, std::cerr);
  } catch (const Error& e) {
    std::cerr << "nhmetro " << command << ": " << e.what() << '\n';
    return e.kind() == ErrorKind::Config ? kConfigError : kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "nhmetro " << command << ": " << e.what() << '\n';
    return kNumericalError;
  }
}

}  // namespace nhmetro::cli
