#pragma once

// Declarative experiment runner behind the `nhmetro` executable.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nhmetro/matcore.hpp"
#include "nhmetro/measure.hpp"
#include "nhmetro/models.hpp"

namespace nhmetro::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kNumericalError = 2, kPartial = 3 };

struct EstimationSpec {
  std::uint64_t n = 2000;
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::optional<std::pair<double, double>> bracket;  // explicit
  double half_width = 0.0;                           // automatic monotone bracket otherwise
};

struct ExperimentConfig {
  std::optional<HamiltonianModel> model;
  ComplexVector probe;
  std::optional<double> probe_phi;   // radians, set when the probe was given as an angle
  std::vector<double> probe_sweep;   // radians
  std::optional<Observable> measurement;
  std::vector<double> times;
  std::optional<EstimationSpec> estimation;
  std::string csv_path;
  std::string histogram_path;
};

/// Parses a JSON document. Errors are Error{Config} with the offending field
/// path ("/time_grid/steps: ...").
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

/// Angle grammar: a JSON number, or a string product/quotient of numbers and
/// "pi" ("pi/8", "10*pi/8", "-0.5"). With allow_degrees, a trailing "deg"
/// converts from degrees ("18deg", "22.5 deg").
double parse_angle_text(const std::string& text, bool allow_degrees);

/// probe = cos(2 phi)|0> + sin(2 phi)|1>
ComplexVector probe_from_angle(double phi);

/// "%.12g", with -0 printed as 0.
std::string format_number(double v);

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::string out;  // overrides output.csv_path; empty means config or stdout
  bool quiet = false;
};

/// Runs one of qfi | estimate | optimal | dilate | validate, writing CSV rows
/// to `csv`. Returns an ExitCode.
int run_command(const std::string& command, const ExperimentConfig& cfg, const RunOptions& opts,
                std::ostream& csv, std::ostream& log);

/// Entry point shared by the executable: argument parsing, file handling,
/// error reporting.
int main_entry(int argc, char** argv);

}  // namespace nhmetro::cli
