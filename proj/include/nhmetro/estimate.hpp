#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "nhmetro/matcore.hpp"
#include "nhmetro/measure.hpp"
#include "nhmetro/models.hpp"

namespace nhmetro {

/// PCG32 (XSH-RR output, 64-bit LCG state), seeded as in the reference
/// pcg32_srandom_r. Seed 42 / stream 54 yields 0xa15c02b7, 0x7b47f409, ...
class Pcg32 {
 public:
  Pcg32(std::uint64_t seed, std::uint64_t stream) noexcept;

  std::uint32_t next_u32() noexcept;
  /// Uniform on [0, 1) with 53 random bits (two draws).
  double next_double() noexcept;

 private:
  std::uint64_t state_ = 0;
  std::uint64_t inc_ = 1;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Generator for trial k of a run seeded with `seed`.
Pcg32 trial_rng(std::uint64_t seed, std::uint64_t k) noexcept;

struct ShotRecord {
  std::uint64_t n = 0;
  std::uint64_t x = 0;  // count of outcome 0
  double p_hat = 0.0;
};

/// x ~ Binomial(n, p) by counting n Bernoulli draws u < p.
ShotRecord sample_shots(double p, std::uint64_t n, Pcg32& rng);

/// Outcome probability p(theta) = <phi(theta)|A|phi(theta)>.
double outcome_probability(const HamiltonianModel& model, double theta, double t, const ComplexVector& psi0,
                           const Observable& obs);

inline constexpr std::size_t kScanIntervals = 64;

/// Solves p(theta) = x/n inside the bracket. Roots are located on a 64-interval
/// scan, refined by bisection with secant steps, and ties between several
/// roots go to the highest log-likelihood, then to the one nearest the
/// bracket midpoint. Throws Error{NoRoot} or Error{NotBracketed}.
double mle_invert(const HamiltonianModel& model, double t, const ComplexVector& psi0, const Observable& obs,
                  const ShotRecord& shot, std::pair<double, double> bracket);

/// Largest interval around theta_true (half-width at most max_half_width)
/// on which p(theta) is strictly monotone, found on a grid of `resolution`
/// points per side. Used when a config asks for an automatic bracket.
std::pair<double, double> monotone_bracket(const HamiltonianModel& model, double t, const ComplexVector& psi0,
                                           const Observable& obs, double theta_true, double max_half_width,
                                           std::size_t resolution = 2000);

struct EstimationRun {
  std::size_t trials = 0;          // requested
  std::vector<double> estimates;   // successful trials, in trial-index order
  std::size_t failed_trials = 0;
  double mean = 0.0;
  double sigma = 0.0;              // sample standard deviation
  double sigma_err = 0.0;          // sigma / sqrt(2(m - 1)), m = successful trials
  double precision = 0.0;          // 1 / (sigma sqrt(n))
  double precision_err = 0.0;      // precision / sqrt(2(m - 1))
  double p_true = 0.0;
};

struct TrialOptions {
  std::uint64_t n = 2000;
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

/// Throws Error{AllTrialsFailed} when fewer than two trials succeed.
EstimationRun run_trials(const HamiltonianModel& model, double theta_true, double t, const ComplexVector& psi0,
                         const Observable& obs, const TrialOptions& opts, std::pair<double, double> bracket);

/// (mean - theta) / theta in percent.
double bias_percent(const EstimationRun& run, double theta_true);

}  // namespace nhmetro
