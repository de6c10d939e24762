#include "nhmetro/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "nhmetro/dynamics.hpp"
#include "nhmetro/error.hpp"

namespace nhmetro {

namespace {
constexpr std::uint64_t kPcgMult = 6364136223846793005ULL;
}

Pcg32::Pcg32(std::uint64_t seed, std::uint64_t stream) noexcept : state_(0), inc_((stream << 1u) | 1u) {
  next_u32();
  state_ += seed;
  next_u32();
}

std::uint32_t Pcg32::next_u32() noexcept {
  const std::uint64_t old = state_;
  state_ = old * kPcgMult + inc_;
  const auto xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
  const auto rot = static_cast<std::uint32_t>(old >> 59u);
  return (xorshifted >> rot) | (xorshifted << ((-rot) & 31u));
}

double Pcg32::next_double() noexcept {
  const std::uint64_t hi = next_u32() >> 5;  // 27 bits
  const std::uint64_t lo = next_u32() >> 6;  // 26 bits
  return static_cast<double>((hi << 26) | lo) * 0x1.0p-53;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Pcg32 trial_rng(std::uint64_t seed, std::uint64_t k) noexcept { return Pcg32(splitmix64(seed + k), k); }

ShotRecord sample_shots(double p, std::uint64_t n, Pcg32& rng) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::InvalidArgument, "sample_shots: p outside [0, 1]");
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "sample_shots: n must be >= 1");
  ShotRecord r;
  r.n = n;
  for (std::uint64_t i = 0; i < n; ++i) {
    if (rng.next_double() < p) ++r.x;
  }
  r.p_hat = static_cast<double>(r.x) / static_cast<double>(n);
  return r;
}

double outcome_probability(const HamiltonianModel& model, double theta, double t, const ComplexVector& psi0,
                           const Observable& obs) {
  return survival_probability(evolve(model, theta, t, psi0), obs.matrix());
}

namespace {

double log_likelihood(double p_hat, double p) {
  auto term = [](double w, double q) { return w > 0.0 ? w * std::log(std::max(q, 1e-300)) : 0.0; };
  return term(p_hat, p) + term(1.0 - p_hat, 1.0 - p);
}

template <typename G>
double refine_root(G&& g, double a, double b, double ga, double gb) {
  for (int it = 0; it < 200; ++it) {
    if (b - a < 1e-12) break;
    double x = 0.5 * (a + b);
    if (it % 2 == 0 && gb != ga) {
      const double sec = b - gb * (b - a) / (gb - ga);
      if (sec > a && sec < b) x = sec;
    }
    const double gx = g(x);
    if (std::abs(gx) < 1e-12) return x;
    if ((gx < 0.0) == (ga < 0.0)) {
      a = x;
      ga = gx;
    } else {
      b = x;
      gb = gx;
    }
  }
  return std::abs(ga) < std::abs(gb) ? a : b;
}

}  // namespace

double mle_invert(const HamiltonianModel& model, double t, const ComplexVector& psi0, const Observable& obs,
                  const ShotRecord& shot, std::pair<double, double> bracket) {
  const auto [lo, hi] = bracket;
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    std::ostringstream os;
    os << "bracket (" << lo << ", " << hi << ") is not a finite increasing interval";
    throw Error(ErrorKind::NotBracketed, os.str());
  }
  const double target = shot.p_hat;
  auto g = [&](double th) { return outcome_probability(model, th, t, psi0, obs) - target; };

  std::vector<double> xs(kScanIntervals + 1), gs(kScanIntervals + 1);
  try {
    for (std::size_t i = 0; i <= kScanIntervals; ++i) {
      xs[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(kScanIntervals);
      gs[i] = g(xs[i]);
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::OutOfRange) {
      throw Error(ErrorKind::NotBracketed, std::string("bracket leaves the admissible range: ") + e.what());
    }
    throw;
  }

  std::vector<double> roots;
  for (std::size_t i = 0; i <= kScanIntervals; ++i) {
    if (gs[i] == 0.0) {
      roots.push_back(xs[i]);
    } else if (i < kScanIntervals && gs[i + 1] != 0.0 && (gs[i] < 0.0) != (gs[i + 1] < 0.0)) {
      roots.push_back(refine_root(g, xs[i], xs[i + 1], gs[i], gs[i + 1]));
    }
  }
  if (roots.empty()) {
    std::ostringstream os;
    os << "p(theta) = " << target << " has no solution in (" << lo << ", " << hi << ")";
    throw Error(ErrorKind::NoRoot, os.str());
  }

  const double mid = 0.5 * (lo + hi);
  double best = roots.front();
  double best_ll = -std::numeric_limits<double>::infinity();
  for (double r : roots) {
    const double ll = log_likelihood(target, std::clamp(g(r) + target, 0.0, 1.0));
    if (ll > best_ll + 1e-12) {
      best = r;
      best_ll = ll;
    } else if (std::abs(ll - best_ll) <= 1e-12 && std::abs(r - mid) < std::abs(best - mid)) {
      best = r;
      best_ll = std::max(best_ll, ll);
    }
  }
  return best;
}

std::pair<double, double> monotone_bracket(const HamiltonianModel& model, double t, const ComplexVector& psi0,
                                           const Observable& obs, double theta_true, double max_half_width,
                                           std::size_t resolution) {
  if (!(max_half_width > 0.0) || resolution < 2) {
    throw Error(ErrorKind::InvalidArgument, "monotone_bracket: need a positive width and resolution >= 2");
  }
  const double step = max_half_width / static_cast<double>(resolution);
  auto p = [&](double th) { return outcome_probability(model, th, t, psi0, obs); };
  const double p0 = p(theta_true);
  const double slope = p(theta_true + 1e-6 * std::max(1.0, std::abs(theta_true))) - p0;
  const bool rising = slope > 0.0;

  auto walk = [&](double dir) {
    double prev_th = theta_true, prev_p = p0;
    for (std::size_t k = 1; k <= resolution; ++k) {
      const double th = theta_true + dir * step * static_cast<double>(k);
      double pk;
      try {
        pk = p(th);
      } catch (const Error&) {
        return prev_th;
      }
      const bool up = (pk - prev_p) * dir > 0.0;
      if (up != rising || pk == prev_p) return prev_th;
      prev_th = th;
      prev_p = pk;
    }
    return prev_th;
  };
  return {walk(-1.0), walk(1.0)};
}

EstimationRun run_trials(const HamiltonianModel& model, double theta_true, double t, const ComplexVector& psi0,
                         const Observable& obs, const TrialOptions& opts, std::pair<double, double> bracket) {
  if (opts.n < 1) throw Error(ErrorKind::InvalidArgument, "run_trials: n must be >= 1");
  if (opts.trials < 2) throw Error(ErrorKind::InvalidArgument, "run_trials: trials must be >= 2");

  EstimationRun run;
  run.trials = opts.trials;
  run.p_true = outcome_probability(model, theta_true, t, psi0, obs);

  std::vector<std::optional<double>> slots(opts.trials);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      Pcg32 rng = trial_rng(opts.seed, k);
      const ShotRecord shot = sample_shots(run.p_true, opts.n, rng);
      try {
        slots[k] = mle_invert(model, t, psi0, obs, shot, bracket);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::NoRoot) throw;
      }
    }
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(opts.threads, static_cast<unsigned>(opts.trials)));
  if (threads == 1) {
    work(0, opts.trials);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(threads);
    const std::size_t chunk = (opts.trials + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
      const std::size_t b = w * chunk, e = std::min(opts.trials, b + chunk);
      pool.emplace_back([&, w, b, e] {
        try {
          work(b, e);
        } catch (...) {
          errs[w] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errs)
      if (e) std::rethrow_exception(e);
  }

  for (const auto& s : slots) {
    if (s) {
      run.estimates.push_back(*s);
    } else {
      ++run.failed_trials;
    }
  }
  const std::size_t m = run.estimates.size();
  if (m < 2) {
    std::ostringstream os;
    os << "only " << m << " of " << opts.trials << " trials produced an estimate";
    throw Error(ErrorKind::AllTrialsFailed, os.str());
  }
  double sum = 0.0;
  for (double e : run.estimates) sum += e;
  run.mean = sum / static_cast<double>(m);
  double ss = 0.0;
  for (double e : run.estimates) ss += (e - run.mean) * (e - run.mean);
  run.sigma = std::sqrt(ss / static_cast<double>(m - 1));
  const double denom = std::sqrt(2.0 * static_cast<double>(m - 1));
  run.sigma_err = run.sigma / denom;
  run.precision = run.sigma > 0.0 ? 1.0 / (run.sigma * std::sqrt(static_cast<double>(opts.n)))
                                   : std::numeric_limits<double>::infinity();
  run.precision_err = run.precision / denom;
  return run;
}

double bias_percent(const EstimationRun& run, double theta_true) {
  return (run.mean - theta_true) / theta_true * 100.0;
}

}  // namespace nhmetro
