#include <cmath>
#include <cstdint>

#include "doctest.h"
#include "helpers.hpp"
#include "nhmetro/error.hpp"
#include "nhmetro/estimate.hpp"

using namespace nhmetro;
using testutil::pi;

namespace {

const ComplexVector ket0{1.0, 0.0};
const Observable P0 = Observable::basis_projector(2, 0);

ShotRecord exact_shot(double p, std::uint64_t n) {
  ShotRecord s;
  s.n = n;
  s.x = static_cast<std::uint64_t>(std::llround(p * static_cast<double>(n)));
  s.p_hat = p;
  return s;
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("PCG32 reference vectors") {
  Pcg32 rng(42, 54);
  const std::uint32_t expected[] = {0xa15c02b7, 0x7b47f409, 0xba1d3330, 0x83d2f293, 0xbfa4784b, 0xcbed606e};
  for (std::uint32_t e : expected) CHECK(rng.next_u32() == e);
}

TEST_CASE("next_double is uniform on [0, 1)") {
  Pcg32 rng(7, 3);
  double sum = 0, lo = 1, hi = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.next_double();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(std::abs(sum / n - 0.5) < 5 * std::sqrt(1.0 / 12 / n));
  CHECK(lo < 1e-4);
  CHECK(hi > 1 - 1e-4);
}

TEST_CASE("trial generators are independent of each other and reproducible") {
  Pcg32 a = trial_rng(5, 0), b = trial_rng(5, 1), a2 = trial_rng(5, 0);
  int same = 0;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u32();
    same += x == b.next_u32();
    CHECK(x == a2.next_u32());
  }
  CHECK(same < 2);
  CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
}

TEST_CASE("sample_shots edge probabilities") {
  Pcg32 rng(1, 1);
  CHECK(sample_shots(0.0, 5000, rng).x == 0);
  const ShotRecord one = sample_shots(1.0, 5000, rng);
  CHECK(one.x == 5000);
  CHECK(one.p_hat == 1.0);
}

TEST_CASE("sample_shots concentrates at n = 1e6") {
  Pcg32 rng(11, 2);
  for (double p : {0.05, 0.3, 0.77}) {
    const ShotRecord s = sample_shots(p, 1000000, rng);
    CHECK(std::abs(s.p_hat - p) < 5 * std::sqrt(p * (1 - p) / 1e6));
    CHECK(s.p_hat == static_cast<double>(s.x) / 1e6);
  }
}

TEST_CASE("mle_invert recovers theta from an exact frequency") {
  const auto ps = HamiltonianModel::pt(1.0, pi / 4, "s");
  const double t = pi / 8;
  const auto br = monotone_bracket(ps, t, ket0, P0, 1.0, 0.5);
  for (double th : {0.8, 1.0, 1.2}) {
    const double p = outcome_probability(ps, th, t, ket0, P0);
    CHECK(std::abs(mle_invert(ps, t, ket0, P0, exact_shot(p, 2000), br) - th) < 1e-9);
  }
  const auto k = HamiltonianModel::kappa(2.0);
  const auto bk = monotone_bracket(k, pi / 2, ket0, P0, 2.0, 0.8);
  CHECK(bk.first > 1.0);
  const double pk = outcome_probability(k, 2.2, pi / 2, ket0, P0);
  CHECK(std::abs(mle_invert(k, pi / 2, ket0, P0, exact_shot(pk, 2000), bk) - 2.2) < 1e-9);
}

TEST_CASE("mle_invert errors") {
  const auto ps = HamiltonianModel::pt(1.0, pi / 4, "s");
  const double t = pi / 8;
  const auto br = monotone_bracket(ps, t, ket0, P0, 1.0, 0.2);
  const double plo = outcome_probability(ps, br.first, t, ket0, P0);
  const double phi = outcome_probability(ps, br.second, t, ket0, P0);
  const double outside = std::max(plo, phi) + 0.01;
  CHECK(kind_of([&] { mle_invert(ps, t, ket0, P0, exact_shot(outside, 100), br); }) == ErrorKind::NoRoot);
  CHECK(kind_of([&] { mle_invert(ps, t, ket0, P0, exact_shot(0.5, 100), {1.1, 0.9}); }) == ErrorKind::NotBracketed);
}

TEST_CASE("monotone_bracket contains theta and p is monotone on it") {
  const auto pa = HamiltonianModel::pt(1.0, pi / 4, "alpha");
  const double t = 10 * pi / 8;
  const auto br = monotone_bracket(pa, t, ket0, P0, pi / 4, 0.5);
  CHECK(br.first < pi / 4);
  CHECK(br.second > pi / 4);
  int sign = 0;
  double prev = outcome_probability(pa, br.first, t, ket0, P0);
  for (int i = 1; i <= 500; ++i) {
    const double th = br.first + (br.second - br.first) * i / 500.0;
    const double p = outcome_probability(pa, th, t, ket0, P0);
    const int s = p > prev ? 1 : -1;
    if (sign == 0) sign = s;
    CHECK(s == sign);
    prev = p;
  }
}

TEST_CASE("run_trials statistics") {
  const auto ps = HamiltonianModel::pt(1.0, pi / 4, "s");
  const double t = pi / 8;
  const auto br = monotone_bracket(ps, t, ket0, P0, 1.0, 0.5);

  TrialOptions two;
  two.n = 500;
  two.trials = 2;
  two.seed = 9;
  const EstimationRun r2 = run_trials(ps, 1.0, t, ket0, P0, two, br);
  REQUIRE(r2.estimates.size() == 2);
  const double a = r2.estimates[0], b = r2.estimates[1];
  CHECK(r2.mean == doctest::Approx((a + b) / 2));
  CHECK(r2.sigma == doctest::Approx(std::abs(a - b) / std::sqrt(2.0)));
  CHECK(r2.sigma_err == doctest::Approx(r2.sigma / std::sqrt(2.0)));
  CHECK(r2.precision == doctest::Approx(1.0 / (r2.sigma * std::sqrt(500.0))));
  CHECK(r2.precision_err == doctest::Approx(r2.precision / std::sqrt(2.0)));
}

TEST_CASE("run_trials is deterministic across thread counts") {
  const auto k = HamiltonianModel::kappa(2.0);
  const auto br = monotone_bracket(k, pi / 2, ket0, P0, 2.0, 0.8);
  TrialOptions o;
  o.n = 300;
  o.trials = 64;
  o.seed = 123;
  const EstimationRun a = run_trials(k, 2.0, pi / 2, ket0, P0, o, br);
  o.threads = 4;
  const EstimationRun b = run_trials(k, 2.0, pi / 2, ket0, P0, o, br);
  CHECK(a.estimates == b.estimates);
  CHECK(a.failed_trials == b.failed_trials);
  o.seed = 124;
  CHECK(run_trials(k, 2.0, pi / 2, ket0, P0, o, br).estimates != a.estimates);
}

TEST_CASE("sigma scales as 1/sqrt(n)") {
  const auto ps = HamiltonianModel::pt(1.0, pi / 4, "s");
  const double t = pi / 8;
  const auto br = monotone_bracket(ps, t, ket0, P0, 1.0, 0.5);
  TrialOptions o;
  o.trials = 600;
  o.seed = 5;
  o.n = 500;
  const double s1 = run_trials(ps, 1.0, t, ket0, P0, o, br).sigma;
  o.n = 8000;
  const double s2 = run_trials(ps, 1.0, t, ket0, P0, o, br).sigma;
  CHECK(s1 / s2 == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("estimator is nearly unbiased at t = 10 pi / 8") {
  const auto pa = HamiltonianModel::pt(1.0, pi / 4, "alpha");
  const double t = 10 * pi / 8;
  const auto br = monotone_bracket(pa, t, ket0, P0, pi / 4, 0.5);
  TrialOptions o;
  o.trials = 400;
  o.seed = 77;
  const EstimationRun r = run_trials(pa, pi / 4, t, ket0, P0, o, br);
  CHECK(std::abs(bias_percent(r, pi / 4)) < 1.0);
  CHECK(r.failed_trials == 0);
}
