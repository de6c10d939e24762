#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "nhmetro/error.hpp"
#include "nhmetro/fisher.hpp"

using namespace nhmetro;
using testutil::dist;
using testutil::pi;

namespace {

const ComplexVector ket0{1.0, 0.0};
const ComplexVector plus{std::sqrt(0.5), std::sqrt(0.5)};

HamiltonianModel half_omega_z(double omega) {
  return HamiltonianModel::custom([](double w) { return pauli::z() * cplx(0.5 * w); },
                                  [](double) { return pauli::z() * cplx(0.5); }, omega, "omega");
}

// Generator of alpha for the pt model, written out by hand.
ComplexMatrix pt_alpha_generator(double s, double a, double t) {
  const double sec = 1.0 / std::cos(a), sa = std::sin(a);
  const double x = 2 * s * t * std::cos(a), st2 = 2 * s * t;
  const cplx m11(0.0, sec * std::sin(x) - st2 * sa * sa);
  const double m12 = sec * std::cos(a - x) - st2 * sa - 1.0;
  const double m21 = -sec * std::cos(a + x) - st2 * sa + 1.0;
  return ComplexMatrix{{m11, m12}, {m21, -m11}} * cplx(0.5 * sec);
}

// Generator of kappa, written out by hand.
ComplexMatrix kappa_generator(double k, double t) {
  const double r = std::sqrt(k), sn = std::sin(t * r), s2 = std::sin(2 * t * r);
  const cplx d(0.0, 2 * r * sn * sn);
  return ComplexMatrix{{d, 2 * t * k * r + k * s2}, {2 * t * r - s2, -d}} * cplx(1.0 / (4 * k * r));
}

double sqrt_f(const HamiltonianModel& m, double t, const ComplexVector& probe = ket0) {
  return std::sqrt(qfi_record(m, m.theta(), t, probe).F);
}

}  // namespace

TEST_CASE("Gauss-Legendre rules integrate polynomials exactly") {
  for (std::size_t n : {2u, 5u, 64u, 1024u}) {
    const auto& rule = gauss_legendre(n);
    double w = 0, x2 = 0, odd = 0;
    for (std::size_t k = 0; k < n; ++k) {
      w += rule.weights[k];
      x2 += rule.weights[k] * rule.nodes[k] * rule.nodes[k];
      odd += rule.weights[k] * std::pow(rule.nodes[k], 3);
    }
    CHECK(w == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(x2 == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
    CHECK(std::abs(odd) < 1e-13);
  }
  CHECK_THROWS_AS(gauss_legendre(1), Error);
}

TEST_CASE("generator_quadrature at t = 0 and small t") {
  const auto m = HamiltonianModel::pt(1.0, 0.6, "alpha");
  CHECK(generator_quadrature(m, 0.6, 0.0).frobenius_norm() == 0.0);
  const ComplexMatrix dh = d_hamiltonian(m, 0.6);
  const double e3 = dist(generator_quadrature(m, 0.6, 1e-3), dh * cplx(1e-3));
  const double e4 = dist(generator_quadrature(m, 0.6, 1e-4), dh * cplx(1e-4));
  // O(t^2): a tenfold smaller t gives a hundredfold smaller error
  CHECK(e3 / e4 == doctest::Approx(100.0).epsilon(0.01));
}

TEST_CASE("generator_quadrature matches the hand-written alpha generator at t = pi") {
  const auto m = HamiltonianModel::pt(1.0, pi / 4, "alpha");
  const ComplexMatrix h = generator_quadrature(m, pi / 4, pi);
  const ComplexMatrix oracle = pt_alpha_generator(1.0, pi / 4, pi);
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 2; ++c) CHECK(std::abs(h(r, c) - oracle(r, c)) < 1e-8);
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> ua(0.1, 1.4), ut(0.0, 15.0), us(0.3, 2.0);
  for (int i = 0; i < 20; ++i) {
    const double s = us(rng), a = ua(rng), t = ut(rng);
    const auto mm = HamiltonianModel::pt(s, a, "alpha");
    CHECK(dist(generator_quadrature(mm, a, t), pt_alpha_generator(s, a, t)) < 1e-8 * std::max(1.0, t));
  }
}

TEST_CASE("quadrature has converged: doubling the order changes < 1e-10") {
  for (const auto& m : {HamiltonianModel::pt(1.0, pi / 4, "s"), HamiltonianModel::pt(1.0, pi / 4, "alpha"),
                        HamiltonianModel::kappa(2.0), HamiltonianModel::ep_demo(0.5)}) {
    for (double t : {pi / 8, pi, 5 * pi, 10 * pi}) {
      const ComplexMatrix h = generator_quadrature(m, m.theta(), t);
      QuadratureOptions fixed;
      fixed.order = 1024;
      fixed.adaptive = false;
      const ComplexMatrix h2 = generator_quadrature(m, m.theta(), t, fixed);
      CHECK(dist(h, h2) < 1e-10 * std::max(1.0, h.frobenius_norm()));
    }
  }
}

TEST_CASE("generator_fd") {
  const auto z = half_omega_z(1.7);
  for (double t : {0.3, 2.0, 9.0}) CHECK(dist(generator_fd(z, 1.7, t), pauli::z() * cplx(t / 2)) < 1e-8);

  const auto ps = HamiltonianModel::pt(1.0, pi / 4, "s");
  CHECK(dist(generator_fd(ps, 1.0, pi / 8), generator_quadrature(ps, 1.0, pi / 8)) < 1e-7);

  const auto k = HamiltonianModel::kappa(2.0);
  const ComplexMatrix hk = generator_fd(k, 2.0, pi / 6);
  const ComplexMatrix ok = kappa_generator(2.0, pi / 6);
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 2; ++c) CHECK(std::abs(hk(r, c) - ok(r, c)) < 1e-7);
  CHECK(dist(generator_fd(k, 2.0, pi / 6, 0.0, true), ok) < 1e-9);
}

TEST_CASE("QFI golden values") {
  CHECK(std::abs(sqrt_f(HamiltonianModel::pt(1.0, pi / 4, "s"), pi / 8) - 0.4682) < 1e-3);
  CHECK(std::abs(sqrt_f(HamiltonianModel::pt(1.0, pi / 4, "alpha"), 2 * pi / 8) - 0.4445) < 1e-3);
  CHECK(std::abs(sqrt_f(HamiltonianModel::kappa(2.0), pi / 6) - 0.1110) < 1e-3);
}

TEST_CASE("qfi_generator rejects unnormalized states") {
  try {
    qfi_generator(pauli::x(), ComplexVector{1.0, 1.0});
    FAIL("expected NotNormalized");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotNormalized);
  }
}

TEST_CASE("qfi_state_derivative") {
  for (const auto& m : {HamiltonianModel::pt(1.0, 0.3, "s"), HamiltonianModel::kappa(2.0)}) {
    CHECK(qfi_state_derivative(m, m.theta(), 0.0, ket0) == 0.0);
  }
  const auto ps = HamiltonianModel::pt(1.0, pi / 4, "s");
  const double f = qfi_state_derivative(ps, 1.0, pi / 8, ket0);
  // the published value is rounded to four places in sqrt(F)
  CHECK(std::abs(std::sqrt(f) - 0.4682) < 5e-5);
  CHECK(f == doctest::Approx(qfi_closed_form(ps, 1.0, pi / 8)).epsilon(1e-7));

  const auto z = half_omega_z(0.9);
  for (double t : {0.5, 1.0, 4.0}) CHECK(std::abs(qfi_state_derivative(z, 0.9, t, plus) - t * t) < 1e-8 * t * t);
}

TEST_CASE("closed-form QFI") {
  const auto ps = HamiltonianModel::pt(1.0, pi / 4, "s");
  CHECK(std::abs(std::sqrt(qfi_closed_form(ps, 1.0, pi / 8)) - 0.4682) < 1e-4);
  CHECK(qfi_closed_form(HamiltonianModel::pt(1.0, pi / 4, "alpha"), pi / 4, 0.0) == doctest::Approx(0.0));
  CHECK(std::abs(std::sqrt(qfi_closed_form(HamiltonianModel::kappa(2.0), 2.0, 10 * pi / 6)) - 4.1726) < 1e-4);

  auto kind_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::InvalidArgument;
  };
  CHECK(kind_of([] { qfi_closed_form(HamiltonianModel::ep_demo(0.3), 0.3, 1.0); }) == ErrorKind::UnsupportedFamily);
  CHECK(kind_of([&] { qfi_closed_form(ps, 1.0, 1.0, plus); }) == ErrorKind::UnsupportedProbe);
}

TEST_CASE("route agreement on random points") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> ut(0.05, 12.0), ua(0.15, 1.3), us(0.4, 2.0), uk(1.3, 3.5), ue(0.1, 0.7);
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-12}); };
  for (int i = 0; i < 30; ++i) {
    const double t = ut(rng);
    const std::vector<HamiltonianModel> models{HamiltonianModel::pt(us(rng), ua(rng), "s"),
                                               HamiltonianModel::pt(us(rng), ua(rng), "alpha"),
                                               HamiltonianModel::kappa(uk(rng)), HamiltonianModel::ep_demo(ue(rng))};
    for (const auto& m : models) {
      const double th = m.theta();
      const ComplexVector phi = evolve(m, th, t, ket0).phi_out;
      const double fq = qfi_generator(generator_quadrature(m, th, t), phi);
      const double ff = qfi_generator(generator_fd(m, th, t), phi);
      const double fs = qfi_state_derivative(m, th, t, ket0);
      CHECK(rel(fq, ff) < 1e-5);
      CHECK(rel(fq, fs) < 1e-5);
      if (m.family() != Family::ep_demo) CHECK(rel(fq, qfi_closed_form(m, th, t)) < 1e-5);
    }
  }
}

TEST_CASE("two-level variance identity") {
  std::mt19937_64 rng(47);
  for (int i = 0; i < 30; ++i) {
    const ComplexMatrix h = testutil::random_matrix(rng, 2, 3.0);
    const ComplexVector phi = testutil::random_state(rng, 2);
    const EigenDecomposition e = eig_decompose(h);
    REQUIRE_FALSE(e.defective);
    const ComplexMatrix vinv = mat_inverse(e.right_eigenvectors);
    const ComplexVector ab = vinv * phi;
    const ComplexVector perp{-std::conj(phi[1]), std::conj(phi[0])};
    const ComplexVector cd = vinv * perp;
    const cplx overlap = inner(e.right_eigenvectors.column(1), e.right_eigenvectors.column(0));
    const double rhs = std::norm(ab[0]) * std::norm(e.eigenvalues[0] - e.eigenvalues[1]) *
                       std::norm(std::conj(cd[0]) + std::conj(cd[1]) * overlap);
    CHECK(qfi_generator(h, phi) / 4 == doctest::Approx(rhs).epsilon(1e-8));
  }
}

TEST_CASE("Hermitian reduction: F = 4 Var(h)") {
  std::mt19937_64 rng(53);
  for (int i = 0; i < 20; ++i) {
    const ComplexMatrix hh = testutil::random_hermitian(rng, 2, 1.0);
    const ComplexMatrix dh = testutil::random_hermitian(rng, 2, 1.0);
    const auto m = HamiltonianModel::custom([hh, dh](double th) { return hh + dh * cplx(th); },
                                            [dh](double) { return dh; }, 0.4);
    const ComplexVector psi = testutil::random_state(rng, 2);
    const double t = 0.5 + i * 0.3;
    const ComplexMatrix h = generator_quadrature(m, 0.4, t);
    CHECK(h.is_hermitian(1e-10));
    const ComplexVector phi = evolve(m, 0.4, t, psi).phi_out;
    const double mean = expectation(h, phi).real();
    const double var = expectation(h * h, phi).real() - mean * mean;
    CHECK(std::abs(qfi_generator(h, phi) - 4 * var) < 1e-10);
  }
}

TEST_CASE("Heisenberg scaling: F/t^2 stays in a positive band") {
  for (const auto& m : {HamiltonianModel::pt(1.0, pi / 4, "s"), HamiltonianModel::pt(1.0, pi / 4, "alpha"),
                        HamiltonianModel::kappa(2.0)}) {
    for (int k = 3; k <= 7; ++k) {
      const double t = std::ldexp(pi, k);
      const double ratio = qfi_record(m, m.theta(), t, ket0).F / (t * t);
      CHECK(ratio > 0.05);
      CHECK(ratio < 50.0);
    }
  }
}

TEST_CASE("scaled information") {
  const auto ps = HamiltonianModel::pt(1.0, pi / 4, "s");
  CHECK(scaled_info(qfi_record(ps, 1.0, 0.0, ket0)) == 0.0);
  const auto z = half_omega_z(1.0);
  const QFIRecord rz = qfi_record(z, 1.0, 2.5, plus);
  CHECK(scaled_info(rz) == doctest::Approx(rz.F).epsilon(1e-12));

  // sqrt(I) grows linearly in t: positive regression slope and bounded scatter
  const int n = 200;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<double> ts, ys;
  for (int i = 0; i < n; ++i) {
    const double t = pi + 9 * pi * i / (n - 1);
    const QFIRecord r = qfi_record(ps, 1.0, t, ket0);
    CHECK(r.I == doctest::Approx(r.K * r.F).epsilon(1e-10));
    const double y = std::sqrt(scaled_info(r));
    ts.push_back(t);
    ys.push_back(y);
    sx += t;
    sy += y;
    sxx += t * t;
    sxy += t * y;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double icpt = (sy - slope * sx) / n;
  CHECK(slope > 0.0);
  double worst = 0.0;
  for (int i = 0; i < n; ++i) worst = std::max(worst, std::abs(ys[i] - (icpt + slope * ts[i])) / ts[i]);
  CHECK(worst < slope);
}

TEST_CASE("gauge invariance") {
  const auto pa = HamiltonianModel::pt(1.0, pi / 4, "alpha");
  const double th = pi / 4;
  CHECK(gauge_invariance_check(pa, th, pi, ket0, [](double) { return cplx(1.0); }) == 0.0);
  CHECK(gauge_invariance_check(pa, th, pi, ket0, [](double) { return cplx(2.0); }) < 1e-10);
  CHECK(gauge_invariance_check(pa, th, pi, ket0, [](double x) { return std::exp(cplx(0, x)); }) < 1e-6);
  try {
    gauge_invariance_check(pa, th, pi, ket0, [](double) { return cplx(0.0); });
    FAIL("expected ZeroScalar");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ZeroScalar);
  }
}

TEST_CASE("ep_demo: h-eigenvalue gap grows toward the EP at t = 20") {
  const auto m = HamiltonianModel::ep_demo(0.3);
  double prev = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double a = pi / 8 + (pi / 4 - 1e-3 - pi / 8) * i / 9.0;
    const double gap = qfi_record(m, a, 20.0, ket0).gap;
    CHECK(gap > prev);
    prev = gap;
  }
}
