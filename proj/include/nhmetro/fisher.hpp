#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "nhmetro/dynamics.hpp"
#include "nhmetro/matcore.hpp"
#include "nhmetro/models.hpp"

namespace nhmetro {

struct QuadratureOptions {
  std::size_t order = 64;
  bool adaptive = true;       // double the order until successive results agree
  double tol = 1e-10;         // relative to max(1, ||h||_F)
  std::size_t max_order = 1024;
};

struct GaussLegendreRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// Cached; safe to call concurrently.
const GaussLegendreRule& gauss_legendre(std::size_t order);

/// h = int_0^t e^{-i mu H} dH e^{i mu H} d mu.
ComplexMatrix generator_quadrature(const ComplexMatrix& H, const ComplexMatrix& dH, double t,
                                   const QuadratureOptions& opts = {});
ComplexMatrix generator_quadrature(const HamiltonianModel& model, double theta, double t,
                                   const QuadratureOptions& opts = {});

/// 1e-5 * max(1, |theta|)
double default_fd_step(double theta) noexcept;

/// Central difference of exp(-i H(theta +- step) t); step <= 0 picks the
/// default. Richardson combines steps h and h/2.
ComplexMatrix operator_derivative_fd(const HamiltonianModel& model, double theta, double t,
                                     double step = 0.0, bool richardson = false);

/// h = i (dU) U^{-1}. Throws Error{Singular}.
ComplexMatrix generator_fd(const HamiltonianModel& model, double theta, double t, double step = 0.0,
                           bool richardson = false);

/// 4(<h^dag h> - <h^dag><h>) over a normalized phi.
double qfi_generator(const ComplexMatrix& h, const ComplexVector& phi);

/// <h^dag A> - <h^dag><A>
cplx generalized_covariance(const ComplexMatrix& h, const ComplexMatrix& a, const ComplexVector& phi);

/// Derivative of the normalized state phi = U psi0 / sqrt(K) by the product
/// rule, with no phase fixing.
ComplexVector normalized_state_derivative(const ComplexMatrix& U, const ComplexMatrix& dU,
                                          const ComplexVector& psi0);

/// 4(<dphi|dphi> - |<dphi|phi>|^2) from an evolution operator and its derivative.
double qfi_from_operator_derivative(const ComplexMatrix& U, const ComplexMatrix& dU,
                                    const ComplexVector& psi0);

double qfi_state_derivative(const HamiltonianModel& model, double theta, double t,
                            const ComplexVector& psi0, double step = 0.0);

/// Closed forms for pt (s or alpha) and kappa with probe |0>.
/// Throws Error{UnsupportedFamily} or Error{UnsupportedProbe}.
double qfi_closed_form(const HamiltonianModel& model, double theta, double t,
                       const ComplexVector& probe = ComplexVector{1.0, 0.0});

struct QFIRecord {
  double theta = 0.0;
  double t = 0.0;
  ComplexMatrix h;
  double F = 0.0;
  double K = 1.0;
  double I = 0.0;
  double gap = 0.0;  // |lambda_max - lambda_min| of h
};

QFIRecord qfi_record(const HamiltonianModel& model, double theta, double t, const ComplexVector& psi0,
                     const QuadratureOptions& opts = {});

double scaled_info(const QFIRecord& rec) noexcept;

/// Relative QFI deviation when U is replaced by scalar(theta) U.
/// Throws Error{ZeroScalar}.
double gauge_invariance_check(const HamiltonianModel& model, double theta, double t,
                              const ComplexVector& psi0, const std::function<cplx(double)>& scalar,
                              double step = 0.0);

}  // namespace nhmetro
