#pragma once

#include <string>

#include "nhmetro/matcore.hpp"
#include "nhmetro/models.hpp"

namespace nhmetro {

class Observable {
 public:
  /// Throws Error{NotHermitian} unless ||A - A^dag|| < 1e-10.
  explicit Observable(ComplexMatrix a, std::string label = "A");

  /// |k><k|
  static Observable basis_projector(std::size_t dim, std::size_t index);

  const ComplexMatrix& matrix() const noexcept { return a_; }
  const std::string& label() const noexcept { return label_; }

 private:
  ComplexMatrix a_;
  std::string label_;
};

/// Single-shot precision |d<A>/dtheta| / Delta A on the normalized output.
/// Throws Error{Degenerate} when |d<A>/dtheta| <= 1e-12.
double error_propagation_precision(const HamiltonianModel& model, double theta, double t,
                                   const ComplexVector& psi0, const Observable& obs, double step = 0.0);

struct OptimalityReport {
  double residual = 0.0;  // ||f - i c_r g|| / ||f|| with the best real c_r
  cplx c;                 // unconstrained complex least-squares fit
  double c_imag_fraction = 0.0;

  bool optimal(double tol = 1e-6) const noexcept { return residual < tol && c_imag_fraction < tol; }
};

/// f = (h - <h>) phi, g = (A - <A>) phi, tested against f = i c g with c real.
/// Throws Error{ZeroG}.
OptimalityReport optimality_residual(const ComplexMatrix& h, const ComplexVector& phi, const ComplexMatrix& a);
OptimalityReport optimality_residual(const HamiltonianModel& model, double theta, double t,
                                     const ComplexVector& psi0, const Observable& obs);

/// L = 2(|dphi><phi| + |phi><dphi|)
ComplexMatrix sld_operator(const HamiltonianModel& model, double theta, double t, const ComplexVector& psi0,
                           double step = 0.0);

}  // namespace nhmetro
