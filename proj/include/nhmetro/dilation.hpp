#pragma once

#include <optional>

#include "nhmetro/matcore.hpp"

namespace nhmetro {

/// Unit-trace positive metric eta with eta H = H^dag eta, for 2x2 H. Among
/// all unit-trace solutions the one with the largest smallest eigenvalue is
/// returned (the Pauli part orthogonal to the identity is minimal).
/// Throws Error{NoPositiveSolution}.
ComplexMatrix solve_eta(const ComplexMatrix& H);

/// lambda_max / lambda_min of a Hermitian positive eta.
double eta_condition_number(const ComplexMatrix& eta);

struct DilationSystem {
  ComplexMatrix H;      // the non-Hermitian input
  ComplexMatrix eta;
  double c = 0.0;       // sum of 1/lambda_i(eta)
  ComplexMatrix zeta;   // c eta - I
  ComplexMatrix zeta_sqrt;
  ComplexMatrix zeta_inv_sqrt;
  ComplexMatrix H_s;
  ComplexMatrix V;
  ComplexMatrix H_tot;  // I (x) H_s + sigma_y (x) V, ancilla first
};

/// Throws Error{ZetaNotPositive} (and solve_eta's errors when eta is not given).
DilationSystem build_dilation(const ComplexMatrix& H, const std::optional<ComplexMatrix>& eta = std::nullopt);

struct DilationResiduals {
  double pseudo_hermiticity = 0.0;  // ||eta H - H^dag eta|| / (||H|| ||eta||)
  double hs_hermiticity = 0.0;
  double v_hermiticity = 0.0;
  double htot_hermiticity = 0.0;
  double lower_block = 0.0;  // ||H_s - i V zeta^{1/2} - H||
  double upper_block = 0.0;  // ||H_s + i V zeta^{-1/2} - zeta^{1/2} H zeta^{-1/2}||
  double eta_min_eig = 0.0;
  double zeta_min_eig = 0.0;
};

DilationResiduals dilation_residuals(const DilationSystem& sys);

struct DilatedState {
  ComplexVector total;      // 4-dim, ancilla (x) probe
  ComplexVector recovered;  // ancilla-|0> block, normalized, phase fixed
  double success_prob = 0.0;
  double norm_squared = 0.0;
};

/// Evolves |0>|psi0> + |1> zeta^{1/2}|psi0> under H_tot and post-selects the
/// ancilla on |0>.
DilatedState evolve_dilated(const DilationSystem& sys, const ComplexVector& psi0, double t);

}  // namespace nhmetro
