#pragma once

#include "nhmetro/matcore.hpp"
#include "nhmetro/models.hpp"

namespace nhmetro {

struct EvolutionResult {
  ComplexMatrix U;
  ComplexVector psi_out_raw;  // U psi0, unnormalized
  ComplexVector phi_out;      // normalized, first nonzero amplitude real-positive
  double K = 1.0;             // |U psi0|^2
};

/// Rotates the global phase so the first amplitude with modulus above 1e-14
/// is real and positive.
ComplexVector fix_global_phase(const ComplexVector& v);

/// U = exp(-i H(theta) t) applied to psi0. psi0 must be normalized, t >= 0.
EvolutionResult evolve(const HamiltonianModel& model, double theta, double t, const ComplexVector& psi0);

/// Same bookkeeping for an explicit evolution operator.
EvolutionResult evolve_with(const ComplexMatrix& U, const ComplexVector& psi0);

/// True if A is a rank-1 Hermitian projector within tol.
bool is_rank1_projector(const ComplexMatrix& a, double tol = 1e-10);

/// <phi|A|phi> for a rank-1 projector A. Throws Error{NotProjector}.
double survival_probability(const EvolutionResult& res, const ComplexMatrix& projector);

}  // namespace nhmetro
