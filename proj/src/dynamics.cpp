#include "nhmetro/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nhmetro/error.hpp"

namespace nhmetro {

ComplexVector fix_global_phase(const ComplexVector& v) {
  for (std::size_t i = 0; i < v.dim(); ++i) {
    const double m = std::abs(v[i]);
    if (m > 1e-14) {
      ComplexVector out = v;
      out *= std::conj(v[i]) / m;
      out[i] = m;  // exactly real
      return out;
    }
  }
  return v;
}

EvolutionResult evolve_with(const ComplexMatrix& U, const ComplexVector& psi0) {
  if (!psi0.is_normalized()) {
    throw Error(ErrorKind::NotNormalized, "evolve: initial state is not normalized within 1e-12");
  }
  EvolutionResult r;
  r.U = U;
  r.psi_out_raw = U * psi0;
  r.K = r.psi_out_raw.norm_squared();
  if (!(r.K > 0.0) || !std::isfinite(r.K)) {
    std::ostringstream os;
    os << "evolve: output norm^2 K = " << r.K << " cannot be normalized";
    throw Error(ErrorKind::NonFinite, os.str());
  }
  r.phi_out = fix_global_phase(r.psi_out_raw * cplx(1.0 / std::sqrt(r.K)));
  return r;
}

EvolutionResult evolve(const HamiltonianModel& model, double theta, double t, const ComplexVector& psi0) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw Error(ErrorKind::InvalidArgument, "evolve: t must be finite and >= 0");
  }
  const ComplexMatrix H = hamiltonian(model, theta);
  if (H.dim() != psi0.dim()) throw Error(ErrorKind::InvalidArgument, "evolve: probe dimension mismatch");
  return evolve_with(mat_exp(H * cplx(0.0, -t)), psi0);
}

bool is_rank1_projector(const ComplexMatrix& a, double tol) {
  if (!a.all_finite() || !a.is_hermitian(tol)) return false;
  if (std::abs(a.trace() - 1.0) > tol) return false;
  return (a * a - a).frobenius_norm() <= tol;
}

double survival_probability(const EvolutionResult& res, const ComplexMatrix& projector) {
  if (projector.dim() != res.phi_out.dim() || !is_rank1_projector(projector)) {
    throw Error(ErrorKind::NotProjector, "measurement operator is not a rank-1 projector within 1e-10");
  }
  const double p = expectation(projector, res.phi_out).real();
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace nhmetro
