#include "nhmetro/measure.hpp"

#include <cmath>
#include <sstream>

#include "nhmetro/dynamics.hpp"
#include "nhmetro/error.hpp"
#include "nhmetro/fisher.hpp"

namespace nhmetro {

Observable::Observable(ComplexMatrix a, std::string label) : a_(std::move(a)), label_(std::move(label)) {
  if (!a_.all_finite()) throw Error(ErrorKind::NonFinite, "observable has non-finite entries");
  if ((a_ - a_.adjoint()).frobenius_norm() >= 1e-10) {
    throw Error(ErrorKind::NotHermitian, "observable '" + label_ + "' is not Hermitian");
  }
}

Observable Observable::basis_projector(std::size_t dim, std::size_t index) {
  const ComplexVector e = ComplexVector::basis(dim, index);
  return Observable(outer(e, e), "|" + std::to_string(index) + "><" + std::to_string(index) + "|");
}

namespace {

double mean_of(const HamiltonianModel& model, double theta, double t, const ComplexVector& psi0,
               const ComplexMatrix& a) {
  return expectation(a, evolve(model, theta, t, psi0).phi_out).real();
}

}  // namespace

double error_propagation_precision(const HamiltonianModel& model, double theta, double t,
                                   const ComplexVector& psi0, const Observable& obs, double step) {
  if (step <= 0.0) step = default_fd_step(theta);
  const ComplexMatrix& a = obs.matrix();
  const double up = mean_of(model, theta + step, t, psi0, a);
  const double dn = mean_of(model, theta - step, t, psi0, a);
  const double slope = (up - dn) / (2.0 * step);
  if (std::abs(slope) <= 1e-12) {
    std::ostringstream os;
    os << "d<A>/dtheta = " << slope << " carries no first-order information";
    throw Error(ErrorKind::Degenerate, os.str());
  }
  const ComplexVector phi = evolve(model, theta, t, psi0).phi_out;
  const double m = expectation(a, phi).real();
  const double var = expectation(a * a, phi).real() - m * m;
  if (!(var > 0.0)) throw Error(ErrorKind::Degenerate, "observable has zero variance on the output state");
  return std::abs(slope) / std::sqrt(var);
}

OptimalityReport optimality_residual(const ComplexMatrix& h, const ComplexVector& phi, const ComplexMatrix& a) {
  const cplx mh = expectation(h, phi);
  const cplx ma = expectation(a, phi);
  const ComplexVector f = h * phi - phi * mh;
  const ComplexVector g = a * phi - phi * ma;
  const double gg = g.norm_squared();
  if (std::sqrt(gg) <= 1e-12) throw Error(ErrorKind::ZeroG, "observable acts trivially on the output state");

  OptimalityReport rep;
  rep.c = -kI * inner(g, f) / gg;
  rep.c_imag_fraction = std::abs(rep.c) > 0.0 ? std::abs(rep.c.imag()) / std::abs(rep.c) : 0.0;
  const double fn = f.norm();
  if (fn == 0.0) {
    rep.residual = 0.0;
    return rep;
  }
  const ComplexVector r = f - g * (kI * rep.c.real());
  rep.residual = r.norm() / fn;
  return rep;
}

OptimalityReport optimality_residual(const HamiltonianModel& model, double theta, double t,
                                     const ComplexVector& psi0, const Observable& obs) {
  const ComplexVector phi = evolve(model, theta, t, psi0).phi_out;
  const ComplexMatrix h = generator_quadrature(model, theta, t);
  return optimality_residual(h, phi, obs.matrix());
}

ComplexMatrix sld_operator(const HamiltonianModel& model, double theta, double t, const ComplexVector& psi0,
                           double step) {
  const ComplexMatrix U = mat_exp(hamiltonian(model, theta) * cplx(0.0, -t));
  const ComplexMatrix dU = operator_derivative_fd(model, theta, t, step);
  const ComplexVector psi = U * psi0;
  const ComplexVector phi = psi * cplx(1.0 / psi.norm());
  const ComplexVector dphi = normalized_state_derivative(U, dU, psi0);
  ComplexMatrix L = (outer(dphi, phi) + outer(phi, dphi)) * cplx(2.0);
  // exact symmetry
  return (L + L.adjoint()) * cplx(0.5);
}

}  // namespace nhmetro
