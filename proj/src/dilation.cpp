#include "nhmetro/dilation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "nhmetro/dynamics.hpp"
#include "nhmetro/error.hpp"

namespace nhmetro {

namespace {

std::array<ComplexMatrix, 4> pauli_basis() {
  return {ComplexMatrix::identity(2), pauli::x(), pauli::y(), pauli::z()};
}

double herm_min_eig(const ComplexMatrix& a) { return hermitian_eig(a).eigenvalues.front(); }

}  // namespace

ComplexMatrix solve_eta(const ComplexMatrix& H) {
  if (H.dim() != 2) throw Error(ErrorKind::InvalidArgument, "solve_eta: only 2x2 Hamiltonians are supported");
  if (!H.all_finite()) throw Error(ErrorKind::NonFinite, "solve_eta: non-finite Hamiltonian");
  const auto basis = pauli_basis();
  const ComplexMatrix Hd = H.adjoint();

  // Real 8x4 system: column j holds the real and imaginary parts of
  // P_j H - H^dag P_j.
  double m[8][4];
  for (int j = 0; j < 4; ++j) {
    const ComplexMatrix r = basis[j] * H - Hd * basis[j];
    for (int e = 0; e < 4; ++e) {
      m[2 * e][j] = r.entries()[e].real();
      m[2 * e + 1][j] = r.entries()[e].imag();
    }
  }
  ComplexMatrix gram(4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double s = 0.0;
      for (int r = 0; r < 8; ++r) s += m[r][i] * m[r][j];
      gram(i, j) = s;
    }
  const HermitianEigen ge = hermitian_eig(gram);
  const double top = std::max(ge.eigenvalues.back(), 1.0);

  // Minimum-norm nullspace vector with identity coefficient 1/2 (unit trace).
  std::array<double, 4> e_row{};
  std::vector<std::size_t> null_cols;
  for (std::size_t k = 0; k < 4; ++k) {
    if (ge.eigenvalues[k] <= 1e-12 * top) null_cols.push_back(k);
  }
  double enorm2 = 0.0;
  for (std::size_t k : null_cols) enorm2 += std::norm(ge.eigenvectors(0, k));
  if (null_cols.empty() || enorm2 < 1e-12) {
    throw Error(ErrorKind::NoPositiveSolution, "solve_eta: no unit-trace Hermitian metric exists");
  }
  for (std::size_t k : null_cols) {
    const double y = ge.eigenvectors(0, k).real() / (2.0 * enorm2);
    for (int i = 0; i < 4; ++i) e_row[i] += y * ge.eigenvectors(i, k).real();
  }
  ComplexMatrix eta(2);
  for (int i = 0; i < 4; ++i) eta += basis[i] * cplx(e_row[i]);
  eta = (eta + eta.adjoint()) * cplx(0.5);
  // rescale to exact unit trace
  eta *= 1.0 / eta.trace().real();

  const double lmin = herm_min_eig(eta);
  if (!(lmin > 1e-10)) {
    std::ostringstream os;
    os << "solve_eta: best unit-trace metric has smallest eigenvalue " << lmin;
    throw Error(ErrorKind::NoPositiveSolution, os.str());
  }
  return eta;
}

double eta_condition_number(const ComplexMatrix& eta) {
  const HermitianEigen e = hermitian_eig(eta);
  if (!(e.eigenvalues.front() > 0.0)) return std::numeric_limits<double>::infinity();
  return e.eigenvalues.back() / e.eigenvalues.front();
}

DilationSystem build_dilation(const ComplexMatrix& H, const std::optional<ComplexMatrix>& eta) {
  DilationSystem sys;
  sys.H = H;
  sys.eta = eta ? *eta : solve_eta(H);
  if (sys.eta.dim() != H.dim()) throw Error(ErrorKind::InvalidArgument, "build_dilation: eta dimension mismatch");
  const std::size_t d = H.dim();

  const HermitianEigen ee = hermitian_eig(sys.eta);
  if (!(ee.eigenvalues.front() > 1e-10)) {
    throw Error(ErrorKind::NoPositiveSolution, "build_dilation: eta is not positive definite");
  }
  sys.c = 0.0;
  for (double l : ee.eigenvalues) sys.c += 1.0 / l;
  sys.zeta = sys.eta * cplx(sys.c) - ComplexMatrix::identity(d);

  const double zmin = herm_min_eig(sys.zeta);
  if (!(zmin > 1e-10)) {
    std::ostringstream os;
    os << "zeta = c eta - I has smallest eigenvalue " << zmin;
    throw Error(ErrorKind::ZetaNotPositive, os.str());
  }
  sys.zeta_sqrt = herm_funct(sys.zeta, SpectralFunction::Sqrt);
  sys.zeta_inv_sqrt = herm_funct(sys.zeta, SpectralFunction::InvSqrt);
  const ComplexMatrix s = herm_apply(sys.zeta, [](double x) { return 1.0 / (std::sqrt(x) + 1.0 / std::sqrt(x)); });

  sys.H_s = (H * sys.zeta_inv_sqrt + sys.zeta_sqrt * H) * s;
  sys.V = (H - sys.zeta_sqrt * H * sys.zeta_inv_sqrt) * s * kI;
  sys.H_tot = kron(ComplexMatrix::identity(2), sys.H_s) + kron(pauli::y(), sys.V);
  return sys;
}

DilationResiduals dilation_residuals(const DilationSystem& sys) {
  DilationResiduals r;
  const ComplexMatrix& H = sys.H;
  const double scale = std::max(H.frobenius_norm() * sys.eta.frobenius_norm(), 1e-300);
  r.pseudo_hermiticity = (sys.eta * H - H.adjoint() * sys.eta).frobenius_norm() / scale;
  r.hs_hermiticity = (sys.H_s - sys.H_s.adjoint()).frobenius_norm();
  r.v_hermiticity = (sys.V - sys.V.adjoint()).frobenius_norm();
  r.htot_hermiticity = (sys.H_tot - sys.H_tot.adjoint()).frobenius_norm();
  r.lower_block = (sys.H_s - sys.V * sys.zeta_sqrt * kI - H).frobenius_norm();
  r.upper_block =
      (sys.H_s + sys.V * sys.zeta_inv_sqrt * kI - sys.zeta_sqrt * H * sys.zeta_inv_sqrt).frobenius_norm();
  r.eta_min_eig = herm_min_eig(sys.eta);
  r.zeta_min_eig = herm_min_eig(sys.zeta);
  return r;
}

DilatedState evolve_dilated(const DilationSystem& sys, const ComplexVector& psi0, double t) {
  const std::size_t d = sys.H.dim();
  if (psi0.dim() != d) throw Error(ErrorKind::InvalidArgument, "evolve_dilated: probe dimension mismatch");
  if (!psi0.is_normalized()) throw Error(ErrorKind::NotNormalized, "evolve_dilated: probe is not normalized");

  const ComplexVector lower = sys.zeta_sqrt * psi0;
  ComplexVector init(2 * d);
  for (std::size_t i = 0; i < d; ++i) {
    init[i] = psi0[i];
    init[d + i] = lower[i];
  }
  DilatedState out;
  out.total = mat_exp(sys.H_tot * cplx(0.0, -t)) * init;
  out.norm_squared = out.total.norm_squared();
  ComplexVector block(d);
  for (std::size_t i = 0; i < d; ++i) block[i] = out.total[i];
  const double bn = block.norm_squared();
  out.success_prob = bn / out.norm_squared;
  out.recovered = bn > 0.0 ? fix_global_phase(block * cplx(1.0 / std::sqrt(bn))) : block;
  return out;
}

}  // namespace nhmetro
