#include "nhmetro/fisher.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>

#include "nhmetro/error.hpp"

namespace nhmetro {

const GaussLegendreRule& gauss_legendre(std::size_t order) {
  if (order < 2) throw Error(ErrorKind::InvalidArgument, "quadrature order must be >= 2");
  static std::mutex mu;
  static std::map<std::size_t, std::unique_ptr<GaussLegendreRule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[order];
  if (slot) return *slot;

  auto rule = std::make_unique<GaussLegendreRule>();
  rule->nodes.resize(order);
  rule->weights.resize(order);
  const double n = static_cast<double>(order);
  for (std::size_t i = 0; i < (order + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= order; ++k) {
        const double kk = static_cast<double>(k);
        const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule->nodes[i] = -x;
    rule->nodes[order - 1 - i] = x;
    rule->weights[i] = w;
    rule->weights[order - 1 - i] = w;
  }
  slot = std::move(rule);
  return *slot;
}

namespace {

ComplexMatrix quadrature_once(const ComplexMatrix& H, const ComplexMatrix& dH, double t, std::size_t order) {
  const GaussLegendreRule& rule = gauss_legendre(order);
  ComplexMatrix acc(H.dim());
  const double half = 0.5 * t;
  for (std::size_t k = 0; k < order; ++k) {
    const double mu = half * (rule.nodes[k] + 1.0);
    const ComplexMatrix fwd = mat_exp(H * cplx(0.0, -mu));
    const ComplexMatrix back = mat_exp(H * cplx(0.0, mu));
    acc += (fwd * dH * back) * cplx(rule.weights[k] * half);
  }
  return acc;
}

}  // namespace

ComplexMatrix generator_quadrature(const ComplexMatrix& H, const ComplexMatrix& dH, double t,
                                   const QuadratureOptions& opts) {
  if (H.dim() != dH.dim()) throw Error(ErrorKind::InvalidArgument, "generator_quadrature: H/dH mismatch");
  if (t == 0.0) return ComplexMatrix(H.dim());
  std::size_t order = std::max<std::size_t>(opts.order, 2);
  ComplexMatrix prev = quadrature_once(H, dH, t, order);
  if (!opts.adaptive) return prev;
  while (order * 2 <= opts.max_order) {
    order *= 2;
    ComplexMatrix next = quadrature_once(H, dH, t, order);
    const double diff = (next - prev).frobenius_norm();
    prev = std::move(next);
    if (diff < opts.tol * std::max(1.0, prev.frobenius_norm())) break;
  }
  return prev;
}

ComplexMatrix generator_quadrature(const HamiltonianModel& model, double theta, double t,
                                   const QuadratureOptions& opts) {
  return generator_quadrature(hamiltonian(model, theta), d_hamiltonian(model, theta), t, opts);
}

double default_fd_step(double theta) noexcept { return 1e-5 * std::max(1.0, std::abs(theta)); }

namespace {

ComplexMatrix central_difference(const HamiltonianModel& model, double theta, double t, double step) {
  const ComplexMatrix up = mat_exp(hamiltonian(model, theta + step) * cplx(0.0, -t));
  const ComplexMatrix dn = mat_exp(hamiltonian(model, theta - step) * cplx(0.0, -t));
  return (up - dn) * cplx(1.0 / (2.0 * step));
}

}  // namespace

ComplexMatrix operator_derivative_fd(const HamiltonianModel& model, double theta, double t, double step,
                                     bool richardson) {
  if (step <= 0.0) step = default_fd_step(theta);
  if (!richardson) return central_difference(model, theta, t, step);
  const ComplexMatrix coarse = central_difference(model, theta, t, step);
  const ComplexMatrix fine = central_difference(model, theta, t, 0.5 * step);
  return (fine * cplx(4.0) - coarse) * cplx(1.0 / 3.0);
}

ComplexMatrix generator_fd(const HamiltonianModel& model, double theta, double t, double step,
                           bool richardson) {
  const ComplexMatrix U = mat_exp(hamiltonian(model, theta) * cplx(0.0, -t));
  const ComplexMatrix dU = operator_derivative_fd(model, theta, t, step, richardson);
  return (dU * mat_inverse(U)) * kI;
}

double qfi_generator(const ComplexMatrix& h, const ComplexVector& phi) {
  if (!phi.is_normalized()) {
    throw Error(ErrorKind::NotNormalized, "qfi_generator: state is not normalized within 1e-12");
  }
  const ComplexVector hphi = h * phi;
  const cplx hdh = inner(hphi, hphi);
  const cplx hd = inner(hphi, phi);
  const cplx hh = inner(phi, hphi);
  const cplx f = 4.0 * (hdh - hd * hh);
  if (std::abs(f.imag()) > 1e-10 * std::max(1.0, std::abs(f.real()))) {
    std::ostringstream os;
    os << "qfi_generator: imaginary residue " << f.imag() << " exceeds 1e-10";
    throw Error(ErrorKind::NonFinite, os.str());
  }
  return std::max(0.0, f.real());
}

cplx generalized_covariance(const ComplexMatrix& h, const ComplexMatrix& a, const ComplexVector& phi) {
  const ComplexVector hphi = h * phi;
  const ComplexVector aphi = a * phi;
  return inner(hphi, aphi) - inner(hphi, phi) * inner(phi, aphi);
}

ComplexVector normalized_state_derivative(const ComplexMatrix& U, const ComplexMatrix& dU,
                                          const ComplexVector& psi0) {
  const ComplexVector psi = U * psi0;
  const ComplexVector dpsi = dU * psi0;
  const double K = psi.norm_squared();
  if (!(K > 0.0)) throw Error(ErrorKind::NotNormalized, "output state has zero norm");
  const double dK = 2.0 * inner(psi, dpsi).real();
  return dpsi * cplx(1.0 / std::sqrt(K)) - psi * cplx(0.5 * dK / (K * std::sqrt(K)));
}

double qfi_from_operator_derivative(const ComplexMatrix& U, const ComplexMatrix& dU,
                                    const ComplexVector& psi0) {
  const ComplexVector psi = U * psi0;
  const ComplexVector phi = psi * cplx(1.0 / psi.norm());
  const ComplexVector dphi = normalized_state_derivative(U, dU, psi0);
  const double f = 4.0 * (dphi.norm_squared() - std::norm(inner(dphi, phi)));
  return std::max(0.0, f);
}

double qfi_state_derivative(const HamiltonianModel& model, double theta, double t,
                            const ComplexVector& psi0, double step) {
  if (!psi0.is_normalized()) throw Error(ErrorKind::NotNormalized, "probe is not normalized");
  const ComplexMatrix U = mat_exp(hamiltonian(model, theta) * cplx(0.0, -t));
  const ComplexMatrix dU = operator_derivative_fd(model, theta, t, step);
  return qfi_from_operator_derivative(U, dU, psi0);
}

double qfi_closed_form(const HamiltonianModel& model, double theta, double t, const ComplexVector& probe) {
  if (model.family() != Family::pt && model.family() != Family::kappa) {
    throw Error(ErrorKind::UnsupportedFamily,
                "qfi_closed_form: no closed form for family " + std::string(to_string(model.family())));
  }
  if (probe.dim() != 2 || std::abs(std::abs(probe[0]) - 1.0) > 1e-12 || std::abs(probe[1]) > 1e-12) {
    throw Error(ErrorKind::UnsupportedProbe, "qfi_closed_form: closed forms hold for probe |0> only");
  }
  check_range(model, theta);
  if (model.family() == Family::kappa) {
    const double k = theta;
    const double r = std::sqrt(k);
    const double num = -2.0 * t * r + std::sin(2.0 * t * r);
    const double c = std::cos(t * r), s = std::sin(t * r);
    const double den = k * c * c + s * s;
    return num * num / (4.0 * k * den * den);
  }
  const bool est_s = model.estimated_param() == "s";
  const double s = est_s ? theta : model.param("s");
  const double a = est_s ? model.param("alpha") : theta;
  const double ca = std::cos(a), sa = std::sin(a);
  const double x = 2.0 * s * t * ca;
  if (est_s) {
    const double den = -1.0 + sa * std::sin(a - x);
    return 4.0 * t * t * ca * ca * ca * ca / (den * den);
  }
  const double sec = 1.0 / ca;
  const double ratio = (1.0 - sec * std::cos(a - x) + 2.0 * s * t * sa) / (sec - std::sin(a - x) * std::tan(a));
  return ratio * ratio;
}

QFIRecord qfi_record(const HamiltonianModel& model, double theta, double t, const ComplexVector& psi0,
                     const QuadratureOptions& opts) {
  QFIRecord rec;
  rec.theta = theta;
  rec.t = t;
  const EvolutionResult ev = evolve(model, theta, t, psi0);
  rec.h = generator_quadrature(model, theta, t, opts);
  rec.F = qfi_generator(rec.h, ev.phi_out);
  rec.K = ev.K;
  rec.I = rec.K * rec.F;
  const std::vector<cplx> lam = eigenvalues(rec.h);
  rec.gap = lam.empty() ? 0.0 : std::abs(lam.back() - lam.front());
  return rec;
}

double scaled_info(const QFIRecord& rec) noexcept { return rec.K * rec.F; }

double gauge_invariance_check(const HamiltonianModel& model, double theta, double t,
                              const ComplexVector& psi0, const std::function<cplx(double)>& scalar,
                              double step) {
  if (step <= 0.0) step = default_fd_step(theta);
  const cplx f0 = scalar(theta);
  const cplx fp = scalar(theta + step), fm = scalar(theta - step);
  const double tiny = 1e-300;
  if (std::abs(f0) <= tiny || std::abs(fp) <= tiny || std::abs(fm) <= tiny) {
    throw Error(ErrorKind::ZeroScalar, "gauge_invariance_check: scalar vanishes near theta");
  }
  const ComplexMatrix U = mat_exp(hamiltonian(model, theta) * cplx(0.0, -t));
  const ComplexMatrix dU = operator_derivative_fd(model, theta, t, step);
  const double base = qfi_from_operator_derivative(U, dU, psi0);

  const cplx df = (fp - fm) / (2.0 * step);
  const ComplexMatrix U2 = U * f0;
  const ComplexMatrix dU2 = U * df + dU * f0;
  const double gauged = qfi_from_operator_derivative(U2, dU2, psi0);

  const double scale = std::max(std::abs(base), 1e-300);
  if (base == 0.0 && gauged == 0.0) return 0.0;
  return std::abs(gauged - base) / scale;
}

}  // namespace nhmetro
