#include "nhmetro/models.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "nhmetro/error.hpp"

namespace nhmetro {

std::string_view to_string(Family f) noexcept {
  switch (f) {
    case Family::pt: return "pt";
    case Family::kappa: return "kappa";
    case Family::ep_demo: return "ep_demo";
    case Family::custom: return "custom";
  }
  return "unknown";
}

Family family_from_string(std::string_view name) {
  if (name == "pt") return Family::pt;
  if (name == "kappa") return Family::kappa;
  if (name == "ep_demo") return Family::ep_demo;
  if (name == "custom") return Family::custom;
  throw Error(ErrorKind::UnsupportedFamily, "unknown model family '" + std::string(name) + "'");
}

HamiltonianModel HamiltonianModel::pt(double s, double alpha, std::string estimated) {
  if (estimated != "s" && estimated != "alpha") {
    throw Error(ErrorKind::InvalidArgument, "pt: estimated parameter must be 's' or 'alpha'");
  }
  HamiltonianModel m;
  m.family_ = Family::pt;
  m.estimated_ = std::move(estimated);
  m.params_ = {{"s", s}, {"alpha", alpha}};
  check_range(m, m.theta());
  return m;
}

HamiltonianModel HamiltonianModel::kappa(double kappa) {
  HamiltonianModel m;
  m.family_ = Family::kappa;
  m.estimated_ = "kappa";
  m.params_ = {{"kappa", kappa}};
  check_range(m, kappa);
  return m;
}

HamiltonianModel HamiltonianModel::ep_demo(double alpha) {
  HamiltonianModel m;
  m.family_ = Family::ep_demo;
  m.estimated_ = "alpha";
  m.params_ = {{"alpha", alpha}};
  check_range(m, alpha);
  return m;
}

HamiltonianModel HamiltonianModel::custom(MatrixFn h, MatrixFn dh, double theta, std::string name) {
  if (!h || !dh) throw Error(ErrorKind::InvalidArgument, "custom model needs H and dH callables");
  HamiltonianModel m;
  m.family_ = Family::custom;
  m.estimated_ = std::move(name);
  m.params_ = {{m.estimated_, theta}};
  m.h_ = std::move(h);
  m.dh_ = std::move(dh);
  return m;
}

double HamiltonianModel::param(const std::string& name) const {
  const auto it = params_.find(name);
  if (it == params_.end()) {
    throw Error(ErrorKind::InvalidArgument, "model has no parameter '" + name + "'");
  }
  return it->second;
}

std::size_t HamiltonianModel::dim() const {
  if (family_ == Family::custom) return h_(theta()).dim();
  return 2;
}

HamiltonianModel HamiltonianModel::with_theta(double theta) const {
  HamiltonianModel m = *this;
  m.params_[estimated_] = theta;
  return m;
}

namespace {

constexpr double kPi = std::numbers::pi;

void out_of_range(const std::string& what, double value) {
  std::ostringstream os;
  os << what << " (got " << value << ")";
  throw Error(ErrorKind::OutOfRange, os.str());
}

// Parameters with the estimated one replaced by theta.
struct Bound {
  double s = 0, alpha = 0, kappa = 0;
};

Bound bind(const HamiltonianModel& m, double theta) {
  Bound b;
  switch (m.family()) {
    case Family::pt:
      b.s = m.estimated_param() == "s" ? theta : m.param("s");
      b.alpha = m.estimated_param() == "alpha" ? theta : m.param("alpha");
      break;
    case Family::kappa: b.kappa = theta; break;
    case Family::ep_demo: b.alpha = theta; break;
    case Family::custom: break;
  }
  return b;
}

}  // namespace

void check_range(const HamiltonianModel& model, double theta) {
  if (!std::isfinite(theta)) out_of_range("parameter must be finite", theta);
  const Bound b = bind(model, theta);
  switch (model.family()) {
    case Family::pt:
      if (!(b.s >= 0.0)) out_of_range("pt: s must be >= 0", b.s);
      if (!(b.alpha > 0.0 && b.alpha < kPi / 2)) out_of_range("pt: alpha must lie in (0, pi/2)", b.alpha);
      break;
    case Family::kappa:
      if (!(b.kappa > 0.0)) out_of_range("kappa: kappa must be > 0", b.kappa);
      if (std::abs(b.kappa - 1.0) <= 1e-12) out_of_range("kappa: kappa must differ from 1", b.kappa);
      break;
    case Family::ep_demo:
      if (!(b.alpha > 0.0 && b.alpha < kPi / 4)) {
        out_of_range("ep_demo: alpha must lie in (0, pi/4)", b.alpha);
      }
      break;
    case Family::custom: break;
  }
}

ComplexMatrix hamiltonian(const HamiltonianModel& model, double theta) {
  check_range(model, theta);
  const Bound b = bind(model, theta);
  switch (model.family()) {
    case Family::pt: {
      const cplx g = kI * std::sin(b.alpha);
      return ComplexMatrix{{g, 1.0}, {1.0, -g}} * cplx(b.s);
    }
    case Family::kappa: return ComplexMatrix{{0.0, b.kappa}, {1.0, 0.0}};
    case Family::ep_demo: {
      const cplx g = kI * std::sin(b.alpha);
      const double c = std::cos(b.alpha);
      return ComplexMatrix{{g, c}, {c, -g}};
    }
    case Family::custom: return model.custom_h()(theta);
  }
  throw Error(ErrorKind::UnsupportedFamily, "hamiltonian: unknown family");
}

ComplexMatrix d_hamiltonian(const HamiltonianModel& model, double theta) {
  check_range(model, theta);
  const Bound b = bind(model, theta);
  switch (model.family()) {
    case Family::pt: {
      if (model.estimated_param() == "s") {
        const cplx g = kI * std::sin(b.alpha);
        return ComplexMatrix{{g, 1.0}, {1.0, -g}};
      }
      const cplx g = kI * b.s * std::cos(b.alpha);
      return ComplexMatrix{{g, 0.0}, {0.0, -g}};
    }
    case Family::kappa: return ComplexMatrix{{0.0, 1.0}, {0.0, 0.0}};
    case Family::ep_demo: {
      const cplx g = kI * std::cos(b.alpha);
      const double sn = std::sin(b.alpha);
      return ComplexMatrix{{g, -sn}, {-sn, -g}};
    }
    case Family::custom: return model.custom_dh()(theta);
  }
  throw Error(ErrorKind::UnsupportedFamily, "d_hamiltonian: unknown family");
}

ComplexMatrix closed_form_U(const HamiltonianModel& model, double theta, double t) {
  check_range(model, theta);
  const Bound b = bind(model, theta);
  switch (model.family()) {
    case Family::pt: {
      const double ca = std::cos(b.alpha);
      const double x = t * b.s * ca;
      const cplx off = -kI * std::sin(x);
      return ComplexMatrix{{std::cos(x - b.alpha), off}, {off, std::cos(x + b.alpha)}} * cplx(1.0 / ca);
    }
    case Family::kappa: {
      const double r = std::sqrt(b.kappa);
      const double c = std::cos(t * r), s = std::sin(t * r);
      return ComplexMatrix{{c, -kI * r * s}, {-kI * s / r, c}};
    }
    default:
      throw Error(ErrorKind::UnsupportedFamily,
                  "closed_form_U: no closed form for family " + std::string(to_string(model.family())));
  }
}

std::pair<cplx, cplx> h_eigen_oracle(const HamiltonianModel& model, double theta, double t) {
  check_range(model, theta);
  const Bound b = bind(model, theta);
  cplx lam;
  switch (model.family()) {
    case Family::pt: {
      if (model.estimated_param() == "s") {
        // h = t H/s, whose spectrum is +-t cos(alpha)
        lam = t * std::cos(b.alpha);
        break;
      }
      const double s = b.s, a = b.alpha;
      const double arg =
          4.0 * std::cos(2.0 * s * t * std::cos(a)) - 4.0 + s * s * t * t * (1.0 - std::cos(4.0 * a));
      lam = std::sqrt(cplx(arg)) / (std::cos(a) * 2.0 * std::sqrt(2.0));
      break;
    }
    case Family::kappa: {
      const double k = b.kappa;
      const double arg = -1.0 + 2.0 * k * t * t + std::cos(2.0 * t * std::sqrt(k));
      lam = std::sqrt(cplx(arg / (8.0 * k * k)));
      break;
    }
    case Family::ep_demo: {
      const double a = b.alpha;
      const double c2 = std::cos(2.0 * a);
      const double arg =
          std::cos(2.0 * t * std::sqrt(c2)) + t * t * std::sin(2.0 * a) * std::sin(4.0 * a) - 1.0;
      lam = std::sqrt(cplx(arg / 2.0)) / c2;
      break;
    }
    case Family::custom:
      throw Error(ErrorKind::UnsupportedFamily, "h_eigen_oracle: no closed form for custom models");
  }
  return {lam, -lam};
}

}  // namespace nhmetro
