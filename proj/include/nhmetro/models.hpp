#pragma once

#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <utility>

#include "nhmetro/matcore.hpp"

namespace nhmetro {

enum class Family { pt, kappa, ep_demo, custom };

std::string_view to_string(Family f) noexcept;
/// Throws Error{UnsupportedFamily} for unknown names.
Family family_from_string(std::string_view name);

using MatrixFn = std::function<ComplexMatrix(double)>;

/// A one-parameter family of Hamiltonians. The estimated parameter is the
/// only one that varies; the others are held at their stored values.
///
///   pt:      s [[i sin a, 1], [1, -i sin a]]     params s >= 0, a in (0, pi/2)
///   kappa:   [[0, kappa], [1, 0]]                 kappa > 0, kappa != 1
///   ep_demo: [[i sin a, cos a], [cos a, -i sin a]] a in (0, pi/4), EP at pi/4
///   custom:  user supplied H(theta) and dH/dtheta
class HamiltonianModel {
 public:
  static HamiltonianModel pt(double s, double alpha, std::string estimated = "s");
  static HamiltonianModel kappa(double kappa);
  static HamiltonianModel ep_demo(double alpha);
  static HamiltonianModel custom(MatrixFn h, MatrixFn dh, double theta, std::string name = "theta");

  Family family() const noexcept { return family_; }
  const std::string& estimated_param() const noexcept { return estimated_; }
  const std::map<std::string, double>& params() const noexcept { return params_; }
  double param(const std::string& name) const;
  /// Stored value of the estimated parameter.
  double theta() const { return param(estimated_); }
  std::size_t dim() const;

  HamiltonianModel with_theta(double theta) const;

  // Used by hamiltonian()/d_hamiltonian() for custom models.
  const MatrixFn& custom_h() const noexcept { return h_; }
  const MatrixFn& custom_dh() const noexcept { return dh_; }

 private:
  HamiltonianModel() = default;

  Family family_ = Family::custom;
  std::string estimated_;
  std::map<std::string, double> params_;
  MatrixFn h_;
  MatrixFn dh_;
};

/// Throws Error{OutOfRange} if theta (bound to the estimated parameter) leaves
/// the family's admissible region.
void check_range(const HamiltonianModel& model, double theta);

ComplexMatrix hamiltonian(const HamiltonianModel& model, double theta);
ComplexMatrix d_hamiltonian(const HamiltonianModel& model, double theta);

/// Analytic e^{-iHt} for pt and kappa. Throws Error{UnsupportedFamily}.
ComplexMatrix closed_form_U(const HamiltonianModel& model, double theta, double t);

/// Closed-form eigenvalue pair of the local generator h for pt (s or alpha),
/// kappa and ep_demo. The pair is unordered; compare |lambda+ - lambda-|.
std::pair<cplx, cplx> h_eigen_oracle(const HamiltonianModel& model, double theta, double t);

}  // namespace nhmetro
