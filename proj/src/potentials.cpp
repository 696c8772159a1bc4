#include "circmotion/potentials.hpp"

#include <string>

namespace circmotion {

namespace {

[[noreturn]] void reject(const char* hypothesis) {
  throw std::invalid_argument(std::string("gain sign violates the hypothesis ") + hypothesis);
}

}  // namespace

Eigen::VectorXcd circle_errors(const Eigen::VectorXcd& positions, const Eigen::VectorXd& theta,
                               double rho, Complex center) {
  Eigen::VectorXcd e(theta.size());
  for (Eigen::Index k = 0; k < theta.size(); ++k) {
    e(k) = positions(k) - center + Complex(0.0, rho) * std::polar(1.0, theta(k));
  }
  return e;
}

void validate_composite_gains(CompositeKind kind, const CompositeParams& p) {
  switch (kind) {
    case CompositeKind::V1:
      if (!(p.K > 0)) reject("K > 0 of the individual-circle balancing law");
      return;
    case CompositeKind::V2:
      if (!(p.K < 0)) reject("K < 0 of the individual-circle synchronization law");
      return;
    case CompositeKind::U1:
      if (!(p.K > 0)) reject("K > 0 of the common-circle balancing law");
      if (!(p.kappa > 0)) reject("kappa > 0 of the common-circle laws");
      break;
    case CompositeKind::U2:
      if (!(p.K < 0)) reject("K < 0 of the common-circle synchronization law");
      if (!(p.kappa > 0)) reject("kappa > 0 of the common-circle laws");
      break;
    case CompositeKind::V: {
      if (!(p.K > 0)) reject("K > 0 of the pattern law");
      if (!(p.kappa > 0)) reject("kappa > 0 of the pattern law");
      const auto big_m = p.pattern_gains.size();
      if (big_m < 1) throw std::invalid_argument("pattern law needs gains K_1..K_M");
      for (std::size_t m = 0; m + 1 < big_m; ++m) {
        if (!(p.pattern_gains[m] > 0)) reject("K_m > 0 for m < M of the pattern law");
      }
      if (!(p.pattern_gains.back() < 0)) reject("K_M < 0 of the pattern law");
      break;
    }
  }
  if (!(p.omega_d > 0)) {
    throw std::invalid_argument("common-circle potentials require Omega_d > 0");
  }
}

double composite(CompositeKind kind, const SwarmState& s, const InteractionGraph& g,
                 const CompositeParams& params) {
  validate_composite_gains(kind, params);
  if (g.size() != s.size()) {
    throw std::invalid_argument("graph size does not match the number of agents");
  }
  return detail::composite_unchecked(kind, s, g.laplacian(), g.lambda_max(), params);
}

namespace detail {

double composite_unchecked(CompositeKind kind, const SwarmState& s,
                           const Eigen::MatrixXd& laplacian, double lambda_max,
                           const CompositeParams& p) {
  const Eigen::VectorXd theta = s.headings();
  const Eigen::VectorXd omega = s.angular_velocities();
  const double half_n_lambda = 0.5 * s.size() * lambda_max;
  const double g = g_potential(omega, p.omega_d);

  switch (kind) {
    case CompositeKind::V1:
      return p.K * (half_n_lambda - w_m(theta, laplacian, 1)) + g;
    case CompositeKind::V2:
      return -p.K * w_m(theta, laplacian, 1) + g;
    default:
      break;
  }

  const double rho = 1.0 / p.omega_d;
  const double s_val = s_potential(s.positions(), theta, rho, to_complex(p.center));
  double phase = 0.0;
  switch (kind) {
    case CompositeKind::U1:
      phase = p.K * (half_n_lambda - w_m(theta, laplacian, 1));
      break;
    case CompositeKind::U2:
      phase = -p.K * w_m(theta, laplacian, 1);
      break;
    case CompositeKind::V:
      phase = p.K * pattern_potential(theta, laplacian, lambda_max, p.pattern_gains,
                                      p.pattern_weighting);
      break;
    default:
      break;
  }
  return p.kappa * s_val + rho * phase + rho * rho * rho * g;
}

}  // namespace detail

}  // namespace circmotion
