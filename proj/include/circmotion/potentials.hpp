#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "circmotion/agent.hpp"
#include "circmotion/graph.hpp"

namespace circmotion {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// exp(i m theta) component-wise.
template <typename Derived>
VectorX<std::complex<typename Derived::Scalar>> phasors(const Eigen::MatrixBase<Derived>& theta,
                                                        int m = 1) {
  using Scalar = typename Derived::Scalar;
  const Scalar mm = static_cast<Scalar>(m);
  return theta.unaryExpr([mm](Scalar t) { return std::polar(Scalar(1), mm * t); });
}

/// m-th phase order parameter p_m = (1 / (m N)) sum_k exp(i m theta_k).
/// Its magnitude lies in [0, 1/m].
template <typename Derived>
std::complex<typename Derived::Scalar> order_parameter(const Eigen::MatrixBase<Derived>& theta,
                                                       int m = 1) {
  using Scalar = typename Derived::Scalar;
  if (m < 1) throw std::invalid_argument("harmonic order m must be >= 1");
  return phasors(theta, m).sum() / static_cast<Scalar>(m * theta.size());
}

namespace detail {

template <typename Derived>
void check_dimension(const Eigen::MatrixBase<Derived>& theta, const Eigen::MatrixXd& laplacian) {
  if (laplacian.rows() != theta.size() || laplacian.cols() != theta.size()) {
    throw std::invalid_argument("heading vector length does not match the graph size");
  }
}

}  // namespace detail

/// Laplacian phase potential W_m = 1/2 <exp(i m theta), L exp(i m theta)>.
template <typename Derived>
typename Derived::Scalar w_m(const Eigen::MatrixBase<Derived>& theta,
                             const Eigen::MatrixXd& laplacian, int m) {
  using Scalar = typename Derived::Scalar;
  detail::check_dimension(theta, laplacian);
  const auto z = phasors(theta, m);
  const VectorX<std::complex<Scalar>> lz =
      laplacian.template cast<std::complex<Scalar>>() * z;
  return Scalar(0.5) * z.dot(lz).real();
}

template <typename Derived>
typename Derived::Scalar w_m(const Eigen::MatrixBase<Derived>& theta, const InteractionGraph& g,
                             int m) {
  return w_m(theta, g.laplacian(), m);
}

/// Phase coupling term <i exp(i m theta_k), L_k exp(i m theta)>, which equals
/// -sum_{j in N_k} sin(m (theta_j - theta_k)). The exact partial derivative of
/// W_m is m times this vector. Components always sum to zero.
template <typename Derived>
VectorX<typename Derived::Scalar> phase_coupling(const Eigen::MatrixBase<Derived>& theta,
                                                 const Eigen::MatrixXd& laplacian, int m) {
  using Scalar = typename Derived::Scalar;
  detail::check_dimension(theta, laplacian);
  const auto z = phasors(theta, m);
  const VectorX<std::complex<Scalar>> lz =
      laplacian.template cast<std::complex<Scalar>>() * z;
  return (z.conjugate().array() * lz.array()).imag().matrix();
}

template <typename Derived>
VectorX<typename Derived::Scalar> phase_coupling(const Eigen::MatrixBase<Derived>& theta,
                                                 const InteractionGraph& g, int m) {
  return phase_coupling(theta, g.laplacian(), m);
}

/// Exact gradient of W_m with respect to the headings.
template <typename Derived>
VectorX<typename Derived::Scalar> w_m_gradient(const Eigen::MatrixBase<Derived>& theta,
                                               const Eigen::MatrixXd& laplacian, int m) {
  using Scalar = typename Derived::Scalar;
  return static_cast<Scalar>(m) * phase_coupling(theta, laplacian, m);
}

/// G = 1/2 sum_k (omega_k - omega_d)^2.
template <typename Derived>
typename Derived::Scalar g_potential(const Eigen::MatrixBase<Derived>& omega,
                                     typename Derived::Scalar omega_d) {
  return typename Derived::Scalar(0.5) * (omega.array() - omega_d).square().sum();
}

/// Circle-tracking potential S = 1/2 sum_k |r_k - c + i rho exp(i theta_k)|^2.
/// Zero exactly when every agent sits on the circle of radius rho about
/// `center` with its velocity tangent in the anticlockwise sense.
template <typename DerivedR, typename DerivedT>
typename DerivedT::Scalar s_potential(const Eigen::MatrixBase<DerivedR>& positions,
                                      const Eigen::MatrixBase<DerivedT>& theta,
                                      typename DerivedT::Scalar rho,
                                      std::complex<typename DerivedT::Scalar> center) {
  using Scalar = typename DerivedT::Scalar;
  if (!(rho > Scalar(0))) throw std::invalid_argument("circle radius must be positive");
  if (positions.size() != theta.size()) {
    throw std::invalid_argument("positions and headings differ in length");
  }
  const std::complex<Scalar> i_rho(Scalar(0), rho);
  Scalar acc(0);
  for (Eigen::Index k = 0; k < theta.size(); ++k) {
    acc += std::norm(positions(k) - center + i_rho * std::polar(Scalar(1), theta(k)));
  }
  return Scalar(0.5) * acc;
}

/// Per-agent circle error r_k - c + i rho exp(i theta_k).
Eigen::VectorXcd circle_errors(const Eigen::VectorXcd& positions, const Eigen::VectorXd& theta,
                               double rho, Complex center);

/// How the m-th harmonic is weighted in the (M, N) phase potential.
///
/// Coupling: the law adds K * sum_m K_m * phase_coupling_m, and the potential
///   it descends is sum_{m<M} K_m/m (N/2 lambda_max - W_m) - K_M/M W_M.
/// Potential: the potential is sum_{m<M} K_m/m^2 (N/2 lambda_max - W_m)
///   - K_M/M^2 W_M, and the law follows its exact gradient, i.e. weight K_m/m
///   on phase_coupling_m.
enum class PatternWeighting { Coupling, Potential };

namespace detail {

inline double harmonic_weight(PatternWeighting weighting, int m) {
  return weighting == PatternWeighting::Coupling ? 1.0 / m : 1.0 / (m * m);
}

}  // namespace detail

/// (M, N) phase potential with M = gains.size(). Minimal when theta .. (M-1)theta
/// are balanced and M theta is synchronized.
template <typename Derived>
typename Derived::Scalar pattern_potential(const Eigen::MatrixBase<Derived>& theta,
                                           const Eigen::MatrixXd& laplacian, double lambda_max,
                                           std::span<const double> gains,
                                           PatternWeighting weighting = PatternWeighting::Coupling) {
  using Scalar = typename Derived::Scalar;
  const int big_m = static_cast<int>(gains.size());
  if (big_m < 1) throw std::invalid_argument("pattern potential needs at least one gain");
  const Scalar half_n_lambda = Scalar(0.5) * Scalar(theta.size()) * Scalar(lambda_max);
  Scalar acc(0);
  for (int m = 1; m < big_m; ++m) {
    acc += Scalar(gains[m - 1] * detail::harmonic_weight(weighting, m)) *
           (half_n_lambda - w_m(theta, laplacian, m));
  }
  acc -= Scalar(gains[big_m - 1] * detail::harmonic_weight(weighting, big_m)) *
         w_m(theta, laplacian, big_m);
  return acc;
}

/// Exact gradient of pattern_potential.
template <typename Derived>
VectorX<typename Derived::Scalar> pattern_gradient(
    const Eigen::MatrixBase<Derived>& theta, const Eigen::MatrixXd& laplacian,
    std::span<const double> gains, PatternWeighting weighting = PatternWeighting::Coupling) {
  using Scalar = typename Derived::Scalar;
  VectorX<Scalar> grad = VectorX<Scalar>::Zero(theta.size());
  for (int m = 1; m <= static_cast<int>(gains.size()); ++m) {
    const double w = gains[m - 1] * detail::harmonic_weight(weighting, m) * m;
    grad -= Scalar(w) * phase_coupling(theta, laplacian, m);
  }
  return grad;
}

/// Composite Lyapunov functions attached to each control law.
enum class CompositeKind {
  V1,  // individual circles, balanced (K > 0)
  V2,  // individual circles, synchronized (K < 0)
  U1,  // common circle, balanced (K > 0, kappa > 0)
  U2,  // common circle, synchronized (K < 0, kappa > 0)
  V,   // common circle, (M, N)-pattern
};

struct CompositeParams {
  double K = 0.0;
  double kappa = 0.0;
  double omega_d = 0.0;
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  std::vector<double> pattern_gains;  // K_1..K_M, only used by V
  PatternWeighting pattern_weighting = PatternWeighting::Coupling;
};

/// Evaluates the composite potential of `kind`. Throws std::invalid_argument
/// when the gains violate the sign hypotheses that make it a Lyapunov function.
double composite(CompositeKind kind, const SwarmState& s, const InteractionGraph& g,
                 const CompositeParams& params);

void validate_composite_gains(CompositeKind kind, const CompositeParams& params);

namespace detail {

double composite_unchecked(CompositeKind kind, const SwarmState& s,
                           const Eigen::MatrixXd& laplacian, double lambda_max,
                           const CompositeParams& params);

}  // namespace detail

}  // namespace circmotion
