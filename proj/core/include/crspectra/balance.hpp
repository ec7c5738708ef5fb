#pragma once

#include <Eigen/Core>

#include "json.hpp"

#include "crspectra/conformal.hpp"
#include "crspectra/moebius.hpp"
#include "crspectra/quadrature.hpp"

namespace crspectra {

/// Discrete positive measure on the sphere: quadrature weights times a
/// positive density.
struct WeightedMeasure {
  std::vector<SpherePoint> nodes;
  Eigen::VectorXd masses;  // all > 0
  double total = 0.0;
  int dim_n = 1;

  /// masses_i = w_i * f(node_i)^{n+1}, the discretization of psi_{f theta_0}.
  /// Throws NonPositiveFactorError when f is not positive at a node.
  static WeightedMeasure from_density(const QuadratureRule& rule, const ConformalFactor& f);
};

/// Solution of the barycenter equation: |int gamma_t^p dmu| / total <= residual.
struct BalancePoint {
  SpherePoint pole;
  double t = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

/// Mass-normalized pushforward barycenter (1/total) sum_i m_i g(node_i).
/// Always lies in the closed unit ball.
Eigen::VectorXd barycenter(const WeightedMeasure& mu, const CrAutomorphism& g);

/// Finds (p, t) with |barycenter(mu, gamma_t^p)| <= 1e-8. The unknown is
/// b = tanh(t) p in the open unit ball (removing the pole degeneracy at
/// t = 0); damped Newton with finite-difference Jacobian, then a ball
/// lattice of multi-starts, then direct minimization of the squared
/// residual. Deterministic given mu. At t = 0 the pole is fixed to e_{n+1}.
BalancePoint solve_balance(const WeightedMeasure& mu);

inline constexpr double kBalanceResidualTol = 1e-8;
inline constexpr int kBalanceMaxIterations = 500;
inline constexpr int kBalanceMultiStarts = 8;
inline constexpr double kBalanceMaxT = 20.0;

/// Re-enacts the min-max bound with the components of the balanced
/// automorphism as test functions: returns
///   sum_j int |grad_H gamma_j|^2_theta psi_theta / V(theta)
/// for theta = f theta_0, an upper bound for lambda_1(theta) up to
/// finite-difference and quadrature error. mu must discretize the same
/// f over the same rule.
double balanced_test_energy(const WeightedMeasure& mu, const ConformalFactor& f,
                            const QuadratureRule& rule);

nlohmann::json to_json(const BalancePoint& bp);

}  // namespace crspectra
