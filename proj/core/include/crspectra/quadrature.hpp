#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "crspectra/sphere_point.hpp"

namespace crspectra {

/// Nodes and positive weights discretizing the volume form psi_{theta_0}
/// on S^{2n+1}. For exact rules the weights sum to the round volume by
/// construction (checked); exact_degree = 0 marks Monte Carlo rules.
struct QuadratureRule {
  std::vector<SpherePoint> nodes;
  Eigen::VectorXd weights;
  int exact_degree = 0;
  std::string descriptor;
  int dim_n = 1;

  std::size_t size() const { return nodes.size(); }
  /// Sum of weights = the discretization's V(theta_0).
  double total_weight() const;
};

/// Round volume of the unit sphere S^{2n+1}: 2 pi^{n+1} / n!.
double round_volume(int n);

/// Gauss-Legendre nodes/weights on [-1, 1], computed by Newton iteration on
/// the Legendre polynomial to 1e-15.
void gauss_legendre(int m, std::vector<double>& nodes, std::vector<double>& weights);

/// Product rule on S^3 in Hopf coordinates
/// zeta_1 = cos(eta) e^{i phi_1}, zeta_2 = sin(eta) e^{i phi_2}:
/// Gauss-Legendre with m nodes in cos(2 eta), uniform rules with 2m+1 nodes
/// in each angle. Exact for polynomials of total degree <= 2m-1; node count
/// m (2m+1)^2.
QuadratureRule product_rule_s3(int m);

/// Equal-weight rule from `count` uniform points (normalized Gaussian
/// vectors); weights sum to the round volume exactly. Deterministic in seed.
QuadratureRule monte_carlo_rule(int n, std::size_t count, std::uint64_t seed);

/// Compensated, deterministically chunked quadrature sum. Field evaluation
/// failures are rethrown with the offending node index.
double integrate(const std::function<double(const SpherePoint&)>& field,
                 const QuadratureRule& rule);

/// Node coordinates plus weight, one row per node, 17 significant digits.
void write_rule_csv(const QuadratureRule& rule, std::ostream& out);

}  // namespace crspectra
