#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "json.hpp"

#include "crspectra/conformal.hpp"
#include "crspectra/polynomial.hpp"
#include "crspectra/quadrature.hpp"

namespace crspectra {

/// Relative cutoff separating the numerical rank of the round Gram matrix
/// from the |zeta|^2 - 1 redundancy of restricted monomials.
inline constexpr double kRankCutoff = 1e-10;

/// Kernel and clustering thresholds, as fractions of the largest computed
/// eigenvalue.
inline constexpr double kKernelToleranceFactor = 1e-6;
inline constexpr double kClusterToleranceFactor = 1e-6;

/// Discrete Dirichlet/mass pair for theta = f theta_0:
///   stiffness_jk = int f^n  <grad_H phi_j, grad_H phi_k>  psi_0
///   mass_jk      = int f^{n+1} phi_j phi_k               psi_0
/// plus the whitening map onto the numerically independent subspace of the
/// restricted basis.
struct SpectralProblem {
  Eigen::MatrixXd stiffness;  // K x K, symmetric
  Eigen::MatrixXd mass;       // K x K, symmetric
  Eigen::MatrixXd rank_map;   // K x r, whitened columns of the round Gram
  std::vector<RealPolynomial> basis;
  double volume = 0.0;        // V(theta) = int f^{n+1} psi_0
  double round_volume = 0.0;  // int psi_0 under the same rule
  int dim_n = 1;
  int basis_degree = 0;
  std::string rule_descriptor;

  int truncated_dimension() const { return static_cast<int>(rank_map.cols()); }
};

struct EigenvalueCluster {
  double value = 0.0;
  int multiplicity = 0;
};

/// Spectrum of the truncated generalized problem together with both sides of
/// the scale-invariant bound.
struct SpectralResult {
  std::vector<double> eigenvalues;  // ascending, kernel included
  std::vector<EigenvalueCluster> clusters;
  double lambda1 = 0.0;
  double volume = 0.0;
  double invariant = 0.0;  // lambda1 * volume^{1/(n+1)}
  double bound = 0.0;      // 2n * round_volume^{1/(n+1)}
  double margin = 0.0;     // bound - invariant
  int dim_n = 1;
  int basis_degree = 0;
  std::string rule_descriptor;
};

/// Galerkin assembly. Throws NonPositiveFactorError (with node index) when f
/// is not strictly positive on the rule, RankDeficiencyError when truncation
/// leaves fewer than two dimensions.
SpectralProblem assemble(const ConformalFactor& f, std::vector<RealPolynomial> basis,
                         const QuadratureRule& rule);

/// Generalized symmetric eigensolve on the truncated subspace. lambda1 is
/// the smallest eigenvalue above the kernel threshold; a kernel dimension
/// other than one raises KernelDimensionAnomalyError.
SpectralResult solve(const SpectralProblem& problem, int count = 60);

/// assemble + solve with the monomial basis of total degree <= degree.
SpectralResult invariant_report(const ConformalFactor& f, int n, int degree,
                                const QuadratureRule& rule, int count = 60);

/// Single-function upper bound
///   int f^n |grad_H u|^2 psi_0 / int f^{n+1} (u - mean)^2 psi_0
/// with the f^{n+1}-weighted mean. Throws DegenerateTestFunctionError when
/// the centered norm falls below 1e-14.
double rayleigh_quotient(const RealPolynomial& u, const ConformalFactor& f,
                         const QuadratureRule& rule);

nlohmann::json to_json(const SpectralResult& result);

}  // namespace crspectra
