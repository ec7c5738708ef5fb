#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

#include "crspectra/sphere_point.hpp"

namespace crspectra {

/// Deterministic random stream. Uniform and Gaussian variates are generated
/// from raw mt19937_64 output (Box-Muller for the Gaussian) rather than
/// through std::*_distribution, whose output is implementation-defined; the
/// same seed therefore reproduces the same stream bit-for-bit everywhere.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform();

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal.
  double gaussian();

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Uniform point of S^{2n+1}: normalized Gaussian vector.
SpherePoint random_sphere_point(int n, RandomStream& rng);

/// Random element of U(n+1), realified to a (2n+2)^2 orthogonal matrix
/// commuting with J. Built by Gram-Schmidt on a complex Gaussian matrix.
Eigen::MatrixXd random_unitary(int n, RandomStream& rng);

}  // namespace crspectra
