#pragma once

#include <complex>

#include <Eigen/Core>

#include "crspectra/errors.hpp"

namespace crspectra {

/// Real ambient vector over C^{n+1}: 2n+2 components ordered
/// (x_1, y_1, ..., x_{n+1}, y_{n+1}) with zeta_j = x_j + i y_j.
using AmbientVector = Eigen::VectorXd;

inline constexpr double kOnSphereTol = 1e-12;

/// A point of the unit sphere S^{2n+1} in C^{n+1}.
class SpherePoint {
 public:
  /// Throws OffSphereError if |coords| differs from 1 beyond kOnSphereTol,
  /// DimensionMismatchError if coords does not have 2n+2 entries.
  SpherePoint(AmbientVector coords, int dim_n);

  /// Renormalization helper for coordinates carrying rounding drift.
  static SpherePoint normalized(AmbientVector coords, int dim_n);

  const AmbientVector& coords() const { return coords_; }
  int dim_n() const { return n_; }
  int ambient_dim() const { return 2 * n_ + 2; }
  double operator[](Eigen::Index i) const { return coords_[i]; }

 private:
  AmbientVector coords_;
  int n_;
};

/// The complex structure J of C^{n+1} in real coordinates:
/// (x_j, y_j) -> (-y_j, x_j), i.e. multiplication by i.
AmbientVector complex_structure(const AmbientVector& v);

/// Standard Hermitian product (a, b) = sum_j a_j conj(b_j) of the complex
/// readings of two real-stored vectors.
std::complex<double> hermitian_product(const AmbientVector& a, const AmbientVector& b);

/// Complex scalar multiplication c * v on a real-stored complex vector.
AmbientVector complex_scale(std::complex<double> c, const AmbientVector& v);

/// View the j-th complex component of a real-stored vector.
inline std::complex<double> complex_component(const AmbientVector& v, int j) {
  return {v[2 * j], v[2 * j + 1]};
}

inline void set_complex_component(AmbientVector& v, int j, std::complex<double> c) {
  v[2 * j] = c.real();
  v[2 * j + 1] = c.imag();
}

/// Realification of an (n+1)x(n+1) complex matrix: the (2n+2)^2 real matrix
/// acting on paired coordinates. The result commutes with J by construction,
/// and is orthogonal iff the input is unitary.
Eigen::MatrixXd realify_complex_matrix(const Eigen::MatrixXcd& m);

/// True when m^T m = I and m J = J m within tol (a realified unitary).
bool is_complex_unitary(const Eigen::MatrixXd& m, double tol = 1e-12);

/// The distinguished point e_{n+1} (x_{n+1} = 1).
SpherePoint last_coordinate_pole(int n);

/// The k-th complex unit point e_{k+1}, k in [0, n].
SpherePoint coordinate_point(int n, int complex_index);

}  // namespace crspectra
