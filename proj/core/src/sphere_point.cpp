#include "crspectra/sphere_point.hpp"

#include <cmath>
#include <string>

namespace crspectra {

SpherePoint::SpherePoint(AmbientVector coords, int dim_n) : coords_(std::move(coords)), n_(dim_n) {
  if (n_ < 1) throw DimensionMismatchError("SpherePoint: dim_n must be >= 1");
  if (coords_.size() != 2 * n_ + 2) {
    throw DimensionMismatchError("SpherePoint: expected " + std::to_string(2 * n_ + 2) +
                                 " coordinates, got " + std::to_string(coords_.size()));
  }
  const double r2 = coords_.squaredNorm();
  if (std::abs(r2 - 1.0) > kOnSphereTol) {
    throw OffSphereError("SpherePoint: |z|^2 - 1 = " + std::to_string(r2 - 1.0) +
                         " exceeds tolerance");
  }
}

SpherePoint SpherePoint::normalized(AmbientVector coords, int dim_n) {
  const double r = coords.norm();
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw OffSphereError("SpherePoint::normalized: cannot normalize a zero or non-finite vector");
  }
  coords /= r;
  return SpherePoint(std::move(coords), dim_n);
}

AmbientVector complex_structure(const AmbientVector& v) {
  if (v.size() % 2 != 0) throw DimensionMismatchError("complex_structure: odd-length vector");
  AmbientVector out(v.size());
  for (Eigen::Index j = 0; j + 1 < v.size(); j += 2) {
    out[j] = -v[j + 1];
    out[j + 1] = v[j];
  }
  return out;
}

std::complex<double> hermitian_product(const AmbientVector& a, const AmbientVector& b) {
  if (a.size() != b.size() || a.size() % 2 != 0) {
    throw DimensionMismatchError("hermitian_product: incompatible vectors");
  }
  double re = 0.0, im = 0.0;
  for (Eigen::Index j = 0; j + 1 < a.size(); j += 2) {
    // a_j conj(b_j) with a_j = (ar, ai), b_j = (br, bi)
    re += a[j] * b[j] + a[j + 1] * b[j + 1];
    im += a[j + 1] * b[j] - a[j] * b[j + 1];
  }
  return {re, im};
}

AmbientVector complex_scale(std::complex<double> c, const AmbientVector& v) {
  if (v.size() % 2 != 0) throw DimensionMismatchError("complex_scale: odd-length vector");
  AmbientVector out(v.size());
  for (Eigen::Index j = 0; j + 1 < v.size(); j += 2) {
    out[j] = c.real() * v[j] - c.imag() * v[j + 1];
    out[j + 1] = c.real() * v[j + 1] + c.imag() * v[j];
  }
  return out;
}

Eigen::MatrixXd realify_complex_matrix(const Eigen::MatrixXcd& m) {
  const Eigen::Index k = m.rows();
  if (m.cols() != k) throw DimensionMismatchError("realify_complex_matrix: square input required");
  Eigen::MatrixXd out(2 * k, 2 * k);
  for (Eigen::Index r = 0; r < k; ++r) {
    for (Eigen::Index c = 0; c < k; ++c) {
      const double a = m(r, c).real();
      const double b = m(r, c).imag();
      out(2 * r, 2 * c) = a;
      out(2 * r, 2 * c + 1) = -b;
      out(2 * r + 1, 2 * c) = b;
      out(2 * r + 1, 2 * c + 1) = a;
    }
  }
  return out;
}

bool is_complex_unitary(const Eigen::MatrixXd& m, double tol) {
  if (m.rows() != m.cols() || m.rows() % 2 != 0) return false;
  const Eigen::Index d = m.rows();
  const Eigen::MatrixXd gram = m.transpose() * m;
  if ((gram - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() > tol) return false;
  // J in the same pairing convention
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index k = 0; k + 1 < d; k += 2) {
    j(k, k + 1) = -1.0;
    j(k + 1, k) = 1.0;
  }
  return ((m * j - j * m).cwiseAbs().maxCoeff() <= tol);
}

SpherePoint last_coordinate_pole(int n) { return coordinate_point(n, n); }

SpherePoint coordinate_point(int n, int complex_index) {
  if (complex_index < 0 || complex_index > n) {
    throw DimensionMismatchError("coordinate_point: index out of range");
  }
  AmbientVector v = AmbientVector::Zero(2 * n + 2);
  v[2 * complex_index] = 1.0;
  return SpherePoint(std::move(v), n);
}

}  // namespace crspectra
