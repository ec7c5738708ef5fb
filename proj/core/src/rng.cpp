#include "crspectra/rng.hpp"

#include <cmath>
#include <complex>

namespace crspectra {

double RandomStream::uniform() {
  // 53-bit mantissa from the top bits of the raw draw.
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * M_PI * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

SpherePoint random_sphere_point(int n, RandomStream& rng) {
  const int dim = 2 * n + 2;
  AmbientVector v(dim);
  for (;;) {
    for (int i = 0; i < dim; ++i) v[i] = rng.gaussian();
    const double r = v.norm();
    if (r > 1e-8) return SpherePoint::normalized(std::move(v), n);
  }
}

Eigen::MatrixXd random_unitary(int n, RandomStream& rng) {
  const int k = n + 1;
  Eigen::MatrixXcd m(k, k);
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < k; ++c) m(r, c) = std::complex<double>(rng.gaussian(), rng.gaussian());
  }
  // Modified Gram-Schmidt; Gaussian columns are almost surely independent,
  // retry the whole draw in the degenerate case.
  for (int c = 0; c < k; ++c) {
    for (int prev = 0; prev < c; ++prev) {
      const std::complex<double> proj = m.col(prev).adjoint() * m.col(c);
      m.col(c) -= proj * m.col(prev);
    }
    const double norm = m.col(c).norm();
    if (norm < 1e-10) return random_unitary(n, rng);
    m.col(c) /= norm;
  }
  return realify_complex_matrix(m);
}

}  // namespace crspectra
