#include "crspectra/cr_geometry.hpp"

#include <cmath>

namespace crspectra {

AmbientVector reeb_vector(const SpherePoint& z) { return complex_structure(z.coords()); }

double contact_form(const SpherePoint& z, const AmbientVector& v) {
  if (v.size() != z.ambient_dim()) throw DimensionMismatchError("contact_form: dim mismatch");
  return complex_structure(z.coords()).dot(v);
}

AmbientVector horizontal_project(const SpherePoint& z, const AmbientVector& v) {
  if (v.size() != z.ambient_dim()) throw DimensionMismatchError("horizontal_project: dim mismatch");
  const AmbientVector& zc = z.coords();
  const AmbientVector jz = complex_structure(zc);
  return v - v.dot(zc) * zc - v.dot(jz) * jz;
}

double horizontal_energy_density(const RealPolynomial& u, const SpherePoint& z) {
  if (u.ambient_dim() != z.ambient_dim()) {
    throw DimensionMismatchError("horizontal_energy_density: dim mismatch");
  }
  const AmbientVector grad = u.eval_gradient(z);
  const double radial = grad.dot(z.coords());
  const double reeb = grad.dot(complex_structure(z.coords()));
  return grad.squaredNorm() - radial * radial - reeb * reeb;
}

std::vector<AmbientVector> tangent_frame(const SpherePoint& z) {
  const int dim = z.ambient_dim();
  std::vector<AmbientVector> frame;
  frame.reserve(dim - 1);
  frame.push_back(complex_structure(z.coords()));
  // complete by Gram-Schmidt over the ambient axes, skipping near-dependence
  std::vector<AmbientVector> span;
  span.push_back(z.coords());
  span.push_back(frame[0]);
  for (int axis = 0; axis < dim && static_cast<int>(frame.size()) < dim - 1; ++axis) {
    AmbientVector v = AmbientVector::Zero(dim);
    v[axis] = 1.0;
    for (const auto& s : span) v -= v.dot(s) * s;
    const double norm = v.norm();
    if (norm < 1e-8) continue;
    v /= norm;
    // second pass for orthogonality at full precision
    for (const auto& s : span) v -= v.dot(s) * s;
    v.normalize();
    span.push_back(v);
    frame.push_back(std::move(v));
  }
  return frame;
}

}  // namespace crspectra
