#pragma once

#include <vector>

#include "crspectra/polynomial.hpp"
#include "crspectra/sphere_point.hpp"

namespace crspectra {

/// Reeb field of the standard contact form at z: xi(z) = J z. Tangent,
/// unit length, and theta_0(xi) = 1.
AmbientVector reeb_vector(const SpherePoint& z);

/// Standard contact form on an ambient vector: theta_0(v) = <J z, v>.
/// Vanishes exactly on the horizontal space.
double contact_form(const SpherePoint& z, const AmbientVector& v);

/// Orthogonal projection onto the Levi distribution H_z, the complement of
/// span{z, J z}: v - <v,z> z - <v,Jz> Jz. Idempotent.
AmbientVector horizontal_project(const SpherePoint& z, const AmbientVector& v);

/// Horizontal energy density of a polynomial field at z:
/// |grad u|^2 - <grad u, z>^2 - (xi u)^2, with grad the ambient Euclidean
/// gradient and xi u = <grad u, J z>. Equals |P_H grad u|^2 since the Levi
/// form of theta_0 is the round metric on H.
double horizontal_energy_density(const RealPolynomial& u, const SpherePoint& z);

/// Orthonormal tangent frame at z (2n+1 vectors). The first vector is the
/// Reeb direction J z; the remaining 2n span the horizontal space.
std::vector<AmbientVector> tangent_frame(const SpherePoint& z);

}  // namespace crspectra
