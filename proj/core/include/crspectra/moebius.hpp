#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "json.hpp"

#include "crspectra/sphere_point.hpp"

namespace crspectra {

/// Point of the Siegel domain boundary: (z, w) in C^n x C with Im w = |z|^2,
/// stored as 2n+2 reals in the usual pairing.
class SiegelPoint {
 public:
  /// Validates the boundary identity Im w = |z|^2 within 1e-10.
  SiegelPoint(AmbientVector coords, int dim_n);

  const AmbientVector& coords() const { return coords_; }
  int dim_n() const { return n_; }
  std::complex<double> w() const { return complex_component(coords_, n_); }
  std::complex<double> z(int j) const { return complex_component(coords_, j); }

  static constexpr double kBoundaryTol = 1e-10;

 private:
  AmbientVector coords_;
  int n_;
};

/// The CR automorphism post * gamma_t^pole * pre, where gamma_t^p is the
/// one-parameter dilation group fixing +/-p and pre/post are optional
/// realified unitaries. t >= 0; negative dilations are reached via pole -p.
struct CrAutomorphism {
  CrAutomorphism(SpherePoint pole, double t);
  CrAutomorphism(SpherePoint pole, double t, std::optional<Eigen::MatrixXd> pre_unitary,
                 std::optional<Eigen::MatrixXd> post_unitary);

  SpherePoint pole;
  double t;
  std::optional<Eigen::MatrixXd> pre_unitary;
  std::optional<Eigen::MatrixXd> post_unitary;

  static CrAutomorphism identity(int n);
};

/// Cayley-type diffeomorphism onto the Siegel boundary:
/// Phi(zeta) = (zeta_1, ..., zeta_n, i(1+zeta_{n+1})) / (1 - zeta_{n+1}).
/// Throws PoleSingularityError within 1e-10 of e_{n+1}.
SiegelPoint cayley_to_siegel(const SpherePoint& z);

/// Inverse map Phi^{-1}(z, w) = (2i z_1, ..., 2i z_n, w - i) / (w + i).
/// Throws PoleSingularityError when |w + i| < 1e-10.
SpherePoint cayley_to_sphere(const SiegelPoint& s);

/// Evaluates the automorphism. The dilation in Hermitian-product form:
/// gamma_t^p(zeta) = {zeta + (sinh t + (cosh t - 1)(zeta,p)) p}
///                   / (cosh t + sinh t (zeta,p)).
SpherePoint apply(const CrAutomorphism& g, const SpherePoint& z);

/// | |g(z)| - 1 | before the renormalization inside apply(); diagnostic for
/// the sphere-preservation property.
double apply_sphere_drift(const CrAutomorphism& g, const SpherePoint& z);

/// Conformal factor of the pullback g^* theta_0 at z:
/// 1 / |cosh t + sinh t (zeta', pole)|^2 with zeta' = pre * z.
/// Unitary conjugations contribute factor 1.
double pullback_factor(const CrAutomorphism& g, const SpherePoint& z);

/// Finite-difference check of the pullback identity: max over a tangent
/// frame at z of |theta_0(dg(v)) - pullback_factor(g,z) theta_0(v)|, with dg
/// approximated by central differences along great circles with step h.
double pullback_residual(const CrAutomorphism& g, const SpherePoint& z, double h);

/// A realified unitary commuting with J that maps p to e_{n+1}: a complex
/// Householder reflection about (p' - e_{n+1}) composed with the phase
/// rotation aligning p_{n+1} (p' is the phase-aligned pole). Identity when
/// p = e_{n+1}.
Eigen::MatrixXd unitary_to_pole(const SpherePoint& p);

/// General compositions are kept as application pipelines; closed-form
/// CrAutomorphism records do not exist for mixed poles.
struct AutomorphismChain {
  std::vector<CrAutomorphism> stages;  // applied in order, stages[0] first

  SpherePoint apply(const SpherePoint& z) const;
  /// Cocycle product: factor(g_0, z) * factor(g_1, g_0(z)) * ...
  double pullback_factor(const SpherePoint& z) const;
};

/// Chain computing outer(inner(z)).
AutomorphismChain compose(const CrAutomorphism& outer, const CrAutomorphism& inner);

nlohmann::json to_json(const CrAutomorphism& g);
CrAutomorphism automorphism_from_json(const nlohmann::json& j, int n);

}  // namespace crspectra
