#include "crspectra/moebius.hpp"

#include <cmath>
#include <string>

#include "crspectra/cr_geometry.hpp"

namespace crspectra {

namespace {

constexpr double kPoleTol = 1e-10;
constexpr double kUnitaryTol = 1e-12;

void validate_unitary(const std::optional<Eigen::MatrixXd>& u, int dim, const char* which) {
  if (!u) return;
  if (u->rows() != dim || u->cols() != dim) {
    throw DimensionMismatchError(std::string("CrAutomorphism: ") + which + " has wrong shape");
  }
  if (!is_complex_unitary(*u, kUnitaryTol)) {
    throw Error(std::string("CrAutomorphism: ") + which +
                " is not a J-commuting orthogonal matrix");
  }
}

}  // namespace

SiegelPoint::SiegelPoint(AmbientVector coords, int dim_n) : coords_(std::move(coords)), n_(dim_n) {
  if (coords_.size() != 2 * n_ + 2) throw DimensionMismatchError("SiegelPoint: bad length");
  double z_norm2 = 0.0;
  for (int j = 0; j < n_; ++j) z_norm2 += std::norm(complex_component(coords_, j));
  const double im_w = coords_[2 * n_ + 1];
  if (std::abs(im_w - z_norm2) > kBoundaryTol) {
    throw Error("SiegelPoint: Im w - |z|^2 = " + std::to_string(im_w - z_norm2) +
                " violates the boundary identity");
  }
}

CrAutomorphism::CrAutomorphism(SpherePoint pole, double t)
    : CrAutomorphism(std::move(pole), t, std::nullopt, std::nullopt) {}

CrAutomorphism::CrAutomorphism(SpherePoint pole, double t, std::optional<Eigen::MatrixXd> pre,
                               std::optional<Eigen::MatrixXd> post)
    : pole(std::move(pole)), t(t), pre_unitary(std::move(pre)), post_unitary(std::move(post)) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw Error("CrAutomorphism: t must be finite and >= 0");
  }
  validate_unitary(pre_unitary, this->pole.ambient_dim(), "pre_unitary");
  validate_unitary(post_unitary, this->pole.ambient_dim(), "post_unitary");
}

CrAutomorphism CrAutomorphism::identity(int n) {
  return CrAutomorphism(last_coordinate_pole(n), 0.0);
}

SiegelPoint cayley_to_siegel(const SpherePoint& z) {
  const int n = z.dim_n();
  const std::complex<double> last = complex_component(z.coords(), n);
  const std::complex<double> denom = 1.0 - last;
  if (std::abs(denom) < kPoleTol) {
    throw PoleSingularityError("cayley_to_siegel: point too close to e_{n+1}");
  }
  AmbientVector out(2 * n + 2);
  for (int j = 0; j < n; ++j) {
    set_complex_component(out, j, complex_component(z.coords(), j) / denom);
  }
  set_complex_component(out, n, std::complex<double>(0.0, 1.0) * (1.0 + last) / denom);
  return SiegelPoint(std::move(out), n);
}

SpherePoint cayley_to_sphere(const SiegelPoint& s) {
  const int n = s.dim_n();
  const std::complex<double> i(0.0, 1.0);
  const std::complex<double> denom = s.w() + i;
  if (std::abs(denom) < kPoleTol) {
    throw PoleSingularityError("cayley_to_sphere: w too close to -i");
  }
  AmbientVector out(2 * n + 2);
  for (int j = 0; j < n; ++j) set_complex_component(out, j, 2.0 * i * s.z(j) / denom);
  set_complex_component(out, n, (s.w() - i) / denom);
  // the image is on the sphere identically; renormalize rounding drift
  return SpherePoint::normalized(std::move(out), n);
}

namespace {

/// gamma_t^p in Hermitian-product form, on raw coordinates.
AmbientVector dilation_apply(const SpherePoint& pole, double t, const AmbientVector& z) {
  const double ch = std::cosh(t);
  const double sh = std::sinh(t);
  const std::complex<double> zp = hermitian_product(z, pole.coords());
  const std::complex<double> denom = ch + sh * zp;
  // |(zeta,p)| <= 1 and cosh t > sinh t >= 0 keep the denominator away
  // from zero for all t >= 0
  if (std::abs(denom) <= 1e-14) {
    throw Error("dilation_apply: vanishing denominator (should be impossible)");
  }
  const std::complex<double> along_pole = sh + (ch - 1.0) * zp;
  const AmbientVector numerator = z + complex_scale(along_pole, pole.coords());
  return complex_scale(1.0 / denom, numerator);
}

}  // namespace

SpherePoint apply(const CrAutomorphism& g, const SpherePoint& z) {
  if (z.ambient_dim() != g.pole.ambient_dim()) {
    throw DimensionMismatchError("apply: point/automorphism dimension mismatch");
  }
  AmbientVector v = z.coords();
  if (g.pre_unitary) v = (*g.pre_unitary) * v;
  v = dilation_apply(g.pole, g.t, v);
  if (g.post_unitary) v = (*g.post_unitary) * v;
  return SpherePoint::normalized(std::move(v), z.dim_n());
}

double apply_sphere_drift(const CrAutomorphism& g, const SpherePoint& z) {
  AmbientVector v = z.coords();
  if (g.pre_unitary) v = (*g.pre_unitary) * v;
  v = dilation_apply(g.pole, g.t, v);
  if (g.post_unitary) v = (*g.post_unitary) * v;
  return std::abs(v.norm() - 1.0);
}

double pullback_factor(const CrAutomorphism& g, const SpherePoint& z) {
  if (z.ambient_dim() != g.pole.ambient_dim()) {
    throw DimensionMismatchError("pullback_factor: dimension mismatch");
  }
  AmbientVector v = z.coords();
  if (g.pre_unitary) v = (*g.pre_unitary) * v;
  const std::complex<double> zp = hermitian_product(v, g.pole.coords());
  const std::complex<double> denom = std::cosh(g.t) + std::sinh(g.t) * zp;
  return 1.0 / std::norm(denom);
}

double pullback_residual(const CrAutomorphism& g, const SpherePoint& z, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw Error("pullback_residual: bad step");
  const double factor = pullback_factor(g, z);
  const SpherePoint image = apply(g, z);
  const AmbientVector j_image = complex_structure(image.coords());
  double worst = 0.0;
  for (const AmbientVector& v : tangent_frame(z)) {
    // central difference of g along the great circle cos(s) z + sin(s) v
    const auto at = [&](double s) {
      return apply(g, SpherePoint::normalized(std::cos(s) * z.coords() + std::sin(s) * v,
                                              z.dim_n()));
    };
    const AmbientVector dg = (at(h).coords() - at(-h).coords()) / (2.0 * h);
    const double lhs = j_image.dot(dg);
    const double rhs = factor * contact_form(z, v);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

Eigen::MatrixXd unitary_to_pole(const SpherePoint& p) {
  const int n = p.dim_n();
  const int k = n + 1;
  Eigen::VectorXcd pc(k);
  for (int j = 0; j < k; ++j) pc[j] = complex_component(p.coords(), j);

  // phase-align the last component so the Householder swap is exact
  const std::complex<double> last = pc[k - 1];
  std::complex<double> phase(1.0, 0.0);
  if (std::abs(last) > 0.0) phase = std::conj(last) / std::abs(last);
  Eigen::VectorXcd aligned = phase * pc;

  Eigen::VectorXcd target = Eigen::VectorXcd::Zero(k);
  target[k - 1] = 1.0;
  const Eigen::VectorXcd v = aligned - target;
  const double v2 = v.squaredNorm();
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(k, k) * phase;
  if (v2 > 1e-28) {
    const Eigen::MatrixXcd householder =
        Eigen::MatrixXcd::Identity(k, k) - (2.0 / v2) * (v * v.adjoint());
    u = householder * phase;
  }
  return realify_complex_matrix(u);
}

SpherePoint AutomorphismChain::apply(const SpherePoint& z) const {
  SpherePoint out = z;
  for (const auto& g : stages) out = crspectra::apply(g, out);
  return out;
}

double AutomorphismChain::pullback_factor(const SpherePoint& z) const {
  double factor = 1.0;
  SpherePoint at = z;
  for (const auto& g : stages) {
    factor *= crspectra::pullback_factor(g, at);
    at = crspectra::apply(g, at);
  }
  return factor;
}

AutomorphismChain compose(const CrAutomorphism& outer, const CrAutomorphism& inner) {
  if (outer.pole.ambient_dim() != inner.pole.ambient_dim()) {
    throw DimensionMismatchError("compose: dimension mismatch");
  }
  return AutomorphismChain{{inner, outer}};
}

nlohmann::json to_json(const CrAutomorphism& g) {
  nlohmann::json j;
  j["pole"] = std::vector<double>(g.pole.coords().data(),
                                  g.pole.coords().data() + g.pole.coords().size());
  j["t"] = g.t;
  return j;
}

CrAutomorphism automorphism_from_json(const nlohmann::json& j, int n) {
  if (!j.contains("pole") || !j.contains("t")) {
    throw ParseError("automorphism JSON must have 'pole' and 't'");
  }
  const auto coords = j.at("pole").get<std::vector<double>>();
  if (static_cast<int>(coords.size()) != 2 * n + 2) {
    throw ParseError("automorphism JSON: pole has wrong length");
  }
  AmbientVector v = Eigen::Map<const AmbientVector>(coords.data(), coords.size());
  return CrAutomorphism(SpherePoint(std::move(v), n), j.at("t").get<double>());
}

}  // namespace crspectra
