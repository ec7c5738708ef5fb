#pragma once

#include <string>
#include <variant>

#include "json.hpp"

#include "crspectra/moebius.hpp"
#include "crspectra/polynomial.hpp"
#include "crspectra/sphere_point.hpp"

namespace crspectra {

/// f = c.
struct ConstantFactor {
  double c = 1.0;
};

/// f(zeta) = scale / |cosh t + sinh t (zeta, pole)|^2 - the conformal factor
/// of dilation pullbacks, the family attaining equality in the spectral
/// bound.
struct ExtremalFactor {
  SpherePoint pole;
  double t = 0.0;
  double scale = 1.0;
};

/// f = exp(eps * g) for a polynomial g; positive by construction.
struct ExpPolyFactor {
  RealPolynomial g;
  double eps = 0.0;
};

/// f = h for a polynomial h; positivity is validated on the quadrature
/// nodes of the problem it enters.
struct PolyPositiveFactor {
  RealPolynomial h;
};

/// Strictly positive scalar field defining the conformal structure f theta_0.
class ConformalFactor {
 public:
  using Value = std::variant<ConstantFactor, ExtremalFactor, ExpPolyFactor, PolyPositiveFactor>;

  static ConformalFactor constant(double c);
  static ConformalFactor extremal(SpherePoint pole, double t, double scale = 1.0);
  static ConformalFactor exp_poly(RealPolynomial g, double eps);
  static ConformalFactor poly_positive(RealPolynomial h);

  double eval(const SpherePoint& z) const;

  /// The factor z -> f(U z); family parameters are transformed so the
  /// result stays inside the tagged union.
  ConformalFactor precomposed(const Eigen::MatrixXd& unitary) const;

  const Value& value() const { return value_; }
  int dim_n() const { return n_; }

  /// Short identifier for report rows.
  std::string id() const;

  nlohmann::json to_json() const;
  static ConformalFactor from_json(const nlohmann::json& j, int n);

  /// CLI forms: "constant", "constant:<c>", "extremal:<t>", or a JSON object.
  static ConformalFactor parse(const std::string& text, int n);

 private:
  ConformalFactor(Value value, int n) : value_(std::move(value)), n_(n) {}
  Value value_;
  int n_;
};

}  // namespace crspectra
