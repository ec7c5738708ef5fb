#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "crspectra/rng.hpp"
#include "crspectra/sphere_point.hpp"

namespace crspectra {

/// Exponent multi-index over the 2n+2 ambient variables
/// (x_1, y_1, ..., x_{n+1}, y_{n+1}).
using MultiIndex = std::vector<int>;

/// Bidegree (p, q) of a harmonic-polynomial space V^{p,q}.
struct BidegreeLabel {
  int p = 0;
  int q = 0;
};

/// Sparse real polynomial in the ambient variables. Terms are kept in a
/// lexicographically ordered map with no zero coefficients stored, so
/// iteration order (and every downstream matrix assembly) is deterministic.
class RealPolynomial {
 public:
  explicit RealPolynomial(int ambient_dim);

  static RealPolynomial constant(int ambient_dim, double c);
  static RealPolynomial monomial(MultiIndex exponents, double coeff);
  /// The coordinate function of variable `var` (0-based real index).
  static RealPolynomial variable(int ambient_dim, int var);

  int ambient_dim() const { return ambient_dim_; }
  const std::map<MultiIndex, double>& terms() const { return terms_; }
  std::size_t term_count() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  int total_degree() const;

  /// Merges the coefficient in; exact zeros are dropped.
  void add_term(const MultiIndex& exponents, double coeff);

  RealPolynomial& operator+=(const RealPolynomial& rhs);
  RealPolynomial& operator-=(const RealPolynomial& rhs);
  RealPolynomial& operator*=(double s);

  friend RealPolynomial operator+(RealPolynomial lhs, const RealPolynomial& rhs) {
    lhs += rhs;
    return lhs;
  }
  friend RealPolynomial operator-(RealPolynomial lhs, const RealPolynomial& rhs) {
    lhs -= rhs;
    return lhs;
  }
  friend RealPolynomial operator*(RealPolynomial lhs, double s) {
    lhs *= s;
    return lhs;
  }
  friend RealPolynomial operator*(double s, RealPolynomial rhs) {
    rhs *= s;
    return rhs;
  }
  friend RealPolynomial operator*(const RealPolynomial& lhs, const RealPolynomial& rhs);

  bool operator==(const RealPolynomial& rhs) const {
    return ambient_dim_ == rhs.ambient_dim_ && terms_ == rhs.terms_;
  }

  /// Compensated-summation evaluation at an ambient point.
  double eval(const AmbientVector& x) const;
  double eval(const SpherePoint& z) const { return eval(z.coords()); }

  /// Ambient Euclidean gradient at x.
  AmbientVector eval_gradient(const AmbientVector& x) const;
  AmbientVector eval_gradient(const SpherePoint& z) const { return eval_gradient(z.coords()); }

 private:
  std::map<MultiIndex, double> terms_;
  int ambient_dim_;
};

/// Exact symbolic partial derivative with respect to variable `var`.
RealPolynomial partial_derivative(const RealPolynomial& u, int var);

/// Exact Reeb derivative: xi u = sum_j (x_j d/dy_j - y_j d/dx_j) u.
RealPolynomial reeb_derivative(const RealPolynomial& u);

/// Sub-Laplacian eigenvalue on V^{p,q} for S^{2n+1}: 2n(p+q) + 4pq.
double subelliptic_eigenvalue(BidegreeLabel label, int n);

/// The same eigenvalue through the Laplace-Beltrami route
/// d(d+2n) - (p-q)^2 with d = p+q; throws if the two routes disagree.
double round_laplacian_consistency(BidegreeLabel label, int n);

/// dim V^{p,q} by inclusion-exclusion:
/// binom(n+p,p) binom(n+q,q) - binom(n+p-1,p-1) binom(n+q-1,q-1).
long bidegree_multiplicity(BidegreeLabel label, int n);

/// Binomial coefficient; zero for k < 0 or k > n.
long long binomial(int n, int k);

/// All monomials of total degree <= degree_cap in 2n+2 variables, in graded
/// lexicographic order so bases for increasing caps nest as prefixes.
/// Warns on stderr beyond 20000 monomials; throws BudgetExceededError beyond
/// the hard cap.
std::vector<RealPolynomial> monomial_basis(int n, int degree_cap);

inline constexpr std::size_t kMonomialWarnCount = 20000;
inline constexpr std::size_t kMonomialHardCap = 200000;

/// Parses the CLI text format: sum of terms "coeff * x1^a y1^b ...".
/// Rejects non-numeric coefficients and negative exponents.
RealPolynomial parse_polynomial(std::string_view text, int ambient_dim);

/// Inverse of parse_polynomial (17 significant digits, deterministic order).
std::string format_polynomial(const RealPolynomial& u);

/// Substitution x -> M x (exact coefficient arithmetic up to rounding).
RealPolynomial compose_linear(const RealPolynomial& u, const Eigen::MatrixXd& m);

/// Dense random polynomial of total degree <= max_degree with coefficients
/// uniform in [-1, 1).
RealPolynomial random_polynomial(int ambient_dim, int max_degree, RandomStream& rng);

}  // namespace crspectra
