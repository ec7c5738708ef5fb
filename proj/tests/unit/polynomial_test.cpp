#include <cmath>

#include "doctest.h"

#include <Eigen/Dense>

#include "crspectra/polynomial.hpp"
#include "crspectra/quadrature.hpp"
#include "crspectra/rng.hpp"

using namespace crspectra;

TEST_SUITE_BEGIN("polynomial");

TEST_CASE("evaluation basics") {
  const RealPolynomial one = RealPolynomial::constant(4, 1.0);
  RandomStream rng(1);
  for (int k = 0; k < 5; ++k) CHECK(one.eval(random_sphere_point(1, rng)) == 1.0);

  // sum of |zeta_j|^2 is 1 on the sphere
  RealPolynomial r2(4);
  for (int v = 0; v < 4; ++v) {
    MultiIndex e(4, 0);
    e[v] = 2;
    r2.add_term(e, 1.0);
  }
  for (int k = 0; k < 5; ++k) {
    CHECK(r2.eval(random_sphere_point(1, rng)) == doctest::Approx(1.0).epsilon(1e-14));
  }

  // x1 * y2 at a rational point
  RealPolynomial m(4);
  m.add_term({1, 0, 0, 1}, 1.0);
  AmbientVector p(4);
  p << 0.5, 0.5, 0.5, 0.5;
  CHECK(m.eval(p) == doctest::Approx(0.25));

  AmbientVector wrong(6);
  CHECK_THROWS_AS(one.eval(wrong), DimensionMismatchError);
}

TEST_CASE("partial derivatives are exact and match finite differences") {
  // d/dx1 (x1^2) = 2 x1
  RealPolynomial sq(4);
  sq.add_term({2, 0, 0, 0}, 1.0);
  RealPolynomial expect(4);
  expect.add_term({1, 0, 0, 0}, 2.0);
  CHECK(partial_derivative(sq, 0) == expect);
  CHECK(partial_derivative(RealPolynomial::constant(4, 4.0), 2).is_zero());

  RandomStream rng(2);
  const RealPolynomial u = random_polynomial(4, 4, rng);
  const double h = 1e-6;
  for (int k = 0; k < 20; ++k) {
    AmbientVector x(4);
    for (int i = 0; i < 4; ++i) x[i] = rng.uniform(-1.0, 1.0);
    for (int var = 0; var < 4; ++var) {
      AmbientVector xp = x, xm = x;
      xp[var] += h;
      xm[var] -= h;
      const double fd = (u.eval(xp) - u.eval(xm)) / (2.0 * h);
      CHECK(partial_derivative(u, var).eval(x) == doctest::Approx(fd).epsilon(1e-7).scale(1.0));
    }
  }
}

TEST_CASE("reeb derivative on bidegree representatives") {
  // xi(Re zeta_1) = -Im zeta_1
  const RealPolynomial x1 = RealPolynomial::variable(4, 0);
  RealPolynomial minus_y1(4);
  minus_y1.add_term({0, 1, 0, 0}, -1.0);
  CHECK(reeb_derivative(x1) == minus_y1);

  // |zeta_1|^2 has p = q, so xi kills it
  RealPolynomial z1sq(4);
  z1sq.add_term({2, 0, 0, 0}, 1.0);
  z1sq.add_term({0, 2, 0, 0}, 1.0);
  CHECK(reeb_derivative(z1sq).is_zero());

  // Re(zeta_1 conj(zeta_2)) = x1 x2 + y1 y2 has (p, q) = (1, 1): xi^2 = 0
  RealPolynomial u(4);
  u.add_term({1, 0, 1, 0}, 1.0);
  u.add_term({0, 1, 0, 1}, 1.0);
  CHECK(reeb_derivative(reeb_derivative(u)).is_zero());
}

TEST_CASE("reeb squared acts as -(p-q)^2 on real forms of V^{p,q}") {
  // Re(zeta_1^2 conj(zeta_2)): bidegree (2,1), harmonic; xi^2 = -(2-1)^2
  // zeta_1^2 conj(zeta_2) expanded in real coordinates
  RealPolynomial re(4);                  // Re = (x1^2 - y1^2) x2 + 2 x1 y1 y2
  re.add_term({2, 0, 1, 0}, 1.0);
  re.add_term({0, 2, 1, 0}, -1.0);
  re.add_term({1, 1, 0, 1}, 2.0);
  const RealPolynomial xi2 = reeb_derivative(reeb_derivative(re));
  CHECK(xi2 == re * -1.0);
}

namespace {

/// Integer coefficients keep every derivative/product/sum exact in doubles,
/// so the algebraic identities below can be checked with tolerance-free ==.
RealPolynomial random_integer_polynomial(int dim, int max_degree, RandomStream& rng) {
  RealPolynomial out(dim);
  for (const auto& mono : monomial_basis(dim / 2 - 1, max_degree)) {
    const double c = std::floor(rng.uniform(-4.0, 5.0));
    out.add_term(mono.terms().begin()->first, c);
  }
  return out;
}

}  // namespace

TEST_CASE("linearity and leibniz rule hold at coefficient level") {
  RandomStream rng(3);
  for (int k = 0; k < 10; ++k) {
    const RealPolynomial a = random_integer_polynomial(4, 3, rng);
    const RealPolynomial b = random_integer_polynomial(4, 3, rng);
    CHECK(reeb_derivative(a + b) == reeb_derivative(a) + reeb_derivative(b));
    CHECK(partial_derivative(a + b, 1) == partial_derivative(a, 1) + partial_derivative(b, 1));
    CHECK(reeb_derivative(a * b) == a * reeb_derivative(b) + reeb_derivative(a) * b);
    CHECK(partial_derivative(a * b, 2) ==
          a * partial_derivative(b, 2) + partial_derivative(a, 2) * b);
  }
}

TEST_CASE("reeb annihilates polynomials in the pair norms") {
  // random polynomial in r_j = x_j^2 + y_j^2
  RandomStream rng(4);
  RealPolynomial r1(4), r2(4);
  r1.add_term({2, 0, 0, 0}, 1.0);
  r1.add_term({0, 2, 0, 0}, 1.0);
  r2.add_term({0, 0, 2, 0}, 1.0);
  r2.add_term({0, 0, 0, 2}, 1.0);
  for (int k = 0; k < 5; ++k) {
    RealPolynomial u = RealPolynomial::constant(4, rng.uniform(-1.0, 1.0));
    u += rng.uniform(-1.0, 1.0) * r1;
    u += rng.uniform(-1.0, 1.0) * r2;
    u += rng.uniform(-1.0, 1.0) * (r1 * r2);
    u += rng.uniform(-1.0, 1.0) * (r1 * r1);
    CHECK(reeb_derivative(u).is_zero());
  }
}

TEST_CASE("eigenvalue formulas") {
  CHECK(subelliptic_eigenvalue({1, 0}, 1) == 2.0);
  CHECK(subelliptic_eigenvalue({0, 0}, 3) == 0.0);
  CHECK(subelliptic_eigenvalue({1, 1}, 1) == 8.0);

  CHECK(round_laplacian_consistency({1, 0}, 1) == 2.0);
  CHECK(round_laplacian_consistency({1, 1}, 1) == 8.0);
  CHECK(round_laplacian_consistency({2, 0}, 1) == 4.0);

  for (int n = 1; n <= 3; ++n) {
    for (int p = 0; p + 0 <= 10; ++p) {
      for (int q = 0; p + q <= 10; ++q) {
        CHECK(subelliptic_eigenvalue({p, q}, n) == round_laplacian_consistency({p, q}, n));
      }
    }
  }
}

namespace {

/// Brute-force dim V^{p,q}: rank of the kernel of the ambient Laplacian
/// 4 sum_j d/dzeta_j d/dconj(zeta_j) on the complex monomials of bidegree
/// (p, q). The operator maps bidegree (p, q) onto (p-1, q-1) with integer
/// matrix entries 4 a_j b_j, so the kernel dimension is exact.
long brute_force_bidegree_dim(int p, int q, int n) {
  // enumerate multi-indices of length n+1 summing to d
  const auto enumerate = [&](int d) {
    std::vector<std::vector<int>> out;
    std::vector<int> e(n + 1, 0);
    const auto rec = [&](auto&& self, int var, int remaining) -> void {
      if (var == n) {
        e[var] = remaining;
        out.push_back(e);
        return;
      }
      for (int take = remaining; take >= 0; --take) {
        e[var] = take;
        self(self, var + 1, remaining - take);
      }
    };
    rec(rec, 0, d);
    return out;
  };
  const auto alphas = enumerate(p);
  const auto betas = enumerate(q);
  const auto lower_alphas = enumerate(p - 1 >= 0 ? p - 1 : 0);
  const auto lower_betas = enumerate(q - 1 >= 0 ? q - 1 : 0);
  const long dim = static_cast<long>(alphas.size() * betas.size());
  if (p == 0 || q == 0) return dim;  // Laplacian vanishes identically

  const auto index_of = [](const std::vector<std::vector<int>>& list,
                           const std::vector<int>& e) {
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (list[i] == e) return static_cast<long>(i);
    }
    return -1L;
  };

  Eigen::MatrixXd lap(static_cast<long>(lower_alphas.size() * lower_betas.size()), dim);
  lap.setZero();
  long col = 0;
  for (const auto& a : alphas) {
    for (const auto& b : betas) {
      for (int j = 0; j <= n; ++j) {
        if (a[j] == 0 || b[j] == 0) continue;
        auto a2 = a, b2 = b;
        a2[j] -= 1;
        b2[j] -= 1;
        const long row = index_of(lower_alphas, a2) * static_cast<long>(lower_betas.size()) +
                         index_of(lower_betas, b2);
        lap(row, col) += 4.0 * a[j] * b[j];
      }
      ++col;
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(lap);
  return dim - static_cast<long>(lu.rank());
}

}  // namespace

TEST_CASE("bidegree multiplicity matches the brute-force harmonic kernel") {
  CHECK(bidegree_multiplicity({1, 0}, 1) == 2);
  CHECK(bidegree_multiplicity({1, 1}, 1) == 3);
  CHECK(bidegree_multiplicity({0, 0}, 1) == 1);
  CHECK(bidegree_multiplicity({0, 0}, 4) == 1);
  for (int n = 1; n <= 2; ++n) {
    for (int p = 0; p <= 6; ++p) {
      for (int q = 0; p + q <= 6; ++q) {
        CHECK(bidegree_multiplicity({p, q}, n) == brute_force_bidegree_dim(p, q, n));
      }
    }
  }
}

TEST_CASE("monomial basis counts and restricted Gram ranks") {
  CHECK(monomial_basis(1, 1).size() == 5);  // {1, x1, y1, x2, y2}
  CHECK(monomial_basis(1, 4).size() == 70);
  CHECK(monomial_basis(2, 2).size() == 28);

  // graded order: lower-degree bases are prefixes of higher-degree ones
  const auto b2 = monomial_basis(1, 2);
  const auto b4 = monomial_basis(1, 4);
  for (std::size_t i = 0; i < b2.size(); ++i) CHECK(b2[i] == b4[i]);

  // rank of the restricted Gram matrix = sum of spherical-harmonic
  // dimensions (d+1)^2 on S^3
  const QuadratureRule rule = product_rule_s3(10);
  const auto rank_of = [&](int degree) {
    const auto basis = monomial_basis(1, degree);
    const Eigen::Index k = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXd gram(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
      for (Eigen::Index j = i; j < k; ++j) {
        gram(i, j) = gram(j, i) = integrate(
            [&](const SpherePoint& z) { return basis[i].eval(z) * basis[j].eval(z); }, rule);
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    const double cutoff = 1e-10 * es.eigenvalues().maxCoeff();
    return (es.eigenvalues().array() > cutoff).count();
  };
  CHECK(rank_of(2) == 14);  // 1 + 4 + 9
  CHECK(rank_of(4) == 55);  // 1 + 4 + 9 + 16 + 25
}

TEST_CASE("monomial budget: hard cap throws before enumeration") {
  // C(22,14) = 319770 raw monomials for n = 3, D = 14
  CHECK_THROWS_AS(monomial_basis(3, 14), BudgetExceededError);
  CHECK_THROWS_AS(monomial_basis(1, 0), Error);
}

TEST_CASE("text format round trip and rejection") {
  const RealPolynomial u = parse_polynomial("1.5 * x1^2 y2 - 0.25 * y1 + 2", 4);
  CHECK(u.term_count() == 3);
  AmbientVector p(4);
  p << 0.5, 1.0, 0.0, 2.0;
  CHECK(u.eval(p) == doctest::Approx(1.5 * 0.25 * 2.0 - 0.25 + 2.0));

  const RealPolynomial back = parse_polynomial(format_polynomial(u), 4);
  CHECK(back == u);

  CHECK_THROWS_AS(parse_polynomial("abc * x1", 4), ParseError);
  CHECK_THROWS_AS(parse_polynomial("1.5 * x1^-2", 4), ParseError);
  CHECK_THROWS_AS(parse_polynomial("x9", 4), ParseError);
  CHECK_THROWS_AS(parse_polynomial("", 4), ParseError);
  CHECK_THROWS_AS(parse_polynomial("1.0 + ", 4), ParseError);
}

TEST_CASE("compose_linear substitutes variables") {
  RandomStream rng(5);
  const RealPolynomial u = random_polynomial(4, 3, rng);
  const Eigen::MatrixXd m = random_unitary(1, rng);
  const RealPolynomial composed = compose_linear(u, m);
  for (int k = 0; k < 20; ++k) {
    const SpherePoint z = random_sphere_point(1, rng);
    const AmbientVector mz = m * z.coords();
    CHECK(composed.eval(z.coords()) == doctest::Approx(u.eval(mz)).epsilon(1e-12).scale(1.0));
  }
}

TEST_SUITE_END();
