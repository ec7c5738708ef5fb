#include "crspectra/polynomial.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <numeric>
#include <sstream>

#include "crspectra/parallel.hpp"

namespace crspectra {

namespace {

double ipow(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

int degree_of(const MultiIndex& e) { return std::accumulate(e.begin(), e.end(), 0); }

}  // namespace

RealPolynomial::RealPolynomial(int ambient_dim) : ambient_dim_(ambient_dim) {
  if (ambient_dim_ < 2 || ambient_dim_ % 2 != 0) {
    throw DimensionMismatchError("RealPolynomial: ambient dimension must be even and >= 2");
  }
}

RealPolynomial RealPolynomial::constant(int ambient_dim, double c) {
  RealPolynomial p(ambient_dim);
  p.add_term(MultiIndex(ambient_dim, 0), c);
  return p;
}

RealPolynomial RealPolynomial::monomial(MultiIndex exponents, double coeff) {
  RealPolynomial p(static_cast<int>(exponents.size()));
  for (int e : exponents) {
    if (e < 0) throw ParseError("RealPolynomial: negative exponent");
  }
  p.add_term(exponents, coeff);
  return p;
}

RealPolynomial RealPolynomial::variable(int ambient_dim, int var) {
  if (var < 0 || var >= ambient_dim) throw DimensionMismatchError("variable index out of range");
  MultiIndex e(ambient_dim, 0);
  e[var] = 1;
  return monomial(std::move(e), 1.0);
}

int RealPolynomial::total_degree() const {
  int d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, degree_of(e));
  return d;
}

void RealPolynomial::add_term(const MultiIndex& exponents, double coeff) {
  if (static_cast<int>(exponents.size()) != ambient_dim_) {
    throw DimensionMismatchError("add_term: exponent length mismatch");
  }
  if (coeff == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(exponents, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second == 0.0) terms_.erase(it);
  }
}

RealPolynomial& RealPolynomial::operator+=(const RealPolynomial& rhs) {
  if (ambient_dim_ != rhs.ambient_dim_) throw DimensionMismatchError("polynomial add: dim mismatch");
  for (const auto& [e, c] : rhs.terms_) add_term(e, c);
  return *this;
}

RealPolynomial& RealPolynomial::operator-=(const RealPolynomial& rhs) {
  if (ambient_dim_ != rhs.ambient_dim_) throw DimensionMismatchError("polynomial sub: dim mismatch");
  for (const auto& [e, c] : rhs.terms_) add_term(e, -c);
  return *this;
}

RealPolynomial& RealPolynomial::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, c] : terms_) c *= s;
  return *this;
}

RealPolynomial operator*(const RealPolynomial& lhs, const RealPolynomial& rhs) {
  if (lhs.ambient_dim_ != rhs.ambient_dim_) {
    throw DimensionMismatchError("polynomial mul: dim mismatch");
  }
  RealPolynomial out(lhs.ambient_dim_);
  MultiIndex e(lhs.ambient_dim_, 0);
  for (const auto& [ea, ca] : lhs.terms_) {
    for (const auto& [eb, cb] : rhs.terms_) {
      for (int i = 0; i < lhs.ambient_dim_; ++i) e[i] = ea[i] + eb[i];
      out.add_term(e, ca * cb);
    }
  }
  return out;
}

double RealPolynomial::eval(const AmbientVector& x) const {
  if (x.size() != ambient_dim_) throw DimensionMismatchError("eval: point dimension mismatch");
  CompensatedSum sum;
  for (const auto& [e, c] : terms_) {
    double t = c;
    for (int i = 0; i < ambient_dim_; ++i) {
      if (e[i] != 0) t *= ipow(x[i], e[i]);
    }
    sum.add(t);
  }
  return sum.value();
}

AmbientVector RealPolynomial::eval_gradient(const AmbientVector& x) const {
  if (x.size() != ambient_dim_) throw DimensionMismatchError("eval_gradient: dimension mismatch");
  std::vector<CompensatedSum> acc(ambient_dim_);
  std::vector<int> active;
  std::vector<double> powers;
  for (const auto& [e, c] : terms_) {
    active.clear();
    for (int i = 0; i < ambient_dim_; ++i) {
      if (e[i] != 0) active.push_back(i);
    }
    // prefix/suffix products over the active variables keep the derivative
    // division-free at coordinate zeros
    const std::size_t k = active.size();
    powers.assign(k, 0.0);
    for (std::size_t a = 0; a < k; ++a) powers[a] = ipow(x[active[a]], e[active[a]]);
    std::vector<double> prefix(k + 1, 1.0), suffix(k + 1, 1.0);
    for (std::size_t a = 0; a < k; ++a) prefix[a + 1] = prefix[a] * powers[a];
    for (std::size_t a = k; a > 0; --a) suffix[a - 1] = suffix[a] * powers[a - 1];
    for (std::size_t a = 0; a < k; ++a) {
      const int var = active[a];
      const double d = c * e[var] * ipow(x[var], e[var] - 1) * prefix[a] * suffix[a + 1];
      acc[var].add(d);
    }
  }
  AmbientVector g(ambient_dim_);
  for (int i = 0; i < ambient_dim_; ++i) g[i] = acc[i].value();
  return g;
}

RealPolynomial partial_derivative(const RealPolynomial& u, int var) {
  if (var < 0 || var >= u.ambient_dim()) {
    throw DimensionMismatchError("partial_derivative: variable out of range");
  }
  RealPolynomial out(u.ambient_dim());
  MultiIndex e;
  for (const auto& [exps, c] : u.terms()) {
    if (exps[var] == 0) continue;
    e = exps;
    e[var] -= 1;
    out.add_term(e, c * exps[var]);
  }
  return out;
}

RealPolynomial reeb_derivative(const RealPolynomial& u) {
  if (u.ambient_dim() % 2 != 0) throw DimensionMismatchError("reeb_derivative: odd dimension");
  RealPolynomial out(u.ambient_dim());
  MultiIndex e;
  for (const auto& [exps, c] : u.terms()) {
    for (int j = 0; j + 1 < u.ambient_dim(); j += 2) {
      const int xv = j, yv = j + 1;
      if (exps[yv] > 0) {  // x_j d/dy_j
        e = exps;
        e[yv] -= 1;
        e[xv] += 1;
        out.add_term(e, c * exps[yv]);
      }
      if (exps[xv] > 0) {  // -y_j d/dx_j
        e = exps;
        e[xv] -= 1;
        e[yv] += 1;
        out.add_term(e, -c * exps[xv]);
      }
    }
  }
  return out;
}

long long binomial(int n, int k) {
  if (k < 0 || k > n || n < 0) return 0;
  k = std::min(k, n - k);
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double subelliptic_eigenvalue(BidegreeLabel label, int n) {
  if (n < 1 || label.p < 0 || label.q < 0) throw Error("subelliptic_eigenvalue: invalid arguments");
  return 2.0 * n * (label.p + label.q) + 4.0 * label.p * label.q;
}

double round_laplacian_consistency(BidegreeLabel label, int n) {
  if (n < 1 || label.p < 0 || label.q < 0) {
    throw Error("round_laplacian_consistency: invalid arguments");
  }
  const long long d = label.p + label.q;
  const long long diff = label.p - label.q;
  const long long value = d * (d + 2 * n) - diff * diff;
  const long long direct = 2LL * n * d + 4LL * label.p * label.q;
  if (value != direct) {
    throw Error("round_laplacian_consistency: eigenvalue routes disagree");
  }
  return static_cast<double>(value);
}

long bidegree_multiplicity(BidegreeLabel label, int n) {
  if (n < 1 || label.p < 0 || label.q < 0) throw Error("bidegree_multiplicity: invalid arguments");
  const long long full = binomial(n + label.p, label.p) * binomial(n + label.q, label.q);
  const long long lower =
      binomial(n + label.p - 1, label.p - 1) * binomial(n + label.q - 1, label.q - 1);
  return static_cast<long>(full - lower);
}

namespace {

void enumerate_degree(int dim, int var, int remaining, MultiIndex& e,
                      std::vector<RealPolynomial>& out) {
  if (var == dim - 1) {
    e[var] = remaining;
    out.push_back(RealPolynomial::monomial(e, 1.0));
    e[var] = 0;
    return;
  }
  for (int take = remaining; take >= 0; --take) {
    e[var] = take;
    enumerate_degree(dim, var + 1, remaining - take, e, out);
  }
  e[var] = 0;
}

}  // namespace

std::vector<RealPolynomial> monomial_basis(int n, int degree_cap) {
  if (n < 1) throw Error("monomial_basis: n must be >= 1");
  if (degree_cap < 1) throw Error("monomial_basis: degree cap must be >= 1");
  const int dim = 2 * n + 2;
  const long long count = binomial(dim + degree_cap, degree_cap);
  if (count > static_cast<long long>(kMonomialHardCap)) {
    throw BudgetExceededError("monomial_basis: " + std::to_string(count) +
                              " monomials exceeds the hard cap");
  }
  if (count > static_cast<long long>(kMonomialWarnCount)) {
    std::cerr << "crspectra: warning: monomial basis has " << count << " elements\n";
  }
  std::vector<RealPolynomial> out;
  out.reserve(static_cast<std::size_t>(count));
  MultiIndex e(dim, 0);
  for (int d = 0; d <= degree_cap; ++d) enumerate_degree(dim, 0, d, e, out);
  return out;
}

namespace {

struct Token {
  enum Kind { kNumber, kVariable, kPlus, kMinus, kStar } kind;
  double number = 0.0;
  int var = -1;
  int exponent = 1;
};

std::vector<Token> tokenize(std::string_view text, int ambient_dim) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  const auto fail = [&](const std::string& msg) {
    throw ParseError("polynomial parse error at offset " + std::to_string(i) + ": " + msg);
  };
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '+') {
      tokens.push_back({Token::kPlus});
      ++i;
      continue;
    }
    if (c == '-') {
      tokens.push_back({Token::kMinus});
      ++i;
      continue;
    }
    if (c == '*') {
      tokens.push_back({Token::kStar});
      ++i;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const std::string rest(text.substr(i));
      char* end = nullptr;
      const double value = std::strtod(rest.c_str(), &end);
      if (end == rest.c_str()) fail("expected a numeric coefficient");
      i += static_cast<std::size_t>(end - rest.c_str());
      tokens.push_back({Token::kNumber, value});
      continue;
    }
    if (c == 'x' || c == 'y') {
      ++i;
      std::size_t start = i;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
      if (i == start) fail("variable needs an index, e.g. x1");
      const int index = std::stoi(std::string(text.substr(start, i - start)));
      if (index < 1 || 2 * index > ambient_dim) fail("variable index out of range");
      int exponent = 1;
      if (i < text.size() && text[i] == '^') {
        ++i;
        start = i;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
        if (i == start) fail("exponent must be a nonnegative integer");
        exponent = std::stoi(std::string(text.substr(start, i - start)));
      }
      Token t{Token::kVariable};
      t.var = 2 * (index - 1) + (c == 'y' ? 1 : 0);
      t.exponent = exponent;
      tokens.push_back(t);
      continue;
    }
    fail(std::string("unexpected character '") + c + "'");
  }
  return tokens;
}

}  // namespace

RealPolynomial parse_polynomial(std::string_view text, int ambient_dim) {
  const std::vector<Token> tokens = tokenize(text, ambient_dim);
  RealPolynomial out(ambient_dim);
  std::size_t i = 0;
  bool any_term = false;
  while (i < tokens.size()) {
    double sign = 1.0;
    while (i < tokens.size() &&
           (tokens[i].kind == Token::kPlus || tokens[i].kind == Token::kMinus)) {
      if (tokens[i].kind == Token::kMinus) sign = -sign;
      ++i;
    }
    if (i >= tokens.size()) throw ParseError("polynomial parse error: dangling sign");
    double coeff = sign;
    MultiIndex e(ambient_dim, 0);
    bool saw_factor = false;
    while (i < tokens.size() && tokens[i].kind != Token::kPlus && tokens[i].kind != Token::kMinus) {
      const Token& t = tokens[i];
      if (t.kind == Token::kStar) {
        if (!saw_factor) throw ParseError("polynomial parse error: '*' without left factor");
        ++i;
        continue;
      }
      if (t.kind == Token::kNumber) {
        coeff *= t.number;
      } else {
        e[t.var] += t.exponent;
      }
      saw_factor = true;
      ++i;
    }
    if (!saw_factor) throw ParseError("polynomial parse error: empty term");
    out.add_term(e, coeff);
    any_term = true;
  }
  if (!any_term) throw ParseError("polynomial parse error: empty input");
  return out;
}

std::string format_polynomial(const RealPolynomial& u) {
  if (u.is_zero()) return "0";
  std::string out;
  char buf[64];
  bool first = true;
  for (const auto& [e, c] : u.terms()) {
    const double mag = std::abs(c);
    if (first) {
      out += (c < 0.0) ? "-" : "";
      first = false;
    } else {
      out += (c < 0.0) ? " - " : " + ";
    }
    std::snprintf(buf, sizeof(buf), "%.17g", mag);
    out += buf;
    for (int var = 0; var < u.ambient_dim(); ++var) {
      if (e[var] == 0) continue;
      out += ' ';
      out += (var % 2 == 0) ? 'x' : 'y';
      out += std::to_string(var / 2 + 1);
      if (e[var] > 1) {
        out += '^';
        out += std::to_string(e[var]);
      }
    }
  }
  return out;
}

RealPolynomial compose_linear(const RealPolynomial& u, const Eigen::MatrixXd& m) {
  const int dim = u.ambient_dim();
  if (m.rows() != dim || m.cols() != dim) {
    throw DimensionMismatchError("compose_linear: matrix does not match ambient dimension");
  }
  // images of the variables under x -> M x: row i of M as a linear form
  std::vector<RealPolynomial> images;
  images.reserve(dim);
  for (int i = 0; i < dim; ++i) {
    RealPolynomial lin(dim);
    for (int j = 0; j < dim; ++j) {
      if (m(i, j) != 0.0) {
        MultiIndex e(dim, 0);
        e[j] = 1;
        lin.add_term(e, m(i, j));
      }
    }
    images.push_back(std::move(lin));
  }
  RealPolynomial out(dim);
  for (const auto& [e, c] : u.terms()) {
    RealPolynomial term = RealPolynomial::constant(dim, c);
    for (int var = 0; var < dim; ++var) {
      for (int k = 0; k < e[var]; ++k) term = term * images[var];
    }
    out += term;
  }
  return out;
}

RealPolynomial random_polynomial(int ambient_dim, int max_degree, RandomStream& rng) {
  RealPolynomial out(ambient_dim);
  MultiIndex e(ambient_dim, 0);
  std::vector<RealPolynomial> monomials = monomial_basis(ambient_dim / 2 - 1, max_degree);
  for (const auto& mono : monomials) {
    out.add_term(mono.terms().begin()->first, rng.uniform(-1.0, 1.0));
  }
  return out;
}

}  // namespace crspectra
