#include "crspectra/quadrature.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "crspectra/parallel.hpp"
#include "crspectra/rng.hpp"

namespace crspectra {

double QuadratureRule::total_weight() const {
  CompensatedSum sum;
  for (Eigen::Index i = 0; i < weights.size(); ++i) sum.add(weights[i]);
  return sum.value();
}

double round_volume(int n) {
  if (n < 1) throw Error("round_volume: n must be >= 1");
  double factorial = 1.0;
  for (int k = 2; k <= n; ++k) factorial *= k;
  return 2.0 * std::pow(M_PI, n + 1) / factorial;
}

void gauss_legendre(int m, std::vector<double>& nodes, std::vector<double>& weights) {
  if (m < 1) throw Error("gauss_legendre: m must be >= 1");
  nodes.assign(m, 0.0);
  weights.assign(m, 0.0);
  for (int i = 0; i < m; ++i) {
    // Chebyshev-type initial guess for the i-th root of P_m
    double x = std::cos(M_PI * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      // recurrence for P_m(x) and P'_m(x)
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = m * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    // one polishing step after convergence
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = m * (x * p1 - p0) / (x * x - 1.0);
      x -= p1 / dp;
    }
    nodes[m - 1 - i] = x;  // ascending order
    weights[m - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

QuadratureRule product_rule_s3(int m) {
  if (m < 2) throw Error("product_rule_s3: m must be >= 2");
  std::vector<double> u_nodes, u_weights;
  gauss_legendre(m, u_nodes, u_weights);

  const int angles = 2 * m + 1;
  const double angle_weight = 2.0 * M_PI / angles;

  QuadratureRule rule;
  rule.dim_n = 1;
  rule.exact_degree = 2 * m - 1;
  rule.descriptor = "product-s3:m=" + std::to_string(m);
  rule.nodes.reserve(static_cast<std::size_t>(m) * angles * angles);
  rule.weights.resize(static_cast<Eigen::Index>(m) * angles * angles);

  Eigen::Index idx = 0;
  for (int i = 0; i < m; ++i) {
    // u = cos(2 eta); the Jacobian sin(eta) cos(eta) d eta = -du/4
    const double u = u_nodes[i];
    const double cos_eta = std::sqrt(0.5 * (1.0 + u));
    const double sin_eta = std::sqrt(0.5 * (1.0 - u));
    const double w_eta = 0.25 * u_weights[i];
    for (int a = 0; a < angles; ++a) {
      const double phi1 = angle_weight * a;
      const double c1 = std::cos(phi1), s1 = std::sin(phi1);
      for (int b = 0; b < angles; ++b) {
        const double phi2 = angle_weight * b;
        AmbientVector v(4);
        v[0] = cos_eta * c1;
        v[1] = cos_eta * s1;
        v[2] = sin_eta * std::cos(phi2);
        v[3] = sin_eta * std::sin(phi2);
        rule.nodes.push_back(SpherePoint::normalized(std::move(v), 1));
        rule.weights[idx++] = w_eta * angle_weight * angle_weight;
      }
    }
  }

  for (Eigen::Index i = 0; i < rule.weights.size(); ++i) {
    if (!(rule.weights[i] > 0.0)) throw Error("product_rule_s3: nonpositive weight");
  }
  const double total = rule.total_weight();
  if (std::abs(total - round_volume(1)) > 1e-10) {
    throw Error("product_rule_s3: weights sum to " + std::to_string(total) +
                ", expected the round volume");
  }
  return rule;
}

QuadratureRule monte_carlo_rule(int n, std::size_t count, std::uint64_t seed) {
  if (n < 1) throw Error("monte_carlo_rule: n must be >= 1");
  if (count < 1000) throw Error("monte_carlo_rule: need at least 1000 samples");
  QuadratureRule rule;
  rule.dim_n = n;
  rule.exact_degree = 0;
  rule.descriptor =
      "montecarlo:n=" + std::to_string(n) + ":N=" + std::to_string(count) +
      ":seed=" + std::to_string(seed);
  RandomStream rng(seed);
  rule.nodes.reserve(count);
  for (std::size_t i = 0; i < count; ++i) rule.nodes.push_back(random_sphere_point(n, rng));
  rule.weights = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(count),
                                           round_volume(n) / static_cast<double>(count));
  return rule;
}

double integrate(const std::function<double(const SpherePoint&)>& field,
                 const QuadratureRule& rule) {
  const std::size_t count = rule.size();
  CompensatedSum total;
  chunked_reduce<double>(
      count, 4096,
      [&](std::size_t begin, std::size_t end) {
        CompensatedSum partial;
        for (std::size_t i = begin; i < end; ++i) {
          double value;
          try {
            value = field(rule.nodes[i]);
          } catch (const std::exception& e) {
            throw Error("integrate: field evaluation failed at node " + std::to_string(i) + ": " +
                        e.what());
          }
          partial.add(rule.weights[static_cast<Eigen::Index>(i)] * value);
        }
        return partial.value();
      },
      [&](double partial) { total.add(partial); });
  return total.value();
}

void write_rule_csv(const QuadratureRule& rule, std::ostream& out) {
  const int dim = 2 * rule.dim_n + 2;
  for (int j = 0; j < rule.dim_n + 1; ++j) {
    out << "x" << (j + 1) << ",y" << (j + 1) << ",";
  }
  out << "weight\n";
  char buf[32];
  for (std::size_t i = 0; i < rule.size(); ++i) {
    for (int c = 0; c < dim; ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", rule.nodes[i][c]);
      out << buf << ',';
    }
    std::snprintf(buf, sizeof(buf), "%.17g", rule.weights[static_cast<Eigen::Index>(i)]);
    out << buf << '\n';
  }
}

}  // namespace crspectra
