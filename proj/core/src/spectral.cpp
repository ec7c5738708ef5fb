#include "crspectra/spectral.hpp"

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "crspectra/cr_geometry.hpp"
#include "crspectra/parallel.hpp"

namespace crspectra {

namespace {

double ipow(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

/// Flat term list for fast batch evaluation of values and gradients.
struct CompiledTerm {
  double coeff;
  // (variable, exponent) pairs with exponent >= 1
  std::vector<std::pair<int, int>> vars;
};

struct CompiledPoly {
  std::vector<CompiledTerm> terms;
};

struct CompiledBasis {
  std::vector<CompiledPoly> polys;
  int dim = 0;
  int max_exponent = 0;
};

CompiledBasis compile_basis(const std::vector<RealPolynomial>& basis, int dim) {
  CompiledBasis out;
  out.dim = dim;
  out.polys.reserve(basis.size());
  for (const auto& poly : basis) {
    if (poly.ambient_dim() != dim) {
      throw DimensionMismatchError("assemble: basis polynomial has wrong ambient dimension");
    }
    CompiledPoly cp;
    cp.terms.reserve(poly.term_count());
    for (const auto& [exps, coeff] : poly.terms()) {
      CompiledTerm term;
      term.coeff = coeff;
      for (int v = 0; v < dim; ++v) {
        if (exps[v] > 0) {
          term.vars.emplace_back(v, exps[v]);
          out.max_exponent = std::max(out.max_exponent, exps[v]);
        }
      }
      cp.terms.push_back(std::move(term));
    }
    out.polys.push_back(std::move(cp));
  }
  return out;
}

/// Value and ambient gradient of every compiled polynomial at one point.
/// `values` has length K; `grads` is dim x K (column per polynomial).
void eval_basis_at(const CompiledBasis& basis, const AmbientVector& x,
                   Eigen::Ref<Eigen::VectorXd> values, Eigen::Ref<Eigen::MatrixXd> grads,
                   std::vector<double>& pow_table, std::vector<double>& prefix,
                   std::vector<double>& suffix) {
  const int dim = basis.dim;
  const int pmax = basis.max_exponent + 1;
  // pow_table[v * pmax + e] = x_v^e
  for (int v = 0; v < dim; ++v) {
    pow_table[v * pmax] = 1.0;
    for (int e = 1; e < pmax; ++e) pow_table[v * pmax + e] = pow_table[v * pmax + e - 1] * x[v];
  }
  values.setZero();
  grads.setZero();
  for (std::size_t k = 0; k < basis.polys.size(); ++k) {
    for (const auto& term : basis.polys[k].terms) {
      const std::size_t nv = term.vars.size();
      if (nv == 0) {
        values[static_cast<Eigen::Index>(k)] += term.coeff;
        continue;
      }
      prefix[0] = 1.0;
      for (std::size_t a = 0; a < nv; ++a) {
        const auto [v, e] = term.vars[a];
        prefix[a + 1] = prefix[a] * pow_table[v * pmax + e];
      }
      suffix[nv] = 1.0;
      for (std::size_t a = nv; a > 0; --a) {
        const auto [v, e] = term.vars[a - 1];
        suffix[a - 1] = suffix[a] * pow_table[v * pmax + e];
      }
      values[static_cast<Eigen::Index>(k)] += term.coeff * prefix[nv];
      for (std::size_t a = 0; a < nv; ++a) {
        const auto [v, e] = term.vars[a];
        grads(v, static_cast<Eigen::Index>(k)) +=
            term.coeff * e * pow_table[v * pmax + e - 1] * prefix[a] * suffix[a + 1];
      }
    }
  }
}

struct AssemblyPartial {
  Eigen::MatrixXd stiffness;
  Eigen::MatrixXd mass;
  Eigen::MatrixXd gram;
  double volume = 0.0;
};

constexpr std::size_t kAssemblyChunk = 2048;

}  // namespace

SpectralProblem assemble(const ConformalFactor& f, std::vector<RealPolynomial> basis,
                         const QuadratureRule& rule) {
  const int n = rule.dim_n;
  const int dim = 2 * n + 2;
  if (f.dim_n() >= 0 && f.dim_n() != n) {
    throw DimensionMismatchError("assemble: factor dimension does not match the rule");
  }
  if (basis.empty()) throw Error("assemble: empty basis");
  const Eigen::Index K = static_cast<Eigen::Index>(basis.size());
  const CompiledBasis compiled = compile_basis(basis, dim);

  SpectralProblem problem;
  problem.dim_n = n;
  problem.rule_descriptor = rule.descriptor;
  problem.basis_degree = 0;
  for (const auto& poly : basis) problem.basis_degree = std::max(problem.basis_degree, poly.total_degree());

  Eigen::MatrixXd stiffness = Eigen::MatrixXd::Zero(K, K);
  Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(K, K);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(K, K);
  CompensatedSum volume;

  chunked_reduce<AssemblyPartial>(
      rule.size(), kAssemblyChunk,
      [&](std::size_t begin, std::size_t end) {
        const Eigen::Index rows = static_cast<Eigen::Index>(end - begin);
        Eigen::MatrixXd phi_mass(rows, K);   // sqrt(w f^{n+1}) phi
        Eigen::MatrixXd phi_round(rows, K);  // sqrt(w) phi
        std::vector<Eigen::MatrixXd> grad_parts(
            static_cast<std::size_t>(dim), Eigen::MatrixXd(rows, K));  // sqrt(w f^n) d_c phi
        Eigen::MatrixXd radial(rows, K);  // sqrt(w f^n) <grad phi, z>
        Eigen::MatrixXd reeb(rows, K);    // sqrt(w f^n) <grad phi, Jz>

        Eigen::VectorXd values(K);
        Eigen::MatrixXd grads(dim, K);
        std::vector<double> pow_table(static_cast<std::size_t>(dim) *
                                      (compiled.max_exponent + 1));
        std::vector<double> prefix(static_cast<std::size_t>(dim * compiled.max_exponent) + 2);
        std::vector<double> suffix(prefix.size());

        CompensatedSum vol_partial;
        for (std::size_t i = begin; i < end; ++i) {
          const SpherePoint& z = rule.nodes[i];
          const double fz = f.eval(z);
          if (!(fz > 0.0) || !std::isfinite(fz)) {
            throw NonPositiveFactorError(
                "assemble: conformal factor is not strictly positive at node " +
                    std::to_string(i) + " (value " + std::to_string(fz) + ")",
                i);
          }
          const double w = rule.weights[static_cast<Eigen::Index>(i)];
          const double fn = ipow(fz, n);
          const double w_stiff = std::sqrt(w * fn);
          const double w_mass = std::sqrt(w * fn * fz);
          const double w_round = std::sqrt(w);
          vol_partial.add(w * fn * fz);

          eval_basis_at(compiled, z.coords(), values, grads, pow_table, prefix, suffix);
          const Eigen::Index row = static_cast<Eigen::Index>(i - begin);
          const AmbientVector& zc = z.coords();
          const AmbientVector jz = complex_structure(zc);
          phi_mass.row(row) = (w_mass * values).transpose();
          phi_round.row(row) = (w_round * values).transpose();
          radial.row(row) = w_stiff * (zc.transpose() * grads);
          reeb.row(row) = w_stiff * (jz.transpose() * grads);
          for (int c = 0; c < dim; ++c) {
            grad_parts[static_cast<std::size_t>(c)].row(row) = w_stiff * grads.row(c);
          }
        }

        AssemblyPartial partial;
        partial.stiffness = Eigen::MatrixXd::Zero(K, K);
        for (int c = 0; c < dim; ++c) {
          partial.stiffness.selfadjointView<Eigen::Lower>().rankUpdate(
              grad_parts[static_cast<std::size_t>(c)].transpose(), 1.0);
        }
        partial.stiffness.selfadjointView<Eigen::Lower>().rankUpdate(radial.transpose(), -1.0);
        partial.stiffness.selfadjointView<Eigen::Lower>().rankUpdate(reeb.transpose(), -1.0);
        partial.mass = Eigen::MatrixXd::Zero(K, K);
        partial.mass.selfadjointView<Eigen::Lower>().rankUpdate(phi_mass.transpose(), 1.0);
        partial.gram = Eigen::MatrixXd::Zero(K, K);
        partial.gram.selfadjointView<Eigen::Lower>().rankUpdate(phi_round.transpose(), 1.0);
        partial.volume = vol_partial.value();
        return partial;
      },
      [&](AssemblyPartial partial) {
        stiffness += partial.stiffness;
        mass += partial.mass;
        gram += partial.gram;
        volume.add(partial.volume);
      });

  // rankUpdate populated lower triangles only; mirror and symmetrize
  stiffness.triangularView<Eigen::StrictlyUpper>() = stiffness.transpose();
  mass.triangularView<Eigen::StrictlyUpper>() = mass.transpose();
  gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
  problem.stiffness = 0.5 * (stiffness + stiffness.transpose());
  problem.mass = 0.5 * (mass + mass.transpose());
  problem.volume = volume.value();
  problem.round_volume = rule.total_weight();
  problem.basis = std::move(basis);

  // whitening map from the round Gram: keep directions above the relative
  // cutoff, scale them to unit round norm
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (gram + gram.transpose()));
  if (es.info() != Eigen::Success) {
    throw EigensolverFailureError("assemble: Gram eigendecomposition failed");
  }
  const Eigen::VectorXd& mu = es.eigenvalues();
  const double cutoff = kRankCutoff * mu[K - 1];
  Eigen::Index kept = 0;
  for (Eigen::Index i = 0; i < K; ++i) {
    if (mu[i] > cutoff) ++kept;
  }
  if (kept < 2) {
    throw RankDeficiencyError("assemble: rank truncation left " + std::to_string(kept) +
                              " dimension(s)");
  }
  problem.rank_map.resize(K, kept);
  Eigen::Index col = 0;
  for (Eigen::Index i = 0; i < K; ++i) {
    if (mu[i] > cutoff) {
      problem.rank_map.col(col++) = es.eigenvectors().col(i) / std::sqrt(mu[i]);
    }
  }
  return problem;
}

namespace {

std::vector<EigenvalueCluster> cluster_eigenvalues(const std::vector<double>& values,
                                                   double tolerance) {
  std::vector<EigenvalueCluster> clusters;
  for (double v : values) {
    if (!clusters.empty() && v - clusters.back().value <= tolerance) {
      auto& c = clusters.back();
      // running mean keeps the reported value centered on the cluster
      c.value = (c.value * c.multiplicity + v) / (c.multiplicity + 1);
      c.multiplicity += 1;
    } else {
      clusters.push_back({v, 1});
    }
  }
  return clusters;
}

}  // namespace

SpectralResult solve(const SpectralProblem& problem, int count) {
  if (count < 1) throw Error("solve: count must be >= 1");
  const Eigen::MatrixXd& T = problem.rank_map;
  if (T.cols() < 2) throw RankDeficiencyError("solve: truncated space has dimension < 2");
  const Eigen::MatrixXd stiff_t = T.transpose() * problem.stiffness * T;
  const Eigen::MatrixXd mass_t = 0.5 * (T.transpose() * problem.mass * T +
                                        (T.transpose() * problem.mass * T).transpose());

  // the generalized solver factorizes the mass form without reporting
  // indefiniteness; establish it here
  Eigen::LLT<Eigen::MatrixXd> llt(mass_t);
  if (llt.info() != Eigen::Success) {
    throw EigensolverFailureError(
        "solve: mass form is not positive definite on the truncated subspace");
  }

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      0.5 * (stiff_t + stiff_t.transpose()), mass_t, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
  if (solver.info() != Eigen::Success) {
    throw EigensolverFailureError("solve: generalized eigensolver did not converge");
  }
  const Eigen::VectorXd& all = solver.eigenvalues();
  const Eigen::Index r = all.size();

  const double lambda_scale = std::max(std::abs(all[r - 1]), 1e-300);
  const double kernel_tol = kKernelToleranceFactor * lambda_scale;
  Eigen::Index kernel_count = 0;
  while (kernel_count < r && all[kernel_count] < kernel_tol) ++kernel_count;
  if (kernel_count != 1) {
    throw KernelDimensionAnomalyError(
        "solve: " + std::to_string(kernel_count) +
            " eigenvalue(s) below the kernel threshold (expected exactly the constants)",
        static_cast<int>(kernel_count));
  }

  SpectralResult result;
  result.dim_n = problem.dim_n;
  result.basis_degree = problem.basis_degree;
  result.rule_descriptor = problem.rule_descriptor;
  result.volume = problem.volume;
  const Eigen::Index reported = std::min<Eigen::Index>(count, r);
  result.eigenvalues.assign(all.data(), all.data() + reported);
  result.clusters = cluster_eigenvalues(result.eigenvalues, kClusterToleranceFactor * lambda_scale);
  result.lambda1 = all[1];
  const double exponent = 1.0 / (problem.dim_n + 1);
  result.invariant = result.lambda1 * std::pow(problem.volume, exponent);
  result.bound = 2.0 * problem.dim_n * std::pow(problem.round_volume, exponent);
  result.margin = result.bound - result.invariant;
  return result;
}

SpectralResult invariant_report(const ConformalFactor& f, int n, int degree,
                                const QuadratureRule& rule, int count) {
  if (rule.dim_n != n) throw DimensionMismatchError("invariant_report: rule is for a different n");
  return solve(assemble(f, monomial_basis(n, degree), rule), count);
}

double rayleigh_quotient(const RealPolynomial& u, const ConformalFactor& f,
                         const QuadratureRule& rule) {
  const int n = rule.dim_n;
  if (u.ambient_dim() != 2 * n + 2) {
    throw DimensionMismatchError("rayleigh_quotient: dimension mismatch");
  }
  const auto f_pow = [&](const SpherePoint& z, int e) {
    const double fz = f.eval(z);
    if (!(fz > 0.0)) throw Error("rayleigh_quotient: factor not positive on the rule");
    return ipow(fz, e);
  };
  const double vol = integrate([&](const SpherePoint& z) { return f_pow(z, n + 1); }, rule);
  const double mean =
      integrate([&](const SpherePoint& z) { return f_pow(z, n + 1) * u.eval(z); }, rule) / vol;
  const double centered = integrate(
      [&](const SpherePoint& z) {
        const double d = u.eval(z) - mean;
        return f_pow(z, n + 1) * d * d;
      },
      rule);
  if (centered < 1e-14) {
    throw DegenerateTestFunctionError("rayleigh_quotient: centered norm " +
                                      std::to_string(centered) + " is numerically zero");
  }
  const double energy = integrate(
      [&](const SpherePoint& z) { return f_pow(z, n) * horizontal_energy_density(u, z); }, rule);
  return energy / centered;
}

nlohmann::json to_json(const SpectralResult& result) {
  nlohmann::json j;
  j["eigenvalues"] = result.eigenvalues;
  nlohmann::json clusters = nlohmann::json::array();
  for (const auto& c : result.clusters) {
    clusters.push_back({{"value", c.value}, {"multiplicity", c.multiplicity}});
  }
  j["clusters"] = clusters;
  j["lambda1"] = result.lambda1;
  j["volume"] = result.volume;
  j["invariant"] = result.invariant;
  j["bound"] = result.bound;
  j["margin"] = result.margin;
  j["basis_degree"] = result.basis_degree;
  j["rule"] = result.rule_descriptor;
  return j;
}

}  // namespace crspectra
