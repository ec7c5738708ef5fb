#include "crspectra/balance.hpp"

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

// Ball radii representable enough that atanh stays well clear of overflow;
// atanh(kMaxBallRadius) ~ 14.2, inside the nominal t cap of 20.
constexpr double kMaxBallRadius = 1.0 - 1e-12;
constexpr double kJacobianStep = 1e-6;

/// Allocation-free pushforward barycenter for the solver's inner loop.
/// b = tanh(t) p parametrizes the dilation; b near zero is the identity.
class BarycenterMap {
 public:
  explicit BarycenterMap(const WeightedMeasure& mu) : mu_(mu), dim_(2 * mu.dim_n + 2) {
    raw_ = Eigen::VectorXd::Zero(dim_);
    for (std::size_t i = 0; i < mu.nodes.size(); ++i) {
      raw_ += mu.masses[static_cast<Eigen::Index>(i)] * mu.nodes[i].coords();
    }
    raw_ /= mu.total;
  }

  const Eigen::VectorXd& raw() const { return raw_; }
  int dim() const { return dim_; }

  Eigen::VectorXd operator()(const Eigen::VectorXd& b) const {
    const double r = b.norm();
    if (r < 1e-13) return raw_;
    const double t = std::atanh(std::min(r, kMaxBallRadius));
    const Eigen::VectorXd pole = b / r;
    const double ch = std::cosh(t);
    const double sh = std::sinh(t);

    Eigen::VectorXd acc = Eigen::VectorXd::Zero(dim_);
    const int pairs = dim_ / 2;
    for (std::size_t i = 0; i < mu_.nodes.size(); ++i) {
      const AmbientVector& z = mu_.nodes[i].coords();
      // zp = (zeta, p), Hermitian
      double zp_re = 0.0, zp_im = 0.0;
      for (int j = 0; j < pairs; ++j) {
        const double zr = z[2 * j], zi = z[2 * j + 1];
        const double pr = pole[2 * j], pi = pole[2 * j + 1];
        zp_re += zr * pr + zi * pi;
        zp_im += zi * pr - zr * pi;
      }
      const double den_re = ch + sh * zp_re;
      const double den_im = sh * zp_im;
      const double den2 = den_re * den_re + den_im * den_im;
      const double inv_re = den_re / den2;
      const double inv_im = -den_im / den2;
      // along = sinh t + (cosh t - 1) zp
      const double al_re = sh + (ch - 1.0) * zp_re;
      const double al_im = (ch - 1.0) * zp_im;
      const double m = mu_.masses[static_cast<Eigen::Index>(i)];
      for (int j = 0; j < pairs; ++j) {
        const double nr = z[2 * j] + al_re * pole[2 * j] - al_im * pole[2 * j + 1];
        const double ni = z[2 * j + 1] + al_re * pole[2 * j + 1] + al_im * pole[2 * j];
        acc[2 * j] += m * (inv_re * nr - inv_im * ni);
        acc[2 * j + 1] += m * (inv_re * ni + inv_im * nr);
      }
    }
    return acc / mu_.total;
  }

 private:
  const WeightedMeasure& mu_;
  int dim_;
  Eigen::VectorXd raw_;
};

Eigen::VectorXd clamp_ball(Eigen::VectorXd b) {
  const double r = b.norm();
  if (r > kMaxBallRadius) b *= kMaxBallRadius / r;
  return b;
}

BalancePoint ball_point_to_balance(const Eigen::VectorXd& b, double residual, int iterations,
                                   int n) {
  const double r = b.norm();
  if (r < 1e-13) {
    return BalancePoint{last_coordinate_pole(n), 0.0, residual, iterations};
  }
  return BalancePoint{SpherePoint::normalized(b, n), std::atanh(std::min(r, kMaxBallRadius)),
                      residual, iterations};
}

}  // namespace

WeightedMeasure WeightedMeasure::from_density(const QuadratureRule& rule,
                                              const ConformalFactor& f) {
  WeightedMeasure mu;
  mu.dim_n = rule.dim_n;
  mu.nodes = rule.nodes;
  mu.masses.resize(rule.weights.size());
  CompensatedSum total;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double fz = f.eval(rule.nodes[i]);
    if (!(fz > 0.0) || !std::isfinite(fz)) {
      throw NonPositiveFactorError("WeightedMeasure: factor not positive at node " +
                                       std::to_string(i),
                                   i);
    }
    const double mass = rule.weights[static_cast<Eigen::Index>(i)] * ipow(fz, rule.dim_n + 1);
    mu.masses[static_cast<Eigen::Index>(i)] = mass;
    total.add(mass);
  }
  mu.total = total.value();
  return mu;
}

Eigen::VectorXd barycenter(const WeightedMeasure& mu, const CrAutomorphism& g) {
  if (mu.nodes.empty()) throw DegenerateMeasureError("barycenter: empty measure");
  const int dim = 2 * mu.dim_n + 2;
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(dim);
  chunked_reduce<Eigen::VectorXd>(
      mu.nodes.size(), 8192,
      [&](std::size_t begin, std::size_t end) {
        Eigen::VectorXd partial = Eigen::VectorXd::Zero(dim);
        for (std::size_t i = begin; i < end; ++i) {
          partial += mu.masses[static_cast<Eigen::Index>(i)] * apply(g, mu.nodes[i]).coords();
        }
        return partial;
      },
      [&](Eigen::VectorXd partial) { acc += partial; });
  return acc / mu.total;
}

BalancePoint solve_balance(const WeightedMeasure& mu) {
  if (mu.nodes.empty()) throw DegenerateMeasureError("solve_balance: empty measure");
  const int n = mu.dim_n;
  const int dim = 2 * n + 2;
  {
    double spread = 0.0;
    for (const auto& node : mu.nodes) {
      spread = std::max(spread, (node.coords() - mu.nodes.front().coords()).norm());
    }
    if (spread < 1e-12) {
      throw DegenerateMeasureError("solve_balance: all nodes coincide; no balancing pair exists");
    }
  }

  const BarycenterMap G(mu);

  // independent acceptance check, outside the solver's fast path
  const auto accepted = [&](const Eigen::VectorXd& b, int iterations) -> BalancePoint {
    BalancePoint bp = ball_point_to_balance(b, 0.0, iterations, n);
    bp.residual = barycenter(mu, CrAutomorphism(bp.pole, bp.t)).norm();
    return bp;
  };

  if (G.raw().norm() <= kBalanceResidualTol) {
    return accepted(Eigen::VectorXd::Zero(dim), 0);
  }

  double best_residual = G.raw().norm();
  Eigen::VectorXd best_b = Eigen::VectorXd::Zero(dim);
  int total_iterations = 0;

  const auto newton_from = [&](Eigen::VectorXd b, int max_iters) -> bool {
    Eigen::VectorXd residual = G(b);
    int stall = 0;
    for (int iter = 0; iter < max_iters; ++iter) {
      ++total_iterations;
      const double rnorm = residual.norm();
      if (rnorm < best_residual) {
        best_residual = rnorm;
        best_b = b;
      }
      if (rnorm <= 0.5 * kBalanceResidualTol) return true;

      Eigen::MatrixXd jac(dim, dim);
      for (int c = 0; c < dim; ++c) {
        Eigen::VectorXd bp = b, bm = b;
        bp[c] += kJacobianStep;
        bm[c] -= kJacobianStep;
        jac.col(c) = (G(clamp_ball(bp)) - G(clamp_ball(bm))) / (2.0 * kJacobianStep);
      }
      Eigen::PartialPivLU<Eigen::MatrixXd> lu(jac);
      const Eigen::VectorXd step = lu.solve(residual);
      if (!step.allFinite()) return false;

      bool advanced = false;
      for (double alpha = 1.0; alpha >= 1.0 / 256.0; alpha *= 0.5) {
        const Eigen::VectorXd candidate = clamp_ball(b - alpha * step);
        const Eigen::VectorXd cand_res = G(candidate);
        if (cand_res.norm() < (1.0 - 0.25 * alpha) * rnorm) {
          b = candidate;
          residual = cand_res;
          advanced = true;
          break;
        }
      }
      if (!advanced) {
        if (++stall >= 3) return false;
        // gradient-free shrink toward the raw barycenter direction
        b = clamp_ball(0.5 * (b + G.raw()));
        residual = G(b);
      } else {
        stall = 0;
      }
    }
    return false;
  };

  std::vector<Eigen::VectorXd> starts;
  starts.push_back(Eigen::VectorXd::Zero(dim));
  for (int c = 0; c < dim && static_cast<int>(starts.size()) < 1 + kBalanceMultiStarts; ++c) {
    for (double sign : {1.0, -1.0}) {
      if (static_cast<int>(starts.size()) >= 1 + kBalanceMultiStarts) break;
      Eigen::VectorXd b = Eigen::VectorXd::Zero(dim);
      b[c] = 0.5 * sign;
      starts.push_back(std::move(b));
    }
  }

  for (const auto& start : starts) {
    if (newton_from(start, kBalanceMaxIterations)) {
      BalancePoint bp = accepted(best_b, total_iterations);
      if (bp.residual <= kBalanceResidualTol) return bp;
    }
  }

  // final fallback: damped gradient descent on |G|^2 from the best candidate
  {
    Eigen::VectorXd b = best_b;
    Eigen::VectorXd residual = G(b);
    double value = residual.squaredNorm();
    for (int iter = 0; iter < kBalanceMaxIterations; ++iter) {
      ++total_iterations;
      Eigen::VectorXd grad(dim);
      for (int c = 0; c < dim; ++c) {
        Eigen::VectorXd bp = b, bm = b;
        bp[c] += kJacobianStep;
        bm[c] -= kJacobianStep;
        grad[c] = (G(clamp_ball(bp)).squaredNorm() - G(clamp_ball(bm)).squaredNorm()) /
                  (2.0 * kJacobianStep);
      }
      const double gnorm = grad.norm();
      if (gnorm < 1e-16) break;
      bool advanced = false;
      for (double alpha = 1.0; alpha >= 1e-6; alpha *= 0.5) {
        const Eigen::VectorXd candidate = clamp_ball(b - (alpha / gnorm) * grad);
        const double cand_value = G(candidate).squaredNorm();
        if (cand_value < value) {
          b = candidate;
          value = cand_value;
          advanced = true;
          break;
        }
      }
      if (!advanced) break;
      if (std::sqrt(value) < best_residual) {
        best_residual = std::sqrt(value);
        best_b = b;
      }
      if (std::sqrt(value) <= 0.5 * kBalanceResidualTol) break;
    }
    BalancePoint bp = accepted(best_b, total_iterations);
    if (bp.residual <= kBalanceResidualTol) return bp;
    throw NoConvergenceError(
        "solve_balance: best residual " + std::to_string(bp.residual) + " at t = " +
            std::to_string(bp.t) + " after " + std::to_string(total_iterations) +
            " iterations (dilation parameter capped near atanh(1 - 1e-12) ~ 14.2, nominal cap " +
            std::to_string(kBalanceMaxT) + ")",
        bp.residual, bp.t);
  }
}

double balanced_test_energy(const WeightedMeasure& mu, const ConformalFactor& f,
                            const QuadratureRule& rule) {
  if (mu.nodes.size() != rule.size()) {
    throw DimensionMismatchError("balanced_test_energy: measure and rule do not match");
  }
  const int n = rule.dim_n;
  const BalancePoint bp = solve_balance(mu);
  const CrAutomorphism gamma(bp.pole, bp.t);

  constexpr double kStep = 1e-5;
  CompensatedSum energy;
  chunked_reduce<double>(
      rule.size(), 1024,
      [&](std::size_t begin, std::size_t end) {
        CompensatedSum partial;
        for (std::size_t i = begin; i < end; ++i) {
          const SpherePoint& z = rule.nodes[i];
          const double fz = f.eval(z);
          const double w = rule.weights[static_cast<Eigen::Index>(i)] * ipow(fz, n);
          const auto frame = tangent_frame(z);
          double density = 0.0;
          // sum_j |grad_H gamma_j|^2 = sum over horizontal frame vectors of
          // |d gamma (v)|^2; frame[0] is the Reeb direction, skip it
          for (std::size_t k = 1; k < frame.size(); ++k) {
            const auto at = [&](double s) {
              return apply(gamma, SpherePoint::normalized(
                                      std::cos(s) * z.coords() + std::sin(s) * frame[k], n));
            };
            const AmbientVector d = (at(kStep).coords() - at(-kStep).coords()) / (2.0 * kStep);
            density += d.squaredNorm();
          }
          partial.add(w * density);
        }
        return partial.value();
      },
      [&](double partial) { energy.add(partial); });
  return energy.value() / mu.total;
}

nlohmann::json to_json(const BalancePoint& bp) {
  nlohmann::json j;
  j["pole"] = std::vector<double>(bp.pole.coords().data(),
                                  bp.pole.coords().data() + bp.pole.coords().size());
  j["t"] = bp.t;
  j["residual"] = bp.residual;
  j["iterations"] = bp.iterations;
  return j;
}

}  // namespace crspectra
