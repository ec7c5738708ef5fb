// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failed criteria. Every tolerance is pinned in code next to the check.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "crspectra/balance.hpp"
#include "crspectra/conformal.hpp"
#include "crspectra/moebius.hpp"
#include "crspectra/polynomial.hpp"
#include "crspectra/quadrature.hpp"
#include "crspectra/rng.hpp"
#include "crspectra/spectral.hpp"

using namespace crspectra;

namespace {

double now_seconds() {
  using namespace std::chrono;
  return duration<double>(steady_clock::now().time_since_epoch()).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
  void note(const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

// 1. Flat spectrum: n = 1, D = 4, m = 14; eigenvalues {0,2,4,6,8,14,20,24}
//    with multiplicities {1,4,6,8,13,8,10,5}; |error| <= 1e-8; < 30 s
//    single-threaded.
Outcome criterion_flat_spectrum() {
  Outcome out;
  setenv("CR_SPECTRA_THREADS", "1", 1);
  const double t0 = now_seconds();
  const SpectralResult res =
      invariant_report(ConformalFactor::constant(1.0), 1, 4, product_rule_s3(14), 60);
  const double elapsed = now_seconds() - t0;
  unsetenv("CR_SPECTRA_THREADS");

  const std::vector<std::pair<double, int>> expected = {
      {0, 1}, {2, 4}, {4, 6}, {6, 8}, {8, 13}, {14, 8}, {20, 10}, {24, 5}};
  std::vector<double> flat;
  for (const auto& [value, mult] : expected) flat.insert(flat.end(), mult, value);
  out.require(res.eigenvalues.size() == flat.size(),
              "expected 55 eigenvalues, got " + std::to_string(res.eigenvalues.size()));
  double worst = 0.0;
  for (std::size_t i = 0; i < flat.size() && i < res.eigenvalues.size(); ++i) {
    worst = std::max(worst, std::abs(res.eigenvalues[i] - flat[i]));
  }
  out.require(worst <= 1e-8, "eigenvalue error " + fmt(worst));
  out.require(elapsed < 30.0, "runtime " + fmt(elapsed) + " s");
  out.note("max |error| = " + fmt(worst) + ", " + fmt(elapsed) + " s");
  return out;
}

// 2. lambda_1(theta_0) = 2n: n = 1 within 1e-8; n = 2 by Monte Carlo with
//    N = 10^6 within 1e-2 relative.
Outcome criterion_round_lambda1() {
  Outcome out;
  const double l1 =
      invariant_report(ConformalFactor::constant(1.0), 1, 2, product_rule_s3(10), 8).lambda1;
  out.require(std::abs(l1 - 2.0) <= 1e-8, "n=1 lambda1 error " + fmt(std::abs(l1 - 2.0)));

  const QuadratureRule mc = monte_carlo_rule(2, 1000000, 1);
  const double l2 = invariant_report(ConformalFactor::constant(1.0), 2, 2, mc, 8).lambda1;
  const double rel = std::abs(l2 - 4.0) / 4.0;
  out.require(rel <= 1e-2, "n=2 lambda1 relative error " + fmt(rel));
  out.note("n=1 err " + fmt(std::abs(l1 - 2.0)) + ", n=2 rel err " + fmt(rel));
  return out;
}

// 3. Sharp inequality sweep: 20 seeds of f = exp(eps g), deg-2 g with
//    coefficients in [-1,1], eps in {0.1,0.2,0.3}, D = 6:
//    margin >= -1e-3 * bound; < 10 minutes total.
Outcome criterion_inequality_sweep() {
  Outcome out;
  const double t0 = now_seconds();
  const QuadratureRule rule = product_rule_s3(18);
  double worst = std::numeric_limits<double>::infinity();
  for (int seed = 1; seed <= 20; ++seed) {
    RandomStream rng(static_cast<std::uint64_t>(seed));
    const RealPolynomial g = random_polynomial(4, 2, rng);
    for (double eps : {0.1, 0.2, 0.3}) {
      const SpectralResult res =
          invariant_report(ConformalFactor::exp_poly(g, eps), 1, 6, rule, 8);
      worst = std::min(worst, res.margin / res.bound);
      if (res.margin < -1e-3 * res.bound) {
        out.require(false, "seed " + std::to_string(seed) + " eps " + fmt(eps) +
                               ": margin/bound " + fmt(res.margin / res.bound));
      }
    }
  }
  const double elapsed = now_seconds() - t0;
  out.require(elapsed < 600.0, "runtime " + fmt(elapsed) + " s");
  out.note("60 runs, min margin/bound = " + fmt(worst) + ", " + fmt(elapsed) + " s");
  return out;
}

// 4. Equality family: t in {0, 0.25, 0.5}, random p: |margin| <= 5e-3 bound
//    at D = 6; for t > 0 the D = 6 margin is strictly smaller than at D = 4
//    (at t = 0 both sit at roundoff, so the strict comparison is replaced by
//    a far tighter absolute check).
Outcome criterion_equality_family() {
  Outcome out;
  RandomStream rng(4);
  const SpherePoint pole = random_sphere_point(1, rng);
  const QuadratureRule rule4 = product_rule_s3(14);
  const QuadratureRule rule6 = product_rule_s3(18);
  for (double t : {0.0, 0.25, 0.5}) {
    const ConformalFactor f = ConformalFactor::extremal(pole, t);
    const SpectralResult r4 = invariant_report(f, 1, 4, rule4, 8);
    const SpectralResult r6 = invariant_report(f, 1, 6, rule6, 8);
    out.require(std::abs(r6.margin) <= 5e-3 * r6.bound,
                "t=" + fmt(t) + " |margin|/bound " + fmt(std::abs(r6.margin) / r6.bound));
    if (t > 0.0) {
      out.require(std::abs(r6.margin) < std::abs(r4.margin),
                  "t=" + fmt(t) + " no strict decrease: D4 " + fmt(std::abs(r4.margin)) +
                      " vs D6 " + fmt(std::abs(r6.margin)));
    } else {
      out.require(std::abs(r4.margin) <= 1e-8 * r4.bound && std::abs(r6.margin) <= 1e-8 * r6.bound,
                  "t=0 margins exceed roundoff band");
    }
    out.note("t=" + fmt(t) + ": D4 " + fmt(std::abs(r4.margin) / r4.bound) + ", D6 " +
             fmt(std::abs(r6.margin) / r6.bound));
  }
  return out;
}

// 5. Pullback lemma: max FD residual over 100 random (p, t <= 2, z) with
//    h = 1e-6 at most 1e-6.
Outcome criterion_pullback_lemma() {
  Outcome out;
  RandomStream rng(5);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const CrAutomorphism g(random_sphere_point(1, rng), rng.uniform(0.0, 2.0));
    worst = std::max(worst, pullback_residual(g, random_sphere_point(1, rng), 1e-6));
  }
  out.require(worst <= 1e-6, "max residual " + fmt(worst));
  out.note("max residual = " + fmt(worst));
  return out;
}

// 6. Group law and pullback cocycle to 1e-10 over 100 random samples.
Outcome criterion_group_law() {
  Outcome out;
  RandomStream rng(6);
  double worst_map = 0.0, worst_factor = 0.0;
  for (int k = 0; k < 100; ++k) {
    const SpherePoint p = random_sphere_point(1, rng);
    const SpherePoint z = random_sphere_point(1, rng);
    const double s = rng.uniform(0.0, 1.0), t = rng.uniform(0.0, 1.0);
    const AutomorphismChain chain = compose(CrAutomorphism(p, s), CrAutomorphism(p, t));
    const CrAutomorphism direct(p, s + t);
    worst_map = std::max(worst_map, (chain.apply(z).coords() - apply(direct, z).coords()).norm());
    worst_factor = std::max(worst_factor,
                            std::abs(chain.pullback_factor(z) - pullback_factor(direct, z)));
  }
  out.require(worst_map <= 1e-10, "group-law residual " + fmt(worst_map));
  out.require(worst_factor <= 1e-10, "cocycle residual " + fmt(worst_factor));
  out.note("map " + fmt(worst_map) + ", cocycle " + fmt(worst_factor));
  return out;
}

// 7. Volume law: int f_{p,t}^{n+1} psi_0 = V(theta_0) within 1e-8 for t <= 1
//    at m = 24. Implemented faithfully on the grid {0.25, 0.5, 0.75, 1.0};
//    the t = 1.0 endpoint exceeds the stated tolerance with this rule
//    construction (trapezoid aliasing ~ e^{-(2m+1) ln coth t}), which is
//    reported rather than hidden.
Outcome criterion_volume_law() {
  Outcome out;
  const QuadratureRule rule = product_rule_s3(24);
  RandomStream rng(7);
  for (double t : {0.25, 0.5, 0.75, 1.0}) {
    const ConformalFactor f = ConformalFactor::extremal(random_sphere_point(1, rng), t);
    const double v = integrate(
        [&](const SpherePoint& z) {
          const double fz = f.eval(z);
          return fz * fz;
        },
        rule);
    const double err = std::abs(v - rule.total_weight());
    out.require(err <= 1e-8, "t=" + fmt(t) + " error " + fmt(err));
    out.note("t=" + fmt(t) + ": " + fmt(err));
  }
  return out;
}

// 8. Balancing: pullback densities with random p, t <= 1 recover tanh(t) p
//    within 1e-6 with residual <= 1e-8; the round measure returns t = 0.
//    The rule order is free here; m = 32 keeps the discretization bias of
//    the t = 1 densities well below the recovery tolerance.
Outcome criterion_balancing() {
  Outcome out;
  const QuadratureRule rule = product_rule_s3(32);
  {
    const BalancePoint bp =
        solve_balance(WeightedMeasure::from_density(rule, ConformalFactor::constant(1.0)));
    out.require(bp.t == 0.0, "round measure returned t = " + fmt(bp.t));
  }
  RandomStream rng(8);
  double worst = 0.0;
  for (double t : {0.25, 0.5, 0.75, 1.0}) {
    const SpherePoint p = random_sphere_point(1, rng);
    const BalancePoint bp =
        solve_balance(WeightedMeasure::from_density(rule, ConformalFactor::extremal(p, t)));
    const double err = (std::tanh(bp.t) * bp.pole.coords() - std::tanh(t) * p.coords()).norm();
    worst = std::max(worst, err);
    out.require(bp.residual <= 1e-8, "t=" + fmt(t) + " residual " + fmt(bp.residual));
    out.require(err <= 1e-6, "t=" + fmt(t) + " recovery error " + fmt(err));
  }
  out.note("max recovery error = " + fmt(worst));
  return out;
}

// 9. Invariance suite: conformal scaling fixes the invariant to 1e-10;
//    unitary rotation fixes the sorted spectrum to 1e-8; Ritz lambda1 is
//    non-increasing across D = 2, 4, 6.
Outcome criterion_invariances() {
  Outcome out;
  RandomStream rng(9);
  const QuadratureRule rule = product_rule_s3(14);
  const RealPolynomial g = random_polynomial(4, 2, rng);
  const ConformalFactor f = ConformalFactor::exp_poly(g, 0.2);

  const SpectralResult base = invariant_report(f, 1, 4, rule, 60);
  // conformal scaling: c * exp(eps g) realized inside the family as
  // exp(eps g + log c); also the extremal family's native scale knob
  for (double c : {0.5, 2.0, 10.0}) {
    RealPolynomial shifted = g;
    shifted.add_term(MultiIndex(4, 0), std::log(c) / 0.2);
    const SpectralResult res =
        invariant_report(ConformalFactor::exp_poly(shifted, 0.2), 1, 4, rule, 8);
    out.require(std::abs(res.invariant - base.invariant) <= 1e-10 * std::max(1.0, base.invariant),
                "scaling c=" + fmt(c) + " moved invariant by " +
                    fmt(std::abs(res.invariant - base.invariant)));
  }
  {
    const SpherePoint pole = random_sphere_point(1, rng);
    const SpectralResult unit =
        invariant_report(ConformalFactor::extremal(pole, 0.3, 1.0), 1, 4, rule, 8);
    for (double c : {0.5, 2.0, 10.0}) {
      const SpectralResult res =
          invariant_report(ConformalFactor::extremal(pole, 0.3, c), 1, 4, rule, 8);
      out.require(std::abs(res.invariant - unit.invariant) <= 1e-10 * std::max(1.0, unit.invariant),
                  "extremal scale c=" + fmt(c) + " moved invariant by " +
                      fmt(std::abs(res.invariant - unit.invariant)));
    }
  }

  double worst_rot = 0.0;
  for (int k = 0; k < 3; ++k) {
    const Eigen::MatrixXd u = random_unitary(1, rng);
    const SpectralResult rotated = invariant_report(f.precomposed(u), 1, 4, rule, 60);
    for (std::size_t i = 0; i < base.eigenvalues.size(); ++i) {
      worst_rot = std::max(worst_rot, std::abs(rotated.eigenvalues[i] - base.eigenvalues[i]));
    }
  }
  out.require(worst_rot <= 1e-8, "unitary spectrum drift " + fmt(worst_rot));

  const QuadratureRule rule18 = product_rule_s3(18);
  double previous = std::numeric_limits<double>::infinity();
  bool monotone = true;
  for (int degree : {2, 4, 6}) {
    const double l1 = invariant_report(f, 1, degree, rule18, 8).lambda1;
    monotone = monotone && (l1 <= previous + 1e-10);
    previous = l1;
  }
  out.require(monotone, "Ritz lambda1 increased along D = 2, 4, 6");
  out.note("rotation drift " + fmt(worst_rot));
  return out;
}

// 10. Proof re-enactment: balanced test energy equals 2n within 1e-6 at the
//     round structure and matches 2n (V0/V)^{1/(n+1)} within 1e-2 on the
//     extremal family.
Outcome criterion_proof_reenactment() {
  Outcome out;
  const QuadratureRule rule = product_rule_s3(12);
  const ConformalFactor one = ConformalFactor::constant(1.0);
  const double e0 = balanced_test_energy(WeightedMeasure::from_density(rule, one), one, rule);
  out.require(std::abs(e0 - 2.0) <= 1e-6, "round energy error " + fmt(std::abs(e0 - 2.0)));
  out.note("round energy err " + fmt(std::abs(e0 - 2.0)));

  const QuadratureRule rule16 = product_rule_s3(16);
  RandomStream rng(10);
  for (double t : {0.25, 0.5}) {
    const ConformalFactor f = ConformalFactor::extremal(random_sphere_point(1, rng), t);
    const WeightedMeasure mu = WeightedMeasure::from_density(rule16, f);
    const double energy = balanced_test_energy(mu, f, rule16);
    const double holder =
        2.0 * std::pow(rule16.total_weight() / mu.total, 1.0 / (rule16.dim_n + 1));
    out.require(std::abs(energy - holder) <= 1e-2,
                "t=" + fmt(t) + " |energy - holder| " + fmt(std::abs(energy - holder)));
    out.note("t=" + fmt(t) + " gap " + fmt(std::abs(energy - holder)));
  }
  return out;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "flat spectrum n=1 D=4 m=14", criterion_flat_spectrum},
      {2, "lambda1(theta_0) = 2n (n = 1, 2)", criterion_round_lambda1},
      {3, "inequality sweep exp(eps g), D=6", criterion_inequality_sweep},
      {4, "equality family margins shrink", criterion_equality_family},
      {5, "pullback lemma FD residual", criterion_pullback_lemma},
      {6, "group law and cocycle", criterion_group_law},
      {7, "volume law t <= 1, m = 24", criterion_volume_law},
      {8, "balancing recovers (p, t)", criterion_balancing},
      {9, "invariance suite", criterion_invariances},
      {10, "proof re-enactment energy", criterion_proof_reenactment},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    const double t0 = now_seconds();
    Outcome outcome;
    try {
      outcome = criterion.run();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    const double elapsed = now_seconds() - t0;
    std::printf("[%s] %2d. %-38s (%.1fs) %s\n", outcome.pass ? "PASS" : "FAIL", criterion.id,
                criterion.name, elapsed, outcome.detail.c_str());
    std::fflush(stdout);
    if (!outcome.pass) ++failures;
  }
  if (failures > 0) {
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  } else {
    std::printf("all %zu criteria passed\n", criteria.size());
  }
  return failures;
}
