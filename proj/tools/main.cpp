// crspectra: spectra of the sub-Laplacian on S^{2n+1} for conformal contact
// forms f theta_0, with verification of the scale-invariant bound
// lambda_1(theta) V(theta)^{1/(n+1)} <= 2n V(theta_0)^{1/(n+1)}, barycenter
// balancing, and batch identity checks.
//
// Exit codes: 0 success, 1 mathematical-claim violation, 2 numerical
// failure, 3 configuration error.

#include <atomic>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "crspectra/balance.hpp"
#include "crspectra/conformal.hpp"
#include "crspectra/moebius.hpp"
#include "crspectra/parallel.hpp"
#include "crspectra/polynomial.hpp"
#include "crspectra/quadrature.hpp"
#include "crspectra/rng.hpp"
#include "crspectra/spectral.hpp"

namespace {

using nlohmann::json;
using namespace crspectra;

constexpr int kExitOk = 0;
constexpr int kExitClaimViolation = 1;
constexpr int kExitNumericalFailure = 2;
constexpr int kExitConfigError = 3;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct RuleConfig {
  std::string kind = "product";  // product | montecarlo
  int m = 0;                     // 0 = derive from degree (2D + 6)
  long long mc_samples = 200000;
  std::uint64_t seed = 1;
};

struct RunConfig {
  int n = 1;
  int degree = 4;
  RuleConfig rule;
  std::string factor = "constant";
  std::vector<double> t_grid;
  std::vector<double> eps_grid;
  int samples = 20;
  double allowance = 1e-3;
  int count = 60;
  std::string out;
  std::string format = "json";

  json to_json() const {
    json j;
    j["n"] = n;
    j["degree"] = degree;
    j["rule"] = {{"kind", rule.kind}, {"m", resolved_m()}, {"mc_samples", rule.mc_samples},
                 {"seed", rule.seed}};
    j["factor"] = factor;
    j["t_grid"] = t_grid;
    j["eps_grid"] = eps_grid;
    j["samples"] = samples;
    j["allowance"] = allowance;
    j["count"] = count;
    j["format"] = format;
    return j;
  }

  int resolved_m() const { return rule.m > 0 ? rule.m : 2 * degree + 6; }

  void validate() const {
    if (n < 1) throw ParseError("config: n must be >= 1");
    if (degree < 1) throw ParseError("config: degree must be >= 1");
    if (rule.kind != "product" && rule.kind != "montecarlo") {
      throw ParseError("config: rule kind must be 'product' or 'montecarlo'");
    }
    if (rule.kind == "product" && n != 1) {
      throw ParseError("config: the exact product rule exists only for n = 1; "
                       "use --rule montecarlo");
    }
    if (rule.kind == "product" && resolved_m() < 2) throw ParseError("config: m must be >= 2");
    if (rule.kind == "montecarlo" && rule.mc_samples < 1000) {
      throw ParseError("config: mc-samples must be >= 1000");
    }
    if (samples < 1) throw ParseError("config: samples must be >= 1");
    if (count < 1) throw ParseError("config: count must be >= 1");
    if (!(allowance >= 0.0)) throw ParseError("config: allowance must be >= 0");
    if (format != "json" && format != "csv") {
      throw ParseError("config: format must be 'json' or 'csv'");
    }
  }

  QuadratureRule make_rule() const {
    if (rule.kind == "product") return product_rule_s3(resolved_m());
    return monte_carlo_rule(n, static_cast<std::size_t>(rule.mc_samples), rule.seed);
  }
};

/// Flags override config-file values, which override defaults.
struct ConfigBinding {
  CLI::App* cmd = nullptr;
  std::string config_path;
  RunConfig cfg;
  std::string t_grid_text, eps_grid_text;

  void attach(CLI::App* app) {
    cmd = app;
    app->add_option("--config", config_path, "JSON config file; flags override its values");
    app->add_option("--n", cfg.n, "Complex dimension parameter n of S^{2n+1}");
    app->add_option("--degree", cfg.degree, "Polynomial trial-space degree cap");
    app->add_option("--rule", cfg.rule.kind, "Quadrature rule kind: product | montecarlo");
    app->add_option("--m", cfg.rule.m, "Product-rule parameter m (default 2*degree + 6)");
    app->add_option("--mc-samples", cfg.rule.mc_samples, "Monte Carlo node count");
    app->add_option("--seed", cfg.rule.seed, "Seed for Monte Carlo nodes and random sweeps");
    app->add_option("--factor", cfg.factor,
                    "Conformal factor: constant[:c], extremal[:t], or JSON");
    app->add_option("--t-grid", t_grid_text, "Comma-separated dilation parameters (extremal sweep)");
    app->add_option("--eps-grid", eps_grid_text, "Comma-separated epsilons (random exp-poly sweep)");
    app->add_option("--samples", cfg.samples, "Random samples per sweep/check");
    app->add_option("--allowance", cfg.allowance, "Margin allowance as a fraction of the bound");
    app->add_option("--count", cfg.count, "Number of eigenvalues to report");
    app->add_option("--out", cfg.out, "Output path (stdout if omitted)");
    app->add_option("--format", cfg.format, "Output format: json | csv");
  }

  static std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty()) continue;
      char* end = nullptr;
      const double v = std::strtod(item.c_str(), &end);
      if (end != item.c_str() + item.size()) {
        throw ParseError("config: bad grid entry '" + item + "'");
      }
      out.push_back(v);
    }
    return out;
  }

  RunConfig resolve() const {
    RunConfig r = cfg;  // flag values and defaults
    bool rule_kind_given = cmd->count("--rule") > 0;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ParseError("config: cannot open '" + config_path + "'");
      json j = json::parse(in, nullptr, false);
      if (j.is_discarded()) throw ParseError("config: '" + config_path + "' is not valid JSON");
      const auto take = [&](const char* flag, const char* key, auto& slot) {
        if (cmd->count(flag) == 0 && j.contains(key)) {
          try {
            slot = j.at(key).get<std::decay_t<decltype(slot)>>();
          } catch (const json::exception& e) {
            throw ParseError(std::string("config: bad value for '") + key + "': " + e.what());
          }
        }
      };
      take("--n", "n", r.n);
      take("--degree", "degree", r.degree);
      take("--samples", "samples", r.samples);
      take("--allowance", "allowance", r.allowance);
      take("--count", "count", r.count);
      take("--out", "out", r.out);
      take("--format", "format", r.format);
      if (j.contains("factor")) {
        if (cmd->count("--factor") == 0) {
          r.factor = j.at("factor").is_string() ? j.at("factor").get<std::string>()
                                                : j.at("factor").dump();
        }
      }
      if (j.contains("rule")) {
        const json& jr = j.at("rule");
        const auto take_rule = [&](const char* flag, const char* key, auto& slot) {
          if (cmd->count(flag) == 0 && jr.contains(key)) {
            slot = jr.at(key).get<std::decay_t<decltype(slot)>>();
          }
        };
        take_rule("--rule", "kind", r.rule.kind);
        take_rule("--m", "m", r.rule.m);
        take_rule("--mc-samples", "mc_samples", r.rule.mc_samples);
        take_rule("--seed", "seed", r.rule.seed);
        rule_kind_given = rule_kind_given || jr.contains("kind");
      }
      if (cmd->count("--t-grid") == 0 && j.contains("t_grid")) {
        r.t_grid = j.at("t_grid").get<std::vector<double>>();
      }
      if (cmd->count("--eps-grid") == 0 && j.contains("eps_grid")) {
        r.eps_grid = j.at("eps_grid").get<std::vector<double>>();
      }
    }
    if (cmd->count("--t-grid") > 0) r.t_grid = parse_grid(t_grid_text);
    if (cmd->count("--eps-grid") > 0) r.eps_grid = parse_grid(eps_grid_text);
    // the exact product rule exists only on S^3; default the rest to MC
    if (!rule_kind_given && r.n != 1) r.rule.kind = "montecarlo";
    r.validate();
    return r;
  }
};

void write_output(const RunConfig& cfg, const std::string& payload) {
  if (cfg.out.empty()) {
    std::cout << payload;
    return;
  }
  std::ofstream out(cfg.out, std::ios::binary);
  if (!out) throw Error("cannot open output file '" + cfg.out + "'");
  out << payload;
}

std::string csv_preamble(const RunConfig& cfg) {
  return "# config " + cfg.to_json().dump() + "\n";
}

// ---------------------------------------------------------------- spectrum

int cmd_spectrum(const RunConfig& cfg) {
  const ConformalFactor factor = ConformalFactor::parse(cfg.factor, cfg.n);
  const QuadratureRule rule = cfg.make_rule();
  const SpectralResult result = invariant_report(factor, cfg.n, cfg.degree, rule, cfg.count);

  std::string payload;
  if (cfg.format == "json") {
    json j;
    j["config"] = cfg.to_json();
    j["result"] = to_json(result);
    payload = j.dump(2) + "\n";
  } else {
    std::string s = csv_preamble(cfg);
    s += "index,eigenvalue\n";
    for (std::size_t i = 0; i < result.eigenvalues.size(); ++i) {
      s += std::to_string(i) + "," + fmt17(result.eigenvalues[i]) + "\n";
    }
    s += "# lambda1=" + fmt17(result.lambda1) + " volume=" + fmt17(result.volume) +
         " invariant=" + fmt17(result.invariant) + " bound=" + fmt17(result.bound) +
         " margin=" + fmt17(result.margin) + "\n";
    payload = std::move(s);
  }
  write_output(cfg, payload);
  return kExitOk;
}

// ------------------------------------------------------------------ verify

struct VerifyRow {
  std::string id;
  SpectralResult result;
};

int cmd_verify(const RunConfig& cfg) {
  const QuadratureRule rule = cfg.make_rule();

  // sweep items; factor parameters derive from (seed, index) so results do
  // not depend on worker scheduling
  std::vector<ConformalFactor> factors;
  if (!cfg.t_grid.empty()) {
    for (std::size_t i = 0; i < cfg.t_grid.size(); ++i) {
      const double t = cfg.t_grid[i];
      if (t < 0.0) throw ParseError("config: extremal t must be >= 0");
      RandomStream rng(cfg.rule.seed * 1000003ull + i);
      factors.push_back(ConformalFactor::extremal(random_sphere_point(cfg.n, rng), t));
    }
  }
  if (!cfg.eps_grid.empty()) {
    for (int s = 0; s < cfg.samples; ++s) {
      RandomStream rng(cfg.rule.seed * 7777777ull + static_cast<std::uint64_t>(s));
      const RealPolynomial g = random_polynomial(2 * cfg.n + 2, 2, rng);
      for (double eps : cfg.eps_grid) {
        factors.push_back(ConformalFactor::exp_poly(g, eps));
      }
    }
  }
  if (factors.empty()) factors.push_back(ConformalFactor::parse(cfg.factor, cfg.n));

  std::vector<VerifyRow> rows(factors.size());
  std::vector<std::exception_ptr> errors(factors.size());
  {
    std::atomic<std::size_t> next{0};
    auto worker = [&](bool inside_pool) {
      detail::tls_in_worker = inside_pool;
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= factors.size()) break;
        try {
          rows[i].id = factors[i].id();
          rows[i].result = invariant_report(factors[i], cfg.n, cfg.degree, rule, 8);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
      detail::tls_in_worker = false;
    };
    const std::size_t pool_size =
        std::min<std::size_t>(static_cast<std::size_t>(worker_count()), factors.size());
    if (pool_size <= 1) {
      worker(false);
    } else {
      std::vector<std::thread> pool;
      for (std::size_t i = 0; i < pool_size; ++i) pool.emplace_back(worker, true);
      for (auto& th : pool) th.join();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  int violations = 0;
  for (const auto& row : rows) {
    if (row.result.margin < -cfg.allowance * row.result.bound) ++violations;
  }

  std::string payload;
  if (cfg.format == "json") {
    json j;
    j["config"] = cfg.to_json();
    json jrows = json::array();
    for (const auto& row : rows) {
      jrows.push_back({{"factor", row.id},
                       {"lambda1", row.result.lambda1},
                       {"volume", row.result.volume},
                       {"invariant", row.result.invariant},
                       {"bound", row.result.bound},
                       {"margin", row.result.margin}});
    }
    j["rows"] = jrows;
    j["violations"] = violations;
    payload = j.dump(2) + "\n";
  } else {
    std::string s = csv_preamble(cfg);
    s += "factor,lambda1,volume,invariant,bound,margin\n";
    for (const auto& row : rows) {
      s += row.id + "," + fmt17(row.result.lambda1) + "," + fmt17(row.result.volume) + "," +
           fmt17(row.result.invariant) + "," + fmt17(row.result.bound) + "," +
           fmt17(row.result.margin) + "\n";
    }
    payload = std::move(s);
  }
  write_output(cfg, payload);
  if (violations > 0) {
    std::cerr << "crspectra verify: " << violations
              << " run(s) violate the bound beyond the allowance (either a bug or insufficient "
                 "resolution)\n";
    return kExitClaimViolation;
  }
  return kExitOk;
}

// ----------------------------------------------------------------- balance

int cmd_balance(const RunConfig& cfg) {
  const ConformalFactor factor = ConformalFactor::parse(cfg.factor, cfg.n);
  const QuadratureRule rule = cfg.make_rule();
  const WeightedMeasure mu = WeightedMeasure::from_density(rule, factor);
  const BalancePoint bp = solve_balance(mu);

  std::string payload;
  if (cfg.format == "json") {
    json j;
    j["config"] = cfg.to_json();
    j["result"] = to_json(bp);
    payload = j.dump(2) + "\n";
  } else {
    std::string s = csv_preamble(cfg);
    s += "t,residual,iterations";
    for (int c = 0; c < 2 * cfg.n + 2; ++c) s += ",pole" + std::to_string(c + 1);
    s += "\n" + fmt17(bp.t) + "," + fmt17(bp.residual) + "," + std::to_string(bp.iterations);
    for (int c = 0; c < 2 * cfg.n + 2; ++c) s += "," + fmt17(bp.pole[c]);
    s += "\n";
    payload = std::move(s);
  }
  write_output(cfg, payload);
  return bp.residual <= kBalanceResidualTol ? kExitOk : kExitNumericalFailure;
}

// -------------------------------------------------------- check-identities

struct IdentityCheck {
  std::string name;
  std::size_t samples = 0;
  double max_residual = 0.0;
  double threshold = 0.0;
  bool pass() const { return max_residual <= threshold; }
};

int cmd_check_identities(const RunConfig& cfg) {
  const int n = cfg.n;
  const std::uint64_t seed = cfg.rule.seed;
  const std::size_t samples = static_cast<std::size_t>(cfg.samples);
  std::vector<IdentityCheck> checks;

  // dilation parameters come from --t-grid when given (e.g. a pure t = 0
  // batch), otherwise uniform in [0, 1]
  const auto draw_t = [&](RandomStream& rng, std::size_t i) {
    if (cfg.t_grid.empty()) return rng.uniform(0.0, 1.0);
    return cfg.t_grid[i % cfg.t_grid.size()];
  };

  {
    IdentityCheck group{"group_law", samples, 0.0, 1e-10};
    IdentityCheck cocycle{"pullback_cocycle", samples, 0.0, 1e-10};
    IdentityCheck conj{"unitary_conjugation", samples, 0.0, 1e-10};
    IdentityCheck sphere{"sphere_preservation", samples, 0.0, 1e-12};
    IdentityCheck pullback{"pullback_residual_fd", samples, 0.0, 1e-6};
    IdentityCheck cayley{"cayley_roundtrip", samples, 0.0, 1e-12};
    RandomStream rng(seed);
    for (std::size_t i = 0; i < samples; ++i) {
      const SpherePoint p = random_sphere_point(n, rng);
      const SpherePoint z = random_sphere_point(n, rng);
      const double s = draw_t(rng, i);
      const double t = draw_t(rng, i);

      const CrAutomorphism g_s(p, s), g_t(p, t), g_st(p, s + t);
      const AutomorphismChain chain = compose(g_s, g_t);
      group.max_residual = std::max(
          group.max_residual, (chain.apply(z).coords() - apply(g_st, z).coords()).norm());
      cocycle.max_residual = std::max(
          cocycle.max_residual, std::abs(chain.pullback_factor(z) - pullback_factor(g_st, z)));

      const Eigen::MatrixXd alpha = unitary_to_pole(p);
      const CrAutomorphism conjugated(last_coordinate_pole(n), s + t, alpha, alpha.transpose());
      conj.max_residual = std::max(
          conj.max_residual, (apply(conjugated, z).coords() - apply(g_st, z).coords()).norm());

      const CrAutomorphism g_fd(p, 2.0 * t);
      sphere.max_residual = std::max(sphere.max_residual, apply_sphere_drift(g_fd, z));
      pullback.max_residual = std::max(pullback.max_residual, pullback_residual(g_fd, z, 1e-6));

      if ((z.coords() - last_coordinate_pole(n).coords()).norm() > 1e-6) {
        cayley.max_residual =
            std::max(cayley.max_residual,
                     (cayley_to_sphere(cayley_to_siegel(z)).coords() - z.coords()).norm());
      }
    }
    checks.insert(checks.end(), {group, cocycle, conj, sphere, pullback, cayley});
  }

  // change-of-variables volume law on the exact rule; t restricted to the
  // rule's convergent regime (see README), the acceptance suite sweeps t <= 1
  if (n == 1) {
    IdentityCheck vol{"volume_law", 0, 0.0, 1e-8};
    const QuadratureRule rule = product_rule_s3(24);
    RandomStream rng(seed + 17);
    for (double t : {0.25, 0.5}) {
      const ConformalFactor f = ConformalFactor::extremal(random_sphere_point(n, rng), t);
      const double v = integrate(
          [&](const SpherePoint& z) {
            const double fz = f.eval(z);
            return fz * fz;
          },
          rule);
      vol.max_residual = std::max(vol.max_residual, std::abs(v - rule.total_weight()));
      vol.samples += 1;
    }
    checks.push_back(vol);
  }

  bool all_pass = true;
  std::string payload;
  if (cfg.format == "json") {
    json j;
    j["config"] = cfg.to_json();
    json jchecks = json::array();
    for (const auto& c : checks) {
      all_pass = all_pass && c.pass();
      jchecks.push_back({{"check", c.name},
                         {"samples", c.samples},
                         {"max_residual", c.max_residual},
                         {"threshold", c.threshold},
                         {"pass", c.pass()}});
    }
    j["checks"] = jchecks;
    payload = j.dump(2) + "\n";
  } else {
    std::string s = csv_preamble(cfg);
    s += "check,samples,max_residual,threshold,pass\n";
    for (const auto& c : checks) {
      all_pass = all_pass && c.pass();
      s += c.name + "," + std::to_string(c.samples) + "," + fmt17(c.max_residual) + "," +
           fmt17(c.threshold) + "," + (c.pass() ? "1" : "0") + "\n";
    }
    payload = std::move(s);
  }
  write_output(cfg, payload);
  return all_pass ? kExitOk : kExitClaimViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sub-Laplacian spectra on CR spheres"};
  app.require_subcommand(1);

  ConfigBinding spectrum_cfg, verify_cfg, balance_cfg, check_cfg;
  check_cfg.cfg.samples = 100;  // identity batches default to 100 samples
  spectrum_cfg.attach(app.add_subcommand(
      "spectrum", "Eigenvalues, multiplicity clusters, and the invariant for one factor"));
  verify_cfg.attach(app.add_subcommand(
      "verify", "Margin report for a factor family against the sharp bound"));
  balance_cfg.attach(app.add_subcommand(
      "balance", "Barycenter balancing pair (p, t) for the measure f^{n+1} psi_0"));
  check_cfg.attach(app.add_subcommand(
      "check-identities", "Batch residual checks: group law, cocycle, pullback, volume law"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  const auto run = [&](const ConfigBinding& binding, auto&& fn) -> int {
    try {
      const RunConfig cfg = binding.resolve();
      return fn(cfg);
    } catch (const ParseError& e) {
      std::cerr << "crspectra: configuration error: " << e.what() << "\n";
      return kExitConfigError;
    } catch (const Error& e) {
      std::cerr << "crspectra: numerical failure: " << e.what() << "\n";
      return kExitNumericalFailure;
    } catch (const std::exception& e) {
      std::cerr << "crspectra: error: " << e.what() << "\n";
      return kExitNumericalFailure;
    }
  };

  if (spectrum_cfg.cmd->parsed()) return run(spectrum_cfg, cmd_spectrum);
  if (verify_cfg.cmd->parsed()) return run(verify_cfg, cmd_verify);
  if (balance_cfg.cmd->parsed()) return run(balance_cfg, cmd_balance);
  if (check_cfg.cmd->parsed()) return run(check_cfg, cmd_check_identities);
  return kExitConfigError;
}
