#include "crspectra/conformal.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace crspectra {

ConformalFactor ConformalFactor::constant(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw Error("ConformalFactor: constant must be > 0");
  return ConformalFactor(ConstantFactor{c}, -1);  // dimension-agnostic
}

ConformalFactor ConformalFactor::extremal(SpherePoint pole, double t, double scale) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw Error("ConformalFactor: extremal t must be >= 0");
  if (!(scale > 0.0)) throw Error("ConformalFactor: extremal scale must be > 0");
  const int n = pole.dim_n();
  return ConformalFactor(ExtremalFactor{std::move(pole), t, scale}, n);
}

ConformalFactor ConformalFactor::exp_poly(RealPolynomial g, double eps) {
  const int n = g.ambient_dim() / 2 - 1;
  return ConformalFactor(ExpPolyFactor{std::move(g), eps}, n);
}

ConformalFactor ConformalFactor::poly_positive(RealPolynomial h) {
  const int n = h.ambient_dim() / 2 - 1;
  return ConformalFactor(PolyPositiveFactor{std::move(h)}, n);
}

double ConformalFactor::eval(const SpherePoint& z) const {
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, ConstantFactor>) {
          return f.c;
        } else if constexpr (std::is_same_v<T, ExtremalFactor>) {
          const std::complex<double> zp = hermitian_product(z.coords(), f.pole.coords());
          const std::complex<double> denom = std::cosh(f.t) + std::sinh(f.t) * zp;
          return f.scale / std::norm(denom);
        } else if constexpr (std::is_same_v<T, ExpPolyFactor>) {
          return std::exp(f.eps * f.g.eval(z));
        } else {
          return f.h.eval(z);
        }
      },
      value_);
}

ConformalFactor ConformalFactor::precomposed(const Eigen::MatrixXd& unitary) const {
  if (!is_complex_unitary(unitary, 1e-10)) {
    throw Error("ConformalFactor::precomposed: not a J-commuting orthogonal matrix");
  }
  return std::visit(
      [&](const auto& f) -> ConformalFactor {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, ConstantFactor>) {
          return *this;
        } else if constexpr (std::is_same_v<T, ExtremalFactor>) {
          // (U z, p) = (z, U^-1 p): move the pole instead of the argument
          AmbientVector moved = unitary.transpose() * f.pole.coords();
          return extremal(SpherePoint::normalized(std::move(moved), f.pole.dim_n()), f.t, f.scale);
        } else if constexpr (std::is_same_v<T, ExpPolyFactor>) {
          return exp_poly(compose_linear(f.g, unitary), f.eps);
        } else {
          return poly_positive(compose_linear(f.h, unitary));
        }
      },
      value_);
}

std::string ConformalFactor::id() const {
  char buf[96];
  return std::visit(
      [&](const auto& f) -> std::string {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, ConstantFactor>) {
          std::snprintf(buf, sizeof(buf), "constant:c=%.6g", f.c);
        } else if constexpr (std::is_same_v<T, ExtremalFactor>) {
          std::snprintf(buf, sizeof(buf), "extremal:t=%.6g", f.t);
        } else if constexpr (std::is_same_v<T, ExpPolyFactor>) {
          std::snprintf(buf, sizeof(buf), "exppoly:eps=%.6g:deg=%d", f.eps, f.g.total_degree());
        } else {
          std::snprintf(buf, sizeof(buf), "polypositive:deg=%d", f.h.total_degree());
        }
        return buf;
      },
      value_);
}

nlohmann::json ConformalFactor::to_json() const {
  return std::visit(
      [&](const auto& f) -> nlohmann::json {
        using T = std::decay_t<decltype(f)>;
        nlohmann::json j;
        if constexpr (std::is_same_v<T, ConstantFactor>) {
          j["kind"] = "constant";
          j["c"] = f.c;
        } else if constexpr (std::is_same_v<T, ExtremalFactor>) {
          j["kind"] = "extremal";
          j["pole"] = std::vector<double>(f.pole.coords().data(),
                                          f.pole.coords().data() + f.pole.coords().size());
          j["t"] = f.t;
          j["scale"] = f.scale;
        } else if constexpr (std::is_same_v<T, ExpPolyFactor>) {
          j["kind"] = "exppoly";
          j["poly"] = format_polynomial(f.g);
          j["eps"] = f.eps;
        } else {
          j["kind"] = "polypositive";
          j["poly"] = format_polynomial(f.h);
        }
        return j;
      },
      value_);
}

ConformalFactor ConformalFactor::from_json(const nlohmann::json& j, int n) {
  if (!j.is_object() || !j.contains("kind")) {
    throw ParseError("conformal factor JSON must be an object with a 'kind'");
  }
  const std::string kind = j.at("kind").get<std::string>();
  try {
    if (kind == "constant") {
      return constant(j.value("c", 1.0));
    }
    if (kind == "extremal") {
      SpherePoint pole = last_coordinate_pole(n);
      if (j.contains("pole")) {
        const auto coords = j.at("pole").get<std::vector<double>>();
        if (static_cast<int>(coords.size()) != 2 * n + 2) {
          throw ParseError("conformal factor JSON: pole has wrong length");
        }
        pole = SpherePoint(Eigen::Map<const AmbientVector>(coords.data(), coords.size()), n);
      }
      return extremal(std::move(pole), j.value("t", 0.0), j.value("scale", 1.0));
    }
    if (kind == "exppoly") {
      return exp_poly(parse_polynomial(j.at("poly").get<std::string>(), 2 * n + 2),
                      j.value("eps", 1.0));
    }
    if (kind == "polypositive") {
      return poly_positive(parse_polynomial(j.at("poly").get<std::string>(), 2 * n + 2));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("conformal factor JSON: ") + e.what());
  }
  throw ParseError("conformal factor JSON: unknown kind '" + kind + "'");
}

ConformalFactor ConformalFactor::parse(const std::string& text, int n) {
  if (!text.empty() && text.front() == '{') {
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ParseError("conformal factor: malformed JSON");
    return from_json(j, n);
  }
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
  const auto numeric_arg = [&](double fallback) {
    if (arg.empty()) return fallback;
    char* end = nullptr;
    const double v = std::strtod(arg.c_str(), &end);
    if (end != arg.c_str() + arg.size()) {
      throw ParseError("conformal factor: bad numeric argument '" + arg + "'");
    }
    return v;
  };
  if (kind == "constant") return constant(numeric_arg(1.0));
  if (kind == "extremal") return extremal(last_coordinate_pole(n), numeric_arg(0.0));
  throw ParseError("conformal factor: unknown form '" + text + "'");
}

}  // namespace crspectra
