#include "levyspec/levy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "levyspec/errors.hpp"
#include "levyspec/quadrature.hpp"

namespace levyspec {

namespace {

// \int scale * x^{k-1-alpha} dx over (lo, hi) clamped to the piece window,
// one side only. Handles endpoints at 0 and infinity through IEEE limits.
double piece_power_integral(const PowerPiece& pc, double lo, double hi, double k) {
  lo = std::max(lo, pc.xmin);
  hi = std::min(hi, pc.xmax);
  if (!(lo < hi)) return 0.0;
  const double e = k - pc.alpha;
  if (e == 0.0) {
    return pc.scale * std::log(hi / lo);
  }
  const double upper = std::isinf(hi) ? (e < 0 ? 0.0 : kInf) : std::pow(hi, e);
  const double lower = (lo == 0.0) ? (e > 0 ? 0.0 : kInf) : std::pow(lo, e);
  return pc.scale * (upper - lower) / e;
}

void require(bool ok, const char* msg) {
  if (!ok) throw ConfigError(msg);
}

}  // namespace

LevyMeasure::LevyMeasure(std::vector<Atom> atoms, std::vector<PowerPiece> pieces)
    : atoms_(std::move(atoms)), pieces_(std::move(pieces)) {
  basic_checks();
  for (const auto& pc : pieces_) {
    require(pc.alpha > 0.0 && pc.alpha < 2.0,
            "LevyMeasure: piece exponent must lie in (0, 2)");
    if (std::isinf(pc.xmax)) {
      require(pc.alpha > 0.0, "LevyMeasure: unbounded piece needs positive exponent");
    }
  }
}

LevyMeasure LevyMeasure::intensity(std::vector<Atom> atoms, std::vector<PowerPiece> pieces) {
  LevyMeasure m;
  m.atoms_ = std::move(atoms);
  m.pieces_ = std::move(pieces);
  m.basic_checks();
  for (const auto& pc : m.pieces_) {
    require(pc.alpha != 0.0 && std::abs(pc.alpha) < 2.0,
            "LevyMeasure: intensity piece exponent must lie in (-2, 2) \\ {0}");
  }
  return m;
}

void LevyMeasure::basic_checks() const {
  for (const auto& a : atoms_) {
    require(std::isfinite(a.x) && a.x > 0.0, "LevyMeasure: atom location must be finite and > 0");
    require(std::isfinite(a.mass) && a.mass > 0.0, "LevyMeasure: atom mass must be finite and > 0");
  }
  for (const auto& pc : pieces_) {
    require(std::isfinite(pc.scale) && pc.scale > 0.0, "LevyMeasure: piece scale must be > 0");
    require(pc.xmin >= 0.0 && pc.xmin < pc.xmax, "LevyMeasure: piece window must satisfy 0 <= xmin < xmax");
    require(!std::isinf(pc.xmin), "LevyMeasure: piece lower cutoff must be finite");
  }
}

double LevyMeasure::mass_above(double eps) const {
  double total = 0.0;
  for (const auto& a : atoms_) {
    if (a.x > eps) total += 2.0 * a.mass;
  }
  for (const auto& pc : pieces_) {
    total += 2.0 * piece_power_integral(pc, eps, kInf, 0.0);
  }
  return total;
}

double LevyMeasure::mass_interval(double a, double b) const {
  require(a < b, "mass_interval: needs a < b");
  double total = 0.0;
  // Positive side: x in (max(a,0), b].
  if (b > 0.0) {
    const double lo = std::max(a, 0.0);
    for (const auto& at : atoms_) {
      if (at.x > lo && at.x <= b) total += at.mass;
    }
    for (const auto& pc : pieces_) {
      total += piece_power_integral(pc, lo, b, 0.0);
    }
  }
  // Negative side: -x in (a, min(b,0)] i.e. x in [-b', -a) with b' = min(b,0).
  if (a < 0.0) {
    const double hi = -a;                  // exclusive
    const double lo = -std::min(b, 0.0);   // inclusive
    for (const auto& at : atoms_) {
      if (at.x >= lo && at.x < hi) total += at.mass;
    }
    for (const auto& pc : pieces_) {
      total += piece_power_integral(pc, lo, hi, 0.0);
    }
  }
  return total;
}

double LevyMeasure::second_moment_below(double h) const {
  double total = 0.0;
  for (const auto& a : atoms_) {
    if (a.x <= h) total += 2.0 * a.mass * a.x * a.x;
  }
  for (const auto& pc : pieces_) {
    total += 2.0 * piece_power_integral(pc, 0.0, h, 2.0);
  }
  return total;
}

double LevyMeasure::even_moment(int p) const {
  require(p >= 2 && p % 2 == 0, "even_moment: order must be even and >= 2");
  double total = 0.0;
  for (const auto& a : atoms_) {
    total += 2.0 * a.mass * std::pow(a.x, double(p));
  }
  for (const auto& pc : pieces_) {
    total += 2.0 * piece_power_integral(pc, 0.0, kInf, double(p));
  }
  return total;
}

double LevyMeasure::truncated_first_moment(double h, double cap) const {
  require(h >= 0.0 && cap > h, "truncated_first_moment: needs 0 <= h < cap");
  auto one_side = [&]() {
    double v = 0.0;
    for (const auto& a : atoms_) {
      if (a.x > h && a.x <= cap) v += a.mass * a.x;
    }
    for (const auto& pc : pieces_) {
      v += piece_power_integral(pc, h, cap, 1.0);
    }
    return v;
  };
  // The two sides carry identical magnitude and opposite sign.
  return one_side() - one_side();
}

double LevyMeasure::support_sup() const {
  double sup = 0.0;
  for (const auto& a : atoms_) sup = std::max(sup, a.x);
  for (const auto& pc : pieces_) sup = std::max(sup, pc.xmax);
  return sup;
}

LevyMeasure LevyMeasure::inverted() const {
  std::vector<Atom> atoms;
  atoms.reserve(atoms_.size());
  for (const auto& a : atoms_) atoms.push_back({1.0 / a.x, a.mass});
  std::vector<PowerPiece> pieces;
  pieces.reserve(pieces_.size());
  for (const auto& pc : pieces_) {
    const double lo = std::isinf(pc.xmax) ? 0.0 : 1.0 / pc.xmax;
    const double hi = (pc.xmin == 0.0) ? kInf : 1.0 / pc.xmin;
    pieces.push_back({-pc.alpha, pc.scale, lo, hi});
  }
  return intensity(std::move(atoms), std::move(pieces));
}

double LevyMeasure::sample_above(double eps, rng::Stream& stream) const {
  struct Component {
    double weight;
    bool is_atom;
    std::size_t index;
  };
  std::vector<Component> comps;
  double total = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (atoms_[i].x > eps) {
      const double w = 2.0 * atoms_[i].mass;
      comps.push_back({w, true, i});
      total += w;
    }
  }
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const double w = 2.0 * piece_power_integral(pieces_[i], eps, kInf, 0.0);
    if (!std::isfinite(w)) {
      throw ConfigError("sample_above: restricted mass is infinite; raise the cutoff");
    }
    if (w > 0.0) {
      comps.push_back({w, false, i});
      total += w;
    }
  }
  if (!(total > 0.0)) {
    throw ConfigError("sample_above: restricted measure has zero mass");
  }
  double u = stream.uniform01() * total;
  const Component* chosen = &comps.back();
  for (const auto& c : comps) {
    if (u < c.weight) {
      chosen = &c;
      break;
    }
    u -= c.weight;
  }
  double magnitude;
  if (chosen->is_atom) {
    magnitude = atoms_[chosen->index].x;
  } else {
    const auto& pc = pieces_[chosen->index];
    const double a = std::max(eps, pc.xmin);
    const double big_a = std::pow(a, -pc.alpha);
    const double big_b = std::isinf(pc.xmax) ? 0.0 : std::pow(pc.xmax, -pc.alpha);
    const double v = stream.uniform01();
    magnitude = std::pow(big_a - v * (big_a - big_b), -1.0 / pc.alpha);
  }
  return stream.rademacher() * magnitude;
}

void LevyCharacteristics::validate() const {
  require(std::isfinite(sigma2) && sigma2 >= 0.0, "LevyCharacteristics: sigma2 must be >= 0");
}

nlohmann::json LevyCharacteristics::to_json() const {
  nlohmann::json j;
  j["sigma2"] = sigma2;
  j["atoms"] = nlohmann::json::array();
  for (const auto& a : levy.atoms()) {
    j["atoms"].push_back({{"x", a.x}, {"mass", a.mass}});
  }
  j["power_pieces"] = nlohmann::json::array();
  for (const auto& pc : levy.pieces()) {
    nlohmann::json p = {{"alpha", pc.alpha}, {"scale", pc.scale}, {"xmin", pc.xmin}};
    if (std::isinf(pc.xmax)) {
      p["xmax"] = nullptr;
    } else {
      p["xmax"] = pc.xmax;
    }
    j["power_pieces"].push_back(p);
  }
  return j;
}

LevyCharacteristics LevyCharacteristics::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("characteristics: expected a JSON object");
  if (!j.contains("sigma2") || !j["sigma2"].is_number()) {
    throw ConfigError("characteristics: numeric field \"sigma2\" is required");
  }
  LevyCharacteristics chars;
  chars.sigma2 = j["sigma2"].get<double>();
  std::vector<Atom> atoms;
  if (j.contains("atoms")) {
    if (!j["atoms"].is_array()) throw ConfigError("characteristics: \"atoms\" must be an array");
    for (const auto& a : j["atoms"]) {
      if (!a.is_object() || !a.contains("x") || !a.contains("mass")) {
        throw ConfigError("characteristics: each atom needs \"x\" and \"mass\"");
      }
      atoms.push_back({a["x"].get<double>(), a["mass"].get<double>()});
    }
  }
  std::vector<PowerPiece> pieces;
  if (j.contains("power_pieces")) {
    if (!j["power_pieces"].is_array()) {
      throw ConfigError("characteristics: \"power_pieces\" must be an array");
    }
    for (const auto& p : j["power_pieces"]) {
      if (!p.is_object() || !p.contains("alpha") || !p.contains("scale")) {
        throw ConfigError("characteristics: each power piece needs \"alpha\" and \"scale\"");
      }
      PowerPiece pc;
      pc.alpha = p["alpha"].get<double>();
      pc.scale = p["scale"].get<double>();
      pc.xmin = p.value("xmin", 0.0);
      if (!p.contains("xmax") || p["xmax"].is_null()) {
        pc.xmax = kInf;
      } else {
        pc.xmax = p["xmax"].get<double>();
      }
      pieces.push_back(pc);
    }
  }
  chars.levy = LevyMeasure(std::move(atoms), std::move(pieces));
  chars.validate();
  return chars;
}

LevyCharacteristics LevyCharacteristics::wigner(double sigma2) {
  LevyCharacteristics chars;
  chars.sigma2 = sigma2;
  chars.validate();
  return chars;
}

LevyCharacteristics LevyCharacteristics::sparse(double c) {
  require(c > 0.0 && std::isfinite(c), "sparse preset: c must be positive and finite");
  LevyCharacteristics chars;
  chars.sigma2 = 0.0;
  chars.levy = LevyMeasure({Atom{1.0, c / 2.0}}, {});
  return chars;
}

LevyCharacteristics LevyCharacteristics::stable(double alpha) {
  require(alpha > 0.0 && alpha < 2.0, "stable preset: alpha must lie in (0, 2)");
  LevyCharacteristics chars;
  chars.sigma2 = 0.0;
  chars.levy = LevyMeasure({}, {PowerPiece{alpha, alpha, 0.0, kInf}});
  return chars;
}

LevyCharacteristics LevyCharacteristics::parse_preset(const std::string& text) {
  auto parse_arg = [&](const std::string& name) {
    const auto open = text.find('(');
    const auto close = text.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open) {
      throw ConfigError("preset " + name + ": expected " + name + "(<value>)");
    }
    std::istringstream in(text.substr(open + 1, close - open - 1));
    double v;
    if (!(in >> v)) throw ConfigError("preset " + name + ": could not parse numeric argument");
    return v;
  };
  if (text == "wigner") return wigner(1.0);
  if (text.rfind("wigner(", 0) == 0) return wigner(parse_arg("wigner"));
  if (text.rfind("sparse", 0) == 0) return sparse(parse_arg("sparse"));
  if (text.rfind("stable", 0) == 0) return stable(parse_arg("stable"));
  throw ConfigError("unknown preset \"" + text + "\" (expected wigner, sparse(c), stable(alpha))");
}

double SubordinatorCharacteristics::total_mass() const {
  double total = 0.0;
  for (const auto& a : atoms) total += a.mass;
  for (const auto& pc : pieces) total += piece_power_integral(pc, 0.0, kInf, 0.0);
  return total;
}

double SubordinatorCharacteristics::moment(int p) const {
  require(p >= 1, "SubordinatorCharacteristics::moment: order must be >= 1");
  double total = 0.0;
  for (const auto& a : atoms) total += a.mass * std::pow(a.x, double(p));
  for (const auto& pc : pieces) total += piece_power_integral(pc, 0.0, kInf, double(p));
  return total;
}

namespace {

// Asymptotic expansion of \int_A^infty cos(u) u^{-1-alpha} du by repeated
// integration by parts; valid once A is large (A >= ~500 gives ~1e-12 here).
double cosine_tail(double A, double alpha) {
  double value = 0.0;
  double coeff = 1.0;
  double expo = 1.0 + alpha;
  for (int k = 0; k < 12; ++k) {
    value += -std::sin(A) * coeff * std::pow(A, -expo) +
             expo * coeff * std::cos(A) * std::pow(A, -expo - 1.0);
    coeff *= -(expo * (expo + 1.0));
    expo += 2.0;
    if (std::abs(coeff) * std::pow(A, -expo) < 1e-16) break;
  }
  return value;
}

// J(a, b) = \int_a^b (cos u - 1) u^{-1-alpha} du for 0 <= a < b <= inf,
// alpha in (0, 2). Splits into a series region near zero, an adaptive
// region, and an asymptotic tail.
double cosine_minus_one_integral(double a, double b, double alpha, double tol) {
  double value = 0.0;
  const double delta = std::min(0.01, b);
  if (a < delta) {
    // cos u - 1 = -u^2/2 + u^4/24 - ... ; two terms leave error < 1e-14.
    auto term = [&](double k, double denom) {
      const double e = k - alpha;
      return (std::pow(delta, e) - (a == 0.0 ? 0.0 : std::pow(a, e))) / (denom * e);
    };
    value += -0.5 * term(2.0, 1.0) + term(4.0, 24.0);
    a = delta;
  }
  if (!(a < b)) return value;
  const double mid = std::min(b, 100.0);
  if (a < mid) {
    // March in half-period chunks so the Simpson error estimate never sees a
    // full oscillation; a single sweep over [a, mid] can alias.
    const auto integrand = [&](double u) {
      const double s = std::sin(0.5 * u);
      return -2.0 * s * s * std::pow(u, -1.0 - alpha);
    };
    constexpr double kPi = 3.14159265358979323846;
    const int chunks = std::max(1, int(std::ceil((mid - a) / kPi)));
    const double chunk_tol = tol / chunks;
    for (int c = 0; c < chunks; ++c) {
      const double lo = a + (mid - a) * c / chunks;
      const double hi = a + (mid - a) * (c + 1) / chunks;
      value += integrate_adaptive(integrand, lo, hi, chunk_tol, 48,
                                  "levy exponent oscillatory region");
    }
  }
  if (b > mid) {
    // Remaining (cos u - 1) tail: exact -mass part plus small cosine part.
    const double mass_part = std::isinf(b)
                                 ? std::pow(mid, -alpha) / alpha
                                 : (std::pow(mid, -alpha) - std::pow(b, -alpha)) / alpha;
    value -= mass_part;
    value += cosine_tail(mid, alpha);
    if (!std::isinf(b)) value -= cosine_tail(b, alpha);
  }
  return value;
}

}  // namespace

std::complex<double> levy_exponent(const LevyCharacteristics& chars, double theta, double tol) {
  chars.validate();
  const double t = std::abs(theta);
  double value = -0.5 * theta * theta * chars.sigma2;
  if (t > 0.0) {
    for (const auto& a : chars.levy.atoms()) {
      value += 2.0 * a.mass * (std::cos(t * a.x) - 1.0);
    }
    for (const auto& pc : chars.levy.pieces()) {
      const double a = t * pc.xmin;
      const double b = std::isinf(pc.xmax) ? kInf : t * pc.xmax;
      value += 2.0 * pc.scale * std::pow(t, pc.alpha) *
               cosine_minus_one_integral(a, b, pc.alpha, tol);
    }
  }
  return {value, 0.0};
}

SubordinatorCharacteristics subordinator_form(const LevyCharacteristics& chars) {
  SubordinatorCharacteristics sub;
  sub.sigma2 = chars.sigma2;
  for (const auto& a : chars.levy.atoms()) {
    sub.atoms.push_back({a.x * a.x, 2.0 * a.mass});
  }
  for (const auto& pc : chars.levy.pieces()) {
    // Both signs collapse onto (0, inf); density scale * y^{-1-alpha/2}.
    sub.pieces.push_back({pc.alpha / 2.0, pc.scale, pc.xmin * pc.xmin,
                          std::isinf(pc.xmax) ? kInf : pc.xmax * pc.xmax});
  }
  return sub;
}

LevyMeasure invert_to_intensity(const LevyMeasure& levy) { return levy.inverted(); }

double measure_moment(const LevyMeasure& levy, int p) { return levy.even_moment(p); }

double gaussian_compensation(const LevyCharacteristics& chars, double h) {
  chars.validate();
  require(h >= 0.0, "gaussian_compensation: h must be >= 0");
  return chars.sigma2 + chars.levy.second_moment_below(h);
}

double epsilon_for_mass(const LevyMeasure& levy, double target_mass) {
  require(target_mass > 0.0, "epsilon_for_mass: target mass must be > 0");
  if (levy.mass_above(0.0) <= target_mass) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (levy.mass_above(hi) > target_mass) {
    hi *= 2.0;
    if (hi > 1e300) throw NumericError("epsilon_for_mass: no admissible cutoff found");
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (levy.mass_above(mid) > target_mass) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

}  // namespace levyspec
