#pragma once

#include <complex>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "levyspec/rng.hpp"

namespace levyspec {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// One symmetric atom pair: mass `mass` at +x and the same mass at -x.
struct Atom {
  double x = 0;     // location, > 0
  double mass = 0;  // per-side mass, > 0
};

// One symmetric power-law component with density scale * |x|^(-1-alpha) on
// xmin < |x| < xmax, present on both signs. Lévy-admissible pieces have
// alpha in (0, 2); intensity images of such pieces carry alpha in (-2, 0).
struct PowerPiece {
  double alpha = 1;
  double scale = 1;
  double xmin = 0;
  double xmax = kInf;
};

// Symmetric measure on the punctured real line, closed under the closed-form
// operations the laboratory needs (tail masses, truncated moments, inversion,
// sampling of finite-mass restrictions).
class LevyMeasure {
 public:
  LevyMeasure() = default;
  // Validates shape and Lévy integrability (finite \int 1 ∧ x^2).
  LevyMeasure(std::vector<Atom> atoms, std::vector<PowerPiece> pieces);
  // Shape checks only; used for edge-intensity measures whose mass may
  // diverge at infinity instead of at zero.
  static LevyMeasure intensity(std::vector<Atom> atoms, std::vector<PowerPiece> pieces);

  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<PowerPiece>& pieces() const { return pieces_; }
  bool trivial() const { return atoms_.empty() && pieces_.empty(); }

  // Mass of {|x| > eps}; +inf when a piece reaching 0 is unbounded there.
  double mass_above(double eps) const;
  // Mass of the interval (a, b], a < b, on the signed line.
  double mass_interval(double a, double b) const;
  // \int_{|x| <= h} x^2 dPi.
  double second_moment_below(double h) const;
  // \int |x|^p dPi for even p >= 2; +inf when a piece extends to infinity.
  double even_moment(int p) const;
  // \int_{h < |x| <= cap} x dPi; zero by symmetry, evaluated side by side.
  double truncated_first_moment(double h, double cap) const;
  // Essential supremum of |x| on the support (inf when unbounded).
  double support_sup() const;

  // Pushforward under x -> 1/x; an exact involution on the representation.
  LevyMeasure inverted() const;

  // One draw from the normalised restriction to {|x| > eps}. Requires
  // finite positive restricted mass.
  double sample_above(double eps, rng::Stream& stream) const;

 private:
  void basic_checks() const;
  std::vector<Atom> atoms_;
  std::vector<PowerPiece> pieces_;
};

// Characteristic pair (sigma^2, Pi) of a symmetric triple; the drift is
// identically zero and is not represented.
struct LevyCharacteristics {
  double sigma2 = 0;
  LevyMeasure levy;

  void validate() const;

  nlohmann::json to_json() const;
  static LevyCharacteristics from_json(const nlohmann::json& j);

  static LevyCharacteristics wigner(double sigma2);
  static LevyCharacteristics sparse(double c);
  static LevyCharacteristics stable(double alpha);
  // Accepts "wigner", "sparse(<c>)", "stable(<alpha>)".
  static LevyCharacteristics parse_preset(const std::string& text);
};

// One-sided measure on (0, inf) obtained by pushing the symmetric pair
// forward under x -> x^2; pieces carry density scale * y^(-1-alpha).
struct SubordinatorCharacteristics {
  double sigma2 = 0;
  std::vector<Atom> atoms;
  std::vector<PowerPiece> pieces;

  double total_mass() const;
  // \int y^p d(pushforward); p >= 1.
  double moment(int p) const;
};

// Exponent of the characteristic function at frequency theta. Symmetry makes
// the value real (and <= 0); it is returned as a complex number with zero
// imaginary part.
std::complex<double> levy_exponent(const LevyCharacteristics& chars, double theta,
                                   double tol = 1e-10);

SubordinatorCharacteristics subordinator_form(const LevyCharacteristics& chars);

// Edge-weight intensity on resistances: lambda{x : 1/x in B} = Pi(B).
LevyMeasure invert_to_intensity(const LevyMeasure& levy);

// \int |x|^p dPi for even p >= 2.
double measure_moment(const LevyMeasure& levy, int p);

// sigma_h^2 = sigma^2 + \int_{|x| <= h} x^2 dPi.
double gaussian_compensation(const LevyCharacteristics& chars, double h);

// Smallest cutoff eps with mass_above(eps) <= target (0 when the total mass
// is already small enough).
double epsilon_for_mass(const LevyMeasure& levy, double target_mass);

}  // namespace levyspec
