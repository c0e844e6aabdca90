#pragma once

// Families of continuous self-maps of a compact box, indexed by a compact
// parameter set (finite label alphabet or a box in R^k), plus the word and
// stream machinery used to iterate them.
//
// Composition order matters and is easy to get wrong:
//   * compose_apply(f, (s1..sn), x) = w_{s1}( w_{s2}( ... w_{sn}(x) ... ) ),
//     i.e. the LAST letter is applied FIRST (address order);
//   * orbit steps forward: x_{k+1} = w_{sigma_k}(x_k).

#include <cstdint>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "ifslab/metric.hpp"

namespace ifslab {

inline constexpr double kInvarianceTol = 1e-9;

/// Finite label alphabet {1, ..., count}.
struct FiniteSpace {
  int count = 0;
};

/// Box of parameter vectors in R^k with a canonical net spacing.
struct BoxSpace {
  BoxDomain box;
  double net_spacing = 1.0 / 64.0;
};

class ParameterSpace {
 public:
  static ParameterSpace finite(int count);
  static ParameterSpace box(const BoxDomain& b, double net_spacing);

  bool is_finite() const { return std::holds_alternative<FiniteSpace>(v_); }
  int label_count() const;          // finite only
  const BoxSpace& as_box() const;   // box only

  /// All labels (finite) or the regular net over the box.
  std::vector<struct ParamValue> net(std::size_t point_budget = kDefaultNetBudget) const;

  /// Net spacing (0 for finite spaces), for reporting.
  double net_eps() const;

 private:
  std::variant<FiniteSpace, BoxSpace> v_;
};

/// One parameter value: a 1-based label, or coordinates in the parameter box.
struct ParamValue {
  int label = 0;   // >= 1 for finite spaces, 0 for box values
  Point coords{};  // box values only

  static ParamValue of_label(int l);
  static ParamValue of_coords(const Point& p);
};

bool operator==(const ParamValue& a, const ParamValue& b);

/// Finite word; letters are read left to right as sigma_1, sigma_2, ...
using Word = std::vector<ParamValue>;

bool word_in_space(const ParameterSpace& space, const Word& w, double tol = kInvarianceTol);

/// Probability law on a parameter space: an explicit probability vector over
/// labels, or the uniform law on the box.
class ParamMeasure {
 public:
  static ParamMeasure finite(const ParameterSpace& space, std::vector<double> probs);
  static ParamMeasure uniform(const ParameterSpace& space);  // equal labels / Lebesgue

  const ParameterSpace& space() const { return space_; }
  bool is_finite() const { return space_.is_finite(); }
  const std::vector<double>& probs() const { return probs_; }  // finite only
  double min_prob() const;                                     // finite only

  ParamValue sample(std::mt19937_64& gen) const;

 private:
  ParameterSpace space_ = ParameterSpace::finite(1);
  std::vector<double> probs_;  // empty for box laws
  std::vector<double> cdf_;
};

/// Lazy infinite word: letter i (0-based; sigma_{i+1}) is drawn on demand from
/// a seeded engine, cached, and replayed identically on every platform.
class WordStream {
 public:
  WordStream(std::uint64_t seed, ParamMeasure law);

  const ParamValue& letter(std::size_t i) const;
  std::uint64_t seed() const { return seed_; }
  const ParamMeasure& law() const { return law_; }
  Word prefix(std::size_t n) const;

 private:
  std::uint64_t seed_;
  ParamMeasure law_;
  mutable std::mt19937_64 gen_;
  mutable std::vector<ParamValue> cache_;
};

/// Affine self-map y = A x + b on R^d.
struct AffineMap {
  std::array<std::array<double, 3>, 3> A{};
  std::array<double, 3> b{};
  int dim = 0;

  Point apply(const Point& x) const;
  /// Largest singular value (power iteration; reporting/bounds only).
  double operator_norm() const;
};

AffineMap make_affine(int dim, std::span<const double> a_rowmajor, std::span<const double> b);

/// Polynomial of total degree <= 2 in up to three box parameters.
struct Poly2 {
  double c0 = 0.0;
  std::array<double, 3> lin{};
  std::array<double, 6> quad{};  // (0,0),(0,1),(0,2),(1,1),(1,2),(2,2)

  double eval(const Point& lam) const;
  static Poly2 constant(double c);
};

/// Affine map whose entries vary polynomially with the box parameter.
struct PolyAffineMap {
  std::array<std::array<Poly2, 3>, 3> A{};
  std::array<Poly2, 3> b{};
  int dim = 0;

  AffineMap at(const Point& lam) const;
};

enum class AnalyticFamily { halving, edalat };

struct FamilyOptions {
  double invariance_tol = kInvarianceTol;
  double check_net_eps = 1.0 / 16.0;  // construction-check net spacing, fraction of box diameter
  std::size_t net_budget = kDefaultNetBudget;
};

/// A constructed family is guaranteed to map (net points of) Lambda x X into X
/// within the invariance tolerance; apply() enforces the same bound per call.
class IfsFamily {
 public:
  static IfsFamily affine_list(std::vector<AffineMap> maps, const BoxDomain& domain,
                               const FamilyOptions& opts = {});
  static IfsFamily poly_affine_box(PolyAffineMap map, const ParameterSpace& lambda,
                                   const BoxDomain& domain, const FamilyOptions& opts = {});
  static IfsFamily analytic_1d(AnalyticFamily which, const BoxDomain& domain,
                               const FamilyOptions& opts = {});

  Point apply(const ParamValue& lam, const Point& x) const;

  const ParameterSpace& parameter_space() const { return space_; }
  const BoxDomain& domain() const { return domain_; }
  int dim() const { return domain_.dim(); }
  std::vector<ParamValue> parameter_net(std::size_t budget = kDefaultNetBudget) const {
    return space_.net(budget);
  }
  std::string describe() const;

 private:
  IfsFamily() = default;
  void validate_invariance(const FamilyOptions& opts) const;

  enum class Kind { affine_list, poly_affine_box, analytic_1d } kind_ = Kind::affine_list;
  std::vector<AffineMap> maps_;
  PolyAffineMap poly_{};
  AnalyticFamily analytic_ = AnalyticFamily::halving;
  ParameterSpace space_ = ParameterSpace::finite(1);
  BoxDomain domain_{};
  double invariance_tol_ = kInvarianceTol;
};

/// Address-order application: word (s1..sn) acts as w_{s1} o ... o w_{sn};
/// the empty word is the identity.
Point compose_apply(const IfsFamily& f, const Word& w, const Point& x);

/// Forward orbit x_0 = x, x_{k+1} = w_{sigma_{k+1}}(x_k); returns n+1 points.
std::vector<Point> orbit(const IfsFamily& f, const WordStream& stream, const Point& x,
                         std::size_t n);

struct GammaLimit {
  Point value;
  std::size_t n_used = 0;
  double last_gap = 0.0;
};

/// Limit of address-order compositions along a stream, detected by comparing
/// depth n against depth 2n and doubling until the gap is below tol.
/// Throws NoConvergence (carrying the last gap) if 2n would exceed n_max.
GammaLimit gamma_limit(const IfsFamily& f, const WordStream& stream, const Point& x,
                       double tol, std::size_t n_max);

}  // namespace ifslab
