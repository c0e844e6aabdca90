#include "ifslab/ifs.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ifslab/errors.hpp"
#include "ifslab/rng.hpp"

namespace ifslab {

ParameterSpace ParameterSpace::finite(int count) {
  if (count < 1) throw InvalidArgument("parameter space needs at least one label");
  ParameterSpace s;
  s.v_ = FiniteSpace{count};
  return s;
}

ParameterSpace ParameterSpace::box(const BoxDomain& b, double net_spacing) {
  if (!(net_spacing > 0.0)) throw InvalidArgument("parameter net spacing must be > 0");
  ParameterSpace s;
  s.v_ = BoxSpace{b, net_spacing};
  return s;
}

int ParameterSpace::label_count() const {
  if (!is_finite()) throw InvalidArgument("label_count: parameter space is a box");
  return std::get<FiniteSpace>(v_).count;
}

const BoxSpace& ParameterSpace::as_box() const {
  if (is_finite()) throw InvalidArgument("as_box: parameter space is finite");
  return std::get<BoxSpace>(v_);
}

std::vector<ParamValue> ParameterSpace::net(std::size_t point_budget) const {
  std::vector<ParamValue> out;
  if (is_finite()) {
    const int m = label_count();
    out.reserve(m);
    for (int l = 1; l <= m; ++l) out.push_back(ParamValue::of_label(l));
    return out;
  }
  const BoxSpace& bs = std::get<BoxSpace>(v_);
  const PointCloud grid = epsilon_net(bs.box, bs.net_spacing, point_budget);
  out.reserve(grid.size());
  for (const Point& p : grid.points()) out.push_back(ParamValue::of_coords(p));
  return out;
}

double ParameterSpace::net_eps() const {
  return is_finite() ? 0.0 : std::get<BoxSpace>(v_).net_spacing;
}

ParamValue ParamValue::of_label(int l) {
  if (l < 1) throw InvalidArgument("labels are 1-based");
  ParamValue v;
  v.label = l;
  return v;
}

ParamValue ParamValue::of_coords(const Point& p) {
  ParamValue v;
  v.coords = p;
  return v;
}

bool operator==(const ParamValue& a, const ParamValue& b) {
  return a.label == b.label && a.coords == b.coords;
}

bool word_in_space(const ParameterSpace& space, const Word& w, double tol) {
  for (const ParamValue& v : w) {
    if (space.is_finite()) {
      if (v.label < 1 || v.label > space.label_count()) return false;
    } else {
      if (v.label != 0) return false;
      if (!space.as_box().box.contains(v.coords, tol)) return false;
    }
  }
  return true;
}

ParamMeasure ParamMeasure::finite(const ParameterSpace& space, std::vector<double> probs) {
  if (!space.is_finite()) throw InvalidArgument("finite law needs a finite parameter space");
  if (static_cast<int>(probs.size()) != space.label_count()) {
    throw InvalidArgument("probability vector length must match label count");
  }
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw InvalidArgument("probabilities must be >= 0");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw InvalidArgument("probabilities must sum to 1 (got " + std::to_string(total) + ")");
  }
  ParamMeasure m;
  m.space_ = space;
  m.probs_ = std::move(probs);
  m.cdf_.resize(m.probs_.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < m.probs_.size(); ++i) {
    acc += m.probs_[i];
    m.cdf_[i] = acc;
  }
  m.cdf_.back() = 1.0;
  return m;
}

ParamMeasure ParamMeasure::uniform(const ParameterSpace& space) {
  if (space.is_finite()) {
    const int m = space.label_count();
    return finite(space, std::vector<double>(m, 1.0 / static_cast<double>(m)));
  }
  ParamMeasure u;
  u.space_ = space;
  return u;
}

double ParamMeasure::min_prob() const {
  if (!is_finite()) throw InvalidArgument("min_prob: box law");
  double m = 1.0;
  for (double p : probs_) m = std::min(m, p);
  return m;
}

ParamValue ParamMeasure::sample(std::mt19937_64& gen) const {
  if (is_finite()) {
    const double u = uniform01(gen);
    // Inverse CDF; the final entry is exactly 1 so u < 1 always lands.
    for (std::size_t i = 0; i < cdf_.size(); ++i) {
      if (u < cdf_[i]) return ParamValue::of_label(static_cast<int>(i) + 1);
    }
    return ParamValue::of_label(static_cast<int>(cdf_.size()));
  }
  const BoxDomain& b = space_.as_box().box;
  Point p;
  p.dim = b.dim();
  for (int i = 0; i < p.dim; ++i) p.c[i] = uniform_in(gen, b.lo.c[i], b.hi.c[i]);
  return ParamValue::of_coords(p);
}

WordStream::WordStream(std::uint64_t seed, ParamMeasure law)
    : seed_(seed), law_(std::move(law)), gen_(seed) {}

const ParamValue& WordStream::letter(std::size_t i) const {
  while (cache_.size() <= i) cache_.push_back(law_.sample(gen_));
  return cache_[i];
}

Word WordStream::prefix(std::size_t n) const {
  Word w;
  w.reserve(n);
  for (std::size_t i = 0; i < n; ++i) w.push_back(letter(i));
  return w;
}

Point AffineMap::apply(const Point& x) const {
  Point y;
  y.dim = dim;
  for (int i = 0; i < dim; ++i) {
    double acc = b[i];
    for (int j = 0; j < dim; ++j) acc += A[i][j] * x.c[j];
    y.c[i] = acc == 0.0 ? 0.0 : acc;
  }
  return y;
}

double AffineMap::operator_norm() const {
  // Power iteration on A^T A; plenty for d <= 3 reporting purposes.
  double v[3] = {1.0, 1.0, 1.0};
  double norm = 0.0;
  for (int it = 0; it < 200; ++it) {
    double av[3] = {0, 0, 0};
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) av[i] += A[i][j] * v[j];
    double atav[3] = {0, 0, 0};
    for (int j = 0; j < dim; ++j)
      for (int i = 0; i < dim; ++i) atav[j] += A[i][j] * av[i];
    double len = 0.0;
    for (int i = 0; i < dim; ++i) len += atav[i] * atav[i];
    len = std::sqrt(len);
    if (len == 0.0) return 0.0;
    for (int i = 0; i < dim; ++i) v[i] = atav[i] / len;
    norm = len;
  }
  return std::sqrt(norm);
}

AffineMap make_affine(int dim, std::span<const double> a_rowmajor, std::span<const double> b) {
  if (dim < 1 || dim > kMaxDim) throw InvalidArgument("affine map: dimension must be 1..3");
  if (a_rowmajor.size() != static_cast<std::size_t>(dim * dim) ||
      b.size() != static_cast<std::size_t>(dim)) {
    throw InvalidArgument("affine map: wrong coefficient count");
  }
  AffineMap m;
  m.dim = dim;
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      const double v = a_rowmajor[i * dim + j];
      if (!std::isfinite(v)) throw InvalidArgument("affine map: non-finite entry");
      m.A[i][j] = v;
    }
    if (!std::isfinite(b[i])) throw InvalidArgument("affine map: non-finite entry");
    m.b[i] = b[i];
  }
  return m;
}

double Poly2::eval(const Point& lam) const {
  double acc = c0;
  for (int i = 0; i < lam.dim; ++i) acc += lin[i] * lam.c[i];
  int q = 0;
  for (int i = 0; i < lam.dim; ++i) {
    for (int j = i; j < lam.dim; ++j) {
      // quad index follows the fixed (i<=j) pair order for dim 3
      const int idx[3][3] = {{0, 1, 2}, {-1, 3, 4}, {-1, -1, 5}};
      q = idx[i][j];
      acc += quad[q] * lam.c[i] * lam.c[j];
    }
  }
  return acc;
}

Poly2 Poly2::constant(double c) {
  Poly2 p;
  p.c0 = c;
  return p;
}

AffineMap PolyAffineMap::at(const Point& lam) const {
  AffineMap m;
  m.dim = dim;
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) m.A[i][j] = A[i][j].eval(lam);
    m.b[i] = b[i].eval(lam);
  }
  return m;
}

IfsFamily IfsFamily::affine_list(std::vector<AffineMap> maps, const BoxDomain& domain,
                                 const FamilyOptions& opts) {
  if (maps.empty()) throw InvalidArgument("affine_list: need at least one map");
  for (const AffineMap& m : maps) {
    if (m.dim != domain.dim()) throw DimensionMismatch("affine_list: map/domain dimensions");
  }
  IfsFamily f;
  f.kind_ = Kind::affine_list;
  f.maps_ = std::move(maps);
  f.space_ = ParameterSpace::finite(static_cast<int>(f.maps_.size()));
  f.domain_ = domain;
  f.invariance_tol_ = opts.invariance_tol;
  f.validate_invariance(opts);
  return f;
}

IfsFamily IfsFamily::poly_affine_box(PolyAffineMap map, const ParameterSpace& lambda,
                                     const BoxDomain& domain, const FamilyOptions& opts) {
  if (lambda.is_finite()) throw InvalidArgument("poly_affine_box: parameter space must be a box");
  if (map.dim != domain.dim()) throw DimensionMismatch("poly_affine_box: map/domain dimensions");
  IfsFamily f;
  f.kind_ = Kind::poly_affine_box;
  f.poly_ = std::move(map);
  f.space_ = lambda;
  f.domain_ = domain;
  f.invariance_tol_ = opts.invariance_tol;
  f.validate_invariance(opts);
  return f;
}

IfsFamily IfsFamily::analytic_1d(AnalyticFamily which, const BoxDomain& domain,
                                 const FamilyOptions& opts) {
  if (domain.dim() != 1) throw DimensionMismatch("analytic_1d: domain must be one-dimensional");
  IfsFamily f;
  f.kind_ = Kind::analytic_1d;
  f.analytic_ = which;
  f.space_ = ParameterSpace::finite(1);
  f.domain_ = domain;
  f.invariance_tol_ = opts.invariance_tol;
  f.validate_invariance(opts);
  return f;
}

Point IfsFamily::apply(const ParamValue& lam, const Point& x) const {
  if (x.dim != domain_.dim()) throw DimensionMismatch("apply: point/domain dimensions");
  Point y;
  switch (kind_) {
    case Kind::affine_list: {
      if (lam.label < 1 || lam.label > static_cast<int>(maps_.size())) {
        throw InvalidArgument("apply: label " + std::to_string(lam.label) + " out of range 1.." +
                              std::to_string(maps_.size()));
      }
      y = maps_[static_cast<std::size_t>(lam.label - 1)].apply(x);
      break;
    }
    case Kind::poly_affine_box: {
      if (lam.label != 0 || lam.coords.dim != space_.as_box().box.dim()) {
        throw InvalidArgument("apply: expected box parameter coordinates");
      }
      if (!space_.as_box().box.contains(lam.coords, invariance_tol_)) {
        throw InvalidArgument("apply: parameter outside the parameter box");
      }
      y = poly_.at(lam.coords).apply(x);
      break;
    }
    case Kind::analytic_1d: {
      const double v = x.c[0];
      double r = analytic_ == AnalyticFamily::halving ? v * 0.5 : v / (1.0 + v);
      y.dim = 1;
      y.c[0] = r == 0.0 ? 0.0 : r;
      break;
    }
  }
  const double esc = domain_.escape(y);
  if (esc > invariance_tol_) {
    throw BoxEscape("apply: image left the phase box by " + std::to_string(esc), esc);
  }
  return y;
}

void IfsFamily::validate_invariance(const FamilyOptions& opts) const {
  const PointCloud phase = epsilon_net(domain_, opts.check_net_eps * domain_.diameter() +
                                                    (domain_.diameter() == 0.0 ? 1.0 : 0.0),
                                       opts.net_budget);
  const std::vector<ParamValue> lams = space_.net(opts.net_budget);
  for (const ParamValue& lam : lams) {
    for (const Point& x : phase.points()) {
      apply(lam, x);  // throws BoxEscape on violation
    }
  }
}

std::string IfsFamily::describe() const {
  switch (kind_) {
    case Kind::affine_list:
      return "affine_list[" + std::to_string(maps_.size()) + " maps, dim " +
             std::to_string(dim()) + "]";
    case Kind::poly_affine_box:
      return "poly_affine_box[dim " + std::to_string(dim()) + "]";
    case Kind::analytic_1d:
      return analytic_ == AnalyticFamily::halving ? "analytic_1d[halving]" : "analytic_1d[edalat]";
  }
  return "";
}

Point compose_apply(const IfsFamily& f, const Word& w, const Point& x) {
  Point y = x;
  for (std::size_t i = w.size(); i-- > 0;) y = f.apply(w[i], y);
  return y;
}

std::vector<Point> orbit(const IfsFamily& f, const WordStream& stream, const Point& x,
                         std::size_t n) {
  std::vector<Point> out;
  out.reserve(n + 1);
  out.push_back(x);
  for (std::size_t k = 0; k < n; ++k) out.push_back(f.apply(stream.letter(k), out.back()));
  return out;
}

namespace {

// Depth-n address-order value along a stream: w_{s1}(...w_{sn}(x)...).
Point gamma_at(const IfsFamily& f, const WordStream& stream, const Point& x, std::size_t n) {
  Point y = x;
  for (std::size_t i = n; i-- > 0;) y = f.apply(stream.letter(i), y);
  return y;
}

}  // namespace

GammaLimit gamma_limit(const IfsFamily& f, const WordStream& stream, const Point& x, double tol,
                       std::size_t n_max) {
  if (!(tol > 0.0)) throw InvalidArgument("gamma_limit: tol must be > 0");
  double last_gap = std::numeric_limits<double>::infinity();
  Point cur = gamma_at(f, stream, x, 1);
  for (std::size_t n = 1; 2 * n <= n_max; n *= 2) {
    const Point next = gamma_at(f, stream, x, 2 * n);
    last_gap = dist(cur, next);
    if (last_gap < tol) return GammaLimit{next, 2 * n, last_gap};
    cur = next;
  }
  throw NoConvergence("gamma_limit: no convergence within depth " + std::to_string(n_max) +
                          " (last gap " + std::to_string(last_gap) + ")",
                      last_gap, n_max);
}

}  // namespace ifslab
