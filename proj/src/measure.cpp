#include "ifslab/measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>

#include "ifslab/errors.hpp"
#include "ifslab/parallel.hpp"

namespace ifslab {

namespace {

constexpr double kMassTol = 1e-12;

void check_atoms(const std::vector<Atom>& atoms) {
  if (atoms.empty()) throw InvalidArgument("measure must have at least one atom");
  const int d = atoms.front().x.dim;
  for (const Atom& a : atoms) {
    if (a.x.dim != d) throw DimensionMismatch("measure: mixed atom dimensions");
    if (!(a.w > 0.0) || !std::isfinite(a.w)) {
      throw InvalidArgument("measure: atom weights must be positive and finite");
    }
  }
}

// Sort by position, pool weights of atoms closer than merge_radius; the
// lexicographically least member of each pool keeps its position.
std::vector<Atom> merge_atoms(std::vector<Atom> atoms, double merge_radius) {
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return lex_less(a.x, b.x); });
  if (atoms.size() < 2) return atoms;
  std::vector<Point> positions;
  positions.reserve(atoms.size());
  for (const Atom& a : atoms) positions.push_back(a.x);
  const std::vector<Point> reps = canonicalize_points(positions, merge_radius);
  if (reps.size() == atoms.size()) return atoms;

  // Assign every atom to its (unique by construction) representative within
  // the merge radius; reps are sorted, so bisect on the first coordinate.
  const double r2 = merge_radius * merge_radius;
  std::vector<Atom> out;
  out.reserve(reps.size());
  for (const Point& rp : reps) out.push_back({rp, 0.0});
  for (const Atom& a : atoms) {
    // candidate reps have first coordinate within merge_radius
    const double lo = a.x.c[0] - merge_radius;
    std::size_t i = std::lower_bound(out.begin(), out.end(), lo,
                                     [](const Atom& rep, double v) { return rep.x.c[0] < v; }) -
                    out.begin();
    bool placed = false;
    for (; i < out.size() && out[i].x.c[0] <= a.x.c[0] + merge_radius; ++i) {
      if (dist2(a.x, out[i].x) <= r2) {
        out[i].w += a.w;
        placed = true;
        break;
      }
    }
    if (!placed) {
      // greedy packing guarantees a representative within the radius
      throw Error("measure canonicalization: atom found no representative");
    }
  }
  return out;
}

}  // namespace

DiscreteMeasure DiscreteMeasure::of(std::vector<Atom> atoms, double merge_radius) {
  check_atoms(atoms);
  DiscreteMeasure m;
  m.dim_ = atoms.front().x.dim;
  m.atoms_ = merge_atoms(std::move(atoms), merge_radius);
  const double mass = m.mass();
  if (std::abs(mass - 1.0) > kMassTol) {
    throw InvalidArgument("measure mass must be 1 within 1e-12, got " + std::to_string(mass));
  }
  return m;
}

DiscreteMeasure DiscreteMeasure::normalized(std::vector<Atom> atoms, double merge_radius) {
  check_atoms(atoms);
  double mass = 0.0;
  for (const Atom& a : atoms) mass += a.w;
  if (!(mass > 0.0)) throw InvalidArgument("measure: total mass must be positive");
  for (Atom& a : atoms) a.w /= mass;
  return of(std::move(atoms), merge_radius);
}

DiscreteMeasure DiscreteMeasure::dirac(const Point& x) { return of({Atom{x, 1.0}}); }

DiscreteMeasure DiscreteMeasure::uniform_on(const PointCloud& cloud) {
  std::vector<Atom> atoms;
  atoms.reserve(cloud.size());
  const double w = 1.0 / static_cast<double>(cloud.size());
  for (const Point& p : cloud.points()) atoms.push_back({p, w});
  return normalized(std::move(atoms));
}

double DiscreteMeasure::mass() const {
  double acc = 0.0;
  for (const Atom& a : atoms_) acc += a.w;
  return acc;
}

Point DiscreteMeasure::mean() const {
  Point m;
  m.dim = dim_;
  for (const Atom& a : atoms_) {
    for (int i = 0; i < dim_; ++i) m.c[i] += a.w * a.x.c[i];
  }
  return m;
}

double DiscreteMeasure::second_moment(int axis) const {
  if (axis < 0 || axis >= dim_) throw InvalidArgument("second_moment: axis out of range");
  double acc = 0.0;
  for (const Atom& a : atoms_) acc += a.w * a.x.c[axis] * a.x.c[axis];
  return acc;
}

double DiscreteMeasure::variance(int axis) const {
  const double m = mean().c[axis];
  return second_moment(axis) - m * m;
}

PointCloud DiscreteMeasure::support(double weight_floor) const {
  std::vector<Point> pts;
  for (const Atom& a : atoms_) {
    if (a.w >= weight_floor) pts.push_back(a.x);
  }
  if (pts.empty()) {
    throw InvalidArgument("support: weight floor " + std::to_string(weight_floor) +
                          " removes every atom");
  }
  return PointCloud(std::move(pts));
}

DiscreteMeasure transfer_step(const IfsFamily& f, const DiscreteMeasure& mu,
                              const ParamMeasure& p, const std::vector<ParamValue>& lam_net,
                              const TransferOptions& opts) {
  if (lam_net.empty()) throw InvalidArgument("transfer_step: empty parameter net");
  if (mu.dim() != f.dim()) throw DimensionMismatch("transfer_step: measure/family dimensions");

  // quadrature weight per net parameter
  std::vector<double> q(lam_net.size());
  if (p.is_finite()) {
    if (static_cast<std::size_t>(p.space().label_count()) != lam_net.size()) {
      throw InvalidArgument("transfer_step: finite law requires the full label net");
    }
    for (std::size_t i = 0; i < lam_net.size(); ++i) {
      q[i] = p.probs()[static_cast<std::size_t>(lam_net[i].label - 1)];
    }
  } else {
    std::fill(q.begin(), q.end(), 1.0 / static_cast<double>(lam_net.size()));
  }

  const std::size_t raw = lam_net.size() * mu.size();
  if (raw > (std::size_t{1} << 26)) {
    throw BudgetExceeded("transfer_step: raw image of " + std::to_string(raw) +
                             " atoms is unreasonably large; coarsen the grid or the net",
                         std::size_t{1} << 26, raw);
  }
  std::vector<Atom> pushed(raw);
  parallel_for(raw, [&](std::size_t idx) {
    const std::size_t li = idx / mu.size();
    const std::size_t ai = idx % mu.size();
    const Atom& a = mu.atoms()[ai];
    pushed[idx] = {f.apply(lam_net[li], a.x), q[li] * a.w};
  });
  // zero-probability labels contribute nothing
  std::erase_if(pushed, [](const Atom& a) { return a.w == 0.0; });

  std::vector<Atom> pooled;
  if (opts.grid_h > 0.0) {
    // keyed accumulation on a regular grid; round-half-even keeps mirror
    // symmetric inputs mirror symmetric
    std::map<std::array<std::int64_t, 3>, double> cells;
    const int d = mu.dim();
    for (const Atom& a : pushed) {
      std::array<std::int64_t, 3> key{0, 0, 0};
      for (int i = 0; i < d; ++i) {
        key[i] = static_cast<std::int64_t>(std::nearbyint(a.x.c[i] / opts.grid_h));
      }
      cells[key] += a.w;
    }
    pooled.reserve(cells.size());
    for (const auto& [key, w] : cells) {
      Point x;
      x.dim = d;
      for (int i = 0; i < d; ++i) {
        const double v = static_cast<double>(key[i]) * opts.grid_h;
        x.c[i] = v == 0.0 ? 0.0 : v;
      }
      pooled.push_back({x, w});
    }
  } else {
    pooled = merge_atoms(std::move(pushed), opts.merge_radius);
  }

  if (pooled.size() > opts.atom_budget) {
    throw BudgetExceeded("transfer_step: " + std::to_string(pooled.size()) +
                             " atoms exceed budget " + std::to_string(opts.atom_budget) +
                             "; use a coarser consolidation grid",
                         opts.atom_budget, pooled.size());
  }
  return DiscreteMeasure::normalized(std::move(pooled), 0.0);
}

InvariantMeasureResult compute_invariant_measure(const IfsFamily& f, const ParamMeasure& p,
                                                 const DiscreteMeasure& seed,
                                                 const std::vector<ParamValue>& lam_net,
                                                 double tol, std::size_t n_max,
                                                 const InvariantMeasureOptions& opts) {
  if (!(tol > 0.0)) throw InvalidArgument("compute_invariant_measure: tol must be > 0");
  TransferOptions topts;
  topts.grid_h = opts.grid_h < 0.0 ? tol / 8.0 : opts.grid_h;
  topts.atom_budget = opts.atom_budget;
  KantorovichOptions kopts;
  kopts.solver_budget = opts.solver_budget;

  InvariantMeasureResult res{seed, {}, 0};
  for (std::size_t n = 1; n <= n_max; ++n) {
    DiscreteMeasure next = transfer_step(f, res.measure, p, lam_net, topts);
    const double gap = kantorovich_distance(res.measure, next, kopts);
    res.trace.push_back({n, gap, next.size(), topts.grid_h});
    res.measure = std::move(next);
    res.iterations = n;
    if (gap < tol) return res;
  }
  throw NoConvergence("compute_invariant_measure: gap " + std::to_string(res.trace.back().gap) +
                          " after " + std::to_string(n_max) + " iterations (tol " +
                          std::to_string(tol) + ")",
                      res.trace.back().gap, n_max);
}

double seed_independence_check(const IfsFamily& f, const ParamMeasure& p,
                               const std::vector<DiscreteMeasure>& seeds,
                               const std::vector<ParamValue>& lam_net, double tol,
                               std::size_t n_max, const InvariantMeasureOptions& opts) {
  if (seeds.size() < 2) throw InvalidArgument("seed_independence_check: need >= 2 seeds");
  std::vector<DiscreteMeasure> results;
  results.reserve(seeds.size());
  for (const DiscreteMeasure& s : seeds) {
    results.push_back(compute_invariant_measure(f, p, s, lam_net, tol, n_max, opts).measure);
  }
  KantorovichOptions kopts;
  kopts.solver_budget = opts.solver_budget;
  double worst = 0.0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    for (std::size_t j = i + 1; j < results.size(); ++j) {
      worst = std::max(worst, kantorovich_distance(results[i], results[j], kopts));
    }
  }
  return worst;
}

double support_vs_attractor(const DiscreteMeasure& nu, const PointCloud& attractor,
                            double weight_floor) {
  return hausdorff_distance(nu.support(weight_floor), attractor);
}

}  // namespace ifslab
