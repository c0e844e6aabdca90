#include "ifslab/metric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <string>
#include <unordered_map>

#include "ifslab/errors.hpp"
#include "ifslab/parallel.hpp"

namespace ifslab {

namespace {

double normalize_zero(double x) { return x == 0.0 ? 0.0 : x; }

void check_same_dim(int a, int b, const char* what) {
  if (a != b) {
    throw DimensionMismatch(std::string(what) + ": dimension mismatch (" +
                            std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

}  // namespace

Point make_point(std::span<const double> xs) {
  if (xs.empty() || xs.size() > static_cast<std::size_t>(kMaxDim)) {
    throw InvalidArgument("point dimension must be 1..3, got " + std::to_string(xs.size()));
  }
  Point p;
  p.dim = static_cast<int>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i])) throw InvalidArgument("point coordinate not finite");
    p.c[i] = normalize_zero(xs[i]);
  }
  return p;
}

Point make_point(std::initializer_list<double> xs) {
  return make_point(std::span<const double>(xs.begin(), xs.size()));
}

bool operator==(const Point& a, const Point& b) {
  if (a.dim != b.dim) return false;
  for (int i = 0; i < a.dim; ++i) {
    if (a.c[i] != b.c[i]) return false;
  }
  return true;
}

bool lex_less(const Point& a, const Point& b) {
  for (int i = 0; i < a.dim; ++i) {
    if (a.c[i] < b.c[i]) return true;
    if (a.c[i] > b.c[i]) return false;
  }
  return false;
}

double dist2(const Point& a, const Point& b) {
  check_same_dim(a.dim, b.dim, "dist");
  double acc = 0.0;
  for (int i = 0; i < a.dim; ++i) {
    const double d = a.c[i] - b.c[i];
    acc += d * d;
  }
  return acc;
}

double dist(const Point& a, const Point& b) { return std::sqrt(dist2(a, b)); }

PointCloud::PointCloud(std::vector<Point> pts) : pts_(std::move(pts)) {
  if (pts_.empty()) throw InvalidArgument("point cloud must be nonempty");
  dim_ = pts_.front().dim;
  if (dim_ < 1 || dim_ > kMaxDim) throw InvalidArgument("point cloud: bad dimension");
  for (const Point& p : pts_) {
    if (p.dim != dim_) throw DimensionMismatch("point cloud: mixed dimensions");
  }
}

namespace {

// Spatial hash over integer grid cells; cell size = merge radius.
struct CellKey {
  std::int64_t k[3];
  bool operator==(const CellKey& o) const {
    return k[0] == o.k[0] && k[1] == o.k[1] && k[2] == o.k[2];
  }
};

struct CellKeyHash {
  std::size_t operator()(const CellKey& c) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (int i = 0; i < 3; ++i) {
      h ^= static_cast<std::uint64_t>(c.k[i]);
      h *= 0x100000001b3ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

CellKey cell_of(const Point& p, double cell) {
  CellKey key{{0, 0, 0}};
  for (int i = 0; i < p.dim; ++i) {
    key.k[i] = static_cast<std::int64_t>(std::floor(p.c[i] / cell));
  }
  return key;
}

}  // namespace

std::vector<Point> canonicalize_points(std::vector<Point> pts, double merge_radius) {
  if (merge_radius < 0.0) throw InvalidArgument("merge radius must be >= 0");
  std::sort(pts.begin(), pts.end(), lex_less);
  if (merge_radius == 0.0) {
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
  }
  const int d = pts.empty() ? 0 : pts.front().dim;
  const double r2 = merge_radius * merge_radius;
  std::unordered_map<CellKey, std::vector<std::size_t>, CellKeyHash> grid;
  std::vector<Point> kept;
  kept.reserve(pts.size());
  std::int64_t lo[3], hi[3];
  for (const Point& p : pts) {
    bool merged = false;
    for (int i = 0; i < 3; ++i) {
      if (i < d) {
        lo[i] = static_cast<std::int64_t>(std::floor((p.c[i] - merge_radius) / merge_radius));
        hi[i] = static_cast<std::int64_t>(std::floor((p.c[i] + merge_radius) / merge_radius));
      } else {
        lo[i] = hi[i] = 0;
      }
    }
    CellKey key;
    for (key.k[0] = lo[0]; key.k[0] <= hi[0] && !merged; ++key.k[0]) {
      for (key.k[1] = lo[1]; key.k[1] <= hi[1] && !merged; ++key.k[1]) {
        for (key.k[2] = lo[2]; key.k[2] <= hi[2] && !merged; ++key.k[2]) {
          auto it = grid.find(key);
          if (it == grid.end()) continue;
          for (std::size_t idx : it->second) {
            if (dist2(p, kept[idx]) <= r2) {
              merged = true;
              break;
            }
          }
        }
      }
    }
    if (!merged) {
      grid[cell_of(p, merge_radius)].push_back(kept.size());
      kept.push_back(p);
    }
  }
  return kept;
}

PointCloud PointCloud::canonicalized(double merge_radius) const {
  return PointCloud(canonicalize_points(pts_, merge_radius));
}

Point BoxDomain::center() const {
  Point p = lo;
  for (int i = 0; i < lo.dim; ++i) p.c[i] = lo.c[i] + 0.5 * (hi.c[i] - lo.c[i]);
  return p;
}

double BoxDomain::diameter() const { return dist(lo, hi); }

bool BoxDomain::contains(const Point& p, double tol) const {
  return escape(p) <= tol;
}

double BoxDomain::escape(const Point& p) const {
  check_same_dim(p.dim, lo.dim, "box");
  double worst = 0.0;
  for (int i = 0; i < lo.dim; ++i) {
    worst = std::max(worst, lo.c[i] - p.c[i]);
    worst = std::max(worst, p.c[i] - hi.c[i]);
  }
  return worst;
}

BoxDomain make_box(const Point& lo, const Point& hi) {
  check_same_dim(lo.dim, hi.dim, "box");
  for (int i = 0; i < lo.dim; ++i) {
    if (!(lo.c[i] <= hi.c[i])) throw InvalidArgument("box: lo must be <= hi componentwise");
  }
  return BoxDomain{lo, hi};
}

namespace {

// One-sided sup_{a in A} min_{b in B} of squared distance, brute force.
double directed_sup_min2_brute(const std::vector<Point>& a, const std::vector<Point>& b) {
  std::vector<double> mins(a.size());
  parallel_for(a.size(), [&](std::size_t i) {
    double best = std::numeric_limits<double>::infinity();
    for (const Point& q : b) {
      const double d2 = dist2(a[i], q);
      if (d2 < best) best = d2;
    }
    mins[i] = best;
  });
  double worst = 0.0;
  for (double m : mins) worst = std::max(worst, m);
  return worst;
}

// Exact nearest-neighbour search over a one-shot bucket grid. Expands
// Chebyshev rings around the query cell until the ring's lower bound already
// exceeds the best squared distance found, so the minimum matches brute force.
class BucketGrid {
 public:
  BucketGrid(const std::vector<Point>& pts, int dim) : pts_(pts), dim_(dim) {
    Point lo = pts.front(), hi = pts.front();
    for (const Point& p : pts) {
      for (int i = 0; i < dim_; ++i) {
        lo.c[i] = std::min(lo.c[i], p.c[i]);
        hi.c[i] = std::max(hi.c[i], p.c[i]);
      }
    }
    origin_ = lo;
    double extent = 0.0;
    for (int i = 0; i < dim_; ++i) extent = std::max(extent, hi.c[i] - lo.c[i]);
    const double per_axis = std::pow(static_cast<double>(pts.size()), 1.0 / dim_);
    cell_ = extent > 0.0 ? extent / std::max(1.0, per_axis) : 1.0;
    if (!(cell_ > 0.0)) cell_ = 1.0;
    for (const Point& p : pts) cells_[key_of(p)].push_back(&p);
    cell_lo_ = key_of(lo);
    cell_hi_ = key_of(hi);
  }

  double min_dist2(const Point& q) const {
    const CellKey qk = key_of(q);
    // Ring bounds relative to the occupied-cell bounding box: rings below r0
    // are empty, rings above rcap are empty.
    std::int64_t r0 = 0, rcap = 0;
    for (int i = 0; i < dim_; ++i) {
      r0 = std::max({r0, cell_lo_.k[i] - qk.k[i], qk.k[i] - cell_hi_.k[i]});
      rcap = std::max({rcap, std::abs(cell_lo_.k[i] - qk.k[i]),
                       std::abs(cell_hi_.k[i] - qk.k[i])});
    }
    if (r0 > 16) return min_dist2_linear(q);  // far outside: rings would be wasteful
    double best = std::numeric_limits<double>::infinity();
    for (std::int64_t r = r0; r <= rcap; ++r) {
      if (r > 0 && best < std::numeric_limits<double>::infinity()) {
        const double lb = (static_cast<double>(r) - 1.0) * cell_;
        if (lb > 0.0 && lb * lb > best) break;
      }
      scan_ring(q, qk, r, best);
    }
    return best;
  }

 private:
  double min_dist2_linear(const Point& q) const {
    double best = std::numeric_limits<double>::infinity();
    for (const Point& p : pts_) {
      const double d2 = dist2(q, p);
      if (d2 < best) best = d2;
    }
    return best;
  }

  CellKey key_of(const Point& p) const {
    CellKey key{{0, 0, 0}};
    for (int i = 0; i < dim_; ++i) {
      key.k[i] = static_cast<std::int64_t>(std::floor((p.c[i] - origin_.c[i]) / cell_));
    }
    return key;
  }

  void scan_ring(const Point& q, const CellKey& qk, std::int64_t r, double& best) const {
    CellKey key;
    const int d = dim_;
    std::int64_t lo[3], hi[3];
    for (int i = 0; i < 3; ++i) {
      lo[i] = i < d ? qk.k[i] - r : 0;
      hi[i] = i < d ? qk.k[i] + r : 0;
    }
    for (key.k[0] = lo[0]; key.k[0] <= hi[0]; ++key.k[0]) {
      for (key.k[1] = lo[1]; key.k[1] <= hi[1]; ++key.k[1]) {
        for (key.k[2] = lo[2]; key.k[2] <= hi[2]; ++key.k[2]) {
          // Only the ring surface, not the filled block.
          std::int64_t cheb = 0;
          for (int i = 0; i < d; ++i) cheb = std::max(cheb, std::abs(key.k[i] - qk.k[i]));
          if (cheb != r) continue;
          auto it = cells_.find(key);
          if (it == cells_.end()) continue;
          for (const Point* p : it->second) {
            const double d2 = dist2(q, *p);
            if (d2 < best) best = d2;
          }
        }
      }
    }
  }

  const std::vector<Point>& pts_;
  int dim_;
  Point origin_;
  double cell_ = 1.0;
  CellKey cell_lo_{{0, 0, 0}};
  CellKey cell_hi_{{0, 0, 0}};
  std::unordered_map<CellKey, std::vector<const Point*>, CellKeyHash> cells_;
};

double directed_sup_min2_grid(const std::vector<Point>& a, const std::vector<Point>& b, int dim) {
  BucketGrid grid(b, dim);
  std::vector<double> mins(a.size());
  parallel_for(a.size(), [&](std::size_t i) { mins[i] = grid.min_dist2(a[i]); });
  double worst = 0.0;
  for (double m : mins) worst = std::max(worst, m);
  return worst;
}

}  // namespace

double hausdorff_distance(const PointCloud& a, const PointCloud& b, NearestStrategy strategy) {
  check_same_dim(a.dim(), b.dim(), "hausdorff_distance");
  NearestStrategy s = strategy;
  if (s == NearestStrategy::automatic) {
    const std::size_t pairs = a.size() * b.size();
    s = pairs <= 256u * 256u ? NearestStrategy::brute_force : NearestStrategy::grid;
  }
  double h2;
  if (s == NearestStrategy::brute_force) {
    h2 = std::max(directed_sup_min2_brute(a.points(), b.points()),
                  directed_sup_min2_brute(b.points(), a.points()));
  } else {
    h2 = std::max(directed_sup_min2_grid(a.points(), b.points(), a.dim()),
                  directed_sup_min2_grid(b.points(), a.points(), a.dim()));
  }
  return std::sqrt(h2);
}

double diameter(const PointCloud& a) {
  const std::vector<Point>& pts = a.points();
  std::vector<double> maxs(pts.size(), 0.0);
  parallel_for(pts.size(), [&](std::size_t i) {
    double m = 0.0;
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double d2 = dist2(pts[i], pts[j]);
      if (d2 > m) m = d2;
    }
    maxs[i] = m;
  });
  double worst = 0.0;
  for (double m : maxs) worst = std::max(worst, m);
  return std::sqrt(worst);
}

PointCloud epsilon_net(const BoxDomain& box, double eps, std::size_t point_budget) {
  if (!(eps > 0.0)) throw InvalidArgument("epsilon_net: eps must be > 0");
  const int d = box.dim();
  std::size_t counts[3] = {1, 1, 1};
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) {
    const double extent = box.hi.c[i] - box.lo.c[i];
    const std::size_t n = extent > 0.0 ? static_cast<std::size_t>(std::ceil(extent / eps)) : 0;
    counts[i] = n + 1;
    total *= counts[i];
    if (total > point_budget) {
      throw BudgetExceeded("epsilon_net: grid of " + std::to_string(total) +
                               "+ points exceeds budget " + std::to_string(point_budget),
                           point_budget, total);
    }
  }
  std::vector<Point> pts;
  pts.reserve(total);
  Point p;
  p.dim = d;
  for (std::size_t i0 = 0; i0 < counts[0]; ++i0) {
    for (std::size_t i1 = 0; i1 < counts[1]; ++i1) {
      for (std::size_t i2 = 0; i2 < counts[2]; ++i2) {
        const std::size_t idx[3] = {i0, i1, i2};
        for (int k = 0; k < d; ++k) {
          const double extent = box.hi.c[k] - box.lo.c[k];
          if (counts[k] == 1) {
            p.c[k] = box.lo.c[k];
          } else {
            const double t = static_cast<double>(idx[k]) / static_cast<double>(counts[k] - 1);
            p.c[k] = box.lo.c[k] + t * extent;
          }
        }
        pts.push_back(p);
      }
    }
  }
  return PointCloud(std::move(pts));
}

}  // namespace ifslab
