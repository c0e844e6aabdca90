#pragma once

// Finite point-set geometry on a compact box: points, clouds, the Hausdorff
// metric, diameters, and regular epsilon-nets. Everything here is exact and
// deterministic: identical inputs give identical bits regardless of strategy
// or worker count.

#include <array>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace ifslab {

inline constexpr int kMaxDim = 3;
inline constexpr double kDefaultMergeRadius = 1e-9;
inline constexpr std::size_t kDefaultNetBudget = 2'000'000;

/// A point in R^d, d in {1,2,3}. Unused coordinates stay zero.
struct Point {
  std::array<double, 3> c{0.0, 0.0, 0.0};
  int dim = 0;

  double operator[](std::size_t i) const { return c[i]; }
  double& operator[](std::size_t i) { return c[i]; }
};

/// Validating constructor: finite coordinates, 1 <= dim <= 3, -0 normalized to +0.
Point make_point(std::span<const double> xs);
Point make_point(std::initializer_list<double> xs);

bool operator==(const Point& a, const Point& b);

/// Lexicographic order on coordinates; ties cannot occur between distinct points.
bool lex_less(const Point& a, const Point& b);

double dist2(const Point& a, const Point& b);
double dist(const Point& a, const Point& b);

/// Nonempty list of points of one common dimension.
class PointCloud {
 public:
  explicit PointCloud(std::vector<Point> pts);

  int dim() const { return dim_; }
  std::size_t size() const { return pts_.size(); }
  const Point& operator[](std::size_t i) const { return pts_[i]; }
  const std::vector<Point>& points() const { return pts_; }

  /// Sorted copy with points closer than merge_radius deduplicated
  /// (lexicographically least representative wins). merge_radius >= 0.
  PointCloud canonicalized(double merge_radius = kDefaultMergeRadius) const;

 private:
  std::vector<Point> pts_;
  int dim_;
};

/// Canonicalize a raw point list without constructing an intermediate cloud.
std::vector<Point> canonicalize_points(std::vector<Point> pts, double merge_radius);

/// Axis-aligned compact box, lo <= hi componentwise.
struct BoxDomain {
  Point lo;
  Point hi;

  int dim() const { return lo.dim; }
  Point center() const;
  double diameter() const;  // Euclidean diagonal
  bool contains(const Point& p, double tol) const;
  /// Largest componentwise overshoot of p outside the box (0 if inside).
  double escape(const Point& p) const;
};

BoxDomain make_box(const Point& lo, const Point& hi);

/// Strategy selector for nearest-neighbour scans inside hausdorff_distance.
/// Both strategies return bit-identical values; the grid one is just faster on
/// large clouds. Exposed so tests can pin them against each other.
enum class NearestStrategy { automatic, brute_force, grid };

/// Hausdorff distance between two clouds of equal dimension.
/// Zero iff the underlying point sets are equal.
double hausdorff_distance(const PointCloud& a, const PointCloud& b,
                          NearestStrategy strategy = NearestStrategy::automatic);

/// Largest pairwise distance; 0 for singletons.
double diameter(const PointCloud& a);

/// Regular grid over the box with spacing <= eps on each axis, both faces
/// included; every box point is within (sqrt(d)/2)*eps of the net.
/// Throws BudgetExceeded (naming the budget) if the grid would be larger.
PointCloud epsilon_net(const BoxDomain& box, double eps,
                       std::size_t point_budget = kDefaultNetBudget);

}  // namespace ifslab
