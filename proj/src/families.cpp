#include "ifslab/families.hpp"

#include <vector>

namespace ifslab {

namespace {

// sqrt(3)/2 to the last bit; written out so the box and the map offsets agree
// exactly with the values pinned in configs and tests.
constexpr double kTriangleHeight = 0.8660254037844387;

BoxDomain unit_box(int dim) {
  Point lo;
  Point hi;
  lo.dim = dim;
  hi.dim = dim;
  for (int i = 0; i < dim; ++i) hi.c[i] = 1.0;
  return make_box(lo, hi);
}

}  // namespace

IfsFamily make_cantor() {
  const double third = 1.0 / 3.0;
  std::vector<AffineMap> maps;
  maps.push_back(make_affine(1, std::array{third}, std::array{0.0}));
  maps.push_back(make_affine(1, std::array{third}, std::array{2.0 / 3.0}));
  return IfsFamily::affine_list(std::move(maps), unit_box(1));
}

IfsFamily make_sierpinski() {
  const std::array<std::array<double, 2>, 3> vertices{{{0.0, 0.0}, {1.0, 0.0}, {0.5, kTriangleHeight}}};
  const std::array<double, 4> half{0.5, 0.0, 0.0, 0.5};
  std::vector<AffineMap> maps;
  for (const auto& v : vertices) {
    maps.push_back(make_affine(2, half, std::array{v[0] * 0.5, v[1] * 0.5}));
  }
  Point lo;
  Point hi;
  lo.dim = 2;
  hi.dim = 2;
  hi.c[0] = 1.0;
  hi.c[1] = kTriangleHeight;
  return IfsFamily::affine_list(std::move(maps), make_box(lo, hi));
}

IfsFamily make_halving() { return IfsFamily::analytic_1d(AnalyticFamily::halving, unit_box(1)); }

IfsFamily make_edalat() { return IfsFamily::analytic_1d(AnalyticFamily::edalat, unit_box(1)); }

IfsFamily make_blend(double net_spacing) {
  PolyAffineMap map;
  map.dim = 1;
  map.A[0][0] = Poly2::constant(0.5);
  map.b[0].lin[0] = 0.5;  // b(lambda) = lambda/2
  const ParameterSpace lambda = ParameterSpace::box(unit_box(1), net_spacing);
  return IfsFamily::poly_affine_box(map, lambda, unit_box(1));
}

IfsFamily make_identity(int dim) {
  std::vector<double> a(static_cast<std::size_t>(dim) * dim, 0.0);
  for (int i = 0; i < dim; ++i) a[static_cast<std::size_t>(i) * dim + i] = 1.0;
  const std::vector<double> b(dim, 0.0);
  std::vector<AffineMap> maps;
  maps.push_back(make_affine(dim, a, b));
  return IfsFamily::affine_list(std::move(maps), unit_box(dim));
}

}  // namespace ifslab
