#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "ifslab/attractor.hpp"
#include "ifslab/errors.hpp"
#include "ifslab/families.hpp"
#include "ifslab/measure.hpp"
#include "lp_oracle.hpp"

using namespace ifslab;

namespace {

// mirrors AffineMap::apply for the two ternary maps
double ternary_step(double x, bool upper) {
  double acc = upper ? 2.0 / 3.0 : 0.0;
  acc += (1.0 / 3.0) * x;
  return acc == 0.0 ? 0.0 : acc;
}

DiscreteMeasure random_measure(std::mt19937_64& gen, int dim, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> xs(static_cast<std::size_t>(dim));
    for (double& x : xs) x = u(gen);
    atoms.push_back({make_point(xs), 0.05 + u(gen)});
  }
  return DiscreteMeasure::normalized(std::move(atoms), 0.0);
}

double oracle_distance(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  std::vector<double> costs(a.size() * b.size());
  std::vector<double> wa(a.size()), wb(b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    wa[i] = a.atoms()[i].w;
    for (std::size_t j = 0; j < b.size(); ++j) {
      costs[i * b.size() + j] = dist(a.atoms()[i].x, b.atoms()[j].x);
    }
  }
  for (std::size_t j = 0; j < b.size(); ++j) wb[j] = b.atoms()[j].w;
  return lp_oracle::transport_cost(costs, wa, wb);
}

}  // namespace

TEST_SUITE("measure") {

TEST_CASE("measures validate mass and weights") {
  CHECK_THROWS_AS(DiscreteMeasure::of({{make_point({0.0}), 0.5}}), InvalidArgument);
  CHECK_THROWS_AS(DiscreteMeasure::of({{make_point({0.0}), 1.5}, {make_point({1.0}), -0.5}}),
                  InvalidArgument);
  CHECK_THROWS_AS(DiscreteMeasure::of({}), InvalidArgument);
  CHECK_THROWS_AS(DiscreteMeasure::normalized({{make_point({0.0}), 0.0}}), InvalidArgument);

  const DiscreteMeasure d = DiscreteMeasure::dirac(make_point({0.25, 0.5}));
  CHECK(d.size() == 1);
  CHECK(d.mass() == 1.0);
  CHECK(d.dim() == 2);

  const DiscreteMeasure u =
      DiscreteMeasure::uniform_on(PointCloud({make_point({0.0}), make_point({1.0})}));
  CHECK(u.size() == 2);
  CHECK(u.atoms()[0].w == 0.5);
}

TEST_CASE("normalized rescales to unit mass") {
  const DiscreteMeasure m =
      DiscreteMeasure::normalized({{make_point({0.0}), 3.0}, {make_point({1.0}), 1.0}});
  CHECK(m.atoms()[0].w == 0.75);
  CHECK(m.atoms()[1].w == 0.25);
}

TEST_CASE("construction pools coincident atoms and sorts by position") {
  const DiscreteMeasure m = DiscreteMeasure::of(
      {{make_point({0.75}), 0.25}, {make_point({0.25}), 0.5}, {make_point({0.75}), 0.25}}, 0.0);
  REQUIRE(m.size() == 2);
  CHECK(m.atoms()[0].x == make_point({0.25}));
  CHECK(m.atoms()[0].w == 0.5);
  CHECK(m.atoms()[1].x == make_point({0.75}));
  CHECK(m.atoms()[1].w == 0.5);
}

TEST_CASE("moments of a two-atom measure") {
  const DiscreteMeasure m =
      DiscreteMeasure::of({{make_point({0.0}), 0.25}, {make_point({1.0}), 0.75}});
  CHECK(m.mean()[0] == 0.75);
  CHECK(m.second_moment(0) == 0.75);
  CHECK(m.variance(0) == doctest::Approx(0.1875).epsilon(1e-15));
  CHECK_THROWS_AS(m.second_moment(1), InvalidArgument);
}

TEST_CASE("support respects the weight floor") {
  const DiscreteMeasure m =
      DiscreteMeasure::of({{make_point({0.0}), 0.9}, {make_point({1.0}), 0.1}});
  CHECK(m.support().size() == 2);
  CHECK(m.support(0.5).size() == 1);
  CHECK_THROWS_AS(m.support(0.95), InvalidArgument);
}

TEST_CASE("transfer step: exact two-level ternary pushforward") {
  const IfsFamily f = make_cantor();
  const ParamMeasure law = ParamMeasure::uniform(f.parameter_space());
  const auto net = f.parameter_net();
  TransferOptions opts;
  opts.merge_radius = 0.0;

  const DiscreteMeasure t1 = transfer_step(f, DiscreteMeasure::dirac(make_point({0.0})), law,
                                           net, opts);
  REQUIRE(t1.size() == 2);
  CHECK(t1.atoms()[0].x == make_point({0.0}));
  CHECK(t1.atoms()[0].w == 0.5);
  CHECK(t1.atoms()[1].x == make_point({ternary_step(0.0, true)}));
  CHECK(t1.atoms()[1].w == 0.5);

  const DiscreteMeasure t2 = transfer_step(f, t1, law, net, opts);
  REQUIRE(t2.size() == 4);
  const double c = ternary_step(0.0, true);
  const double expect[4] = {0.0, ternary_step(c, false), c, ternary_step(c, true)};
  for (int i = 0; i < 4; ++i) {
    CHECK(t2.atoms()[static_cast<std::size_t>(i)].x == make_point({expect[i]}));
    CHECK(t2.atoms()[static_cast<std::size_t>(i)].w == 0.25);
  }
}

TEST_CASE("transfer step honors non-uniform label probabilities") {
  const IfsFamily f = make_cantor();
  const ParamMeasure law = ParamMeasure::finite(f.parameter_space(), {0.25, 0.75});
  TransferOptions opts;
  opts.merge_radius = 0.0;
  const DiscreteMeasure t1 = transfer_step(f, DiscreteMeasure::dirac(make_point({0.0})), law,
                                           f.parameter_net(), opts);
  REQUIRE(t1.size() == 2);
  CHECK(t1.atoms()[0].w == 0.25);
  CHECK(t1.atoms()[1].w == 0.75);
}

TEST_CASE("box laws quadrate uniformly over the parameter net") {
  const IfsFamily f = make_blend();
  const ParamMeasure law = ParamMeasure::uniform(f.parameter_space());
  const auto net = f.parameter_net();
  const DiscreteMeasure t1 =
      transfer_step(f, DiscreteMeasure::dirac(make_point({0.0})), law, net, {});
  REQUIRE(t1.size() == net.size());
  for (const Atom& a : t1.atoms()) {
    CHECK(a.w == doctest::Approx(1.0 / static_cast<double>(net.size())).epsilon(1e-12));
  }
}

TEST_CASE("transfer preserves the mean recursion of the ternary family") {
  const IfsFamily f = make_cantor();
  const ParamMeasure law = ParamMeasure::uniform(f.parameter_space());
  const auto net = f.parameter_net();
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 5; ++trial) {
    const DiscreteMeasure mu = random_measure(gen, 1, 10);
    TransferOptions opts;
    opts.merge_radius = 0.0;
    const DiscreteMeasure tmu = transfer_step(f, mu, law, net, opts);
    CHECK(tmu.mass() == doctest::Approx(1.0).epsilon(1e-12));
    // E[T mu] = E[mu]/3 + (0 + 2/3)/2
    CHECK(tmu.mean()[0] ==
          doctest::Approx(mu.mean()[0] / 3.0 + 1.0 / 3.0).epsilon(1e-12));
  }
}

TEST_CASE("transfer is linear on dyadic mixtures") {
  const IfsFamily f = make_cantor();
  const ParamMeasure law = ParamMeasure::uniform(f.parameter_space());
  const auto net = f.parameter_net();
  TransferOptions opts;
  opts.merge_radius = 0.0;

  const DiscreteMeasure mu =
      DiscreteMeasure::of({{make_point({0.0}), 0.5}, {make_point({0.5}), 0.5}});
  const DiscreteMeasure nu =
      DiscreteMeasure::of({{make_point({0.25}), 0.25}, {make_point({0.75}), 0.75}});

  std::vector<Atom> mixed;
  for (const Atom& a : mu.atoms()) mixed.push_back({a.x, a.w * 0.5});
  for (const Atom& a : nu.atoms()) mixed.push_back({a.x, a.w * 0.5});
  const DiscreteMeasure t_mix = transfer_step(f, DiscreteMeasure::of(mixed, 0.0), law, net, opts);

  const DiscreteMeasure t_mu = transfer_step(f, mu, law, net, opts);
  const DiscreteMeasure t_nu = transfer_step(f, nu, law, net, opts);
  std::vector<Atom> recombined;
  for (const Atom& a : t_mu.atoms()) recombined.push_back({a.x, a.w * 0.5});
  for (const Atom& a : t_nu.atoms()) recombined.push_back({a.x, a.w * 0.5});
  const DiscreteMeasure expect = DiscreteMeasure::of(recombined, 0.0);

  REQUIRE(t_mix.size() == expect.size());
  for (std::size_t i = 0; i < expect.size(); ++i) {
    CHECK(t_mix.atoms()[i].x == expect.atoms()[i].x);
    CHECK(t_mix.atoms()[i].w == expect.atoms()[i].w);
  }
}

TEST_CASE("grid consolidation snaps positions to multiples of h") {
  const IfsFamily f = make_cantor();
  const ParamMeasure law = ParamMeasure::uniform(f.parameter_space());
  TransferOptions opts;
  opts.grid_h = 0.25;
  DiscreteMeasure mu = DiscreteMeasure::dirac(make_point({0.0}));
  for (int i = 0; i < 3; ++i) mu = transfer_step(f, mu, law, f.parameter_net(), opts);
  for (const Atom& a : mu.atoms()) {
    const double k = a.x[0] / 0.25;
    CHECK(k == std::nearbyint(k));
  }
  CHECK(mu.mass() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("transfer reports atom budget exhaustion") {
  const IfsFamily f = make_cantor();
  const ParamMeasure law = ParamMeasure::uniform(f.parameter_space());
  TransferOptions opts;
  opts.merge_radius = 0.0;
  opts.atom_budget = 3;
  DiscreteMeasure mu = DiscreteMeasure::dirac(make_point({0.0}));
  mu = transfer_step(f, mu, law, f.parameter_net(), opts);  // 2 atoms: fine
  try {
    transfer_step(f, mu, law, f.parameter_net(), opts);  // 4 atoms: over
    FAIL("expected BudgetExceeded");
  } catch (const BudgetExceeded& e) {
    CHECK(e.budget == 3);
    CHECK(std::string(e.what()).find("grid") != std::string::npos);
  }
}

TEST_CASE("kantorovich distance on hand-checked pairs") {
  const DiscreteMeasure d0 = DiscreteMeasure::dirac(make_point({0.0}));
  const DiscreteMeasure d1 = DiscreteMeasure::dirac(make_point({1.0}));
  CHECK(kantorovich_distance(d0, d1) == 1.0);
  CHECK(kantorovich_distance(d0, DiscreteMeasure::dirac(make_point({0.7}))) == 0.7);

  const DiscreteMeasure pair =
      DiscreteMeasure::of({{make_point({0.0}), 0.5}, {make_point({1.0}), 0.5}});
  CHECK(kantorovich_distance(pair, DiscreteMeasure::dirac(make_point({0.5}))) == 0.5);

  // 2D: diracs at opposite corners
  const DiscreteMeasure c0 = DiscreteMeasure::dirac(make_point({0.0, 0.0}));
  const DiscreteMeasure c1 = DiscreteMeasure::dirac(make_point({1.0, 1.0}));
  CHECK(kantorovich_distance(c0, c1) == std::sqrt(2.0));
}

TEST_CASE("kantorovich metric axioms") {
  std::mt19937_64 gen(23);
  for (int trial = 0; trial < 12; ++trial) {
    const int dim = 1 + trial % 3;
    const DiscreteMeasure a = random_measure(gen, dim, 2 + gen() % 7);
    const DiscreteMeasure b = random_measure(gen, dim, 2 + gen() % 7);
    const DiscreteMeasure c = random_measure(gen, dim, 2 + gen() % 7);
    const double ab = kantorovich_distance(a, b);
    CHECK(ab >= 0.0);
    CHECK(ab == kantorovich_distance(b, a));  // bitwise, by canonical ordering
    CHECK(kantorovich_distance(a, c) <= ab + kantorovich_distance(b, c) + 1e-10);
    CHECK(kantorovich_distance(a, a) == 0.0);
  }
}

TEST_CASE("kantorovich distance separates distinct measures") {
  const DiscreteMeasure a =
      DiscreteMeasure::of({{make_point({0.0}), 0.5}, {make_point({1.0}), 0.5}});
  const DiscreteMeasure b =
      DiscreteMeasure::of({{make_point({0.0}), 0.4}, {make_point({1.0}), 0.6}});
  CHECK(kantorovich_distance(a, b) == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("quantile sweep and flow solver agree in one dimension") {
  std::mt19937_64 gen(31);
  KantorovichOptions quant;
  quant.method = TransportMethod::quantile_1d;
  KantorovichOptions flow;
  flow.method = TransportMethod::min_cost_flow;
  for (int trial = 0; trial < 20; ++trial) {
    const DiscreteMeasure a = random_measure(gen, 1, 2 + gen() % 10);
    const DiscreteMeasure b = random_measure(gen, 1, 2 + gen() % 10);
    const double dq = kantorovich_distance(a, b, quant);
    const double df = kantorovich_distance(a, b, flow);
    CHECK(dq == doctest::Approx(df).epsilon(1e-10));
  }
}

TEST_CASE("flow solver agrees with an independent simplex oracle") {
  std::mt19937_64 gen(37);
  for (int trial = 0; trial < 40; ++trial) {
    const int dim = 1 + trial % 3;
    const DiscreteMeasure a = random_measure(gen, dim, 2 + gen() % 8);
    const DiscreteMeasure b = random_measure(gen, dim, 2 + gen() % 8);
    const double got = kantorovich_distance(a, b);
    const double want = oracle_distance(a, b);
    CHECK(got == doctest::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("method restrictions and dimension checks") {
  const DiscreteMeasure a = DiscreteMeasure::dirac(make_point({0.0, 0.0}));
  const DiscreteMeasure b = DiscreteMeasure::dirac(make_point({1.0}));
  CHECK_THROWS_AS(kantorovich_distance(a, b), DimensionMismatch);
  KantorovichOptions quant;
  quant.method = TransportMethod::quantile_1d;
  CHECK_THROWS_AS(kantorovich_distance(a, a, quant), InvalidArgument);
}

TEST_CASE("flow solver enforces its per-side budget; the 1D sweep has none") {
  std::mt19937_64 gen(41);
  const DiscreteMeasure big1 = random_measure(gen, 1, 600);
  const DiscreteMeasure other1 = random_measure(gen, 1, 600);
  CHECK_NOTHROW(kantorovich_distance(big1, other1));  // automatic -> quantile

  const DiscreteMeasure big2 = random_measure(gen, 2, 600);
  const DiscreteMeasure other2 = random_measure(gen, 2, 4);
  try {
    kantorovich_distance(big2, other2);
    FAIL("expected BudgetExceeded");
  } catch (const BudgetExceeded& e) {
    CHECK(e.budget == 512);
    CHECK(e.requested == 600);
  }
}

TEST_CASE("transport plans balance their marginals and price the distance") {
  std::mt19937_64 gen(43);
  const DiscreteMeasure a = random_measure(gen, 2, 6);
  const DiscreteMeasure b = random_measure(gen, 2, 9);
  const TransportPlan plan = transport_plan(a, b);
  std::vector<double> out(a.size(), 0.0), in(b.size(), 0.0);
  for (const auto& fl : plan.flows) {
    REQUIRE(fl.from < a.size());
    REQUIRE(fl.to < b.size());
    CHECK(fl.mass > 0.0);
    out[fl.from] += fl.mass;
    in[fl.to] += fl.mass;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(out[i] == doctest::Approx(a.atoms()[i].w).epsilon(1e-12));
  }
  for (std::size_t j = 0; j < b.size(); ++j) {
    CHECK(in[j] == doctest::Approx(b.atoms()[j].w).epsilon(1e-12));
  }
  CHECK(plan.cost == doctest::Approx(kantorovich_distance(a, b)).epsilon(1e-12));
}

TEST_CASE("invariant measure of the ternary family has the right moments") {
  const IfsFamily f = make_cantor();
  const ParamMeasure law = ParamMeasure::uniform(f.parameter_space());
  const auto net = f.parameter_net();
  const InvariantMeasureResult res = compute_invariant_measure(
      f, law, DiscreteMeasure::dirac(f.domain().center()), net, 1e-3, 60);
  CHECK(res.iterations < 60);
  CHECK(res.trace.back().grid_h == 1e-3 / 8.0);
  CHECK(std::abs(res.measure.mean()[0] - 0.5) <= 1e-3);
  CHECK(std::abs(res.measure.second_moment(0) - 0.375) <= 2e-3);
}

TEST_CASE("invariant measure is insensitive to the starting measure") {
  const IfsFamily f = make_cantor();
  const ParamMeasure law = ParamMeasure::uniform(f.parameter_space());
  const double tol = 1e-3;
  const double gap = seed_independence_check(
      f, law,
      {DiscreteMeasure::dirac(make_point({0.0})), DiscreteMeasure::dirac(make_point({1.0}))},
      f.parameter_net(), tol, 60);
  CHECK(gap <= 3.0 * tol);
}

TEST_CASE("invariant measure support tracks the attractor") {
  const IfsFamily f = make_cantor();
  const ParamMeasure law = ParamMeasure::uniform(f.parameter_space());
  const auto net = f.parameter_net();
  const double tol = 1e-3;
  const InvariantMeasureResult nu = compute_invariant_measure(
      f, law, DiscreteMeasure::dirac(f.domain().center()), net, tol, 60);
  const AttractorResult attr =
      compute_attractor(f, PointCloud({f.domain().center()}), net, tol, 200);
  // measure tol + grid spacing + attractor tol + merge slack
  CHECK(support_vs_attractor(nu.measure, attr.cloud) <= 2.5e-3);
}

TEST_CASE("box-parameter family reaches the right spread") {
  const IfsFamily f = make_blend();
  const ParamMeasure law = ParamMeasure::uniform(f.parameter_space());
  const InvariantMeasureResult res = compute_invariant_measure(
      f, law, DiscreteMeasure::dirac(f.domain().center()), f.parameter_net(), 2e-3, 40);
  CHECK(std::abs(res.measure.mean()[0] - 0.5) <= 5e-3);
  // limit of the averaged maps is uniform on [0,1] up to net discretization
  CHECK(std::abs(res.measure.variance(0) - 1.0 / 36.0) <= 2e-3);
}

TEST_CASE("triangular family keeps its mirror symmetry") {
  const IfsFamily f = make_sierpinski();
  const ParamMeasure law = ParamMeasure::uniform(f.parameter_space());
  InvariantMeasureOptions opts;
  opts.grid_h = 1.0 / 32.0;  // dyadic, so mirror pairs snap to mirror keys exactly
  const InvariantMeasureResult res = compute_invariant_measure(
      f, law, DiscreteMeasure::dirac(f.domain().center()), f.parameter_net(), 0.02, 40, opts);
  // the maps commute with x -> 1 - x, so the first moment pins to 1/2
  CHECK(std::abs(res.measure.mean()[0] - 0.5) <= 1e-9);
  CHECK(res.measure.size() <= 1u << 20);
}

TEST_CASE("no convergence inside the iteration cap raises") {
  const IfsFamily f = make_cantor();
  const ParamMeasure law = ParamMeasure::uniform(f.parameter_space());
  CHECK_THROWS_AS(compute_invariant_measure(f, law, DiscreteMeasure::dirac(make_point({0.0})),
                                            f.parameter_net(), 1e-12, 3),
                  NoConvergence);
}

}  // TEST_SUITE
