#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "ifslab/errors.hpp"
#include "ifslab/measure.hpp"

namespace ifslab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kResidualEps = 1e-15;  // supply/demand below this counts as exhausted

// Total order on measures so that distance arguments can be put in a canonical
// order; this makes the flow solver's result independent of argument order.
bool measure_lex_less(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (std::size_t k = 0; k < a.size(); ++k) {
    const Atom& x = a.atoms()[k];
    const Atom& y = b.atoms()[k];
    if (lex_less(x.x, y.x)) return true;
    if (lex_less(y.x, x.x)) return false;
    if (x.w != y.w) return x.w < y.w;
  }
  return false;
}

// W1 on the line: integral of |F_a - F_b| over the merged breakpoints.
// Atom lists are position-sorted by construction.
double quantile_distance_1d(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  const auto& as = a.atoms();
  const auto& bs = b.atoms();
  std::size_t i = 0;
  std::size_t j = 0;
  double fa = 0.0;
  double fb = 0.0;
  double cost = 0.0;
  double z_prev = 0.0;
  bool started = false;
  while (i < as.size() || j < bs.size()) {
    const double za = i < as.size() ? as[i].x.c[0] : kInf;
    const double zb = j < bs.size() ? bs[j].x.c[0] : kInf;
    const double z = std::min(za, zb);
    if (started) cost += std::abs(fa - fb) * (z - z_prev);
    while (i < as.size() && as[i].x.c[0] == z) fa += as[i++].w;
    while (j < bs.size() && bs[j].x.c[0] == z) fb += bs[j++].w;
    z_prev = z;
    started = true;
  }
  return cost;
}

struct FlowSolution {
  std::vector<TransportPlan::Flow> flows;
  double cost = 0.0;
};

// Successive shortest augmenting paths on the complete bipartite transport
// graph, with Johnson potentials so Dijkstra sees nonnegative reduced costs.
// All tie-breaks go to the lowest node index, so the run is deterministic.
FlowSolution solve_min_cost_flow(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  const std::size_t n = mu.size();
  const std::size_t m = nu.size();
  const std::size_t V = n + m;  // sources 0..n-1, sinks n..n+m-1

  std::vector<double> c(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      c[i * m + j] = dist(mu.atoms()[i].x, nu.atoms()[j].x);
    }
  }
  std::vector<double> a(n);
  std::vector<double> b(m);
  for (std::size_t i = 0; i < n; ++i) a[i] = mu.atoms()[i].w;
  for (std::size_t j = 0; j < m; ++j) b[j] = nu.atoms()[j].w;

  std::vector<double> flow(n * m, 0.0);
  std::vector<double> pot(V, 0.0);
  std::vector<double> d(V);
  std::vector<std::size_t> parent(V);
  std::vector<char> done(V);
  constexpr std::size_t kNoParent = static_cast<std::size_t>(-1);
  const std::size_t max_augment = 8 * V + 64;

  for (std::size_t aug = 0;; ++aug) {
    const bool have_supply =
        std::any_of(a.begin(), a.end(), [](double v) { return v > kResidualEps; });
    const bool have_demand =
        std::any_of(b.begin(), b.end(), [](double v) { return v > kResidualEps; });
    if (!have_supply || !have_demand) break;
    if (aug >= max_augment) {
      throw Error("transport solver: augmentation cap hit (degenerate instance)");
    }

    std::fill(d.begin(), d.end(), kInf);
    std::fill(parent.begin(), parent.end(), kNoParent);
    std::fill(done.begin(), done.end(), char{0});
    for (std::size_t i = 0; i < n; ++i) {
      if (a[i] > kResidualEps) d[i] = 0.0;
    }
    for (std::size_t round = 0; round < V; ++round) {
      std::size_t u = V;
      for (std::size_t v = 0; v < V; ++v) {
        if (!done[v] && d[v] < (u == V ? kInf : d[u])) u = v;
      }
      if (u == V) break;
      done[u] = 1;
      if (u < n) {
        // forward arcs: source u to every sink, uncapacitated
        for (std::size_t j = 0; j < m; ++j) {
          const double rc = std::max(0.0, c[u * m + j] + pot[u] - pot[n + j]);
          if (d[u] + rc < d[n + j]) {
            d[n + j] = d[u] + rc;
            parent[n + j] = u;
          }
        }
      } else {
        // backward arcs: undo flow already routed into sink u
        const std::size_t j = u - n;
        for (std::size_t i = 0; i < n; ++i) {
          if (flow[i * m + j] <= 0.0) continue;
          const double rc = std::max(0.0, -c[i * m + j] + pot[u] - pot[i]);
          if (d[u] + rc < d[i]) {
            d[i] = d[u] + rc;
            parent[i] = u;
          }
        }
      }
    }

    std::size_t t = m;
    for (std::size_t j = 0; j < m; ++j) {
      if (b[j] > kResidualEps && d[n + j] < kInf && (t == m || d[n + j] < d[n + t])) t = j;
    }
    if (t == m) throw Error("transport solver: no augmenting path (unbalanced instance)");

    // bottleneck along the path, then apply
    double delta = b[t];
    std::size_t v = n + t;
    while (parent[v] != kNoParent) {
      const std::size_t u = parent[v];
      if (v < n) delta = std::min(delta, flow[v * m + (u - n)]);
      v = u;
    }
    delta = std::min(delta, a[v]);
    const std::size_t root = v;
    v = n + t;
    while (parent[v] != kNoParent) {
      const std::size_t u = parent[v];
      if (u < n) {
        flow[u * m + (v - n)] += delta;
      } else {
        flow[v * m + (u - n)] -= delta;
      }
      v = u;
    }
    a[root] -= delta;
    b[t] -= delta;

    const double reach = d[n + t];
    for (std::size_t w = 0; w < V; ++w) pot[w] += std::min(d[w], reach);
  }

  FlowSolution sol;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (flow[i * m + j] > 0.0) {
        sol.flows.push_back({i, j, flow[i * m + j]});
        sol.cost += flow[i * m + j] * c[i * m + j];
      }
    }
  }
  return sol;
}

void check_flow_budget(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                       std::size_t solver_budget) {
  const std::size_t worst = std::max(mu.size(), nu.size());
  if (worst > solver_budget) {
    throw BudgetExceeded("transport solver: a side has " + std::to_string(worst) +
                             " atoms, budget is " + std::to_string(solver_budget) +
                             "; consolidate on a coarser grid or raise solver_budget",
                         solver_budget, worst);
  }
}

}  // namespace

double kantorovich_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                            const KantorovichOptions& opts) {
  if (mu.dim() != nu.dim()) {
    throw DimensionMismatch("kantorovich_distance: measures of different dimension");
  }
  const bool swapped = measure_lex_less(nu, mu);
  const DiscreteMeasure& lhs = swapped ? nu : mu;
  const DiscreteMeasure& rhs = swapped ? mu : nu;

  TransportMethod method = opts.method;
  if (method == TransportMethod::automatic) {
    method = lhs.dim() == 1 ? TransportMethod::quantile_1d : TransportMethod::min_cost_flow;
  }
  if (method == TransportMethod::quantile_1d) {
    if (lhs.dim() != 1) {
      throw InvalidArgument("kantorovich_distance: quantile method needs dimension 1");
    }
    return quantile_distance_1d(lhs, rhs);
  }
  check_flow_budget(lhs, rhs, opts.solver_budget);
  return solve_min_cost_flow(lhs, rhs).cost;
}

TransportPlan transport_plan(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                             std::size_t solver_budget) {
  if (mu.dim() != nu.dim()) {
    throw DimensionMismatch("transport_plan: measures of different dimension");
  }
  check_flow_budget(mu, nu, solver_budget);
  FlowSolution sol = solve_min_cost_flow(mu, nu);
  return TransportPlan{std::move(sol.flows), sol.cost};
}

}  // namespace ifslab
