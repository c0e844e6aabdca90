// Acceptance gate for ifs-lab. Each numbered criterion prints exactly one
// [PASS]/[FAIL] line with measured values and its runtime budget; the process
// exit code is the number of failed criteria. Oracles are independent of the
// library paths they check: brute-force scans, a dense-simplex transport
// solver, closed forms, and hand-built reference sets.

#include "ifslab/attractor.hpp"
#include "ifslab/chaosgame.hpp"
#include "ifslab/ergodic.hpp"
#include "ifslab/families.hpp"
#include "ifslab/hyperbolicity.hpp"
#include "ifslab/ifs.hpp"
#include "ifslab/measure.hpp"
#include "ifslab/metric.hpp"

#include "lp_oracle.hpp"

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace ifslab;

namespace {

struct Criterion {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
  void note(const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

double brute_hausdorff(const PointCloud& a, const PointCloud& b) {
  const auto one_sided = [](const PointCloud& from, const PointCloud& to) {
    double worst = 0.0;
    for (const Point& p : from.points()) {
      double best = std::numeric_limits<double>::infinity();
      for (const Point& q : to.points()) best = std::min(best, dist(p, q));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(one_sided(a, b), one_sided(b, a));
}

PointCloud random_cloud(std::mt19937_64& gen, int dim, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Point> pts;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> xs(dim);
    for (double& x : xs) x = u(gen);
    pts.push_back(make_point(xs));
  }
  return PointCloud(std::move(pts));
}

DiscreteMeasure random_measure(std::mt19937_64& gen, int dim, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> xs(dim);
    for (double& x : xs) x = u(gen);
    atoms.push_back({make_point(xs), 0.05 + u(gen)});
  }
  return DiscreteMeasure::normalized(std::move(atoms));
}

double oracle_transport(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  const std::size_t m = mu.size();
  const std::size_t n = nu.size();
  std::vector<double> cost(m * n);
  std::vector<double> supply(m);
  std::vector<double> demand(n);
  for (std::size_t i = 0; i < m; ++i) {
    supply[i] = mu.atoms()[i].w;
    for (std::size_t j = 0; j < n; ++j) cost[i * n + j] = dist(mu.atoms()[i].x, nu.atoms()[j].x);
  }
  for (std::size_t j = 0; j < n; ++j) demand[j] = nu.atoms()[j].w;
  return lp_oracle::transport_cost(cost, supply, demand);
}

// Level-n images of a start point under every word of the Cantor pair
// (x/3, x/3 + 2/3), letters applied innermost first.
PointCloud ternary_level(double start, int levels) {
  std::vector<double> xs{start};
  for (int i = 0; i < levels; ++i) {
    std::vector<double> next;
    next.reserve(2 * xs.size());
    for (double x : xs) {
      next.push_back(x / 3.0);
      next.push_back(x / 3.0 + 2.0 / 3.0);
    }
    xs = std::move(next);
  }
  std::vector<Point> pts;
  pts.reserve(xs.size());
  for (double x : xs) pts.push_back(make_point({x}));
  return PointCloud(canonicalize_points(std::move(pts), 0.0));
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) return "<unreadable:" + path.string() + ">";
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(IFSLAB_BIN) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  if (status == -1 || !WIFEXITED(status)) return -1;
  return WEXITSTATUS(status);
}

// ---- criteria ----

Criterion c1_oracles() {
  Criterion c;
  std::mt19937_64 gen(20260819);
  std::uniform_int_distribution<int> dim_pick(1, 3);
  std::uniform_int_distribution<std::size_t> size_pick(1, 64);
  for (int i = 0; i < 200 && c.ok; ++i) {
    const int dim = dim_pick(gen);
    const PointCloud a = random_cloud(gen, dim, size_pick(gen));
    const PointCloud b = random_cloud(gen, dim, size_pick(gen));
    const double got = hausdorff_distance(a, b);
    const double want = brute_hausdorff(a, b);
    c.require(got == want, "hausdorff mismatch at instance " + std::to_string(i) + ": got " +
                               fmt(got) + " want " + fmt(want));
  }
  std::uniform_int_distribution<int> mdim_pick(1, 2);
  std::uniform_int_distribution<std::size_t> atom_pick(2, 8);
  double worst = 0.0;
  for (int i = 0; i < 200 && c.ok; ++i) {
    const int dim = mdim_pick(gen);
    const DiscreteMeasure mu = random_measure(gen, dim, atom_pick(gen));
    const DiscreteMeasure nu = random_measure(gen, dim, atom_pick(gen));
    const double got = kantorovich_distance(mu, nu);
    const double want = oracle_transport(mu, nu);
    worst = std::max(worst, std::abs(got - want));
    c.require(std::abs(got - want) <= 1e-9, "transport mismatch at instance " +
                                                std::to_string(i) + ": got " + fmt(got) +
                                                " want " + fmt(want));
  }
  if (c.ok) c.note("200 hausdorff exact, 200 transport worst |diff| " + fmt(worst));
  return c;
}

Criterion c2_profiles() {
  Criterion c;
  {
    const IfsFamily f = make_halving();
    const PointCloud net = epsilon_net(f.domain(), 1.0 / 16.0);
    const DiameterProfile p = diameter_profile(f, net, f.parameter_net(), 60, 8, 1);
    double worst = 0.0;
    for (std::size_t i = 0; i < p.n_values.size(); ++i)
      worst = std::max(worst, std::abs(p.sup_diam[i] - std::ldexp(1.0, -double(i) - 1)));
    c.require(worst <= 1e-9, "halving profile deviates " + fmt(worst));
    c.note("halving worst dev " + fmt(worst));
  }
  {
    const IfsFamily f = make_edalat();
    const PointCloud net = epsilon_net(f.domain(), 1.0 / 16.0);
    const DiameterProfile p = diameter_profile(f, net, f.parameter_net(), 60, 8, 1);
    double worst = 0.0;
    for (std::size_t i = 0; i < p.n_values.size(); ++i)
      worst = std::max(worst, std::abs(p.sup_diam[i] - 1.0 / (2.0 + double(i))));
    c.require(worst <= 1e-9, "edalat profile deviates " + fmt(worst));
    c.note("edalat worst dev " + fmt(worst));
  }
  {
    const IfsFamily f = make_identity(1);
    const PointCloud net = epsilon_net(f.domain(), 1.0 / 16.0);
    const DiameterProfile p = diameter_profile(f, net, f.parameter_net(), 10, 2, 1);
    const HyperbolicityVerdict v = verdict_from_profile(p, 1e-4);
    c.require(v.kind == HyperbolicityVerdict::Kind::counterexample,
              "identity family not flagged as a counterexample");
  }
  return c;
}

Criterion c3_cantor_attractor() {
  Criterion c;
  const IfsFamily f = make_cantor();
  const auto net = f.parameter_net();
  const double tol = 1e-4;
  const AttractorResult attr =
      compute_attractor(f, PointCloud({f.domain().center()}), net, tol, 200);

  // Reference level: the first n with 3^-n <= tol.
  const int level = static_cast<int>(std::ceil(std::log(tol) / std::log(1.0 / 3.0)));
  const double gap = hausdorff_distance(attr.cloud, ternary_level(0.0, level));
  c.require(gap <= 2e-4, "attractor vs level-" + std::to_string(level) +
                             " reference: " + fmt(gap));
  c.note("level " + std::to_string(level) + " gap " + fmt(gap));

  const double q2 = partial_fixed_point(f, {ParamValue::of_label(2)}, 1e-12)[0];
  const double q12 =
      partial_fixed_point(f, {ParamValue::of_label(1), ParamValue::of_label(2)}, 1e-12)[0];
  c.require(std::abs(q2 - 1.0) <= 1e-9, "fixed point of (2): " + fmt(q2));
  c.require(std::abs(q12 - 0.25) <= 1e-9, "fixed point of (1,2): " + fmt(q12));

  const DensityResult dens = fixed_point_density(f, attr.cloud, 10, net);
  const double bound = std::pow(3.0, -10) + 2.0 * attr.merge_radius;
  c.require(!dens.sampled, "density enumeration unexpectedly sampled");
  c.require(dens.hausdorff_gap <= bound,
            "density gap " + fmt(dens.hausdorff_gap) + " > " + fmt(bound));
  c.note("density gap " + fmt(dens.hausdorff_gap) + " <= " + fmt(bound));
  return c;
}

Criterion c4_blend_attractor() {
  Criterion c;
  const IfsFamily f = make_blend();  // lambda-net spacing 1/64
  const AttractorResult attr =
      compute_attractor(f, PointCloud({f.domain().center()}), f.parameter_net(), 0.002, 100);
  const PointCloud ref = epsilon_net(f.domain(), 1.0 / 64.0);
  const double gap = hausdorff_distance(attr.cloud, ref);
  c.require(gap <= 2.0 / 64.0, "attractor vs unit-interval net: " + fmt(gap));
  c.note("gap " + fmt(gap) + " <= " + fmt(2.0 / 64.0) + ", " +
         std::to_string(attr.cloud.size()) + " points");
  return c;
}

Criterion c5_invariant_measures() {
  Criterion c;
  {
    const IfsFamily f = make_cantor();
    const auto net = f.parameter_net();
    const ParamMeasure p = ParamMeasure::uniform(f.parameter_space());
    const double tol = 1e-3;
    const InvariantMeasureResult inv = compute_invariant_measure(
        f, p, DiscreteMeasure::dirac(f.domain().center()), net, tol, 60);
    const double mean = inv.measure.mean()[0];
    const double e2 = inv.measure.second_moment(0);
    c.require(std::abs(mean - 0.5) <= 1e-3, "cantor mean " + fmt(mean));
    c.require(std::abs(e2 - 0.375) <= 2e-3, "cantor second moment " + fmt(e2));
    c.note("cantor mean " + fmt(mean) + ", E2 " + fmt(e2));

    const double grid_h = inv.trace.empty() ? tol / 8.0 : inv.trace.back().grid_h;
    const double supp_gap = support_vs_attractor(inv.measure, ternary_level(0.0, 10));
    const double supp_bound = tol + grid_h + std::pow(3.0, -10);
    c.require(supp_gap <= supp_bound,
              "support gap " + fmt(supp_gap) + " > " + fmt(supp_bound));
    c.note("support gap " + fmt(supp_gap) + " <= " + fmt(supp_bound));

    const std::vector<DiscreteMeasure> seeds = {
        DiscreteMeasure::dirac(f.domain().center()),
        DiscreteMeasure::dirac(make_point({0.0})),
        DiscreteMeasure::uniform_on(epsilon_net(f.domain(), 0.5)),
    };
    const double seed_gap = seed_independence_check(f, p, seeds, net, tol, 60);
    c.require(seed_gap < 3.0 * tol, "seed-independence gap " + fmt(seed_gap));
    c.note("seed gap " + fmt(seed_gap));
  }
  {
    const IfsFamily f = make_blend();
    const ParamMeasure p = ParamMeasure::uniform(f.parameter_space());
    const InvariantMeasureResult inv = compute_invariant_measure(
        f, p, DiscreteMeasure::dirac(f.domain().center()), f.parameter_net(), 2e-3, 40);
    const double mean = inv.measure.mean()[0];
    const double var = inv.measure.variance(0);
    c.require(std::abs(mean - 0.5) <= 5e-3, "blend mean " + fmt(mean));
    c.require(std::abs(var - 1.0 / 36.0) <= 2e-3, "blend variance " + fmt(var));
    c.note("blend mean " + fmt(mean) + ", var " + fmt(var));
  }
  return c;
}

Criterion c6_birkhoff() {
  Criterion c;
  const IfsFamily f = make_sierpinski();
  const ParamMeasure law = ParamMeasure::uniform(f.parameter_space());
  const Observable obs = parse_observable("coord:0", f.dim());
  const std::size_t n = 100000;

  int hits = 0;
  double worst = 0.0;
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    const WordStream stream(1000 + trial, law);
    const double avg = birkhoff_average(f, stream, f.domain().center(), n, obs);
    const double dev = std::abs(avg - 0.5);
    worst = std::max(worst, dev);
    if (dev <= 0.01) ++hits;
  }
  c.require(hits >= 18, "only " + std::to_string(hits) + "/20 trials within 0.01");
  c.note(std::to_string(hits) + "/20 trials within 0.01, worst dev " + fmt(worst));

  // Module invariants at a smaller n: dropping the first letter moves the
  // average by at most 2*range/n, and the start point washes out at 1.5/n.
  const std::size_t m = 4096;
  for (std::uint64_t s = 0; s < 3; ++s) {
    const WordStream stream(500 + s, law);
    const Point x0 = f.domain().center();
    const double a0 = birkhoff_average(f, stream, x0, m, obs);

    Point x = f.apply(stream.letter(1), x0);
    double acc = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      acc += obs.fn(x);
      x = f.apply(stream.letter(k + 2), x);
    }
    const double shifted = acc / double(m);
    c.require(std::abs(a0 - shifted) <= 2.0 / double(m) + 1e-12,
              "shift consistency off at seed " + std::to_string(500 + s) + ": " +
                  fmt(std::abs(a0 - shifted)));

    const double a_corner =
        birkhoff_average(f, stream, make_point({0.0, 0.0}), m, obs);
    c.require(std::abs(a0 - a_corner) <= 1.5 / double(m),
              "start dependence at seed " + std::to_string(500 + s) + ": " +
                  fmt(std::abs(a0 - a_corner)));
  }
  return c;
}

Criterion c7_chaos() {
  Criterion c;
  {
    const IfsFamily f = make_halving();
    const ParamMeasure law = ParamMeasure::uniform(f.parameter_space());
    const PointCloud ref({make_point({0.0})});
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
      const DrawResult trial = chaos_game_trial(f, law, make_point({1.0}), 10, 10, ref,
                                                1e-2, seed);
      c.require(trial.pass && trial.hausdorff == std::ldexp(1.0, -10),
                "halving tail off at seed " + std::to_string(seed) + ": " +
                    fmt(trial.hausdorff));
    }
    c.note("halving tail distance exactly 2^-10");
  }
  {
    const IfsFamily f = make_sierpinski();
    const ParamMeasure law = ParamMeasure::uniform(f.parameter_space());
    const PointCloud ref =
        compute_attractor(f, PointCloud({f.domain().center()}), f.parameter_net(), 5e-3, 100)
            .cloud;
    const DrawReport report =
        chaos_game_suite(f, law, f.domain().center(), 100, 50000, ref, 0.02, 20, 42);
    c.require(report.pass_fraction >= 0.95,
              "sierpinski pass fraction " + fmt(report.pass_fraction));
    c.note("sierpinski pass fraction " + fmt(report.pass_fraction) + ", worst " +
           fmt(report.worst_hausdorff));
  }
  {
    const IfsFamily cantor = make_cantor();
    const FairnessCertificate fin = fairness_certificate(
        ParamMeasure::finite(cantor.parameter_space(), {0.5, 0.5}), 0.25);
    c.require(fin.analytic_lower == 0.5, "finite fairness bound " + fmt(fin.analytic_lower));

    const IfsFamily blend = make_blend();
    const FairnessCertificate box =
        fairness_certificate(ParamMeasure::uniform(blend.parameter_space()), 0.1);
    c.require(box.analytic_lower == 0.1, "box fairness bound " + fmt(box.analytic_lower));
  }
  return c;
}

Criterion c8_equivalence() {
  Criterion c;
  struct Case {
    const char* name;
    IfsFamily family;
    std::size_t n_max;
  };
  const Case cases[] = {
      {"halving", make_halving(), 30},
      {"cantor", make_cantor(), 30},
      {"edalat", make_edalat(), 128},
      {"blend", make_blend(), 30},
  };
  const double eps = 1e-2;
  for (const Case& k : cases) {
    const PointCloud net = epsilon_net(k.family.domain(), 1.0 / 16.0);
    const DiameterProfile profile =
        diameter_profile(k.family, net, k.family.parameter_net(), k.n_max, 16, 7);
    const WeakStarProbe probe = weak_star_probe(k.family, 0.25, {eps}, k.n_max, 16, 16, 9);
    const EquivalenceReport rep = equivalence_check(profile, probe, eps);
    c.require(rep.agree && rep.profile_reaches && rep.probe_reaches,
              std::string(k.name) + ": profile " + (rep.profile_reaches ? "yes" : "no") +
                  ", probe " + (rep.probe_reaches ? "yes" : "no"));
  }
  {
    const IfsFamily id = make_identity(1);
    const PointCloud net = epsilon_net(id.domain(), 1.0 / 16.0);
    const DiameterProfile profile = diameter_profile(id, net, id.parameter_net(), 20, 16, 7);
    const WeakStarProbe probe = weak_star_probe(id, 0.25, {eps}, 20, 16, 16, 9);
    const EquivalenceReport rep = equivalence_check(profile, probe, eps);
    c.require(rep.agree && !rep.profile_reaches && !rep.probe_reaches,
              std::string("identity: profile ") + (rep.profile_reaches ? "yes" : "no") +
                  ", probe " + (rep.probe_reaches ? "yes" : "no"));
  }
  if (c.ok) c.note("4 families reach eps 0.01 both ways, identity fails both ways");
  return c;
}

Criterion c9_reproducibility() {
  Criterion c;
  const fs::path root = fs::temp_directory_path() / "ifslab_acceptance";
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path fixtures(IFSLAB_FIXTURES);

  struct Job {
    const char* command;
    const char* config;
    std::vector<const char*> files;
  };
  const Job jobs[] = {
      {"attractor", "cantor.json", {"attractor.csv", "trace.csv", "summary.txt"}},
      {"measure", "cantor.json", {"measure.csv", "trace.csv", "summary.txt"}},
      {"ergodic", "sierpinski.json", {"ergodic.csv", "summary.txt"}},
      {"chaos", "cantor.json", {"draw_report.csv", "fairness.csv", "summary.txt"}},
      {"diagnose", "cantor.json", {"profile.csv", "probe.csv", "summary.txt"}},
      {"render", "pinned_point.json", {"render.ppm", "summary.txt"}},
  };
  for (const Job& job : jobs) {
    const fs::path out1 = root / (std::string(job.command) + "_1");
    const fs::path out2 = root / (std::string(job.command) + "_2");
    const fs::path out3 = root / (std::string(job.command) + "_t3");
    const std::string base = std::string(job.command) + " --config " +
                             (fixtures / job.config).string() + " --out ";
    const int e1 = run_cli(base + out1.string());
    const int e2 = run_cli(base + out2.string());
    const int e3 = run_cli(base + out3.string() + " --threads 3");
    c.require(e1 == 0 && e2 == 0 && e3 == 0,
              std::string(job.command) + " exited " + std::to_string(e1) + "/" +
                  std::to_string(e2) + "/" + std::to_string(e3));
    if (!c.ok) break;
    for (const char* file : job.files) {
      const std::string b1 = slurp(out1 / file);
      c.require(b1 == slurp(out2 / file),
                std::string(job.command) + "/" + file + " differs across reruns");
      c.require(b1 == slurp(out3 / file),
                std::string(job.command) + "/" + file + " differs across thread counts");
    }
  }
  if (c.ok) c.note("6 commands, reruns and 3-thread runs byte-identical");
  return c;
}

struct Entry {
  const char* id;
  const char* summary;
  double budget_s;
  Criterion (*fn)();
};

}  // namespace

int main() {
  const Entry entries[] = {
      {"C1", "set and measure distances match brute-force oracles", 30.0, c1_oracles},
      {"C2", "diameter profiles match closed forms; identity flagged", 5.0, c2_profiles},
      {"C3", "cantor attractor, word fixed points, and density", 60.0, c3_cantor_attractor},
      {"C4", "box-parameter blend attractor fills the interval", 30.0, c4_blend_attractor},
      {"C5", "invariant measures match moment recursions", 300.0, c5_invariant_measures},
      {"C6", "birkhoff averages hit the space mean", 120.0, c6_birkhoff},
      {"C7", "chaos game draws the attractor; fairness bounds", 120.0, c7_chaos},
      {"C8", "box-shrink and pair-probe diagnostics agree", 60.0, c8_equivalence},
      {"C9", "CLI reruns are byte-identical at any thread count", 600.0, c9_reproducibility},
  };

  int failures = 0;
  for (const Entry& entry : entries) {
    const auto t0 = std::chrono::steady_clock::now();
    Criterion crit;
    try {
      crit = entry.fn();
    } catch (const std::exception& e) {
      crit.ok = false;
      crit.note(std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs >= entry.budget_s) {
      crit.ok = false;
      crit.note("runtime budget exceeded");
    }
    failures += crit.ok ? 0 : 1;
    std::printf("[%s] %s: %s (%s%.1fs < %.0fs)\n", crit.ok ? "PASS" : "FAIL", entry.id,
                entry.summary, crit.detail.empty() ? "" : (crit.detail + "; ").c_str(), secs,
                entry.budget_s);
  }
  if (failures != 0) std::printf("%d criterion(s) failed\n", failures);
  return failures;
}
