#include "ifslab/commands.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <utility>
#include <vector>

#include "json.hpp"

#include "ifslab/attractor.hpp"
#include "ifslab/chaosgame.hpp"
#include "ifslab/ergodic.hpp"
#include "ifslab/errors.hpp"
#include "ifslab/hyperbolicity.hpp"
#include "ifslab/io.hpp"
#include "ifslab/measure.hpp"
#include "ifslab/rng.hpp"

namespace ifslab {

namespace {

using Lines = std::vector<std::pair<std::string, std::string>>;

std::string fmt(double v) { return format_number(v); }

Point box_corner(const BoxDomain& box, unsigned mask) {
  Point p;
  p.dim = box.dim();
  for (int i = 0; i < box.dim(); ++i) {
    p.c[i] = (mask >> i) & 1u ? box.hi.c[i] : box.lo.c[i];
  }
  return p;
}

std::vector<Point> box_corners(const BoxDomain& box) {
  std::vector<Point> out;
  for (unsigned mask = 0; mask < (1u << box.dim()); ++mask) out.push_back(box_corner(box, mask));
  return out;
}

std::vector<Point> seeds_or_center(const std::vector<Point>& pts, const BoxDomain& box) {
  if (!pts.empty()) return pts;
  return {box.center()};
}

std::string describe_word(const Word& w) {
  if (w.empty()) return "(empty)";
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += '|';
    if (w[i].label > 0) {
      out += std::to_string(w[i].label);
    } else {
      out += '(';
      for (int c = 0; c < w[i].coords.dim; ++c) {
        if (c) out += ',';
        out += fmt(w[i].coords.c[c]);
      }
      out += ')';
    }
  }
  return out;
}

void write_summary(const RunContext& rc, const Lines& lines) {
  std::string out = "command=" + rc.command + "\n";
  for (const auto& [k, v] : lines) out += k + "=" + v + "\n";
  write_text_atomic(rc.out_dir / "summary.txt", out);
}

void write_manifest(const RunContext& rc, std::vector<std::string> outputs) {
  outputs.push_back("summary.txt");
  const auto wall =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                            rc.started)
          .count();
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(rc.cfg.config_hash));
  nlohmann::json j;
  j["command"] = rc.command;
  j["config"] = rc.cfg.source_path;
  j["config_fnv1a64"] = hex;
  j["outputs"] = outputs;
  j["seed"] = rc.seed;
  j["threads"] = rc.threads;
  j["tool"] = "ifs-lab";
  j["version"] = kToolVersion;
  j["wall_ms"] = wall;
  write_text_atomic(rc.out_dir / "manifest.json", j.dump(2) + "\n");
}

std::string attractor_trace_csv(const AttractorResult& res) {
  std::string out = "iteration,gap,points\n";
  for (const AttractorTraceEntry& e : res.trace) {
    out += std::to_string(e.iteration) + "," + fmt(e.gap) + "," + std::to_string(e.points) + "\n";
  }
  return out;
}

AttractorOptions attractor_options(const RunContext& rc, const AttractorConfig& ac) {
  AttractorOptions opts;
  opts.merge_radius = ac.merge_radius;
  opts.point_budget = rc.cfg.budgets.point_budget;
  return opts;
}

InvariantMeasureOptions measure_options(const RunContext& rc, const MeasureConfig& mc) {
  InvariantMeasureOptions opts;
  opts.grid_h = mc.grid_h;
  opts.atom_budget = rc.cfg.budgets.atom_budget;
  opts.solver_budget = rc.cfg.budgets.solver_budget;
  return opts;
}

}  // namespace

int cmd_attractor(const RunContext& rc) {
  const IfsFamily f = build_family(rc.cfg);
  const std::vector<ParamValue> lam_net = f.parameter_net(rc.cfg.budgets.net_budget);
  const AttractorConfig& ac = rc.cfg.attractor;
  const AttractorOptions opts = attractor_options(rc, ac);

  const PointCloud seed(seeds_or_center(ac.seeds, f.domain()));
  const AttractorResult res = compute_attractor(f, seed, lam_net, ac.tol, ac.n_max, opts);

  // Re-run from the box corners: a genuine attractor pulls every seed to the
  // same set, so a large gap means the "limit" was an artifact of the seed.
  const AttractorResult alt =
      compute_attractor(f, PointCloud(box_corners(f.domain())), lam_net, ac.tol, ac.n_max, opts);
  const double seed_gap = hausdorff_distance(res.cloud, alt.cloud);
  const double seed_bound = 2.0 * ac.tol + 2.0 * res.merge_radius;
  if (seed_gap > seed_bound) {
    std::cerr << "attractor: limit set depends on the seed cloud (gap " << fmt(seed_gap)
              << " > bound " << fmt(seed_bound)
              << "); the iterate-gap test cannot certify this family at this tolerance\n";
    return 2;
  }

  Lines lines;
  lines.emplace_back("family", f.describe());
  lines.emplace_back("points", std::to_string(res.cloud.size()));
  lines.emplace_back("iterations", std::to_string(res.iterations));
  lines.emplace_back("final_gap", fmt(res.trace.back().gap));
  lines.emplace_back("tol", fmt(ac.tol));
  lines.emplace_back("merge_radius", fmt(res.merge_radius));
  lines.emplace_back("param_net_eps", fmt(res.lam_net_eps));
  lines.emplace_back("seed_gap", fmt(seed_gap));
  lines.emplace_back("seed_gap_bound", fmt(seed_bound));
  if (ac.density_max_len) {
    DensityOptions dopts;
    dopts.seed = rc.seed;
    const DensityResult dens = fixed_point_density(f, res.cloud, *ac.density_max_len, lam_net, dopts);
    lines.emplace_back("density_gap", fmt(dens.hausdorff_gap));
    lines.emplace_back("density_words", std::to_string(dens.words_used));
    lines.emplace_back("density_sampled", dens.sampled ? "true" : "false");
  }

  write_points_csv(rc.out_dir / "attractor.csv", res.cloud);
  write_text_atomic(rc.out_dir / "trace.csv", attractor_trace_csv(res));
  write_summary(rc, lines);
  write_manifest(rc, {"attractor.csv", "trace.csv"});
  std::cout << "attractor: " << res.cloud.size() << " points after " << res.iterations
            << " iterations -> " << rc.out_dir.string() << "\n";
  return 0;
}

int cmd_measure(const RunContext& rc) {
  const IfsFamily f = build_family(rc.cfg);
  const ParamMeasure law = build_law(rc.cfg, f);
  const std::vector<ParamValue> lam_net = f.parameter_net(rc.cfg.budgets.net_budget);
  const MeasureConfig& mc = rc.cfg.measure;
  const InvariantMeasureOptions opts = measure_options(rc, mc);

  const DiscreteMeasure seed = DiscreteMeasure::dirac(f.domain().center());
  const InvariantMeasureResult res =
      compute_invariant_measure(f, law, seed, lam_net, mc.tol, mc.n_max, opts);

  Lines lines;
  lines.emplace_back("family", f.describe());
  lines.emplace_back("atoms", std::to_string(res.measure.size()));
  lines.emplace_back("iterations", std::to_string(res.iterations));
  lines.emplace_back("final_gap", fmt(res.trace.back().gap));
  lines.emplace_back("tol", fmt(mc.tol));
  lines.emplace_back("grid_h", fmt(res.trace.back().grid_h));
  const Point mean = res.measure.mean();
  const char* axis[3] = {"mean_x", "mean_y", "mean_z"};
  for (int i = 0; i < res.measure.dim(); ++i) lines.emplace_back(axis[i], fmt(mean.c[i]));
  lines.emplace_back("variance_x", fmt(res.measure.variance(0)));

  if (mc.independence_seeds >= 2) {
    std::vector<DiscreteMeasure> seeds{seed};
    const std::vector<Point> corners = box_corners(f.domain());
    if (mc.independence_seeds > corners.size() + 1) {
      throw InvalidArgument("measure: at most " + std::to_string(corners.size() + 1) +
                            " independence seeds for this box");
    }
    for (std::size_t i = 0; seeds.size() < mc.independence_seeds; ++i) {
      seeds.push_back(DiscreteMeasure::dirac(corners[i]));
    }
    const double gap = seed_independence_check(f, law, seeds, lam_net, mc.tol, mc.n_max, opts);
    const double bound = 3.0 * mc.tol;
    lines.emplace_back("independence_gap", fmt(gap));
    lines.emplace_back("independence_bound", fmt(bound));
    if (gap > bound) {
      std::cerr << "measure: limit measure depends on the seed (gap " << fmt(gap) << " > bound "
                << fmt(bound) << ")\n";
      return 2;
    }
  }

  if (mc.support_check) {
    const AttractorConfig& ac = rc.cfg.attractor;
    const AttractorResult att = compute_attractor(
        f, PointCloud(seeds_or_center(ac.seeds, f.domain())), lam_net, ac.tol, ac.n_max,
        attractor_options(rc, ac));
    lines.emplace_back("support_gap", fmt(support_vs_attractor(res.measure, att.cloud, 0.0)));
  }

  std::string trace = "iteration,gap,atoms,grid_h\n";
  for (const MeasureTraceEntry& e : res.trace) {
    trace += std::to_string(e.iteration) + "," + fmt(e.gap) + "," + std::to_string(e.atoms) + "," +
             fmt(e.grid_h) + "\n";
  }

  write_measure_csv(rc.out_dir / "measure.csv", res.measure);
  write_text_atomic(rc.out_dir / "trace.csv", trace);
  write_summary(rc, lines);
  write_manifest(rc, {"measure.csv", "trace.csv"});
  std::cout << "measure: " << res.measure.size() << " atoms after " << res.iterations
            << " iterations -> " << rc.out_dir.string() << "\n";
  return 0;
}

int cmd_ergodic(const RunContext& rc) {
  const IfsFamily f = build_family(rc.cfg);
  const ParamMeasure law = build_law(rc.cfg, f);
  const std::vector<ParamValue> lam_net = f.parameter_net(rc.cfg.budgets.net_budget);
  const ErgodicConfig& ec = rc.cfg.ergodic;

  const DiscreteMeasure nu =
      compute_invariant_measure(f, law, DiscreteMeasure::dirac(f.domain().center()), lam_net,
                                ec.measure.tol, ec.measure.n_max, measure_options(rc, ec.measure))
          .measure;

  std::vector<Observable> obs;
  for (const std::string& name : ec.observables) obs.push_back(parse_observable(name, f.dim()));
  const PointCloud starts(seeds_or_center(ec.starts, f.domain()));

  ErgodicOptions eopts;
  eopts.orbit_length = ec.orbit_length;
  eopts.trials = ec.trials;
  eopts.seed = rc.seed;
  const ErgodicReport report = ergodicity_test(f, law, nu, obs, starts, eopts);

  std::string csv = "observable,start,trial,average,space_mean,abs_dev\n";
  for (const ErgodicRow& row : report.rows) {
    for (const BirkhoffSample& s : row.samples) {
      csv += "\"" + row.observable + "\"," + std::to_string(s.start_index) + "," +
             std::to_string(s.trial) + "," + fmt(s.average) + "," + fmt(row.space_mean) + "," +
             fmt(std::abs(s.average - row.space_mean)) + "\n";
    }
  }

  Lines lines;
  lines.emplace_back("family", f.describe());
  lines.emplace_back("orbit_length", std::to_string(report.orbit_length));
  lines.emplace_back("trials", std::to_string(report.trials));
  lines.emplace_back("starts", std::to_string(starts.size()));
  lines.emplace_back("measure_atoms", std::to_string(nu.size()));
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const std::string tag = "obs" + std::to_string(i);
    lines.emplace_back(tag, report.rows[i].observable);
    lines.emplace_back(tag + "_space_mean", fmt(report.rows[i].space_mean));
    lines.emplace_back(tag + "_time_mean", fmt(report.rows[i].time_mean));
    lines.emplace_back(tag + "_max_abs_dev", fmt(report.rows[i].max_abs_dev));
  }

  write_text_atomic(rc.out_dir / "ergodic.csv", csv);
  write_summary(rc, lines);
  write_manifest(rc, {"ergodic.csv"});
  std::cout << "ergodic: " << report.rows.size() << " observables, "
            << starts.size() * report.trials << " runs each -> " << rc.out_dir.string() << "\n";
  return 0;
}

int cmd_chaos(const RunContext& rc) {
  const IfsFamily f = build_family(rc.cfg);
  const ParamMeasure law = build_law(rc.cfg, f);
  const std::vector<ParamValue> lam_net = f.parameter_net(rc.cfg.budgets.net_budget);
  const ChaosConfig& cc = rc.cfg.chaos;

  const FairnessCertificate fair =
      fairness_certificate(law, cc.fairness_delta, 256, derive_seed(rc.seed, cc.trials));

  const AttractorResult ref = compute_attractor(
      f, PointCloud(seeds_or_center(cc.reference.seeds, f.domain())), lam_net, cc.reference.tol,
      cc.reference.n_max, attractor_options(rc, cc.reference));

  const DrawReport report = chaos_game_suite(f, law, f.domain().center(), cc.burn_in, cc.tail,
                                             ref.cloud, cc.eps, cc.trials, rc.seed);

  std::string draws = "trial,seed,hausdorff,tail_points,pass\n";
  for (std::size_t t = 0; t < report.trials.size(); ++t) {
    const DrawResult& r = report.trials[t];
    draws += std::to_string(t) + "," + std::to_string(r.seed) + "," + fmt(r.hausdorff) + "," +
             std::to_string(r.tail_points) + "," + (r.pass ? "1" : "0") + "\n";
  }
  std::string fairness = "delta,analytic_lower,empirical_min,worst_label\n";
  fairness += fmt(fair.delta) + "," + fmt(fair.analytic_lower) + "," + fmt(fair.empirical_min) +
              "," + std::to_string(fair.worst_label) + "\n";

  Lines lines;
  lines.emplace_back("family", f.describe());
  lines.emplace_back("trials", std::to_string(report.trials.size()));
  lines.emplace_back("burn_in", std::to_string(report.burn_in));
  lines.emplace_back("tail", std::to_string(report.tail));
  lines.emplace_back("eps", fmt(report.eps));
  lines.emplace_back("pass_fraction", fmt(report.pass_fraction));
  lines.emplace_back("worst_hausdorff", fmt(report.worst_hausdorff));
  lines.emplace_back("fairness_delta", fmt(fair.delta));
  lines.emplace_back("fairness_analytic_lower", fmt(fair.analytic_lower));
  lines.emplace_back("fairness_empirical_min", fmt(fair.empirical_min));
  lines.emplace_back("reference_points", std::to_string(ref.cloud.size()));

  write_text_atomic(rc.out_dir / "draw_report.csv", draws);
  write_text_atomic(rc.out_dir / "fairness.csv", fairness);
  write_summary(rc, lines);
  write_manifest(rc, {"draw_report.csv", "fairness.csv"});
  std::cout << "chaos: pass fraction " << fmt(report.pass_fraction) << " over "
            << report.trials.size() << " trials -> " << rc.out_dir.string() << "\n";
  return 0;
}

int cmd_diagnose(const RunContext& rc) {
  const IfsFamily f = build_family(rc.cfg);
  const std::vector<ParamValue> lam_net = f.parameter_net(rc.cfg.budgets.net_budget);
  const DiagnoseConfig& dc = rc.cfg.diagnose;

  double net_eps = f.domain().diameter() / 16.0;
  if (!(net_eps > 0.0)) net_eps = 1.0;
  const PointCloud x_net = epsilon_net(f.domain(), net_eps, rc.cfg.budgets.net_budget);

  const DiameterProfile profile =
      diameter_profile(f, x_net, lam_net, dc.n_max, dc.words, rc.seed, net_eps);
  const HyperbolicityVerdict verdict = verdict_from_profile(profile, dc.verdict_eps);
  const WeakStarProbe probe = weak_star_probe(f, dc.eta, dc.eps_list, dc.n_max, dc.pairs,
                                              dc.words, derive_seed(rc.seed, 1));

  std::string profile_csv = "n,sup_diam\n";
  for (std::size_t i = 0; i < profile.n_values.size(); ++i) {
    profile_csv += std::to_string(profile.n_values[i]) + "," + fmt(profile.sup_diam[i]) + "\n";
  }
  std::string probe_csv = "depth,max_dist\n";
  for (std::size_t i = 0; i < probe.max_dist.size(); ++i) {
    probe_csv += std::to_string(i + 1) + "," + fmt(probe.max_dist[i]) + "\n";
  }

  const char* kind = verdict.kind == HyperbolicityVerdict::Kind::weakly_hyperbolic_evidence
                         ? "weakly_hyperbolic_evidence"
                     : verdict.kind == HyperbolicityVerdict::Kind::counterexample
                         ? "counterexample"
                         : "inconclusive";

  Lines lines;
  lines.emplace_back("family", f.describe());
  lines.emplace_back("verdict", kind);
  lines.emplace_back("achieved_sup_diam", fmt(verdict.achieved));
  lines.emplace_back("verdict_eps", fmt(dc.verdict_eps));
  if (!verdict.witness.empty()) lines.emplace_back("witness", describe_word(verdict.witness));
  lines.emplace_back("depth", std::to_string(dc.n_max));
  lines.emplace_back("words_sampled", std::to_string(profile.words_sampled));
  lines.emplace_back("phase_net_eps", fmt(profile.net_eps));
  lines.emplace_back("disc_error_estimate", fmt(profile.disc_error_estimate));
  lines.emplace_back("probe_eta", fmt(probe.eta));
  lines.emplace_back("probe_pairs", std::to_string(probe.pairs));
  for (std::size_t i = 0; i < probe.eps_list.size(); ++i) {
    lines.emplace_back("probe_eps_" + std::to_string(i), fmt(probe.eps_list[i]));
    lines.emplace_back("probe_n0_" + std::to_string(i),
                       probe.n0[i] ? std::to_string(*probe.n0[i]) : "none");
  }
  if (dc.equivalence_eps) {
    const EquivalenceReport eq = equivalence_check(profile, probe, *dc.equivalence_eps);
    lines.emplace_back("equivalence_eps", fmt(eq.eps));
    lines.emplace_back("profile_reaches", eq.profile_reaches ? "true" : "false");
    lines.emplace_back("probe_reaches", eq.probe_reaches ? "true" : "false");
    lines.emplace_back("equivalence_agree", eq.agree ? "true" : "false");
    if (!eq.agree) {
      std::cerr << "diagnose: box-shrink profile and pairwise probe disagree at eps "
                << fmt(eq.eps) << "\n";
    }
  }

  write_text_atomic(rc.out_dir / "profile.csv", profile_csv);
  write_text_atomic(rc.out_dir / "probe.csv", probe_csv);
  write_summary(rc, lines);
  write_manifest(rc, {"profile.csv", "probe.csv"});
  std::cout << "diagnose: " << kind << " (sup diameter " << fmt(verdict.achieved) << " at depth "
            << dc.n_max << ") -> " << rc.out_dir.string() << "\n";
  return 0;
}

int cmd_render(const RunContext& rc) {
  const IfsFamily f = build_family(rc.cfg);
  const std::vector<ParamValue> lam_net = f.parameter_net(rc.cfg.budgets.net_budget);
  const RenderConfig& rcfg = rc.cfg.render;
  RenderOptions ropts;
  ropts.width = rcfg.width;
  ropts.height = rcfg.height;

  Lines lines;
  lines.emplace_back("family", f.describe());
  lines.emplace_back("source", rcfg.source);
  lines.emplace_back("width", std::to_string(rcfg.width));
  lines.emplace_back("height", std::to_string(rcfg.height));

  if (rcfg.source == "attractor") {
    const AttractorConfig& ac = rc.cfg.attractor;
    const AttractorResult res =
        compute_attractor(f, PointCloud(seeds_or_center(ac.seeds, f.domain())), lam_net, ac.tol,
                          ac.n_max, attractor_options(rc, ac));
    render_points_ppm(rc.out_dir / "render.ppm", res.cloud, f.domain(), ropts);
    lines.emplace_back("points", std::to_string(res.cloud.size()));
  } else {
    const ParamMeasure law = build_law(rc.cfg, f);
    const MeasureConfig& mc = rc.cfg.measure;
    const InvariantMeasureResult res =
        compute_invariant_measure(f, law, DiscreteMeasure::dirac(f.domain().center()), lam_net,
                                  mc.tol, mc.n_max, measure_options(rc, mc));
    render_measure_ppm(rc.out_dir / "render.ppm", res.measure, f.domain(), ropts);
    lines.emplace_back("atoms", std::to_string(res.measure.size()));
  }

  write_summary(rc, lines);
  write_manifest(rc, {"render.ppm"});
  std::cout << "render: " << rcfg.width << "x" << rcfg.height << " " << rcfg.source << " -> "
            << rc.out_dir.string() << "\n";
  return 0;
}

int run_command(const RunContext& rc) {
  if (rc.command == "attractor") return cmd_attractor(rc);
  if (rc.command == "measure") return cmd_measure(rc);
  if (rc.command == "ergodic") return cmd_ergodic(rc);
  if (rc.command == "chaos") return cmd_chaos(rc);
  if (rc.command == "diagnose") return cmd_diagnose(rc);
  if (rc.command == "render") return cmd_render(rc);
  throw InvalidArgument("unknown command '" + rc.command + "'");
}

}  // namespace ifslab
