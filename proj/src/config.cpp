#include "ifslab/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"

#include "ifslab/errors.hpp"
#include "ifslab/families.hpp"
#include "ifslab/rng.hpp"

namespace ifslab {

namespace {

using nlohmann::json;

/// json node + its path from the root, for error messages like
/// "$.ifs.maps[1].a: expected 4 numbers".
struct Cursor {
  const json* node;
  std::string path;

  [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(path + ": " + msg); }

  void require_keys(std::initializer_list<const char*> allowed) const {
    if (!node->is_object()) fail("expected an object");
    for (auto it = node->begin(); it != node->end(); ++it) {
      bool known = false;
      for (const char* k : allowed) {
        if (it.key() == k) {
          known = true;
          break;
        }
      }
      if (!known) fail("unknown key '" + it.key() + "'");
    }
  }

  bool has(const char* key) const { return node->is_object() && node->contains(key); }

  Cursor child(const char* key) const {
    if (!has(key)) fail("missing required key '" + std::string(key) + "'");
    return {&node->at(key), path + "." + key};
  }

  std::optional<Cursor> maybe(const char* key) const {
    if (!has(key)) return std::nullopt;
    return Cursor{&node->at(key), path + "." + key};
  }

  std::size_t array_size() const {
    if (!node->is_array()) fail("expected an array");
    return node->size();
  }

  Cursor at(std::size_t i) const {
    return {&(*node)[i], path + "[" + std::to_string(i) + "]"};
  }

  double number() const {
    if (!node->is_number()) fail("expected a number");
    return node->get<double>();
  }

  double positive() const {
    const double v = number();
    if (!(v > 0.0)) fail("must be > 0");
    return v;
  }

  std::size_t count(std::size_t at_least = 0) const {
    if (!node->is_number_integer() || node->get<long long>() < 0) {
      fail("expected a nonnegative integer");
    }
    const auto v = node->get<unsigned long long>();
    if (v < at_least) fail("must be at least " + std::to_string(at_least));
    return static_cast<std::size_t>(v);
  }

  std::uint64_t u64() const {
    if (!node->is_number_integer() || node->get<long long>() < 0) {
      fail("expected a nonnegative integer");
    }
    return node->get<std::uint64_t>();
  }

  std::string str() const {
    if (!node->is_string()) fail("expected a string");
    return node->get<std::string>();
  }

  bool boolean() const {
    if (!node->is_boolean()) fail("expected true or false");
    return node->get<bool>();
  }

  std::vector<double> numbers(std::size_t want = 0) const {
    const std::size_t n = array_size();
    if (want && n != want) fail("expected " + std::to_string(want) + " numbers");
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(at(i).number());
    return out;
  }
};

Point parse_point(const Cursor& c, int want_dim = 0) {
  const std::vector<double> v = c.numbers(static_cast<std::size_t>(want_dim));
  if (v.empty() || v.size() > 3) c.fail("a point needs 1-3 coordinates");
  return make_point(v);
}

std::vector<Point> parse_points(const Cursor& c, int want_dim) {
  std::vector<Point> out;
  for (std::size_t i = 0; i < c.array_size(); ++i) out.push_back(parse_point(c.at(i), want_dim));
  return out;
}

BoxDomain parse_box(const Cursor& c) {
  c.require_keys({"lo", "hi"});
  const Point lo = parse_point(c.child("lo"));
  const Point hi = parse_point(c.child("hi"));
  return make_box(lo, hi);
}

AffineMap parse_affine(const Cursor& c, int dim) {
  c.require_keys({"a", "b"});
  const std::vector<double> a =
      c.child("a").numbers(static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim));
  const std::vector<double> b = c.child("b").numbers(static_cast<std::size_t>(dim));
  return make_affine(dim, a, b);
}

Poly2 parse_poly(const Cursor& c) {
  if (c.node->is_number()) return Poly2::constant(c.number());
  c.require_keys({"c0", "lin", "quad"});
  Poly2 p;
  if (auto v = c.maybe("c0")) p.c0 = v->number();
  if (auto v = c.maybe("lin")) {
    const std::vector<double> lin = v->numbers();
    if (lin.size() > 3) v->fail("at most 3 linear coefficients");
    for (std::size_t i = 0; i < lin.size(); ++i) p.lin[i] = lin[i];
  }
  if (auto v = c.maybe("quad")) {
    const std::vector<double> quad = v->numbers();
    if (quad.size() > 6) v->fail("at most 6 quadratic coefficients");
    for (std::size_t i = 0; i < quad.size(); ++i) p.quad[i] = quad[i];
  }
  return p;
}

void parse_ifs(const Cursor& root, ExperimentConfig& cfg) {
  const Cursor ifs = root.child("ifs");
  FamilySpec& fs = cfg.family;

  if (!ifs.node->is_object()) ifs.fail("expected an object");
  fs.kind = ifs.child("kind").str();

  const auto domain = root.maybe("domain");
  if (fs.kind == "builtin") {
    ifs.require_keys({"kind", "name", "dim"});
    fs.name = ifs.child("name").str();
    if (domain) domain->fail("builtin families fix their own domain");
    if (fs.name == "identity") {
      fs.dim = static_cast<int>(ifs.child("dim").count(1));
      if (fs.dim > kMaxDim) ifs.child("dim").fail("dimension is capped at 3");
    } else if (ifs.has("dim")) {
      ifs.child("dim").fail("only the identity builtin takes a dimension");
    }
    return;
  }
  if (fs.kind == "analytic") {
    ifs.require_keys({"kind", "name"});
    fs.name = ifs.child("name").str();
    if (fs.name != "halving" && fs.name != "edalat") {
      ifs.child("name").fail("analytic families are 'halving' or 'edalat'");
    }
    if (!domain) root.fail("missing required key 'domain'");
    fs.domain = parse_box(*domain);
    if (fs.domain->dim() != 1) domain->fail("analytic families are one-dimensional");
    return;
  }
  if (fs.kind == "affine_list") {
    ifs.require_keys({"kind", "maps"});
    if (!domain) root.fail("missing required key 'domain'");
    fs.domain = parse_box(*domain);
    const int dim = fs.domain->dim();
    const Cursor maps = ifs.child("maps");
    if (maps.array_size() == 0) maps.fail("need at least one map");
    for (std::size_t i = 0; i < maps.array_size(); ++i) {
      fs.maps.push_back(parse_affine(maps.at(i), dim));
    }
    return;
  }
  if (fs.kind == "poly_affine_box") {
    ifs.require_keys({"kind", "map"});
    if (!domain) root.fail("missing required key 'domain'");
    fs.domain = parse_box(*domain);
    const int dim = fs.domain->dim();
    const Cursor map = ifs.child("map");
    map.require_keys({"A", "b"});
    const Cursor rows = map.child("A");
    if (rows.array_size() != static_cast<std::size_t>(dim)) {
      rows.fail("need " + std::to_string(dim) + " rows");
    }
    fs.poly.dim = dim;
    for (int r = 0; r < dim; ++r) {
      const Cursor row = rows.at(static_cast<std::size_t>(r));
      if (row.array_size() != static_cast<std::size_t>(dim)) {
        row.fail("need " + std::to_string(dim) + " entries");
      }
      for (int cidx = 0; cidx < dim; ++cidx) {
        fs.poly.A[static_cast<std::size_t>(r)][static_cast<std::size_t>(cidx)] =
            parse_poly(row.at(static_cast<std::size_t>(cidx)));
      }
    }
    const Cursor bs = map.child("b");
    if (bs.array_size() != static_cast<std::size_t>(dim)) {
      bs.fail("need " + std::to_string(dim) + " entries");
    }
    for (int r = 0; r < dim; ++r) {
      fs.poly.b[static_cast<std::size_t>(r)] = parse_poly(bs.at(static_cast<std::size_t>(r)));
    }
    return;
  }
  ifs.child("kind").fail("unknown family kind '" + fs.kind +
                         "' (builtin, affine_list, poly_affine_box, analytic)");
}

void parse_params(const Cursor& root, ExperimentConfig& cfg) {
  const auto params = root.maybe("params");
  if (!params) {
    if (cfg.family.kind == "poly_affine_box") {
      root.fail("poly_affine_box needs a params section with a box");
    }
    return;
  }
  params->require_keys({"probs", "box", "net_spacing"});
  const bool box_family =
      cfg.family.kind == "poly_affine_box" || (cfg.family.kind == "builtin" && cfg.family.name == "blend");
  if (auto probs = params->maybe("probs")) {
    if (box_family) probs->fail("explicit probabilities need a finite family");
    cfg.probs = probs->numbers();
    if (cfg.probs.empty()) probs->fail("need at least one probability");
  }
  if (auto ns = params->maybe("net_spacing")) {
    if (!box_family) ns->fail("net spacing only applies to box-parameter families");
    cfg.family.net_spacing = ns->positive();
  }
  if (auto box = params->maybe("box")) {
    if (cfg.family.kind != "poly_affine_box") box->fail("only poly_affine_box takes a parameter box");
    cfg.family.param_box = parse_box(*box);
  } else if (cfg.family.kind == "poly_affine_box") {
    params->fail("poly_affine_box needs params.box");
  }
}

void parse_attractor_into(const Cursor& c, AttractorConfig& out) {
  c.require_keys({"seed_points", "tol", "n_max", "merge_radius", "density_max_len"});
  if (auto v = c.maybe("seed_points")) out.seeds = parse_points(*v, 0);
  if (auto v = c.maybe("tol")) out.tol = v->positive();
  if (auto v = c.maybe("n_max")) out.n_max = v->count(1);
  if (auto v = c.maybe("merge_radius")) out.merge_radius = v->positive();
  if (auto v = c.maybe("density_max_len")) out.density_max_len = v->count(1);
}

void parse_measure_into(const Cursor& c, MeasureConfig& out) {
  c.require_keys({"tol", "n_max", "grid_h", "support_check", "independence_seeds"});
  if (auto v = c.maybe("tol")) out.tol = v->positive();
  if (auto v = c.maybe("n_max")) out.n_max = v->count(1);
  if (auto v = c.maybe("grid_h")) out.grid_h = v->positive();
  if (auto v = c.maybe("support_check")) out.support_check = v->boolean();
  if (auto v = c.maybe("independence_seeds")) {
    out.independence_seeds = v->count();
    if (out.independence_seeds == 1) v->fail("need 0 (off) or at least 2 seeds");
  }
}

void parse_sections(const Cursor& root, ExperimentConfig& cfg) {
  if (auto seeds = root.maybe("seeds")) {
    seeds->require_keys({"master"});
    if (auto m = seeds->maybe("master")) cfg.master_seed = m->u64();
  }
  if (auto budgets = root.maybe("budgets")) {
    budgets->require_keys({"point_budget", "atom_budget", "solver_budget", "net_budget"});
    if (auto v = budgets->maybe("point_budget")) cfg.budgets.point_budget = v->count(1);
    if (auto v = budgets->maybe("atom_budget")) cfg.budgets.atom_budget = v->count(1);
    if (auto v = budgets->maybe("solver_budget")) cfg.budgets.solver_budget = v->count(1);
    if (auto v = budgets->maybe("net_budget")) cfg.budgets.net_budget = v->count(1);
  }
  if (auto output = root.maybe("output")) {
    output->require_keys({"dir"});
    if (auto v = output->maybe("dir")) cfg.output_dir = v->str();
  }
  if (auto c = root.maybe("attractor")) parse_attractor_into(*c, cfg.attractor);
  if (auto c = root.maybe("measure")) parse_measure_into(*c, cfg.measure);
  if (auto c = root.maybe("ergodic")) {
    c->require_keys({"observables", "starts", "orbit_length", "trials", "measure"});
    if (auto v = c->maybe("observables")) {
      cfg.ergodic.observables.clear();
      for (std::size_t i = 0; i < v->array_size(); ++i) {
        cfg.ergodic.observables.push_back(v->at(i).str());
      }
      if (cfg.ergodic.observables.empty()) v->fail("need at least one observable");
    }
    if (auto v = c->maybe("starts")) cfg.ergodic.starts = parse_points(*v, 0);
    if (auto v = c->maybe("orbit_length")) cfg.ergodic.orbit_length = v->count(1);
    if (auto v = c->maybe("trials")) cfg.ergodic.trials = v->count(1);
    if (auto v = c->maybe("measure")) parse_measure_into(*v, cfg.ergodic.measure);
  }
  if (auto c = root.maybe("chaos")) {
    c->require_keys({"burn_in", "tail", "eps", "trials", "fairness_delta", "reference"});
    if (auto v = c->maybe("burn_in")) cfg.chaos.burn_in = v->count();
    if (auto v = c->maybe("tail")) cfg.chaos.tail = v->count(1);
    if (auto v = c->maybe("eps")) cfg.chaos.eps = v->positive();
    if (auto v = c->maybe("trials")) cfg.chaos.trials = v->count(1);
    if (auto v = c->maybe("fairness_delta")) cfg.chaos.fairness_delta = v->positive();
    if (auto v = c->maybe("reference")) parse_attractor_into(*v, cfg.chaos.reference);
  }
  if (auto c = root.maybe("diagnose")) {
    c->require_keys(
        {"n_max", "words", "eta", "pairs", "eps_list", "verdict_eps", "equivalence_eps"});
    if (auto v = c->maybe("n_max")) cfg.diagnose.n_max = v->count(1);
    if (auto v = c->maybe("words")) cfg.diagnose.words = v->count(1);
    if (auto v = c->maybe("eta")) cfg.diagnose.eta = v->positive();
    if (auto v = c->maybe("pairs")) cfg.diagnose.pairs = v->count(1);
    if (auto v = c->maybe("eps_list")) {
      cfg.diagnose.eps_list = v->numbers();
      if (cfg.diagnose.eps_list.empty()) v->fail("need at least one epsilon");
      for (double e : cfg.diagnose.eps_list) {
        if (!(e > 0.0)) v->fail("epsilons must be > 0");
      }
    }
    if (auto v = c->maybe("verdict_eps")) cfg.diagnose.verdict_eps = v->positive();
    if (auto v = c->maybe("equivalence_eps")) cfg.diagnose.equivalence_eps = v->positive();
  }
  if (auto c = root.maybe("render")) {
    c->require_keys({"source", "width", "height"});
    if (auto v = c->maybe("source")) {
      cfg.render.source = v->str();
      if (cfg.render.source != "attractor" && cfg.render.source != "measure") {
        v->fail("source is 'attractor' or 'measure'");
      }
    }
    if (auto v = c->maybe("width")) cfg.render.width = static_cast<int>(v->count(1));
    if (auto v = c->maybe("height")) cfg.render.height = static_cast<int>(v->count(1));
  }
}

}  // namespace

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string text = std::move(ss).str();

  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }

  ExperimentConfig cfg;
  cfg.source_path = path.string();
  cfg.config_hash = fnv1a64(text.data(), text.size());

  const Cursor root{&doc, "$"};
  root.require_keys({"ifs", "domain", "params", "seeds", "budgets", "output", "attractor",
                     "measure", "ergodic", "chaos", "diagnose", "render"});
  parse_ifs(root, cfg);
  parse_params(root, cfg);
  parse_sections(root, cfg);
  return cfg;
}

IfsFamily build_family(const ExperimentConfig& cfg) {
  const FamilySpec& fs = cfg.family;
  FamilyOptions opts;
  opts.net_budget = cfg.budgets.net_budget;

  if (fs.kind == "builtin") {
    if (fs.name == "cantor") return make_cantor();
    if (fs.name == "sierpinski") return make_sierpinski();
    if (fs.name == "halving") return make_halving();
    if (fs.name == "edalat") return make_edalat();
    if (fs.name == "blend") return make_blend(fs.net_spacing);
    if (fs.name == "identity") return make_identity(fs.dim);
    throw ConfigError("$.ifs.name: unknown builtin '" + fs.name + "'");
  }
  if (fs.kind == "analytic") {
    const AnalyticFamily which =
        fs.name == "halving" ? AnalyticFamily::halving : AnalyticFamily::edalat;
    return IfsFamily::analytic_1d(which, *fs.domain, opts);
  }
  if (fs.kind == "affine_list") {
    return IfsFamily::affine_list(fs.maps, *fs.domain, opts);
  }
  const ParameterSpace lambda = ParameterSpace::box(*fs.param_box, fs.net_spacing);
  return IfsFamily::poly_affine_box(fs.poly, lambda, *fs.domain, opts);
}

ParamMeasure build_law(const ExperimentConfig& cfg, const IfsFamily& f) {
  const ParameterSpace& sp = f.parameter_space();
  if (sp.is_finite()) {
    if (cfg.probs.empty()) return ParamMeasure::uniform(sp);
    if (cfg.probs.size() != static_cast<std::size_t>(sp.label_count())) {
      throw ConfigError("$.params.probs: family has " + std::to_string(sp.label_count()) +
                        " maps, got " + std::to_string(cfg.probs.size()) + " probabilities");
    }
    return ParamMeasure::finite(sp, cfg.probs);
  }
  if (!cfg.probs.empty()) {
    throw ConfigError("$.params.probs: explicit probabilities need a finite parameter space");
  }
  return ParamMeasure::uniform(sp);
}

}  // namespace ifslab
