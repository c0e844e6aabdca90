#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ifslab/ifs.hpp"
#include "ifslab/metric.hpp"

namespace ifslab {

/// Parsed "ifs" + "domain" + "params" sections; build_family turns it into a
/// live family. Kinds: builtin, affine_list, poly_affine_box, analytic.
struct FamilySpec {
  std::string kind;
  std::string name;  // builtin / analytic variant
  int dim = 1;       // identity builtin only
  double net_spacing = 1.0 / 64.0;
  std::vector<AffineMap> maps;
  PolyAffineMap poly;
  std::optional<BoxDomain> domain;
  std::optional<BoxDomain> param_box;
};

struct BudgetConfig {
  std::size_t point_budget = 4'000'000;
  std::size_t atom_budget = std::size_t{1} << 20;
  std::size_t solver_budget = 512;
  std::size_t net_budget = kDefaultNetBudget;
};

struct AttractorConfig {
  std::vector<Point> seeds;  // empty: domain center
  double tol = 1e-3;
  std::size_t n_max = 200;
  double merge_radius = -1.0;  // negative: tol/4
  std::optional<std::size_t> density_max_len;
};

struct MeasureConfig {
  double tol = 1e-3;
  std::size_t n_max = 200;
  double grid_h = -1.0;  // negative: tol/8
  bool support_check = false;
  std::size_t independence_seeds = 0;  // >= 2 enables the cross-seed gap check
};

struct ErgodicConfig {
  std::vector<std::string> observables{"coord:0"};
  std::vector<Point> starts;  // empty: domain center
  std::size_t orbit_length = 4096;
  std::size_t trials = 8;
  MeasureConfig measure;  // how to get the reference measure
};

struct ChaosConfig {
  std::size_t burn_in = 128;
  std::size_t tail = 50'000;
  double eps = 0.02;
  std::size_t trials = 20;
  double fairness_delta = 0.05;
  AttractorConfig reference;  // how to get the comparison cloud
};

struct DiagnoseConfig {
  std::size_t n_max = 40;
  std::size_t words = 32;
  double eta = 0.25;
  std::size_t pairs = 16;
  std::vector<double> eps_list{1e-1, 1e-2};
  double verdict_eps = 1e-4;
  std::optional<double> equivalence_eps;  // must be a member of eps_list
};

struct RenderConfig {
  std::string source = "attractor";  // or "measure"
  int width = 512;
  int height = 512;
};

struct ExperimentConfig {
  FamilySpec family;
  std::vector<double> probs;  // finite law; empty = uniform
  std::uint64_t master_seed = 1;
  BudgetConfig budgets;
  AttractorConfig attractor;
  MeasureConfig measure;
  ErgodicConfig ergodic;
  ChaosConfig chaos;
  DiagnoseConfig diagnose;
  RenderConfig render;
  std::string output_dir;  // "" when the config does not pin one
  std::string source_path;
  std::uint64_t config_hash = 0;  // fnv1a64 of the raw config bytes
};

/// Parse and validate a JSON config. Unknown keys, wrong types, and
/// out-of-range values all throw ConfigError naming the JSON path.
ExperimentConfig load_config(const std::filesystem::path& path);

IfsFamily build_family(const ExperimentConfig& cfg);
ParamMeasure build_law(const ExperimentConfig& cfg, const IfsFamily& f);

}  // namespace ifslab
