#pragma once

// Fixed-point set computation: iterate the union-of-images operator on a seed
// cloud until consecutive iterates agree in the Hausdorff metric, plus the
// word-indexed fixed points that populate the limit set.

#include <cstdint>
#include <vector>

#include "ifslab/ifs.hpp"
#include "ifslab/metric.hpp"

namespace ifslab {

struct AttractorTraceEntry {
  std::size_t iteration = 0;  // 1-based step index
  double gap = 0.0;           // Hausdorff distance between consecutive iterates
  std::size_t points = 0;     // cloud size after the step
};

struct AttractorResult {
  PointCloud cloud;
  std::vector<AttractorTraceEntry> trace;
  std::size_t iterations = 0;
  double merge_radius = 0.0;
  double lam_net_eps = 0.0;
};

struct AttractorOptions {
  double merge_radius = -1.0;  // < 0: use tol/4
  std::size_t point_budget = 4'000'000;
};

/// One application of the union-of-images operator, canonicalized.
PointCloud hutchinson_step(const IfsFamily& f, const PointCloud& cloud,
                           const std::vector<ParamValue>& lam_net, double merge_radius,
                           std::size_t point_budget = 4'000'000);

/// Iterates hutchinson_step from seed until the consecutive-iterate Hausdorff
/// gap drops below tol; throws NoConvergence (with the trace preserved in the
/// message) after n_max steps.
AttractorResult compute_attractor(const IfsFamily& f, const PointCloud& seed,
                                  const std::vector<ParamValue>& lam_net, double tol,
                                  std::size_t n_max, const AttractorOptions& opts = {});

/// Unique fixed point of the address-order composition of a finite word,
/// found by iterating from the box center until successive iterates are
/// within tol.
Point partial_fixed_point(const IfsFamily& f, const Word& w, double tol,
                          std::size_t n_max = 100'000);

struct DensityResult {
  double hausdorff_gap = 0.0;
  bool sampled = false;       // true when the word set was subsampled
  std::size_t words_used = 0;
};

struct DensityOptions {
  std::size_t word_budget = 1'000'000;
  std::size_t sample_count = 4096;  // used when enumeration exceeds the budget
  std::uint64_t seed = 0;
  double fp_tol = 1e-12;
  std::size_t fp_n_max = 100'000;
};

/// Hausdorff distance between an attractor cloud and the set of fixed points
/// of all (or a sampled subset of) length-max_len words over lam_net.
DensityResult fixed_point_density(const IfsFamily& f, const PointCloud& attractor,
                                  std::size_t max_len, const std::vector<ParamValue>& lam_net,
                                  const DensityOptions& opts = {});

}  // namespace ifslab
