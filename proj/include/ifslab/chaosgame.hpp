#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ifslab/ifs.hpp"
#include "ifslab/metric.hpp"

namespace ifslab {

/// Lower bounds on the probability the parameter law gives any delta-ball in
/// parameter space. A law is fair at scale delta when this is positive; zero
/// would let the driving sequence starve whole regions of the attractor.
struct FairnessCertificate {
  double delta = 0.0;
  double analytic_lower = 0.0;  // holds for every center in the space
  double empirical_min = 0.0;   // min over sampled centers and corners; exact in dim 1
  int worst_label = 0;          // finite laws: 1-based argmin label, else 0
};

/// Throws NotFair (naming the 1-based label) when a finite law has a
/// zero-probability letter. Box laws are sampled uniformly with `samples`
/// interior centers plus every corner.
FairnessCertificate fairness_certificate(const ParamMeasure& law, double delta,
                                         std::size_t samples = 256, std::uint64_t seed = 0);

struct DrawResult {
  std::uint64_t seed = 0;
  double hausdorff = 0.0;   // tail cloud vs reference
  std::size_t tail_points = 0;  // after canonicalization
  bool pass = false;
};

/// One chaos-game run: drive an orbit of burn_in + tail steps, keep the last
/// tail+1 points, canonicalize, and compare to the reference cloud.
DrawResult chaos_game_trial(const IfsFamily& f, const ParamMeasure& law, const Point& start,
                            std::size_t burn_in, std::size_t tail, const PointCloud& reference,
                            double eps, std::uint64_t seed);

struct DrawReport {
  std::vector<DrawResult> trials;
  double pass_fraction = 0.0;
  double worst_hausdorff = 0.0;
  std::size_t burn_in = 0;
  std::size_t tail = 0;
  double eps = 0.0;
};

/// Repeated trials with per-trial seeds derived from master_seed.
DrawReport chaos_game_suite(const IfsFamily& f, const ParamMeasure& law, const Point& start,
                            std::size_t burn_in, std::size_t tail, const PointCloud& reference,
                            double eps, std::size_t trials, std::uint64_t master_seed);

/// Rule-of-thumb tail length for an alphabet of m maps with contraction ratio
/// r: ten visits per word of the depth needed to resolve eps.
std::size_t suggested_tail_size(std::size_t alphabet, double ratio, double eps);

}  // namespace ifslab
