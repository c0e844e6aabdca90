#pragma once

// Numerical contraction diagnostics: how fast do images of the whole phase
// box shrink along words, and how fast do pairs of orbits with the same
// address collapse? The two views agree for honest families; the comparison
// is surfaced rather than hidden.

#include <cstdint>
#include <optional>
#include <vector>

#include "ifslab/ifs.hpp"
#include "ifslab/metric.hpp"

namespace ifslab {

/// Per-depth supremum (over sampled words) of the diameter of the image of a
/// phase net under address-order composition.
struct DiameterProfile {
  std::vector<std::size_t> n_values;  // 1..n_max
  std::vector<double> sup_diam;       // nonincreasing within 1e-12 slack
  std::size_t words_sampled = 0;      // randoms + one constant word per net value
  double net_eps = 0.0;               // phase net spacing (reporting)
  double disc_error_estimate = 0.0;   // 2 x empirical modulus at net spacing
  Word witness_word;                  // word achieving sup_diam at n_max
};

/// Samples `words` random words (letters uniform on lam_net) plus every
/// constant word, and tabulates sup diameters for all prefix depths 1..n_max.
DiameterProfile diameter_profile(const IfsFamily& f, const PointCloud& x_net,
                                 const std::vector<ParamValue>& lam_net, std::size_t n_max,
                                 std::size_t words, std::uint64_t seed, double net_eps = 0.0);

struct HyperbolicityVerdict {
  enum class Kind { weakly_hyperbolic_evidence, inconclusive, counterexample };
  Kind kind = Kind::inconclusive;
  double achieved = 0.0;  // sup_diam at n_max
  Word witness;           // populated for counterexamples
};

/// evidence: sup_diam(n_max) < eps. counterexample: essentially no decay
/// (sup_diam(n_max) >= half of sup_diam(1)), witness word attached.
HyperbolicityVerdict verdict_from_profile(const DiameterProfile& profile, double eps = 1e-4);

/// Empirical n_0(eps): for sampled start pairs closer than eta and sampled
/// words, the least depth from which all pairwise image distances stay below
/// eps through n_max.
struct WeakStarProbe {
  double eta = 0.0;
  std::vector<double> eps_list;
  std::vector<std::optional<std::size_t>> n0;  // per eps; empty = not reached
  std::vector<double> max_dist;                // per depth 1..n_max, max over samples
  std::size_t pairs = 0;
  std::size_t words = 0;
};

WeakStarProbe weak_star_probe(const IfsFamily& f, double eta, std::vector<double> eps_list,
                              std::size_t n_max, std::size_t pairs, std::size_t words,
                              std::uint64_t seed);

struct EquivalenceReport {
  double eps = 0.0;
  bool profile_reaches = false;
  bool probe_reaches = false;
  bool agree = false;
};

/// Do the two diagnostics agree at threshold eps? eps must be one of the
/// probe's eps_list entries.
EquivalenceReport equivalence_check(const DiameterProfile& profile, const WeakStarProbe& probe,
                                    double eps);

}  // namespace ifslab
