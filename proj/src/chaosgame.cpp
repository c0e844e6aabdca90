#include "ifslab/chaosgame.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "ifslab/errors.hpp"
#include "ifslab/parallel.hpp"
#include "ifslab/rng.hpp"

namespace ifslab {

namespace {

// Probability a uniform box law gives the delta-ball around `center`: bound it
// below by the largest axis-aligned cube inside the ball, clipped to the box.
// In dimension 1 the "cube" is the ball itself, so the value is exact.
double clipped_cube_prob(const BoxDomain& box, const Point& center, double delta) {
  const int k = box.dim();
  const double half = delta / std::sqrt(static_cast<double>(k));
  double num = 1.0;
  double den = 1.0;
  for (int i = 0; i < k; ++i) {
    const double side = box.hi.c[i] - box.lo.c[i];
    const double len = std::min(center.c[i] + half, box.hi.c[i]) -
                       std::max(center.c[i] - half, box.lo.c[i]);
    num *= std::max(0.0, len);
    den *= side;
  }
  if (den == 0.0) throw InvalidArgument("fairness_certificate: degenerate parameter box");
  return num / den;
}

}  // namespace

FairnessCertificate fairness_certificate(const ParamMeasure& law, double delta,
                                         std::size_t samples, std::uint64_t seed) {
  if (!(delta > 0.0)) throw InvalidArgument("fairness_certificate: delta must be > 0");
  FairnessCertificate cert;
  cert.delta = delta;

  if (law.is_finite()) {
    // any ball around a label contains the label itself
    const auto& probs = law.probs();
    std::size_t worst = 0;
    for (std::size_t i = 1; i < probs.size(); ++i) {
      if (probs[i] < probs[worst]) worst = i;
    }
    if (probs[worst] == 0.0) {
      throw NotFair("parameter law gives label " + std::to_string(worst + 1) +
                        " probability zero",
                    static_cast<int>(worst + 1));
    }
    cert.analytic_lower = probs[worst];
    cert.empirical_min = probs[worst];
    cert.worst_label = static_cast<int>(worst + 1);
    return cert;
  }

  const BoxDomain& box = law.space().as_box().box;
  const int k = box.dim();
  const double half = delta / std::sqrt(static_cast<double>(k));
  double num = 1.0;
  double den = 1.0;
  for (int i = 0; i < k; ++i) {
    const double side = box.hi.c[i] - box.lo.c[i];
    num *= std::min(half, side);
    den *= side;
  }
  if (den == 0.0) throw InvalidArgument("fairness_certificate: degenerate parameter box");
  cert.analytic_lower = num / den;

  // empirical scan: random interior centers plus every corner
  std::mt19937_64 gen(seed);
  double worst = clipped_cube_prob(box, box.center(), delta);
  for (std::size_t s = 0; s < samples; ++s) {
    Point c;
    c.dim = k;
    for (int i = 0; i < k; ++i) c.c[i] = uniform_in(gen, box.lo.c[i], box.hi.c[i]);
    worst = std::min(worst, clipped_cube_prob(box, c, delta));
  }
  for (unsigned mask = 0; mask < (1u << k); ++mask) {
    Point c;
    c.dim = k;
    for (int i = 0; i < k; ++i) c.c[i] = (mask >> i) & 1u ? box.hi.c[i] : box.lo.c[i];
    worst = std::min(worst, clipped_cube_prob(box, c, delta));
  }
  cert.empirical_min = worst;
  return cert;
}

DrawResult chaos_game_trial(const IfsFamily& f, const ParamMeasure& law, const Point& start,
                            std::size_t burn_in, std::size_t tail, const PointCloud& reference,
                            double eps, std::uint64_t seed) {
  if (tail == 0) throw InvalidArgument("chaos_game_trial: tail must be >= 1");
  const WordStream stream(seed, law);
  const std::vector<Point> pts = orbit(f, stream, start, burn_in + tail);
  std::vector<Point> kept(pts.begin() + static_cast<std::ptrdiff_t>(burn_in), pts.end());
  kept = canonicalize_points(std::move(kept), kDefaultMergeRadius);

  DrawResult res;
  res.seed = seed;
  res.tail_points = kept.size();
  res.hausdorff = hausdorff_distance(PointCloud(std::move(kept)), reference);
  res.pass = res.hausdorff <= eps;
  return res;
}

DrawReport chaos_game_suite(const IfsFamily& f, const ParamMeasure& law, const Point& start,
                            std::size_t burn_in, std::size_t tail, const PointCloud& reference,
                            double eps, std::size_t trials, std::uint64_t master_seed) {
  if (trials == 0) throw InvalidArgument("chaos_game_suite: trials must be >= 1");
  DrawReport report;
  report.burn_in = burn_in;
  report.tail = tail;
  report.eps = eps;
  report.trials.resize(trials);
  parallel_for(trials, [&](std::size_t t) {
    report.trials[t] =
        chaos_game_trial(f, law, start, burn_in, tail, reference, eps, derive_seed(master_seed, t));
  });
  std::size_t passed = 0;
  for (const DrawResult& r : report.trials) {
    if (r.pass) ++passed;
    report.worst_hausdorff = std::max(report.worst_hausdorff, r.hausdorff);
  }
  report.pass_fraction = static_cast<double>(passed) / static_cast<double>(trials);
  return report;
}

std::size_t suggested_tail_size(std::size_t alphabet, double ratio, double eps) {
  if (alphabet == 0 || !(ratio > 0.0) || ratio >= 1.0 || !(eps > 0.0) || eps >= 1.0) {
    throw InvalidArgument("suggested_tail_size: need alphabet >= 1, 0 < ratio < 1, 0 < eps < 1");
  }
  const double depth = std::ceil(std::log(1.0 / eps) / std::log(1.0 / ratio));
  const double words = std::pow(static_cast<double>(alphabet), depth);
  const double n = 10.0 * words;
  if (n > 1e18) throw BudgetExceeded("suggested_tail_size: overflow", std::size_t{1} << 60,
                                     std::size_t{1} << 61);
  return static_cast<std::size_t>(n);
}

}  // namespace ifslab
