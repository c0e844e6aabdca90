#include "ifslab/attractor.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "ifslab/errors.hpp"
#include "ifslab/parallel.hpp"
#include "ifslab/rng.hpp"

namespace ifslab {

PointCloud hutchinson_step(const IfsFamily& f, const PointCloud& cloud,
                           const std::vector<ParamValue>& lam_net, double merge_radius,
                           std::size_t point_budget) {
  if (lam_net.empty()) throw InvalidArgument("hutchinson_step: empty parameter net");
  const std::size_t raw = lam_net.size() * cloud.size();
  if (raw > point_budget) {
    throw BudgetExceeded("hutchinson_step: " + std::to_string(raw) +
                             " image points exceed budget " + std::to_string(point_budget) +
                             "; increase the merge radius or shrink the net",
                         point_budget, raw);
  }
  std::vector<Point> images(raw);
  parallel_for(raw, [&](std::size_t idx) {
    const std::size_t li = idx / cloud.size();
    const std::size_t pi = idx % cloud.size();
    images[idx] = f.apply(lam_net[li], cloud[pi]);
  });
  return PointCloud(canonicalize_points(std::move(images), merge_radius));
}

AttractorResult compute_attractor(const IfsFamily& f, const PointCloud& seed,
                                  const std::vector<ParamValue>& lam_net, double tol,
                                  std::size_t n_max, const AttractorOptions& opts) {
  if (!(tol > 0.0)) throw InvalidArgument("compute_attractor: tol must be > 0");
  const double merge = opts.merge_radius < 0.0 ? tol / 4.0 : opts.merge_radius;

  AttractorResult res{seed.canonicalized(merge), {}, 0, merge, 0.0};
  for (std::size_t n = 1; n <= n_max; ++n) {
    PointCloud next = hutchinson_step(f, res.cloud, lam_net, merge, opts.point_budget);
    const double gap = hausdorff_distance(res.cloud, next);
    res.trace.push_back({n, gap, next.size()});
    res.cloud = std::move(next);
    res.iterations = n;
    if (gap < tol) return res;
  }
  throw NoConvergence("compute_attractor: gap " + std::to_string(res.trace.back().gap) +
                          " after " + std::to_string(n_max) + " iterations (tol " +
                          std::to_string(tol) + ")",
                      res.trace.back().gap, n_max);
}

Point partial_fixed_point(const IfsFamily& f, const Word& w, double tol, std::size_t n_max) {
  if (!(tol > 0.0)) throw InvalidArgument("partial_fixed_point: tol must be > 0");
  if (w.empty()) throw InvalidArgument("partial_fixed_point: empty word");
  Point x = f.domain().center();
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t it = 0; it < n_max; ++it) {
    const Point next = compose_apply(f, w, x);
    gap = dist(x, next);
    x = next;
    if (gap < tol) return x;
  }
  throw NoConvergence("partial_fixed_point: gap " + std::to_string(gap) + " after " +
                          std::to_string(n_max) + " iterations",
                      gap, n_max);
}

namespace {

// Enumerate words over the net in lexicographic index order.
void enumerate_words(const std::vector<ParamValue>& net, std::size_t len,
                     const std::function<void(const Word&)>& visit) {
  Word w(len, net.front());
  std::vector<std::size_t> idx(len, 0);
  for (;;) {
    visit(w);
    std::size_t pos = len;
    while (pos-- > 0) {
      if (++idx[pos] < net.size()) {
        w[pos] = net[idx[pos]];
        break;
      }
      idx[pos] = 0;
      w[pos] = net.front();
      if (pos == 0) return;  // full odometer wrap: enumeration complete
    }
  }
}

}  // namespace

DensityResult fixed_point_density(const IfsFamily& f, const PointCloud& attractor,
                                  std::size_t max_len, const std::vector<ParamValue>& lam_net,
                                  const DensityOptions& opts) {
  if (max_len == 0) throw InvalidArgument("fixed_point_density: max_len must be >= 1");
  if (lam_net.empty()) throw InvalidArgument("fixed_point_density: empty parameter net");

  // m^max_len with overflow guard
  double count = 1.0;
  for (std::size_t i = 0; i < max_len; ++i) count *= static_cast<double>(lam_net.size());

  DensityResult res;
  std::vector<Word> words;
  if (count <= static_cast<double>(opts.word_budget)) {
    words.reserve(static_cast<std::size_t>(count));
    enumerate_words(lam_net, max_len, [&](const Word& w) { words.push_back(w); });
    res.sampled = false;
  } else {
    std::mt19937_64 gen(opts.seed);
    words.reserve(opts.sample_count);
    for (std::size_t k = 0; k < opts.sample_count; ++k) {
      Word w;
      w.reserve(max_len);
      for (std::size_t i = 0; i < max_len; ++i) {
        w.push_back(lam_net[uniform_index(gen, lam_net.size())]);
      }
      words.push_back(std::move(w));
    }
    res.sampled = true;
  }
  res.words_used = words.size();

  std::vector<Point> fixed(words.size());
  parallel_for(words.size(), [&](std::size_t i) {
    fixed[i] = partial_fixed_point(f, words[i], opts.fp_tol, opts.fp_n_max);
  });
  const PointCloud q_cloud(std::move(fixed));
  res.hausdorff_gap = hausdorff_distance(attractor, q_cloud);
  return res;
}

}  // namespace ifslab
