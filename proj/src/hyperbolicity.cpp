#include "ifslab/hyperbolicity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ifslab/errors.hpp"
#include "ifslab/parallel.hpp"
#include "ifslab/rng.hpp"

namespace ifslab {

namespace {

Word random_word(const std::vector<ParamValue>& lam_net, std::size_t len, std::mt19937_64& gen) {
  Word w;
  w.reserve(len);
  for (std::size_t i = 0; i < len; ++i) w.push_back(lam_net[uniform_index(gen, lam_net.size())]);
  return w;
}

// Image of a cloud under the address-order composition of w's first n letters.
std::vector<Point> prefix_image(const IfsFamily& f, const Word& w, std::size_t n,
                                const std::vector<Point>& pts) {
  std::vector<Point> img = pts;
  for (std::size_t i = n; i-- > 0;) {
    for (Point& p : img) p = f.apply(w[i], p);
  }
  return img;
}

double cloud_diameter(const std::vector<Point>& pts) {
  double worst = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      worst = std::max(worst, dist2(pts[i], pts[j]));
    }
  }
  return std::sqrt(worst);
}

}  // namespace

DiameterProfile diameter_profile(const IfsFamily& f, const PointCloud& x_net,
                                 const std::vector<ParamValue>& lam_net, std::size_t n_max,
                                 std::size_t words, std::uint64_t seed, double net_eps) {
  if (n_max == 0) throw InvalidArgument("diameter_profile: n_max must be >= 1");
  if (lam_net.empty()) throw InvalidArgument("diameter_profile: empty parameter net");

  std::vector<Word> sample;
  sample.reserve(words + lam_net.size());
  std::mt19937_64 gen(seed);
  for (std::size_t k = 0; k < words; ++k) sample.push_back(random_word(lam_net, n_max, gen));
  for (const ParamValue& lam : lam_net) sample.push_back(Word(n_max, lam));

  // per word, per depth diameters; reduced across words afterwards
  std::vector<std::vector<double>> diams(sample.size());
  std::vector<double> moduli(sample.size(), 0.0);
  parallel_for(sample.size(), [&](std::size_t wi) {
    const Word& w = sample[wi];
    std::vector<double> row(n_max);
    for (std::size_t n = 1; n <= n_max; ++n) {
      row[n - 1] = cloud_diameter(prefix_image(f, w, n, x_net.points()));
    }
    diams[wi] = std::move(row);
    // empirical modulus: response of the full-depth image to adjacent net points
    const std::vector<Point> deep = prefix_image(f, w, n_max, x_net.points());
    double m = 0.0;
    for (std::size_t i = 0; i + 1 < deep.size(); ++i) {
      m = std::max(m, dist(deep[i], deep[i + 1]));
    }
    moduli[wi] = m;
  });

  DiameterProfile out;
  out.n_values.resize(n_max);
  out.sup_diam.assign(n_max, 0.0);
  out.words_sampled = sample.size();
  out.net_eps = net_eps;
  std::size_t witness = 0;
  for (std::size_t wi = 0; wi < sample.size(); ++wi) {
    for (std::size_t n = 0; n < n_max; ++n) {
      if (diams[wi][n] > out.sup_diam[n]) {
        out.sup_diam[n] = diams[wi][n];
        if (n + 1 == n_max) witness = wi;
      }
    }
  }
  for (std::size_t n = 0; n < n_max; ++n) out.n_values[n] = n + 1;
  out.witness_word = sample[witness];
  double disc = 0.0;
  for (double m : moduli) disc = std::max(disc, m);
  out.disc_error_estimate = 2.0 * disc;

  for (std::size_t n = 1; n < n_max; ++n) {
    if (out.sup_diam[n] > out.sup_diam[n - 1] + 1e-12) {
      throw Error("diameter_profile: sup diameters increased at depth " + std::to_string(n + 1) +
                  " (" + std::to_string(out.sup_diam[n - 1]) + " -> " +
                  std::to_string(out.sup_diam[n]) + ")");
    }
  }
  return out;
}

HyperbolicityVerdict verdict_from_profile(const DiameterProfile& profile, double eps) {
  if (!(eps > 0.0)) throw InvalidArgument("verdict_from_profile: eps must be > 0");
  HyperbolicityVerdict v;
  v.achieved = profile.sup_diam.back();
  if (v.achieved < eps) {
    v.kind = HyperbolicityVerdict::Kind::weakly_hyperbolic_evidence;
  } else if (v.achieved >= 0.5 * profile.sup_diam.front()) {
    v.kind = HyperbolicityVerdict::Kind::counterexample;
    v.witness = profile.witness_word;
  } else {
    v.kind = HyperbolicityVerdict::Kind::inconclusive;
  }
  return v;
}

WeakStarProbe weak_star_probe(const IfsFamily& f, double eta, std::vector<double> eps_list,
                              std::size_t n_max, std::size_t pairs, std::size_t words,
                              std::uint64_t seed) {
  if (!(eta > 0.0)) throw InvalidArgument("weak_star_probe: eta must be > 0");
  if (eps_list.empty()) throw InvalidArgument("weak_star_probe: empty eps list");
  for (double e : eps_list) {
    if (!(e > 0.0)) throw InvalidArgument("weak_star_probe: eps values must be > 0");
  }
  if (n_max == 0 || pairs == 0) throw InvalidArgument("weak_star_probe: need n_max, pairs >= 1");

  const BoxDomain& box = f.domain();
  const int d = box.dim();
  std::mt19937_64 gen(seed);

  std::vector<std::pair<Point, Point>> starts;
  starts.reserve(pairs);
  while (starts.size() < pairs) {
    Point x;
    x.dim = d;
    for (int i = 0; i < d; ++i) x.c[i] = uniform_in(gen, box.lo.c[i], box.hi.c[i]);
    Point y;
    y.dim = d;
    for (int i = 0; i < d; ++i) {
      y.c[i] = x.c[i] + (uniform01(gen) * 2.0 - 1.0) * eta;
    }
    if (!box.contains(y, 0.0) || !(dist(x, y) < eta)) continue;
    starts.emplace_back(x, y);
  }

  const std::vector<ParamValue> lam_net = f.parameter_net();
  std::vector<Word> sample;
  sample.reserve(words + lam_net.size());
  for (std::size_t k = 0; k < words; ++k) sample.push_back(random_word(lam_net, n_max, gen));
  for (const ParamValue& lam : lam_net) sample.push_back(Word(n_max, lam));

  // max over (pair, word) of pairwise distance at each depth
  std::vector<std::vector<double>> rows(sample.size());
  parallel_for(sample.size(), [&](std::size_t wi) {
    const Word& w = sample[wi];
    std::vector<double> row(n_max, 0.0);
    for (const auto& [x, y] : starts) {
      for (std::size_t n = 1; n <= n_max; ++n) {
        Point a = x, b = y;
        for (std::size_t i = n; i-- > 0;) {
          a = f.apply(w[i], a);
          b = f.apply(w[i], b);
        }
        row[n - 1] = std::max(row[n - 1], dist(a, b));
      }
    }
    rows[wi] = std::move(row);
  });

  WeakStarProbe out;
  out.eta = eta;
  out.eps_list = std::move(eps_list);
  out.pairs = pairs;
  out.words = sample.size();
  out.max_dist.assign(n_max, 0.0);
  for (const std::vector<double>& row : rows) {
    for (std::size_t n = 0; n < n_max; ++n) out.max_dist[n] = std::max(out.max_dist[n], row[n]);
  }
  // suffix maxima: a depth counts only if everything beyond it stays below eps
  std::vector<double> suffix(n_max);
  double acc = 0.0;
  for (std::size_t n = n_max; n-- > 0;) {
    acc = std::max(acc, out.max_dist[n]);
    suffix[n] = acc;
  }
  out.n0.resize(out.eps_list.size());
  for (std::size_t e = 0; e < out.eps_list.size(); ++e) {
    for (std::size_t n = 0; n < n_max; ++n) {
      if (suffix[n] < out.eps_list[e]) {
        out.n0[e] = n + 1;
        break;
      }
    }
  }
  return out;
}

EquivalenceReport equivalence_check(const DiameterProfile& profile, const WeakStarProbe& probe,
                                    double eps) {
  std::size_t idx = probe.eps_list.size();
  for (std::size_t e = 0; e < probe.eps_list.size(); ++e) {
    if (probe.eps_list[e] == eps) {
      idx = e;
      break;
    }
  }
  if (idx == probe.eps_list.size()) {
    throw InvalidArgument("equivalence_check: eps not present in the probe's eps list");
  }
  EquivalenceReport r;
  r.eps = eps;
  r.profile_reaches = profile.sup_diam.back() < eps;
  r.probe_reaches = probe.n0[idx].has_value();
  r.agree = r.profile_reaches == r.probe_reaches;
  return r;
}

}  // namespace ifslab
