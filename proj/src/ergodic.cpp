#include "ifslab/ergodic.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "ifslab/errors.hpp"
#include "ifslab/parallel.hpp"
#include "ifslab/rng.hpp"

namespace ifslab {

namespace {

std::vector<double> parse_numbers(const std::string& body, const std::string& spec) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= body.size()) {
    const std::size_t comma = std::min(body.find(',', pos), body.size());
    const std::string tok = body.substr(pos, comma - pos);
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (tok.empty() || end != tok.c_str() + tok.size()) {
      throw UnknownObservable("bad number '" + tok + "' in observable '" + spec + "'");
    }
    out.push_back(v);
    pos = comma + 1;
  }
  return out;
}

int parse_axis(const std::string& body, const std::string& spec, int dim) {
  const std::vector<double> v = parse_numbers(body, spec);
  if (v.size() != 1 || v[0] != std::floor(v[0]) || v[0] < 0 || v[0] >= dim) {
    throw UnknownObservable("observable '" + spec + "' needs one axis in [0," +
                            std::to_string(dim) + ")");
  }
  return static_cast<int>(v[0]);
}

}  // namespace

Observable parse_observable(const std::string& spec, int dim) {
  const std::size_t colon = spec.find(':');
  if (colon == std::string::npos) {
    throw UnknownObservable("observable '" + spec + "' has no kind:args form");
  }
  const std::string kind = spec.substr(0, colon);
  const std::string body = spec.substr(colon + 1);
  if (kind == "coord") {
    const int i = parse_axis(body, spec, dim);
    return {spec, [i](const Point& x) { return x.c[i]; }};
  }
  if (kind == "sq") {
    const int i = parse_axis(body, spec, dim);
    return {spec, [i](const Point& x) { return x.c[i] * x.c[i]; }};
  }
  if (kind == "dist") {
    const std::vector<double> v = parse_numbers(body, spec);
    if (static_cast<int>(v.size()) != dim) {
      throw UnknownObservable("observable '" + spec + "' needs " + std::to_string(dim) +
                              " coordinates");
    }
    const Point anchor = make_point(v);
    return {spec, [anchor](const Point& x) { return dist(x, anchor); }};
  }
  if (kind == "const") {
    const std::vector<double> v = parse_numbers(body, spec);
    if (v.size() != 1) throw UnknownObservable("observable '" + spec + "' needs one constant");
    const double c = v[0];
    return {spec, [c](const Point&) { return c; }};
  }
  throw UnknownObservable("unknown observable kind '" + kind + "' in '" + spec + "'");
}

double integrate(const Observable& obs, const DiscreteMeasure& nu) {
  double acc = 0.0;
  for (const Atom& a : nu.atoms()) acc += a.w * obs.fn(a.x);
  return acc;
}

double birkhoff_average(const IfsFamily& f, const WordStream& stream, const Point& x,
                        std::size_t n, const Observable& obs) {
  if (n == 0) throw InvalidArgument("birkhoff_average: need at least one term");
  const std::vector<Point> pts = orbit(f, stream, x, n - 1);
  double acc = 0.0;
  for (const Point& p : pts) acc += obs.fn(p);
  return acc / static_cast<double>(n);
}

ErgodicReport ergodicity_test(const IfsFamily& f, const ParamMeasure& law,
                              const DiscreteMeasure& nu,
                              const std::vector<Observable>& observables,
                              const PointCloud& starts, const ErgodicOptions& opts) {
  if (observables.empty()) throw InvalidArgument("ergodicity_test: no observables");
  if (opts.trials == 0) throw InvalidArgument("ergodicity_test: trials must be >= 1");
  if (starts.dim() != f.dim() || nu.dim() != f.dim()) {
    throw DimensionMismatch("ergodicity_test: starts/measure/family dimensions disagree");
  }

  const std::size_t S = starts.size();
  const std::size_t T = opts.trials;
  const std::size_t cells = observables.size() * S * T;
  std::vector<double> averages(cells);
  parallel_for(cells, [&](std::size_t idx) {
    const std::size_t o = idx / (S * T);
    const std::size_t s = (idx / T) % S;
    const WordStream stream(derive_seed(opts.seed, idx), law);
    averages[idx] = birkhoff_average(f, stream, starts[s], opts.orbit_length, observables[o]);
  });

  ErgodicReport report;
  report.orbit_length = opts.orbit_length;
  report.trials = T;
  report.seed = opts.seed;
  for (std::size_t o = 0; o < observables.size(); ++o) {
    ErgodicRow row;
    row.observable = observables[o].name;
    row.space_mean = integrate(observables[o], nu);
    double acc = 0.0;
    for (std::size_t s = 0; s < S; ++s) {
      for (std::size_t t = 0; t < T; ++t) {
        const double avg = averages[(o * S + s) * T + t];
        row.samples.push_back({s, t, avg});
        acc += avg;
        row.max_abs_dev = std::max(row.max_abs_dev, std::abs(avg - row.space_mean));
      }
    }
    row.time_mean = acc / static_cast<double>(S * T);
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace ifslab
