#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ifslab/ifs.hpp"
#include "ifslab/measure.hpp"
#include "ifslab/metric.hpp"

namespace ifslab {

/// A named real-valued function on phase points.
struct Observable {
  std::string name;
  std::function<double(const Point&)> fn;
};

/// Parse an observable spec:
///   "coord:i"        i-th coordinate, 0-based
///   "sq:i"           square of the i-th coordinate
///   "dist:a,b,..."   Euclidean distance to the fixed point (a,b,...)
///   "const:c"        the constant c
/// Throws UnknownObservable on anything else; the name is kept verbatim.
Observable parse_observable(const std::string& spec, int dim);

/// Integral of the observable against a discrete measure.
double integrate(const Observable& obs, const DiscreteMeasure& nu);

/// Average of obs over the first n orbit points x_0..x_{n-1}, where x_0 = x
/// and x_{j+1} applies the stream's (j+1)-th letter. n >= 1.
double birkhoff_average(const IfsFamily& f, const WordStream& stream, const Point& x,
                        std::size_t n, const Observable& obs);

struct BirkhoffSample {
  std::size_t start_index = 0;
  std::size_t trial = 0;
  double average = 0.0;
};

struct ErgodicRow {
  std::string observable;
  double space_mean = 0.0;   // integral against the reference measure
  double time_mean = 0.0;    // grand mean of the Birkhoff averages
  double max_abs_dev = 0.0;  // worst |sample - space_mean|
  std::vector<BirkhoffSample> samples;
};

struct ErgodicReport {
  std::vector<ErgodicRow> rows;
  std::size_t orbit_length = 0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
};

struct ErgodicOptions {
  std::size_t orbit_length = 4096;
  std::size_t trials = 8;
  std::uint64_t seed = 0;
};

/// Compare time averages against integrals of the same observables w.r.t. nu.
/// Every (observable, start, trial) cell draws its own letter stream from a
/// seed derived from opts.seed and the cell index, so results do not depend on
/// evaluation order or thread count.
ErgodicReport ergodicity_test(const IfsFamily& f, const ParamMeasure& law,
                              const DiscreteMeasure& nu,
                              const std::vector<Observable>& observables,
                              const PointCloud& starts, const ErgodicOptions& opts = {});

}  // namespace ifslab
