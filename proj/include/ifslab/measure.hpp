#pragma once

// Discrete probability measures, the averaged pushforward (transfer) operator,
// and the exact Kantorovich (earth mover) distance: a sorted-quantile sweep in
// one dimension, an exact min-cost transport solve otherwise.

#include <cstdint>
#include <vector>

#include "ifslab/ifs.hpp"
#include "ifslab/metric.hpp"

namespace ifslab {

struct Atom {
  Point x;
  double w = 0.0;
};

/// Finitely supported probability measure; atoms are kept sorted
/// lexicographically by position, weights strictly positive, mass 1 within
/// 1e-12.
class DiscreteMeasure {
 public:
  /// Canonicalizes: sorts, merges atoms closer than merge_radius (weights
  /// added, lexicographically least position kept), validates mass.
  static DiscreteMeasure of(std::vector<Atom> atoms, double merge_radius = kDefaultMergeRadius);
  /// Same, but rescales to unit mass first (mass must be positive).
  static DiscreteMeasure normalized(std::vector<Atom> atoms,
                                    double merge_radius = kDefaultMergeRadius);
  static DiscreteMeasure dirac(const Point& x);
  static DiscreteMeasure uniform_on(const PointCloud& cloud);

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  int dim() const { return dim_; }
  double mass() const;

  Point mean() const;
  double second_moment(int axis) const;  // E[x_axis^2]
  double variance(int axis) const;

  /// Support as a cloud, restricted to atoms with weight >= weight_floor.
  PointCloud support(double weight_floor = 0.0) const;

 private:
  std::vector<Atom> atoms_;
  int dim_ = 0;
};

struct TransferOptions {
  double grid_h = 0.0;          // > 0: snap positions to this grid and pool weights
  double merge_radius = kDefaultMergeRadius;  // used when grid_h == 0
  std::size_t atom_budget = 1u << 20;
};

/// One transfer step: pushforward by every net parameter, weighted by the
/// parameter law (explicit probabilities for finite laws, equal quadrature
/// weights over the net for box laws), then consolidation and renormalization.
/// Total mass is re-asserted to 1 within 1e-12.
DiscreteMeasure transfer_step(const IfsFamily& f, const DiscreteMeasure& mu,
                              const ParamMeasure& p, const std::vector<ParamValue>& lam_net,
                              const TransferOptions& opts = {});

enum class TransportMethod { automatic, quantile_1d, min_cost_flow };

struct KantorovichOptions {
  std::size_t solver_budget = 512;  // per-side atom cap for the flow solver
  TransportMethod method = TransportMethod::automatic;
};

/// Exact Kantorovich distance between two discrete probability measures of
/// equal dimension. Symmetric bit-for-bit (arguments are canonically ordered
/// internally). The flow path throws BudgetExceeded when either side has more
/// than solver_budget atoms; the 1D quantile path has no such limit.
double kantorovich_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                            const KantorovichOptions& opts = {});

struct TransportPlan {
  struct Flow {
    std::size_t from = 0;  // atom index in mu
    std::size_t to = 0;    // atom index in nu
    double mass = 0.0;
  };
  std::vector<Flow> flows;
  double cost = 0.0;
};

/// Optimal transport plan between the atom sets (min-cost flow path, any dim).
TransportPlan transport_plan(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                             std::size_t solver_budget = 512);

struct MeasureTraceEntry {
  std::size_t iteration = 0;
  double gap = 0.0;          // Kantorovich distance between consecutive iterates
  std::size_t atoms = 0;
  double grid_h = 0.0;
};

struct InvariantMeasureResult {
  DiscreteMeasure measure;
  std::vector<MeasureTraceEntry> trace;
  std::size_t iterations = 0;
};

struct InvariantMeasureOptions {
  double grid_h = -1.0;  // < 0: tol/8
  std::size_t atom_budget = 1u << 20;
  std::size_t solver_budget = 512;
};

/// Iterates transfer_step from seed until the consecutive-iterate Kantorovich
/// gap drops below tol; throws NoConvergence after n_max steps.
InvariantMeasureResult compute_invariant_measure(const IfsFamily& f, const ParamMeasure& p,
                                                 const DiscreteMeasure& seed,
                                                 const std::vector<ParamValue>& lam_net,
                                                 double tol, std::size_t n_max,
                                                 const InvariantMeasureOptions& opts = {});

/// Runs compute_invariant_measure from each seed and returns the largest
/// pairwise Kantorovich distance among the results.
double seed_independence_check(const IfsFamily& f, const ParamMeasure& p,
                               const std::vector<DiscreteMeasure>& seeds,
                               const std::vector<ParamValue>& lam_net, double tol,
                               std::size_t n_max, const InvariantMeasureOptions& opts = {});

/// Hausdorff distance between the measure's support (atoms with weight >=
/// weight_floor) and an attractor cloud. Throws if the floor empties the support.
double support_vs_attractor(const DiscreteMeasure& nu, const PointCloud& attractor,
                            double weight_floor = 0.0);

}  // namespace ifslab
