#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "common.hpp"
#include "linalg.hpp"
#include "rng.hpp"

namespace levyham {

/// Named scalar jump-size distributions for compound Poisson sampling.
struct UniformSizes {
  double lo = -1.0;
  double hi = 1.0;
};
struct NormalSizes {
  double stddev = 1.0;
};
/// +magnitude or -magnitude with equal probability.
struct TwoPointSizes {
  double magnitude = 1.0;
};
struct ConstantSizes {
  double value = 1.0;
};
using SizeDistribution =
    std::variant<UniformSizes, NormalSizes, TwoPointSizes, ConstantSizes>;

/// One atom of a discrete Levy measure: mass `rate` at the point `size`.
struct DiscreteAtom {
  Vec size;
  double rate = 0.0;
};

struct CompoundPoissonSpec {
  double rate = 0.0;  // arrival rate before truncation
  SizeDistribution distribution;
  double truncation = 0.0;  // jumps with |size| < truncation are dropped
  /// Probability of landing in each noise component; uniform when empty.
  std::vector<double> component_weights;
};

/// Finite-activity representation of the jump measure. The `none` variant
/// is a measure with no mass at all.
class JumpSpec {
 public:
  JumpSpec() = default;
  explicit JumpSpec(std::vector<DiscreteAtom> atoms);
  explicit JumpSpec(CompoundPoissonSpec cp);

  static JumpSpec none() { return JumpSpec(); }

  bool empty() const;
  bool is_atoms() const;
  bool is_compound_poisson() const;
  const std::vector<DiscreteAtom>& atoms() const;
  const CompoundPoissonSpec& compound_poisson() const;

  /// Total arrival rate of simulated events (after truncation for the
  /// compound Poisson variant).
  double total_rate(int dim) const;

  void validate(int dim) const;

 private:
  std::variant<std::monostate, std::vector<DiscreteAtom>, CompoundPoissonSpec>
      spec_;
};

/// Second moment of the jump measure, int |z|^2 nu(dz).
double jump_second_moment(const JumpSpec& spec);

/// int |z|^p nu(dz) for p >= 2; used for the moment assumption checks.
double jump_abs_moment(const JumpSpec& spec, double p);

/// Re eta_0(u) = int (cos(u.z) - 1) nu(dz), always <= 0.
double characteristic_exponent_real(const JumpSpec& spec, const Vec& u);

/// Error variance of dropping jumps below the truncation threshold,
/// int_{|z|<delta} |z|^2 nu(dz). Zero for atom specs (atoms are exact).
double truncation_second_moment(const JumpSpec& spec);

struct LevyTriplet {
  Vec drift;          // gamma, length d
  Matrix covariance;  // A, d x d symmetric PSD
  JumpSpec jumps;

  int dim() const { return static_cast<int>(drift.size()); }
  void validate(double psd_tol = 1e-10, double moment_order = 2.0) const;

  static LevyTriplet null_noise(int dim);
  static LevyTriplet standard(int dim);  // gamma = 0, A = I, no jumps
};

struct JumpEvent {
  double time = 0.0;
  int component = 0;
  double size = 0.0;
};

/// A realized driving path on a time grid. Brownian increments are already
/// covariance-shaped; the drift gamma is not in the path (the integrator
/// folds it into the drift field). Between grid points the continuous part
/// is read as linear interpolation, so refining the grid without touching
/// increments describes the same path.
struct NoisePath {
  std::vector<double> grid;   // t_0 < t_1 < ... < t_N
  Matrix brownian;            // N x d, increment over (t_i, t_{i+1})
  std::vector<JumpEvent> jumps;  // ordered by (time, component)
  StreamId seed_record;
  int dim = 0;

  std::size_t steps() const { return grid.empty() ? 0 : grid.size() - 1; }
  double horizon() const { return grid.empty() ? 0.0 : grid.back(); }
  void validate() const;

  /// Merge `factor` consecutive steps into one (grid length minus one must
  /// be divisible by factor). Increment sums are exact, so the coarse path
  /// is the same underlying path observed on a coarser grid.
  NoisePath coarsened(std::size_t factor) const;

  /// Insert an extra grid point at time s, splitting the covering step's
  /// increment linearly. The underlying path is unchanged.
  NoisePath with_grid_point(double s) const;
};

/// Sample a driving path by Levy-Ito decomposition: shaped Gaussian
/// increments per step plus Poisson jump events over the horizon.
/// Deterministic given (triplet, horizon, step, seed).
NoisePath sample_noise_path(const LevyTriplet& triplet, double horizon,
                            double step, StreamId seed);

}  // namespace levyham
