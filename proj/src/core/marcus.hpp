#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "common.hpp"
#include "hamiltonian.hpp"
#include "levy.hpp"
#include "linalg.hpp"

namespace levyham {

using VectorField = std::function<void(const Vec&, Vec&)>;
using JacobianField = std::function<void(const Vec&, Matrix&)>;

/// Drift plus per-channel fields of a Marcus SDE
///   dX = drift dt + sum_k diffusion_k o dB^k + sum_k jump_k <> dL^k.
/// For Hamiltonian systems diffusion and jump coincide (one Levy process
/// per channel); the perturbed system of the averaging experiment needs
/// them distinct. Field closures may carry scratch buffers, so a
/// FieldSystem is cheap to build and must not be shared across threads.
struct FieldSystem {
  int dim = 0;
  int channels = 0;
  VectorField drift;  // empty means zero drift
  std::vector<VectorField> diffusion;
  std::vector<VectorField> jump;
  JacobianField drift_jacobian;  // optional, for the variational propagator
  std::vector<JacobianField> diffusion_jacobian;
  std::vector<JacobianField> jump_jacobian;

  bool has_jacobians() const;
};

/// Hamiltonian system as a field system. The triplet drift gamma is folded
/// into the drift field: V_0 + sum_k gamma_k V_k.
FieldSystem make_field_system(const HamiltonianSystem& sys,
                              const Vec& gamma = {});

enum class Scheme { StratonovichHeun, StratonovichMidpoint };

struct IntegratorConfig {
  double step = 1e-3;
  Scheme scheme = Scheme::StratonovichHeun;
  int jump_map_substeps = 8;  // per unit |dz|, see marcus_jump_map
  bool record_jumps = true;

  void validate() const;
  std::string digest() const;
};

/// Marcus jump map: the time-1 flow of xi' = field(xi) dz from x, by RK4
/// with substeps scaled proportionally to |dz| (local error
/// O((|dz|/m)^5) per substep). dz = 0 returns x exactly.
Vec marcus_jump_map(const VectorField& field, const Vec& x, double dz,
                    int substeps);

/// Same flow, also returning the flow-line quadratures
///   int_0^1 f_j(xi(u)) du  for each supplied scalar f_j
/// (trapezoid over the RK4 substep chain). This is the jump-time
/// convention used for Marcus integrals of scalars along a trajectory.
Vec marcus_jump_map_quadrature(
    const VectorField& field, const Vec& x, double dz, int substeps,
    const std::vector<std::function<double(const Vec&)>>& scalars,
    Vec& integrals);

/// Tangent (linearized) jump map: differentiates the discrete RK4 flow
/// exactly by propagating the matrix alongside the state.
void marcus_jump_map_tangent(const VectorField& field,
                             const JacobianField& jacobian, const Vec& x,
                             double dz, int substeps, Vec& x_out,
                             Matrix& tangent);

struct JumpAnnotation {
  std::size_t event_index = 0;  // index into NoisePath::jumps
  double time = 0.0;
  int channel = 0;
  double size = 0.0;
  Vec pre;
  Vec post;
};

struct Provenance {
  std::string system_id;
  StreamId noise_seed;
  std::string integrator_digest;
};

struct Trajectory {
  std::vector<double> times;  // jump instants appear twice (pre/post)
  std::vector<Vec> states;
  std::vector<std::uint8_t> jump_flags;  // 1 on post-jump rows
  std::vector<JumpAnnotation> jumps;
  Provenance provenance;

  std::size_t dim() const { return states.empty() ? 0 : states[0].size(); }
  const Vec& back() const { return states.back(); }

  /// CSV columns: t, q..., p..., jump_flag (1 on post-jump rows).
  void write_csv(std::ostream& os) const;

  /// Binary fixture format, little-endian:
  ///   magic "LHTJ", u32 version, u32 dim, u64 rows, u64 jumps,
  ///   f64 times[rows], f64 states[rows*dim],
  ///   per jump: u64 event_index, f64 time, i32 channel, f64 size,
  ///             f64 pre[dim], f64 post[dim],
  ///   u64 master_seed, u64 path_index,
  ///   u32 len + system_id, u32 len + integrator_digest.
  void save_binary(const std::string& path) const;
  static Trajectory load_binary(const std::string& path);
};

enum class SamplePoint { Initial, GridPoint, PreJump, PostJump };

/// Called at every refined grid point; return false to stop integration.
using Observer =
    std::function<bool(double t, const Vec& x, SamplePoint kind)>;

struct IntegrationResult {
  Vec state;
  double time = 0.0;
  bool stopped_early = false;
};

/// Core driver: steps the configured scheme between jump times (grid
/// refined to hit every jump exactly) and applies the Marcus jump map at
/// each event, at the left-limit state.
IntegrationResult integrate_observed(const FieldSystem& fields,
                                     const NoisePath& noise, const Vec& x0,
                                     const IntegratorConfig& cfg,
                                     const Observer& observer,
                                     std::vector<JumpAnnotation>* annotations);

Trajectory integrate(const FieldSystem& fields, const NoisePath& noise,
                     const Vec& x0, const IntegratorConfig& cfg,
                     Provenance provenance = {});

Trajectory integrate(const HamiltonianSystem& sys, const NoisePath& noise,
                     const Vec& x0, const IntegratorConfig& cfg,
                     const Vec& gamma = {});

/// Transversal perturbation in marcus terms: a drift K plus per-channel
/// Brownian fields F_k and jump fields G_k driven by an independent path.
struct PerturbationFields {
  VectorField drift;
  std::vector<VectorField> diffusion;
  std::vector<VectorField> jump;
};

/// Integrates the perturbed equation: unperturbed fields driven by
/// `noise`, plus epsilon (K dt + sum F_k o dB~ + sum G_k <> dL~) driven by
/// `noise2` (same grid required). epsilon = 0 short-circuits to the
/// unperturbed integration, bit for bit.
IntegrationResult integrate_perturbed_observed(
    const HamiltonianSystem& sys, const NoisePath& noise,
    const PerturbationFields& pert, double epsilon, const NoisePath& noise2,
    const Vec& x0, const IntegratorConfig& cfg, const Observer& observer);

Trajectory integrate_perturbed(const HamiltonianSystem& sys,
                               const NoisePath& noise,
                               const PerturbationFields& pert, double epsilon,
                               const NoisePath& noise2, const Vec& x0,
                               const IntegratorConfig& cfg);

/// Co-integrates the 2n x 2n variational system along the base
/// trajectory, applying the tangent jump map at each event. Returns the
/// exact Jacobian of the discrete flow map at time t_stop.
void integrate_variational(const FieldSystem& fields, const NoisePath& noise,
                           const Vec& x0, const IntegratorConfig& cfg,
                           double t_stop, Vec& state_out, Matrix& jacobian_out);

/// State at t_stop (must lie on the refined grid).
Vec integrate_to(const FieldSystem& fields, const NoisePath& noise,
                 const Vec& x0, const IntegratorConfig& cfg, double t_stop);

}  // namespace levyham
