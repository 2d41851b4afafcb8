#include "marcus.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <ostream>

namespace levyham {

bool FieldSystem::has_jacobians() const {
  if (diffusion_jacobian.size() != diffusion.size()) return false;
  if (jump_jacobian.size() != jump.size()) return false;
  for (const auto& j : diffusion_jacobian)
    if (!j) return false;
  for (const auto& j : jump_jacobian)
    if (!j) return false;
  return true;  // drift jacobian may be absent when drift is absent
}

FieldSystem make_field_system(const HamiltonianSystem& sys, const Vec& gamma) {
  if (!gamma.empty() && static_cast<int>(gamma.size()) != sys.channels())
    throw ValidationError("make_field_system: gamma length != channels");

  FieldSystem f;
  f.dim = sys.dim();
  f.channels = sys.channels();

  auto field_for = [&sys](int k) {
    return [&sys, k, grad = Vec()](const Vec& x, Vec& out) mutable {
      sys.hamiltonian(k).gradient(x, grad);
      apply_canonical_j(grad, out);
    };
  };

  const bool trivial_h0 = false;
  (void)trivial_h0;
  if (gamma.empty() || inf_norm(gamma) == 0.0) {
    f.drift = field_for(0);
  } else {
    f.drift = [&sys, gamma, grad = Vec(), buf = Vec()](const Vec& x,
                                                       Vec& out) mutable {
      sys.hamiltonian(0).gradient(x, grad);
      apply_canonical_j(grad, out);
      for (int k = 1; k <= sys.channels(); ++k) {
        if (gamma[k - 1] == 0.0) continue;
        sys.hamiltonian(k).gradient(x, grad);
        apply_canonical_j(grad, buf);
        for (std::size_t i = 0; i < out.size(); ++i)
          out[i] += gamma[k - 1] * buf[i];
      }
    };
  }
  for (int k = 1; k <= sys.channels(); ++k) f.diffusion.push_back(field_for(k));
  f.jump = f.diffusion;

  if (sys.has_hessians()) {
    auto jac_for = [&sys](int k) {
      return [&sys, k](const Vec& x, Matrix& out) {
        sys.field_jacobian(k, x, out);
      };
    };
    if (gamma.empty() || inf_norm(gamma) == 0.0) {
      f.drift_jacobian = jac_for(0);
    } else {
      f.drift_jacobian = [&sys, gamma](const Vec& x, Matrix& out) {
        sys.field_jacobian(0, x, out);
        Matrix buf;
        for (int k = 1; k <= sys.channels(); ++k) {
          if (gamma[k - 1] == 0.0) continue;
          sys.field_jacobian(k, x, buf);
          out = out + scale(buf, gamma[k - 1]);
        }
      };
    }
    for (int k = 1; k <= sys.channels(); ++k)
      f.diffusion_jacobian.push_back(jac_for(k));
    f.jump_jacobian = f.diffusion_jacobian;
  }
  return f;
}

void IntegratorConfig::validate() const {
  if (step <= 0.0) throw ValidationError("integrator: step must be > 0");
  if (jump_map_substeps < 1)
    throw ValidationError("integrator: jump_map_substeps must be >= 1");
}

std::string IntegratorConfig::digest() const {
  std::string s = scheme == Scheme::StratonovichHeun ? "heun" : "midpoint";
  return s + ":" + format_double(step) + ":" +
         std::to_string(jump_map_substeps);
}

namespace {

int effective_substeps(double dz, int substeps) {
  const double mag = std::fabs(dz);
  const int scaling = mag <= 1.0 ? 1 : static_cast<int>(std::ceil(mag));
  return substeps * scaling;
}

void guard_state(const Vec& x, double t, const char* what) {
  if (!all_finite(x) || inf_norm(x) > kDivergenceGuard)
    throw DivergenceError(std::string(what) + " diverged at t = " +
                              format_double(t),
                          t, x);
}

/// One RK4 substep of xi' = field(xi) dz with step h in flow time.
struct Rk4Scratch {
  Vec k1, k2, k3, k4, tmp;
};

void rk4_substep(const VectorField& field, double dz, double h, Vec& x,
                 Rk4Scratch& s) {
  const std::size_t n = x.size();
  s.tmp.resize(n);
  field(x, s.k1);
  for (std::size_t i = 0; i < n; ++i) s.tmp[i] = x[i] + 0.5 * h * dz * s.k1[i];
  field(s.tmp, s.k2);
  for (std::size_t i = 0; i < n; ++i) s.tmp[i] = x[i] + 0.5 * h * dz * s.k2[i];
  field(s.tmp, s.k3);
  for (std::size_t i = 0; i < n; ++i) s.tmp[i] = x[i] + h * dz * s.k3[i];
  field(s.tmp, s.k4);
  for (std::size_t i = 0; i < n; ++i)
    x[i] += h * dz / 6.0 * (s.k1[i] + 2.0 * s.k2[i] + 2.0 * s.k3[i] + s.k4[i]);
}

}  // namespace

Vec marcus_jump_map(const VectorField& field, const Vec& x, double dz,
                    int substeps) {
  if (dz == 0.0) return x;
  const int m = effective_substeps(dz, substeps);
  const double h = 1.0 / m;
  Vec xi = x;
  Rk4Scratch s;
  for (int i = 0; i < m; ++i) {
    rk4_substep(field, dz, h, xi, s);
    guard_state(xi, (i + 1) * h, "marcus jump map");
  }
  return xi;
}

Vec marcus_jump_map_quadrature(
    const VectorField& field, const Vec& x, double dz, int substeps,
    const std::vector<std::function<double(const Vec&)>>& scalars,
    Vec& integrals) {
  integrals.assign(scalars.size(), 0.0);
  if (dz == 0.0) return x;
  const int m = effective_substeps(dz, substeps);
  const double h = 1.0 / m;
  Vec xi = x;
  Rk4Scratch s;
  Vec prev(scalars.size());
  for (std::size_t j = 0; j < scalars.size(); ++j) prev[j] = scalars[j](xi);
  for (int i = 0; i < m; ++i) {
    rk4_substep(field, dz, h, xi, s);
    guard_state(xi, (i + 1) * h, "marcus jump map");
    for (std::size_t j = 0; j < scalars.size(); ++j) {
      const double cur = scalars[j](xi);
      integrals[j] += 0.5 * h * (prev[j] + cur);
      prev[j] = cur;
    }
  }
  return xi;
}

void marcus_jump_map_tangent(const VectorField& field,
                             const JacobianField& jacobian, const Vec& x,
                             double dz, int substeps, Vec& x_out,
                             Matrix& tangent) {
  const std::size_t n = x.size();
  x_out = x;
  tangent = Matrix::identity(n);
  if (dz == 0.0) return;
  const int m = effective_substeps(dz, substeps);
  const double h = 1.0 / m;

  Rk4Scratch s;
  Matrix a1, a2, a3, a4;
  Vec tmp(n);
  for (int step = 0; step < m; ++step) {
    // State stages and Jacobian evaluations at the same stage points; the
    // matrix recursion is the exact derivative of the RK4 state update.
    field(x_out, s.k1);
    jacobian(x_out, a1);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = x_out[i] + 0.5 * h * dz * s.k1[i];
    field(tmp, s.k2);
    jacobian(tmp, a2);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = x_out[i] + 0.5 * h * dz * s.k2[i];
    field(tmp, s.k3);
    jacobian(tmp, a3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x_out[i] + h * dz * s.k3[i];
    field(tmp, s.k4);
    jacobian(tmp, a4);

    Matrix m1 = matmul(scale(a1, dz), tangent);
    Matrix m2 = matmul(scale(a2, dz),
                       tangent + scale(m1, 0.5 * h));
    Matrix m3 = matmul(scale(a3, dz),
                       tangent + scale(m2, 0.5 * h));
    Matrix m4 = matmul(scale(a4, dz), tangent + scale(m3, h));

    for (std::size_t i = 0; i < n; ++i)
      x_out[i] +=
          h * dz / 6.0 * (s.k1[i] + 2.0 * s.k2[i] + 2.0 * s.k3[i] + s.k4[i]);
    tangent = tangent + scale(m1 + scale(m2, 2.0) + scale(m3, 2.0) + m4,
                              h / 6.0);
    guard_state(x_out, (step + 1) * h, "marcus jump map");
  }
}

namespace {

/// Scheme stepping with reusable scratch.
class Stepper {
 public:
  Stepper(const FieldSystem& fields, Scheme scheme)
      : fields_(fields), scheme_(scheme) {
    const std::size_t n = fields.dim;
    f1_.resize(n);
    f2_.resize(n);
    pred_.resize(n);
    buf_.resize(n);
  }

  /// out = drift(x) dt + sum_k diffusion_k(x) dB_k.
  void combined(const Vec& x, double dt, const double* db, Vec& out) {
    const std::size_t n = out.size();
    std::fill(out.begin(), out.end(), 0.0);
    if (fields_.drift && dt != 0.0) {
      fields_.drift(x, buf_);
      for (std::size_t i = 0; i < n; ++i) out[i] += dt * buf_[i];
    }
    for (int k = 0; k < fields_.channels; ++k) {
      if (db[k] == 0.0) continue;
      fields_.diffusion[k](x, buf_);
      for (std::size_t i = 0; i < n; ++i) out[i] += db[k] * buf_[i];
    }
  }

  void step(Vec& x, double t, double dt, const double* db) {
    const std::size_t n = x.size();
    if (scheme_ == Scheme::StratonovichHeun) {
      combined(x, dt, db, f1_);
      for (std::size_t i = 0; i < n; ++i) pred_[i] = x[i] + f1_[i];
      guard_state(pred_, t, "integration step");
      combined(pred_, dt, db, f2_);
      for (std::size_t i = 0; i < n; ++i) x[i] += 0.5 * (f1_[i] + f2_[i]);
    } else {
      combined(x, dt, db, f1_);
      for (std::size_t i = 0; i < n; ++i) pred_[i] = x[i] + f1_[i];
      bool converged = false;
      for (int iter = 0; iter < 100; ++iter) {
        for (std::size_t i = 0; i < n; ++i)
          buf_[i] = 0.5 * (x[i] + pred_[i]);
        Vec mid = buf_;
        combined(mid, dt, db, f2_);
        double delta = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double next = x[i] + f2_[i];
          delta = std::max(delta, std::fabs(next - pred_[i]));
          pred_[i] = next;
        }
        guard_state(pred_, t, "integration step");
        if (delta <= 1e-14 * (1.0 + inf_norm(pred_))) {
          converged = true;
          break;
        }
      }
      if (!converged)
        throw DivergenceError("midpoint iteration did not converge at t = " +
                                  format_double(t),
                              t, pred_);
      x = pred_;
    }
    guard_state(x, t, "integration step");
  }

 private:
  const FieldSystem& fields_;
  Scheme scheme_;
  Vec f1_, f2_, pred_, buf_;
};

void validate_integration_inputs(const FieldSystem& fields,
                                 const NoisePath& noise, const Vec& x0,
                                 const IntegratorConfig& cfg) {
  cfg.validate();
  noise.validate();
  if (fields.channels != noise.dim)
    throw ValidationError("integrate: field channels (" +
                          std::to_string(fields.channels) +
                          ") != noise channels (" + std::to_string(noise.dim) +
                          ")");
  if (static_cast<int>(x0.size()) != fields.dim)
    throw ValidationError("integrate: initial state has wrong dimension");
  if (!all_finite(x0))
    throw ValidationError("integrate: initial state not finite");
  if (static_cast<int>(fields.diffusion.size()) != fields.channels ||
      static_cast<int>(fields.jump.size()) != fields.channels)
    throw ValidationError("integrate: field system channel lists incomplete");
}

}  // namespace

IntegrationResult integrate_observed(const FieldSystem& fields,
                                     const NoisePath& noise, const Vec& x0,
                                     const IntegratorConfig& cfg,
                                     const Observer& observer,
                                     std::vector<JumpAnnotation>* annotations) {
  validate_integration_inputs(fields, noise, x0, cfg);
  Stepper stepper(fields, cfg.scheme);

  Vec x = x0;
  Vec portion(fields.channels);
  std::size_t jidx = 0;

  auto emit = [&](double t, SamplePoint kind) {
    return !observer || observer(t, x, kind);
  };

  if (!emit(noise.grid.front(), SamplePoint::Initial))
    return {x, noise.grid.front(), true};

  for (std::size_t i = 0; i < noise.steps(); ++i) {
    const double t0 = noise.grid[i];
    const double t1 = noise.grid[i + 1];
    const double dt_full = t1 - t0;
    double t_cur = t0;

    while (jidx < noise.jumps.size() && noise.jumps[jidx].time <= t1) {
      const JumpEvent& ev = noise.jumps[jidx];
      if (ev.time > t_cur) {
        const double frac = (ev.time - t_cur) / dt_full;
        for (int k = 0; k < fields.channels; ++k)
          portion[k] = frac * noise.brownian(i, k);
        stepper.step(x, ev.time, ev.time - t_cur, portion.data());
        t_cur = ev.time;
      }
      if (!emit(t_cur, SamplePoint::PreJump)) return {x, t_cur, true};
      Vec pre;
      if (annotations && cfg.record_jumps) pre = x;
      x = marcus_jump_map(fields.jump[ev.component], x, ev.size,
                          cfg.jump_map_substeps);
      if (annotations && cfg.record_jumps)
        annotations->push_back(
            {jidx, ev.time, ev.component, ev.size, std::move(pre), x});
      if (!emit(t_cur, SamplePoint::PostJump)) return {x, t_cur, true};
      ++jidx;
    }

    if (t_cur < t1) {
      const double frac = (t1 - t_cur) / dt_full;
      for (int k = 0; k < fields.channels; ++k)
        portion[k] = frac * noise.brownian(i, k);
      stepper.step(x, t1, t1 - t_cur, portion.data());
      if (!emit(t1, SamplePoint::GridPoint)) return {x, t1, true};
    }
  }
  return {x, noise.grid.back(), false};
}

Trajectory integrate(const FieldSystem& fields, const NoisePath& noise,
                     const Vec& x0, const IntegratorConfig& cfg,
                     Provenance provenance) {
  Trajectory traj;
  traj.provenance = std::move(provenance);
  traj.provenance.noise_seed = noise.seed_record;
  if (traj.provenance.integrator_digest.empty())
    traj.provenance.integrator_digest = cfg.digest();

  const std::size_t expected = noise.grid.size() + 2 * noise.jumps.size();
  traj.times.reserve(expected);
  traj.states.reserve(expected);

  Observer obs = [&](double t, const Vec& x, SamplePoint kind) {
    traj.times.push_back(t);
    traj.states.push_back(x);
    traj.jump_flags.push_back(kind == SamplePoint::PostJump ? 1 : 0);
    return true;
  };
  integrate_observed(fields, noise, x0, cfg, obs,
                     cfg.record_jumps ? &traj.jumps : nullptr);
  return traj;
}

Trajectory integrate(const HamiltonianSystem& sys, const NoisePath& noise,
                     const Vec& x0, const IntegratorConfig& cfg,
                     const Vec& gamma) {
  FieldSystem fields = make_field_system(sys, gamma);
  Provenance prov;
  prov.system_id = sys.name();
  return integrate(fields, noise, x0, cfg, std::move(prov));
}

namespace {

struct MergedPerturbation {
  FieldSystem fields;
  NoisePath merged;
};

MergedPerturbation merge_perturbed(const HamiltonianSystem& sys,
                                   const NoisePath& noise,
                                   const PerturbationFields& pert,
                                   double epsilon, const NoisePath& noise2) {
  if (noise.grid != noise2.grid)
    throw ValidationError(
        "integrate_perturbed: noise and noise2 must share a grid");
  const int d1 = noise.dim;
  const int d2 = noise2.dim;
  if (static_cast<int>(pert.diffusion.size()) != d2 ||
      static_cast<int>(pert.jump.size()) != d2)
    throw ValidationError(
        "integrate_perturbed: perturbation channel count mismatch");

  MergedPerturbation out;
  FieldSystem base = make_field_system(sys);
  out.fields.dim = sys.dim();
  out.fields.channels = d1 + d2;
  out.fields.drift = [base_drift = base.drift, k_field = pert.drift, epsilon,
                      buf = Vec()](const Vec& x, Vec& outv) mutable {
    base_drift(x, outv);
    if (k_field) {
      k_field(x, buf);
      for (std::size_t i = 0; i < outv.size(); ++i)
        outv[i] += epsilon * buf[i];
    }
  };
  for (int k = 0; k < d1; ++k) {
    out.fields.diffusion.push_back(base.diffusion[k]);
    out.fields.jump.push_back(base.jump[k]);
  }
  auto scaled = [epsilon](const VectorField& f) {
    return [f, epsilon](const Vec& x, Vec& outv) {
      f(x, outv);
      for (double& v : outv) v *= epsilon;
    };
  };
  for (int k = 0; k < d2; ++k) {
    out.fields.diffusion.push_back(scaled(pert.diffusion[k]));
    out.fields.jump.push_back(scaled(pert.jump[k]));
  }

  out.merged.dim = d1 + d2;
  out.merged.grid = noise.grid;
  out.merged.seed_record = noise.seed_record;
  out.merged.brownian = Matrix(noise.steps(), d1 + d2);
  for (std::size_t i = 0; i < noise.steps(); ++i) {
    for (int k = 0; k < d1; ++k) out.merged.brownian(i, k) = noise.brownian(i, k);
    for (int k = 0; k < d2; ++k)
      out.merged.brownian(i, d1 + k) = noise2.brownian(i, k);
  }
  out.merged.jumps = noise.jumps;
  for (const auto& ev : noise2.jumps)
    out.merged.jumps.push_back({ev.time, ev.component + d1, ev.size});
  std::stable_sort(out.merged.jumps.begin(), out.merged.jumps.end(),
                   [](const JumpEvent& a, const JumpEvent& b) {
                     if (a.time != b.time) return a.time < b.time;
                     return a.component < b.component;
                   });
  return out;
}

}  // namespace

IntegrationResult integrate_perturbed_observed(
    const HamiltonianSystem& sys, const NoisePath& noise,
    const PerturbationFields& pert, double epsilon, const NoisePath& noise2,
    const Vec& x0, const IntegratorConfig& cfg, const Observer& observer) {
  if (epsilon == 0.0) {
    FieldSystem fields = make_field_system(sys);
    return integrate_observed(fields, noise, x0, cfg, observer, nullptr);
  }
  MergedPerturbation merged = merge_perturbed(sys, noise, pert, epsilon, noise2);
  return integrate_observed(merged.fields, merged.merged, x0, cfg, observer,
                            nullptr);
}

Trajectory integrate_perturbed(const HamiltonianSystem& sys,
                               const NoisePath& noise,
                               const PerturbationFields& pert, double epsilon,
                               const NoisePath& noise2, const Vec& x0,
                               const IntegratorConfig& cfg) {
  if (epsilon == 0.0) return integrate(sys, noise, x0, cfg);
  MergedPerturbation merged = merge_perturbed(sys, noise, pert, epsilon, noise2);
  Provenance prov;
  prov.system_id = sys.name() + "+perturbation";
  return integrate(merged.fields, merged.merged, x0, cfg, std::move(prov));
}

void integrate_variational(const FieldSystem& fields, const NoisePath& noise,
                           const Vec& x0, const IntegratorConfig& cfg,
                           double t_stop, Vec& state_out,
                           Matrix& jacobian_out) {
  validate_integration_inputs(fields, noise, x0, cfg);
  if (!fields.has_jacobians())
    throw ValidationError("integrate_variational: field Jacobians required");
  if (fields.drift && !fields.drift_jacobian)
    throw ValidationError("integrate_variational: drift Jacobian required");

  const std::size_t n = x0.size();
  Vec x = x0;
  Matrix d = Matrix::identity(n);
  Vec f1(n), f2(n), pred(n), buf(n);
  Matrix m1, m2, jbuf;

  auto combined = [&](const Vec& xx, double dt, const double* db, Vec& outv,
                      Matrix& outm) {
    std::fill(outv.begin(), outv.end(), 0.0);
    outm = Matrix(n, n);
    if (fields.drift && dt != 0.0) {
      fields.drift(xx, buf);
      for (std::size_t i = 0; i < n; ++i) outv[i] += dt * buf[i];
      fields.drift_jacobian(xx, jbuf);
      outm = outm + scale(jbuf, dt);
    }
    for (int k = 0; k < fields.channels; ++k) {
      if (db[k] == 0.0) continue;
      fields.diffusion[k](xx, buf);
      for (std::size_t i = 0; i < n; ++i) outv[i] += db[k] * buf[i];
      fields.diffusion_jacobian[k](xx, jbuf);
      outm = outm + scale(jbuf, db[k]);
    }
  };

  auto heun_step = [&](double t, double dt, const double* db) {
    combined(x, dt, db, f1, m1);
    for (std::size_t i = 0; i < n; ++i) pred[i] = x[i] + f1[i];
    Matrix dpred = d + matmul(m1, d);
    combined(pred, dt, db, f2, m2);
    for (std::size_t i = 0; i < n; ++i) x[i] += 0.5 * (f1[i] + f2[i]);
    d = d + scale(matmul(m1, d) + matmul(m2, dpred), 0.5);
    guard_state(x, t, "variational integration");
  };

  if (cfg.scheme != Scheme::StratonovichHeun)
    throw ValidationError(
        "integrate_variational: only the Heun scheme is supported");

  const double eps_t = 1e-12;
  if (std::fabs(noise.grid.front() - t_stop) <= eps_t) {
    state_out = x;
    jacobian_out = d;
    return;
  }

  bool reached = false;
  std::size_t jidx = 0;
  Vec portion(fields.channels);
  Vec jump_x;
  Matrix jump_d;

  for (std::size_t i = 0; i < noise.steps() && !reached; ++i) {
    const double t0 = noise.grid[i];
    const double t1 = noise.grid[i + 1];
    const double dt_full = t1 - t0;
    double t_cur = t0;

    while (jidx < noise.jumps.size() && noise.jumps[jidx].time <= t1) {
      const JumpEvent& ev = noise.jumps[jidx];
      if (ev.time > t_cur) {
        const double frac = (ev.time - t_cur) / dt_full;
        for (int k = 0; k < fields.channels; ++k)
          portion[k] = frac * noise.brownian(i, k);
        heun_step(ev.time, ev.time - t_cur, portion.data());
        t_cur = ev.time;
      }
      marcus_jump_map_tangent(fields.jump[ev.component],
                              fields.jump_jacobian[ev.component], x, ev.size,
                              cfg.jump_map_substeps, jump_x, jump_d);
      x = jump_x;
      d = matmul(jump_d, d);
      ++jidx;
    }
    if (t_cur < t1) {
      const double frac = (t1 - t_cur) / dt_full;
      for (int k = 0; k < fields.channels; ++k)
        portion[k] = frac * noise.brownian(i, k);
      heun_step(t1, t1 - t_cur, portion.data());
    }
    if (std::fabs(t1 - t_stop) <= eps_t) reached = true;
  }
  if (!reached)
    throw ValidationError("integrate_variational: t_stop not on the grid");
  state_out = x;
  jacobian_out = d;
}

Vec integrate_to(const FieldSystem& fields, const NoisePath& noise,
                 const Vec& x0, const IntegratorConfig& cfg, double t_stop) {
  const double eps_t = 1e-12;
  Vec result;
  bool found = false;
  Observer obs = [&](double t, const Vec& x, SamplePoint kind) {
    (void)kind;
    if (t > t_stop + eps_t) return false;
    if (std::fabs(t - t_stop) <= eps_t) {
      // Keep overwriting so a jump landing exactly at t_stop is included.
      result = x;
      found = true;
    }
    return true;
  };
  integrate_observed(fields, noise, x0, cfg, obs, nullptr);
  if (!found)
    throw ValidationError("integrate_to: t_stop not on the refined grid");
  return result;
}

void Trajectory::write_csv(std::ostream& os) const {
  const std::size_t d = dim();
  const std::size_t n = d / 2;
  os << "t";
  for (std::size_t i = 1; i <= n; ++i) os << ",q" << i;
  for (std::size_t i = 1; i <= n; ++i) os << ",p" << i;
  os << ",jump_flag\n";
  for (std::size_t r = 0; r < times.size(); ++r) {
    os << format_double(times[r]);
    for (std::size_t c = 0; c < d; ++c)
      os << "," << format_double(states[r][c]);
    os << "," << (r < jump_flags.size() ? int(jump_flags[r]) : 0) << "\n";
  }
}

namespace {

template <typename T>
void write_raw(std::ofstream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_raw(std::ifstream& is, T& v) {
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
}

void write_string(std::ofstream& os, const std::string& s) {
  const std::uint32_t len = static_cast<std::uint32_t>(s.size());
  write_raw(os, len);
  os.write(s.data(), len);
}

std::string read_string(std::ifstream& is) {
  std::uint32_t len = 0;
  read_raw(is, len);
  std::string s(len, '\0');
  is.read(s.data(), len);
  return s;
}

}  // namespace

void Trajectory::save_binary(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("save_binary: cannot open " + path);
  os.write("LHTJ", 4);
  write_raw(os, std::uint32_t{1});
  write_raw(os, static_cast<std::uint32_t>(dim()));
  write_raw(os, static_cast<std::uint64_t>(times.size()));
  write_raw(os, static_cast<std::uint64_t>(jumps.size()));
  for (double t : times) write_raw(os, t);
  for (const auto& s : states)
    os.write(reinterpret_cast<const char*>(s.data()),
             static_cast<std::streamsize>(s.size() * sizeof(double)));
  for (std::uint8_t f : jump_flags) write_raw(os, f);
  for (const auto& j : jumps) {
    write_raw(os, static_cast<std::uint64_t>(j.event_index));
    write_raw(os, j.time);
    write_raw(os, static_cast<std::int32_t>(j.channel));
    write_raw(os, j.size);
    os.write(reinterpret_cast<const char*>(j.pre.data()),
             static_cast<std::streamsize>(j.pre.size() * sizeof(double)));
    os.write(reinterpret_cast<const char*>(j.post.data()),
             static_cast<std::streamsize>(j.post.size() * sizeof(double)));
  }
  write_raw(os, provenance.noise_seed.master_seed);
  write_raw(os, provenance.noise_seed.path_index);
  write_string(os, provenance.system_id);
  write_string(os, provenance.integrator_digest);
}

Trajectory Trajectory::load_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_binary: cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (std::memcmp(magic, "LHTJ", 4) != 0)
    throw std::runtime_error("load_binary: bad magic");
  std::uint32_t version = 0, d = 0;
  std::uint64_t rows = 0, njumps = 0;
  read_raw(is, version);
  if (version != 1) throw std::runtime_error("load_binary: bad version");
  read_raw(is, d);
  read_raw(is, rows);
  read_raw(is, njumps);
  Trajectory traj;
  traj.times.resize(rows);
  traj.states.assign(rows, Vec(d));
  traj.jump_flags.resize(rows);
  for (auto& t : traj.times) read_raw(is, t);
  for (auto& s : traj.states)
    is.read(reinterpret_cast<char*>(s.data()),
            static_cast<std::streamsize>(d * sizeof(double)));
  for (auto& f : traj.jump_flags) read_raw(is, f);
  traj.jumps.resize(njumps);
  for (auto& j : traj.jumps) {
    std::uint64_t idx = 0;
    std::int32_t channel = 0;
    read_raw(is, idx);
    read_raw(is, j.time);
    read_raw(is, channel);
    read_raw(is, j.size);
    j.event_index = idx;
    j.channel = channel;
    j.pre.resize(d);
    j.post.resize(d);
    is.read(reinterpret_cast<char*>(j.pre.data()),
            static_cast<std::streamsize>(d * sizeof(double)));
    is.read(reinterpret_cast<char*>(j.post.data()),
            static_cast<std::streamsize>(d * sizeof(double)));
  }
  read_raw(is, traj.provenance.noise_seed.master_seed);
  read_raw(is, traj.provenance.noise_seed.path_index);
  traj.provenance.system_id = read_string(is);
  traj.provenance.integrator_digest = read_string(is);
  if (!is) throw std::runtime_error("load_binary: truncated file");
  return traj;
}

}  // namespace levyham
