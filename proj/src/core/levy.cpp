#include "levy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace levyham {

namespace {

// Simpson rule; integrands here are smooth on bounded intervals.
template <typename F>
double simpson(F f, double a, double b, int intervals = 512) {
  if (b <= a) return 0.0;
  if (intervals % 2 != 0) ++intervals;
  const double h = (b - a) / intervals;
  double s = f(a) + f(b);
  for (int i = 1; i < intervals; ++i)
    s += f(a + i * h) * ((i % 2 == 1) ? 4.0 : 2.0);
  return s * h / 3.0;
}

double uniform_density(const UniformSizes& u) {
  if (u.hi <= u.lo) throw ValidationError("uniform jump sizes: hi <= lo");
  return 1.0 / (u.hi - u.lo);
}

// E[f(S) 1_{|S| >= delta}] for the scalar size distributions.
template <typename F>
double truncated_expectation(const SizeDistribution& dist, double delta,
                             F f) {
  struct Visitor {
    double delta;
    F f;
    double operator()(const UniformSizes& u) const {
      const double dens = uniform_density(u);
      double total = 0.0;
      const double neg_hi = std::min(u.hi, -delta);
      if (u.lo < neg_hi)
        total += simpson(f, u.lo, neg_hi) * dens;
      const double pos_lo = std::max(u.lo, delta);
      if (pos_lo < u.hi) total += simpson(f, pos_lo, u.hi) * dens;
      return total;
    }
    double operator()(const NormalSizes& n) const {
      const double s = n.stddev;
      if (s <= 0.0) throw ValidationError("normal jump sizes: stddev <= 0");
      auto weighted = [&](double x) {
        return f(x) * std::exp(-x * x / (2 * s * s)) /
               (s * std::sqrt(2.0 * M_PI));
      };
      const double hi = delta + 10.0 * s;
      return simpson(weighted, delta, hi, 2000) +
             simpson(weighted, -hi, -delta, 2000);
    }
    double operator()(const TwoPointSizes& t) const {
      if (t.magnitude <= 0.0)
        throw ValidationError("two-point jump sizes: magnitude <= 0");
      if (t.magnitude < delta) return 0.0;
      return 0.5 * (f(t.magnitude) + f(-t.magnitude));
    }
    double operator()(const ConstantSizes& c) const {
      if (std::fabs(c.value) < delta) return 0.0;
      return f(c.value);
    }
  };
  return std::visit(Visitor{delta, f}, dist);
}

// E[f(S) 1_{|S| < delta}], the complement used for truncation reporting.
template <typename F>
double small_jump_expectation(const SizeDistribution& dist, double delta,
                              F f) {
  const double whole = truncated_expectation(dist, 0.0, f);
  return whole - truncated_expectation(dist, delta, f);
}

std::vector<double> resolve_weights(const CompoundPoissonSpec& cp, int dim) {
  if (cp.component_weights.empty())
    return std::vector<double>(dim, 1.0 / dim);
  if (static_cast<int>(cp.component_weights.size()) != dim)
    throw ValidationError("jump component weights: wrong length");
  double sum = 0.0;
  for (double w : cp.component_weights) {
    if (w < 0.0) throw ValidationError("jump component weights: negative");
    sum += w;
  }
  if (sum <= 0.0) throw ValidationError("jump component weights: zero sum");
  std::vector<double> w = cp.component_weights;
  for (double& x : w) x /= sum;
  return w;
}

}  // namespace

JumpSpec::JumpSpec(std::vector<DiscreteAtom> atoms) : spec_(std::move(atoms)) {}
JumpSpec::JumpSpec(CompoundPoissonSpec cp) : spec_(std::move(cp)) {}

bool JumpSpec::empty() const {
  if (std::holds_alternative<std::monostate>(spec_)) return true;
  if (is_atoms()) return atoms().empty();
  return compound_poisson().rate == 0.0;
}

bool JumpSpec::is_atoms() const {
  return std::holds_alternative<std::vector<DiscreteAtom>>(spec_);
}

bool JumpSpec::is_compound_poisson() const {
  return std::holds_alternative<CompoundPoissonSpec>(spec_);
}

const std::vector<DiscreteAtom>& JumpSpec::atoms() const {
  return std::get<std::vector<DiscreteAtom>>(spec_);
}

const CompoundPoissonSpec& JumpSpec::compound_poisson() const {
  return std::get<CompoundPoissonSpec>(spec_);
}

double JumpSpec::total_rate(int dim) const {
  if (std::holds_alternative<std::monostate>(spec_)) return 0.0;
  if (is_atoms()) {
    double r = 0.0;
    for (const auto& a : atoms()) r += a.rate;
    return r;
  }
  const auto& cp = compound_poisson();
  resolve_weights(cp, dim);  // shape check
  const double keep =
      truncated_expectation(cp.distribution, cp.truncation,
                            [](double) { return 1.0; });
  return cp.rate * keep;
}

void JumpSpec::validate(int dim) const {
  if (std::holds_alternative<std::monostate>(spec_)) return;
  if (is_atoms()) {
    for (const auto& a : atoms()) {
      if (a.rate <= 0.0) throw ValidationError("jump atom: rate must be > 0");
      if (static_cast<int>(a.size.size()) != dim)
        throw ValidationError("jump atom: size vector has wrong length");
      if (!all_finite(a.size))
        throw ValidationError("jump atom: non-finite size");
    }
    return;
  }
  const auto& cp = compound_poisson();
  if (cp.rate < 0.0) throw ValidationError("compound Poisson: rate < 0");
  if (cp.truncation < 0.0)
    throw ValidationError("compound Poisson: truncation < 0");
  resolve_weights(cp, dim);
  truncated_expectation(cp.distribution, cp.truncation,
                        [](double) { return 1.0; });
}

double jump_second_moment(const JumpSpec& spec) {
  return jump_abs_moment(spec, 2.0);
}

double jump_abs_moment(const JumpSpec& spec, double p) {
  if (p < 0.0) throw std::domain_error("jump_abs_moment: p < 0");
  if (spec.empty()) return 0.0;
  if (spec.is_atoms()) {
    double total = 0.0;
    for (const auto& a : spec.atoms()) {
      double norm2 = 0.0;
      for (double z : a.size) norm2 += z * z;
      total += a.rate * std::pow(norm2, p / 2.0);
    }
    return total;
  }
  const auto& cp = spec.compound_poisson();
  return cp.rate * truncated_expectation(
                       cp.distribution, cp.truncation,
                       [p](double s) { return std::pow(std::fabs(s), p); });
}

double characteristic_exponent_real(const JumpSpec& spec, const Vec& u) {
  if (spec.empty()) return 0.0;
  if (spec.is_atoms()) {
    double total = 0.0;
    for (const auto& a : spec.atoms()) {
      if (a.size.size() != u.size())
        throw ValidationError("characteristic exponent: dimension mismatch");
      double dot = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) dot += u[i] * a.size[i];
      total += a.rate * (std::cos(dot) - 1.0);
    }
    return total;
  }
  const auto& cp = spec.compound_poisson();
  const auto weights = resolve_weights(cp, static_cast<int>(u.size()));
  double total = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (weights[k] == 0.0) continue;
    const double uk = u[k];
    total += cp.rate * weights[k] *
             truncated_expectation(cp.distribution, cp.truncation,
                                   [uk](double s) {
                                     return std::cos(uk * s) - 1.0;
                                   });
  }
  return total;
}

double truncation_second_moment(const JumpSpec& spec) {
  if (spec.empty() || spec.is_atoms()) return 0.0;
  const auto& cp = spec.compound_poisson();
  return cp.rate * small_jump_expectation(cp.distribution, cp.truncation,
                                          [](double s) { return s * s; });
}

void LevyTriplet::validate(double psd_tol, double moment_order) const {
  const int d = dim();
  if (d <= 0) throw ValidationError("levy triplet: dimension must be >= 1");
  if (!all_finite(drift)) throw ValidationError("levy triplet: drift not finite");
  if (covariance.rows() != static_cast<std::size_t>(d) ||
      covariance.cols() != static_cast<std::size_t>(d))
    throw ValidationError("levy triplet: covariance must be d x d");
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      if (std::fabs(covariance(i, j) - covariance(j, i)) > psd_tol)
        throw ValidationError("levy triplet: covariance not symmetric");
  const auto eig = symmetric_eigen(covariance);
  if (!eig.values.empty() && eig.values.front() < -psd_tol)
    throw ValidationError("levy triplet: covariance not PSD (eigenvalue " +
                          format_double(eig.values.front()) + ")");
  jumps.validate(d);
  const double rate = jumps.total_rate(d);
  if (!std::isfinite(rate))
    throw ValidationError("levy triplet: jump rate not finite");
  const double moment = jump_abs_moment(jumps, moment_order);
  if (!std::isfinite(moment))
    throw ValidationError("levy triplet: |z|^p moment not finite");
}

LevyTriplet LevyTriplet::null_noise(int dim) {
  LevyTriplet t;
  t.drift = Vec(dim, 0.0);
  t.covariance = Matrix(dim, dim);
  return t;
}

LevyTriplet LevyTriplet::standard(int dim) {
  LevyTriplet t;
  t.drift = Vec(dim, 0.0);
  t.covariance = Matrix::identity(dim);
  return t;
}

void NoisePath::validate() const {
  if (grid.size() < 2) throw ValidationError("noise path: empty grid");
  for (std::size_t i = 0; i + 1 < grid.size(); ++i)
    if (grid[i + 1] <= grid[i])
      throw ValidationError("noise path: grid not strictly increasing");
  if (brownian.rows() != steps() ||
      brownian.cols() != static_cast<std::size_t>(dim))
    throw ValidationError("noise path: increment matrix has wrong shape");
  for (std::size_t j = 0; j < jumps.size(); ++j) {
    const auto& e = jumps[j];
    if (e.time <= grid.front() || e.time > grid.back())
      throw ValidationError("noise path: jump outside horizon");
    if (e.component < 0 || e.component >= dim)
      throw ValidationError("noise path: jump component out of range");
    if (j > 0) {
      const auto& prev = jumps[j - 1];
      const bool ordered = prev.time < e.time ||
                           (prev.time == e.time && prev.component < e.component);
      if (!ordered)
        throw ValidationError("noise path: jump events out of order");
    }
  }
}

NoisePath NoisePath::coarsened(std::size_t factor) const {
  if (factor == 0 || steps() % factor != 0)
    throw ValidationError("coarsened: factor must divide step count");
  NoisePath out;
  out.dim = dim;
  out.seed_record = seed_record;
  out.jumps = jumps;
  const std::size_t coarse_steps = steps() / factor;
  out.grid.resize(coarse_steps + 1);
  out.brownian = Matrix(coarse_steps, dim);
  for (std::size_t i = 0; i <= coarse_steps; ++i) out.grid[i] = grid[i * factor];
  for (std::size_t i = 0; i < coarse_steps; ++i)
    for (int k = 0; k < dim; ++k) {
      double s = 0.0;
      for (std::size_t f = 0; f < factor; ++f)
        s += brownian(i * factor + f, k);
      out.brownian(i, k) = s;
    }
  return out;
}

NoisePath NoisePath::with_grid_point(double s) const {
  for (double t : grid)
    if (t == s) return *this;
  if (s <= grid.front() || s >= grid.back())
    throw ValidationError("with_grid_point: time outside grid span");
  NoisePath out;
  out.dim = dim;
  out.seed_record = seed_record;
  out.jumps = jumps;
  out.grid.reserve(grid.size() + 1);
  out.brownian = Matrix(steps() + 1, dim);
  std::size_t row = 0;
  for (std::size_t i = 0; i < steps(); ++i) {
    out.grid.push_back(grid[i]);
    if (grid[i] < s && s < grid[i + 1]) {
      const double frac = (s - grid[i]) / (grid[i + 1] - grid[i]);
      for (int k = 0; k < dim; ++k) {
        out.brownian(row, k) = frac * brownian(i, k);
        out.brownian(row + 1, k) = (1.0 - frac) * brownian(i, k);
      }
      out.grid.push_back(s);
      row += 2;
    } else {
      for (int k = 0; k < dim; ++k) out.brownian(row, k) = brownian(i, k);
      ++row;
    }
  }
  out.grid.push_back(grid.back());
  return out;
}

NoisePath sample_noise_path(const LevyTriplet& triplet, double horizon,
                            double step, StreamId seed) {
  if (horizon <= 0.0) throw std::invalid_argument("sample_noise_path: horizon <= 0");
  if (step <= 0.0) throw std::invalid_argument("sample_noise_path: step <= 0");
  triplet.validate();

  const int d = triplet.dim();
  NoisePath path;
  path.dim = d;
  path.seed_record = seed;

  const std::size_t n = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(horizon / step - 1e-9)));
  path.grid.resize(n + 1);
  for (std::size_t i = 0; i < n; ++i) path.grid[i] = i * step;
  path.grid[n] = horizon;
  if (path.grid[n] <= path.grid[n - 1]) path.grid.pop_back();

  const std::size_t steps = path.grid.size() - 1;
  path.brownian = Matrix(steps, d);
  const Matrix shape = psd_sqrt(triplet.covariance);

  RandomStream gauss_stream(seed, 0);
  Vec z(d);
  for (std::size_t i = 0; i < steps; ++i) {
    const double dt = path.grid[i + 1] - path.grid[i];
    const double sq = std::sqrt(dt);
    for (int k = 0; k < d; ++k) z[k] = gauss_stream.gaussian();
    for (int r = 0; r < d; ++r) {
      double s = 0.0;
      for (int c = 0; c < d; ++c) s += shape(r, c) * z[c];
      path.brownian(i, r) = s * sq;
    }
  }

  RandomStream jump_stream(seed, 1);
  auto emit_vector_jump = [&](double time, const Vec& size) {
    // Simultaneous component moves are recorded in component order; the
    // integrator applies them sequentially at the same instant.
    for (int k = 0; k < d; ++k)
      if (size[k] != 0.0) path.jumps.push_back({time, k, size[k]});
  };

  if (triplet.jumps.is_atoms()) {
    for (const auto& atom : triplet.jumps.atoms()) {
      double t = 0.0;
      while (true) {
        t += jump_stream.exponential() / atom.rate;
        if (t > horizon) break;
        emit_vector_jump(t, atom.size);
      }
    }
  } else if (triplet.jumps.is_compound_poisson()) {
    const auto& cp = triplet.jumps.compound_poisson();
    if (cp.rate > 0.0) {
      std::vector<double> weights(d, 1.0);
      if (d > 1) {
        weights = cp.component_weights.empty()
                      ? std::vector<double>(d, 1.0 / d)
                      : cp.component_weights;
        double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
        for (double& w : weights) w /= sum;
      }
      double t = 0.0;
      while (true) {
        t += jump_stream.exponential() / cp.rate;
        if (t > horizon) break;
        int component = 0;
        if (d > 1) {
          double u = jump_stream.uniform();
          double acc = 0.0;
          for (int k = 0; k < d; ++k) {
            acc += weights[k];
            if (u <= acc || k == d - 1) {
              component = k;
              break;
            }
          }
        }
        double size = 0.0;
        if (const auto* uni = std::get_if<UniformSizes>(&cp.distribution)) {
          size = uni->lo + (uni->hi - uni->lo) * jump_stream.uniform();
        } else if (const auto* nor =
                       std::get_if<NormalSizes>(&cp.distribution)) {
          size = nor->stddev * jump_stream.gaussian();
        } else if (const auto* two =
                       std::get_if<TwoPointSizes>(&cp.distribution)) {
          size = jump_stream.uniform() < 0.5 ? -two->magnitude
                                             : two->magnitude;
        } else if (const auto* con =
                       std::get_if<ConstantSizes>(&cp.distribution)) {
          size = con->value;
        }
        if (std::fabs(size) < cp.truncation) continue;  // small jump dropped
        path.jumps.push_back({t, component, size});
      }
    }
  }

  std::stable_sort(path.jumps.begin(), path.jumps.end(),
                   [](const JumpEvent& a, const JumpEvent& b) {
                     if (a.time != b.time) return a.time < b.time;
                     return a.component < b.component;
                   });
  path.validate();
  return path;
}

}  // namespace levyham
