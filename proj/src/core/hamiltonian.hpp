#pragma once

#include <functional>
#include <string>
#include <vector>

#include "common.hpp"
#include "linalg.hpp"

namespace levyham {

/// Scalar field on phase space with analytic gradient (and optionally a
/// Hessian, needed only by the variational Jacobian propagator).
struct ScalarHamiltonian {
  std::function<double(const Vec&)> value;
  std::function<void(const Vec&, Vec&)> gradient;
  std::function<void(const Vec&, Matrix&)> hessian;  // may be empty
  std::string label;
};

/// Polynomial in the 2n canonical coordinates, used for user-configured
/// Hamiltonians. Differentiation is exact, so configured systems get
/// analytic gradients and Hessians for free.
struct PolynomialTerm {
  double coeff = 0.0;
  std::vector<int> exponents;  // one exponent per coordinate
};

class Polynomial {
 public:
  Polynomial(int vars, std::vector<PolynomialTerm> terms);
  double eval(const Vec& x) const;
  Polynomial derivative(int var) const;
  int vars() const { return vars_; }
  const std::vector<PolynomialTerm>& terms() const { return terms_; }

 private:
  int vars_;
  std::vector<PolynomialTerm> terms_;
};

ScalarHamiltonian hamiltonian_from_polynomial(const Polynomial& poly,
                                              const std::string& label);

/// A canonical-coordinate Hamiltonian system on R^{2n} with d noise
/// channels: H_0 drives the drift, H_1..H_d the noise. Construction
/// cross-checks every analytic gradient against central differences at
/// fixed probe points (relative tolerance 1e-6).
class HamiltonianSystem {
 public:
  HamiltonianSystem(int half_dim, int channels,
                    std::vector<ScalarHamiltonian> hamiltonians,
                    std::string name);

  int half_dim() const { return half_dim_; }
  int dim() const { return 2 * half_dim_; }
  int channels() const { return channels_; }
  const std::string& name() const { return name_; }

  /// k = 0 is H_0; k = 1..d are the noise Hamiltonians.
  const ScalarHamiltonian& hamiltonian(int k) const;
  bool has_hessians() const;

  /// V_k(x) = J grad H_k(x) = (dH_k/dp, -dH_k/dq).
  void vector_field(int k, const Vec& x, Vec& out) const;
  Vec vector_field(int k, const Vec& x) const;

  /// dV_k/dx = J Hess H_k; requires Hessians.
  void field_jacobian(int k, const Vec& x, Matrix& out) const;

 private:
  int half_dim_;
  int channels_;
  std::vector<ScalarHamiltonian> h_;
  std::string name_;
};

/// Canonical symplectic form u^T J v.
double symplectic_form(const Vec& u, const Vec& v);

/// {H_i, H_j}(x) with the convention {f, g} = sum(df/dq dg/dp - df/dp dg/dq),
/// so that {q_1, p_1} = 1 and {f, g} = omega^2(V_f, V_g).
double poisson_bracket(const HamiltonianSystem& sys, int i, int j,
                       const Vec& x);

struct IntegrabilityReport {
  double max_bracket_violation = 0.0;
  double min_singular_value = 0.0;  // over probes, of [V_1 ... V_d]
  int degenerate_probes = 0;        // probes where all fields nearly vanish
  bool pass = false;
  double tolerance = 0.0;
};

/// Evaluates |{H_i, H_j}| for all pairs 0 <= i < j <= d at each probe and
/// checks linear independence of the channel fields.
IntegrabilityReport check_integrability(const HamiltonianSystem& sys,
                                        const std::vector<Vec>& probes,
                                        double tol);

// Built-in catalog.

/// Example oscillator: H_0 = (q^2 + p^2)/2 with additive noise through
/// H_1 = -sigma q, i.e. V_1 = (0, sigma). The closed-form solution is
/// x(t) = x0 cos t + y0 sin t + sigma int sin(t-s) dL_s and the matching y.
HamiltonianSystem make_linear_oscillator(double sigma);

/// Integrable harmonic family on R^{2d}: H_1 = sum(p_i^2 + w_i^2 q_i^2)/2,
/// H_k = (p_k^2/w_k + w_k q_k^2)/2 for k >= 2, H_0 = 0.
HamiltonianSystem make_harmonic_family(const std::vector<double>& freqs);

/// Deterministic probe points in [-2, 2]^{2n} for validation checks.
std::vector<Vec> default_probe_points(int dim, int count,
                                      std::uint64_t seed = 0x9E1B);

}  // namespace levyham
