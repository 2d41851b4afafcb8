#include "hamiltonian.hpp"

#include <cmath>

#include "rng.hpp"

namespace levyham {

Polynomial::Polynomial(int vars, std::vector<PolynomialTerm> terms)
    : vars_(vars), terms_(std::move(terms)) {
  for (const auto& t : terms_) {
    if (static_cast<int>(t.exponents.size()) != vars_)
      throw ValidationError("polynomial term: exponent multi-index length");
    for (int e : t.exponents)
      if (e < 0) throw ValidationError("polynomial term: negative exponent");
  }
}

double Polynomial::eval(const Vec& x) const {
  double total = 0.0;
  for (const auto& t : terms_) {
    double v = t.coeff;
    for (int i = 0; i < vars_; ++i)
      for (int e = 0; e < t.exponents[i]; ++e) v *= x[i];
    total += v;
  }
  return total;
}

Polynomial Polynomial::derivative(int var) const {
  std::vector<PolynomialTerm> out;
  for (const auto& t : terms_) {
    if (t.exponents[var] == 0) continue;
    PolynomialTerm d = t;
    d.coeff *= t.exponents[var];
    d.exponents[var] -= 1;
    out.push_back(std::move(d));
  }
  return Polynomial(vars_, std::move(out));
}

ScalarHamiltonian hamiltonian_from_polynomial(const Polynomial& poly,
                                              const std::string& label) {
  const int vars = poly.vars();
  std::vector<Polynomial> grads;
  std::vector<Polynomial> hess;
  grads.reserve(vars);
  for (int i = 0; i < vars; ++i) grads.push_back(poly.derivative(i));
  for (int i = 0; i < vars; ++i)
    for (int j = 0; j < vars; ++j) hess.push_back(grads[i].derivative(j));

  ScalarHamiltonian h;
  h.label = label;
  h.value = [poly](const Vec& x) { return poly.eval(x); };
  h.gradient = [grads, vars](const Vec& x, Vec& out) {
    out.resize(vars);
    for (int i = 0; i < vars; ++i) out[i] = grads[i].eval(x);
  };
  h.hessian = [hess, vars](const Vec& x, Matrix& out) {
    out = Matrix(vars, vars);
    for (int i = 0; i < vars; ++i)
      for (int j = 0; j < vars; ++j) out(i, j) = hess[i * vars + j].eval(x);
  };
  return h;
}

namespace {

void check_gradient_consistency(const ScalarHamiltonian& h, int dim,
                                const std::string& context) {
  const auto probes = default_probe_points(dim, 6);
  const double fd_step = 1e-5;
  Vec analytic(dim);
  Vec xp, xm;
  for (const auto& x : probes) {
    h.gradient(x, analytic);
    if (static_cast<int>(analytic.size()) != dim)
      throw ValidationError(context + ": gradient has wrong length");
    for (int i = 0; i < dim; ++i) {
      xp = x;
      xm = x;
      xp[i] += fd_step;
      xm[i] -= fd_step;
      const double fd = (h.value(xp) - h.value(xm)) / (2.0 * fd_step);
      const double scale = 1.0 + std::fabs(fd);
      if (std::fabs(analytic[i] - fd) > 1e-6 * scale)
        throw ValidationError(
            context + ": analytic gradient disagrees with finite differences"
                      " (component " + std::to_string(i) + ", analytic " +
            format_double(analytic[i]) + ", fd " + format_double(fd) + ")");
    }
  }
}

}  // namespace

HamiltonianSystem::HamiltonianSystem(
    int half_dim, int channels, std::vector<ScalarHamiltonian> hamiltonians,
    std::string name)
    : half_dim_(half_dim),
      channels_(channels),
      h_(std::move(hamiltonians)),
      name_(std::move(name)) {
  if (half_dim_ <= 0) throw ValidationError("system: half_dim must be >= 1");
  if (channels_ < 0) throw ValidationError("system: channels must be >= 0");
  if (static_cast<int>(h_.size()) != channels_ + 1)
    throw ValidationError("system: expected H_0..H_d (" +
                          std::to_string(channels_ + 1) + " Hamiltonians)");
  for (int k = 0; k <= channels_; ++k) {
    if (!h_[k].value || !h_[k].gradient)
      throw ValidationError("system: Hamiltonian " + std::to_string(k) +
                            " missing value or gradient");
    check_gradient_consistency(h_[k], dim(),
                               name_ + " H_" + std::to_string(k));
  }
}

const ScalarHamiltonian& HamiltonianSystem::hamiltonian(int k) const {
  if (k < 0 || k > channels_)
    throw std::out_of_range("hamiltonian index out of range");
  return h_[k];
}

bool HamiltonianSystem::has_hessians() const {
  for (const auto& h : h_)
    if (!h.hessian) return false;
  return true;
}

void HamiltonianSystem::vector_field(int k, const Vec& x, Vec& out) const {
  Vec grad;
  hamiltonian(k).gradient(x, grad);
  apply_canonical_j(grad, out);
}

Vec HamiltonianSystem::vector_field(int k, const Vec& x) const {
  Vec out;
  vector_field(k, x, out);
  return out;
}

void HamiltonianSystem::field_jacobian(int k, const Vec& x,
                                       Matrix& out) const {
  const ScalarHamiltonian& h = hamiltonian(k);
  if (!h.hessian)
    throw ValidationError("field_jacobian: Hamiltonian " + std::to_string(k) +
                          " has no Hessian");
  Matrix hess;
  h.hessian(x, hess);
  const int n = half_dim_;
  out = Matrix(2 * n, 2 * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < 2 * n; ++j) {
      out(i, j) = hess(n + i, j);
      out(n + i, j) = -hess(i, j);
    }
}

double symplectic_form(const Vec& u, const Vec& v) {
  if (u.size() != v.size() || u.size() % 2 != 0)
    throw ValidationError("symplectic_form: need equal even-length vectors");
  const std::size_t n = u.size() / 2;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    s += u[i] * v[n + i] - u[n + i] * v[i];
  return s;
}

double poisson_bracket(const HamiltonianSystem& sys, int i, int j,
                       const Vec& x) {
  Vec gi(sys.dim()), gj(sys.dim());
  sys.hamiltonian(i).gradient(x, gi);
  sys.hamiltonian(j).gradient(x, gj);
  const int n = sys.half_dim();
  double s = 0.0;
  for (int l = 0; l < n; ++l)
    s += gi[l] * gj[n + l] - gi[n + l] * gj[l];
  return s;
}

IntegrabilityReport check_integrability(const HamiltonianSystem& sys,
                                        const std::vector<Vec>& probes,
                                        double tol) {
  if (probes.empty())
    throw std::invalid_argument("check_integrability: no probe points");
  IntegrabilityReport report;
  report.tolerance = tol;
  report.min_singular_value = std::numeric_limits<double>::infinity();

  const int d = sys.channels();
  Vec field;
  for (const auto& x : probes) {
    for (int i = 0; i <= d; ++i)
      for (int j = i + 1; j <= d; ++j)
        report.max_bracket_violation =
            std::max(report.max_bracket_violation,
                     std::fabs(poisson_bracket(sys, i, j, x)));

    Matrix fields(sys.dim(), d);
    double scale = 0.0;
    for (int k = 1; k <= d; ++k) {
      sys.vector_field(k, x, field);
      for (int r = 0; r < sys.dim(); ++r) fields(r, k - 1) = field[r];
      for (double v : field) scale = std::max(scale, std::fabs(v));
    }
    if (scale < 1e-12) {
      ++report.degenerate_probes;
      continue;
    }
    const Vec sv = singular_values(fields);
    report.min_singular_value = std::min(report.min_singular_value, sv.front());
  }

  report.pass = report.max_bracket_violation <= tol;
  return report;
}

HamiltonianSystem make_linear_oscillator(double sigma) {
  std::vector<PolynomialTerm> h0_terms = {{0.5, {2, 0}}, {0.5, {0, 2}}};
  std::vector<PolynomialTerm> h1_terms = {{-sigma, {1, 0}}};
  std::vector<ScalarHamiltonian> h;
  h.push_back(hamiltonian_from_polynomial(Polynomial(2, h0_terms), "H0"));
  h.push_back(hamiltonian_from_polynomial(Polynomial(2, h1_terms), "H1"));
  return HamiltonianSystem(1, 1, std::move(h), "linear-oscillator");
}

HamiltonianSystem make_harmonic_family(const std::vector<double>& freqs) {
  const int d = static_cast<int>(freqs.size());
  if (d < 1) throw ValidationError("harmonic family: need >= 1 frequency");
  for (double w : freqs)
    if (w <= 0.0) throw ValidationError("harmonic family: frequencies > 0");

  const int vars = 2 * d;
  auto exponent = [&](int var, int power) {
    std::vector<int> e(vars, 0);
    e[var] = power;
    return e;
  };

  std::vector<ScalarHamiltonian> h;
  h.push_back(hamiltonian_from_polynomial(Polynomial(vars, {}), "H0"));

  std::vector<PolynomialTerm> h1_terms;
  for (int i = 0; i < d; ++i) {
    h1_terms.push_back({0.5, exponent(d + i, 2)});
    h1_terms.push_back({0.5 * freqs[i] * freqs[i], exponent(i, 2)});
  }
  h.push_back(hamiltonian_from_polynomial(Polynomial(vars, h1_terms), "H1"));

  for (int k = 2; k <= d; ++k) {
    const int i = k - 1;
    std::vector<PolynomialTerm> terms = {
        {0.5 / freqs[i], exponent(d + i, 2)},
        {0.5 * freqs[i], exponent(i, 2)}};
    h.push_back(hamiltonian_from_polynomial(Polynomial(vars, terms),
                                            "H" + std::to_string(k)));
  }
  return HamiltonianSystem(d, d, std::move(h), "harmonic-family");
}

std::vector<Vec> default_probe_points(int dim, int count,
                                      std::uint64_t seed) {
  RandomStream stream(StreamId{seed, 0}, 7);
  std::vector<Vec> probes(count, Vec(dim));
  for (auto& p : probes)
    for (double& x : p) x = 4.0 * stream.uniform() - 2.0;
  return probes;
}

}  // namespace levyham
