#include "backflow/flux.hpp"

#include <cmath>
#include <string>

#include "backflow/error.hpp"

namespace backflow {

namespace {

constexpr double kNormTol = 1e-8;
constexpr Complex kI{0.0, 1.0};

void require_ring(const ChainParams& params) {
  if (!params.is_ring()) throw Error(ErrorCode::InvalidParams, "operation needs a ring boundary");
}

void check_norm(double norm2) {
  if (!(std::abs(norm2 - 1.0) <= kNormTol)) {
    throw Error(ErrorCode::NormViolation, "state norm^2 = " + std::to_string(norm2));
  }
}

// Shared machinery of the flux double sum/integral. Both boundary conditions
// reduce to J(j,t) = P * sum_{l,i} conj(g_l) g_i sin((k_i + k_l)/2 + xi) with
// g_i = a_i e^{i((j - 1/2) k_i - E(k_i) t / hbar)}.
class FluxForm {
 public:
  FluxForm(const ChainParams& params, std::vector<double> momenta, std::vector<Complex> amplitudes,
           double prefactor)
      : params_(params),
        k_(std::move(momenta)),
        a_(std::move(amplitudes)),
        prefactor_(prefactor),
        energy_(k_.size()),
        kernel_(static_cast<Eigen::Index>(k_.size()), static_cast<Eigen::Index>(k_.size())),
        g_(static_cast<Eigen::Index>(k_.size())) {
    const auto n = static_cast<Eigen::Index>(k_.size());
    std::vector<double> su(k_.size());
    std::vector<double> cu(k_.size());
    for (std::size_t i = 0; i < k_.size(); ++i) {
      energy_[i] = dispersion(params_, k_[i]);
      const double u = 0.5 * (k_[i] + params_.xi());
      su[i] = std::sin(u);
      cu[i] = std::cos(u);
    }
    for (Eigen::Index l = 0; l < n; ++l) {
      for (Eigen::Index i = 0; i < n; ++i) {
        kernel_(l, i) = su[l] * cu[i] + cu[l] * su[i];
      }
    }
  }

  Complex operator()(int j, double t) {
    const double shift = static_cast<double>(j) - 0.5;
    const double rate = t / params_.hbar();
    for (std::size_t i = 0; i < k_.size(); ++i) {
      g_[static_cast<Eigen::Index>(i)] = a_[i] * std::exp(kI * (shift * k_[i] - energy_[i] * rate));
    }
    return prefactor_ * g_.dot(kernel_ * g_);
  }

 private:
  const ChainParams& params_;
  std::vector<double> k_;
  std::vector<Complex> a_;
  double prefactor_;
  std::vector<double> energy_;
  Eigen::MatrixXd kernel_;
  Eigen::VectorXcd g_;
};

FluxForm ring_form(const RingCoeffs& state, const ChainParams& params) {
  require_ring(params);
  check_norm(norm_squared(state));
  const int n = params.sites();
  std::vector<double> k(state.c.size());
  for (std::size_t i = 0; i < k.size(); ++i) {
    k[i] = ring_momentum(state.window.eta1 + static_cast<int>(i), n);
  }
  const double prefactor = 2.0 * params.tau() * params.hopping_modulus() / (n * params.hbar());
  return FluxForm(params, std::move(k), state.c, prefactor);
}

FluxForm infinite_form(const WeightSamples& state, const ChainParams& params) {
  if (params.is_ring()) throw Error(ErrorCode::InvalidParams, "operation needs an infinite chain");
  if (state.phi.size() != state.rule.size()) {
    throw Error(ErrorCode::InvalidParams, "weight samples do not match the quadrature rule");
  }
  check_norm(norm_squared(state));
  std::vector<Complex> a(state.phi.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = state.rule.weights[i] * state.phi[i];
  const double prefactor = params.tau() * params.hopping_modulus() / (kPi * params.hbar());
  return FluxForm(params, state.rule.nodes, std::move(a), prefactor);
}

}  // namespace

double norm_squared(const RingCoeffs& state) {
  double s = 0.0;
  for (const Complex& c : state.c) s += std::norm(c);
  return s;
}

double norm_squared(const WeightSamples& state) {
  double s = 0.0;
  for (std::size_t i = 0; i < state.phi.size(); ++i) s += state.rule.weights[i] * std::norm(state.phi[i]);
  return s;
}

double site_flux(Complex psi_left, Complex psi_here, const ChainParams& params) noexcept {
  const Complex z = std::conj(psi_left) * psi_here;
  return 2.0 * params.tau() / params.hbar() * (z.imag() + params.epsilon() * z.real());
}

Complex ring_amplitude(const RingCoeffs& state, const ChainParams& params, int j, double t) {
  require_ring(params);
  const int n = params.sites();
  Complex psi{};
  for (std::size_t i = 0; i < state.c.size(); ++i) {
    const double k = ring_momentum(state.window.eta1 + static_cast<int>(i), n);
    psi += state.c[i] * std::exp(kI * (k * j - dispersion(params, k) * t / params.hbar()));
  }
  return psi / std::sqrt(static_cast<double>(n));
}

double continuity_residual(const RingCoeffs& state, const ChainParams& params, int j, double t) {
  return continuity_residual(state, params, j, t, site_flux);
}

double continuity_residual(const RingCoeffs& state, const ChainParams& params, int j, double t,
                           const SiteFluxFn& flux) {
  require_ring(params);
  const int n = params.sites();
  Complex psi{};
  Complex dpsi{};
  for (std::size_t i = 0; i < state.c.size(); ++i) {
    const double k = ring_momentum(state.window.eta1 + static_cast<int>(i), n);
    const double e = dispersion(params, k);
    const Complex term = state.c[i] * std::exp(kI * (k * j - e * t / params.hbar()));
    psi += term;
    dpsi += -kI * (e / params.hbar()) * term;
  }
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  psi *= inv_sqrt_n;
  dpsi *= inv_sqrt_n;
  const double density_rate = 2.0 * std::real(std::conj(psi) * dpsi);

  const Complex left = ring_amplitude(state, params, j - 1, t);
  const Complex right = ring_amplitude(state, params, j + 1, t);
  const double in_flux = flux(left, psi, params);
  const double out_flux = flux(psi, right, params);
  return std::abs(density_rate + out_flux - in_flux);
}

TwoStateCoefficients two_state_coefficients(const ChainParams& params, int m1, int m2) {
  require_ring(params);
  const DiscreteWindow window = ring_window(params);
  if (!window.contains(m1) || !window.contains(m2)) {
    throw Error(ErrorCode::InvalidParams, "modes must lie in the positive-momentum window");
  }
  if (m1 == m2) throw Error(ErrorCode::SameMode, "two-state superposition needs m1 != m2");
  const double n = params.sites();
  const double diff = (m1 - m2) * kPi / n;
  const double mean = (m1 + m2) * kPi / n + params.xi();
  TwoStateCoefficients out;
  out.a = std::cos(diff) * std::sin(mean);
  out.b = std::sin(diff) * std::cos(mean);
  out.c = std::sin(mean);
  out.prefactor = 2.0 * params.tau() * params.hopping_modulus() / (n * params.hbar());
  return out;
}

double two_state_flux(const ChainParams& params, int m1, int m2, double theta, double gamma, int j,
                      double t) {
  const TwoStateCoefficients co = two_state_coefficients(params, m1, m2);
  const double n = params.sites();
  const double e1 = dispersion(params, ring_momentum(m1, params.sites()));
  const double e2 = dispersion(params, ring_momentum(m2, params.sites()));
  const double phase = (2.0 * j - 1.0) * (m1 - m2) * kPi / n - (e1 - e2) * t / params.hbar() - gamma;
  return co.prefactor * (co.a + std::cos(theta) * co.b + std::cos(phase) * co.c * std::sin(theta));
}

TwoStateMinimum two_state_min(const ChainParams& params, int m1, int m2) {
  const TwoStateCoefficients co = two_state_coefficients(params, m1, m2);
  auto profile = [&](double theta) { return co.a + co.b * std::cos(theta) - co.c * std::sin(theta); };

  // tan(theta) = -c/b has its roots pi apart; keep those inside [0, pi] and
  // pick the smaller profile value.
  double root = std::atan(-co.c / co.b);
  if (root < 0.0) root += kPi;
  double theta_star = root;
  for (double candidate : {root - kPi, root + kPi}) {
    if (candidate >= 0.0 && candidate <= kPi && profile(candidate) < profile(theta_star)) {
      theta_star = candidate;
    }
  }
  TwoStateMinimum out;
  out.theta_star = theta_star;
  out.j_min = co.prefactor * (co.a - std::hypot(co.b, co.c));
  return out;
}

Eigen::MatrixXcd ring_flux_matrix(const ChainParams& params, int j, double t) {
  require_ring(params);
  const DiscreteWindow window = ring_window(params);
  const int n = params.sites();
  const double prefactor = 2.0 * params.tau() * params.hopping_modulus() / (n * params.hbar());
  const Eigen::Index size = window.size();
  Eigen::VectorXcd phase(size);
  std::vector<double> k(static_cast<std::size_t>(size));
  for (Eigen::Index i = 0; i < size; ++i) {
    k[i] = ring_momentum(window.eta1 + static_cast<int>(i), n);
    phase[i] = std::exp(kI * ((j - 0.5) * k[i] - dispersion(params, k[i]) * t / params.hbar()));
  }
  Eigen::MatrixXcd h(size, size);
  for (Eigen::Index m = 0; m < size; ++m) {
    for (Eigen::Index i = 0; i < size; ++i) {
      h(m, i) = prefactor * std::conj(phase[m]) * phase[i] * std::sin(0.5 * (k[m] + k[i]) + params.xi());
    }
  }
  return h;
}

Complex general_flux_ring_complex(const RingCoeffs& state, const ChainParams& params, int j, double t) {
  FluxForm form = ring_form(state, params);
  return form(j, t);
}

double general_flux_ring(const RingCoeffs& state, const ChainParams& params, int j, double t) {
  return general_flux_ring_complex(state, params, j, t).real();
}

Complex general_flux_infinite_complex(const WeightSamples& state, const ChainParams& params, int j,
                                      double t) {
  FluxForm form = infinite_form(state, params);
  return form(j, t);
}

double general_flux_infinite(const WeightSamples& state, const ChainParams& params, int j, double t) {
  return general_flux_infinite_complex(state, params, j, t).real();
}

FluxSeries flux_series(const PositiveMomentumState& state, const ChainParams& params, int j,
                       const std::vector<double>& times) {
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) {
      throw Error(ErrorCode::InvalidParams, "flux series times must be strictly increasing");
    }
  }
  FluxForm form = std::holds_alternative<RingCoeffs>(state)
                      ? ring_form(std::get<RingCoeffs>(state), params)
                      : infinite_form(std::get<WeightSamples>(state), params);
  FluxSeries series;
  series.site = j;
  series.samples.reserve(times.size());
  for (double t : times) series.samples.push_back({t, form(j, t).real()});
  return series;
}

}  // namespace backflow
