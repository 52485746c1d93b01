#pragma once

#include <complex>
#include <functional>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "backflow/lattice.hpp"
#include "backflow/numerics.hpp"

namespace backflow {

using Complex = std::complex<double>;

// Ring superposition sum_n c_n e^{i(2 pi n j/N - E_n t/hbar)} / sqrt(N);
// c[i] is the coefficient of mode eta1 + i.
struct RingCoeffs {
  DiscreteWindow window;
  std::vector<Complex> c;

  Complex at(int n) const { return c.at(static_cast<std::size_t>(n - window.eta1)); }
};

// Weight function phi(k) sampled on a quadrature rule covering the window of
// an infinite chain; the state is int e^{i(kj - E_k t/hbar)} phi(k) dk / sqrt(2 pi).
struct WeightSamples {
  ContinuousWindow window;
  QuadratureRule rule;
  std::vector<Complex> phi;
};

using PositiveMomentumState = std::variant<RingCoeffs, WeightSamples>;

double norm_squared(const RingCoeffs& state);
double norm_squared(const WeightSamples& state);

struct FluxSample {
  double t = 0.0;
  double flux = 0.0;
};

struct FluxSeries {
  int site = 0;
  std::vector<FluxSample> samples;
};

// Probability flux from site j-1 to j: (2 tau/hbar) (Im z + eps Re z) with
// z = conj(psi_left) psi_here.
double site_flux(Complex psi_left, Complex psi_here, const ChainParams& params) noexcept;

using SiteFluxFn = std::function<double(Complex, Complex, const ChainParams&)>;

// Psi(j, t) of a ring superposition.
Complex ring_amplitude(const RingCoeffs& state, const ChainParams& params, int j, double t);

// |d|Psi(j,t)|^2/dt + J(j+1,t) - J(j,t)| with the time derivative taken
// analytically from the eigenbasis expansion.
double continuity_residual(const RingCoeffs& state, const ChainParams& params, int j, double t);
double continuity_residual(const RingCoeffs& state, const ChainParams& params, int j, double t,
                           const SiteFluxFn& flux);

// Closed-form flux of cos(theta/2)|m1> + e^{i gamma} sin(theta/2)|m2>.
double two_state_flux(const ChainParams& params, int m1, int m2, double theta, double gamma, int j,
                      double t);

struct TwoStateCoefficients {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double prefactor = 0.0;  // 2 tau sqrt(1+eps^2) / (N hbar)
};

TwoStateCoefficients two_state_coefficients(const ChainParams& params, int m1, int m2);

struct TwoStateMinimum {
  double j_min = 0.0;
  double theta_star = 0.0;
};

// Global minimum over (theta, gamma, j, t) of the two-state flux.
TwoStateMinimum two_state_min(const ChainParams& params, int m1, int m2);

// Hermitian matrix H with J(j,t) = c^dagger H c for ring coefficients c over
// the positive-momentum window.
Eigen::MatrixXcd ring_flux_matrix(const ChainParams& params, int j, double t);

// Double-sum flux of a ring superposition; the complex variant returns the sum
// before the (round-off sized) imaginary part is dropped.
Complex general_flux_ring_complex(const RingCoeffs& state, const ChainParams& params, int j, double t);
double general_flux_ring(const RingCoeffs& state, const ChainParams& params, int j, double t);

// Double-integral flux of an infinite-chain superposition, evaluated with the
// quadrature rule the samples live on.
Complex general_flux_infinite_complex(const WeightSamples& state, const ChainParams& params, int j,
                                      double t);
double general_flux_infinite(const WeightSamples& state, const ChainParams& params, int j, double t);

// Flux at a fixed site for many times, reusing the state-dependent pieces.
FluxSeries flux_series(const PositiveMomentumState& state, const ChainParams& params, int j,
                       const std::vector<double>& times);

}  // namespace backflow
