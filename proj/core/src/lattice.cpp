#include "backflow/lattice.hpp"

#include <cmath>
#include <string>

#include "backflow/error.hpp"

namespace backflow {

namespace {

// Window edges are zero-momentum states; floor/ceil arguments that land on an
// integer up to rounding must resolve to that integer.
constexpr double kEdgeSnap = 1e-9;

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorCode::InvalidParams, message);
}

}  // namespace

ChainParams::ChainParams(Boundary boundary, double epsilon, double tau, double hbar)
    : boundary_(boundary),
      epsilon_(epsilon),
      tau_(tau),
      hbar_(hbar),
      xi_(std::atan(epsilon)),
      modulus_(std::sqrt(1.0 + epsilon * epsilon)) {
  require(std::isfinite(epsilon), "epsilon must be finite");
  require(std::isfinite(tau) && tau > 0.0, "tau must be positive");
  require(std::isfinite(hbar) && hbar > 0.0, "hbar must be positive");
  if (const auto* ring = std::get_if<Ring>(&boundary_)) {
    require(ring->sites >= 3, "ring needs at least 3 sites, got " + std::to_string(ring->sites));
  }
}

ChainParams ChainParams::infinite(double epsilon, double tau, double hbar) {
  return ChainParams(Infinite{}, epsilon, tau, hbar);
}

ChainParams ChainParams::ring(int sites, double epsilon, double tau, double hbar) {
  return ChainParams(Ring{sites}, epsilon, tau, hbar);
}

int ChainParams::sites() const {
  if (const auto* ring = std::get_if<Ring>(&boundary_)) return ring->sites;
  throw Error(ErrorCode::InvalidParams, "infinite chain has no site count");
}

ChainParams ChainParams::with_epsilon(double epsilon) const {
  return ChainParams(boundary_, epsilon, tau_, hbar_);
}

double dispersion(const ChainParams& params, double k) noexcept {
  return -2.0 * params.tau() * params.hopping_modulus() * std::cos(k + params.xi());
}

double momentum_eigenvalue(const ChainParams& params, double k) noexcept {
  return params.hopping_modulus() * std::sin(k + params.xi());
}

double ring_momentum(int n, int sites) noexcept {
  return 2.0 * kPi * static_cast<double>(n) / static_cast<double>(sites);
}

ContinuousWindow continuous_window(const ChainParams& params) {
  if (params.is_ring()) throw Error(ErrorCode::InvalidParams, "continuous window requested for a ring");
  return {-params.xi(), kPi - params.xi()};
}

DiscreteWindow ring_window(const ChainParams& params) {
  const int n = params.sites();
  if (params.epsilon() == 0.0) {
    // Both k = 0 and k = pi carry zero momentum; keep only k = 0.
    return {0, n % 2 == 0 ? n / 2 - 1 : (n - 1) / 2};
  }
  const double scale = static_cast<double>(n) / (2.0 * kPi);
  const int eta1 = static_cast<int>(std::ceil(-params.xi() * scale - kEdgeSnap));
  const int eta2 = static_cast<int>(std::floor((kPi - params.xi()) * scale + kEdgeSnap));
  return {eta1, eta2};
}

MomentumWindow positive_momentum_window(const ChainParams& params) {
  if (params.is_ring()) return ring_window(params);
  return continuous_window(params);
}

}  // namespace backflow
