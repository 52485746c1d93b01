#pragma once

#include <numbers>
#include <optional>
#include <variant>

namespace backflow {

inline constexpr double kPi = std::numbers::pi;

struct Infinite {};
struct Ring {
  int sites = 0;
};
using Boundary = std::variant<Infinite, Ring>;

// Model parameters of a tight-binding chain with complex hopping
// -tau (1 +/- i epsilon). Immutable once validated.
class ChainParams {
 public:
  static ChainParams infinite(double epsilon, double tau = 1.0, double hbar = 1.0);
  static ChainParams ring(int sites, double epsilon, double tau = 1.0, double hbar = 1.0);

  double tau() const noexcept { return tau_; }
  double epsilon() const noexcept { return epsilon_; }
  double hbar() const noexcept { return hbar_; }
  const Boundary& boundary() const noexcept { return boundary_; }

  // Bias angle arctan(epsilon), in (-pi/2, pi/2).
  double xi() const noexcept { return xi_; }
  // sqrt(1 + epsilon^2): modulus of the complex hopping in units of tau.
  double hopping_modulus() const noexcept { return modulus_; }

  bool is_ring() const noexcept { return std::holds_alternative<Ring>(boundary_); }
  // Site count; throws InvalidParams on an infinite chain.
  int sites() const;

  ChainParams with_epsilon(double epsilon) const;

 private:
  ChainParams(Boundary boundary, double epsilon, double tau, double hbar);

  Boundary boundary_;
  double epsilon_;
  double tau_;
  double hbar_;
  double xi_;
  double modulus_;
};

// Closed interval [k_lo, k_hi] of pseudo-momenta with non-negative momentum.
struct ContinuousWindow {
  double k_lo = 0.0;
  double k_hi = 0.0;
  double width() const noexcept { return k_hi - k_lo; }
};

// Ring mode indices {eta1, ..., eta2}; mode n carries k = 2 pi n / N.
struct DiscreteWindow {
  int eta1 = 0;
  int eta2 = -1;
  int size() const noexcept { return eta2 - eta1 + 1; }
  bool contains(int n) const noexcept { return n >= eta1 && n <= eta2; }
};

using MomentumWindow = std::variant<ContinuousWindow, DiscreteWindow>;

// E_k = -2 tau sqrt(1+eps^2) cos(k + xi).
double dispersion(const ChainParams& params, double k) noexcept;

// Momentum eigenvalue in units of 2 dx mu tau / hbar: sqrt(1+eps^2) sin(k + xi).
double momentum_eigenvalue(const ChainParams& params, double k) noexcept;

// Pseudo-momentum of ring mode n.
double ring_momentum(int n, int sites) noexcept;

MomentumWindow positive_momentum_window(const ChainParams& params);
ContinuousWindow continuous_window(const ChainParams& params);
DiscreteWindow ring_window(const ChainParams& params);

}  // namespace backflow
