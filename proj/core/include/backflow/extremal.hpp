#pragma once

#include <Eigen/Dense>

#include "backflow/flux.hpp"
#include "backflow/lattice.hpp"
#include "backflow/numerics.hpp"

namespace backflow {

enum class Branch { Plus, Minus };

// Extreme instantaneous flux values lambda_minus <= J(j,t) <= lambda_plus
// attainable by any unit-norm positive-momentum state, in units of tau/hbar.
struct FluxBounds {
  double lambda_plus = 0.0;
  double lambda_minus = 0.0;
  MomentumWindow window;

  double value(Branch branch) const noexcept { return branch == Branch::Plus ? lambda_plus : lambda_minus; }
};

// (2 +/- pi) sqrt(1+eps^2) tau / (2 pi hbar).
FluxBounds infinite_bounds(const ChainParams& params);

// Closed-form optimal weight function at a single pseudo-momentum; its flux at
// (jprime, tprime) equals the branch bound.
Complex infinite_optimal_weight_at(const ChainParams& params, int jprime, double tprime, Branch branch,
                                   double k);

// The optimal weight function sampled on `rule`, which must lie inside the
// window [-xi, pi - xi].
WeightSamples infinite_optimal_weight(const ChainParams& params, int jprime, double tprime, Branch branch,
                                      const QuadratureRule& rule);

// Convenience overload: Gauss-Legendre rule with `nodes` points on the window.
WeightSamples infinite_optimal_weight(const ChainParams& params, int jprime, double tprime, Branch branch,
                                      int nodes);

// The 2x2 matrix whose eigenvalues are the ring bounds; rows act on the
// (sin, cos) projections of the optimal sequence. It does not depend on the
// evaluation point (j', t').
Eigen::Matrix2d ring_extremal_matrix(const ChainParams& params);

// Ring bounds for the full positive-momentum window. Throws WindowTooSmall
// when the window holds a single mode.
FluxBounds ring_bounds(const ChainParams& params);

// epsilon = 0 closed forms, separate from the general expression so each can
// check the other.
FluxBounds ring_bounds_unbiased(int sites, double tau = 1.0, double hbar = 1.0);

// Optimal ring sequence c_m for the requested branch at (jprime, tprime).
RingCoeffs ring_optimal_coeffs(const ChainParams& params, int jprime, double tprime, Branch branch);
RingCoeffs ring_optimal_coeffs_unbiased(int sites, int jprime, double tprime, Branch branch,
                                        double tau = 1.0, double hbar = 1.0);

}  // namespace backflow
