#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "backflow/flux.hpp"
#include "backflow/lattice.hpp"
#include "backflow/numerics.hpp"

namespace backflow {

// Maximal backward probability through a point of the continuous free line.
inline constexpr double kBrackenMelloyConstant = 0.0384517;
// The same quantity for the continuous ring.
inline constexpr double kRingContinuumConstant = 0.11681564947322964;

inline constexpr int kDefaultNodes = 400;

// Integrated backflow -int_{-T/2}^{T/2} J(0,t) dt with nu = tau T / hbar.
struct BMProblem {
  ChainParams params;
  double nu = 1.0;
  int nodes = kDefaultNodes;  // quadrature size; ignored for rings

  void validate() const;
};

struct EigenSolution {
  double lambda = 0.0;
  double residual = 0.0;
  // WeightSamples for the infinite chain (phi on the quadrature nodes) or
  // RingCoeffs (c_n) for the ring, unit-normalized in either case.
  PositiveMomentumState state;
};

// -sin(2 nu sqrt(1+eps^2) sin((k+k')/2 + xi) sin((k-k')/2)) / (2 sin((k-k')/2)),
// continued analytically onto the diagonal.
double kernel_infinite(const ChainParams& params, double nu, double k, double kp);

// Ring counterpart over mode indices m, n.
double kernel_ring(const ChainParams& params, double nu, int m, int n);

// Symmetrized Nystrom matrix (1/pi) sqrt(w_i w_j) K(k_i, k_j).
Eigen::MatrixXd nystrom_matrix(const ChainParams& params, double nu, const QuadratureRule& rule);
Eigen::MatrixXd ring_backflow_matrix(const ChainParams& params, double nu);

EigenSolution lambda_p_infinite(const ChainParams& params, double nu, int nodes = kDefaultNodes);
EigenSolution lambda_p_ring(const ChainParams& params, double nu);
EigenSolution lambda_p(const BMProblem& problem);

struct NuMaximum {
  double nu_star = 0.0;
  double lambda_star = 0.0;
};

struct ScanOptions {
  int coarse_steps = 200;
  double refine_tol = 1e-6;
  unsigned threads = 1;
};

// Coarse scan of `family` over [lo, hi] (log-spaced when lo > 0, linear
// otherwise) followed by golden-section refinement between the neighbours of
// the best grid point. Throws NoInteriorMax when that point is a range edge.
NuMaximum maximize_over_nu(const std::function<double(double)>& family, double lo, double hi,
                           const ScanOptions& options = {});

// Refinement step of maximize_over_nu on precomputed samples values[i] = family(grid[i]).
NuMaximum maximize_on_grid(const std::function<double(double)>& family, std::span<const double> grid,
                           std::span<const double> values, double refine_tol = 1e-6);

// Default nu scan range: [0.1, 200] for the infinite chain and
// [0.1, 10 N^2 / pi^2] for a ring.
std::pair<double, double> default_nu_range(const ChainParams& params);

// Peak of lambda_p(nu) for the given chain over its default range.
NuMaximum backflow_peak(const ChainParams& params, int nodes = kDefaultNodes, const ScanOptions& options = {});

struct BMCurvePoint {
  double nu = 0.0;
  double lambda_p = 0.0;
};

struct BMCurve {
  std::vector<BMCurvePoint> points;
  double epsilon = 0.0;
  bool ring = false;
  int sites = 0;
  int nodes = 0;
};

BMCurve bm_curve(const ChainParams& params, std::span<const double> nus, int nodes = kDefaultNodes,
                 unsigned threads = 1);

struct ScalingRow {
  int sites = 0;
  double c_tb = 0.0;
  double nu_star = 0.0;
};

struct ScalingStudy {
  PowerLawFit gap_fit;  // c_tb - kRingContinuumConstant against N
  PowerLawFit nu_fit;   // nu_star against N
  std::vector<ScalingRow> table;

  double exponent_gap() const noexcept { return gap_fit.exponent; }
  double exponent_nu() const noexcept { return nu_fit.exponent; }
};

std::vector<int> default_scaling_sites();

ScalingStudy ring_scaling_study(std::span<const int> sites, double epsilon = 0.0, const ScanOptions& options = {});

struct BMFluxTrace {
  FluxSeries series;              // J(0, t) over the requested times
  double integrated_backflow = 0.0;  // -int J dt over [-T/2, T/2], Simpson on its own grid
};

BMFluxTrace bm_flux_trace(const EigenSolution& solution, const BMProblem& problem,
                          const std::vector<double>& times);

}  // namespace backflow
