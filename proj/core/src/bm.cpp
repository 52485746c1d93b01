#include "backflow/bm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "backflow/error.hpp"
#include "backflow/parallel.hpp"

namespace backflow {

namespace {

constexpr Complex kI{0.0, 1.0};

// sin(x)/x without the 0/0 at the origin.
double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

void require_nu(double nu) {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw Error(ErrorCode::InvalidParams, "nu must be positive");
}

// Fix the eigenvector sign so repeated solves agree bit for bit.
void canonical_sign(Eigen::VectorXd& v) {
  Eigen::Index pivot = 0;
  v.cwiseAbs().maxCoeff(&pivot);
  if (v[pivot] < 0.0) v = -v;
}

}  // namespace

void BMProblem::validate() const {
  require_nu(nu);
  if (!params.is_ring() && nodes < 8) throw Error(ErrorCode::InvalidParams, "quadrature needs at least 8 nodes");
}

double kernel_infinite(const ChainParams& params, double nu, double k, double kp) {
  const double amplitude = 2.0 * nu * params.hopping_modulus() * std::sin(0.5 * (k + kp) + params.xi());
  const double half_gap = std::sin(0.5 * (k - kp));
  return -0.5 * amplitude * sinc(amplitude * half_gap);
}

double kernel_ring(const ChainParams& params, double nu, int m, int n) {
  const double sites = params.sites();
  const double strength = 2.0 * nu * params.hopping_modulus();
  if (m == n) {
    return -strength * std::sin(2.0 * n * kPi / sites + params.xi()) / sites;
  }
  const double gap = std::sin((m - n) * kPi / sites);
  const double mean = std::sin((m + n) * kPi / sites + params.xi());
  return -std::sin(strength * mean * gap) / (sites * gap);
}

Eigen::MatrixXd nystrom_matrix(const ChainParams& params, double nu, const QuadratureRule& rule) {
  require_nu(nu);
  const auto n = static_cast<Eigen::Index>(rule.size());
  Eigen::VectorXd root_w(n);
  for (Eigen::Index i = 0; i < n; ++i) root_w[i] = std::sqrt(rule.weights[i]);
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double value = root_w[i] * root_w[j] * kernel_infinite(params, nu, rule.nodes[i], rule.nodes[j]) / kPi;
      m(i, j) = value;
      m(j, i) = value;
    }
  }
  return m;
}

Eigen::MatrixXd ring_backflow_matrix(const ChainParams& params, double nu) {
  require_nu(nu);
  const DiscreteWindow window = ring_window(params);
  const Eigen::Index size = window.size();
  Eigen::MatrixXd m(size, size);
  for (Eigen::Index i = 0; i < size; ++i) {
    for (Eigen::Index j = i; j < size; ++j) {
      const double value = kernel_ring(params, nu, window.eta1 + static_cast<int>(i),
                                       window.eta1 + static_cast<int>(j));
      m(i, j) = value;
      m(j, i) = value;
    }
  }
  return m;
}

EigenSolution lambda_p_infinite(const ChainParams& params, double nu, int nodes) {
  BMProblem{params, nu, nodes}.validate();
  const ContinuousWindow window = continuous_window(params);
  QuadratureRule rule = gauss_legendre(nodes, window.k_lo, window.k_hi);
  EigenPair top = largest_eigenpair(nystrom_matrix(params, nu, rule));
  canonical_sign(top.vector);

  WeightSamples samples{window, std::move(rule), {}};
  samples.phi.resize(samples.rule.size());
  for (std::size_t i = 0; i < samples.phi.size(); ++i) {
    const double k = samples.rule.nodes[i];
    // Phi(k) = v / sqrt(w); phi(k) = e^{ik/2} Phi(k).
    const double big_phi = top.vector[static_cast<Eigen::Index>(i)] / std::sqrt(samples.rule.weights[i]);
    samples.phi[i] = std::exp(0.5 * kI * k) * big_phi;
  }
  return {top.value, top.residual, std::move(samples)};
}

EigenSolution lambda_p_ring(const ChainParams& params, double nu) {
  if (!params.is_ring()) throw Error(ErrorCode::InvalidParams, "ring eigenproblem needs a ring boundary");
  EigenPair top = largest_eigenpair(ring_backflow_matrix(params, nu));
  canonical_sign(top.vector);

  const DiscreteWindow window = ring_window(params);
  RingCoeffs coeffs{window, {}};
  coeffs.c.reserve(static_cast<std::size_t>(window.size()));
  for (int i = 0; i < window.size(); ++i) {
    const int n = window.eta1 + i;
    // C_n = e^{-i n pi / N} c_n.
    coeffs.c.push_back(std::exp(kI * (n * kPi / params.sites())) * top.vector[i]);
  }
  return {top.value, top.residual, std::move(coeffs)};
}

EigenSolution lambda_p(const BMProblem& problem) {
  problem.validate();
  return problem.params.is_ring() ? lambda_p_ring(problem.params, problem.nu)
                                  : lambda_p_infinite(problem.params, problem.nu, problem.nodes);
}

NuMaximum maximize_on_grid(const std::function<double(double)>& family, std::span<const double> grid,
                           std::span<const double> values, double refine_tol) {
  if (grid.size() != values.size() || grid.size() < 3) {
    throw Error(ErrorCode::InvalidParams, "peak search needs at least 3 matching grid values");
  }
  if (!(refine_tol > 0.0)) throw Error(ErrorCode::InvalidParams, "refine tolerance must be positive");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw Error(ErrorCode::InvalidParams, "nu grid must be strictly increasing");
  }
  const auto best = static_cast<std::size_t>(std::distance(values.begin(), std::max_element(values.begin(), values.end())));
  if (best == 0 || best + 1 == grid.size()) {
    throw Error(ErrorCode::NoInteriorMax, "maximum at the edge of the nu range; widen it");
  }
  const Maximum refined = golden_section_max(family, grid[best - 1], grid[best + 1], refine_tol);
  if (refined.value >= values[best]) return {refined.x, refined.value};
  return {grid[best], values[best]};
}

NuMaximum maximize_over_nu(const std::function<double(double)>& family, double lo, double hi,
                           const ScanOptions& options) {
  if (!(lo >= 0.0) || !(lo < hi)) throw Error(ErrorCode::InvalidParams, "nu range must satisfy 0 <= lo < hi");
  if (options.coarse_steps < 16) throw Error(ErrorCode::InvalidParams, "coarse scan needs at least 16 steps");

  const std::vector<double> grid =
      lo > 0.0 ? logspace(lo, hi, options.coarse_steps) : linspace(lo, hi, options.coarse_steps);
  const std::vector<double> values =
      parallel_map(grid.size(), options.threads, [&](std::size_t i) { return family(grid[i]); });
  return maximize_on_grid(family, grid, values, options.refine_tol);
}

std::pair<double, double> default_nu_range(const ChainParams& params) {
  if (!params.is_ring()) return {0.1, 200.0};
  const double n = params.sites();
  return {0.1, 10.0 * n * n / (kPi * kPi)};
}

NuMaximum backflow_peak(const ChainParams& params, int nodes, const ScanOptions& options) {
  const auto [lo, hi] = default_nu_range(params);
  auto family = [&](double nu) { return lambda_p(BMProblem{params, nu, nodes}).lambda; };
  return maximize_over_nu(family, lo, hi, options);
}

BMCurve bm_curve(const ChainParams& params, std::span<const double> nus, int nodes, unsigned threads) {
  for (std::size_t i = 1; i < nus.size(); ++i) {
    if (!(nus[i] > nus[i - 1])) throw Error(ErrorCode::InvalidParams, "nu grid must be strictly increasing");
  }
  BMCurve curve;
  curve.epsilon = params.epsilon();
  curve.ring = params.is_ring();
  curve.sites = params.is_ring() ? params.sites() : 0;
  curve.nodes = params.is_ring() ? 0 : nodes;
  const std::vector<double> lambdas = parallel_map(
      nus.size(), threads, [&](std::size_t i) { return lambda_p(BMProblem{params, nus[i], nodes}).lambda; });
  curve.points.reserve(nus.size());
  for (std::size_t i = 0; i < nus.size(); ++i) curve.points.push_back({nus[i], lambdas[i]});
  return curve;
}

std::vector<int> default_scaling_sites() { return {8, 12, 16, 24, 32, 48, 64, 96, 128}; }

ScalingStudy ring_scaling_study(std::span<const int> sites, double epsilon, const ScanOptions& options) {
  for (std::size_t i = 0; i < sites.size(); ++i) {
    if (sites[i] < 5) throw Error(ErrorCode::InvalidParams, "scaling study needs N >= 5");
    if (i > 0 && sites[i] <= sites[i - 1]) throw Error(ErrorCode::InvalidParams, "N list must be ascending");
  }
  constexpr int kAsymptoticMin = 8;
  std::size_t fit_points = 0;
  for (int n : sites) fit_points += n >= kAsymptoticMin ? 1 : 0;
  if (fit_points < 3) throw Error(ErrorCode::InvalidParams, "scaling fit needs at least 3 sizes with N >= 8");

  // Parallelism goes to the per-N scans; each scan itself runs serially.
  ScanOptions inner = options;
  inner.threads = 1;
  const std::vector<NuMaximum> peaks = parallel_map(sites.size(), options.threads, [&](std::size_t i) {
    return backflow_peak(ChainParams::ring(sites[i], epsilon), kDefaultNodes, inner);
  });

  ScalingStudy study;
  std::vector<double> ns;
  std::vector<double> gaps;
  std::vector<double> nus;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    study.table.push_back({sites[i], peaks[i].lambda_star, peaks[i].nu_star});
    if (sites[i] < kAsymptoticMin) continue;
    ns.push_back(sites[i]);
    gaps.push_back(peaks[i].lambda_star - kRingContinuumConstant);
    nus.push_back(peaks[i].nu_star);
  }
  study.gap_fit = powerlaw_fit(ns, gaps);
  study.nu_fit = powerlaw_fit(ns, nus);
  return study;
}

BMFluxTrace bm_flux_trace(const EigenSolution& solution, const BMProblem& problem,
                          const std::vector<double>& times) {
  problem.validate();
  BMFluxTrace trace;
  trace.series = flux_series(solution.state, problem.params, 0, times);

  const double half = 0.5 * problem.nu * problem.params.hbar() / problem.params.tau();
  constexpr int kIntervals = 2000;
  const FluxSeries window = flux_series(solution.state, problem.params, 0, linspace(-half, half, kIntervals + 1));
  double integral = 0.0;
  for (int i = 0; i <= kIntervals; ++i) {
    const double w = (i == 0 || i == kIntervals) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    integral += w * window.samples[static_cast<std::size_t>(i)].flux;
  }
  integral *= (2.0 * half / kIntervals) / 3.0;
  trace.integrated_backflow = -integral;
  return trace;
}

}  // namespace backflow
