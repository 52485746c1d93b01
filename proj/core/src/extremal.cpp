#include "backflow/extremal.hpp"

#include <cmath>
#include <string>

#include "backflow/error.hpp"

namespace backflow {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kSqrtClamp = 1e-12;

double sign_of(Branch branch) { return branch == Branch::Plus ? 1.0 : -1.0; }

// Sums over the ring window that every closed form is built from:
//   X = sum_n cos(2 pi n / N + xi),  Y = sum_n sin(2 pi n / N + xi).
struct WindowSums {
  DiscreteWindow window;
  double count = 0.0;  // eta2 + 1 - eta1
  double x = 0.0;
  double y = 0.0;
  double root = 0.0;   // sqrt(count^2 - X^2)
  double scale = 0.0;  // tau sqrt(1+eps^2) / (N hbar)
};

WindowSums window_sums(const ChainParams& params) {
  if (!params.is_ring()) throw Error(ErrorCode::InvalidParams, "operation needs a ring boundary");
  WindowSums s;
  s.window = ring_window(params);
  if (s.window.size() < 2) {
    throw Error(ErrorCode::WindowTooSmall,
                "positive-momentum window holds " + std::to_string(s.window.size()) + " mode(s)");
  }
  const double n = params.sites();
  s.count = s.window.size();
  const double dirichlet = std::sin(kPi * s.count / n) / std::sin(kPi / n);
  const double centre = kPi * (s.window.eta1 + s.window.eta2) / n + params.xi();
  s.x = std::cos(centre) * dirichlet;
  s.y = std::sin(centre) * dirichlet;
  double disc = s.count * s.count - s.x * s.x;
  if (disc < 0.0) {
    if (disc < -kSqrtClamp) throw Error(ErrorCode::ConvergenceFailure, "negative bound discriminant");
    disc = 0.0;
  }
  s.root = std::sqrt(disc);
  s.scale = params.tau() * params.hopping_modulus() / (n * params.hbar());
  return s;
}

// e^{-i((2j'-1) m pi / N - E_m t' / hbar)}
Complex evaluation_phase(const ChainParams& params, int m, int jprime, double tprime) {
  const double k = ring_momentum(m, params.sites());
  return std::exp(-kI * ((2.0 * jprime - 1.0) * m * kPi / params.sites() -
                         dispersion(params, k) * tprime / params.hbar()));
}

}  // namespace

FluxBounds infinite_bounds(const ChainParams& params) {
  if (params.is_ring()) throw Error(ErrorCode::InvalidParams, "infinite bounds requested for a ring");
  const double scale = params.hopping_modulus() * params.tau() / (2.0 * params.hbar() * kPi);
  return {(2.0 + kPi) * scale, (2.0 - kPi) * scale, continuous_window(params)};
}

Complex infinite_optimal_weight_at(const ChainParams& params, int jprime, double tprime, Branch branch,
                                   double k) {
  const double s = sign_of(branch);
  const double u = 0.5 * (k + params.xi());
  const double amplitude = (s * std::cos(u) + std::sin(u)) / std::sqrt(kPi + 2.0 * s);
  const double phase = (jprime - 0.5) * k - dispersion(params, k) * tprime / params.hbar();
  return amplitude * std::exp(-kI * phase);
}

WeightSamples infinite_optimal_weight(const ChainParams& params, int jprime, double tprime, Branch branch,
                                      const QuadratureRule& rule) {
  const ContinuousWindow window = continuous_window(params);
  const double slack = 1e-12 * (1.0 + std::abs(window.k_hi));
  for (double k : rule.nodes) {
    if (k < window.k_lo - slack || k > window.k_hi + slack) {
      throw Error(ErrorCode::InvalidParams, "quadrature node outside the positive-momentum window");
    }
  }
  WeightSamples out{window, rule, {}};
  out.phi.reserve(rule.size());
  for (double k : rule.nodes) out.phi.push_back(infinite_optimal_weight_at(params, jprime, tprime, branch, k));
  return out;
}

WeightSamples infinite_optimal_weight(const ChainParams& params, int jprime, double tprime, Branch branch,
                                      int nodes) {
  const ContinuousWindow window = continuous_window(params);
  return infinite_optimal_weight(params, jprime, tprime, branch,
                                 gauss_legendre(nodes, window.k_lo, window.k_hi));
}

Eigen::Matrix2d ring_extremal_matrix(const ChainParams& params) {
  const WindowSums s = window_sums(params);
  Eigen::Matrix2d a;
  a << s.y, s.count - s.x,
       s.count + s.x, s.y;
  return s.scale * a;
}

FluxBounds ring_bounds(const ChainParams& params) {
  const WindowSums s = window_sums(params);
  return {s.scale * (s.y + s.root), s.scale * (s.y - s.root), s.window};
}

FluxBounds ring_bounds_unbiased(int sites, double tau, double hbar) {
  const ChainParams params = ChainParams::ring(sites, 0.0, tau, hbar);
  const double n = sites;
  if (sites % 2 == 0) {
    const double scale = tau / (n * hbar);
    const double cot = 1.0 / std::tan(kPi / n);
    const double root = std::sqrt(n * n / 4.0 - 1.0);
    return {scale * (cot + root), scale * (cot - root), ring_window(params)};
  }
  const double scale = tau / (2.0 * n * hbar);
  const double cot = 1.0 / std::tan(kPi / (2.0 * n));
  const double root = std::sqrt(n * (n + 2.0));
  return {scale * (cot + root), scale * (cot - root), ring_window(params)};
}

RingCoeffs ring_optimal_coeffs(const ChainParams& params, int jprime, double tprime, Branch branch) {
  const WindowSums s = window_sums(params);
  const double sign = sign_of(branch);
  const double cos_weight = sign * std::sqrt(s.count - s.x);
  const double sin_weight = std::sqrt(s.count + s.x);
  const double norm = 1.0 / std::sqrt(s.root * s.root + sign * s.y * s.root);

  RingCoeffs out{s.window, {}};
  out.c.reserve(static_cast<std::size_t>(s.window.size()));
  for (int m = s.window.eta1; m <= s.window.eta2; ++m) {
    const double angle = m * kPi / params.sites() + 0.5 * params.xi();
    const double real = cos_weight * std::cos(angle) + sin_weight * std::sin(angle);
    out.c.push_back(norm * real * evaluation_phase(params, m, jprime, tprime));
  }
  return out;
}

RingCoeffs ring_optimal_coeffs_unbiased(int sites, int jprime, double tprime, Branch branch, double tau,
                                        double hbar) {
  const ChainParams params = ChainParams::ring(sites, 0.0, tau, hbar);
  const DiscreteWindow window = ring_window(params);
  if (window.size() < 2) throw Error(ErrorCode::WindowTooSmall, "ring window holds a single mode");
  const double sign = sign_of(branch);
  const double n = sites;
  double cos_weight = 0.0;
  double sin_weight = std::sqrt(n + 2.0);
  double denom = 0.0;
  if (sites % 2 == 0) {
    cos_weight = sign * std::sqrt(n - 2.0);
    denom = 0.5 * (n * n - 4.0 + sign * 2.0 * std::sqrt(n * n - 4.0) / std::tan(kPi / n));
  } else {
    cos_weight = sign * std::sqrt(n);
    denom = 0.5 * (n * (n + 2.0) + sign * std::sqrt(n * (n + 2.0)) / std::tan(kPi / (2.0 * n)));
  }
  const double norm = 1.0 / std::sqrt(denom);

  RingCoeffs out{window, {}};
  for (int m = window.eta1; m <= window.eta2; ++m) {
    const double angle = m * kPi / n;
    const double real = cos_weight * std::cos(angle) + sin_weight * std::sin(angle);
    out.c.push_back(norm * real * evaluation_phase(params, m, jprime, tprime));
  }
  return out;
}

}  // namespace backflow
