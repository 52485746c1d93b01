#pragma once

// Reference implementations used only by the tests. Everything here is built
// from the lattice Hamiltonian and the raw flux expression, never from the
// closed forms in the library.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cd = std::complex<double>;
inline constexpr double pi = std::numbers::pi;
inline constexpr cd I{0.0, 1.0};
inline constexpr std::uint64_t kSeed = 0xB0F107;

struct Ring {
  int n = 0;
  double eps = 0.0;
  double tau = 1.0;
  double hbar = 1.0;
  int eta1 = 0;
  int eta2 = 0;

  int size() const { return eta2 - eta1 + 1; }
};

// Window by direct enumeration: every mode of one Brillouin zone with
// non-negative velocity dE/dk, taken from the Hamiltonian matrix elements.
// Without bias, k = 0 and k = pi are the same zero-velocity standing wave
// pair; only the lower one is kept.
inline std::vector<int> positive_modes(int n, double eps, double tau = 1.0) {
  std::vector<int> modes;
  const double xi = std::atan(eps);
  // Scan a window of indices wide enough to hold the interval [-xi, pi - xi].
  for (int m = -n; m <= n; ++m) {
    const double k = 2.0 * pi * m / n;
    if (k < -xi - 1e-9 || k > pi - xi + 1e-9) continue;
    // velocity from E(k) = -tau[(1 - i eps) e^{-ik} + (1 + i eps) e^{ik}]
    const cd dE = -tau * ((1.0 - I * eps) * (-I) * std::exp(-I * k) + (1.0 + I * eps) * I * std::exp(I * k));
    if (dE.real() >= -1e-12) modes.push_back(m);
  }
  if (eps == 0.0 && modes.size() >= 2) {
    const double k_lo = 2.0 * pi * modes.front() / n;
    const double k_hi = 2.0 * pi * modes.back() / n;
    if (std::abs(k_hi - k_lo - pi) < 1e-9) modes.pop_back();
  }
  return modes;
}

inline Ring make_ring(int n, double eps, double tau = 1.0, double hbar = 1.0) {
  const auto modes = positive_modes(n, eps, tau);
  return {n, eps, tau, hbar, modes.front(), modes.back()};
}

// Dense ring Hamiltonian: H(j, j-1) = -tau (1 - i eps), H(j, j+1) = -tau (1 + i eps).
inline Eigen::MatrixXcd hamiltonian(int n, double eps, double tau) {
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    h(j, (j + n - 1) % n) += -tau * (1.0 - I * eps);
    h(j, (j + 1) % n) += -tau * (1.0 + I * eps);
  }
  return h;
}

// <u_m|H|u_m> for the plane wave u_m(j) = e^{2 pi i m j / N} / sqrt(N).
inline double mode_energy(const Ring& r, int m) {
  const Eigen::MatrixXcd h = hamiltonian(r.n, r.eps, r.tau);
  Eigen::VectorXcd u(r.n);
  for (int j = 0; j < r.n; ++j) u[j] = std::exp(I * (2.0 * pi * m * j / r.n)) / std::sqrt(double(r.n));
  return (u.adjoint() * h * u)(0, 0).real();
}

inline std::vector<double> energies(const Ring& r) {
  std::vector<double> e;
  for (int m = r.eta1; m <= r.eta2; ++m) e.push_back(mode_energy(r, m));
  return e;
}

inline cd basis(const Ring& r, const std::vector<double>& e, int i, int j, double t) {
  const int m = r.eta1 + i;
  return std::exp(I * (2.0 * pi * m * j / r.n - e[i] * t / r.hbar)) / std::sqrt(double(r.n));
}

inline cd amplitude(const Ring& r, const std::vector<double>& e, const std::vector<cd>& c, int j, double t) {
  cd psi = 0.0;
  for (int i = 0; i < r.size(); ++i) psi += c[i] * basis(r, e, i, j, t);
  return psi;
}

// (tau/hbar)[-i(conj(a) b - a conj(b)) + eps(conj(a) b + a conj(b))], flux from a to b.
inline double raw_flux(cd a, cd b, double eps, double tau, double hbar) {
  const cd cross = std::conj(a) * b;
  const cd value = -I * (cross - std::conj(cross)) + eps * (cross + std::conj(cross));
  return tau / hbar * value.real();
}

// Hermitian h with J(j, t) = c^dagger h c, from the bilinear raw flux.
inline Eigen::MatrixXcd flux_matrix(const Ring& r, const std::vector<double>& e, int j, double t) {
  const int s = r.size();
  Eigen::MatrixXcd h(s, s);
  for (int a = 0; a < s; ++a) {
    const cd la = basis(r, e, a, j - 1, t);
    const cd ha = basis(r, e, a, j, t);
    for (int b = 0; b < s; ++b) {
      const cd lb = basis(r, e, b, j - 1, t);
      const cd hb = basis(r, e, b, j, t);
      const cd x = std::conj(la) * hb;  // conj(u_a(j-1)) u_b(j)
      const cd y = lb * std::conj(ha);  // u_b(j-1) conj(u_a(j))
      h(a, b) = r.tau / r.hbar * (-I * (x - y) + r.eps * (x + y));
    }
  }
  return h;
}

// Extreme eigenvalues of the flux form: the instantaneous flux bounds.
inline std::pair<double, double> flux_extremes(const Ring& r) {
  const auto e = energies(r);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(flux_matrix(r, e, 0, 0.0));
  return {solver.eigenvalues().maxCoeff(), solver.eigenvalues().minCoeff()};
}

// Brute-force minimum of the two-state flux over theta (3601 points), one full
// beat period of t (1000 points) and every site, with gamma = 0.
inline double two_state_grid_min(const Ring& r, int m1, int m2, int theta_points = 3601, int t_points = 1000) {
  const auto e = energies(r);
  const int a = m1 - r.eta1;
  const int b = m2 - r.eta1;
  const double gap = std::abs(e[a] - e[b]);
  const double period = gap > 1e-12 ? 2.0 * pi * r.hbar / gap : 1.0;
  std::vector<double> cs(theta_points);
  std::vector<double> sn(theta_points);
  for (int i = 0; i < theta_points; ++i) {
    const double theta = pi * i / (theta_points - 1);
    cs[i] = std::cos(0.5 * theta);
    sn[i] = std::sin(0.5 * theta);
  }
  double best = 1e300;
  for (int ti = 0; ti < t_points; ++ti) {
    const double t = period * ti / t_points;
    for (int j = 0; j < r.n; ++j) {
      const Eigen::MatrixXcd h = flux_matrix(r, e, j, t);
      const double haa = h(a, a).real();
      const double hbb = h(b, b).real();
      const double hab = 2.0 * h(a, b).real();
      for (int i = 0; i < theta_points; ++i) {
        best = std::min(best, cs[i] * cs[i] * haa + sn[i] * sn[i] * hbb + cs[i] * sn[i] * hab);
      }
    }
  }
  return best;
}

// Matrix of the integrated backflow -int_{-T/2}^{T/2} J(0, t) dt as a
// quadratic form in the ring coefficients, by composite Simpson in time.
inline Eigen::MatrixXcd backflow_form(const Ring& r, double nu, int intervals = 20000) {
  const auto e = energies(r);
  const double half = 0.5 * nu * r.hbar / r.tau;
  const double h = 2.0 * half / intervals;
  Eigen::MatrixXcd q = Eigen::MatrixXcd::Zero(r.size(), r.size());
  const Eigen::MatrixXcd h0 = flux_matrix(r, e, 0, 0.0);
  for (int a = 0; a < r.size(); ++a) {
    for (int b = 0; b < r.size(); ++b) {
      // h(0, t)_{ab} = h(0, 0)_{ab} e^{i (E_a - E_b) t / hbar}
      const double w = (e[a] - e[b]) / r.hbar;
      cd sum = 0.0;
      for (int k = 0; k <= intervals; ++k) {
        const double t = -half + h * k;
        const double weight = (k == 0 || k == intervals) ? 1.0 : (k % 2 ? 4.0 : 2.0);
        sum += weight * std::exp(I * w * t);
      }
      q(a, b) = -h0(a, b) * sum * h / 3.0;
    }
  }
  return q;
}

inline double backflow_max(const Ring& r, double nu, int intervals = 20000) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(backflow_form(r, nu, intervals));
  return solver.eigenvalues().maxCoeff();
}

// Coarse log scan + golden section on f; returns {x*, f(x*)}.
inline std::pair<double, double> scan_max(const std::function<double(double)>& f, double lo, double hi, int steps,
                                          double tol) {
  std::vector<double> xs(steps);
  std::vector<double> ys(steps);
  for (int i = 0; i < steps; ++i) {
    xs[i] = lo * std::pow(hi / lo, double(i) / (steps - 1));
    ys[i] = f(xs[i]);
  }
  const int best = int(std::max_element(ys.begin(), ys.end()) - ys.begin());
  double a = xs[std::max(best - 1, 0)];
  double b = xs[std::min(best + 1, steps - 1)];
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  return {x, f(x)};
}

inline std::vector<cd> random_unit(int size, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<cd> c(size);
  double norm = 0.0;
  for (auto& v : c) {
    v = {g(rng), g(rng)};
    norm += std::norm(v);
  }
  for (auto& v : c) v /= std::sqrt(norm);
  return c;
}

}  // namespace oracle
