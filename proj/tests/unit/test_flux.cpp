#include <doctest.h>

#include <cmath>
#include <random>

#include "backflow/error.hpp"
#include "backflow/extremal.hpp"
#include "backflow/flux.hpp"
#include "oracles.hpp"

using namespace backflow;

namespace {

RingCoeffs to_state(const DiscreteWindow& w, const std::vector<oracle::cd>& c) { return {w, c}; }

RingCoeffs single_mode(const DiscreteWindow& w, int n) {
  RingCoeffs s{w, std::vector<Complex>(static_cast<std::size_t>(w.size()))};
  s.c[static_cast<std::size_t>(n - w.eta1)] = 1.0;
  return s;
}

double plane_wave_flux(const ChainParams& p, double k) {
  return 2.0 * p.tau() * p.hopping_modulus() / (p.sites() * p.hbar()) * std::sin(k + p.xi());
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::InvalidParams;
}

}  // namespace

TEST_CASE("site flux examples") {
  std::mt19937_64 rng(oracle::kSeed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double eps : {0.0, 0.5, 1.0, -2.0}) {
    for (int n : {5, 9, 16}) {
      const ChainParams p = ChainParams::ring(n, eps, 1.7, 0.6);
      for (int m = 0; m < n; ++m) {
        const double k = ring_momentum(m, n);
        const int j = 3;
        const Complex left = std::exp(Complex(0.0, k * (j - 1))) / std::sqrt(double(n));
        const Complex here = std::exp(Complex(0.0, k * j)) / std::sqrt(double(n));
        CHECK(std::abs(site_flux(left, here, p) - plane_wave_flux(p, k)) <= 1e-13);
      }
    }
  }
  const ChainParams unbiased = ChainParams::infinite(0.0);
  for (int i = 0; i < 100; ++i) CHECK(site_flux(u(rng), u(rng), unbiased) == 0.0);
  const Complex half{1.0 / std::sqrt(2.0), 0.0};
  CHECK(site_flux(half, half, ChainParams::infinite(1.0)) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("site flux agrees with the raw expression") {
  std::mt19937_64 rng(oracle::kSeed);
  std::normal_distribution<double> g;
  for (int i = 0; i < 1000; ++i) {
    const double eps = 2.0 * g(rng);
    const ChainParams p = ChainParams::infinite(eps, 0.5 + std::abs(g(rng)), 0.5 + std::abs(g(rng)));
    const Complex a{g(rng), g(rng)};
    const Complex b{g(rng), g(rng)};
    CHECK(std::abs(site_flux(a, b, p) - oracle::raw_flux(a, b, eps, p.tau(), p.hbar())) <= 1e-12);
  }
}

TEST_CASE("ring amplitude matches direct superposition") {
  std::mt19937_64 rng(oracle::kSeed);
  const ChainParams p = ChainParams::ring(9, 1.0, 1.0, 1.0);
  const oracle::Ring r = oracle::make_ring(9, 1.0);
  const auto e = oracle::energies(r);
  for (int i = 0; i < 20; ++i) {
    const auto c = oracle::random_unit(r.size(), rng);
    const RingCoeffs s = to_state(ring_window(p), c);
    for (int j = -2; j < 11; ++j) {
      CHECK(std::abs(ring_amplitude(s, p, j, 0.37 * i) - oracle::amplitude(r, e, c, j, 0.37 * i)) <= 1e-13);
    }
  }
}

TEST_CASE("continuity examples") {
  const ChainParams p9 = ChainParams::ring(9, 1.0);
  const DiscreteWindow w9 = ring_window(p9);
  for (int n = w9.eta1; n <= w9.eta2; ++n) {
    CHECK(continuity_residual(single_mode(w9, n), p9, 2, 1.3) <= 1e-14);
  }

  std::mt19937_64 rng(oracle::kSeed);
  std::uniform_real_distribution<double> t_dist(0.0, 50.0);
  for (int i = 0; i < 100; ++i) {
    RingCoeffs s{w9, std::vector<Complex>(static_cast<std::size_t>(w9.size()))};
    const auto c = oracle::random_unit(3, rng);
    for (int m = 0; m < 3; ++m) s.c[static_cast<std::size_t>((i + 2 * m) % w9.size())] += c[m];
    CHECK(continuity_residual(s, p9, i % 9, t_dist(rng)) <= 1e-10);
  }

  const ChainParams p4 = ChainParams::ring(4, 0.0);
  const RingCoeffs equal{ring_window(p4), {1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)}};
  for (int j = 0; j < 4; ++j) {
    for (double t : {0.0, 0.4, 1.1, 7.3}) CHECK(continuity_residual(equal, p4, j, t) <= 1e-12);
  }
}

TEST_CASE("continuity property over random states") {
  std::mt19937_64 rng(oracle::kSeed);
  std::uniform_real_distribution<double> t_dist(-20.0, 20.0);
  for (int n : {4, 7, 12}) {
    for (double eps : {0.0, 0.5, 1.0, -1.5}) {
      const ChainParams p = ChainParams::ring(n, eps, 0.8, 1.2);
      const DiscreteWindow w = ring_window(p);
      for (int i = 0; i < 100; ++i) {
        const RingCoeffs s = to_state(w, oracle::random_unit(w.size(), rng));
        CHECK(continuity_residual(s, p, i % n, t_dist(rng)) <= 1e-10);
      }
    }
  }
}

TEST_CASE("a flipped bias term breaks continuity") {
  const ChainParams p = ChainParams::ring(9, 1.0);
  std::mt19937_64 rng(oracle::kSeed);
  const RingCoeffs s = to_state(ring_window(p), oracle::random_unit(ring_window(p).size(), rng));
  const SiteFluxFn flipped = [](Complex a, Complex b, const ChainParams& q) {
    const Complex z = std::conj(a) * b;
    return 2.0 * q.tau() / q.hbar() * (z.imag() - q.epsilon() * z.real());
  };
  CHECK(continuity_residual(s, p, 2, 0.5, flipped) > 1e-3);
}

TEST_CASE("two-state flux examples") {
  for (double eps : {0.0, 0.5, 1.0}) {
    const ChainParams p = ChainParams::ring(9, eps);
    const DiscreteWindow w = ring_window(p);
    for (int m2 = w.eta1 + 1; m2 <= w.eta2; ++m2) {
      const double expect = plane_wave_flux(p, ring_momentum(w.eta1, 9));
      CHECK(std::abs(two_state_flux(p, w.eta1, m2, 0.0, 0.3, 2, 1.0) - expect) <= 1e-14);
    }
  }

  const ChainParams p4 = ChainParams::ring(4, 0.0);
  const double target = 0.5 * (0.5 - std::sqrt(2.0) / 2.0);
  double best = 1e300;
  // The beat period of modes 0 and 1 is 2 pi / 2; scan it finely at every site.
  for (int j = 0; j < 4; ++j) {
    for (int i = 0; i < 200000; ++i) best = std::min(best, two_state_flux(p4, 0, 1, kPi / 2, 0.0, j, kPi * i / 200000.0));
  }
  CHECK(std::abs(best - target) <= 1e-9);
  CHECK(target == doctest::Approx(-0.10355).epsilon(1e-4));
}

TEST_CASE("two-state flux matches the explicit two-mode wave function") {
  std::mt19937_64 rng(oracle::kSeed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double eps : {0.0, 0.5, 1.0}) {
    const ChainParams p = ChainParams::ring(9, eps, 1.3, 0.7);
    const oracle::Ring r = oracle::make_ring(9, eps, 1.3, 0.7);
    const auto e = oracle::energies(r);
    for (int i = 0; i < 100; ++i) {
      const int m1 = r.eta1 + int(u(rng) * r.size());
      int m2 = r.eta1 + int(u(rng) * r.size());
      if (m2 == m1) m2 = m1 == r.eta2 ? r.eta1 : m1 + 1;
      const double theta = kPi * u(rng);
      const double gamma = 2.0 * kPi * u(rng);
      const int j = int(u(rng) * 9);
      const double t = 20.0 * u(rng);
      std::vector<oracle::cd> c(r.size(), 0.0);
      c[m1 - r.eta1] = std::cos(theta / 2);
      c[m2 - r.eta1] = std::exp(oracle::I * gamma) * std::sin(theta / 2);
      const double direct = oracle::raw_flux(oracle::amplitude(r, e, c, j - 1, t), oracle::amplitude(r, e, c, j, t),
                                             eps, r.tau, r.hbar);
      CHECK(std::abs(two_state_flux(p, m1, m2, theta, gamma, j, t) - direct) <= 1e-12);
    }
  }
}

TEST_CASE("two-state errors") {
  const ChainParams p = ChainParams::ring(4, 0.0);
  CHECK(code_of([&] { two_state_flux(p, 1, 1, 0.3, 0.0, 0, 0.0); }) == ErrorCode::SameMode);
  CHECK(code_of([&] { two_state_min(p, 0, 0); }) == ErrorCode::SameMode);
  CHECK(code_of([&] { two_state_min(p, 0, 3); }) == ErrorCode::InvalidParams);
  CHECK(code_of([] { two_state_min(ChainParams::infinite(0.0), 0, 1); }) == ErrorCode::InvalidParams);
}

TEST_CASE("two-state minimum example") {
  const ChainParams p = ChainParams::ring(4, 0.0);
  const TwoStateCoefficients k = two_state_coefficients(p, 0, 1);
  CHECK(k.a == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(k.b == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(k.c == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-15));
  CHECK(k.prefactor == doctest::Approx(0.5).epsilon(1e-15));
  const TwoStateMinimum m = two_state_min(p, 0, 1);
  CHECK(std::abs(m.j_min - (1.0 - std::sqrt(3.0)) / 4.0) <= 1e-15);
  CHECK(m.theta_star >= 0.0);
  CHECK(m.theta_star <= kPi);
}

TEST_CASE("two-state minimum matches brute force") {
  for (double eps : {0.0, 0.5, 1.0}) {
    for (int n = 4; n <= 9; ++n) {
      const ChainParams p = ChainParams::ring(n, eps);
      const oracle::Ring r = oracle::make_ring(n, eps);
      for (int m1 = r.eta1; m1 <= r.eta2; ++m1) {
        for (int m2 = m1 + 1; m2 <= r.eta2; ++m2) {
          const TwoStateMinimum m = two_state_min(p, m1, m2);
          const double grid = oracle::two_state_grid_min(r, m1, m2);
          CAPTURE(n);
          CAPTURE(eps);
          CAPTURE(m1);
          CAPTURE(m2);
          CHECK(m.j_min < 0.0);
          CHECK(grid >= m.j_min - 1e-6);
          CHECK(grid - m.j_min <= 1e-4);
          // theta* attains the minimum once t and j are optimized.
          const oracle::Ring single = r;
          double best = 1e300;
          const auto e = oracle::energies(single);
          const double period = 2.0 * kPi / std::abs(e[m1 - r.eta1] - e[m2 - r.eta1]);
          for (int i = 0; i < 4000; ++i) best = std::min(best, two_state_flux(p, m1, m2, m.theta_star, 0.0, 0, period * i / 4000));
          CHECK(best - m.j_min <= 1e-5);
        }
      }
    }
  }
}

TEST_CASE("two-state minimum is continuous in epsilon") {
  for (int n : {4, 7, 9}) {
    const double a = two_state_min(ChainParams::ring(n, 0.0), 0, 1).j_min;
    const double b = two_state_min(ChainParams::ring(n, 1e-12), 0, 1).j_min;
    CHECK(std::abs(a - b) <= 1e-9);
  }
}

TEST_CASE("general ring flux") {
  std::mt19937_64 rng(oracle::kSeed);
  for (double eps : {0.0, 0.5, 1.0}) {
    for (int n : {4, 9, 12}) {
      const ChainParams p = ChainParams::ring(n, eps, 1.1, 0.9);
      const DiscreteWindow w = ring_window(p);
      const oracle::Ring r = oracle::make_ring(n, eps, 1.1, 0.9);
      const auto e = oracle::energies(r);
      for (int m = w.eta1; m <= w.eta2; ++m) {
        CHECK(std::abs(general_flux_ring(single_mode(w, m), p, 1, 0.7) - plane_wave_flux(p, ring_momentum(m, n))) <= 1e-14);
      }
      RingCoeffs pair{w, std::vector<Complex>(static_cast<std::size_t>(w.size()))};
      pair.c[0] = std::cos(0.4);
      pair.c[1] = std::exp(Complex(0.0, 1.2)) * std::sin(0.4);
      CHECK(std::abs(general_flux_ring(pair, p, 3, 2.2) - two_state_flux(p, w.eta1, w.eta1 + 1, 0.8, 1.2, 3, 2.2)) <= 1e-13);

      for (int i = 0; i < 50; ++i) {
        const auto c = oracle::random_unit(w.size(), rng);
        const RingCoeffs s = to_state(w, c);
        const int j = i % n - 2;
        const double t = 0.31 * i - 4.0;
        const Complex z = general_flux_ring_complex(s, p, j, t);
        CHECK(std::abs(z.imag()) <= 1e-12);
        const double direct = oracle::raw_flux(oracle::amplitude(r, e, c, j - 1, t), oracle::amplitude(r, e, c, j, t),
                                               eps, r.tau, r.hbar);
        CHECK(std::abs(z.real() - direct) <= 1e-12);
      }
      const Eigen::MatrixXcd h = ring_flux_matrix(p, 2, 1.5);
      CHECK((h - oracle::flux_matrix(r, e, 2, 1.5)).cwiseAbs().maxCoeff() <= 1e-13);
      CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() <= 1e-15);

      for (Branch br : {Branch::Plus, Branch::Minus}) {
        const RingCoeffs c = ring_optimal_coeffs(p, 3, 3.0, br);
        CHECK(std::abs(general_flux_ring(c, p, 3, 3.0) - ring_bounds(p).value(br)) <= 1e-10);
      }
    }
  }
  const ChainParams p = ChainParams::ring(9, 0.0);
  RingCoeffs bad{ring_window(p), std::vector<Complex>(5, 0.5)};
  CHECK(code_of([&] { general_flux_ring(bad, p, 0, 0.0); }) == ErrorCode::NormViolation);
}

TEST_CASE("general infinite flux") {
  for (double eps : {0.0, 0.5, 1.0}) {
    const ChainParams p = ChainParams::infinite(eps);
    const ContinuousWindow w = continuous_window(p);
    const double k0 = w.k_lo + 0.6 * w.width();
    // Narrow Gaussian weight around an interior momentum.
    WeightSamples narrow{w, gauss_legendre(400, w.k_lo, w.k_hi), {}};
    double norm = 0.0;
    for (std::size_t i = 0; i < narrow.rule.size(); ++i) {
      const double d = (narrow.rule.nodes[i] - k0) / 0.05;
      narrow.phi.push_back(std::exp(-0.5 * d * d));
      norm += narrow.rule.weights[i] * std::norm(narrow.phi.back());
    }
    for (Complex& v : narrow.phi) v /= std::sqrt(norm);
    for (int j : {-3, 0, 2}) CHECK(general_flux_infinite(narrow, p, j, 0.0) > 0.0);
    CHECK(std::abs(general_flux_infinite_complex(narrow, p, 1, 0.5).imag()) <= 1e-12);

    for (Branch br : {Branch::Plus, Branch::Minus}) {
      const WeightSamples s = infinite_optimal_weight(p, 3, 3.0, br, 200);
      CHECK(std::abs(general_flux_infinite(s, p, 3, 3.0) - infinite_bounds(p).value(br)) <= 1e-8);
      const WeightSamples fine = infinite_optimal_weight(p, 3, 3.0, br, 400);
      for (int j : {0, 3, 6}) {
        for (double t : {0.0, 2.0, 5.0}) {
          CHECK(std::abs(general_flux_infinite(s, p, j, t) - general_flux_infinite(fine, p, j, t)) <= 1e-8);
        }
      }
    }
  }
  const ChainParams p = ChainParams::infinite(0.0);
  WeightSamples s = infinite_optimal_weight(p, 0, 0.0, Branch::Plus, 50);
  for (Complex& v : s.phi) v *= 1.01;
  CHECK(code_of([&] { general_flux_infinite(s, p, 0, 0.0); }) == ErrorCode::NormViolation);
}

TEST_CASE("flux series") {
  const ChainParams p = ChainParams::ring(9, 1.0);
  const RingCoeffs c = ring_optimal_coeffs(p, 3, 3.0, Branch::Minus);
  const std::vector<double> times{0.0, 1.0, 3.0, 4.5};
  const FluxSeries s = flux_series(c, p, 3, times);
  CHECK(s.site == 3);
  REQUIRE(s.samples.size() == times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    CHECK(s.samples[i].t == times[i]);
    CHECK(std::abs(s.samples[i].flux - general_flux_ring(c, p, 3, times[i])) <= 1e-14);
  }
  CHECK(code_of([&] { flux_series(c, p, 3, {0.0, 0.0}); }) == ErrorCode::InvalidParams);
  CHECK(code_of([&] { flux_series(c, p, 3, {1.0, 0.5}); }) == ErrorCode::InvalidParams);
}

TEST_CASE("random ring states respect the flux bounds") {
  std::mt19937_64 rng(oracle::kSeed);
  std::uniform_real_distribution<double> t_dist(-10.0, 10.0);
  int states = 0;
  for (double eps : {0.0, 0.5, 1.0}) {
    for (int n = 4; n <= 12; ++n) {
      const ChainParams p = ChainParams::ring(n, eps);
      const FluxBounds b = ring_bounds(p);
      const DiscreteWindow w = ring_window(p);
      for (int i = 0; i < 80; ++i, ++states) {
        const RingCoeffs s = to_state(w, oracle::random_unit(w.size(), rng));
        for (int j = 0; j < n; j += 3) {
          const double t = t_dist(rng);
          const double v = general_flux_ring(s, p, j, t);
          CHECK(v <= b.lambda_plus + 1e-9);
          CHECK(v >= b.lambda_minus - 1e-9);
        }
      }
    }
  }
  CHECK(states == 2160);
}
