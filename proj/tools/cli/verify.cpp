#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "backflow/bm.hpp"
#include "backflow/error.hpp"
#include "backflow/extremal.hpp"
#include "backflow/flux.hpp"
#include "backflow/numerics.hpp"
#include "cli.hpp"

namespace backflow::cli {

namespace {

constexpr int kJPrime = 3;
constexpr double kTPrime = 3.0;
constexpr double kEpsilons[] = {0.0, 0.5, 1.0};

std::string sci(double v) {
  std::ostringstream os;
  os.precision(2);
  os << std::scientific << v;
  return os.str();
}

RingCoeffs random_state(const DiscreteWindow& window, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  RingCoeffs s{window, std::vector<Complex>(static_cast<std::size_t>(window.size()))};
  double norm = 0.0;
  for (Complex& c : s.c) {
    c = {gauss(rng), gauss(rng)};
    norm += std::norm(c);
  }
  for (Complex& c : s.c) c /= std::sqrt(norm);
  return s;
}

double flipped_bias_flux(Complex left, Complex here, const ChainParams& params) {
  const Complex z = std::conj(left) * here;
  return 2.0 * params.tau() / params.hbar() * (z.imag() - params.epsilon() * z.real());
}

CheckResult check(std::string group, std::string name, double worst, double limit) {
  return {std::move(group), std::move(name), worst <= limit, "max " + sci(worst) + " (limit " + sci(limit) + ")"};
}

void continuity(const VerifyOptions& options, std::vector<CheckResult>& out) {
  std::mt19937_64 rng(static_cast<std::uint64_t>(options.seed));
  const ChainParams params = ChainParams::ring(9, 1.0);
  const DiscreteWindow window = ring_window(params);
  std::uniform_int_distribution<int> site(0, params.sites() - 1);
  std::uniform_real_distribution<double> time(0.0, 20.0);
  SiteFluxFn flux = site_flux;
  if (options.mutate == "flux-eps-sign") flux = flipped_bias_flux;

  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const RingCoeffs state = random_state(window, rng);
    const int j = site(rng);
    const double t = time(rng);
    worst = std::max(worst, continuity_residual(state, params, j, t, flux));
  }
  out.push_back(check("continuity", "100 random states, N=9, eps=1", worst, 1e-10));
}

void bounds(const VerifyOptions& options, std::vector<CheckResult>& out) {
  double attain = 0.0;
  for (double eps : kEpsilons) {
    for (int n = 4; n <= 30; ++n) {
      const ChainParams params = ChainParams::ring(n, eps);
      const FluxBounds b = ring_bounds(params);
      for (Branch br : {Branch::Plus, Branch::Minus}) {
        const RingCoeffs c = ring_optimal_coeffs(params, kJPrime, kTPrime, br);
        attain = std::max(attain, std::abs(general_flux_ring(c, params, kJPrime, kTPrime) - b.value(br)));
      }
    }
  }
  out.push_back(check("bounds", "ring optimal states attain lambda+-, N=4..30", attain, 1e-10));

  double attain_inf = 0.0;
  for (double eps : kEpsilons) {
    const ChainParams params = ChainParams::infinite(eps);
    const FluxBounds b = infinite_bounds(params);
    for (Branch br : {Branch::Plus, Branch::Minus}) {
      const WeightSamples w = infinite_optimal_weight(params, kJPrime, kTPrime, br, 200);
      attain_inf = std::max(attain_inf, std::abs(general_flux_infinite(w, params, kJPrime, kTPrime) - b.value(br)));
    }
  }
  out.push_back(check("bounds", "infinite optimal weights attain lambda+-", attain_inf, 1e-8));

  std::mt19937_64 rng(static_cast<std::uint64_t>(options.seed) + 1);
  std::uniform_real_distribution<double> time(-10.0, 10.0);
  double excess = 0.0;
  for (double eps : kEpsilons) {
    for (int n = 4; n <= 12; ++n) {
      const ChainParams params = ChainParams::ring(n, eps);
      const FluxBounds b = ring_bounds(params);
      std::uniform_int_distribution<int> site(0, n - 1);
      for (int i = 0; i < 100; ++i) {
        const RingCoeffs state = random_state(ring_window(params), rng);
        const double j = general_flux_ring(state, params, site(rng), time(rng));
        excess = std::max({excess, j - b.lambda_plus, b.lambda_minus - j});
      }
    }
  }
  out.push_back(check("bounds", "random states inside [lambda-, lambda+]", std::max(excess, 0.0), 1e-9));
}

void eigen(const VerifyOptions& options, std::vector<CheckResult>& out) {
  std::mt19937_64 rng(static_cast<std::uint64_t>(options.seed) + 2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd a(50, 50);
  for (int i = 0; i < 50; ++i) {
    for (int j = i; j < 50; ++j) a(i, j) = a(j, i) = u(rng);
  }
  const SymmetricEigenResult r = symmetric_eigen(a);
  const Eigen::MatrixXd rebuilt = r.eigenvectors * r.eigenvalues.asDiagonal() * r.eigenvectors.transpose();
  out.push_back(check("eigen", "random 50x50 reconstruction", (rebuilt - a).cwiseAbs().maxCoeff(), 1e-10));
  const Eigen::MatrixXd gram = r.eigenvectors.transpose() * r.eigenvectors - Eigen::MatrixXd::Identity(50, 50);
  out.push_back(check("eigen", "random 50x50 orthonormality", gram.cwiseAbs().maxCoeff(), 1e-10));

  const EigenSolution ring = lambda_p_ring(ChainParams::ring(9, 0.5), 5.0);
  out.push_back(check("eigen", "ring backflow eigenpair residual", ring.residual, 1e-10 * std::max(1.0, ring.lambda)));
  const EigenSolution line = lambda_p_infinite(ChainParams::infinite(0.5), 1.0, 200);
  out.push_back(check("eigen", "Nystrom eigenpair residual", line.residual, 1e-10 * std::max(1.0, line.lambda)));
}

void normalization(const VerifyOptions&, std::vector<CheckResult>& out) {
  double worst = 0.0;
  for (double eps : kEpsilons) {
    for (int n = 4; n <= 30; ++n) {
      for (Branch br : {Branch::Plus, Branch::Minus}) {
        const RingCoeffs c = ring_optimal_coeffs(ChainParams::ring(n, eps), kJPrime, kTPrime, br);
        worst = std::max(worst, std::abs(norm_squared(c) - 1.0));
      }
    }
  }
  out.push_back(check("normalization", "ring optimal sequences, N=4..30", worst, 1e-10));

  double worst_inf = 0.0;
  for (double eps : kEpsilons) {
    for (Branch br : {Branch::Plus, Branch::Minus}) {
      const WeightSamples w = infinite_optimal_weight(ChainParams::infinite(eps), kJPrime, kTPrime, br, 200);
      worst_inf = std::max(worst_inf, std::abs(norm_squared(w) - 1.0));
    }
  }
  out.push_back(check("normalization", "infinite optimal weights, 200 nodes", worst_inf, 1e-10));

  const EigenSolution ring = lambda_p_ring(ChainParams::ring(9, 1.0), 5.0);
  const EigenSolution line = lambda_p_infinite(ChainParams::infinite(1.0), 1.0, 200);
  const double bm = std::max(std::abs(norm_squared(std::get<RingCoeffs>(ring.state)) - 1.0),
                             std::abs(norm_squared(std::get<WeightSamples>(line.state)) - 1.0));
  out.push_back(check("normalization", "backflow eigenstates", bm, 1e-10));
}

void constants(const VerifyOptions&, std::vector<CheckResult>& out) {
  const double ratio = kRingContinuumConstant / kBrackenMelloyConstant;
  out.push_back(check("constants", "ring continuum / Bracken-Melloy = 3.0380", std::abs(ratio - 3.0380), 1e-3));
}

}  // namespace

const std::vector<std::string>& verify_groups() {
  static const std::vector<std::string> groups{"continuity", "bounds", "eigen", "normalization", "constants"};
  return groups;
}

std::vector<CheckResult> run_verification(const VerifyOptions& options) {
  using Group = void (*)(const VerifyOptions&, std::vector<CheckResult>&);
  const std::pair<const char*, Group> table[] = {
      {"continuity", continuity}, {"bounds", bounds}, {"eigen", eigen},
      {"normalization", normalization}, {"constants", constants},
  };
  std::vector<CheckResult> results;
  for (const auto& [name, fn] : table) {
    const bool wanted = options.groups.empty() ||
                        std::find(options.groups.begin(), options.groups.end(), name) != options.groups.end();
    if (!wanted) continue;
    try {
      fn(options, results);
    } catch (const Error& e) {
      results.push_back({name, "group aborted", false, e.what()});
    }
  }
  return results;
}

}  // namespace backflow::cli
