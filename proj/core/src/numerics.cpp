#include "backflow/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "backflow/error.hpp"

namespace backflow {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kResidualTol = 1e-10;

struct LegendreValue {
  double p;
  double dp;
};

// P_n(x) and P_n'(x) by the three-term recurrence.
LegendreValue legendre(int n, double x) {
  double p0 = 1.0;
  double p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  const double p = n == 0 ? 1.0 : p1;
  const double dp = n * (x * p - p0) / (x * x - 1.0);
  return {p, dp};
}

void check_symmetric(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::NotSymmetric, "matrix is not square");
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTol * scale) {
    throw Error(ErrorCode::NotSymmetric, "asymmetry " + std::to_string(asym));
  }
}

double residual_limit(const Eigen::VectorXd& eigenvalues) {
  const double norm = eigenvalues.size() == 0 ? 0.0 : eigenvalues.cwiseAbs().maxCoeff();
  return kResidualTol * std::max(norm, std::numeric_limits<double>::min());
}

}  // namespace

QuadratureRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw Error(ErrorCode::InvalidParams, "quadrature needs n >= 1");
  if (!(a < b)) throw Error(ErrorCode::InvalidParams, "quadrature needs a < b");

  std::vector<double> x(n);
  std::vector<double> w(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Tricomi initial guess for the i-th largest root.
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    LegendreValue lv{};
    for (int iter = 0; iter < 100; ++iter) {
      lv = legendre(n, z);
      const double dz = lv.p / lv.dp;
      z -= dz;
      if (std::abs(dz) <= 1e-15) break;
    }
    lv = legendre(n, z);
    const double weight = 2.0 / ((1.0 - z * z) * lv.dp * lv.dp);
    // Mirror so the rule is exactly symmetric.
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = weight;
    w[n - 1 - i] = weight;
  }
  if (n % 2 == 1) x[n / 2] = 0.0;

  QuadratureRule rule;
  rule.a = a;
  rule.b = b;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double mid = 0.5 * (a + b);
  const double half_width = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = mid + half_width * x[i];
    rule.weights[i] = half_width * w[i];
  }
  return rule;
}

SymmetricEigenResult symmetric_eigen(const Eigen::MatrixXd& matrix) {
  check_symmetric(matrix);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::ConvergenceFailure, "symmetric eigensolver did not converge");
  }
  SymmetricEigenResult result;
  result.eigenvalues = solver.eigenvalues();
  result.eigenvectors = solver.eigenvectors();
  const Eigen::MatrixXd r =
      matrix * result.eigenvectors - result.eigenvectors * result.eigenvalues.asDiagonal();
  result.max_residual = r.size() == 0 ? 0.0 : r.colwise().norm().maxCoeff();
  if (result.max_residual > residual_limit(result.eigenvalues)) {
    throw Error(ErrorCode::ConvergenceFailure,
                "eigen residual " + std::to_string(result.max_residual));
  }
  return result;
}

EigenPair largest_eigenpair(const Eigen::MatrixXd& matrix) {
  check_symmetric(matrix);
  if (matrix.rows() == 0) throw Error(ErrorCode::InvalidParams, "empty matrix");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::ConvergenceFailure, "symmetric eigensolver did not converge");
  }
  const Eigen::Index top = matrix.rows() - 1;
  EigenPair pair;
  pair.value = solver.eigenvalues()[top];
  pair.vector = solver.eigenvectors().col(top);
  pair.residual = (matrix * pair.vector - pair.value * pair.vector).norm();
  if (pair.residual > residual_limit(solver.eigenvalues())) {
    throw Error(ErrorCode::ConvergenceFailure, "eigen residual " + std::to_string(pair.residual));
  }
  return pair;
}

Maximum golden_section_max(const std::function<double(double)>& f, double lo, double hi, double tol) {
  if (!(lo < hi)) throw Error(ErrorCode::InvalidParams, "golden section needs lo < hi");
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidParams, "golden section needs tol > 0");

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc == fd) {
      // Values no longer resolve the two probes; keep the span between them.
      a = c;
      b = d;
      c = b - inv_phi * (b - a);
      d = a + inv_phi * (b - a);
      fc = f(c);
      fd = f(d);
    } else if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double mid = 0.5 * (a + b);
  const double fm = f(mid);
  if (fm >= fc && fm >= fd) return {mid, fm};
  return fc >= fd ? Maximum{c, fc} : Maximum{d, fd};
}

PowerLawFit powerlaw_fit(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw Error(ErrorCode::InvalidParams, "xs and ys differ in length");
  if (xs.size() < 3) throw Error(ErrorCode::InvalidParams, "power-law fit needs at least 3 points");
  const std::size_t n = xs.size();
  std::vector<double> lx(n);
  std::vector<double> ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) {
      throw Error(ErrorCode::NonPositiveData, "power-law fit needs positive data");
    }
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
  }
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = lx[i] - mx;
    const double dy = ly[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw Error(ErrorCode::InvalidParams, "power-law fit needs distinct xs");
  PowerLawFit fit;
  fit.exponent = sxy / sxx;
  fit.prefactor = std::exp(my - fit.exponent * mx);
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = ly[i] - (my + fit.exponent * (lx[i] - mx));
    ss_res += e * e;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

std::vector<double> linspace(double lo, double hi, int count) {
  if (count < 1) return {};
  if (count == 1) return {lo};
  std::vector<double> out(count);
  const double step = (hi - lo) / (count - 1);
  for (int i = 0; i < count; ++i) out[i] = lo + step * i;
  out.back() = hi;
  return out;
}

std::vector<double> logspace(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > 0.0)) throw Error(ErrorCode::InvalidParams, "log grid needs positive bounds");
  std::vector<double> out = linspace(std::log(lo), std::log(hi), count);
  for (double& v : out) v = std::exp(v);
  if (!out.empty()) {
    out.front() = lo;
    out.back() = hi;
  }
  return out;
}

}  // namespace backflow
