#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace backflow {

// Quadrature nodes in ascending order with positive weights on [a, b].
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  double a = 0.0;
  double b = 0.0;

  std::size_t size() const noexcept { return nodes.size(); }
};

// n-point Gauss-Legendre rule mapped affinely to [a, b]; exact for
// polynomials of degree <= 2n - 1. Nodes come from Newton iteration on P_n.
QuadratureRule gauss_legendre(int n, double a, double b);

struct SymmetricEigenResult {
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // column i pairs with eigenvalues[i]
  double max_residual = 0.0;     // max_i ||A v_i - lambda_i v_i||
};

// Full spectrum of a real symmetric matrix. Throws NotSymmetric when the input
// is asymmetric beyond 1e-12 (relative to its largest entry) and
// ConvergenceFailure when the residual exceeds 1e-10 ||A||.
SymmetricEigenResult symmetric_eigen(const Eigen::MatrixXd& matrix);

struct EigenPair {
  double value = 0.0;
  Eigen::VectorXd vector;
  double residual = 0.0;
};

// Largest eigenpair with the same contract as symmetric_eigen; the residual is
// only evaluated for the returned pair.
EigenPair largest_eigenpair(const Eigen::MatrixXd& matrix);

struct Maximum {
  double x = 0.0;
  double value = 0.0;
};

// Golden-section search for the maximum of a unimodal f on [lo, hi].
Maximum golden_section_max(const std::function<double(double)>& f, double lo, double hi, double tol);

struct PowerLawFit {
  double exponent = 0.0;
  double prefactor = 0.0;
  double r_squared = 0.0;
};

// Least squares fit of log y = log prefactor + exponent log x.
PowerLawFit powerlaw_fit(std::span<const double> xs, std::span<const double> ys);

std::vector<double> linspace(double lo, double hi, int count);
std::vector<double> logspace(double lo, double hi, int count);

}  // namespace backflow
