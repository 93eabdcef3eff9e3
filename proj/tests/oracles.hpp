// Test-side oracles, kept independent of the library code paths they check:
// closed CDFs, the Kolmogorov-Smirnov statistic, and a brute-force Monte
// Carlo divergence built on std::mt19937_64 with hand-written Gaussian
// densities.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace oracles {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
inline double cauchy_cdf(double x) { return 0.5 + std::atan(x) / M_PI; }
inline double laplace_cdf(double x) {
  return x < 0 ? 0.5 * std::exp(x) : 1.0 - 0.5 * std::exp(-x);
}
inline double logistic_cdf(double x) { return 1.0 / (1.0 + std::exp(-x)); }
inline double exponential_cdf(double x) { return x < 0 ? 0.0 : 1.0 - std::exp(-x); }
inline double rayleigh_cdf(double x) { return x < 0 ? 0.0 : 1.0 - std::exp(-0.5 * x * x); }
inline double weibull_cdf(double x, double k) {
  return x < 0 ? 0.0 : 1.0 - std::exp(-std::pow(x, k));
}
inline double halfnormal_cdf(double x) { return x < 0 ? 0.0 : std::erf(x / std::sqrt(2.0)); }
inline double lognormal_cdf(double x, double sigma) {
  return x <= 0 ? 0.0 : normal_cdf(std::log(x) / sigma);
}
inline double uniform01_cdf(double x) { return std::clamp(x, 0.0, 1.0); }

inline double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    worst = std::max({worst, std::abs(f - static_cast<double>(i) / n),
                      std::abs(static_cast<double>(i + 1) / n - f)});
  }
  return worst;
}

inline double mvn_log_pdf(const Eigen::VectorXd& x, const Eigen::VectorXd& mu,
                          const Eigen::MatrixXd& sigma) {
  const Eigen::Index d = x.size();
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  const Eigen::VectorXd diff = x - mu;
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) log_det += 2.0 * std::log(llt.matrixL()(i, i));
  return -0.5 * (d * std::log(2.0 * M_PI) + log_det + diff.dot(llt.solve(diff)));
}

struct McResult {
  double value = 0.0;
  double stderr_ = 0.0;
};

// Brute-force plug-in MC estimate of D_KL(N(mu1,S1) : N(mu2,S2)) with its
// own sampler and density formulas.
inline McResult mvn_kl_mc(const Eigen::VectorXd& mu1, const Eigen::MatrixXd& s1,
                          const Eigen::VectorXd& mu2, const Eigen::MatrixXd& s2, int m,
                          unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  const Eigen::Index d = mu1.size();
  const Eigen::MatrixXd chol = Eigen::LLT<Eigen::MatrixXd>(s1).matrixL();
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < m; ++i) {
    Eigen::VectorXd z(d);
    for (Eigen::Index k = 0; k < d; ++k) z(k) = gauss(rng);
    const Eigen::VectorXd x = mu1 + chol * z;
    const double term = mvn_log_pdf(x, mu1, s1) - mvn_log_pdf(x, mu2, s2);
    sum += term;
    sum_sq += term * term;
  }
  McResult res;
  res.value = sum / m;
  res.stderr_ = std::sqrt(std::max(0.0, (sum_sq - m * res.value * res.value) / (m - 1)) / m);
  return res;
}

// Central difference of a scalar objective, for stationarity checks.
inline double central_derivative(const std::function<double(double)>& f, double x,
                                 double h = 1e-5) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace oracles
