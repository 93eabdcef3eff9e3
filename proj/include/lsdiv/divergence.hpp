#pragma once

#include <optional>

#include "lsdiv/densities.hpp"
#include "lsdiv/estimators.hpp"
#include "lsdiv/generators.hpp"
#include "lsdiv/quadrature.hpp"

namespace lsdiv {

enum class Method { auto_select, closed_form, quadrature, monte_carlo };

std::string method_name(Method m);

struct DivergenceValue {
  double value = 0.0;
  Method method = Method::closed_form;
  std::optional<double> stderr_;  // set for Monte Carlo results
  bool diverged = false;          // value = +inf
};

struct DivergenceOptions {
  Method method = Method::auto_select;
  double quad_tol = 1e-9;
  int mc_samples = 200000;
  std::optional<std::uint64_t> seed;  // required for Monte Carlo
  int partitions = 1;
};

// ---- closed forms ----------------------------------------------------------

// KLD formulas shipped with the library. Pairs are keyed by base family:
// (normal, normal) for any dimension, (lognormal, lognormal), any pair
// drawn from {exponential, rayleigh, weibull}, and (halfnormal,
// exponential) in this orientation. Everything else goes through
// quadrature or Monte Carlo.
bool has_kl_closed(const LocationScaleDensity& p, const LocationScaleDensity& q);
double kl_closed(const LocationScaleDensity& p, const LocationScaleDensity& q);

double weibull_kl(double k1, double s1, double k2, double s2);
double halfnormal_exponential_kl(double s1, double s2);
double rayleigh_kl(double sigma_sq1, double sigma_sq2);  // in sigma^2 parameters
double lognormal_kl(double mu1, double sigma1, double mu2, double sigma2);

// ---- generic evaluation ----------------------------------------------------

// Quadrature evaluation of I_f for d = 1 pairs. +inf is reported via the
// diverged flag; a positive probe grid toward the open ends catches
// light-tail/heavy-tail blowups early.
DivergenceValue f_divergence_quadrature(const LocationScaleDensity& p,
                                        const LocationScaleDensity& q, const FGenerator& f,
                                        double tol = 1e-9);

// Ladder: registered closed form (KL), quadrature for d = 1, reduced Monte
// Carlo otherwise. Non-regular families are refused.
DivergenceValue f_divergence(const LocationScaleDensity& p, const LocationScaleDensity& q,
                             const FGenerator& f, const DivergenceOptions& opt = {});

// ---- decompositions --------------------------------------------------------

double mahalanobis(const Vector& mu1, const Vector& mu2, const SpdMatrix& q);  // 1/2 d^T Q d
// Matrix Itakura-Saito (Burg) divergence 1/2 (tr(S2^{-1}S1 - I) - log|S2^{-1}S1|).
double burg(const SpdMatrix& s1, const SpdMatrix& s2);
double itakura_saito(double a, double b);  // a/b - log(a/b) - 1

// ---- entropies -------------------------------------------------------------

// h(g . p) = h(p) + log|P| and the same shift for cross-entropies.
double entropy_shift(double h_std, const GroupElement& g);
double cross_entropy_shift(double hx_std, const GroupElement& g);
double differential_entropy(const LocationScaleDensity& p, double tol = 1e-10);
double cross_entropy(const LocationScaleDensity& p, const LocationScaleDensity& q,
                     double tol = 1e-10);

// ---- mutual information ----------------------------------------------------

double gaussian_mutual_information(double rho);  // -1/2 log(1 - rho^2), |rho| < 1

struct AffineMap {
  double a = 1.0;  // must be nonzero
  double b = 0.0;
};

struct MiInvarianceReport {
  Estimate base;
  Estimate transformed;
  double analytic = 0.0;
  double combined_stderr() const;
  bool consistent(double band = 3.0) const;
};

// Plug-in MC estimates of the Gaussian KL mutual information before and
// after applying invertible affine maps to the two coordinates, on
// independent sample sets.
MiInvarianceReport mi_invariance_check(double rho, AffineMap t1, AffineMap t2, int m,
                                       std::uint64_t seed);

}  // namespace lsdiv
