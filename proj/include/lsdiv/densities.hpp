#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "lsdiv/group.hpp"
#include "lsdiv/rng.hpp"

namespace lsdiv {

enum class Support { real_line, half_line, unit_interval };

bool in_support(Support s, double x);

// A standard density p = p_{0,I}: the family member at the group identity.
// Shape parameters (Weibull k, Student nu, ...) select the family and are
// not group coordinates.
class StandardDensity {
 public:
  virtual ~StandardDensity() = default;

  virtual std::string name() const = 0;    // registry form, e.g. "weibull(k=2)"
  virtual std::string family() const = 0;  // closed-form key, e.g. "weibull"
  virtual int dim() const { return 1; }
  virtual Support support() const { return Support::real_line; }
  virtual std::map<std::string, double> shape() const { return {}; }

  // log density; -inf encodes out-of-support.
  virtual double log_pdf1(double x) const;
  virtual double log_pdf(const Vector& x) const;
  double pdf1(double x) const;
  double pdf(const Vector& x) const;

  virtual bool has_sampler() const { return false; }
  virtual double sample1(CounterRng& rng) const;  // CapabilityError by default
  virtual void sample(CounterRng& rng, Eigen::Ref<Vector> out) const;

  virtual bool has_analytic_score() const { return false; }
  virtual double analytic_score(double x) const;

  virtual bool is_even() const { return false; }   // p(-x) = p(x), d = 1
  virtual bool is_regular() const { return true; } // finite Fisher information
};

using DensityPtr = std::shared_ptr<const StandardDensity>;

// p'(x)/p(x) for d = 1: analytic when the family provides it, otherwise
// Richardson-extrapolated central differences of log p with step
// 1e-6 * max(1, |x|). Non-differentiable points raise std::domain_error.
double score(const StandardDensity& p, double x);

// A standard density pushed forward by a group element:
// p_{l,P}(x) = |P|^{-1} p(P^{-1}(x - l)).
// Half-line and unit-interval supports admit only the subgroup that maps
// the support to itself (scale-only, respectively location-only).
class LocationScaleDensity {
 public:
  LocationScaleDensity(DensityPtr base, GroupElement g);

  const StandardDensity& base() const { return *base_; }
  const DensityPtr& base_ptr() const { return base_; }
  const GroupElement& g() const { return g_; }
  int dim() const { return static_cast<int>(g_.dim()); }

  double log_pdf1(double x) const;
  double log_pdf(const Vector& x) const;
  double pdf1(double x) const;

  double sample1(CounterRng& rng) const;
  void sample(CounterRng& rng, Eigen::Ref<Vector> out) const;

  bool is_standard() const { return identity_g_; }

 private:
  DensityPtr base_;
  GroupElement g_;
  Matrix scale_inv_;
  double log_det_scale_ = 0.0;
  bool identity_g_ = true;
};

// Further group action: (base, g0) acted on by g becomes (base, g.g0).
LocationScaleDensity acted(const LocationScaleDensity& p, const GroupElement& g);

// Normalized radial profile h: the density h(x^T x) on R^d must integrate
// to one (checked by radial quadrature within 1e-5 at construction).
class ProfileFunction {
 public:
  ProfileFunction(std::function<double(double)> h, int dim);
  double operator()(double u) const { return h_(u); }
  int dim() const { return dim_; }

 private:
  std::function<double(double)> h_;
  int dim_;
};

// Elliptical density |V|^{-1/2} h((x-mu)^T V^{-1} (x-mu)), realised as the
// location-scale element (mu, V^{1/2}) acting on p(x) = h(x^T x).
LocationScaleDensity elliptical(const ProfileFunction& h, const Vector& mu, const SpdMatrix& v);

// exp-pushforward of a univariate normal: the log-normal density on (0,inf).
LocationScaleDensity pushforward_exp(const LocationScaleDensity& normal_density);

// ---- family registry -------------------------------------------------------

DensityPtr make_standard_density(const std::string& family,
                                 const std::map<std::string, double>& shape, int dim = 1);

// Parses "name", "name(k=2)", "normal(l=0,s=1)", "mvn(d=3)",
// "mvn(l=[1,2],P=[[2,0],[0,1]])". Keys l, s, P are group coordinates;
// everything else is a shape parameter. Throws std::invalid_argument.
LocationScaleDensity parse_density(const std::string& text);
DensityPtr parse_standard_density(const std::string& text);

// Parses a bare coordinate list like "l=1,s=2" or "l=[1,2],P=[[2,0],[0,1]]";
// dim <= 0 infers the dimension from the vector/matrix entries.
GroupElement parse_group_element(const std::string& text, int dim = 0);

std::vector<std::string> registered_families();

}  // namespace lsdiv
