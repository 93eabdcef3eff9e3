#include "lsdiv/densities.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "lsdiv/quadrature.hpp"

namespace lsdiv {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kPi = 3.14159265358979323846;

std::string fmt_param(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

// Marsaglia-Tsang gamma sampler; alpha < 1 handled by the boost trick.
double sample_gamma(CounterRng& rng, double alpha) {
  if (alpha < 1.0) {
    const double u = rng.next_unit();
    return sample_gamma(rng, alpha + 1.0) * std::pow(u, 1.0 / alpha);
  }
  const double d = alpha - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.next_normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.next_unit();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

class NormalDensity final : public StandardDensity {
 public:
  explicit NormalDensity(int dim) : dim_(dim) {
    if (dim < 1) throw std::invalid_argument("normal: dim must be >= 1");
  }
  std::string name() const override {
    return dim_ == 1 ? "normal" : "mvn(d=" + std::to_string(dim_) + ")";
  }
  std::string family() const override { return "normal"; }
  int dim() const override { return dim_; }
  double log_pdf1(double x) const override { return -0.5 * (kLog2Pi + x * x); }
  double log_pdf(const Vector& x) const override {
    return -0.5 * (dim_ * kLog2Pi + x.squaredNorm());
  }
  bool has_sampler() const override { return true; }
  double sample1(CounterRng& rng) const override { return rng.next_normal(); }
  void sample(CounterRng& rng, Eigen::Ref<Vector> out) const override {
    for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = rng.next_normal();
  }
  bool has_analytic_score() const override { return true; }
  double analytic_score(double x) const override { return -x; }
  bool is_even() const override { return dim_ == 1; }

 private:
  int dim_;
};

class CauchyDensity final : public StandardDensity {
 public:
  std::string name() const override { return "cauchy"; }
  std::string family() const override { return "cauchy"; }
  double log_pdf1(double x) const override { return -std::log(kPi) - std::log1p(x * x); }
  bool has_sampler() const override { return true; }
  double sample1(CounterRng& rng) const override {
    return std::tan(kPi * (rng.next_unit() - 0.5));
  }
  bool has_analytic_score() const override { return true; }
  double analytic_score(double x) const override { return -2.0 * x / (1.0 + x * x); }
  bool is_even() const override { return true; }
};

class LaplaceDensity final : public StandardDensity {
 public:
  std::string name() const override { return "laplace"; }
  std::string family() const override { return "laplace"; }
  double log_pdf1(double x) const override { return -std::log(2.0) - std::abs(x); }
  bool has_sampler() const override { return true; }
  double sample1(CounterRng& rng) const override {
    const double u = rng.next_unit();
    return u < 0.5 ? std::log(2.0 * u) : -std::log(2.0 * (1.0 - u));
  }
  bool has_analytic_score() const override { return true; }
  double analytic_score(double x) const override {
    if (x == 0.0) throw std::domain_error("laplace: score undefined at 0");
    return x > 0.0 ? -1.0 : 1.0;
  }
  bool is_even() const override { return true; }
};

class LogisticDensity final : public StandardDensity {
 public:
  std::string name() const override { return "logistic"; }
  std::string family() const override { return "logistic"; }
  double log_pdf1(double x) const override {
    const double a = std::abs(x);
    return -a - 2.0 * std::log1p(std::exp(-a));
  }
  bool has_sampler() const override { return true; }
  double sample1(CounterRng& rng) const override {
    const double u = rng.next_unit();
    return std::log(u / (1.0 - u));
  }
  bool has_analytic_score() const override { return true; }
  double analytic_score(double x) const override { return -std::tanh(0.5 * x); }
  bool is_even() const override { return true; }
};

class StudentTDensity final : public StandardDensity {
 public:
  explicit StudentTDensity(double nu) : nu_(nu) {
    if (!(nu > 0.0)) throw std::invalid_argument("student: nu must be positive");
    log_norm_ = std::lgamma(0.5 * (nu_ + 1.0)) - std::lgamma(0.5 * nu_) -
                0.5 * std::log(nu_ * kPi);
  }
  std::string name() const override { return "student(nu=" + fmt_param(nu_) + ")"; }
  std::string family() const override { return "student"; }
  std::map<std::string, double> shape() const override { return {{"nu", nu_}}; }
  double log_pdf1(double x) const override {
    return log_norm_ - 0.5 * (nu_ + 1.0) * std::log1p(x * x / nu_);
  }
  bool has_sampler() const override { return true; }
  double sample1(CounterRng& rng) const override {
    const double z = rng.next_normal();
    const double chi2 = 2.0 * sample_gamma(rng, 0.5 * nu_);
    return z * std::sqrt(nu_ / chi2);
  }
  bool has_analytic_score() const override { return true; }
  double analytic_score(double x) const override {
    return -(nu_ + 1.0) * x / (nu_ + x * x);
  }
  bool is_even() const override { return true; }

 private:
  double nu_;
  double log_norm_;
};

class HalfNormalDensity final : public StandardDensity {
 public:
  std::string name() const override { return "halfnormal"; }
  std::string family() const override { return "halfnormal"; }
  Support support() const override { return Support::half_line; }
  double log_pdf1(double x) const override {
    if (x < 0.0) return -kInf;
    return 0.5 * std::log(2.0 / kPi) - 0.5 * x * x;
  }
  bool has_sampler() const override { return true; }
  double sample1(CounterRng& rng) const override { return std::abs(rng.next_normal()); }
  bool has_analytic_score() const override { return true; }
  double analytic_score(double x) const override {
    if (x <= 0.0) throw std::domain_error("halfnormal: score needs x > 0");
    return -x;
  }
};

class ExponentialDensity final : public StandardDensity {
 public:
  std::string name() const override { return "exponential"; }
  std::string family() const override { return "exponential"; }
  Support support() const override { return Support::half_line; }
  double log_pdf1(double x) const override { return x < 0.0 ? -kInf : -x; }
  bool has_sampler() const override { return true; }
  double sample1(CounterRng& rng) const override { return -std::log(rng.next_unit()); }
  bool has_analytic_score() const override { return true; }
  double analytic_score(double x) const override {
    if (x <= 0.0) throw std::domain_error("exponential: score needs x > 0");
    return -1.0;
  }
};

class RayleighDensity final : public StandardDensity {
 public:
  std::string name() const override { return "rayleigh"; }
  std::string family() const override { return "rayleigh"; }
  Support support() const override { return Support::half_line; }
  double log_pdf1(double x) const override {
    if (x <= 0.0) return -kInf;
    return std::log(x) - 0.5 * x * x;
  }
  bool has_sampler() const override { return true; }
  double sample1(CounterRng& rng) const override {
    return std::sqrt(-2.0 * std::log(rng.next_unit()));
  }
  bool has_analytic_score() const override { return true; }
  double analytic_score(double x) const override {
    if (x <= 0.0) throw std::domain_error("rayleigh: score needs x > 0");
    return 1.0 / x - x;
  }
};

class WeibullDensity final : public StandardDensity {
 public:
  explicit WeibullDensity(double k) : k_(k) {
    if (!(k > 0.0)) throw std::invalid_argument("weibull: k must be positive");
  }
  std::string name() const override { return "weibull(k=" + fmt_param(k_) + ")"; }
  std::string family() const override { return "weibull"; }
  Support support() const override { return Support::half_line; }
  std::map<std::string, double> shape() const override { return {{"k", k_}}; }
  double log_pdf1(double x) const override {
    if (x < 0.0) return -kInf;
    if (x == 0.0) return k_ == 1.0 ? 0.0 : (k_ > 1.0 ? -kInf : kInf);
    return std::log(k_) + (k_ - 1.0) * std::log(x) - std::pow(x, k_);
  }
  bool has_sampler() const override { return true; }
  double sample1(CounterRng& rng) const override {
    return std::pow(-std::log(rng.next_unit()), 1.0 / k_);
  }
  bool has_analytic_score() const override { return true; }
  double analytic_score(double x) const override {
    if (x <= 0.0) throw std::domain_error("weibull: score needs x > 0");
    return (k_ - 1.0) / x - k_ * std::pow(x, k_ - 1.0);
  }

 private:
  double k_;
};

class LogNormalDensity final : public StandardDensity {
 public:
  explicit LogNormalDensity(double sigma) : sigma_(sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("lognormal: sigma must be positive");
  }
  std::string name() const override { return "lognormal(sigma=" + fmt_param(sigma_) + ")"; }
  std::string family() const override { return "lognormal"; }
  Support support() const override { return Support::half_line; }
  std::map<std::string, double> shape() const override { return {{"sigma", sigma_}}; }
  double log_pdf1(double x) const override {
    if (x <= 0.0) return -kInf;
    const double lx = std::log(x);
    return -lx - std::log(sigma_) - 0.5 * kLog2Pi - 0.5 * lx * lx / (sigma_ * sigma_);
  }
  bool has_sampler() const override { return true; }
  double sample1(CounterRng& rng) const override {
    return std::exp(sigma_ * rng.next_normal());
  }
  bool has_analytic_score() const override { return true; }
  double analytic_score(double x) const override {
    if (x <= 0.0) throw std::domain_error("lognormal: score needs x > 0");
    return -(1.0 + std::log(x) / (sigma_ * sigma_)) / x;
  }

 private:
  double sigma_;
};

// Shifted unit density: non-regular (infinite Fisher information), so the
// divergence and Fisher modules refuse it.
class Uniform01Density final : public StandardDensity {
 public:
  std::string name() const override { return "uniform01"; }
  std::string family() const override { return "uniform01"; }
  Support support() const override { return Support::unit_interval; }
  double log_pdf1(double x) const override {
    return (x >= 0.0 && x <= 1.0) ? 0.0 : -kInf;
  }
  bool has_sampler() const override { return true; }
  double sample1(CounterRng& rng) const override { return rng.next_unit(); }
  bool has_analytic_score() const override { return true; }
  double analytic_score(double x) const override {
    if (x <= 0.0 || x >= 1.0) throw std::domain_error("uniform01: score undefined");
    return 0.0;
  }
  bool is_regular() const override { return false; }
};

class RadialProfileDensity final : public StandardDensity {
 public:
  explicit RadialProfileDensity(ProfileFunction h) : h_(std::move(h)) {}
  std::string name() const override {
    return "elliptical(d=" + std::to_string(h_.dim()) + ")";
  }
  std::string family() const override { return "elliptical"; }
  int dim() const override { return h_.dim(); }
  double log_pdf1(double x) const override { return std::log(h_(x * x)); }
  double log_pdf(const Vector& x) const override { return std::log(h_(x.squaredNorm())); }

 private:
  ProfileFunction h_;
};

}  // namespace

bool in_support(Support s, double x) {
  switch (s) {
    case Support::half_line:
      return x >= 0.0;
    case Support::unit_interval:
      return x >= 0.0 && x <= 1.0;
    case Support::real_line:
    default:
      return true;
  }
}

double StandardDensity::log_pdf1(double) const {
  throw std::domain_error(name() + ": scalar evaluation needs d=1");
}

double StandardDensity::log_pdf(const Vector& x) const {
  if (dim() != 1 || x.size() != 1) {
    throw std::domain_error(name() + ": dimension mismatch");
  }
  return log_pdf1(x(0));
}

double StandardDensity::pdf1(double x) const { return std::exp(log_pdf1(x)); }
double StandardDensity::pdf(const Vector& x) const { return std::exp(log_pdf(x)); }

double StandardDensity::sample1(CounterRng&) const {
  throw CapabilityError(name() + ": no sampler");
}

void StandardDensity::sample(CounterRng& rng, Eigen::Ref<Vector> out) const {
  if (dim() != 1 || out.size() != 1) {
    throw CapabilityError(name() + ": no multivariate sampler");
  }
  out(0) = sample1(rng);
}

double StandardDensity::analytic_score(double) const {
  throw CapabilityError(name() + ": no analytic score");
}

double score(const StandardDensity& p, double x) {
  if (p.dim() != 1) throw std::domain_error("score: requires d=1");
  if (!in_support(p.support(), x)) throw std::domain_error("score: x outside support");
  if (p.has_analytic_score()) return p.analytic_score(x);
  const double h = 1e-6 * std::max(1.0, std::abs(x));
  auto central = [&](double step) {
    return (p.log_pdf1(x + step) - p.log_pdf1(x - step)) / (2.0 * step);
  };
  const double d1 = central(h);
  const double d2 = central(0.5 * h);
  if (!std::isfinite(d1) || !std::isfinite(d2)) {
    throw std::domain_error("score: log-density not differentiable at x");
  }
  return (4.0 * d2 - d1) / 3.0;  // Richardson extrapolation
}

LocationScaleDensity::LocationScaleDensity(DensityPtr base, GroupElement g)
    : base_(std::move(base)), g_(std::move(g)) {
  if (!base_) throw std::domain_error("LocationScaleDensity: null base");
  if (base_->dim() != g_.dim()) {
    throw std::domain_error("LocationScaleDensity: base/group dimension mismatch");
  }
  switch (base_->support()) {
    case Support::half_line:
      if (g_.loc().cwiseAbs().maxCoeff() != 0.0) {
        throw std::domain_error(base_->name() +
                                ": half-line support admits the scale subgroup only");
      }
      break;
    case Support::unit_interval:
      if ((g_.scale() - Matrix::Identity(g_.dim(), g_.dim())).cwiseAbs().maxCoeff() != 0.0) {
        throw std::domain_error(base_->name() +
                                ": interval support admits the location subgroup only");
      }
      break;
    case Support::real_line:
      break;
  }
  identity_g_ = g_.is_identity();
  scale_inv_ = identity_g_ ? Matrix::Identity(g_.dim(), g_.dim()) : inverse(g_.scale());
  log_det_scale_ = identity_g_ ? 0.0 : log_abs_det(g_.scale());
}

double LocationScaleDensity::log_pdf1(double x) const {
  if (dim() != 1) throw std::domain_error("log_pdf1: requires d=1");
  if (identity_g_) return base_->log_pdf1(x);
  return base_->log_pdf1((x - g_.loc()(0)) * scale_inv_(0, 0)) - log_det_scale_;
}

double LocationScaleDensity::log_pdf(const Vector& x) const {
  if (x.size() != g_.dim()) throw std::domain_error("log_pdf: dimension mismatch");
  if (identity_g_) return base_->log_pdf(x);
  return base_->log_pdf(scale_inv_ * (x - g_.loc())) - log_det_scale_;
}

double LocationScaleDensity::pdf1(double x) const { return std::exp(log_pdf1(x)); }

double LocationScaleDensity::sample1(CounterRng& rng) const {
  if (dim() != 1) throw std::domain_error("sample1: requires d=1");
  const double z = base_->sample1(rng);
  return identity_g_ ? z : g_.scale()(0, 0) * z + g_.loc()(0);
}

void LocationScaleDensity::sample(CounterRng& rng, Eigen::Ref<Vector> out) const {
  base_->sample(rng, out);
  if (!identity_g_) out = (g_.scale() * out + g_.loc()).eval();
}

LocationScaleDensity acted(const LocationScaleDensity& p, const GroupElement& g) {
  return LocationScaleDensity(p.base_ptr(), compose(g, p.g()));
}

ProfileFunction::ProfileFunction(std::function<double(double)> h, int dim)
    : h_(std::move(h)), dim_(dim) {
  if (dim_ < 1) throw std::invalid_argument("ProfileFunction: dim must be >= 1");
  if (!h_) throw std::invalid_argument("ProfileFunction: empty function");
  // total mass = S_{d-1} * int_0^inf h(r^2) r^{d-1} dr
  const double surface = 2.0 * std::pow(kPi, 0.5 * dim_) / std::tgamma(0.5 * dim_);
  auto radial = [this](double r) { return h_(r * r) * std::pow(r, dim_ - 1); };
  QuadratureResult q = integrate_or_throw(radial, Domain::half_line(), 1e-9);
  const double mass = surface * q.value;
  if (!(std::abs(mass - 1.0) <= 1e-5)) {
    throw std::domain_error("ProfileFunction: h is not normalized for d=" +
                            std::to_string(dim_) + " (mass " + std::to_string(mass) + ")");
  }
}

LocationScaleDensity elliptical(const ProfileFunction& h, const Vector& mu, const SpdMatrix& v) {
  if (mu.size() != h.dim() || v.dim() != h.dim()) {
    throw std::domain_error("elliptical: dimension mismatch");
  }
  auto base = std::make_shared<RadialProfileDensity>(h);
  return LocationScaleDensity(base, GroupElement(mu, spd_sqrt(v)));
}

LocationScaleDensity pushforward_exp(const LocationScaleDensity& normal_density) {
  if (normal_density.dim() != 1 || normal_density.base().family() != "normal") {
    throw std::domain_error("pushforward_exp: expected a univariate normal");
  }
  const double mu = normal_density.g().loc1();
  const double sigma = normal_density.g().scale1();
  auto base = std::make_shared<LogNormalDensity>(sigma);
  return LocationScaleDensity(base, GroupElement(0.0, std::exp(mu)));
}

// ---- registry and parsing --------------------------------------------------

DensityPtr make_standard_density(const std::string& family,
                                 const std::map<std::string, double>& shape, int dim) {
  auto get = [&shape](const char* key, double fallback, bool required) {
    auto it = shape.find(key);
    if (it != shape.end()) return it->second;
    if (required) throw std::invalid_argument(std::string("missing shape parameter ") + key);
    return fallback;
  };
  auto expect_univariate = [&] {
    if (dim != 1) throw std::invalid_argument(family + ": only d=1 is available");
  };
  if (family == "normal" || family == "mvn") {
    return std::make_shared<NormalDensity>(dim);
  }
  expect_univariate();
  if (family == "cauchy") return std::make_shared<CauchyDensity>();
  if (family == "laplace") return std::make_shared<LaplaceDensity>();
  if (family == "logistic") return std::make_shared<LogisticDensity>();
  if (family == "student") return std::make_shared<StudentTDensity>(get("nu", 0, true));
  if (family == "halfnormal") return std::make_shared<HalfNormalDensity>();
  if (family == "exponential") return std::make_shared<ExponentialDensity>();
  if (family == "rayleigh") return std::make_shared<RayleighDensity>();
  if (family == "weibull") return std::make_shared<WeibullDensity>(get("k", 0, true));
  if (family == "lognormal") return std::make_shared<LogNormalDensity>(get("sigma", 1.0, false));
  if (family == "uniform01") return std::make_shared<Uniform01Density>();
  throw std::invalid_argument("unknown family: " + family);
}

std::vector<std::string> registered_families() {
  return {"normal",      "mvn",         "cauchy",  "laplace",  "logistic", "student",
          "halfnormal",  "exponential", "rayleigh", "weibull", "lognormal", "uniform01"};
}

namespace {

struct ParamValue {
  enum class Kind { scalar, vector, matrix } kind = Kind::scalar;
  double s = 0.0;
  Vector v;
  Matrix m;
};

struct Parser {
  const std::string& text;
  size_t pos = 0;

  explicit Parser(const std::string& t) : text(t) {}

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  bool eat(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!eat(c)) {
      throw std::invalid_argument("parse error in '" + text + "': expected '" +
                                  std::string(1, c) + "' at position " + std::to_string(pos));
    }
  }
  std::string ident() {
    skip_ws();
    size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) {
      ++pos;
    }
    if (pos == start) {
      throw std::invalid_argument("parse error in '" + text + "': expected identifier");
    }
    return text.substr(start, pos - start);
  }
  double number() {
    skip_ws();
    size_t consumed = 0;
    double v;
    try {
      v = std::stod(text.substr(pos), &consumed);
    } catch (const std::exception&) {
      throw std::invalid_argument("parse error in '" + text + "': expected number");
    }
    pos += consumed;
    return v;
  }
  std::vector<double> number_list() {
    std::vector<double> out;
    expect('[');
    if (!eat(']')) {
      do {
        out.push_back(number());
      } while (eat(','));
      expect(']');
    }
    return out;
  }
  ParamValue value() {
    skip_ws();
    ParamValue pv;
    if (pos < text.size() && text[pos] == '[') {
      size_t probe = pos + 1;
      while (probe < text.size() && std::isspace(static_cast<unsigned char>(text[probe]))) ++probe;
      if (probe < text.size() && text[probe] == '[') {
        // matrix: [[..],[..]]
        expect('[');
        std::vector<std::vector<double>> rows;
        do {
          rows.push_back(number_list());
        } while (eat(','));
        expect(']');
        const size_t cols = rows.front().size();
        for (const auto& r : rows) {
          if (r.size() != cols) throw std::invalid_argument("matrix rows have unequal length");
        }
        pv.kind = ParamValue::Kind::matrix;
        pv.m.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
        for (size_t i = 0; i < rows.size(); ++i) {
          for (size_t j = 0; j < cols; ++j) pv.m(static_cast<Eigen::Index>(i),
                                                 static_cast<Eigen::Index>(j)) = rows[i][j];
        }
        return pv;
      }
      auto nums = number_list();
      pv.kind = ParamValue::Kind::vector;
      pv.v = Eigen::Map<const Vector>(nums.data(), static_cast<Eigen::Index>(nums.size()));
      return pv;
    }
    pv.kind = ParamValue::Kind::scalar;
    pv.s = number();
    return pv;
  }
};

struct ParsedSpec {
  std::string family;
  std::map<std::string, ParamValue> params;
};

ParsedSpec parse_spec(const std::string& text) {
  Parser p(text);
  ParsedSpec spec;
  spec.family = p.ident();
  if (p.eat('(')) {
    if (!p.eat(')')) {
      do {
        std::string key = p.ident();
        p.expect('=');
        spec.params[key] = p.value();
      } while (p.eat(','));
      p.expect(')');
    }
  }
  p.skip_ws();
  if (p.pos != text.size()) {
    throw std::invalid_argument("parse error in '" + text + "': trailing characters");
  }
  return spec;
}

// Key-value list without a family name, e.g. "l=1,s=2" or "l=[1,2],P=[[...]]".
std::map<std::string, ParamValue> parse_kv_list(const std::string& text) {
  Parser p(text);
  std::map<std::string, ParamValue> params;
  p.skip_ws();
  if (p.pos != text.size()) {
    do {
      std::string key = p.ident();
      p.expect('=');
      params[key] = p.value();
    } while (p.eat(','));
  }
  p.skip_ws();
  if (p.pos != text.size()) {
    throw std::invalid_argument("parse error in '" + text + "': trailing characters");
  }
  return params;
}

GroupElement group_from_params(const std::map<std::string, ParamValue>& params, int dim) {
  auto l_it = params.find("l");
  auto s_it = params.find("s");
  auto p_it = params.find("P");
  if (s_it != params.end() && p_it != params.end()) {
    throw std::invalid_argument("give either s or P, not both");
  }
  Vector loc = Vector::Zero(dim);
  if (l_it != params.end()) {
    if (l_it->second.kind == ParamValue::Kind::scalar) {
      if (dim != 1) throw std::invalid_argument("l must be a vector for d > 1");
      loc(0) = l_it->second.s;
    } else if (l_it->second.kind == ParamValue::Kind::vector) {
      if (l_it->second.v.size() != dim) throw std::invalid_argument("l has wrong dimension");
      loc = l_it->second.v;
    } else {
      throw std::invalid_argument("l must be a scalar or vector");
    }
  }
  if (p_it != params.end()) {
    if (p_it->second.kind != ParamValue::Kind::matrix ||
        p_it->second.m.rows() != dim || p_it->second.m.cols() != dim) {
      throw std::invalid_argument("P must be a d x d matrix");
    }
    try {
      return GroupElement(loc, SpdMatrix(p_it->second.m));
    } catch (const std::domain_error& e) {
      throw std::invalid_argument(std::string("P: ") + e.what());
    }
  }
  double s = 1.0;
  if (s_it != params.end()) {
    if (s_it->second.kind != ParamValue::Kind::scalar) {
      throw std::invalid_argument("s must be a scalar");
    }
    s = s_it->second.s;
  }
  if (!(s > 0.0)) throw std::invalid_argument("s must be positive");
  Matrix p = Matrix::Identity(dim, dim) * s;
  return GroupElement(loc, SpdMatrix(p));
}

LocationScaleDensity build_density(const ParsedSpec& spec) {
  std::map<std::string, double> shape;
  int dim = 1;
  for (const auto& [key, val] : spec.params) {
    if (key == "l" || key == "s" || key == "P") continue;
    if (val.kind != ParamValue::Kind::scalar) {
      throw std::invalid_argument("shape parameter " + key + " must be a scalar");
    }
    if (key == "d") {
      dim = static_cast<int>(val.s);
      if (dim < 1 || val.s != dim) throw std::invalid_argument("d must be a positive integer");
      continue;
    }
    shape[key] = val.s;
  }
  auto l_it = spec.params.find("l");
  if (l_it != spec.params.end() && l_it->second.kind == ParamValue::Kind::vector) {
    dim = static_cast<int>(l_it->second.v.size());
  }
  auto p_it = spec.params.find("P");
  if (p_it != spec.params.end() && p_it->second.kind == ParamValue::Kind::matrix) {
    dim = static_cast<int>(p_it->second.m.rows());
  }
  DensityPtr base = make_standard_density(spec.family, shape, dim);
  GroupElement g = group_from_params(spec.params, dim);
  try {
    return LocationScaleDensity(std::move(base), std::move(g));
  } catch (const std::domain_error& e) {
    throw std::invalid_argument(e.what());
  }
}

}  // namespace

LocationScaleDensity parse_density(const std::string& text) {
  return build_density(parse_spec(text));
}

DensityPtr parse_standard_density(const std::string& text) {
  ParsedSpec spec = parse_spec(text);
  for (const char* key : {"l", "s", "P"}) {
    if (spec.params.count(key)) {
      throw std::invalid_argument("standard density spec must not carry group parameters");
    }
  }
  return build_density(spec).base_ptr();
}

GroupElement parse_group_element(const std::string& text, int dim) {
  auto params = parse_kv_list(text);
  if (dim <= 0) {
    dim = 1;
    auto l_it = params.find("l");
    if (l_it != params.end() && l_it->second.kind == ParamValue::Kind::vector) {
      dim = static_cast<int>(l_it->second.v.size());
    }
    auto p_it = params.find("P");
    if (p_it != params.end() && p_it->second.kind == ParamValue::Kind::matrix) {
      dim = static_cast<int>(p_it->second.m.rows());
    }
  }
  for (const auto& [key, val] : params) {
    (void)val;
    if (key != "l" && key != "s" && key != "P") {
      throw std::invalid_argument("unknown group parameter: " + key);
    }
  }
  return group_from_params(params, dim);
}

}  // namespace lsdiv
