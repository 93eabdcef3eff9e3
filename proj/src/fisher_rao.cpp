#include "lsdiv/fisher_rao.hpp"

#include <cmath>

#include "lsdiv/quadrature.hpp"

namespace lsdiv {

namespace {

using Complex = std::complex<double>;

// Integral over R as two half-line integrals, so that no quadrature node
// lands exactly on x = 0 (scores may be kinked there).
double full_line_split(const std::function<double(double)>& f, double tol) {
  auto pos = [&f](double r) { return f(r); };
  auto neg = [&f](double r) { return f(-r); };
  return integrate_or_throw(pos, Domain::half_line(), 0.5 * tol).value +
         integrate_or_throw(neg, Domain::half_line(), 0.5 * tol).value;
}

double safe_acosh(double u) { return std::acosh(std::max(u, 1.0)); }

Complex to_complex(const HyperbolicPoint& p) { return Complex(p.x, p.y); }

HyperbolicPoint from_complex(HyperbolicModel model, Complex z) {
  return make_point(model, z.real(), z.imag());
}

}  // namespace

FisherMetric fisher_constants(const StandardDensity& p, double tol) {
  if (p.dim() != 1) throw std::domain_error("fisher_constants: d=1 required");
  if (!p.is_regular()) {
    throw std::domain_error("fisher_constants: non-regular family refused");
  }
  if (p.support() != Support::real_line) {
    throw std::domain_error("fisher_constants: full support R required");
  }
  const double inner_tol = 0.01 * tol;
  auto weighted = [&p](const std::function<double(double, double)>& h) {
    return [&p, h](double x) {
      const double w = p.pdf1(x);
      if (w == 0.0) return 0.0;
      return w * h(x, score(p, x));
    };
  };
  FisherMetric m;
  m.even_density = p.is_even();
  m.a2 = full_line_split(weighted([](double, double s) { return s * s; }), inner_tol);
  m.b2 = full_line_split(
      weighted([](double x, double s) { return (1.0 + x * s) * (1.0 + x * s); }), inner_tol);
  m.c = full_line_split(weighted([](double x, double s) { return s * (1.0 + x * s); }),
                        inner_tol);
  if (m.even_density && std::abs(m.c) < 1e-7) m.c = 0.0;
  if (!(m.b2 > 0.0) || m.a2 < 0.0) {
    throw AccuracyError("fisher_constants: quadrature produced invalid constants", m.b2);
  }
  m.curvature = -1.0 / m.b2;
  return m;
}

Matrix fisher_matrix(const FisherMetric& m, double /*l*/, double s) {
  if (!(s > 0.0)) throw std::domain_error("fisher_matrix: s must be positive");
  Matrix out(2, 2);
  const double inv_s2 = 1.0 / (s * s);
  out << m.a2 * inv_s2, m.c * inv_s2, m.c * inv_s2, m.b2 * inv_s2;
  return out;
}

double fisher_rao_distance(const FisherMetric& m, double l1, double s1, double l2, double s2) {
  if (!(s1 > 0.0) || !(s2 > 0.0)) {
    throw std::domain_error("fisher_rao_distance: scales must be positive");
  }
  if (!m.even_density || m.c != 0.0) {
    throw std::domain_error("fisher_rao_distance: requires an even density (c = 0)");
  }
  const double b = std::sqrt(m.b2);
  const double ratio = std::sqrt(m.a2) / b;
  const double dx = ratio * (l2 - l1);
  const double dy = s2 - s1;
  return b * safe_acosh(1.0 + (dx * dx + dy * dy) / (2.0 * s1 * s2));
}

HyperbolicPoint make_point(HyperbolicModel model, double x, double y) {
  if (!std::isfinite(x) || !std::isfinite(y)) {
    throw std::domain_error("hyperbolic point: coordinates must be finite");
  }
  if (model == HyperbolicModel::upper_plane) {
    if (!(y > 0.0)) throw std::domain_error("upper plane: y must be positive");
  } else {
    if (!(x * x + y * y < 1.0)) throw std::domain_error("disk model: |w| must be < 1");
  }
  return HyperbolicPoint{model, x, y};
}

HyperbolicPoint convert(const HyperbolicPoint& p, HyperbolicModel target) {
  make_point(p.model, p.x, p.y);  // re-validate the source invariant
  if (p.model == target) return p;
  const Complex i(0.0, 1.0);
  switch (p.model) {
    case HyperbolicModel::upper_plane: {
      const Complex w = (to_complex(p) - i) / (to_complex(p) + i);
      return convert(from_complex(HyperbolicModel::poincare_disk, w), target);
    }
    case HyperbolicModel::poincare_disk: {
      if (target == HyperbolicModel::upper_plane) {
        const Complex z = i * (1.0 + to_complex(p)) / (1.0 - to_complex(p));
        return from_complex(HyperbolicModel::upper_plane, z);
      }
      const double norm2 = p.x * p.x + p.y * p.y;
      return make_point(HyperbolicModel::klein_disk, 2.0 * p.x / (1.0 + norm2),
                        2.0 * p.y / (1.0 + norm2));
    }
    case HyperbolicModel::klein_disk:
    default: {
      const double norm2 = p.x * p.x + p.y * p.y;
      const double denom = 1.0 + std::sqrt(1.0 - norm2);
      HyperbolicPoint w = make_point(HyperbolicModel::poincare_disk, p.x / denom, p.y / denom);
      return convert(w, target);
    }
  }
}

double model_distance(const HyperbolicPoint& a, const HyperbolicPoint& b) {
  if (a.model != b.model) {
    throw std::domain_error("model_distance: points live in different models");
  }
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  switch (a.model) {
    case HyperbolicModel::upper_plane:
      return safe_acosh(1.0 + (dx * dx + dy * dy) / (2.0 * a.y * b.y));
    case HyperbolicModel::poincare_disk: {
      const double ra = 1.0 - (a.x * a.x + a.y * a.y);
      const double rb = 1.0 - (b.x * b.x + b.y * b.y);
      return safe_acosh(1.0 + 2.0 * (dx * dx + dy * dy) / (ra * rb));
    }
    case HyperbolicModel::klein_disk:
    default: {
      const double ra = 1.0 - (a.x * a.x + a.y * a.y);
      const double rb = 1.0 - (b.x * b.x + b.y * b.y);
      const double dot = a.x * b.x + a.y * b.y;
      return safe_acosh((1.0 - dot) / std::sqrt(ra * rb));
    }
  }
}

std::complex<double> mobius_apply(const Eigen::Matrix2cd& m, std::complex<double> z) {
  const Complex det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  if (std::abs(det - Complex(1.0, 0.0)) > 1e-10) {
    throw std::domain_error("mobius_apply: matrix must have determinant 1");
  }
  const Complex denom = m(1, 0) * z + m(1, 1);
  if (std::abs(denom) < 1e-300) {
    throw std::domain_error("mobius_apply: pole hit (cz + d = 0)");
  }
  return (m(0, 0) * z + m(0, 1)) / denom;
}

Eigen::Matrix2cd sl2_to_su11(const Eigen::Matrix2cd& m) {
  const Complex i(0.0, 1.0);
  Eigen::Matrix2cd cayley, cayley_inv;
  cayley << Complex(1.0), -i, Complex(1.0), i;
  cayley_inv << Complex(0.5), Complex(0.5), 0.5 * i, -0.5 * i;
  return cayley * m * cayley_inv;
}

}  // namespace lsdiv
