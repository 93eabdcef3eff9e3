#include "lsdiv/quadrature.hpp"

#include <cmath>
#include <queue>
#include <vector>

namespace lsdiv {

namespace {

// Gauss-Kronrod 7-15 abscissae/weights on [-1,1]; even-indexed Kronrod
// nodes are the Gauss-7 nodes.
constexpr double kNodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr double kKronrodW[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

constexpr double kGaussW[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr int kMaxSubdivisions = 1 << 14;
constexpr double kValueCap = 1e6;
constexpr double kShellGrowth = 1.1;
constexpr int kShellRun = 10;

struct Panel {
  double lo, hi;
  double value, err;
  bool operator<(const Panel& other) const { return err < other.err; }
};

struct DivergedSignal {
  double sign;
};
struct NanSignal {};

double eval_gk15(const std::function<double(double)>& f, double a, double b, double* err) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double f0 = f(mid);
  double k15 = kKronrodW[7] * f0;
  double g7 = kGaussW[3] * f0;
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kNodes[i];
    const double fi = f(mid + dx) + f(mid - dx);
    k15 += kKronrodW[i] * fi;
    if (i % 2 == 1) g7 += kGaussW[i / 2] * fi;
  }
  k15 *= half;
  g7 *= half;
  if (err) {
    double e = 200.0 * std::abs(k15 - g7);
    *err = e * std::sqrt(e);
  }
  return k15;
}

Panel make_panel(const std::function<double(double)>& f, double a, double b) {
  Panel p;
  p.lo = a;
  p.hi = b;
  p.value = eval_gk15(f, a, b, &p.err);
  if (std::isnan(p.value)) throw NanSignal{};
  if (std::isinf(p.value)) throw DivergedSignal{p.value > 0 ? 1.0 : -1.0};
  return p;
}

// Shells peeled off while halving toward an open endpoint; monotone growth
// over a long run means the tail integral does not settle.
struct ShellTrack {
  std::vector<double> values;
  bool push_and_check(double v) {
    values.push_back(v);
    if (values.size() < static_cast<size_t>(kShellRun) + 1) return false;
    const size_t n = values.size();
    for (size_t i = n - kShellRun; i < n; ++i) {
      if (!(values[i - 1] > 0.0) || !(values[i] > kShellGrowth * values[i - 1])) return false;
    }
    return true;
  }
};

QuadratureResult adaptive(const std::function<double(double)>& f, double a, double b,
                          double target_tol) {
  QuadratureResult res;
  const double min_width = 1e-14 * (b - a);
  std::priority_queue<Panel> queue;
  ShellTrack left_shells, right_shells;
  double sum = 0.0, total_err = 0.0;

  try {
    Panel root = make_panel(f, a, b);
    sum = root.value;
    total_err = root.err;
    queue.push(root);

    while (total_err > target_tol && res.subdivisions < kMaxSubdivisions) {
      Panel worst = queue.top();
      if (worst.err <= 0.0 || worst.hi - worst.lo <= min_width) break;
      queue.pop();
      const double mid = 0.5 * (worst.lo + worst.hi);
      Panel lhs = make_panel(f, worst.lo, mid);
      Panel rhs = make_panel(f, mid, worst.hi);
      sum += lhs.value + rhs.value - worst.value;
      total_err += lhs.err + rhs.err - worst.err;
      queue.push(lhs);
      queue.push(rhs);
      ++res.subdivisions;

      if (std::abs(sum) > kValueCap) throw DivergedSignal{sum > 0 ? 1.0 : -1.0};
      if (worst.lo == a && left_shells.push_and_check(rhs.value)) throw DivergedSignal{1.0};
      if (worst.hi == b && right_shells.push_and_check(lhs.value)) throw DivergedSignal{1.0};
    }
  } catch (const DivergedSignal& s) {
    res.value = s.sign * kInf;
    res.abs_error_estimate = kInf;
    res.status = QuadStatus::diverged;
    return res;
  } catch (const NanSignal&) {
    throw AccuracyError("quadrature: integrand produced NaN", sum);
  }

  res.value = sum;
  res.abs_error_estimate = total_err;
  res.status = total_err <= target_tol ? QuadStatus::converged : QuadStatus::max_subdivisions;
  return res;
}

}  // namespace

double gk15(const std::function<double(double)>& f, double a, double b, double* err) {
  return eval_gk15(f, a, b, err);
}

QuadratureResult integrate(const std::function<double(double)>& f, const Domain& dom,
                           double target_tol) {
  if (!(target_tol > 0.0)) {
    throw std::domain_error("integrate: target_tol must be positive");
  }
  switch (dom.kind) {
    case Domain::Kind::finite:
      if (!(dom.a < dom.b)) throw std::domain_error("integrate: empty finite domain");
      return adaptive(f, dom.a, dom.b, target_tol);
    case Domain::Kind::half_line: {
      // x = t/(1-t), dx = dt/(1-t)^2, t in (0,1)
      auto g = [&f](double t) {
        const double om = 1.0 - t;
        return f(t / om) / (om * om);
      };
      return adaptive(g, 0.0, 1.0, target_tol);
    }
    case Domain::Kind::real_line:
    default: {
      // x = t/(1-t^2), dx = (1+t^2)/(1-t^2)^2 dt, t in (-1,1)
      auto g = [&f](double t) {
        const double om = 1.0 - t * t;
        return f(t / om) * (1.0 + t * t) / (om * om);
      };
      return adaptive(g, -1.0, 1.0, target_tol);
    }
  }
}

QuadratureResult integrate_or_throw(const std::function<double(double)>& f, const Domain& dom,
                                    double target_tol) {
  QuadratureResult res = integrate(f, dom, target_tol);
  if (res.status == QuadStatus::max_subdivisions) {
    throw AccuracyError("quadrature: subdivision cap reached without convergence", res.value);
  }
  return res;
}

}  // namespace lsdiv
