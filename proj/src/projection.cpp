#include "lsdiv/projection.hpp"

#include <algorithm>
#include <cmath>

#include "lsdiv/rng.hpp"

namespace lsdiv {

namespace {

constexpr double kInvPhi = 0.6180339887498948482;

// Maps solver coordinates to a family element around the anchor.
// scale_only: P = exp(t0) * P0; location_only: l = l0 + t;
// location_scale: l = t.head(d), P = L L^T with log-diagonal Cholesky.
struct ParamMap {
  ProjectionMode mode;
  GroupElement anchor;
  int dim;

  int size() const {
    switch (mode) {
      case ProjectionMode::scale_only:
        return 1;
      case ProjectionMode::location_only:
        return dim;
      case ProjectionMode::location_scale:
      default:
        return dim + dim * (dim + 1) / 2;
    }
  }

  GroupElement to_group(const Vector& t) const {
    switch (mode) {
      case ProjectionMode::scale_only:
        return GroupElement::with_general_scale(anchor.loc(), std::exp(t(0)) * anchor.scale());
      case ProjectionMode::location_only:
        return GroupElement::with_general_scale(anchor.loc() + t, anchor.scale());
      case ProjectionMode::location_scale:
      default: {
        Matrix chol = Matrix::Zero(dim, dim);
        int idx = dim;
        for (int i = 0; i < dim; ++i) {
          for (int j = 0; j <= i; ++j) {
            chol(i, j) = (i == j) ? std::exp(t(idx)) : t(idx);
            ++idx;
          }
        }
        return GroupElement::with_general_scale(t.head(dim), chol * chol.transpose());
      }
    }
  }

  Vector start() const {
    Vector t = Vector::Zero(size());
    if (mode == ProjectionMode::location_scale) {
      Eigen::LLT<Matrix> llt(0.5 * (anchor.scale() + anchor.scale().transpose()));
      Matrix chol = llt.matrixL();
      t.head(dim) = anchor.loc();
      int idx = dim;
      for (int i = 0; i < dim; ++i) {
        for (int j = 0; j <= i; ++j) {
          t(idx++) = (i == j) ? std::log(chol(i, j)) : chol(i, j);
        }
      }
    }
    return t;
  }
};

struct Objective {
  const LocationScaleDensity& p;
  const DensityPtr& q_base;
  const FGenerator& f;
  const ProjectionOptions& opt;
  mutable std::optional<SampleSet> samples;  // fixed across all probes
  mutable SolverTrace* trace = nullptr;

  // Ladder: registered closed form, quadrature for d = 1, reduced Monte
  // Carlo on one fixed sample set. An explicit method override pins the
  // rung instead.
  double operator()(const GroupElement& h) const {
    if (trace) ++trace->objective_evaluations;
    LocationScaleDensity q_h(q_base, h);
    const Method method = opt.divergence.method;
    try {
      if (method == Method::auto_select || method == Method::closed_form) {
        if (f.name == "kl" && has_kl_closed(p, q_h)) return kl_closed(p, q_h);
        if (f.name == "reverse_kl" && has_kl_closed(q_h, p)) return kl_closed(q_h, p);
        if (method == Method::closed_form) {
          throw CapabilityError("projection: no closed-form objective for this pair");
        }
      }
      if (p.dim() == 1 && method != Method::monte_carlo) {
        DivergenceValue v = f_divergence_quadrature(p, q_h, f, opt.divergence.quad_tol);
        return v.diverged ? kInf : v.value;
      }
      if (!opt.divergence.seed.has_value()) {
        throw std::invalid_argument("projection: Monte Carlo objective needs a seed");
      }
      if (!samples.has_value()) {
        samples = SampleSet::from_standard(p.base_ptr(), opt.divergence.mc_samples,
                                           *opt.divergence.seed);
      }
      const EstimatorKind kind =
          f.differentiable_at_1 && f.f_prime ? EstimatorKind::bregman : EstimatorKind::plugin;
      return estimate_reduced(p.g(), h, p.base_ptr(), q_base, f, *samples, kind,
                              opt.divergence.partitions)
          .value;
    } catch (const AccuracyError&) {
      if (trace) ++trace->rejected_probes;
      return kInf;
    }
  }
};

struct LineResult {
  double t = 0.0;
  double value = kInf;
  bool feasible = true;
  bool attained = true;
};

// Bracket by doubling from t = 0, then golden-section to width `tol`.
// +inf probes are rejected; if nothing inside [-limit, limit] is finite the
// problem is reported infeasible.
LineResult golden_minimize(const std::function<double(double)>& phi, double limit, double tol,
                           SolverTrace* trace) {
  LineResult res;
  double tm = 0.0;
  double fm = phi(tm);
  if (!std::isfinite(fm)) {
    res.feasible = false;
    for (double t = -limit; t <= limit; t += 1.0) {
      const double ft = phi(t);
      if (std::isfinite(ft) && (!res.feasible || ft < fm)) {
        fm = ft;
        tm = t;
        res.feasible = true;
      }
    }
    if (!res.feasible) {
      res.value = kInf;
      return res;
    }
  }
  double step = 1.0;
  double ta = std::max(tm - step, -limit), fa = phi(ta);
  double tb = std::min(tm + step, limit), fb = phi(tb);
  int guard = 0;
  while (!(fm <= fa && fm <= fb) && guard++ < 200) {
    if (trace) ++trace->iterations;
    if (fa < fb) {  // walk left
      tb = tm;
      fb = fm;
      tm = ta;
      fm = fa;
      if (tm <= -limit) {
        res.attained = false;
        break;
      }
      step *= 2.0;
      ta = std::max(tm - step, -limit);
      fa = phi(ta);
    } else {  // walk right
      ta = tm;
      fa = fm;
      tm = tb;
      fm = fb;
      if (tm >= limit) {
        res.attained = false;
        break;
      }
      step *= 2.0;
      tb = std::min(tm + step, limit);
      fb = phi(tb);
    }
  }
  // golden section on [ta, tb]
  double a = ta, b = tb;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = phi(c), fd = phi(d);
  while (b - a > tol) {
    if (trace) ++trace->iterations;
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = phi(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = phi(d);
    }
  }
  res.t = 0.5 * (a + b);
  res.value = phi(res.t);
  if (fc < res.value) {
    res.t = c;
    res.value = fc;
  }
  if (fd < res.value) {
    res.t = d;
    res.value = fd;
  }
  if (fm < res.value) {
    res.t = tm;
    res.value = fm;
  }
  if (trace) trace->final_bracket = b - a;
  return res;
}

struct NmResult {
  Vector t;
  double value = kInf;
  bool feasible = false;
  double diameter = kInf;
};

NmResult nelder_mead(const std::function<double(const Vector&)>& phi, const Vector& start,
                     double initial_step, double tol, int max_iter, SolverTrace* trace) {
  const int n = static_cast<int>(start.size());
  std::vector<Vector> pts(n + 1, start);
  std::vector<double> vals(n + 1);
  for (int i = 1; i <= n; ++i) pts[i](i - 1) += initial_step;
  for (int i = 0; i <= n; ++i) vals[i] = phi(pts[i]);

  auto order = [&] {
    for (int i = 1; i <= n; ++i) {
      Vector pv = pts[i];
      double vv = vals[i];
      int j = i - 1;
      while (j >= 0 && vals[j] > vv) {
        pts[j + 1] = pts[j];
        vals[j + 1] = vals[j];
        --j;
      }
      pts[j + 1] = pv;
      vals[j + 1] = vv;
    }
  };
  auto diameter = [&] {
    double d = 0.0;
    for (int i = 1; i <= n; ++i) d = std::max(d, (pts[i] - pts[0]).norm());
    return d;
  };

  order();
  int iter = 0;
  while (iter++ < max_iter && diameter() > tol) {
    if (trace) ++trace->iterations;
    Vector centroid = Vector::Zero(n);
    for (int i = 0; i < n; ++i) centroid += pts[i];
    centroid /= n;

    Vector refl = centroid + (centroid - pts[n]);
    double f_refl = phi(refl);
    if (f_refl < vals[0]) {
      Vector expd = centroid + 2.0 * (centroid - pts[n]);
      double f_expd = phi(expd);
      if (f_expd < f_refl) {
        pts[n] = expd;
        vals[n] = f_expd;
      } else {
        pts[n] = refl;
        vals[n] = f_refl;
      }
    } else if (f_refl < vals[n - 1]) {
      pts[n] = refl;
      vals[n] = f_refl;
    } else {
      Vector contr = centroid + 0.5 * (pts[n] - centroid);
      double f_contr = phi(contr);
      if (f_contr < vals[n]) {
        pts[n] = contr;
        vals[n] = f_contr;
      } else {
        for (int i = 1; i <= n; ++i) {
          pts[i] = pts[0] + 0.5 * (pts[i] - pts[0]);
          vals[i] = phi(pts[i]);
        }
      }
    }
    order();
  }

  NmResult res;
  res.t = pts[0];
  res.value = vals[0];
  res.feasible = std::isfinite(vals[0]);
  res.diameter = diameter();
  return res;
}

void check_mode(const DensityPtr& base, ProjectionMode mode) {
  if (!base) throw std::domain_error("projection: null family base");
  if (!base->is_regular()) throw std::domain_error("projection: non-regular family refused");
  if (base->support() != Support::real_line && mode != ProjectionMode::scale_only) {
    throw std::domain_error(base->name() + ": projection over this family is scale-only");
  }
}

}  // namespace

ProjectionResult project_right(const LocationScaleDensity& p, const DensityPtr& q_base,
                               const FGenerator& f, ProjectionMode mode,
                               const GroupElement& anchor, const ProjectionOptions& opt) {
  check_mode(q_base, mode);
  if (!p.base().is_regular()) throw std::domain_error("projection: non-regular family refused");
  if (anchor.dim() != q_base->dim() || p.dim() != q_base->dim()) {
    throw std::domain_error("projection: dimension mismatch");
  }
  validate_generator(f);

  ProjectionResult result;
  result.side = ProjectionSide::right;
  Objective objective{p, q_base, f, opt, std::nullopt, &result.trace};
  ParamMap pm{mode, anchor, static_cast<int>(q_base->dim())};

  if (pm.size() == 1) {
    auto phi = [&](double t) {
      Vector v(1);
      v(0) = t;
      return objective(pm.to_group(v));
    };
    const double limit =
        mode == ProjectionMode::scale_only ? opt.log_scale_limit : opt.location_limit;
    LineResult line = golden_minimize(phi, limit, opt.golden_tol, &result.trace);
    result.feasible = line.feasible;
    result.attained = line.attained;
    result.min_value = line.value;
    if (line.feasible) {
      Vector v(1);
      v(0) = line.t;
      result.argmin = pm.to_group(v);
    } else {
      result.argmin = GroupElement::identity(q_base->dim());
    }
    return result;
  }

  auto phi = [&](const Vector& t) { return objective(pm.to_group(t)); };
  CounterRng rng(opt.restart_seed);
  NmResult best;
  for (int r = 0; r < std::max(1, opt.nm_restarts); ++r) {
    Vector start = pm.start();
    if (r > 0) {
      for (Eigen::Index i = 0; i < start.size(); ++i) start(i) += 0.5 * rng.next_normal();
    }
    NmResult nm = nelder_mead(phi, start, 0.5, opt.simplex_tol, 400 * pm.size(), &result.trace);
    if (nm.value < best.value) best = nm;
    ++result.trace.restarts;
  }
  result.feasible = best.feasible;
  result.attained = best.feasible;
  result.min_value = best.value;
  result.trace.final_bracket = best.diameter;
  result.argmin = best.feasible ? pm.to_group(best.t) : GroupElement::identity(q_base->dim());
  return result;
}

ProjectionResult project_right(const LocationScaleDensity& p, const DensityPtr& q_base,
                               const FGenerator& f, ProjectionMode mode,
                               const ProjectionOptions& opt) {
  return project_right(p, q_base, f, mode, GroupElement::identity(q_base->dim()), opt);
}

ProjectionResult project_left(const DensityPtr& p_base, const LocationScaleDensity& q,
                              const FGenerator& f, ProjectionMode mode,
                              const GroupElement& anchor, const ProjectionOptions& opt) {
  ProjectionResult result = project_right(q, p_base, conjugate(f), mode, anchor, opt);
  result.side = ProjectionSide::left;
  return result;
}

ProjectionResult project_left(const DensityPtr& p_base, const LocationScaleDensity& q,
                              const FGenerator& f, ProjectionMode mode,
                              const ProjectionOptions& opt) {
  return project_left(p_base, q, f, mode, GroupElement::identity(p_base->dim()), opt);
}

GIndependenceReport verify_g_independence(const DensityPtr& p_base, const DensityPtr& q_base,
                                          const FGenerator& f,
                                          const std::vector<GroupElement>& gs,
                                          ProjectionMode mode, const ProjectionOptions& opt) {
  if (gs.size() < 2) {
    throw std::domain_error("verify_g_independence: need at least 2 group elements");
  }
  GIndependenceReport report;
  const Eigen::Index d = p_base->dim();
  ProjectionResult canonical = project_right(
      LocationScaleDensity(p_base, GroupElement::identity(d)), q_base, f, mode, opt);
  report.canonical_argmin = canonical.argmin;
  report.all_converged = canonical.feasible && canonical.attained;

  double lo = kInf, hi = -kInf;
  for (const GroupElement& g : gs) {
    ProjectionResult res =
        project_right(LocationScaleDensity(p_base, g), q_base, f, mode, opt);
    report.minima.push_back(res.min_value);
    report.argmins.push_back(res.argmin);
    report.all_converged = report.all_converged && res.feasible && res.attained;
    lo = std::min(lo, res.min_value);
    hi = std::max(hi, res.min_value);

    GroupElement orbit = compose(g, canonical.argmin);
    const double dev_l = (res.argmin.loc() - orbit.loc()).cwiseAbs().maxCoeff();
    const double dev_p = (res.argmin.scale() - orbit.scale()).cwiseAbs().maxCoeff();
    report.max_orbit_deviation = std::max({report.max_orbit_deviation, dev_l, dev_p});
  }
  report.max_spread = hi - lo;
  return report;
}

}  // namespace lsdiv
