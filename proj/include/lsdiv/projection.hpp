#pragma once

#include <vector>

#include "lsdiv/divergence.hpp"

namespace lsdiv {

enum class ProjectionSide { right, left };

// Admissible subgroup to minimize over. Half-line families must use
// scale_only; location_only keeps the anchor's scale fixed (location
// subfamilies of a location-scale family).
enum class ProjectionMode { scale_only, location_only, location_scale };

struct SolverTrace {
  int objective_evaluations = 0;
  int iterations = 0;
  double final_bracket = 0.0;  // bracket width (golden) or simplex diameter (NM)
  int restarts = 0;
  int rejected_probes = 0;  // +inf or non-converging objective evaluations
};

struct ProjectionResult {
  GroupElement argmin = GroupElement::identity(1);
  double min_value = kInf;
  ProjectionSide side = ProjectionSide::right;
  bool feasible = true;  // at least one probe gave a finite objective
  bool attained = true;  // optimum found away from the search-box boundary
  SolverTrace trace;
};

struct ProjectionOptions {
  DivergenceOptions divergence;
  double log_scale_limit = 30.0;  // log s search box
  double location_limit = 1e6;
  double golden_tol = 1e-8;   // final bracket width, 1-D modes
  double simplex_tol = 1e-7;  // simplex diameter, Nelder-Mead modes
  int nm_restarts = 3;
  std::uint64_t restart_seed = 20240901;
};

// argmin over h of I_f(p : q_h), h ranging over the admissible subgroup
// around `anchor` (scale_only fixes the location at the anchor's,
// location_only fixes the scale at the anchor's).
ProjectionResult project_right(const LocationScaleDensity& p, const DensityPtr& q_base,
                               const FGenerator& f, ProjectionMode mode,
                               const GroupElement& anchor, const ProjectionOptions& opt = {});
ProjectionResult project_right(const LocationScaleDensity& p, const DensityPtr& q_base,
                               const FGenerator& f, ProjectionMode mode,
                               const ProjectionOptions& opt = {});

// argmin over g of I_f(p_g : q); runs project_right with the conjugate
// generator and the arguments swapped.
ProjectionResult project_left(const DensityPtr& p_base, const LocationScaleDensity& q,
                              const FGenerator& f, ProjectionMode mode,
                              const GroupElement& anchor, const ProjectionOptions& opt = {});
ProjectionResult project_left(const DensityPtr& p_base, const LocationScaleDensity& q,
                              const FGenerator& f, ProjectionMode mode,
                              const ProjectionOptions& opt = {});

struct GIndependenceReport {
  std::vector<double> minima;
  std::vector<GroupElement> argmins;
  GroupElement canonical_argmin = GroupElement::identity(1);  // h* at g = id
  double max_spread = 0.0;           // spread of the projected minima
  double max_orbit_deviation = 0.0;  // max |argmin(g) - g.h*| over coordinates
  bool all_converged = true;
};

// Projects p_g onto the q family for every g in gs. Theorem-level
// predictions: the minima agree and argmin(g) = g.h*.
GIndependenceReport verify_g_independence(const DensityPtr& p_base, const DensityPtr& q_base,
                                          const FGenerator& f,
                                          const std::vector<GroupElement>& gs,
                                          ProjectionMode mode,
                                          const ProjectionOptions& opt = {});

}  // namespace lsdiv
