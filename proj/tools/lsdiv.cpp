#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "lsdiv/divergence.hpp"
#include "lsdiv/fisher_rao.hpp"
#include "lsdiv/projection.hpp"
#include "lsdiv/selftest.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace lsdiv;

// Numeric fields are finite or the literal "inf"; NaN is never serialized.
json num(double v) {
  if (std::isnan(v)) throw AccuracyError("NaN encountered while serializing output", v);
  if (std::isinf(v)) return json(v > 0 ? "inf" : "-inf");
  return json(v);
}

json vec_json(const Vector& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(num(v(i)));
  return arr;
}

json mat_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(num(m(i, j)));
    rows.push_back(r);
  }
  return rows;
}

json group_json(const GroupElement& g) {
  json out;
  if (g.dim() == 1) {
    out["l"] = num(g.loc1());
    out["s"] = num(g.scale1());
  } else {
    out["l"] = vec_json(g.loc());
    out["P"] = mat_json(g.scale());
  }
  return out;
}

void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
  if (j.is_object()) {
    for (const auto& [key, val] : j.items()) {
      flatten(val, prefix.empty() ? key : prefix + "." + key, out);
    }
  } else if (j.is_string()) {
    out.emplace_back(prefix, j.get<std::string>());
  } else {
    out.emplace_back(prefix, j.dump());
  }
}

void emit(const json& j, const std::string& format) {
  if (format == "json") {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::vector<std::pair<std::string, std::string>> fields;
  flatten(j, "", fields);
  if (format == "csv") {
    std::string header, values;
    for (size_t i = 0; i < fields.size(); ++i) {
      header += (i ? "," : "") + fields[i].first;
      values += (i ? "," : "") + fields[i].second;
    }
    std::cout << header << "\n" << values << "\n";
    return;
  }
  for (const auto& [key, val] : fields) {
    std::cout << key << "\t" << val << "\n";
  }
}

std::optional<std::uint64_t> env_seed() {
  const char* v = std::getenv("LSDIV_SEED");
  if (!v) return std::nullopt;
  return std::strtoull(v, nullptr, 10);
}

Method parse_method(const std::string& name) {
  if (name == "auto") return Method::auto_select;
  if (name == "closed") return Method::closed_form;
  if (name == "quadrature") return Method::quadrature;
  if (name == "mc") return Method::monte_carlo;
  throw std::invalid_argument("unknown method: " + name);
}

ProjectionMode parse_mode(const std::string& name) {
  if (name == "scale_only") return ProjectionMode::scale_only;
  if (name == "location_only") return ProjectionMode::location_only;
  if (name == "location_scale") return ProjectionMode::location_scale;
  throw std::invalid_argument("unknown mode: " + name);
}

struct CommonOpts {
  std::string format = "json";
  std::string method = "auto";
  double tol = 1e-9;
  int m = 200000;
  int partitions = 1;
  std::optional<std::uint64_t> seed;
};

DivergenceOptions divergence_options(const CommonOpts& c) {
  DivergenceOptions opt;
  opt.method = parse_method(c.method);
  opt.quad_tol = c.tol;
  opt.mc_samples = c.m;
  opt.partitions = c.partitions;
  opt.seed = c.seed ? c.seed : env_seed();
  if (opt.method == Method::monte_carlo && !opt.seed) {
    throw std::invalid_argument("method=mc needs --seed or LSDIV_SEED");
  }
  return opt;
}

int cmd_divergence(const std::string& gen, const std::string& p_spec, const std::string& q_spec,
                   const CommonOpts& copts) {
  LocationScaleDensity p = parse_density(p_spec);
  LocationScaleDensity q = parse_density(q_spec);
  FGenerator f = make_generator(gen);
  DivergenceOptions opt = divergence_options(copts);
  DivergenceValue v = f_divergence(p, q, f, opt);

  json out;
  out["schema"] = 1;
  out["command"] = "divergence";
  out["generator"] = f.name;
  out["p"] = p_spec;
  out["q"] = q_spec;
  out["value"] = num(v.value);
  out["method"] = method_name(v.method);
  out["diverged"] = v.diverged;
  if (v.stderr_) out["stderr"] = num(*v.stderr_);
  if (v.method == Method::monte_carlo) {
    out["m"] = opt.mc_samples;
    out["seed"] = *opt.seed;
    out["partitions"] = opt.partitions;
  }
  out["reduced"] = group_json(canonical_reduce(p.g(), q.g()));
  emit(out, copts.format);
  return 0;
}

int cmd_project(const std::string& side, const std::string& gen, const std::string& fixed_spec,
                const std::string& family_spec, const std::string& mode_name,
                const std::string& anchor_spec, const CommonOpts& copts) {
  FGenerator f = make_generator(gen);
  ProjectionMode mode = parse_mode(mode_name);
  DensityPtr family = parse_standard_density(family_spec);
  LocationScaleDensity fixed = parse_density(fixed_spec);
  ProjectionOptions opt;
  opt.divergence = divergence_options(copts);

  ProjectionResult res;
  if (side == "right") {
    if (anchor_spec.empty()) {
      res = project_right(fixed, family, f, mode, opt);
    } else {
      res = project_right(fixed, family, f, mode,
                          parse_group_element(anchor_spec, static_cast<int>(family->dim())), opt);
    }
  } else if (side == "left") {
    if (anchor_spec.empty()) {
      res = project_left(family, fixed, f, mode, opt);
    } else {
      res = project_left(family, fixed, f, mode,
                         parse_group_element(anchor_spec, static_cast<int>(family->dim())), opt);
    }
  } else {
    throw std::invalid_argument("--side must be right or left");
  }

  json out;
  out["schema"] = 1;
  out["command"] = "project";
  out["side"] = side;
  out["mode"] = mode_name;
  out["generator"] = f.name;
  out["family"] = family->name();
  out["fixed"] = fixed_spec;
  out["argmin"] = group_json(res.argmin);
  out["min"] = num(res.min_value);
  out["feasible"] = res.feasible;
  out["attained"] = res.attained;
  out["trace"] = {{"objective_evaluations", res.trace.objective_evaluations},
                  {"iterations", res.trace.iterations},
                  {"restarts", res.trace.restarts},
                  {"final_bracket", num(res.trace.final_bracket)},
                  {"rejected_probes", res.trace.rejected_probes}};
  emit(out, copts.format);
  return 0;
}

int cmd_fisher(const std::string& family_spec, bool constants, const std::string& p1_spec,
               const std::string& p2_spec, double tol, const CommonOpts& copts) {
  DensityPtr family = parse_standard_density(family_spec);
  FisherMetric m = fisher_constants(*family, tol);
  json out;
  out["schema"] = 1;
  out["command"] = "fisher";
  out["family"] = family->name();
  if (constants || p1_spec.empty()) {
    out["a2"] = num(m.a2);
    out["b2"] = num(m.b2);
    out["c"] = num(m.c);
    out["curvature"] = num(m.curvature);
    out["even_density"] = m.even_density;
  }
  if (!p1_spec.empty() || !p2_spec.empty()) {
    if (p1_spec.empty() || p2_spec.empty()) {
      throw std::invalid_argument("--distance needs both --p1 and --p2");
    }
    GroupElement a = parse_group_element(p1_spec, 1);
    GroupElement b = parse_group_element(p2_spec, 1);
    out["p1"] = group_json(a);
    out["p2"] = group_json(b);
    out["distance"] =
        num(fisher_rao_distance(m, a.loc1(), a.scale1(), b.loc1(), b.scale1()));
  }
  emit(out, copts.format);
  return 0;
}

int cmd_group(const std::string& op, const std::string& g1_spec, const std::string& g2_spec,
              const std::string& x_spec, const CommonOpts& copts) {
  json out;
  out["schema"] = 1;
  out["command"] = "group";
  out["op"] = op;
  if (op == "compose" || op == "reduce") {
    if (g1_spec.empty() || g2_spec.empty()) {
      throw std::invalid_argument("group " + op + " needs --g1 and --g2");
    }
    GroupElement g1 = parse_group_element(g1_spec);
    GroupElement g2 = parse_group_element(g2_spec, static_cast<int>(g1.dim()));
    GroupElement r = op == "compose" ? compose(g1, g2) : canonical_reduce(g1, g2);
    out["result"] = group_json(r);
  } else if (op == "inverse" || op == "matrix") {
    if (g1_spec.empty()) throw std::invalid_argument("group " + op + " needs --g");
    GroupElement g = parse_group_element(g1_spec);
    if (op == "inverse") {
      out["result"] = group_json(inverse(g));
    } else {
      out["result"] = mat_json(as_matrix(g));
    }
  } else if (op == "act") {
    if (g1_spec.empty() || x_spec.empty()) {
      throw std::invalid_argument("group act needs --g and --x");
    }
    GroupElement g = parse_group_element(g1_spec);
    if (g.dim() == 1) {
      out["result"] = num(act_on_point(g, std::stod(x_spec)));
    } else {
      LocationScaleDensity probe = parse_density("mvn(l=" + x_spec + ")");
      out["result"] = vec_json(act_on_point(g, probe.g().loc()));
    }
  } else {
    throw std::invalid_argument("unknown group op: " + op);
  }
  emit(out, copts.format);
  return 0;
}

int cmd_selftest(int criterion, std::uint64_t seed) {
  SelftestOptions opt;
  opt.seed = seed;
  std::vector<SelftestRow> rows =
      criterion == 0 ? run_selftest(opt) : run_selftest_criterion(criterion, opt);
  int failures = 0;
  for (const SelftestRow& row : rows) {
    std::cout << format_row(row) << "\n";
    if (!row.pass) ++failures;
  }
  std::cout << (failures == 0 ? "ALL PASS" : "FAILURES: " + std::to_string(failures)) << " ("
            << rows.size() << " rows)\n";
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"f-divergences, Monte Carlo estimation, information projections and "
               "Fisher-Rao distances for location-scale families"};
  app.require_subcommand(1);

  CommonOpts copts;
  std::uint64_t seed_flag = 0;
  bool seed_given = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--format", copts.format, "json|csv|table")->default_val("json");
    cmd->add_option("--method", copts.method, "auto|closed|quadrature|mc")->default_val("auto");
    cmd->add_option("--tol", copts.tol, "quadrature tolerance")->default_val(1e-9);
    cmd->add_option("--m", copts.m, "Monte Carlo sample count")->default_val(200000);
    cmd->add_option("--partitions", copts.partitions, "tree-summation partitions")->default_val(1);
    cmd->add_option("--seed", seed_flag, "RNG seed (default: LSDIV_SEED)")
        ->each([&seed_given](const std::string&) { seed_given = true; });
  };

  // divergence
  std::string gen = "kl", p_spec, q_spec;
  CLI::App* divergence = app.add_subcommand("divergence", "compute or estimate I_f(p : q)");
  divergence->add_option("--f", gen, "generator name")->default_val("kl");
  divergence->add_option("--p", p_spec, "first density, e.g. \"normal(l=0,s=1)\"")->required();
  divergence->add_option("--q", q_spec, "second density")->required();
  add_common(divergence);

  // project
  std::string side = "right", fixed_spec, family_spec, mode_name = "scale_only", anchor_spec;
  CLI::App* project = app.add_subcommand("project", "information projection onto a family");
  project->add_option("--side", side, "right|left")->default_val("right");
  project->add_option("--p", fixed_spec, "fixed density (right side) e.g. \"halfnormal(s=1)\"");
  project->add_option("--q", fixed_spec, "fixed density (left side)");
  project->add_option("--q-family", family_spec, "family to project onto (right side)");
  project->add_option("--p-family", family_spec, "family to minimize over (left side)");
  project->add_option("--f", gen, "generator name")->default_val("kl");
  project->add_option("--mode", mode_name, "scale_only|location_only|location_scale")
      ->default_val("scale_only");
  project->add_option("--anchor", anchor_spec, "fixed coordinates, e.g. \"l=0,s=2\"");
  add_common(project);

  // fisher
  std::string family_arg, p1_spec, p2_spec;
  bool constants = false;
  double fisher_tol = 1e-8;
  CLI::App* fisher = app.add_subcommand("fisher", "Fisher information and Fisher-Rao distance");
  fisher->add_option("--family", family_arg, "standard density, e.g. cauchy")->required();
  fisher->add_flag("--constants", constants, "emit (a2, b2, c, curvature)");
  fisher->add_option("--p1", p1_spec, "first point \"l=..,s=..\" (with --p2: distance)");
  fisher->add_option("--p2", p2_spec, "second point");
  fisher->add_option("--fisher-tol", fisher_tol, "quadrature tolerance for the constants")
      ->default_val(1e-8);
  add_common(fisher);

  // group
  std::string group_op, g1_spec, g2_spec, x_spec;
  CLI::App* group = app.add_subcommand("group", "location-scale group algebra");
  group->add_option("op", group_op, "compose|inverse|reduce|matrix|act")->required();
  group->add_option("--g1", g1_spec, "first element \"l=..,s=..\"");
  group->add_option("--g", g1_spec, "element (inverse/matrix/act)");
  group->add_option("--g2", g2_spec, "second element");
  group->add_option("--x", x_spec, "point for act");
  add_common(group);

  // selftest
  int criterion = 0;
  std::uint64_t selftest_seed = 20240901;
  CLI::App* selftest = app.add_subcommand("selftest", "run the acceptance reproduction table");
  selftest->add_option("--criterion", criterion, "restrict to one criterion (1..8)");
  selftest->add_option("--seed", selftest_seed, "table seed")->default_val(20240901);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (seed_given) copts.seed = seed_flag;
    if (divergence->parsed()) return cmd_divergence(gen, p_spec, q_spec, copts);
    if (project->parsed()) {
      return cmd_project(side, gen, fixed_spec, family_spec, mode_name, anchor_spec, copts);
    }
    if (fisher->parsed()) {
      return cmd_fisher(family_arg, constants, p1_spec, p2_spec, fisher_tol, copts);
    }
    if (group->parsed()) return cmd_group(group_op, g1_spec, g2_spec, x_spec, copts);
    if (selftest->parsed()) return cmd_selftest(criterion, selftest_seed);
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const CapabilityError& e) {
    std::cerr << "capability error: " << e.what() << "\n";
    return 3;
  } catch (const AccuracyError& e) {
    std::cerr << "accuracy error: " << e.what() << " (best estimate " << e.best_estimate()
              << ")\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
