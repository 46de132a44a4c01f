#pragma once

// Command implementations behind the qeframe executable. Each command writes
// its report to `out`, diagnostics to `err`, and returns the process exit
// code: 0 verified, 1 verified-false, 2 input error, 3 precondition failure.

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "qeframe/problem_io.hpp"

namespace qeframe {

enum ExitCode : int { exit_ok = 0, exit_not_verified = 1, exit_input = 2, exit_precondition = 3 };

struct CommandOptions {
  std::optional<double> m;
  std::optional<double> lambda;
  std::optional<double> tol;
  std::string t_grid = "0.5:0.5:3";
  std::optional<std::string> csv_path;
  std::optional<std::string> json_path;
  int starts = 64;
  std::uint64_t seed = 7;
  MetricParameterization parameterization = MetricParameterization::Diagonal;
  std::optional<std::string> name;  // catalog entry filter

  NumericPolicy policy() const { return tol ? NumericPolicy::with_tolerance(*tol) : NumericPolicy{}; }
};

/// "start:step:stop" (inclusive) or a single value.
inline std::vector<double> parse_t_grid(const std::string& spec) {
  std::vector<double> parts;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = spec.find(':', pos);
    const std::string piece = spec.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(piece, &used));
      if (used != piece.size()) throw std::invalid_argument(piece);
    } catch (const std::exception&) {
      throw Error(Errc::invalid_input, "bad t-grid component '" + piece + "'");
    }
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  if (parts.size() == 1) return parts;
  if (parts.size() != 3) throw Error(Errc::invalid_input, "t-grid must be start:step:stop");
  const double start = parts[0], step = parts[1], stop = parts[2];
  if (!(step > 0.0) || stop < start) throw Error(Errc::invalid_input, "t-grid needs step > 0 and stop >= start");
  std::vector<double> out;
  for (int k = 0;; ++k) {
    const double t = start + k * step;
    if (t > stop + 1e-9 * step) break;
    out.push_back(t);
    if (k > 1000000) throw Error(Errc::invalid_input, "t-grid too long");
  }
  return out;
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline int exit_for(const Error& e) { return is_input_error(e.code()) ? exit_input : exit_precondition; }

inline void emit(const std::string& text, const std::optional<std::string>& path, std::ostream& out) {
  if (!path) {
    out << text;
    return;
  }
  std::ofstream f(*path);
  if (!f) throw Error(Errc::invalid_input, "cannot write " + *path);
  f << text;
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace detail

/// Runs a command body, mapping library errors to exit codes.
inline int guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return detail::exit_for(e);
  } catch (const Json::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_input;
  }
}

inline int cmd_verify(const Problem& p, const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  const NumericPolicy policy = opt.policy();
  const double m = opt.m.value_or(p.m.value_or(1.0));
  const FrameVector x = p.x_or_zero();
  const LambdaFit fit = fit_lambda(p.frame, p.g, x, m);
  std::string source = "fit";
  double lambda = fit.lambda;
  if (opt.lambda) {
    lambda = *opt.lambda;
    source = "flag";
  } else if (p.lambda) {
    lambda = *p.lambda;
    source = "file";
  }
  const QETriple triple{p.frame, p.g, x, m, lambda};
  const QEReport rep = qe_report(triple, policy);
  const KillingReport kill = is_killing(p.frame, p.g, x, policy);

  Json j;
  if (p.name) j["name"] = *p.name;
  j["residual"] = rep.residual_norm;
  j["lambda"] = lambda;
  j["lambda_source"] = source;
  j["lambda_fit"] = rep.lambda_fit;
  j["fit_residual"] = rep.fit_residual;
  j["m"] = m;
  j["x_norm"] = rep.x_norm;
  j["scal"] = rep.scal;
  j["trivial"] = rep.trivial;
  j["is_killing"] = kill.killing;
  j["killing_residual"] = kill.residual;
  j["positivity"] = rep.positivity;
  j["exclusion_check"] = exclusion_check(m, lambda);
  try {
    const PositivityResult pr = positivity_trichotomy(triple, policy);
    j["positivity_trichotomy"] = {{"kind", to_string(pr.kind)},
                                  {"value", pr.value},
                                  {"unit_nabla_sq", pr.unit_nabla_sq},
                                  {"nabla_x_norm", pr.nabla_x_norm}};
  } catch (const Error& e) {
    j["positivity_trichotomy"] = {{"error", e.what()}};
  }
  j["tolerance"] = policy.qe_gate;
  const bool ok = rep.residual_norm <= policy.qe_gate;
  j["verified"] = ok;
  detail::emit(detail::dump(j), opt.json_path, out);
  if (!ok) err << "residual " << format_double(rep.residual_norm) << " exceeds tolerance\n";
  return ok ? exit_ok : exit_not_verified;
}

inline int cmd_variation(const Problem& p, const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  const NumericPolicy policy = opt.policy();
  if (!p.vertical) throw Error(Errc::invalid_input, "variation needs a vertical index");
  const double m = opt.m.value_or(p.m.value_or(1.0));
  const std::vector<double> grid = parse_t_grid(opt.t_grid);
  for (double t : grid)
    if (!(t > 0.0)) throw Error(Errc::invalid_input, "t-grid values must be positive");

  const SubmersionData sd = measure_submersion(p.frame, p.g, p.unit_vertical());
  const double x_coeff = require_vertical(sd, p.x_or_zero(), policy);
  const FamilyScan scan = verify_family(p.frame, p.g, p.unit_vertical(), m, grid, x_coeff, policy);
  if (scan.anchor_residual > policy.qe_gate)
    throw Error(Errc::precondition, "not quasi-Einstein at t = 1 (residual " +
                                        format_double(scan.anchor_residual) + ")");
  if (!scan.base_einstein)
    err << "warning: base is not Einstein (defect " << format_double(scan.base_einstein_defect)
        << "); the family is not quasi-Einstein away from t = 1\n";

  std::string csv = "t,c_t,lambda_t,residual,scal,status\n";
  Json points = Json::array();
  for (const auto& pt : scan.points) {
    std::string status = "inadmissible";
    if (pt.defined()) status = *pt.residual <= policy.qe_gate ? "ok" : "not_qe";
    csv += format_double(pt.t) + "," + (pt.defined() ? format_double(*pt.c_t) : "") + "," +
           format_double(pt.lambda_t) + "," + (pt.defined() ? format_double(*pt.residual) : "") + "," +
           format_double(pt.scal) + "," + status + "\n";
    Json row = {{"t", pt.t}, {"lambda_t", pt.lambda_t}, {"scal", pt.scal}, {"status", status}};
    row["c_t"] = pt.c_t ? Json(*pt.c_t) : Json(nullptr);
    row["residual"] = pt.residual ? Json(*pt.residual) : Json(nullptr);
    points.push_back(row);
  }
  detail::emit(csv, opt.csv_path, out);
  if (opt.json_path) {
    const AdmissibleSet adm = admissible_interval(scan.input);
    const auto tstar = einstein_point(scan.input);
    Json j;
    j["a_norm_sq"] = scan.input.a_norm_sq;
    j["x_norm_sq"] = scan.input.x_norm_sq;
    j["m"] = m;
    j["n"] = scan.input.n;
    j["base_einstein"] = scan.base_einstein;
    j["base_lambda"] = base_lambda_from_total(scan.input);
    j["admissible"] = {{"empty", adm.empty},
                       {"degenerate", adm.degenerate},
                       {"lower", adm.lower},
                       {"lower_closed", adm.lower_closed},
                       {"upper", std::isinf(adm.upper) ? Json(nullptr) : Json(adm.upper)},
                       {"upper_closed", adm.upper_closed}};
    j["einstein_point"] = tstar ? Json(*tstar) : Json(nullptr);
    j["points"] = points;
    detail::emit(detail::dump(j), opt.json_path, out);
  }
  return exit_ok;
}

inline int cmd_classify(const Problem& p, const CommandOptions& opt, std::ostream& out, std::ostream&) {
  const NumericPolicy policy = opt.policy();
  const double m = opt.m.value_or(p.m.value_or(1.0));
  const FrameVector x = p.x_or_zero();
  const double lambda = opt.lambda ? *opt.lambda : p.lambda ? *p.lambda : fit_lambda(p.frame, p.g, x, m).lambda;
  const Classification c = classify_thurston(QETriple{p.frame, p.g, x, m, lambda}, policy);
  Json j;
  if (p.name) j["name"] = *p.name;
  j["bucket"] = to_string(c.bucket);
  j["dx_flat_norm"] = c.dx_flat_norm;
  j["H"] = c.phi_sectional ? Json(*c.phi_sectional) : Json(nullptr);
  j["sasakian"] = c.sasaki ? Json(c.sasaki->sasakian) : Json(nullptr);
  j["sasaki_deviation"] = c.sasaki ? Json(c.sasaki->deviation) : Json(nullptr);
  j["scale_sq"] = c.scale_sq ? Json(*c.scale_sq) : Json(nullptr);
  if (c.eta_einstein)
    j["eta_einstein"] = {{"lambda", c.eta_einstein->lambda},
                         {"nu", c.eta_einstein->nu},
                         {"residual", c.eta_einstein->residual}};
  detail::emit(detail::dump(j), opt.json_path, out);
  return exit_ok;
}

inline int cmd_solve(const Problem& p, const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  SolverConfig cfg;
  cfg.m = opt.m.value_or(p.m.value_or(1.0));
  cfg.multistart_count = opt.starts;
  cfg.seed = opt.seed;
  cfg.metric_parameterization = opt.parameterization;
  cfg.policy = opt.policy();
  if (opt.tol) cfg.convergence_tol = *opt.tol;
  const SolveReport rep = solve_detailed(p.frame, cfg);
  Json j;
  j["m"] = cfg.m;
  j["seed"] = cfg.seed;
  j["starts"] = cfg.multistart_count;
  j["parameterization"] = to_string(cfg.metric_parameterization);
  j["converged"] = rep.converged;
  j["abandoned"] = rep.abandoned;
  j["excluded"] = rep.excluded.size();
  j["records"] = Json::array();
  for (const auto& r : rep.records) j["records"].push_back(record_json(p.frame, r));
  detail::emit(detail::dump(j), opt.json_path, out);
  if (!rep.excluded.empty())
    err << "note: " << rep.excluded.size() << " converged start(s) rejected (m < 0 and lambda < 0)\n";
  return exit_ok;
}

inline int cmd_catalog(const CommandOptions& opt, std::ostream& out) {
  Json j = Json::array();
  for (const auto& e : entries()) {
    if (opt.name && e.name != *opt.name) continue;
    for (std::size_t i = 0; i < e.known_solutions.size(); ++i) j.push_back(entry_json(e, i));
  }
  if (opt.name && j.empty()) throw Error(Errc::invalid_input, "unknown catalog entry: " + *opt.name);
  detail::emit(detail::dump(opt.name && j.size() == 1 ? j[0] : j), opt.json_path, out);
  return exit_ok;
}

}  // namespace qeframe
