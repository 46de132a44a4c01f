#pragma once

// JSON problem files. Indices in files are 1-based; brackets list the
// nonzero structure constants {i, j, k, c} meaning [e_i, e_j] has c along e_k.
// The antisymmetric partner is filled in automatically.

#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "qeframe/catalog.hpp"

namespace qeframe {

using Json = nlohmann::json;

struct Problem {
  std::optional<std::string> name;
  LieFrame frame;
  FrameMetric g;
  std::optional<FrameVector> x;
  std::optional<double> m;
  std::optional<double> lambda;
  std::optional<int> vertical;  // 0-based
  std::optional<bool> compact;

  int dim() const { return frame.dim(); }
  FrameVector x_or_zero() const { return x ? *x : FrameVector::Zero(dim()); }
  /// g-unit vector along the vertical frame direction.
  FrameVector unit_vertical() const {
    if (!vertical) throw Error(Errc::invalid_input, "problem has no vertical index");
    const FrameVector e = basis_vector(dim(), *vertical);
    return e / g.norm(e);
  }
};

namespace detail {

inline double number(const Json& j, const std::string& what) {
  if (!j.is_number()) throw Error(Errc::invalid_input, what + " must be a number");
  return j.get<double>();
}

inline int index(const Json& j, int dim, const std::string& what) {
  if (!j.is_number_integer()) throw Error(Errc::invalid_input, what + " must be an integer");
  const int v = j.get<int>();
  if (v < 1 || v > dim) throw Error(Errc::invalid_input, what + " out of range 1.." + std::to_string(dim));
  return v - 1;
}

inline Matrix parse_metric(const Json& j, int dim) {
  Matrix g(dim, dim);
  if (!j.is_array()) throw Error(Errc::invalid_input, "metric must be an array");
  if (j.size() == static_cast<std::size_t>(dim) && j[0].is_array()) {
    for (int r = 0; r < dim; ++r) {
      if (!j[r].is_array() || j[r].size() != static_cast<std::size_t>(dim))
        throw Error(Errc::invalid_input, "metric rows must have length dim");
      for (int c = 0; c < dim; ++c) g(r, c) = number(j[r][c], "metric entry");
    }
  } else if (j.size() == static_cast<std::size_t>(dim * dim)) {
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c) g(r, c) = number(j[r * dim + c], "metric entry");
  } else {
    throw Error(Errc::invalid_input, "metric must be dim x dim (nested or flat row-major)");
  }
  return g;
}

}  // namespace detail

inline Problem parse_problem(const Json& j) {
  if (!j.is_object()) throw Error(Errc::invalid_input, "problem must be a JSON object");
  if (!j.contains("dim")) throw Error(Errc::invalid_input, "missing field: dim");
  if (!j["dim"].is_number_integer() || j["dim"].get<int>() < 1)
    throw Error(Errc::invalid_input, "dim must be a positive integer");
  const int d = j["dim"].get<int>();

  Tensor3 c(d);
  std::vector<char> set(static_cast<std::size_t>(d) * d * d, 0);
  if (j.contains("brackets")) {
    if (!j["brackets"].is_array()) throw Error(Errc::invalid_input, "brackets must be an array");
    for (const auto& b : j["brackets"]) {
      if (!b.is_object() || !b.contains("i") || !b.contains("j") || !b.contains("k") || !b.contains("c"))
        throw Error(Errc::invalid_input, "bracket entries need i, j, k, c");
      const int i = detail::index(b["i"], d, "bracket i");
      const int jj = detail::index(b["j"], d, "bracket j");
      const int k = detail::index(b["k"], d, "bracket k");
      const double v = detail::number(b["c"], "bracket c");
      if (i == jj) {
        if (v != 0.0) throw Error(Errc::invalid_input, "[e_i, e_i] must vanish");
        continue;
      }
      const auto slot = [&](int a, int b2) { return (static_cast<std::size_t>(a) * d + b2) * d + k; };
      if ((set[slot(i, jj)] && c(i, jj, k) != v) || (set[slot(jj, i)] && c(jj, i, k) != -v))
        throw Error(Errc::invalid_input, "conflicting bracket entries");
      c.set_bracket(i, jj, k, v);
      set[slot(i, jj)] = set[slot(jj, i)] = 1;
    }
  }

  if (!j.contains("metric")) throw Error(Errc::invalid_input, "missing field: metric");
  Problem p{std::nullopt, LieFrame(d, c), FrameMetric(detail::parse_metric(j["metric"], d)),
            std::nullopt, std::nullopt, std::nullopt, std::nullopt, std::nullopt};
  if (j.contains("name") && j["name"].is_string()) p.name = j["name"].get<std::string>();
  if (j.contains("X") && !j["X"].is_null()) {
    if (!j["X"].is_array() || j["X"].size() != static_cast<std::size_t>(d))
      throw Error(Errc::invalid_input, "X must be an array of length dim");
    FrameVector x(d);
    for (int i = 0; i < d; ++i) x[i] = detail::number(j["X"][i], "X entry");
    p.x = x;
  }
  if (j.contains("m") && !j["m"].is_null()) {
    p.m = detail::number(j["m"], "m");
    if (*p.m == 0.0) throw Error(Errc::invalid_input, "m must be nonzero");
  }
  if (j.contains("lambda") && !j["lambda"].is_null()) p.lambda = detail::number(j["lambda"], "lambda");
  if (j.contains("vertical") && !j["vertical"].is_null()) p.vertical = detail::index(j["vertical"], d, "vertical");
  if (j.contains("compact") && !j["compact"].is_null()) {
    if (!j["compact"].is_boolean()) throw Error(Errc::invalid_input, "compact must be a boolean");
    p.compact = j["compact"].get<bool>();
  }
  return p;
}

inline Problem parse_problem_text(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(Errc::invalid_input, std::string("JSON parse error: ") + e.what());
  }
  return parse_problem(j);
}

inline Problem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::invalid_input, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_problem_text(ss.str());
}

// Serialisation --------------------------------------------------------------

inline Json vector_json(const Vector& v) {
  Json out = Json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

inline Json matrix_json(const Matrix& m) {
  Json out = Json::array();
  for (int r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

inline Json brackets_json(const LieFrame& frame) {
  Json out = Json::array();
  const int d = frame.dim();
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      for (int k = 0; k < d; ++k)
        if (frame(i, j, k) != 0.0) out.push_back({{"i", i + 1}, {"j", j + 1}, {"k", k + 1}, {"c", frame(i, j, k)}});
  return out;
}

/// Problem-file fields for (frame, g) plus optional solution data.
inline Json problem_json(const LieFrame& frame, const FrameMetric& g,
                         const std::optional<FrameVector>& x = std::nullopt,
                         std::optional<double> m = std::nullopt, std::optional<double> lambda = std::nullopt) {
  Json out;
  out["dim"] = frame.dim();
  out["brackets"] = brackets_json(frame);
  out["metric"] = matrix_json(g.gram());
  if (x) out["X"] = vector_json(*x);
  if (m) out["m"] = *m;
  if (lambda) out["lambda"] = *lambda;
  return out;
}

/// Index of the single frame direction a vector lies along, if any.
inline std::optional<int> frame_axis(const FrameVector& v) {
  std::optional<int> axis;
  for (int i = 0; i < v.size(); ++i) {
    if (v[i] == 0.0) continue;
    if (axis) return std::nullopt;
    axis = i;
  }
  return axis;
}

inline Json entry_json(const CatalogEntry& e, std::size_t solution = 0) {
  const KnownSolution& s = e.known_solutions.at(solution);
  Json out = problem_json(e.frame, e.metric, s.x, s.m, s.lambda);
  out["name"] = e.name;
  out["compact"] = e.compact;
  if (e.submersion_vertical)
    if (auto axis = frame_axis(*e.submersion_vertical)) out["vertical"] = *axis + 1;
  if (e.expected_bucket) out["expected_bucket"] = to_string(*e.expected_bucket);
  out["notes"] = e.notes;
  return out;
}

inline Json record_json(const LieFrame& frame, const SolutionRecord& r) {
  Json out = problem_json(frame, r.g, r.x, r.m, r.lambda);
  out["residual"] = r.residual;
  out["killing_residual"] = r.killing_residual;
  out["trivial"] = r.trivial;
  out["classification"] = r.classification ? Json(to_string(*r.classification)) : Json(nullptr);
  return out;
}

}  // namespace qeframe
