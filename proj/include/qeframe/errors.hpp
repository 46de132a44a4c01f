#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qeframe {

/// Failure categories raised by the library. Input errors reject malformed
/// data; the remaining codes are mathematical precondition failures.
enum class Errc {
  invalid_input,        // shape mismatch, non-finite entries, bad indices
  not_positive_definite,
  jacobi_violation,
  invalid_parameter,    // m == 0, t <= 0, ...
  degenerate_plane,
  not_killing,
  trivial_solution,     // X == 0 where a nontrivial field is required
  precondition,         // triple is not quasi-Einstein, etc.
  not_rescalable,
  degenerate_structure,
  invalid_fibration,
  not_totally_geodesic,
  hypothesis_violation, // X not tangent to the fibers
  dimension,
  no_family,
};

constexpr std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::invalid_input: return "invalid-input";
    case Errc::not_positive_definite: return "not-positive-definite";
    case Errc::jacobi_violation: return "jacobi-violation";
    case Errc::invalid_parameter: return "invalid-parameter";
    case Errc::degenerate_plane: return "degenerate-plane";
    case Errc::not_killing: return "not-killing";
    case Errc::trivial_solution: return "trivial";
    case Errc::precondition: return "precondition";
    case Errc::not_rescalable: return "not-rescalable";
    case Errc::degenerate_structure: return "degenerate-structure";
    case Errc::invalid_fibration: return "invalid-fibration";
    case Errc::not_totally_geodesic: return "not-totally-geodesic";
    case Errc::hypothesis_violation: return "hypothesis-violation";
    case Errc::dimension: return "dimension";
    case Errc::no_family: return "no-family";
  }
  return "unknown";
}

/// True for errors that mean "the data itself is malformed" as opposed to
/// "the data is well formed but the operation does not apply".
constexpr bool is_input_error(Errc code) {
  return code == Errc::invalid_input || code == Errc::not_positive_definite ||
         code == Errc::jacobi_violation;
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Tolerances shared by every module. Passed by value; a default-constructed
/// policy carries the library defaults.
struct NumericPolicy {
  double structural = 1e-10;    // curvature identities, Killing test, residual gates
  double validation = 1e-12;    // antisymmetry, Jacobi, symmetry of inputs
  double multiplicity = 1e-8;   // grouping of Ricci eigenvalues
  double qe_gate = 1e-8;        // "verified quasi-Einstein" precondition
  double degenerate = 1e-14;    // sectional-curvature plane denominator
  double phi_degenerate = 1e-12;

  /// Override every residual threshold at once (the CLI --tol flag).
  static NumericPolicy with_tolerance(double tol) {
    NumericPolicy p;
    p.structural = tol;
    p.qe_gate = tol;
    return p;
  }
};

}  // namespace qeframe
