#pragma once

#include <stdexcept>
#include <string>

namespace moirewell {

// Failure modes that callers are expected to handle.  Each one corresponds
// to a checked precondition or a detected breakdown of an algorithm, not to
// a programming error (those are plain asserts).

// Well classification could not decide between an isolated conical
// degeneracy and a non-isolated coalescence of eigenvalue branches.
struct ClassificationAmbiguous : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Right-hand side handed to the shifted oscillator solver has a component
// in the kernel that exceeds tolerance, so no solution exists.
struct OrthogonalityViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The order-by-order eigenvalue recurrence hit a resonant denominator with
// a non-orthogonal right-hand side.  `step` is the half-order at which the
// obstruction appeared.
struct ResonantObstruction : std::runtime_error {
  int step;
  ResonantObstruction(const std::string& what, int step_)
      : std::runtime_error(what), step(step_) {}
};

// Orbit tracing left the search region or exhausted its step budget before
// returning to the section.
struct NoClosedOrbit : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Requested quantization index lies outside the range where the action
// function is invertible.
struct OutOfRange : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A least-squares fit failed its internal consistency check: the residual
// is larger than the first omitted order can explain.
struct FitDiagnostics : std::runtime_error {
  double residual;
  double omitted_scale;
  FitDiagnostics(const std::string& what, double res, double omitted)
      : std::runtime_error(what), residual(res), omitted_scale(omitted) {}
};

// Invalid run configuration (CLI / config file plumbing).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const char* version_string();

}  // namespace moirewell
