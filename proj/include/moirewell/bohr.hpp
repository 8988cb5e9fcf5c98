#pragma once

#include <array>
#include <vector>

#include "moirewell/symbols.hpp"

namespace moirewell {

// Scalar Hamiltonian data for a single well, organized as a power series
// p0 + h*p1 + h^2*p2.  The principal part must attain a nondegenerate
// minimum of value zero at (x0, xi0); energies below the barrier then bound
// closed orbits around that point.
struct ScalarSymbolSeries {
  ScalarSymbol p0;
  ScalarSymbol p1;
  ScalarSymbol p2;
  double x0 = 0.0;
  double xi0 = 0.0;
};

// One closed orbit of the principal flow at energy tau, together with the
// loop integrals the quantization rule consumes.  All integrals are carried
// in the integrator state, so they share its accuracy.
struct OrbitData {
  double tau = 0.0;
  double period = 0.0;
  double area = 0.0;          // oint xi dx
  double subprincipal = 0.0;  // oint p1 dt
  double curvature = 0.0;     // oint [ (p0_xx p0_xixi - p0_xxi^2)/12 - p1^2 ] dt
  double secondary = 0.0;     // oint p2 dt
  std::vector<std::array<double, 2>> samples;  // accepted (x, xi) states
};

// Traces the energy-tau orbit of p.p0 around (p.x0, p.xi0).  The seed is
// located by bisection on the +x ray; the return to the section {xi = xi0}
// is located by switching the independent variable to xi for the final
// step, which lands on the section exactly rather than by interpolation.
// Throws NoClosedOrbit if no seed brackets, the orbit fails to close, or
// the energy drifts beyond tolerance.
OrbitData trace_orbit(const ScalarSymbolSeries& p, double tau,
                      double tol = 1e-12);

struct FSeries {
  double F0 = 0.0;
  double F1 = 0.0;
  double F2 = 0.0;
};

// Action coefficients at energy tau:
//   F0 = area / 2pi,
//   F1 = 1/2 - (oint p1 dt) / 2pi,
//   F2 = -d/dtau [curvature integral] / 4pi - (oint p2 dt) / 2pi,
// the tau-derivative taken by centered differencing at 5% spacing.  The
// signs are pinned by comparison with quantized-operator spectra; see the
// unit tests for the cross-checks.
FSeries F_series(const ScalarSymbolSeries& p, double tau);

// F_series tabulated over a logarithmic energy grid, the input invert_F
// interpolates.
struct FTable {
  std::vector<double> tau;
  std::vector<double> F0;
  std::vector<double> F1;
  std::vector<double> F2;
};
FTable F_table(const ScalarSymbolSeries& p, double tau_lo, double tau_hi,
               int count);

// Solves F0(t) + h F1(t) + h^2 F2(t) = k h for t by bisection on the
// tabulated, piecewise-linearly interpolated coefficients.  Levels are
// counted from k = 1; throws OutOfRange when k h falls outside the range
// the table covers, in particular for every k whose target sits below the
// zero-point offset.
double invert_F(const FTable& table, int k, double h);

// Closed-form ladder of the four decoupled branches of the lattice model
// without interlayer coupling: branch bottom c_j plus uniform harmonic
// spacing.  j runs over 1..4, k over 0,1,2,...
double antichiral_level(double w0, double h, int j, int k);

}  // namespace moirewell
