#pragma once

#include <array>
#include <vector>

#include "moirewell/hermite.hpp"
#include "moirewell/symbols.hpp"

namespace moirewell {

// One ladder level of the leading harmonic block: value, oscillator mode,
// and which internal component carries it.
struct LadderLevel {
  double e;
  int mode;
  int component;
};

// Lowest `count` levels (2n+1) omega + mu_c, ascending.
std::vector<LadderLevel> well_levels(const NormalFormData& nf, int count);

// Detect the ladder alignment between the two components.  Returns the
// non-negative resonance class when |mu1 - mu2| sits on the odd-even ladder
// spacing (2, 6, 10, ... times omega), and -1 otherwise.
int classify_resonance(const NormalFormData& nf, double tol = 1e-9);

// True when every stored grade j holds only entries of total-degree parity
// (-1)^j; this is the structure that forces the odd corrections to vanish.
bool parity_structure_ok(const PhaseSpaceSymbol& T);

struct WkbResult {
  double omega = 1.0;
  int mode = 0;
  int component = 0;
  bool parity_clean = false;
  std::vector<double> lambda;           // lambda_k, weight h^{k/2}
  std::vector<GaussianAmplitude> u;     // u_k,     weight h^{k/2}
};

// Order-by-order corrections for a single non-degenerate ladder level of a
// rescaled well symbol.  Grades of T enter with weight h^{j/2} (the common
// prefactor of the parabolic scaling is left to the caller).  Throws
// ResonantObstruction when a forced denominator vanishes against a
// non-vanishing source on the opposite ladder.
WkbResult wkb_recurrence(const PhaseSpaceSymbol& T, int mode, int component,
                         int order);

// Evaluate lambda(h) = sum_k lambda_k h^{k/2}.
double wkb_eigenvalue(const WkbResult& r, double h);

// Combine the corrections into one amplitude sum_k h^{k/2} u_k.
GaussianAmplitude wkb_amplitude(const WkbResult& r, double h);

// L^2 norm of (sum_j h^{j/2} T_j^w - lambda(h)) applied to the combined
// amplitude, for one h.
double wkb_residual(const PhaseSpaceSymbol& T, const WkbResult& r, double h);

struct ResidualScan {
  std::vector<double> h;
  std::vector<double> residual;
  double slope;  // log-log least-squares fit
};

ResidualScan residual_scan(const PhaseSpaceSymbol& T, const WkbResult& r,
                           const std::vector<double>& hs);

// Lowest eigenvalues of the truncated block matrix, ascending.
std::vector<double> galerkin_levels(const PhaseSpaceSymbol& T, double omega,
                                    int N, double h, int count);

struct ResonantExpansion {
  double e = 0.0;  // leading ladder value the pair splits from
  // fitted corrections per branch: coef[b][t-1] multiplies h^{t/2}
  std::array<std::vector<double>, 2> coef;
  std::array<std::vector<double>, 2> values;  // tracked eigenvalues per h
  double max_residual = 0.0;
};

// Track the two eigenvalues of the truncated block matrix nearest a
// degenerate ladder value across an h-grid and fit their expansions in
// powers of sqrt(h).  Throws FitDiagnostics when the fit residual exceeds
// what the first omitted order could explain.
ResonantExpansion resonant_expansion(const PhaseSpaceSymbol& T, double omega,
                                     double e, const std::vector<double>& hs,
                                     int nterms, int N);

struct PeriodizedMode {
  std::vector<double> x;                      // uniform grid on [0, 1)
  std::vector<std::array<cplx, 2>> values;
  double norm = 0.0;          // L2 over the circle (trapezoid on the grid)
  double mass_outside = 0.0;  // |u|^2 fraction farther than `radius` from x0
};

// Wrap a localized packet q(y) e^{-omega y^2/2} onto the unit circle:
//   u(x) = h^{-1/4} sum_{|k| <= K} e^{i xi0 (x - x0 - k)/h}
//                                  v((x - x0 - k)/sqrt(h))
// with K chosen so the discarded tail is below machine precision.
PeriodizedMode periodize(const GaussianAmplitude& v, double h, double x0,
                         double xi0, int grid_n, double radius,
                         int K_override = -1);

}  // namespace moirewell
