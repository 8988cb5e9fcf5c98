#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "moirewell/symbols.hpp"

namespace moirewell {

// Coupling strengths and transverse Bloch momentum shared by all model
// builders.  kperp is measured in units of the dual period, so kperp = 0.5
// is the edge of the transverse zone.
struct ModelParams {
  double w0 = 0.0;    // acoustic interlayer coupling
  double w1 = 1.0;    // chiral interlayer coupling
  double kperp = 0.0; // transverse Bloch momentum
};

// Which one-dimensional reduction a builder refers to: the lattice model
// with a bounded cosine band, or its continuum limit with linear dispersion.
enum class ModelKind { Harper, LowEnergy };

std::string model_name(ModelKind kind);
ModelKind model_from_name(const std::string& name);

// ---------------------------------------------------------------------------
// Constant 4x4 blocks
// ---------------------------------------------------------------------------

Eigen::Matrix4cd pauli1_pair();  // diag(sigma_1, sigma_1)
Eigen::Matrix4cd pauli2_pair();  // diag(sigma_2, sigma_2)

// Transverse-momentum dependent hop between the two mode families.
Eigen::Matrix4cd hop_matrix(double kperp);

// Interlayer coupling patterns: acoustic couples components 0<->2 and 1<->3,
// the two chiral patterns couple 0<->3 and 1<->2 respectively.
Eigen::Matrix4cd acoustic_pattern();
Eigen::Matrix4cd chiral_minus_pattern();
Eigen::Matrix4cd chiral_plus_pattern();

// Spatial coupling profiles.
ScalarSymbol acoustic_profile();          // 1 + 2 cos(2 pi x)
ScalarSymbol chiral_profile(int sign);    // 1 - cos(2 pi x) +- sqrt(3) sin(2 pi x)

// Position-dependent coupling matrix w0 * U_ac(x) * acoustic
//   + w1 * (U_-(x) * chiral_minus + U_+(x) * chiral_plus).
Eigen::Matrix4cd potential_matrix(double x, const ModelParams& params);

// ---------------------------------------------------------------------------
// Full 4x4 symbols
// ---------------------------------------------------------------------------

// Lattice model: 2 cos(2 pi xi) hop(kperp) + hop(0) + potential(x).
PhaseSpaceSymbol harper_symbol(const ModelParams& params);

// Continuum model; kappa is the slow longitudinal momentum and enters two
// half-orders below the principal part.
PhaseSpaceSymbol lowenergy_symbol(const ModelParams& params, double kappa = 0.0);

// ---------------------------------------------------------------------------
// Chiral branch (w0 = 0): off-diagonal 2x2 block D and its squares
// ---------------------------------------------------------------------------

// D = [[K + i g, i f], [-i f, K - i g]] with f = w1 (1 - cos 2 pi x),
// g = sqrt(3) w1 sin 2 pi x and kinetic part K specific to the model kind.
PhaseSpaceSymbol chiral_offdiag(ModelKind kind, const ModelParams& params,
                                double kappa = 0.0);

// diag(D # D*, D* # D) as an exact product symbol (oscillation phases kept).
PhaseSpaceSymbol chiral_squared(ModelKind kind, const ModelParams& params,
                                double kappa = 0.0, int max_half_order = 8);

// ---------------------------------------------------------------------------
// Anti-chiral branch (w1 = 0): the symbol is diagonal
// ---------------------------------------------------------------------------

// Four scalar branches ordered by (kinetic sign, potential sign):
// (-,-), (-,+), (+,-), (+,+).  The lattice version requires kperp in (1/2)Z,
// the continuum version kperp = 0.
PhaseSpaceSymbol antichiral_diag(ModelKind kind, const ModelParams& params,
                                 double kappa = 0.0);

// Harmonic data of the anti-chiral branch minima (lattice model only; the
// continuum branches have no critical points).
struct AntiChiralWell {
  int branch = 0;        // index into the diagonal, ordering as above
  double x0 = 0.0, xi0 = 0.0;
  double bottom = 0.0;   // branch value at the minimum
  double slope = 0.0;    // harmonic level spacing divided by h
};
std::vector<AntiChiralWell> antichiral_wells(ModelKind kind,
                                             const ModelParams& params);

// ---------------------------------------------------------------------------
// Zero set of the chiral determinant
// ---------------------------------------------------------------------------

// A point where det D vanishes to second order, with the harmonic normal
// form of the chosen diagonal block of the squared symbol:
//   scale * (eta^2 + omega^2 y^2 + mu_{1,2})  after blow-up.
// c = mu2 / omega is the dimensionless level offset of the second component.
struct WellReport {
  ModelKind model = ModelKind::Harper;
  double x0 = 0.0, xi0 = 0.0;
  bool double_degenerate = false;  // both components touch identically
  double scale = 0.0;
  double omega = 0.0;
  double mu1 = 0.0, mu2 = 0.0;
  double c = 0.0;
};

struct ZeroSetSurvey {
  std::vector<WellReport> wells;
  // isolated rank-one zeros (no branch touching); excluded from `wells`
  std::vector<std::array<double, 2>> isolated_zeros;
  // sign-change curves of the real determinant, chained into polylines
  std::vector<std::vector<std::array<double, 2>>> curves;
};

// Scan the fundamental domain of the chiral determinant on a grid, refine
// every isolated zero by damped Newton iteration, and classify it by the
// eigenvalue gap of D D* on a small probe circle.  Throws
// ClassificationAmbiguous when the gap pattern on the probe circle is
// neither full, empty, nor a few isolated touching directions.
ZeroSetSurvey survey_zero_set(ModelKind kind, const ModelParams& params,
                              int grid = 256);

std::vector<WellReport> find_wells(ModelKind kind, const ModelParams& params,
                                   int grid = 256);
std::vector<std::vector<std::array<double, 2>>> trace_zero_set(
    ModelKind kind, const ModelParams& params, int grid = 256);

// Rescaled normal form of one diagonal block (0 or 1) of the squared chiral
// symbol at a reported well, normalized so the eta^2 coefficient is 1.
// Grades are kept through j <= kmax; see rescale_to_well for the grading.
PhaseSpaceSymbol well_normal_form(ModelKind kind, const ModelParams& params,
                                  const WellReport& well, int kmax,
                                  int block = 1);

// Extract a 2x2 diagonal sub-block starting at `offset` from a larger symbol.
PhaseSpaceSymbol sub_block(const PhaseSpaceSymbol& S, int offset, int size);

// ---------------------------------------------------------------------------
// Commensurable unfolding
// ---------------------------------------------------------------------------

// Mode-space realization of the lattice model when the frequency splits as
// 2 pi h = p/q + alpha', gcd(p, q) = 1.  Modes n = q m + j are grouped into
// cells of q, and the q-periodic part of the onsite rotation is evaluated
// exactly on the sublattice so only the slow twist alpha' remains.
class UnfoldedFamily {
 public:
  UnfoldedFamily(int p, int q, const ModelParams& params);

  int p() const { return p_; }
  int q() const { return q_; }
  const ModelParams& params() const { return params_; }

  // Chain Hamiltonian over 2*cells cells (m = -cells .. cells-1), component
  // major: index(a, j, m) = (a*q + j)*nm + (m + cells).
  Eigen::MatrixXcd assemble(double alpha_prime, int cells) const;
  int dimension(int cells) const { return 4 * q_ * 2 * cells; }

  // Block-form metadata: the diagonal twist diag(gamma^{p l}), the cyclic
  // shift, and the q x q coupling profiles at twisted momentum xi.
  Eigen::MatrixXcd twist() const;
  Eigen::MatrixXcd shift() const;
  Eigen::MatrixXcd block_acoustic(double xi) const;
  Eigen::MatrixXcd block_chiral(double xi, int sign) const;

 private:
  int p_ = 0, q_ = 1;
  ModelParams params_;
};

// Plain mode window of half-width `half_width` at frequency alpha = 2 pi h;
// equivalent to UnfoldedFamily(0, 1) with cells = half_width.
Eigen::MatrixXcd mode_window(const ModelParams& params, double alpha,
                             int half_width);

}  // namespace moirewell
