#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <vector>

#include "moirewell/models.hpp"
#include "moirewell/symbols.hpp"

namespace moirewell {

/// Pins the BLAS thread pool size when the runtime exposes a hook for it
/// (OpenBLAS does); a silent no-op otherwise. Call with 1 before running
/// eigensolves inside an OpenMP region to avoid nested thread pools.
void set_blas_threads(int n);

/// Eigenvalues of a Hermitian matrix, ascending. The input is symmetrized
/// before solving; deviations from Hermiticity beyond 1e-10 (relative to the
/// largest entry) are rejected. Throws std::runtime_error if the solver does
/// not converge.
Eigen::VectorXd hermitian_eigensolve(const Eigen::MatrixXcd& M);

/// As above, also filling `vectors` with orthonormal eigenvectors (column i
/// belongs to eigenvalue i). Every pair is residual-checked against
/// ||M v - lambda v|| <= 1e-9 ||M||.
Eigen::VectorXd hermitian_eigensolve(const Eigen::MatrixXcd& M,
                                     Eigen::MatrixXcd& vectors);

/// Matrix of a symbol acting on Fourier modes |n| <= N of the circle, where
/// the fiber variable is frozen to xi_n = 2*pi*n*h. A term
/// c x^0 xi^b e^{2 pi i (m x + n xi)} contributes c (2 pi (col + m/2) h)^b
/// e^{2 pi i n * 2 pi (col + m/2) h} at row col+m: the midpoint rule, which
/// realizes the Weyl operator exactly for separated and for oscillatory
/// symbols. Grade-2k parts carry h^k; integer phase tags carry
/// e^{2 pi^2 i r h}.
///
/// Index layout is component-major: entry (a, n) of a dim-d symbol sits at
/// a*(2N+1) + n + N.
///
/// Rejects symbols with positive x-degree (no polynomial position operators
/// on the mode lattice) and fiber degree > 2 combined with oscillatory
/// factors.
Eigen::MatrixXcd circle_quantize(const PhaseSpaceSymbol& S, double h, int N);

/// 4q x 4q Bloch matrix of the discrete model at flux p/q (coprime):
/// hop_matrix(kperp) tensored with the cyclic shift-plus-adjoint carrying
/// e^{i kx} in the corner, plus the onsite pauli1_pair and the potential
/// sampled at x_i = i p/q. Component-major: entry (a, site) at a*q + site.
/// Exactly 2*pi periodic in kx.
Eigen::MatrixXcd tight_binding_bloch(int p, int q, double kx,
                                     const ModelParams& params);

/// Continuum Bloch matrix on Fourier modes |n| <= N at quasimomentum kx:
/// kinetic entries 2*pi*h*n + kx -+ i*kperp on the two off-diagonal kinetic
/// blocks, potentials as tridiagonal mode convolutions. Component-major,
/// dimension 4(2N+1).
Eigen::MatrixXcd lowenergy_bloch(double kx, double h, int N,
                                 const ModelParams& params);

using BlochBuilder = std::function<Eigen::MatrixXcd(double)>;

struct BandStructure {
  std::vector<double> kx;
  Eigen::MatrixXd levels;  // row i: ascending eigenvalues at kx[i]
};

/// Eigenvalues of builder(k) for every k in the grid, rows ordered by grid
/// index. The parallel version dispatches the per-k solves across OpenMP
/// threads; the serial one is the reference it is tested against.
BandStructure band_sweep(const BlochBuilder& builder,
                         const std::vector<double>& kgrid);
BandStructure band_sweep_serial(const BlochBuilder& builder,
                                const std::vector<double>& kgrid);

/// n equally spaced points from lo towards hi, endpoint excluded (periodic
/// sampling convention).
std::vector<double> uniform_grid(double lo, double hi, int n);

struct Flatness {
  double abs = 0.0;  // max - min over the sweep
  double rel = 0.0;  // abs / max(largest |value|, floor)
};

/// Flatness of one eigenvalue column of a sweep. `floor_value` guards the
/// relative measure for bands pinned near zero; pass the semiclassical
/// parameter h.
Flatness band_flatness(const BandStructure& bs, int band, double floor_value);

/// Largest distance from any point of one set to the nearest point of the
/// other, maximized over both directions.
double hausdorff_distance(const std::vector<double>& a,
                          const std::vector<double>& b);

/// One-sided variant: sup over `from` of the distance to `to`.
double directed_distance(const std::vector<double>& from,
                         const std::vector<double>& to);

struct CutoffParams {
  int fejer_order = 8;  // highest retained position harmonic; 0 means 1 in x
  double rho = 0.125;   // fiber bump half-width
};

/// Symmetrized standard-quantization matrix of the cutoff
/// chi_1(x - x0) * chi_2((xi - xi0)/rho) on modes |n| <= N with `components`
/// identical blocks. chi_1 is the Fejer kernel of the given order scaled to
/// peak value 1; chi_2 is the classic compactly supported bump, evaluated at
/// the fiber points 2*pi*n*h with the distance to xi0 wrapped to a period.
Eigen::MatrixXcd cutoff_matrix(int components, double h, int N, double x0,
                               double xi0, const CutoffParams& cp);

/// M + (I - sym(Q_chi)) with the cutoff centered on the given well. The added
/// term is a mass everywhere the cutoff vanishes, so spectrum near the bottom
/// of a nonnegative M comes from the selected well alone.
Eigen::MatrixXcd massive_operator(const Eigen::MatrixXcd& M,
                                  const WellReport& well, double h, int N,
                                  const CutoffParams& cp);

/// Share of a mode-space state's mass on fiber points within `width` of xi0
/// (periodic distance). Component-major layout as produced by
/// circle_quantize.
double fiber_mass(const Eigen::VectorXcd& v, double h, int N, double xi0,
                  double width);

/// Share of a state's position-space mass within `width` of x0 (periodic
/// distance), computed on a uniform x-grid.
double position_mass(const Eigen::VectorXcd& v, int N, double x0,
                     double width);

}  // namespace moirewell
