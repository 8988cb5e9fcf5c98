#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <vector>

#include "moirewell/common.hpp"
#include "moirewell/symbols.hpp"

namespace moirewell {

// Dense polynomial in one variable, coefficient of y^k at index k.
using Poly = std::vector<cplx>;

cplx poly_eval(const Poly& p, double y);
Poly poly_add(const Poly& a, const Poly& b);
Poly poly_scale(const Poly& a, cplx s);
Poly poly_mul_y(const Poly& a);
Poly poly_diff(const Poly& a);
int poly_degree(const Poly& a);

// q(y) e^{-omega y^2 / 2} with two internal components.
struct GaussianAmplitude {
  double omega = 1.0;
  std::array<Poly, 2> comp;
};

// Value of the n-th normalized oscillator eigenfunction at frequency omega,
// computed with the stable normalized three-term recurrence.
double hermite_function(int n, double omega, double y);

// Polynomial amplitude p_n with p_n(y) e^{-omega y^2/2} = phi_n(y).
Poly hermite_amplitude(int n, double omega);

// integral of y^k e^{-omega y^2} over the line (exact closed form)
double gaussian_moment(double omega, int k);

// L^2 pairing of a(y) e^{-omega y^2/2} against b(y) e^{-omega y^2/2}
cplx amplitude_inner(const Poly& a, const Poly& b, double omega);
cplx amplitude_inner(const GaussianAmplitude& a, const GaussianAmplitude& b);
double amplitude_norm(const GaussianAmplitude& a);

// Weyl action of a polynomial symbol p(y, eta) on q(y) e^{-omega y^2/2}
// at unit semiclassical parameter: eta quantizes to -i d/dy, and mixed
// monomials are symmetrized.  Returns the new polynomial amplitude.
Poly apply_weyl_poly(const ScalarSymbol& p, const Poly& q, double omega);

// Same action for one grade of a matrix symbol, on both components.
GaussianAmplitude apply_weyl_grade(const PhaseSpaceSymbol& T, int grade,
                                   const GaussianAmplitude& v);

// Exact expansion of q(y) e^{-omega y^2/2} over the oscillator basis
// (finite: length deg q + 1), and its inverse.
std::vector<cplx> hermite_coefficients(const Poly& q, double omega);
Poly amplitude_from_hermite(const std::vector<cplx>& coef, double omega);

// Solve ((2n+1) omega + mu - lambda0) u_n = rhs_n mode by mode.  Slots with
// a vanishing denominator require the right side to vanish there too
// (relative to its largest coefficient); otherwise OrthogonalityViolation.
// Resonant slots are returned as zero.
std::vector<cplx> solve_shifted(double omega, double mu, double lambda0,
                                const std::vector<cplx>& rhs,
                                double rel_tol = 1e-9);

// Matrix of the Weyl action of a polynomial symbol over the first N+1
// oscillator modes, built from ladder operators (independent of the
// amplitude path above, deliberately).
Eigen::MatrixXcd weyl_matrix(const ScalarSymbol& p, double omega, int N);

// Truncated matrix of sum_j h^{j/2} T_j^w over phi_n tensor e_c with the
// interleaved index 2n + c, size 2(N+1).  The common prefactor of the
// grading is left out, so a purely harmonic leading grade gives exactly
// (2n+1) omega + mu_c on the diagonal.
Eigen::MatrixXcd galerkin_matrix(const PhaseSpaceSymbol& T, double omega,
                                 int N, double h);

}  // namespace moirewell
