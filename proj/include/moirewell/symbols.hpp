#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <map>
#include <vector>

#include "moirewell/common.hpp"

namespace moirewell {

using cplx = std::complex<double>;

// ---------------------------------------------------------------------------
// Scalar phase-space symbols
//
// Everything the models need is a finite sum of terms
//
//     c * x^a xi^b * exp(2*pi*i*(m*x + n*xi)) * exp(2*pi^2*i*r*h)
//
// with integer a,b >= 0 and integer frequencies m,n.  The last factor is the
// exact phase picked up when two oscillations are star-multiplied; keeping it
// as an integer r (in units of 2*pi^2*h) means products of trigonometric
// polynomials stay finite and exact instead of becoming power series in h.
// ---------------------------------------------------------------------------

struct SymbolTerm {
  cplx coeff{0.0, 0.0};
  int a = 0, b = 0;  // powers of x and xi
  int m = 0, n = 0;  // oscillation frequencies in x and xi
  int r = 0;         // exact h-linear phase, units of 2*pi^2
};

class ScalarSymbol {
 public:
  ScalarSymbol() = default;
  explicit ScalarSymbol(cplx constant);
  explicit ScalarSymbol(std::vector<SymbolTerm> terms);

  static ScalarSymbol monomial(int a, int b, cplx coeff = 1.0);
  static ScalarSymbol phase(int m, int n, cplx coeff = 1.0);
  static ScalarSymbol cos_x(int k = 1);   // cos(2*pi*k*x)
  static ScalarSymbol sin_x(int k = 1);   // sin(2*pi*k*x)
  static ScalarSymbol cos_xi(int k = 1);  // cos(2*pi*k*xi)
  static ScalarSymbol sin_xi(int k = 1);  // sin(2*pi*k*xi)

  const std::vector<SymbolTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  ScalarSymbol operator+(const ScalarSymbol& o) const;
  ScalarSymbol operator-(const ScalarSymbol& o) const;
  ScalarSymbol operator*(const ScalarSymbol& o) const;  // pointwise product
  ScalarSymbol operator*(cplx s) const;
  ScalarSymbol operator-() const { return *this * cplx(-1.0); }

  ScalarSymbol dx() const;       // d/dx
  ScalarSymbol dxi() const;      // d/dxi
  ScalarSymbol adjoint() const;  // complex conjugate of the symbol

  cplx eval(double x, double xi, double h) const;

  // Taylor expansion about (x0, xi0) through total degree <= deg.  The result
  // is a plain polynomial (no oscillations) in the centered variables, i.e.
  // its x^a xi^b monomials mean (x-x0)^a (xi-xi0)^b.
  ScalarSymbol taylor(double x0, double xi0, int deg) const;

  int max_x_power() const;
  int max_xi_power() const;
  bool has_phases() const;     // any m or n nonzero
  bool has_h_phases() const;   // any r nonzero
  bool is_polynomial() const;  // no oscillations at all

  // +1 if every monomial has even total degree, -1 if every one is odd,
  // 0 for mixed or empty.  Only meaningful for polynomial symbols.
  int parity() const;

  // Largest coefficient magnitude (0 for the empty symbol).
  double max_coeff() const;

 private:
  void canonicalize();
  std::vector<SymbolTerm> terms_;
};

inline ScalarSymbol operator*(cplx s, const ScalarSymbol& p) { return p * s; }

// ---------------------------------------------------------------------------
// Matrix-valued graded symbols
//
// A PhaseSpaceSymbol is a finite sum  S = sum_k h^(k/2) S_k  of matrix-valued
// scalar symbols.  Grades are keyed by the integer k (twice the h-exponent),
// so half-integer powers need no floating-point keys.
// ---------------------------------------------------------------------------

class PhaseSpaceSymbol {
 public:
  PhaseSpaceSymbol() = default;
  explicit PhaseSpaceSymbol(int dim);

  int dim() const { return dim_; }
  bool self_adjoint() const { return self_adjoint_; }
  void set_self_adjoint(bool v) { self_adjoint_ = v; }

  ScalarSymbol& at(int grade, int row, int col);
  const ScalarSymbol& at(int grade, int row, int col) const;
  bool has_grade(int grade) const { return grades_.count(grade) != 0; }
  const std::map<int, std::vector<ScalarSymbol>>& grades() const {
    return grades_;
  }
  void drop_empty_grades();

  PhaseSpaceSymbol operator+(const PhaseSpaceSymbol& o) const;
  PhaseSpaceSymbol operator-(const PhaseSpaceSymbol& o) const;
  PhaseSpaceSymbol operator*(cplx s) const;

  // Formal adjoint: conjugate transpose entrywise, grade by grade.
  PhaseSpaceSymbol adjoint() const;

 private:
  int dim_ = 0;
  bool self_adjoint_ = false;
  // grade -> dim*dim scalar symbols, row-major
  std::map<int, std::vector<ScalarSymbol>> grades_;
  static const ScalarSymbol kZero;
};

// Candidate well of a 2x2 principal symbol: quadratic model
// a*(xi-xi0)^2 + b*(x-x0)^2 plus the subleading constants mu1, mu2 obtained
// from the rescaled normal form (omega^2 = b/a after normalizing a=1).
struct WellCandidate {
  double x0 = 0.0, xi0 = 0.0;
  double a = 0.0, b = 0.0;
  bool degenerate = false;
  double omega = 0.0;
  double mu1 = 0.0, mu2 = 0.0;
};

// ---------------------------------------------------------------------------
// Star product and friends
// ---------------------------------------------------------------------------

// Star product of scalar symbols with at most max_extra_h additional powers
// of h generated by the bidifferential series (each power raises the grade
// key by 2).  Pure oscillations compose exactly through the r phase, so for
// trigonometric polynomials the result is exact at every truncation level.
// Sign convention: x # xi - xi # x = i*h.
std::map<int, ScalarSymbol> moyal_scalar(const ScalarSymbol& A,
                                         const ScalarSymbol& B,
                                         int max_extra_h);

// Graded matrix star product, truncated at grade key max_half_order
// (i.e. at h^(max_half_order/2)).
PhaseSpaceSymbol moyal_product(const PhaseSpaceSymbol& A,
                               const PhaseSpaceSymbol& B,
                               int max_half_order = 64);

// A # B + B # A - 2*A*B: the correction that measures how far the star
// product is from the pointwise one on symmetric combinations.
PhaseSpaceSymbol symmetric_anticommutator(const PhaseSpaceSymbol& A,
                                          const PhaseSpaceSymbol& B,
                                          int max_half_order = 64);

// Replace every exact phase exp(2*pi^2*i*r*h) by its power series in h,
// truncated at grade key max_half_order.  This turns the exact product form
// into an honest h-graded expansion.
PhaseSpaceSymbol expand_h_phases(const PhaseSpaceSymbol& S,
                                 int max_half_order);

// Entrywise Taylor expansion, grade by grade.
PhaseSpaceSymbol taylor_expand(const PhaseSpaceSymbol& S, double x0,
                               double xi0, int deg);

// Evaluate the full graded symbol at a phase-space point for a given h.
Eigen::MatrixXcd eval_symbol(const PhaseSpaceSymbol& S, double x, double xi,
                             double h);

// Evaluate a single grade (no h weight applied).
Eigen::MatrixXcd eval_grade(const PhaseSpaceSymbol& S, int grade, double x,
                            double xi);

// Eigenvalues of the 2x2 Hermitian principal grade at a point, ascending.
std::array<double, 2> principal_eigenvalues(const PhaseSpaceSymbol& S,
                                            double x, double xi);

// Determinant of the principal grade at a point (real for Hermitian input).
double det_principal(const PhaseSpaceSymbol& S, double x, double xi);

// Blow-up at a degenerate well: substitute (x, xi) = (x0 + sqrt(h)*y,
// xi0 + sqrt(h)*eta) into S (whose grades are keyed by twice the h-exponent;
// h-phases must already be expanded) and regroup by powers of sqrt(h).
// The result T is keyed by j with the convention
//
//     T(y,eta) = sum_j h^((j+2)/2) T_j(y,eta),
//
// so T_0 is the quadratic harmonic part plus the constants coming from the
// h^1 grade of S.  Constant and linear parts of the principal grade at the
// well must vanish (that is what makes it a well); they are checked against
// `tol` and reported via std::invalid_argument otherwise.  Grades are kept
// through j <= kmax.
PhaseSpaceSymbol rescale_to_well(const PhaseSpaceSymbol& S,
                                 const WellCandidate& well, int kmax,
                                 double tol = 1e-9);

// Extract (omega, mu1, mu2) from a rescaled normal form whose T_0 equals
// diag(eta^2 + omega^2 y^2 + mu1, eta^2 + omega^2 y^2 + mu2).  Throws
// std::invalid_argument if T_0 does not have that shape within tol.
struct NormalFormData {
  double omega;
  double mu1, mu2;
};
NormalFormData extract_normal_form(const PhaseSpaceSymbol& T,
                                   double tol = 1e-9);

// JSON round trip (schema: {dim, grades:[{half_order, entries:[{row, col,
// terms:[{re, im, a, b, m, n, r}]}]}]}).
std::string symbol_to_json(const PhaseSpaceSymbol& S);
PhaseSpaceSymbol symbol_from_json(const std::string& text);

}  // namespace moirewell
