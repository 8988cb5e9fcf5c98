#include "moirewell/hermite.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace moirewell {

namespace {

void trim(Poly& p) {
  while (!p.empty() && std::abs(p.back()) == 0.0) p.pop_back();
}

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double v = 1.0;
  for (int i = 0; i < k; ++i) v = v * double(n - i) / double(i + 1);
  return v;
}

}  // namespace

cplx poly_eval(const Poly& p, double y) {
  cplx v = 0.0;
  for (size_t k = p.size(); k-- > 0;) v = v * y + p[k];
  return v;
}

Poly poly_add(const Poly& a, const Poly& b) {
  Poly out(std::max(a.size(), b.size()), cplx(0.0));
  for (size_t k = 0; k < a.size(); ++k) out[k] += a[k];
  for (size_t k = 0; k < b.size(); ++k) out[k] += b[k];
  trim(out);
  return out;
}

Poly poly_scale(const Poly& a, cplx s) {
  Poly out = a;
  for (auto& c : out) c *= s;
  trim(out);
  return out;
}

Poly poly_mul_y(const Poly& a) {
  if (a.empty()) return {};
  Poly out(a.size() + 1, cplx(0.0));
  for (size_t k = 0; k < a.size(); ++k) out[k + 1] = a[k];
  return out;
}

Poly poly_diff(const Poly& a) {
  if (a.size() <= 1) return {};
  Poly out(a.size() - 1);
  for (size_t k = 1; k < a.size(); ++k) out[k - 1] = double(k) * a[k];
  trim(out);
  return out;
}

int poly_degree(const Poly& a) {
  for (size_t k = a.size(); k-- > 0;)
    if (std::abs(a[k]) != 0.0) return int(k);
  return -1;
}

double hermite_function(int n, double omega, double y) {
  assert(n >= 0);
  const double z = std::sqrt(omega) * y;
  double prev = 0.0;
  double cur = std::pow(omega / M_PI, 0.25) * std::exp(-0.5 * z * z);
  for (int k = 0; k < n; ++k) {
    double next = std::sqrt(2.0 / (k + 1)) * z * cur -
                  std::sqrt(double(k) / (k + 1)) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

Poly hermite_amplitude(int n, double omega) {
  assert(n >= 0);
  Poly prev;
  Poly cur{cplx(std::pow(omega / M_PI, 0.25))};
  for (int k = 0; k < n; ++k) {
    // raising operator on amplitudes: p -> (2 omega y p - p') / sqrt(2 omega (k+1))
    Poly next = poly_add(poly_scale(poly_mul_y(cur), 2.0 * omega),
                         poly_scale(poly_diff(cur), -1.0));
    next = poly_scale(next, 1.0 / std::sqrt(2.0 * omega * (k + 1)));
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

double gaussian_moment(double omega, int k) {
  assert(k >= 0);
  if (k % 2 == 1) return 0.0;
  double m = std::sqrt(M_PI / omega);
  for (int j = 2; j <= k; j += 2) m *= double(j - 1) / (2.0 * omega);
  return m;
}

cplx amplitude_inner(const Poly& a, const Poly& b, double omega) {
  cplx v = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i]) == 0.0) continue;
    for (size_t j = 0; j < b.size(); ++j) {
      if ((i + j) % 2 == 1) continue;
      v += std::conj(a[i]) * b[j] * gaussian_moment(omega, int(i + j));
    }
  }
  return v;
}

cplx amplitude_inner(const GaussianAmplitude& a, const GaussianAmplitude& b) {
  assert(a.omega == b.omega);
  return amplitude_inner(a.comp[0], b.comp[0], a.omega) +
         amplitude_inner(a.comp[1], b.comp[1], a.omega);
}

double amplitude_norm(const GaussianAmplitude& a) {
  return std::sqrt(std::max(0.0, std::real(amplitude_inner(a, a))));
}

namespace {

// momentum action on an amplitude: -i d/dy applied to q e^{-omega y^2/2}
Poly apply_momentum(const Poly& q, double omega) {
  return poly_scale(poly_add(poly_diff(q), poly_scale(poly_mul_y(q), -omega)),
                    cplx(0.0, -1.0));
}

}  // namespace

Poly apply_weyl_poly(const ScalarSymbol& p, const Poly& q, double omega) {
  Poly out;
  for (const auto& t : p.terms()) {
    if (t.m != 0 || t.n != 0 || t.r != 0)
      throw std::invalid_argument(
          "apply_weyl_poly: symbol must be a plain polynomial");
    // symmetrized monomial: 2^{-a} sum_j C(a,j) y^{a-j} D^b (y^j q)
    Poly acc;
    for (int j = 0; j <= t.a; ++j) {
      Poly tmp = q;
      for (int s = 0; s < j; ++s) tmp = poly_mul_y(tmp);
      for (int s = 0; s < t.b; ++s) tmp = apply_momentum(tmp, omega);
      for (int s = 0; s < t.a - j; ++s) tmp = poly_mul_y(tmp);
      acc = poly_add(acc, poly_scale(tmp, binom(t.a, j)));
    }
    out = poly_add(out, poly_scale(acc, t.coeff * std::pow(0.5, t.a)));
  }
  return out;
}

GaussianAmplitude apply_weyl_grade(const PhaseSpaceSymbol& T, int grade,
                                   const GaussianAmplitude& v) {
  if (T.dim() != 2)
    throw std::invalid_argument("apply_weyl_grade: need a 2x2 symbol");
  GaussianAmplitude out;
  out.omega = v.omega;
  if (!T.has_grade(grade)) return out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const auto& e = T.at(grade, i, j);
      if (e.empty() || v.comp[j].empty()) continue;
      out.comp[i] =
          poly_add(out.comp[i], apply_weyl_poly(e, v.comp[j], v.omega));
    }
  return out;
}

std::vector<cplx> hermite_coefficients(const Poly& q, double omega) {
  // back-substitution on the leading coefficient: the n-th basis amplitude
  // has exact leading term (omega/pi)^{1/4} (2 omega)^{n/2} / sqrt(n!) y^n
  Poly rem = q;
  trim(rem);
  const int deg = std::max(0, poly_degree(rem));
  std::vector<cplx> coef(deg + 1, cplx(0.0));
  std::vector<Poly> basis(deg + 1);
  for (int n = 0; n <= deg; ++n) basis[n] = hermite_amplitude(n, omega);
  for (int n = deg; n >= 0; --n) {
    if (int(rem.size()) <= n || std::abs(rem[n]) == 0.0) continue;
    cplx c = rem[n] / basis[n][n];
    coef[n] = c;
    rem = poly_add(rem, poly_scale(basis[n], -c));
  }
  return coef;
}

Poly amplitude_from_hermite(const std::vector<cplx>& coef, double omega) {
  Poly out;
  for (size_t n = 0; n < coef.size(); ++n) {
    if (std::abs(coef[n]) == 0.0) continue;
    out = poly_add(out, poly_scale(hermite_amplitude(int(n), omega), coef[n]));
  }
  return out;
}

std::vector<cplx> solve_shifted(double omega, double mu, double lambda0,
                                const std::vector<cplx>& rhs,
                                double rel_tol) {
  double scale = 0.0;
  for (const auto& c : rhs) scale = std::max(scale, std::abs(c));
  std::vector<cplx> u(rhs.size(), cplx(0.0));
  for (size_t n = 0; n < rhs.size(); ++n) {
    const double den = (2.0 * n + 1.0) * omega + mu - lambda0;
    if (std::abs(den) < 1e-8 * omega) {
      if (std::abs(rhs[n]) > rel_tol * scale)
        throw OrthogonalityViolation(
            "solve_shifted: right side has weight on a resonant mode");
      continue;
    }
    u[n] = rhs[n] / den;
  }
  return u;
}

Eigen::MatrixXcd weyl_matrix(const ScalarSymbol& p, double omega, int N) {
  int deg = 0;
  for (const auto& t : p.terms()) {
    if (t.m != 0 || t.n != 0 || t.r != 0)
      throw std::invalid_argument(
          "weyl_matrix: symbol must be a plain polynomial");
    deg = std::max(deg, t.a + t.b);
  }
  // work in a larger space so truncation cannot contaminate the block kept
  const int M = N + deg + 2;
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(M, M);
  for (int n = 1; n < M; ++n) A(n - 1, n) = std::sqrt(double(n));
  const Eigen::MatrixXcd Ad = A.adjoint();
  const Eigen::MatrixXcd Y = (A + Ad) / std::sqrt(2.0 * omega);
  const Eigen::MatrixXcd D = cplx(0.0, -1.0) * std::sqrt(0.5 * omega) *
                             (A - Ad);
  Eigen::MatrixXcd op = Eigen::MatrixXcd::Zero(M, M);
  for (const auto& t : p.terms()) {
    Eigen::MatrixXcd Dq = Eigen::MatrixXcd::Identity(M, M);
    for (int s = 0; s < t.b; ++s) Dq = D * Dq;
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(M, M);
    Eigen::MatrixXcd Yj = Eigen::MatrixXcd::Identity(M, M);
    for (int j = 0; j <= t.a; ++j) {
      Eigen::MatrixXcd term = Dq * Yj;
      for (int s = 0; s < t.a - j; ++s) term = Y * term;
      acc += binom(t.a, j) * term;
      Yj = Y * Yj;
    }
    op += t.coeff * std::pow(0.5, t.a) * acc;
  }
  return op.topLeftCorner(N + 1, N + 1);
}

Eigen::MatrixXcd galerkin_matrix(const PhaseSpaceSymbol& T, double omega,
                                 int N, double h) {
  if (T.dim() != 2)
    throw std::invalid_argument("galerkin_matrix: need a 2x2 symbol");
  const int dim = 2 * (N + 1);
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& [grade, entries] : T.grades()) {
    if (grade < 0)
      throw std::invalid_argument("galerkin_matrix: negative grade");
    const double w = std::pow(h, 0.5 * grade);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const auto& e = entries[size_t(i) * 2 + j];
        if (e.empty()) continue;
        Eigen::MatrixXcd block = weyl_matrix(e, omega, N);
        for (int np = 0; np <= N; ++np)
          for (int n = 0; n <= N; ++n)
            M(2 * np + i, 2 * n + j) += w * block(np, n);
      }
  }
  return M;
}

}  // namespace moirewell
