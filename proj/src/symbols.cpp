#include "moirewell/symbols.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace moirewell {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;
constexpr double kDropTol = 1e-14;  // coefficients below this are noise

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double v = 1.0;
  for (int i = 0; i < k; ++i) v = v * double(n - i) / double(i + 1);
  return v;
}

// n * (n-1) * ... * (n-d+1)
double falling(int n, int d) {
  double v = 1.0;
  for (int i = 0; i < d; ++i) v *= double(n - i);
  return v;
}

bool term_key_less(const SymbolTerm& s, const SymbolTerm& t) {
  if (s.a != t.a) return s.a < t.a;
  if (s.b != t.b) return s.b < t.b;
  if (s.m != t.m) return s.m < t.m;
  if (s.n != t.n) return s.n < t.n;
  return s.r < t.r;
}

bool term_key_equal(const SymbolTerm& s, const SymbolTerm& t) {
  return s.a == t.a && s.b == t.b && s.m == t.m && s.n == t.n && s.r == t.r;
}

}  // namespace

ScalarSymbol::ScalarSymbol(cplx constant) {
  if (std::abs(constant) > 0.0) terms_.push_back({constant, 0, 0, 0, 0, 0});
  canonicalize();
}

ScalarSymbol::ScalarSymbol(std::vector<SymbolTerm> terms)
    : terms_(std::move(terms)) {
  canonicalize();
}

void ScalarSymbol::canonicalize() {
  std::sort(terms_.begin(), terms_.end(), term_key_less);
  std::vector<SymbolTerm> merged;
  for (const auto& t : terms_) {
    if (!merged.empty() && term_key_equal(merged.back(), t)) {
      merged.back().coeff += t.coeff;
    } else {
      merged.push_back(t);
    }
  }
  terms_.clear();
  for (const auto& t : merged) {
    if (std::abs(t.coeff) >= kDropTol) terms_.push_back(t);
  }
}

ScalarSymbol ScalarSymbol::monomial(int a, int b, cplx coeff) {
  assert(a >= 0 && b >= 0);
  return ScalarSymbol(std::vector<SymbolTerm>{{coeff, a, b, 0, 0, 0}});
}

ScalarSymbol ScalarSymbol::phase(int m, int n, cplx coeff) {
  return ScalarSymbol(std::vector<SymbolTerm>{{coeff, 0, 0, m, n, 0}});
}

ScalarSymbol ScalarSymbol::cos_x(int k) {
  return ScalarSymbol(std::vector<SymbolTerm>{{0.5, 0, 0, k, 0, 0},
                                              {0.5, 0, 0, -k, 0, 0}});
}

ScalarSymbol ScalarSymbol::sin_x(int k) {
  const cplx half_over_i(0.0, -0.5);
  return ScalarSymbol(std::vector<SymbolTerm>{{half_over_i, 0, 0, k, 0, 0},
                                              {-half_over_i, 0, 0, -k, 0, 0}});
}

ScalarSymbol ScalarSymbol::cos_xi(int k) {
  return ScalarSymbol(std::vector<SymbolTerm>{{0.5, 0, 0, 0, k, 0},
                                              {0.5, 0, 0, 0, -k, 0}});
}

ScalarSymbol ScalarSymbol::sin_xi(int k) {
  const cplx half_over_i(0.0, -0.5);
  return ScalarSymbol(std::vector<SymbolTerm>{{half_over_i, 0, 0, 0, k, 0},
                                              {-half_over_i, 0, 0, 0, -k, 0}});
}

ScalarSymbol ScalarSymbol::operator+(const ScalarSymbol& o) const {
  std::vector<SymbolTerm> all = terms_;
  all.insert(all.end(), o.terms_.begin(), o.terms_.end());
  return ScalarSymbol(std::move(all));
}

ScalarSymbol ScalarSymbol::operator-(const ScalarSymbol& o) const {
  std::vector<SymbolTerm> all = terms_;
  for (auto t : o.terms_) {
    t.coeff = -t.coeff;
    all.push_back(t);
  }
  return ScalarSymbol(std::move(all));
}

ScalarSymbol ScalarSymbol::operator*(const ScalarSymbol& o) const {
  std::vector<SymbolTerm> out;
  out.reserve(terms_.size() * o.terms_.size());
  for (const auto& s : terms_) {
    for (const auto& t : o.terms_) {
      out.push_back(
          {s.coeff * t.coeff, s.a + t.a, s.b + t.b, s.m + t.m, s.n + t.n,
           s.r + t.r});
    }
  }
  return ScalarSymbol(std::move(out));
}

ScalarSymbol ScalarSymbol::operator*(cplx s) const {
  std::vector<SymbolTerm> out = terms_;
  for (auto& t : out) t.coeff *= s;
  return ScalarSymbol(std::move(out));
}

ScalarSymbol ScalarSymbol::dx() const {
  std::vector<SymbolTerm> out;
  for (const auto& t : terms_) {
    if (t.a > 0) {
      SymbolTerm u = t;
      u.coeff *= double(t.a);
      u.a -= 1;
      out.push_back(u);
    }
    if (t.m != 0) {
      SymbolTerm u = t;
      u.coeff *= cplx(0.0, kTwoPi * t.m);
      out.push_back(u);
    }
  }
  return ScalarSymbol(std::move(out));
}

ScalarSymbol ScalarSymbol::dxi() const {
  std::vector<SymbolTerm> out;
  for (const auto& t : terms_) {
    if (t.b > 0) {
      SymbolTerm u = t;
      u.coeff *= double(t.b);
      u.b -= 1;
      out.push_back(u);
    }
    if (t.n != 0) {
      SymbolTerm u = t;
      u.coeff *= cplx(0.0, kTwoPi * t.n);
      out.push_back(u);
    }
  }
  return ScalarSymbol(std::move(out));
}

ScalarSymbol ScalarSymbol::adjoint() const {
  std::vector<SymbolTerm> out;
  for (const auto& t : terms_) {
    out.push_back({std::conj(t.coeff), t.a, t.b, -t.m, -t.n, -t.r});
  }
  return ScalarSymbol(std::move(out));
}

cplx ScalarSymbol::eval(double x, double xi, double h) const {
  cplx v = 0.0;
  for (const auto& t : terms_) {
    double arg = kTwoPi * (t.m * x + t.n * xi) + 2.0 * M_PI * M_PI * t.r * h;
    v += t.coeff * std::pow(x, t.a) * std::pow(xi, t.b) *
         std::polar(1.0, arg);
  }
  return v;
}

ScalarSymbol ScalarSymbol::taylor(double x0, double xi0, int deg) const {
  std::vector<SymbolTerm> out;
  std::vector<cplx> xc(deg + 1), xic(deg + 1);
  for (const auto& t : terms_) {
    // Expansion coefficients of x^a e^{2 pi i m x} in powers of (x - x0):
    // binomial shift of the monomial times the exponential series.
    std::fill(xc.begin(), xc.end(), cplx(0.0));
    const cplx ephx = std::polar(1.0, kTwoPi * t.m * x0);
    for (int j = 0; j <= std::min(t.a, deg); ++j) {
      cplx base = binom(t.a, j) * std::pow(x0, t.a - j) * ephx;
      cplx pw = 1.0;
      for (int k = 0; j + k <= deg; ++k) {
        xc[j + k] += base * pw;
        pw *= cplx(0.0, kTwoPi * t.m) / double(k + 1);
      }
    }
    std::fill(xic.begin(), xic.end(), cplx(0.0));
    const cplx ephxi = std::polar(1.0, kTwoPi * t.n * xi0);
    for (int j = 0; j <= std::min(t.b, deg); ++j) {
      cplx base = binom(t.b, j) * std::pow(xi0, t.b - j) * ephxi;
      cplx pw = 1.0;
      for (int k = 0; j + k <= deg; ++k) {
        xic[j + k] += base * pw;
        pw *= cplx(0.0, kTwoPi * t.n) / double(k + 1);
      }
    }
    for (int i = 0; i <= deg; ++i) {
      for (int j = 0; i + j <= deg; ++j) {
        cplx c = t.coeff * xc[i] * xic[j];
        if (std::abs(c) >= kDropTol) out.push_back({c, i, j, 0, 0, t.r});
      }
    }
  }
  return ScalarSymbol(std::move(out));
}

int ScalarSymbol::max_x_power() const {
  int v = 0;
  for (const auto& t : terms_) v = std::max(v, t.a);
  return v;
}

int ScalarSymbol::max_xi_power() const {
  int v = 0;
  for (const auto& t : terms_) v = std::max(v, t.b);
  return v;
}

bool ScalarSymbol::has_phases() const {
  for (const auto& t : terms_)
    if (t.m != 0 || t.n != 0) return true;
  return false;
}

bool ScalarSymbol::has_h_phases() const {
  for (const auto& t : terms_)
    if (t.r != 0) return true;
  return false;
}

bool ScalarSymbol::is_polynomial() const { return !has_phases(); }

int ScalarSymbol::parity() const {
  bool even = true, odd = true;
  for (const auto& t : terms_) {
    if ((t.a + t.b) % 2 == 0) odd = false;
    else even = false;
  }
  if (terms_.empty()) return 0;
  if (even) return 1;
  if (odd) return -1;
  return 0;
}

double ScalarSymbol::max_coeff() const {
  double v = 0.0;
  for (const auto& t : terms_) v = std::max(v, std::abs(t.coeff));
  return v;
}

// ---------------------------------------------------------------------------
// PhaseSpaceSymbol
// ---------------------------------------------------------------------------

const ScalarSymbol PhaseSpaceSymbol::kZero{};

PhaseSpaceSymbol::PhaseSpaceSymbol(int dim) : dim_(dim) {
  assert(dim >= 1);
}

ScalarSymbol& PhaseSpaceSymbol::at(int grade, int row, int col) {
  assert(row >= 0 && row < dim_ && col >= 0 && col < dim_);
  auto& g = grades_[grade];
  if (g.empty()) g.resize(size_t(dim_) * dim_);
  return g[size_t(row) * dim_ + col];
}

const ScalarSymbol& PhaseSpaceSymbol::at(int grade, int row, int col) const {
  assert(row >= 0 && row < dim_ && col >= 0 && col < dim_);
  auto it = grades_.find(grade);
  if (it == grades_.end()) return kZero;
  return it->second[size_t(row) * dim_ + col];
}

void PhaseSpaceSymbol::drop_empty_grades() {
  for (auto it = grades_.begin(); it != grades_.end();) {
    bool empty = true;
    for (const auto& e : it->second)
      if (!e.empty()) empty = false;
    it = empty ? grades_.erase(it) : std::next(it);
  }
}

PhaseSpaceSymbol PhaseSpaceSymbol::operator+(const PhaseSpaceSymbol& o) const {
  assert(dim_ == o.dim_);
  PhaseSpaceSymbol out = *this;
  for (const auto& [g, entries] : o.grades_) {
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) {
        const auto& e = entries[size_t(i) * dim_ + j];
        if (!e.empty()) out.at(g, i, j) = out.at(g, i, j) + e;
      }
  }
  out.drop_empty_grades();
  return out;
}

PhaseSpaceSymbol PhaseSpaceSymbol::operator-(const PhaseSpaceSymbol& o) const {
  return *this + (o * cplx(-1.0));
}

PhaseSpaceSymbol PhaseSpaceSymbol::operator*(cplx s) const {
  PhaseSpaceSymbol out = *this;
  for (auto& [g, entries] : out.grades_)
    for (auto& e : entries) e = e * s;
  out.drop_empty_grades();
  return out;
}

PhaseSpaceSymbol PhaseSpaceSymbol::adjoint() const {
  PhaseSpaceSymbol out(dim_);
  for (const auto& [g, entries] : grades_) {
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) {
        const auto& e = entries[size_t(i) * dim_ + j];
        if (!e.empty()) out.at(g, j, i) = e.adjoint();
      }
  }
  out.set_self_adjoint(self_adjoint_);
  return out;
}

// ---------------------------------------------------------------------------
// Star product
// ---------------------------------------------------------------------------

namespace {

// Twisted product of two single terms.  Factoring the oscillations out of
// the bidifferential operator exp((i h / 2)(d_x d_eta - d_xi d_y)) leaves
//   * one exact phase: r += n1*m2 - m1*n2  (units of 2 pi^2 h),
//   * four commuting shifts of the polynomial arguments, each linear in h,
//   * the finite transvectant series on the shifted polynomials.
// Everything is exact; only the number of h powers kept is capped.
void term_star(const SymbolTerm& t1, const SymbolTerm& t2, int max_extra,
               std::map<int, std::vector<SymbolTerm>>& out) {
  const int m0 = t1.m + t2.m, n0 = t1.n + t2.n;
  const int r0 = t1.r + t2.r + (t1.n * t2.m - t1.m * t2.n);
  const cplx c0 = t1.coeff * t2.coeff;

  // shift magnitudes: x -> x - pi h n2, xi -> xi + pi h m2,
  //                   y -> y + pi h n1, eta -> eta - pi h m1
  const double sx = -M_PI * t2.n, sxi = M_PI * t2.m;
  const double sy = M_PI * t1.n, seta = -M_PI * t1.m;

  for (int i1 = 0; i1 <= t1.a && i1 <= max_extra; ++i1) {
    const double c1 = binom(t1.a, i1) * std::pow(sx, i1);
    if (c1 == 0.0 && i1 > 0) continue;
    const int p = t1.a - i1;
    for (int i2 = 0; i2 <= t1.b && i1 + i2 <= max_extra; ++i2) {
      const double c2 = binom(t1.b, i2) * std::pow(sxi, i2);
      if (c2 == 0.0 && i2 > 0) continue;
      const int q = t1.b - i2;
      for (int i3 = 0; i3 <= t2.a && i1 + i2 + i3 <= max_extra; ++i3) {
        const double c3 = binom(t2.a, i3) * std::pow(sy, i3);
        if (c3 == 0.0 && i3 > 0) continue;
        const int rr = t2.a - i3;
        for (int i4 = 0; i4 <= t2.b && i1 + i2 + i3 + i4 <= max_extra; ++i4) {
          const double c4 = binom(t2.b, i4) * std::pow(seta, i4);
          if (c4 == 0.0 && i4 > 0) continue;
          const int s = t2.b - i4;
          const int hbase = i1 + i2 + i3 + i4;
          const cplx cbase = c0 * c1 * c2 * c3 * c4;

          const int kmaxdeg = std::min(p + q, rr + s);
          cplx ihalf_pow = 1.0;  // (i/2)^k / k!
          for (int k = 0; k <= kmaxdeg && hbase + k <= max_extra; ++k) {
            for (int j = 0; j <= k; ++j) {
              const int dx1 = k - j;  // d_x on the first factor
              if (dx1 > p || j > q || j > rr || dx1 > s) continue;
              double w = binom(k, j) * falling(p, dx1) * falling(q, j) *
                         falling(rr, j) * falling(s, dx1);
              if (j % 2 == 1) w = -w;
              cplx c = cbase * ihalf_pow * w;
              if (std::abs(c) < 1e-300) continue;
              out[hbase + k].push_back(
                  {c, p + rr - k, q + s - k, m0, n0, r0});
            }
            ihalf_pow *= cplx(0.0, 0.5) / double(k + 1);
          }
        }
      }
    }
  }
}

}  // namespace

std::map<int, ScalarSymbol> moyal_scalar(const ScalarSymbol& A,
                                         const ScalarSymbol& B,
                                         int max_extra_h) {
  std::map<int, std::vector<SymbolTerm>> raw;
  for (const auto& t1 : A.terms())
    for (const auto& t2 : B.terms()) term_star(t1, t2, max_extra_h, raw);
  std::map<int, ScalarSymbol> out;
  for (auto& [k, terms] : raw) {
    ScalarSymbol s(std::move(terms));
    if (!s.empty()) out.emplace(k, std::move(s));
  }
  return out;
}

PhaseSpaceSymbol moyal_product(const PhaseSpaceSymbol& A,
                               const PhaseSpaceSymbol& B,
                               int max_half_order) {
  assert(A.dim() == B.dim());
  const int d = A.dim();
  PhaseSpaceSymbol out(d);
  for (const auto& [ga, ea] : A.grades()) {
    for (const auto& [gb, eb] : B.grades()) {
      const int base = ga + gb;
      if (base > max_half_order) continue;
      const int max_extra = (max_half_order - base) / 2;
      for (int i = 0; i < d; ++i) {
        for (int k = 0; k < d; ++k) {
          const auto& aik = ea[size_t(i) * d + k];
          if (aik.empty()) continue;
          for (int j = 0; j < d; ++j) {
            const auto& bkj = eb[size_t(k) * d + j];
            if (bkj.empty()) continue;
            for (auto& [extra, s] : moyal_scalar(aik, bkj, max_extra)) {
              const int g = base + 2 * extra;
              out.at(g, i, j) = out.at(g, i, j) + s;
            }
          }
        }
      }
    }
  }
  out.drop_empty_grades();
  return out;
}

PhaseSpaceSymbol symmetric_anticommutator(const PhaseSpaceSymbol& A,
                                          const PhaseSpaceSymbol& B,
                                          int max_half_order) {
  PhaseSpaceSymbol ab = moyal_product(A, B, max_half_order);
  PhaseSpaceSymbol ba = moyal_product(B, A, max_half_order);
  // pointwise product, grade by grade
  const int d = A.dim();
  PhaseSpaceSymbol pw(d);
  for (const auto& [ga, ea] : A.grades())
    for (const auto& [gb, eb] : B.grades()) {
      if (ga + gb > max_half_order) continue;
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          ScalarSymbol acc;
          for (int k = 0; k < d; ++k)
            acc = acc + ea[size_t(i) * d + k] * eb[size_t(k) * d + j];
          if (!acc.empty())
            pw.at(ga + gb, i, j) = pw.at(ga + gb, i, j) + acc;
        }
    }
  pw.drop_empty_grades();
  return ab + ba - pw * cplx(2.0);
}

PhaseSpaceSymbol expand_h_phases(const PhaseSpaceSymbol& S,
                                 int max_half_order) {
  const int d = S.dim();
  PhaseSpaceSymbol out(d);
  out.set_self_adjoint(S.self_adjoint());
  for (const auto& [g, entries] : S.grades()) {
    if (g > max_half_order) continue;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        const auto& e = entries[size_t(i) * d + j];
        for (const auto& t : e.terms()) {
          if (t.r == 0) {
            out.at(g, i, j) = out.at(g, i, j) +
                              ScalarSymbol(std::vector<SymbolTerm>{t});
            continue;
          }
          // exp(2 pi^2 i r h) = sum_k (2 pi^2 i r)^k h^k / k!
          cplx factor = t.coeff;
          const cplx step(0.0, 2.0 * M_PI * M_PI * t.r);
          for (int k = 0; g + 2 * k <= max_half_order; ++k) {
            if (std::abs(factor) >= 1e-300) {
              SymbolTerm u = t;
              u.coeff = factor;
              u.r = 0;
              out.at(g + 2 * k, i, j) =
                  out.at(g + 2 * k, i, j) +
                  ScalarSymbol(std::vector<SymbolTerm>{u});
            }
            factor *= step / double(k + 1);
          }
        }
      }
  }
  out.drop_empty_grades();
  return out;
}

PhaseSpaceSymbol taylor_expand(const PhaseSpaceSymbol& S, double x0,
                               double xi0, int deg) {
  const int d = S.dim();
  PhaseSpaceSymbol out(d);
  for (const auto& [g, entries] : S.grades())
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        const auto& e = entries[size_t(i) * d + j];
        if (!e.empty()) out.at(g, i, j) = e.taylor(x0, xi0, deg);
      }
  out.drop_empty_grades();
  return out;
}

Eigen::MatrixXcd eval_symbol(const PhaseSpaceSymbol& S, double x, double xi,
                             double h) {
  const int d = S.dim();
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(d, d);
  for (const auto& [g, entries] : S.grades()) {
    const double w = std::pow(h, 0.5 * g);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        M(i, j) += w * entries[size_t(i) * d + j].eval(x, xi, h);
  }
  return M;
}

Eigen::MatrixXcd eval_grade(const PhaseSpaceSymbol& S, int grade, double x,
                            double xi) {
  const int d = S.dim();
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(d, d);
  if (!S.has_grade(grade)) return M;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) M(i, j) = S.at(grade, i, j).eval(x, xi, 0.0);
  return M;
}

std::array<double, 2> principal_eigenvalues(const PhaseSpaceSymbol& S,
                                            double x, double xi) {
  if (S.dim() != 2)
    throw std::invalid_argument(
        "principal_eigenvalues: need a 2x2 symbol block");
  Eigen::MatrixXcd M = eval_grade(S, 0, x, xi);
  const double ad = 0.5 * std::real(M(0, 0) + M(1, 1));
  const double dd = 0.5 * std::real(M(0, 0) - M(1, 1));
  const double off = std::abs(M(0, 1));
  const double rad = std::sqrt(dd * dd + off * off);
  return {ad - rad, ad + rad};
}

double det_principal(const PhaseSpaceSymbol& S, double x, double xi) {
  Eigen::MatrixXcd M = eval_grade(S, 0, x, xi);
  const cplx det = M.determinant();
  return std::real(det);
}

PhaseSpaceSymbol rescale_to_well(const PhaseSpaceSymbol& S,
                                 const WellCandidate& well, int kmax,
                                 double tol) {
  const int d = S.dim();
  PhaseSpaceSymbol T(d);
  for (const auto& [g, entries] : S.grades()) {
    for (const auto& e : entries)
      if (e.has_h_phases())
        throw std::invalid_argument(
            "rescale_to_well: expand h-phases before rescaling");
    const int dmax = kmax + 2 - g;
    if (dmax < 0) continue;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        const auto& e = entries[size_t(i) * d + j];
        if (e.empty()) continue;
        ScalarSymbol tay = e.taylor(well.x0, well.xi0, dmax);
        for (const auto& t : tay.terms()) {
          const int deg = t.a + t.b;
          const int out_grade = g + deg - 2;
          if (out_grade < 0) {
            // sub-quadratic content of the principal grade must vanish at a
            // genuine well
            if (std::abs(t.coeff) > tol)
              throw std::invalid_argument(
                  "rescale_to_well: symbol does not vanish to second order "
                  "at the given point");
            continue;
          }
          if (out_grade > kmax) continue;
          // note (x,xi) monomials become (y,eta) monomials one-for-one
          T.at(out_grade, i, j) =
              T.at(out_grade, i, j) +
              ScalarSymbol(std::vector<SymbolTerm>{t});
        }
      }
  }
  T.drop_empty_grades();
  return T;
}

NormalFormData extract_normal_form(const PhaseSpaceSymbol& T, double tol) {
  if (T.dim() != 2)
    throw std::invalid_argument("extract_normal_form: need a 2x2 symbol");
  NormalFormData nf{0.0, 0.0, 0.0};
  double omega2[2] = {0.0, 0.0};
  for (int c = 0; c < 2; ++c) {
    const auto& e = T.at(0, c, c);
    double eta2 = 0.0, y2 = 0.0, constant = 0.0;
    for (const auto& t : e.terms()) {
      if (!(t.m == 0 && t.n == 0))
        throw std::invalid_argument("extract_normal_form: non-polynomial T0");
      const double re = std::real(t.coeff);
      if (std::abs(std::imag(t.coeff)) > tol)
        throw std::invalid_argument("extract_normal_form: complex diagonal");
      if (t.a == 0 && t.b == 2) eta2 = re;
      else if (t.a == 2 && t.b == 0) y2 = re;
      else if (t.a == 0 && t.b == 0) constant = re;
      else if (std::abs(re) > tol)
        throw std::invalid_argument(
            "extract_normal_form: T0 has cross or linear terms");
    }
    if (std::abs(eta2 - 1.0) > tol)
      throw std::invalid_argument(
          "extract_normal_form: eta^2 coefficient is not 1 (normalize "
          "the symbol first)");
    if (y2 <= 0.0)
      throw std::invalid_argument("extract_normal_form: no confining y^2");
    omega2[c] = y2;
    (c == 0 ? nf.mu1 : nf.mu2) = constant;
  }
  if (std::abs(omega2[0] - omega2[1]) > tol * std::max(1.0, omega2[0]))
    throw std::invalid_argument(
        "extract_normal_form: mismatched harmonic frequencies");
  for (int i = 0; i < 2; ++i) {
    const auto& off = T.at(0, i, 1 - i);
    if (off.max_coeff() > tol)
      throw std::invalid_argument("extract_normal_form: T0 not diagonal");
  }
  nf.omega = std::sqrt(omega2[0]);
  return nf;
}

// ---------------------------------------------------------------------------
// JSON round trip
// ---------------------------------------------------------------------------

std::string symbol_to_json(const PhaseSpaceSymbol& S) {
  nlohmann::json j;
  j["dim"] = S.dim();
  auto& gl = j["grades"] = nlohmann::json::array();
  for (const auto& [g, entries] : S.grades()) {
    nlohmann::json jg;
    jg["half_order"] = g;
    auto& el = jg["entries"] = nlohmann::json::array();
    for (int row = 0; row < S.dim(); ++row)
      for (int col = 0; col < S.dim(); ++col) {
        const auto& e = entries[size_t(row) * S.dim() + col];
        if (e.empty()) continue;
        nlohmann::json je;
        je["row"] = row;
        je["col"] = col;
        auto& tl = je["terms"] = nlohmann::json::array();
        for (const auto& t : e.terms()) {
          nlohmann::json jt;
          jt["re"] = std::real(t.coeff);
          jt["im"] = std::imag(t.coeff);
          jt["a"] = t.a;
          jt["b"] = t.b;
          jt["m"] = t.m;
          jt["n"] = t.n;
          if (t.r != 0) jt["r"] = t.r;
          tl.push_back(jt);
        }
        el.push_back(je);
      }
    gl.push_back(jg);
  }
  return j.dump(2);
}

PhaseSpaceSymbol symbol_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  PhaseSpaceSymbol S(j.at("dim").get<int>());
  for (const auto& jg : j.at("grades")) {
    const int g = jg.at("half_order").get<int>();
    for (const auto& je : jg.at("entries")) {
      const int row = je.at("row").get<int>();
      const int col = je.at("col").get<int>();
      std::vector<SymbolTerm> terms;
      for (const auto& jt : je.at("terms")) {
        SymbolTerm t;
        t.coeff = cplx(jt.at("re").get<double>(), jt.at("im").get<double>());
        t.a = jt.at("a").get<int>();
        t.b = jt.at("b").get<int>();
        t.m = jt.at("m").get<int>();
        t.n = jt.at("n").get<int>();
        t.r = jt.value("r", 0);
        terms.push_back(t);
      }
      S.at(g, row, col) = ScalarSymbol(std::move(terms));
    }
  }
  return S;
}

const char* version_string() {
#ifdef MOIREWELL_VERSION
  return MOIREWELL_VERSION;
#else
  return "0.1.0";
#endif
}

}  // namespace moirewell
