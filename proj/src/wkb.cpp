#include "moirewell/wkb.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cassert>
#include <cmath>
#include <sstream>

namespace moirewell {

namespace {

GaussianAmplitude amp_add(const GaussianAmplitude& a,
                          const GaussianAmplitude& b) {
  GaussianAmplitude out;
  out.omega = a.omega;
  for (int c = 0; c < 2; ++c) out.comp[c] = poly_add(a.comp[c], b.comp[c]);
  return out;
}

GaussianAmplitude amp_scale(const GaussianAmplitude& a, cplx s) {
  GaussianAmplitude out;
  out.omega = a.omega;
  for (int c = 0; c < 2; ++c) out.comp[c] = poly_scale(a.comp[c], s);
  return out;
}

}  // namespace

std::vector<LadderLevel> well_levels(const NormalFormData& nf, int count) {
  std::vector<LadderLevel> levels;
  for (int n = 0; n <= count + 1; ++n) {
    levels.push_back({(2.0 * n + 1.0) * nf.omega + nf.mu1, n, 0});
    levels.push_back({(2.0 * n + 1.0) * nf.omega + nf.mu2, n, 1});
  }
  std::sort(levels.begin(), levels.end(),
            [](const LadderLevel& a, const LadderLevel& b) {
              return a.e < b.e;
            });
  levels.resize(count);
  return levels;
}

int classify_resonance(const NormalFormData& nf, double tol) {
  const double t = (std::abs(nf.mu1 - nf.mu2) / nf.omega - 2.0) / 4.0;
  const double m = std::round(t);
  if (m < -0.5) return -1;
  if (std::abs(t - m) > tol) return -1;
  return int(m);
}

bool parity_structure_ok(const PhaseSpaceSymbol& T) {
  for (const auto& [grade, entries] : T.grades()) {
    const int want = (grade % 2 == 0) ? 1 : -1;
    for (const auto& e : entries) {
      if (e.empty()) continue;
      if (!e.is_polynomial() || e.has_h_phases()) return false;
      if (e.parity() != want) return false;
    }
  }
  return true;
}

WkbResult wkb_recurrence(const PhaseSpaceSymbol& T, int mode, int component,
                         int order) {
  if (T.dim() != 2)
    throw std::invalid_argument("wkb_recurrence: need a 2x2 symbol");
  const NormalFormData nf = extract_normal_form(T);
  const double omega = nf.omega;
  const double mu[2] = {nf.mu1, nf.mu2};

  WkbResult res;
  res.omega = omega;
  res.mode = mode;
  res.component = component;
  res.parity_clean = parity_structure_ok(T);

  const double lambda0 = (2.0 * mode + 1.0) * omega + mu[component];
  res.lambda.push_back(lambda0);

  GaussianAmplitude u0;
  u0.omega = omega;
  u0.comp[component] = hermite_amplitude(mode, omega);
  res.u.push_back(u0);

  for (int k = 1; k <= order; ++k) {
    // collect sum_{i>=1} T_i^w u_{k-i} - sum_{i=1}^{k-1} lambda_i u_{k-i}
    GaussianAmplitude raw;
    raw.omega = omega;
    for (int i = 1; i <= k; ++i) {
      if (T.has_grade(i))
        raw = amp_add(raw, apply_weyl_grade(T, i, res.u[k - i]));
      if (i < k && res.lambda[i] != 0.0)
        raw = amp_add(raw, amp_scale(res.u[k - i], -res.lambda[i]));
    }

    cplx lk = amplitude_inner(u0, raw);
    double scale = std::max(1.0, std::abs(lambda0));
    if (std::abs(std::imag(lk)) > 1e-10 * std::max(scale, std::abs(lk)))
      throw std::runtime_error(
          "wkb_recurrence: eigenvalue correction came out complex");
    double lambda_k = std::real(lk);
    if (res.parity_clean && k % 2 == 1) {
      // odd corrections vanish identically for parity-graded symbols
      if (std::abs(lambda_k) > 1e-12 * scale)
        throw std::runtime_error(
            "wkb_recurrence: odd correction failed to cancel");
      lambda_k = 0.0;
    }
    res.lambda.push_back(lambda_k);

    GaussianAmplitude rhs = amp_add(amp_scale(u0, lambda_k),
                                    amp_scale(raw, -1.0));
    double rhs_scale = 0.0;
    for (int c = 0; c < 2; ++c)
      for (const auto& co : rhs.comp[c])
        rhs_scale = std::max(rhs_scale, std::abs(co));

    GaussianAmplitude uk;
    uk.omega = omega;
    for (int c = 0; c < 2; ++c) {
      if (rhs.comp[c].empty()) continue;
      auto coef = hermite_coefficients(rhs.comp[c], omega);
      for (size_t m = 0; m < coef.size(); ++m) {
        const double den = (2.0 * m + 1.0) * omega + mu[c] - lambda0;
        if (std::abs(den) >= 1e-8 * omega) continue;
        if (c == component && int(m) == mode) continue;  // gauge slot
        if (std::abs(coef[m]) > 1e-9 * std::max(1.0, rhs_scale)) {
          std::ostringstream msg;
          msg << "wkb_recurrence: aligned ladder mode " << m
              << " in component " << c
              << " obstructs the correction at step " << k;
          throw ResonantObstruction(msg.str(), k);
        }
        coef[m] = 0.0;
      }
      uk.comp[c] = amplitude_from_hermite(
          solve_shifted(omega, mu[c], lambda0, coef), omega);
    }
    res.u.push_back(std::move(uk));
  }
  return res;
}

double wkb_eigenvalue(const WkbResult& r, double h) {
  double v = 0.0;
  for (size_t k = 0; k < r.lambda.size(); ++k)
    v += std::pow(h, 0.5 * k) * r.lambda[k];
  return v;
}

GaussianAmplitude wkb_amplitude(const WkbResult& r, double h) {
  GaussianAmplitude w;
  w.omega = r.omega;
  for (size_t k = 0; k < r.u.size(); ++k)
    w = amp_add(w, amp_scale(r.u[k], std::pow(h, 0.5 * k)));
  return w;
}

double wkb_residual(const PhaseSpaceSymbol& T, const WkbResult& r, double h) {
  GaussianAmplitude w = wkb_amplitude(r, h);
  GaussianAmplitude acc = amp_scale(w, -wkb_eigenvalue(r, h));
  for (const auto& [grade, entries] : T.grades()) {
    (void)entries;
    acc = amp_add(acc, amp_scale(apply_weyl_grade(T, grade, w),
                                 std::pow(h, 0.5 * grade)));
  }
  return amplitude_norm(acc);
}

ResidualScan residual_scan(const PhaseSpaceSymbol& T, const WkbResult& r,
                           const std::vector<double>& hs) {
  ResidualScan scan;
  scan.h = hs;
  for (double h : hs) scan.residual.push_back(wkb_residual(T, r, h));
  // least-squares slope in log-log coordinates
  const int n = int(hs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double lx = std::log(hs[i]);
    const double ly = std::log(std::max(scan.residual[i], 1e-300));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  scan.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return scan;
}

std::vector<double> galerkin_levels(const PhaseSpaceSymbol& T, double omega,
                                    int N, double h, int count) {
  Eigen::MatrixXcd M = galerkin_matrix(T, omega, N, h);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M);
  std::vector<double> out(es.eigenvalues().data(),
                          es.eigenvalues().data() +
                              std::min<int>(count, int(M.rows())));
  return out;
}

ResonantExpansion resonant_expansion(const PhaseSpaceSymbol& T, double omega,
                                     double e, const std::vector<double>& hs,
                                     int nterms, int N) {
  ResonantExpansion out;
  out.e = e;
  for (double h : hs) {
    Eigen::MatrixXcd M = galerkin_matrix(T, omega, N, h);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M);
    const auto& ev = es.eigenvalues();
    // two eigenvalues nearest the degenerate ladder value
    int i0 = -1, i1 = -1;
    double d0 = 1e300, d1 = 1e300;
    for (int i = 0; i < ev.size(); ++i) {
      const double d = std::abs(ev[i] - e);
      if (d < d0) {
        d1 = d0, i1 = i0;
        d0 = d, i0 = i;
      } else if (d < d1) {
        d1 = d, i1 = i;
      }
    }
    double lo = ev[i0], hi = ev[i1];
    int ilo = i0, ihi = i1;
    if (lo > hi) {
      std::swap(lo, hi);
      std::swap(ilo, ihi);
    }
    if (hi - lo < 1e-13 * std::max(1.0, std::abs(e))) {
      // order a numerically degenerate pair by internal-component weight
      auto comp_weight = [&](int idx) {
        double w = 0.0;
        for (int n2 = 0; 2 * n2 < M.rows(); ++n2)
          w += std::norm(es.eigenvectors()(2 * n2, idx));
        return w;
      };
      if (comp_weight(ilo) < comp_weight(ihi)) {
        std::swap(lo, hi);
      }
    }
    out.values[0].push_back(lo);
    out.values[1].push_back(hi);
  }

  const int npts = int(hs.size());
  Eigen::MatrixXd A(npts, nterms);
  for (int i = 0; i < npts; ++i)
    for (int t = 1; t <= nterms; ++t) A(i, t - 1) = std::pow(hs[i], 0.5 * t);
  double hmax = *std::max_element(hs.begin(), hs.end());
  for (int b = 0; b < 2; ++b) {
    Eigen::VectorXd y(npts);
    for (int i = 0; i < npts; ++i) y[i] = out.values[b][i] - e;
    Eigen::VectorXd c = A.colPivHouseholderQr().solve(y);
    out.coef[b].assign(c.data(), c.data() + nterms);
    const double resid = (A * c - y).cwiseAbs().maxCoeff();
    out.max_residual = std::max(out.max_residual, resid);
    double coef_scale = 1.0;
    for (int t = 0; t < nterms; ++t)
      coef_scale = std::max(coef_scale, std::abs(out.coef[b][t]));
    const double omitted = coef_scale * std::pow(hmax, 0.5 * (nterms + 1));
    if (resid > 10.0 * omitted + 1e-13)
      throw FitDiagnostics(
          "resonant_expansion: fit residual exceeds the first omitted order",
          resid, omitted);
  }
  return out;
}

PeriodizedMode periodize(const GaussianAmplitude& v, double h, double x0,
                         double xi0, int grid_n, double radius,
                         int K_override) {
  PeriodizedMode out;
  const double omega = v.omega;
  int K = K_override;
  if (K < 0)
    K = std::max(3, int(std::ceil(std::sqrt(140.0 * h / omega)))) + 2;
  const double rh = std::sqrt(h);
  out.x.resize(grid_n);
  out.values.assign(grid_n, {cplx(0.0), cplx(0.0)});
  double total = 0.0, outside = 0.0;
  for (int i = 0; i < grid_n; ++i) {
    const double x = double(i) / grid_n;
    out.x[i] = x;
    std::array<cplx, 2> val{cplx(0.0), cplx(0.0)};
    for (int k = -K; k <= K; ++k) {
      const double y = (x - x0 - k) / rh;
      const double gauss = std::exp(-0.5 * omega * y * y);
      if (gauss < 1e-300) continue;
      const cplx ph = std::polar(1.0, xi0 * (x - x0 - k) / h);
      for (int c = 0; c < 2; ++c) {
        if (v.comp[c].empty()) continue;
        val[c] += poly_eval(v.comp[c], y) * gauss * ph;
      }
    }
    for (int c = 0; c < 2; ++c) val[c] *= std::pow(h, -0.25);
    out.values[i] = val;
    const double w = std::norm(val[0]) + std::norm(val[1]);
    total += w;
    double d = std::abs(x - x0);
    d = std::min(d, 1.0 - d);
    if (d > radius) outside += w;
  }
  out.norm = std::sqrt(total / grid_n);
  out.mass_outside = total > 0.0 ? outside / total : 0.0;
  return out;
}

}  // namespace moirewell
