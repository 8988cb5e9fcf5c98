#include "moirewell/models.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numeric>
#include <stdexcept>

namespace moirewell {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

Eigen::Matrix2cd sigma1() {
  Eigen::Matrix2cd m;
  m << 0, 1, 1, 0;
  return m;
}

Eigen::Matrix2cd sigma2() {
  Eigen::Matrix2cd m;
  m << cplx(0, 0), cplx(0, -1), cplx(0, 1), cplx(0, 0);
  return m;
}

Eigen::Matrix4cd pair_diag(const Eigen::Matrix2cd& b) {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  m.block<2, 2>(0, 0) = b;
  m.block<2, 2>(2, 2) = b;
  return m;
}

// Scatter f(x, xi) * M into the given grade of S.
void add_block(PhaseSpaceSymbol& S, int grade, const Eigen::Matrix4cd& M,
               const ScalarSymbol& f) {
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const cplx c = M(i, j);
      if (std::abs(c) < 1e-15) continue;
      S.at(grade, i, j) = S.at(grade, i, j) + f * c;
    }
}

cplx snapped_unit_phase(double kperp) {
  cplx u(std::cos(kTwoPi * kperp), std::sin(kTwoPi * kperp));
  if (std::abs(u.real()) < 1e-12) u.real(0.0);
  if (std::abs(u.imag()) < 1e-12) u.imag(0.0);
  return u;
}

const cplx kUPlus(-0.5, -std::sqrt(3.0) / 2.0);   // e^{2 pi i x} weight in U_+
const cplx kUMinus(-0.5, std::sqrt(3.0) / 2.0);   // e^{2 pi i x} weight in U_-

}  // namespace

std::string model_name(ModelKind kind) {
  return kind == ModelKind::Harper ? "harper" : "lowenergy";
}

ModelKind model_from_name(const std::string& name) {
  if (name == "harper") return ModelKind::Harper;
  if (name == "lowenergy" || name == "low-energy") return ModelKind::LowEnergy;
  throw ConfigError("unknown model '" + name + "' (try harper or lowenergy)");
}

Eigen::Matrix4cd pauli1_pair() { return pair_diag(sigma1()); }
Eigen::Matrix4cd pauli2_pair() { return pair_diag(sigma2()); }

Eigen::Matrix4cd hop_matrix(double kperp) {
  return std::cos(kTwoPi * kperp) * pauli1_pair() +
         std::sin(kTwoPi * kperp) * pauli2_pair();
}

Eigen::Matrix4cd acoustic_pattern() {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  m(0, 2) = m(2, 0) = m(1, 3) = m(3, 1) = 1.0;
  return m;
}

Eigen::Matrix4cd chiral_minus_pattern() {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  m(0, 3) = m(3, 0) = 1.0;
  return m;
}

Eigen::Matrix4cd chiral_plus_pattern() {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  m(1, 2) = m(2, 1) = 1.0;
  return m;
}

ScalarSymbol acoustic_profile() {
  return ScalarSymbol(1.0) + ScalarSymbol::cos_x() * 2.0;
}

ScalarSymbol chiral_profile(int sign) {
  return ScalarSymbol(1.0) - ScalarSymbol::cos_x() +
         ScalarSymbol::sin_x() * (sign > 0 ? std::sqrt(3.0) : -std::sqrt(3.0));
}

Eigen::Matrix4cd potential_matrix(double x, const ModelParams& params) {
  const double uac = 1.0 + 2.0 * std::cos(kTwoPi * x);
  const double um = 1.0 - std::cos(kTwoPi * x) - std::sqrt(3.0) * std::sin(kTwoPi * x);
  const double up = 1.0 - std::cos(kTwoPi * x) + std::sqrt(3.0) * std::sin(kTwoPi * x);
  return params.w0 * uac * acoustic_pattern() +
         params.w1 * (um * chiral_minus_pattern() + up * chiral_plus_pattern());
}

PhaseSpaceSymbol harper_symbol(const ModelParams& params) {
  PhaseSpaceSymbol S(4);
  add_block(S, 0, hop_matrix(params.kperp), ScalarSymbol::cos_xi() * 2.0);
  add_block(S, 0, pauli1_pair(), ScalarSymbol(1.0));
  add_block(S, 0, acoustic_pattern(), acoustic_profile() * params.w0);
  add_block(S, 0, chiral_minus_pattern(), chiral_profile(-1) * params.w1);
  add_block(S, 0, chiral_plus_pattern(), chiral_profile(+1) * params.w1);
  S.drop_empty_grades();
  S.set_self_adjoint(true);
  return S;
}

PhaseSpaceSymbol lowenergy_symbol(const ModelParams& params, double kappa) {
  PhaseSpaceSymbol S(4);
  const ScalarSymbol dm = ScalarSymbol::monomial(0, 1) +
                          ScalarSymbol(cplx(0.0, -params.kperp));
  const ScalarSymbol dp = ScalarSymbol::monomial(0, 1) +
                          ScalarSymbol(cplx(0.0, params.kperp));
  const ScalarSymbol uac = acoustic_profile() * params.w0;
  const ScalarSymbol um = chiral_profile(-1) * params.w1;
  const ScalarSymbol up = chiral_profile(+1) * params.w1;

  S.at(0, 0, 1) = dm;
  S.at(0, 1, 0) = dp;
  S.at(0, 2, 3) = dm;
  S.at(0, 3, 2) = dp;
  S.at(0, 0, 2) = uac;
  S.at(0, 2, 0) = uac;
  S.at(0, 1, 3) = uac;
  S.at(0, 3, 1) = uac;
  S.at(0, 0, 3) = um;
  S.at(0, 3, 0) = um;
  S.at(0, 1, 2) = up;
  S.at(0, 2, 1) = up;
  if (kappa != 0.0) {
    const ScalarSymbol k(cplx(kappa, 0.0));
    S.at(2, 0, 1) = k;
    S.at(2, 1, 0) = k;
    S.at(2, 2, 3) = k;
    S.at(2, 3, 2) = k;
  }
  S.drop_empty_grades();
  S.set_self_adjoint(true);
  return S;
}

PhaseSpaceSymbol chiral_offdiag(ModelKind kind, const ModelParams& params,
                                double kappa) {
  if (std::abs(params.w0) > 1e-12)
    throw std::invalid_argument("chiral_offdiag: branch requires w0 = 0");
  const ScalarSymbol fplain =
      (ScalarSymbol(1.0) - ScalarSymbol::cos_x()) * params.w1;
  const ScalarSymbol g =
      ScalarSymbol::sin_x() * (std::sqrt(3.0) * params.w1);
  ScalarSymbol K;
  if (kind == ModelKind::Harper) {
    const cplx u = snapped_unit_phase(params.kperp);
    K = ScalarSymbol(1.0) +
        (ScalarSymbol::phase(0, 1) + ScalarSymbol::phase(0, -1)) * u;
  } else {
    K = ScalarSymbol::monomial(0, 1) + ScalarSymbol(cplx(0.0, params.kperp));
  }
  PhaseSpaceSymbol D(2);
  D.at(0, 0, 0) = K + g * cplx(0, 1);
  D.at(0, 0, 1) = fplain * cplx(0, 1);
  D.at(0, 1, 0) = fplain * cplx(0, -1);
  D.at(0, 1, 1) = K - g * cplx(0, 1);
  if (kind == ModelKind::LowEnergy && kappa != 0.0) {
    D.at(2, 0, 0) = ScalarSymbol(cplx(kappa, 0.0));
    D.at(2, 1, 1) = ScalarSymbol(cplx(kappa, 0.0));
  }
  D.drop_empty_grades();
  return D;
}

PhaseSpaceSymbol chiral_squared(ModelKind kind, const ModelParams& params,
                                double kappa, int max_half_order) {
  const PhaseSpaceSymbol D = chiral_offdiag(kind, params, kappa);
  const PhaseSpaceSymbol Dstar = D.adjoint();
  const PhaseSpaceSymbol A = moyal_product(D, Dstar, max_half_order);
  const PhaseSpaceSymbol B = moyal_product(Dstar, D, max_half_order);
  PhaseSpaceSymbol S(4);
  for (const auto& [g, entries] : A.grades())
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        S.at(g, i, j) = entries[size_t(i) * 2 + j];
  for (const auto& [g, entries] : B.grades())
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        S.at(g, 2 + i, 2 + j) = entries[size_t(i) * 2 + j];
  S.drop_empty_grades();
  S.set_self_adjoint(true);
  return S;
}

PhaseSpaceSymbol antichiral_diag(ModelKind kind, const ModelParams& params,
                                 double kappa) {
  if (std::abs(params.w1) > 1e-12)
    throw std::invalid_argument("antichiral_diag: branch requires w1 = 0");
  const int sk[4] = {-1, -1, +1, +1};
  const int sp[4] = {-1, +1, -1, +1};
  PhaseSpaceSymbol S(4);
  const ScalarSymbol uac = acoustic_profile() * params.w0;
  if (kind == ModelKind::Harper) {
    if (std::abs(std::sin(kTwoPi * params.kperp)) > 1e-9)
      throw std::invalid_argument(
          "antichiral_diag: lattice branch requires kperp in (1/2)Z");
    const double sigma = std::round(std::cos(kTwoPi * params.kperp));
    const ScalarSymbol kin =
        ScalarSymbol(1.0) + ScalarSymbol::cos_xi() * (2.0 * sigma);
    for (int j = 0; j < 4; ++j)
      S.at(0, j, j) = kin * double(sk[j]) + uac * double(sp[j]);
  } else {
    if (std::abs(params.kperp) > 1e-12)
      throw std::invalid_argument(
          "antichiral_diag: continuum branch requires kperp = 0");
    for (int j = 0; j < 4; ++j) {
      S.at(0, j, j) = ScalarSymbol::monomial(0, 1) * double(sk[j]) +
                      uac * double(sp[j]);
      if (kappa != 0.0)
        S.at(2, j, j) = ScalarSymbol(cplx(kappa * sk[j], 0.0));
    }
  }
  S.drop_empty_grades();
  S.set_self_adjoint(true);
  return S;
}

std::vector<AntiChiralWell> antichiral_wells(ModelKind kind,
                                             const ModelParams& params) {
  std::vector<AntiChiralWell> wells;
  if (kind != ModelKind::Harper) return wells;
  if (std::abs(params.w1) > 1e-12)
    throw std::invalid_argument("antichiral_wells: branch requires w1 = 0");
  if (std::abs(std::sin(kTwoPi * params.kperp)) > 1e-9)
    throw std::invalid_argument(
        "antichiral_wells: lattice branch requires kperp in (1/2)Z");
  if (params.w0 <= 1e-12) return wells;  // flat in x, no isolated minima
  const double sigma = std::round(std::cos(kTwoPi * params.kperp));
  const int sk[4] = {-1, -1, +1, +1};
  const int sp[4] = {-1, +1, -1, +1};
  for (int j = 0; j < 4; ++j) {
    AntiChiralWell w;
    w.branch = j;
    w.xi0 = (sk[j] * sigma > 0) ? 0.5 : 0.0;
    w.x0 = (sp[j] > 0) ? 0.5 : 0.0;
    w.bottom = (sk[j] - 2.0) + ((sp[j] > 0) ? -params.w0 : -3.0 * params.w0);
    w.slope = 8.0 * M_PI * M_PI * std::sqrt(params.w0);
    wells.push_back(w);
  }
  return wells;
}

PhaseSpaceSymbol sub_block(const PhaseSpaceSymbol& S, int offset, int size) {
  if (offset < 0 || offset + size > S.dim())
    throw std::invalid_argument("sub_block: range out of bounds");
  PhaseSpaceSymbol out(size);
  for (const auto& [g, entries] : S.grades())
    for (int i = 0; i < size; ++i)
      for (int j = 0; j < size; ++j)
        out.at(g, i, j) = entries[size_t(offset + i) * S.dim() + (offset + j)];
  out.drop_empty_grades();
  out.set_self_adjoint(S.self_adjoint());
  return out;
}

// ---------------------------------------------------------------------------
// Zero-set survey
// ---------------------------------------------------------------------------

namespace {

struct DetField {
  ScalarSymbol F, Fx, Fxi, Fxx, Fxxi, Fxixi;
  cplx operator()(double x, double xi) const { return F.eval(x, xi, 0.0); }
};

DetField make_det_field(const PhaseSpaceSymbol& D) {
  DetField d;
  d.F = D.at(0, 0, 0) * D.at(0, 1, 1) - D.at(0, 0, 1) * D.at(0, 1, 0);
  d.Fx = d.F.dx();
  d.Fxi = d.F.dxi();
  d.Fxx = d.Fx.dx();
  d.Fxxi = d.Fx.dxi();
  d.Fxixi = d.Fxi.dxi();
  return d;
}

double wrap_unit(double v) {
  v = std::fmod(v, 1.0);
  if (v < 0) v += 1.0;
  if (v > 1.0 - 1e-9) v = 0.0;
  if (std::abs(v) < 1e-9) v = 0.0;
  return v;
}

double circle_dist(double a, double b) {
  double d = std::fmod(std::abs(a - b), 1.0);
  return std::min(d, 1.0 - d);
}

// Eigenvalue gap and trace of D D* evaluated at the principal grade.
struct GapTrace {
  double gap = 0.0;
  double trace = 0.0;
};
GapTrace branch_gap(const PhaseSpaceSymbol& D, double x, double xi) {
  const Eigen::MatrixXcd M = eval_grade(D, 0, x, xi);
  const Eigen::Matrix2cd P = (M * M.adjoint()).topLeftCorner<2, 2>();
  const double tr = std::real(P(0, 0) + P(1, 1));
  const double dt = std::real(P(0, 0) * P(1, 1) - P(0, 1) * P(1, 0));
  return {std::sqrt(std::max(0.0, tr * tr - 4.0 * dt)), tr};
}

// Damped Newton minimization of |F|^2.
bool minimize_abs2(const DetField& d, double& x, double& xi) {
  auto val = [&](double a, double b) { return std::norm(d(a, b)); };
  double lam = 1e-12;
  for (int iter = 0; iter < 100; ++iter) {
    const cplx F = d(x, xi);
    const cplx Fa = d.Fx.eval(x, xi, 0.0), Fb = d.Fxi.eval(x, xi, 0.0);
    const cplx Faa = d.Fxx.eval(x, xi, 0.0), Fab = d.Fxxi.eval(x, xi, 0.0),
               Fbb = d.Fxixi.eval(x, xi, 0.0);
    const double g0 = 2.0 * std::real(std::conj(F) * Fa);
    const double g1 = 2.0 * std::real(std::conj(F) * Fb);
    if (std::hypot(g0, g1) < 1e-30) return true;
    double h00 = 2.0 * std::real(std::conj(Fa) * Fa + std::conj(F) * Faa);
    double h01 = 2.0 * std::real(std::conj(Fa) * Fb + std::conj(F) * Fab);
    double h11 = 2.0 * std::real(std::conj(Fb) * Fb + std::conj(F) * Fbb);
    const double hs = std::max({std::abs(h00), std::abs(h11), 1.0});
    bool stepped = false;
    for (int tries = 0; tries < 12; ++tries) {
      const double a = h00 + lam * hs, c = h11 + lam * hs, b = h01;
      const double det = a * c - b * b;
      if (std::abs(det) < 1e-300) {
        lam *= 10.0;
        continue;
      }
      const double dxs = (-g0 * c + g1 * b) / det;
      const double dxis = (-g1 * a + g0 * b) / det;
      if (val(x + dxs, xi + dxis) < val(x, xi)) {
        x += dxs;
        xi += dxis;
        lam = std::max(lam / 4.0, 1e-14);
        stepped = true;
        if (std::hypot(dxs, dxis) < 1e-12) return true;
        break;
      }
      lam *= 10.0;
    }
    if (!stepped) return true;  // stalled at the bottom
  }
  return true;
}

// Newton on the gradient of Re F; valid when the determinant is real.
void polish_real_min(const DetField& d, double& x, double& xi) {
  for (int iter = 0; iter < 12; ++iter) {
    const double g0 = std::real(d.Fx.eval(x, xi, 0.0));
    const double g1 = std::real(d.Fxi.eval(x, xi, 0.0));
    const double a = std::real(d.Fxx.eval(x, xi, 0.0));
    const double b = std::real(d.Fxxi.eval(x, xi, 0.0));
    const double c = std::real(d.Fxixi.eval(x, xi, 0.0));
    const double det = a * c - b * b;
    if (std::abs(det) < 1e-12) return;
    const double sx = (-g0 * c + g1 * b) / det;
    const double sxi = (-g1 * a + g0 * b) / det;
    if (std::hypot(sx, sxi) > 1e-2) return;  // diverging, keep current point
    x += sx;
    xi += sxi;
    if (std::hypot(sx, sxi) < 1e-15) return;
  }
}

struct ProbeSummary {
  int flagged = 0;
  int clusters = 0;
  int longest_run = 0;
};

// Flag the directions along which the two branches of D D* come together.
// The threshold is relative to the largest gap seen on the circle, so the
// pattern does not depend on the overall coupling scale; branches that
// coincide along every direction are detected against the trace instead.
ProbeSummary probe_circle(const PhaseSpaceSymbol& D, double x, double xi) {
  constexpr int kAngles = 64;
  constexpr double kRadius = 1e-3;
  std::array<double, kAngles> gap{};
  double gmax = 0.0, tmax = 0.0;
  for (int k = 0; k < kAngles; ++k) {
    const double th = kTwoPi * k / kAngles;
    const GapTrace gt =
        branch_gap(D, x + kRadius * std::cos(th), xi + kRadius * std::sin(th));
    gap[size_t(k)] = gt.gap;
    gmax = std::max(gmax, gt.gap);
    tmax = std::max(tmax, gt.trace);
  }
  ProbeSummary s;
  if (gmax <= 1e-10 * std::max(tmax, 1e-300)) {
    s.flagged = kAngles;
    return s;
  }
  std::array<bool, kAngles> near{};
  for (int k = 0; k < kAngles; ++k) {
    near[size_t(k)] = gap[size_t(k)] < 1e-4 * gmax;
    if (near[size_t(k)]) ++s.flagged;
  }
  if (s.flagged == 0 || s.flagged == kAngles) return s;
  // circular run-length structure, starting the scan at an unflagged angle
  int start = 0;
  while (near[size_t(start)]) ++start;
  int run = 0;
  for (int k = start + 1; k <= start + kAngles; ++k) {
    if (near[size_t(k % kAngles)]) {
      if (run == 0) ++s.clusters;
      ++run;
      s.longest_run = std::max(s.longest_run, run);
    } else {
      run = 0;
    }
  }
  return s;
}

}  // namespace

PhaseSpaceSymbol well_normal_form(ModelKind kind, const ModelParams& params,
                                  const WellReport& well, int kmax,
                                  int block) {
  const PhaseSpaceSymbol sq =
      chiral_squared(kind, params, 0.0, std::max(8, kmax + 2));
  const PhaseSpaceSymbol expanded = expand_h_phases(sq, kmax + 2);
  const PhaseSpaceSymbol blk = sub_block(expanded, 2 * block, 2);
  WellCandidate cand;
  cand.x0 = well.x0;
  cand.xi0 = well.xi0;
  PhaseSpaceSymbol T = rescale_to_well(blk, cand, kmax, 1e-7);
  double s = 0.0;
  for (const auto& t : T.at(0, 0, 0).terms())
    if (t.a == 0 && t.b == 2) s = std::real(t.coeff);
  if (s <= 0.0)
    throw std::invalid_argument("well_normal_form: no confining quadratic");
  return T * cplx(1.0 / s, 0.0);
}

ZeroSetSurvey survey_zero_set(ModelKind kind, const ModelParams& params,
                              int grid) {
  if (std::abs(params.w0) > 1e-12)
    throw std::invalid_argument("survey_zero_set: chiral branch requires w0 = 0");
  if (params.w1 <= 1e-12)
    throw std::invalid_argument("survey_zero_set: needs w1 > 0");
  const PhaseSpaceSymbol D = chiral_offdiag(kind, params, 0.0);
  const DetField det = make_det_field(D);

  const bool xi_periodic = (kind == ModelKind::Harper);
  const double xi_lo = xi_periodic ? 0.0 : -(2.0 * params.w1 + 0.5);
  const double xi_hi = xi_periodic ? 1.0 : (2.0 * params.w1 + 0.5);
  const int nx = grid;
  const int ny = grid;
  const int ny_pts = xi_periodic ? ny : ny + 1;
  const double dx = 1.0 / nx;
  const double dxi = (xi_hi - xi_lo) / ny;

  std::vector<cplx> field(size_t(nx) * ny_pts);
  double scale = 0.0, max_im = 0.0;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny_pts; ++j) {
      const cplx v = det(i * dx, xi_lo + j * dxi);
      field[size_t(i) * ny_pts + j] = v;
      scale = std::max(scale, std::abs(v));
      max_im = std::max(max_im, std::abs(v.imag()));
    }
  const bool real_det = max_im <= 1e-9 * scale;

  auto at = [&](int i, int j) -> cplx {
    i = ((i % nx) + nx) % nx;
    if (xi_periodic) j = ((j % ny) + ny) % ny;
    return field[size_t(i) * ny_pts + j];
  };

  ZeroSetSurvey out;

  // --- curves: marching squares on Re F, rejected where Im F is large ---
  // Crossing points are identified by the grid edge they sit on, so the
  // connectivity between neighboring cells is exact.
  auto hkey = [&](int i, int j) {
    i = ((i % nx) + nx) % nx;
    if (xi_periodic) j = ((j % ny) + ny) % ny;
    return long(i) * (ny_pts + 1) + j;
  };
  auto vkey = [&](int i, int j) {
    i = ((i % nx) + nx) % nx;
    return long(nx) * (ny_pts + 1) + long(i) * (ny_pts + 1) + j;
  };
  std::map<long, std::array<double, 2>> edge_point;
  auto crossing = [&](bool horizontal, int i, int j, long& key) {
    const cplx v0 = at(i, j);
    const cplx v1 = horizontal ? at(i + 1, j) : at(i, j + 1);
    if ((v0.real() < 0) == (v1.real() < 0)) return false;
    key = horizontal ? hkey(i, j) : vkey(i, j);
    if (!edge_point.count(key)) {
      const double t = v0.real() / (v0.real() - v1.real());
      const double x0 = i * dx, y0 = xi_lo + j * dxi;
      edge_point[key] = horizontal
                            ? std::array<double, 2>{x0 + t * dx, y0}
                            : std::array<double, 2>{x0, y0 + t * dxi};
    }
    return true;
  };
  std::vector<std::pair<long, long>> segs;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      const cplx c00 = at(i, j), c10 = at(i + 1, j), c11 = at(i + 1, j + 1),
                 c01 = at(i, j + 1);
      const double imax = std::max({std::abs(c00.imag()), std::abs(c10.imag()),
                                    std::abs(c11.imag()), std::abs(c01.imag())});
      if (imax > 1e-6 * scale) continue;
      long keys[4];
      int found = 0;
      long k;
      if (crossing(true, i, j, k)) keys[found++] = k;          // bottom
      if (crossing(false, i + 1, j, k)) keys[found++] = k;     // right
      if (crossing(true, i, j + 1, k)) keys[found++] = k;      // top
      if (crossing(false, i, j, k)) keys[found++] = k;         // left
      if (found == 2) {
        segs.emplace_back(keys[0], keys[1]);
      } else if (found == 4) {
        segs.emplace_back(keys[0], keys[1]);
        segs.emplace_back(keys[2], keys[3]);
      }
    }

  std::map<long, std::vector<size_t>> touch;
  for (size_t s = 0; s < segs.size(); ++s) {
    touch[segs[s].first].push_back(s);
    touch[segs[s].second].push_back(s);
  }
  std::vector<bool> used(segs.size(), false);
  // seed open curves at their tips first so each one is walked end to end
  std::vector<size_t> order;
  for (size_t s = 0; s < segs.size(); ++s)
    if (touch[segs[s].first].size() == 1 || touch[segs[s].second].size() == 1)
      order.push_back(s);
  for (size_t s = 0; s < segs.size(); ++s) order.push_back(s);
  for (size_t s0 : order) {
    if (used[s0]) continue;
    std::vector<long> line{segs[s0].first, segs[s0].second};
    used[s0] = true;
    for (int dir = 0; dir < 2; ++dir) {
      bool grew = true;
      while (grew) {
        grew = false;
        const long tip = dir == 0 ? line.back() : line.front();
        for (size_t s : touch[tip]) {
          if (used[s]) continue;
          const long next = segs[s].first == tip ? segs[s].second
                                                 : segs[s].first;
          if (dir == 0)
            line.push_back(next);
          else
            line.insert(line.begin(), next);
          used[s] = true;
          grew = true;
          break;
        }
      }
    }
    std::vector<std::array<double, 2>> pts;
    pts.reserve(line.size());
    for (long key : line) pts.push_back(edge_point.at(key));
    out.curves.push_back(std::move(pts));
  }
  std::sort(out.curves.begin(), out.curves.end(),
            [](const auto& a, const auto& b) { return a.size() > b.size(); });

  // --- isolated zeros: refine local minima of |F|^2 ---
  std::vector<std::array<double, 2>> candidates;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny_pts; ++j) {
      const double v = std::abs(at(i, j));
      if (v > 0.01 * scale) continue;
      bool is_min = true;
      for (int di = -1; di <= 1 && is_min; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          if (!xi_periodic && (j + dj < 0 || j + dj >= ny_pts)) continue;
          if (std::abs(at(i + di, j + dj)) < v) {
            is_min = false;
            break;
          }
        }
      if (is_min) candidates.push_back({i * dx, xi_lo + j * dxi});
    }

  std::vector<std::array<double, 2>> zeros;
  for (auto cand : candidates) {
    double x = cand[0], xi = cand[1];
    minimize_abs2(det, x, xi);
    if (std::abs(det(x, xi)) > 1e-7 * scale) continue;
    if (real_det) polish_real_min(det, x, xi);
    x = wrap_unit(x);
    if (xi_periodic)
      xi = wrap_unit(xi);
    else if (std::abs(xi) < 1e-12)
      xi = 0.0;
    bool dup = false;
    for (const auto& z : zeros) {
      const double dxx = circle_dist(x, z[0]);
      const double dxxi =
          xi_periodic ? circle_dist(xi, z[1]) : std::abs(xi - z[1]);
      if (std::hypot(dxx, dxxi) < 1e-6) {
        dup = true;
        break;
      }
    }
    if (dup) continue;
    // points on a traced curve are not isolated zeros
    bool on_curve = false;
    for (const auto& line : out.curves) {
      for (const auto& p : line) {
        const double dxx = circle_dist(x, p[0]);
        const double dxxi =
            xi_periodic ? circle_dist(xi, p[1]) : std::abs(xi - p[1]);
        if (std::hypot(dxx, dxxi) < 2.5 * std::max(dx, dxi)) {
          on_curve = true;
          break;
        }
      }
      if (on_curve) break;
    }
    if (on_curve) continue;
    zeros.push_back({x, xi});
  }
  std::sort(zeros.begin(), zeros.end());

  for (const auto& z : zeros) {
    const ProbeSummary probe = probe_circle(D, z[0], z[1]);
    if (probe.flagged == 0) {
      out.isolated_zeros.push_back(z);
      continue;
    }
    if (probe.flagged < 64 && (probe.longest_run > 5 || probe.clusters > 4))
      throw ClassificationAmbiguous(
          "survey_zero_set: branch-touching pattern on the probe circle is "
          "neither isolated directions nor the full circle");
    WellReport w;
    w.model = kind;
    w.x0 = z[0];
    w.xi0 = z[1];
    w.double_degenerate = (probe.flagged == 64);
    const PhaseSpaceSymbol sq = chiral_squared(kind, params, 0.0, 4);
    const PhaseSpaceSymbol expanded = expand_h_phases(sq, 2);
    const PhaseSpaceSymbol blk = sub_block(expanded, 2, 2);
    WellCandidate cand;
    cand.x0 = w.x0;
    cand.xi0 = w.xi0;
    const PhaseSpaceSymbol T = rescale_to_well(blk, cand, 0, 1e-7);
    double s = 0.0;
    for (const auto& t : T.at(0, 0, 0).terms())
      if (t.a == 0 && t.b == 2) s = std::real(t.coeff);
    if (s <= 0.0)
      throw ClassificationAmbiguous(
          "survey_zero_set: zero without a confining quadratic form");
    const NormalFormData nf =
        extract_normal_form(T * cplx(1.0 / s, 0.0), 1e-6);
    w.scale = s;
    w.omega = nf.omega;
    w.mu1 = nf.mu1;
    w.mu2 = nf.mu2;
    w.c = nf.mu2 / nf.omega;
    out.wells.push_back(w);
  }
  return out;
}

std::vector<WellReport> find_wells(ModelKind kind, const ModelParams& params,
                                   int grid) {
  return survey_zero_set(kind, params, grid).wells;
}

std::vector<std::vector<std::array<double, 2>>> trace_zero_set(
    ModelKind kind, const ModelParams& params, int grid) {
  return survey_zero_set(kind, params, grid).curves;
}

// ---------------------------------------------------------------------------
// Commensurable unfolding
// ---------------------------------------------------------------------------

UnfoldedFamily::UnfoldedFamily(int p, int q, const ModelParams& params)
    : p_(p), q_(q), params_(params) {
  if (q < 1 || p < 0)
    throw std::invalid_argument("UnfoldedFamily: need q >= 1 and p >= 0");
  if (std::gcd(p, q) != 1)
    throw std::invalid_argument("UnfoldedFamily: p/q must be in lowest terms");
}

Eigen::MatrixXcd UnfoldedFamily::assemble(double alpha_prime, int cells) const {
  if (cells < 1)
    throw std::invalid_argument("UnfoldedFamily::assemble: need cells >= 1");
  const int nm = 2 * cells;
  const int dim = 4 * q_ * nm;
  const Eigen::Matrix4cd T = hop_matrix(params_.kperp);
  const Eigen::Matrix4cd T0 = pauli1_pair();
  const Eigen::Matrix4cd V0 =
      params_.w0 * acoustic_pattern() +
      params_.w1 * (chiral_minus_pattern() + chiral_plus_pattern());
  const Eigen::Matrix4cd V1 =
      params_.w0 * acoustic_pattern() +
      params_.w1 * (kUMinus * chiral_minus_pattern() +
                    kUPlus * chiral_plus_pattern());

  auto idx = [&](int a, int j, int im) { return (a * q_ + j) * nm + im; };
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(dim, dim);
  for (int j = 0; j < q_; ++j) {
    const double frac = double((long(j) * p_) % q_) / q_;
    for (int im = 0; im < nm; ++im) {
      const long n = long(q_) * (im - cells) + j;
      const double theta = kTwoPi * frac + kTwoPi * alpha_prime * double(n);
      const Eigen::Matrix4cd onsite = 2.0 * std::cos(theta) * T + T0 + V0;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          H(idx(a, j, im), idx(b, j, im)) += onsite(a, b);
      // raising hop: mode n -> n + 1
      int tj = j + 1, tim = im;
      if (tj == q_) {
        tj = 0;
        ++tim;
      }
      if (tim >= nm) continue;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          H(idx(a, tj, tim), idx(b, j, im)) += V1(a, b);
          H(idx(b, j, im), idx(a, tj, tim)) += std::conj(V1(a, b));
        }
    }
  }
  return H;
}

Eigen::MatrixXcd UnfoldedFamily::twist() const {
  Eigen::MatrixXcd J = Eigen::MatrixXcd::Zero(q_, q_);
  for (int l = 0; l < q_; ++l) {
    const double th = kTwoPi * double((long(l) * p_) % q_) / q_;
    J(l, l) = cplx(std::cos(th), std::sin(th));
  }
  return J;
}

Eigen::MatrixXcd UnfoldedFamily::shift() const {
  Eigen::MatrixXcd K = Eigen::MatrixXcd::Zero(q_, q_);
  for (int l = 0; l < q_; ++l) K((l + 1) % q_, l) = 1.0;
  return K;
}

Eigen::MatrixXcd UnfoldedFamily::block_acoustic(double xi) const {
  const cplx e(std::cos(kTwoPi * xi), std::sin(kTwoPi * xi));
  const Eigen::MatrixXcd K = shift();
  return Eigen::MatrixXcd::Identity(q_, q_) + e * K + std::conj(e) * K.adjoint();
}

Eigen::MatrixXcd UnfoldedFamily::block_chiral(double xi, int sign) const {
  const cplx u = sign > 0 ? kUPlus : kUMinus;
  const cplx e(std::cos(kTwoPi * xi), std::sin(kTwoPi * xi));
  const Eigen::MatrixXcd K = shift();
  return Eigen::MatrixXcd::Identity(q_, q_) + u * e * K +
         std::conj(u * e) * K.adjoint();
}

Eigen::MatrixXcd mode_window(const ModelParams& params, double alpha,
                             int half_width) {
  return UnfoldedFamily(0, 1, params).assemble(alpha, half_width);
}

}  // namespace moirewell
