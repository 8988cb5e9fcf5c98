#include "moirewell/bohr.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "moirewell/common.hpp"

namespace moirewell {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Evaluated coefficient data of the series, cached as derivative symbols so
// each right-hand-side call is a handful of term evaluations.
struct FlowField {
  ScalarSymbol p0, p0x, p0xi, p0xx, p0xxi, p0xixi, p1, p2;

  explicit FlowField(const ScalarSymbolSeries& p)
      : p0(p.p0),
        p0x(p.p0.dx()),
        p0xi(p.p0.dxi()),
        p0xx(p0x.dx()),
        p0xxi(p0x.dxi()),
        p0xixi(p0xi.dxi()),
        p1(p.p1),
        p2(p.p2) {}

  static double re(const ScalarSymbol& s, double x, double xi) {
    return s.eval(x, xi, 0.0).real();
  }

  // State layout: x, xi, oint xi dx, oint p1 dt, curvature bracket, oint p2 dt.
  void operator()(const std::array<double, 6>& y,
                  std::array<double, 6>& dy) const {
    const double x = y[0];
    const double xi = y[1];
    const double xdot = re(p0xi, x, xi);
    const double xidot = -re(p0x, x, xi);
    const double p1v = re(p1, x, xi);
    dy[0] = xdot;
    dy[1] = xidot;
    dy[2] = xi * xdot;
    dy[3] = p1v;
    dy[4] = (re(p0xx, x, xi) * re(p0xixi, x, xi) -
             re(p0xxi, x, xi) * re(p0xxi, x, xi)) /
                12.0 -
            p1v * p1v;
    dy[5] = re(p2, x, xi);
  }
};

using State = std::array<double, 6>;

// Dormand-Prince 5(4) tableau.
constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187,
                 kA53 = 64448.0 / 6561, kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33,
                 kA63 = 46732.0 / 5247, kA64 = 49.0 / 176,
                 kA65 = -5103.0 / 18656;
constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192,
                 kB5 = -2187.0 / 6784, kB6 = 11.0 / 84;
constexpr double kE1 = 71.0 / 57600, kE3 = -71.0 / 16695, kE4 = 71.0 / 1920,
                 kE5 = -17253.0 / 339200, kE6 = 22.0 / 525, kE7 = -1.0 / 40;

template <typename Rhs>
void dp_stage(const Rhs& f, const State& y, double dt, State& out,
              double& err) {
  State k1, k2, k3, k4, k5, k6, k7, tmp;
  f(y, k1);
  for (int i = 0; i < 6; ++i) tmp[i] = y[i] + dt * kA21 * k1[i];
  f(tmp, k2);
  for (int i = 0; i < 6; ++i)
    tmp[i] = y[i] + dt * (kA31 * k1[i] + kA32 * k2[i]);
  f(tmp, k3);
  for (int i = 0; i < 6; ++i)
    tmp[i] = y[i] + dt * (kA41 * k1[i] + kA42 * k2[i] + kA43 * k3[i]);
  f(tmp, k4);
  for (int i = 0; i < 6; ++i)
    tmp[i] = y[i] + dt * (kA51 * k1[i] + kA52 * k2[i] + kA53 * k3[i] +
                          kA54 * k4[i]);
  f(tmp, k5);
  for (int i = 0; i < 6; ++i)
    tmp[i] = y[i] + dt * (kA61 * k1[i] + kA62 * k2[i] + kA63 * k3[i] +
                          kA64 * k4[i] + kA65 * k5[i]);
  f(tmp, k6);
  for (int i = 0; i < 6; ++i)
    out[i] = y[i] + dt * (kB1 * k1[i] + kB3 * k3[i] + kB4 * k4[i] +
                          kB5 * k5[i] + kB6 * k6[i]);
  f(out, k7);
  err = 0.0;
  for (int i = 0; i < 6; ++i) {
    const double e = dt * (kE1 * k1[i] + kE3 * k3[i] + kE4 * k4[i] +
                           kE5 * k5[i] + kE6 * k6[i] + kE7 * k7[i]);
    err = std::max(err, std::abs(e));
  }
}

// Locates the seed radius on the ray {(x0 + s, xi0) : s > 0} where the
// principal symbol reaches tau.
double seed_radius(const FlowField& f, double x0, double xi0, double tau) {
  const auto level = [&](double s) {
    return FlowField::re(f.p0, x0 + s, xi0) - tau;
  };
  if (!(tau > 0.0))
    throw NoClosedOrbit("orbit energy must be positive, got " +
                        std::to_string(tau));
  double lo = 0.0, hi = 1e-6;
  while (level(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 4.0)
      throw NoClosedOrbit(
          "no seed on the +x ray brackets energy " + std::to_string(tau) +
          "; the level set does not close around the well");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-16 * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (level(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

OrbitData trace_orbit(const ScalarSymbolSeries& p, double tau, double tol) {
  const FlowField f(p);
  const double s = seed_radius(f, p.x0, p.xi0, tau);

  State y{p.x0 + s, p.xi0, 0.0, 0.0, 0.0, 0.0};
  State d0;
  f(y, d0);
  const double speed0 = std::hypot(d0[0], d0[1]);
  if (speed0 < 1e-10)
    throw NoClosedOrbit("flow is stationary at the seed point; energy " +
                        std::to_string(tau) + " sits at a critical level");
  // Orientation in which the orbit leaves the section {xi = xi0}; the period
  // ends at the next crossing with the same orientation.
  const double down = d0[1] < 0.0 ? 1.0 : -1.0;

  OrbitData orbit;
  orbit.tau = tau;
  orbit.samples.push_back({y[0], y[1]});

  const double scale = std::max(1.0, std::abs(tau));
  double t = 0.0;
  double dt = 1e-3 / std::max(1.0, speed0);
  const double t_max = 1e4;
  bool landed = false;
  int crossings = 0;

  for (long step = 0; step < 2000000 && t < t_max; ++step) {
    State ynew;
    double err;
    dp_stage(f, y, dt, ynew, err);
    const double target = tol * scale;
    if (err > target) {
      dt *= std::max(0.2, 0.9 * std::pow(target / err, 0.2));
      if (!(dt > 1e-15))
        throw NoClosedOrbit("step size underflow at energy " +
                            std::to_string(tau));
      continue;
    }
    const double g_prev = down * (y[1] - p.xi0);
    const double g_next = down * (ynew[1] - p.xi0);
    if (t > 0.0 && g_prev > 0.0 && g_next <= 0.0) {
      // Henon's switch: integrate with xi as the independent variable for
      // the remaining distance, landing on the section exactly.
      State z = ynew;
      double tz = t + dt;
      for (int pass = 0; pass < 3 && z[1] != p.xi0; ++pass) {
        const double dxi = p.xi0 - z[1];
        const auto g = [&](const std::array<double, 7>& w,
                           std::array<double, 7>& dw) {
          State u{w[0], w[1], w[2], w[3], w[4], w[5]};
          State du;
          f(u, du);
          const double inv = 1.0 / du[1];
          for (int i = 0; i < 6; ++i) dw[i] = du[i] * inv;
          dw[6] = inv;
        };
        std::array<double, 7> w{z[0], z[1], z[2], z[3], z[4], z[5], tz};
        std::array<double, 7> k1, k2, k3, k4, tmp;
        g(w, k1);
        for (int i = 0; i < 7; ++i) tmp[i] = w[i] + 0.5 * dxi * k1[i];
        g(tmp, k2);
        for (int i = 0; i < 7; ++i) tmp[i] = w[i] + 0.5 * dxi * k2[i];
        g(tmp, k3);
        for (int i = 0; i < 7; ++i) tmp[i] = w[i] + dxi * k3[i];
        g(tmp, k4);
        for (int i = 0; i < 7; ++i)
          w[i] += dxi / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        w[1] = p.xi0;
        z = State{w[0], w[1], w[2], w[3], w[4], w[5]};
        tz = w[6];
      }
      ++crossings;
      if (std::abs(z[0] - (p.x0 + s)) <= 1e-8 * std::max(1.0, std::abs(s))) {
        y = z;
        t = tz;
        landed = true;
        break;
      }
      if (crossings >= 4)
        throw NoClosedOrbit(
            "section recurrences at energy " + std::to_string(tau) +
            " do not pass through the seed; orbit does not close");
    }
    y = ynew;
    t += dt;
    orbit.samples.push_back({y[0], y[1]});
    if (err > 0.0) dt *= std::min(5.0, 0.9 * std::pow(target / err, 0.2));
  }
  if (!landed)
    throw NoClosedOrbit("no return to the section within the time bound at "
                        "energy " +
                        std::to_string(tau));

  const double drift = std::abs(FlowField::re(f.p0, y[0], y[1]) - tau);
  if (drift > 1e-8 * scale)
    throw NoClosedOrbit("energy drifted by " + std::to_string(drift) +
                        " over one period at energy " + std::to_string(tau));

  orbit.samples.push_back({y[0], y[1]});
  orbit.period = t;
  orbit.area = y[2];
  orbit.subprincipal = y[3];
  orbit.curvature = y[4];
  orbit.secondary = y[5];
  return orbit;
}

FSeries F_series(const ScalarSymbolSeries& p, double tau) {
  const OrbitData mid = trace_orbit(p, tau);
  const double dtau = 0.05 * tau;
  const OrbitData lo = trace_orbit(p, tau - dtau);
  const OrbitData hi = trace_orbit(p, tau + dtau);
  FSeries out;
  out.F0 = mid.area / kTwoPi;
  out.F1 = 0.5 - mid.subprincipal / kTwoPi;
  out.F2 = -(hi.curvature - lo.curvature) / (2.0 * dtau) / (2.0 * kTwoPi) -
           mid.secondary / kTwoPi;
  return out;
}

FTable F_table(const ScalarSymbolSeries& p, double tau_lo, double tau_hi,
               int count) {
  if (!(tau_lo > 0.0) || !(tau_hi > tau_lo))
    throw ConfigError("energy grid needs 0 < tau_lo < tau_hi");
  if (count < 2) throw ConfigError("energy grid needs at least two points");
  FTable table;
  table.tau.reserve(count);
  const double ratio = std::log(tau_hi / tau_lo);
  for (int i = 0; i < count; ++i) {
    const double tau = tau_lo * std::exp(ratio * i / double(count - 1));
    const FSeries fs = F_series(p, tau);
    table.tau.push_back(tau);
    table.F0.push_back(fs.F0);
    table.F1.push_back(fs.F1);
    table.F2.push_back(fs.F2);
  }
  return table;
}

double invert_F(const FTable& table, int k, double h) {
  const size_t n = table.tau.size();
  if (n < 2 || table.F0.size() != n || table.F1.size() != n ||
      table.F2.size() != n)
    throw ConfigError("action table is empty or ragged");
  for (size_t i = 1; i < n; ++i)
    if (!(table.F0[i] > table.F0[i - 1]))
      throw ConfigError("leading action coefficient is not increasing at row " +
                        std::to_string(i));
  if (!(h > 0.0)) throw ConfigError("h must be positive");
  if (k < 1)
    throw OutOfRange("levels are counted from k = 1, got k = " +
                     std::to_string(k));

  const auto interp = [&](const std::vector<double>& col, double tau) {
    const auto it =
        std::upper_bound(table.tau.begin(), table.tau.end(), tau);
    size_t j = std::min(n - 2, size_t(std::max<ptrdiff_t>(
                                   0, it - table.tau.begin() - 1)));
    const double w = (tau - table.tau[j]) / (table.tau[j + 1] - table.tau[j]);
    return col[j] + w * (col[j + 1] - col[j]);
  };
  const auto total = [&](double tau) {
    return interp(table.F0, tau) + h * interp(table.F1, tau) +
           h * h * interp(table.F2, tau);
  };

  const double target = k * h;
  double lo = table.tau.front(), hi = table.tau.back();
  if (target < total(lo) || target > total(hi))
    throw OutOfRange("k h = " + std::to_string(target) +
                     " lies outside the tabulated action range [" +
                     std::to_string(total(lo)) + ", " +
                     std::to_string(total(hi)) + "]");
  for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (total(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double antichiral_level(double w0, double h, int j, int k) {
  if (j < 1 || j > 4)
    throw OutOfRange("branch index must lie in 1..4, got " +
                     std::to_string(j));
  if (k < 0)
    throw OutOfRange("ladder index must be nonnegative, got " +
                     std::to_string(k));
  if (!(w0 > 0.0)) throw ConfigError("w0 must be positive");
  const double kinetic = j <= 2 ? -3.0 : -1.0;
  const double potential = (j % 2 == 1 ? -3.0 : -1.0) * w0;
  const double spacing = 2.0 * kTwoPi * kTwoPi * std::sqrt(w0) * h;
  return kinetic + potential + spacing * (k + 0.5);
}

}  // namespace moirewell
