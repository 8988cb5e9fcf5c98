#include "moirewell/spectra.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "moirewell/common.hpp"

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

// Present when the process is linked against OpenBLAS; absent (null) with a
// reference BLAS, in which case thread pinning is a no-op.
extern "C" void openblas_set_num_threads(int) __attribute__((weak));

namespace moirewell {

namespace {

constexpr double kPi = 3.14159265358979323846;
const cplx kI{0.0, 1.0};

std::string dim_tag(const Eigen::MatrixXcd& M) {
  std::ostringstream os;
  os << M.rows() << "x" << M.cols();
  return os.str();
}

// Core zheevd driver on a symmetrized copy.  jobz: 'N' values, 'V' vectors.
Eigen::VectorXd solve_hermitian(const Eigen::MatrixXcd& M, char jobz,
                                Eigen::MatrixXcd* vectors) {
  if (M.rows() != M.cols())
    throw std::invalid_argument("hermitian_eigensolve: matrix must be square, got " + dim_tag(M));
  const int n = static_cast<int>(M.rows());
  Eigen::VectorXd w(n);
  if (n == 0) return w;

  const double scale = M.cwiseAbs().maxCoeff();
  const double skew = (M - M.adjoint()).cwiseAbs().maxCoeff();
  if (skew > 1e-10 * std::max(1.0, scale))
    throw std::invalid_argument(
        "hermitian_eigensolve: input " + dim_tag(M) +
        " is not Hermitian (max deviation " + std::to_string(skew) + ")");

  Eigen::MatrixXcd A = 0.5 * (M + M.adjoint());
  const lapack_int info = LAPACKE_zheevd(
      LAPACK_COL_MAJOR, jobz, 'L', n, A.data(), n, w.data());
  if (info != 0)
    throw std::runtime_error("hermitian_eigensolve: zheevd failed on a " +
                             dim_tag(M) + " matrix (info=" +
                             std::to_string(info) + ")");

  if (jobz == 'V' && vectors != nullptr) {
    *vectors = A;
    const double norm = std::max(std::abs(w(0)), std::abs(w(n - 1)));
    const double tol = 1e-9 * norm + 1e-14;
    const Eigen::MatrixXcd R = M * A - A * w.asDiagonal();
    for (int i = 0; i < n; ++i) {
      const double res = R.col(i).norm();
      if (res > tol)
        throw std::runtime_error(
            "hermitian_eigensolve: eigenpair " + std::to_string(i) +
            " of a " + dim_tag(M) + " matrix has residual " +
            std::to_string(res) + " (tolerance " + std::to_string(tol) + ")");
    }
  }
  return w;
}

double wrap_half(double d) {
  // Nearest-image distance on a unit period, in [-1/2, 1/2].
  return std::remainder(d, 1.0);
}

// Classic compactly supported mollifier profile, peak value 1 at t=0.
double bump(double t) {
  const double t2 = t * t;
  if (t2 >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - t2));
}

}  // namespace

void set_blas_threads(int n) {
  if (&openblas_set_num_threads != nullptr) openblas_set_num_threads(n);
}

Eigen::VectorXd hermitian_eigensolve(const Eigen::MatrixXcd& M) {
  return solve_hermitian(M, 'N', nullptr);
}

Eigen::VectorXd hermitian_eigensolve(const Eigen::MatrixXcd& M,
                                     Eigen::MatrixXcd& vectors) {
  return solve_hermitian(M, 'V', &vectors);
}

Eigen::MatrixXcd circle_quantize(const PhaseSpaceSymbol& S, double h, int N) {
  if (!(h > 0.0))
    throw std::invalid_argument("circle_quantize: h must be positive");
  if (N < 0)
    throw std::invalid_argument("circle_quantize: mode cutoff must be >= 0");
  const int d = S.dim();
  const int nm = 2 * N + 1;
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(d * nm, d * nm);

  for (const auto& [grade, entries] : S.grades()) {
    const double weight = std::pow(h, 0.5 * grade);
    for (int row = 0; row < d; ++row) {
      for (int col = 0; col < d; ++col) {
        for (const SymbolTerm& t : entries[row * d + col].terms()) {
          if (t.a != 0)
            throw std::invalid_argument(
                "circle_quantize: position polynomials have no action on the "
                "mode lattice");
          if (t.b > 2 && (t.m != 0 || t.n != 0))
            throw std::invalid_argument(
                "circle_quantize: oscillatory terms are limited to fiber "
                "degree 2");
          const cplx tag =
              t.coeff * weight * std::exp(kI * (2.0 * kPi * kPi * t.r * h));
          for (int mode = -N; mode <= N; ++mode) {
            const int out = mode + t.m;
            if (out < -N || out > N) continue;
            const double xi = 2.0 * kPi * (mode + 0.5 * t.m) * h;
            double fiber = 1.0;
            for (int k = 0; k < t.b; ++k) fiber *= xi;
            const cplx osc = std::exp(kI * (2.0 * kPi * t.n * xi));
            M(row * nm + out + N, col * nm + mode + N) += tag * fiber * osc;
          }
        }
      }
    }
  }
  return M;
}

Eigen::MatrixXcd tight_binding_bloch(int p, int q, double kx,
                                     const ModelParams& params) {
  if (q < 1 || p < 1)
    throw std::invalid_argument("tight_binding_bloch: flux p/q needs p,q >= 1");
  if (std::gcd(p, q) != 1)
    throw std::invalid_argument("tight_binding_bloch: flux p/q must be reduced");

  Eigen::MatrixXcd shift = Eigen::MatrixXcd::Zero(q, q);
  for (int i = 1; i < q; ++i) shift(i, i - 1) = 1.0;
  shift(0, q - 1) += std::exp(kI * kx);
  const Eigen::MatrixXcd hop = shift + shift.adjoint();

  const Eigen::Matrix4cd T = hop_matrix(params.kperp);
  const Eigen::Matrix4cd T0 = pauli1_pair();

  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(4 * q, 4 * q);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j)
          H(a * q + i, b * q + j) += T(a, b) * hop(i, j);

  for (int i = 0; i < q; ++i) {
    const double x = static_cast<double>(i) * p / q;
    const Eigen::Matrix4cd onsite = T0 + potential_matrix(x, params);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) H(a * q + i, b * q + i) += onsite(a, b);
  }
  return H;
}

Eigen::MatrixXcd lowenergy_bloch(double kx, double h, int N,
                                 const ModelParams& params) {
  if (!(h > 0.0))
    throw std::invalid_argument("lowenergy_bloch: h must be positive");
  if (N < 1)
    throw std::invalid_argument("lowenergy_bloch: mode cutoff must be >= 1");

  const int nm = 2 * N + 1;
  const int dim = 4 * nm;
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(dim, dim);
  const auto idx = [nm, N](int comp, int mode) { return comp * nm + mode + N; };

  const cplx uplus{-0.5, -0.5 * std::sqrt(3.0)};
  const cplx uminus = std::conj(uplus);

  // Kinetic blocks: diagonal in the mode index.
  for (int mode = -N; mode <= N; ++mode) {
    const double d = 2.0 * kPi * h * mode + kx;
    const cplx dm = d - kI * params.kperp;
    const cplx dp = d + kI * params.kperp;
    H(idx(0, mode), idx(1, mode)) = dm;
    H(idx(1, mode), idx(0, mode)) = dp;
    H(idx(2, mode), idx(3, mode)) = dm;
    H(idx(3, mode), idx(2, mode)) = dp;
  }

  // Potential blocks: I + u E + conj(u) E^T as tridiagonal convolutions,
  // scattered into the coupling pattern of the four components.
  const auto add_band = [&](int ca, int cb, cplx w, cplx u) {
    if (w == cplx{0.0, 0.0}) return;
    for (int mode = -N; mode <= N; ++mode) {
      H(idx(ca, mode), idx(cb, mode)) += w;
      if (mode + 1 <= N) {
        H(idx(ca, mode + 1), idx(cb, mode)) += w * u;
        H(idx(ca, mode), idx(cb, mode + 1)) += w * std::conj(u);
      }
    }
  };

  const cplx w0{params.w0, 0.0};
  const cplx w1{params.w1, 0.0};
  add_band(0, 2, w0, 1.0);
  add_band(2, 0, w0, 1.0);
  add_band(1, 3, w0, 1.0);
  add_band(3, 1, w0, 1.0);
  add_band(0, 3, w1, uminus);
  add_band(3, 0, w1, uminus);
  add_band(1, 2, w1, uplus);
  add_band(2, 1, w1, uplus);
  return H;
}

BandStructure band_sweep_serial(const BlochBuilder& builder,
                                const std::vector<double>& kgrid) {
  if (kgrid.empty())
    throw std::invalid_argument("band_sweep: empty momentum grid");
  BandStructure bs;
  bs.kx = kgrid;
  const Eigen::VectorXd first = hermitian_eigensolve(builder(kgrid[0]));
  bs.levels.resize(static_cast<Eigen::Index>(kgrid.size()), first.size());
  bs.levels.row(0) = first.transpose();
  for (std::size_t i = 1; i < kgrid.size(); ++i)
    bs.levels.row(static_cast<Eigen::Index>(i)) =
        hermitian_eigensolve(builder(kgrid[i])).transpose();
  return bs;
}

BandStructure band_sweep(const BlochBuilder& builder,
                         const std::vector<double>& kgrid) {
  if (kgrid.empty())
    throw std::invalid_argument("band_sweep: empty momentum grid");
  BandStructure bs;
  bs.kx = kgrid;
  const Eigen::VectorXd first = hermitian_eigensolve(builder(kgrid[0]));
  bs.levels.resize(static_cast<Eigen::Index>(kgrid.size()), first.size());
  bs.levels.row(0) = first.transpose();

  std::atomic<bool> failed{false};
  std::exception_ptr error;
  const int count = static_cast<int>(kgrid.size());
#pragma omp parallel for schedule(dynamic)
  for (int i = 1; i < count; ++i) {
    if (failed.load(std::memory_order_relaxed)) continue;
    try {
      // Distinct rows per iteration: no synchronization needed on the write.
      bs.levels.row(i) = hermitian_eigensolve(builder(kgrid[i])).transpose();
    } catch (...) {
#pragma omp critical(moirewell_band_sweep)
      if (!failed.exchange(true)) error = std::current_exception();
    }
  }
  if (failed.load()) std::rethrow_exception(error);
  return bs;
}

std::vector<double> uniform_grid(double lo, double hi, int n) {
  if (n < 1) throw std::invalid_argument("uniform_grid: need at least 1 point");
  std::vector<double> out(static_cast<std::size_t>(n));
  const double step = (hi - lo) / n;
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo + step * i;
  return out;
}

Flatness band_flatness(const BandStructure& bs, int band, double floor_value) {
  if (band < 0 || band >= bs.levels.cols())
    throw OutOfRange("band_flatness: band index " + std::to_string(band) +
                     " outside 0.." + std::to_string(bs.levels.cols() - 1));
  const Eigen::VectorXd column = bs.levels.col(band);
  Flatness f;
  f.abs = column.maxCoeff() - column.minCoeff();
  const double magnitude = column.cwiseAbs().maxCoeff();
  f.rel = f.abs / std::max(magnitude, floor_value);
  return f;
}

double directed_distance(const std::vector<double>& from,
                         const std::vector<double>& to) {
  if (from.empty() || to.empty())
    throw std::invalid_argument("directed_distance: empty point set");
  std::vector<double> sorted = to;
  std::sort(sorted.begin(), sorted.end());
  double worst = 0.0;
  for (double v : from) {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), v);
    double best = std::numeric_limits<double>::infinity();
    if (it != sorted.end()) best = std::min(best, *it - v);
    if (it != sorted.begin()) best = std::min(best, v - *(it - 1));
    worst = std::max(worst, best);
  }
  return worst;
}

double hausdorff_distance(const std::vector<double>& a,
                          const std::vector<double>& b) {
  return std::max(directed_distance(a, b), directed_distance(b, a));
}

Eigen::MatrixXcd cutoff_matrix(int components, double h, int N, double x0,
                               double xi0, const CutoffParams& cp) {
  if (components < 1)
    throw std::invalid_argument("cutoff_matrix: need at least one component");
  if (cp.fejer_order < 0 || !(cp.rho > 0.0))
    throw std::invalid_argument("cutoff_matrix: invalid cutoff parameters");
  if (!(h > 0.0) || N < 0)
    throw std::invalid_argument("cutoff_matrix: invalid mode lattice");

  const int nm = 2 * N + 1;
  const int order = cp.fejer_order;
  Eigen::MatrixXcd Q = Eigen::MatrixXcd::Zero(nm, nm);
  for (int mode = -N; mode <= N; ++mode) {
    const double xi = 2.0 * kPi * mode * h;
    const double radial = bump(wrap_half(xi - xi0) / cp.rho);
    if (radial == 0.0) continue;
    for (int k = -order; k <= order; ++k) {
      const int out = mode + k;
      if (out < -N || out > N) continue;
      const double fejer =
          (1.0 - std::abs(k) / (order + 1.0)) / (order + 1.0);
      const cplx coeff = fejer * std::exp(-kI * (2.0 * kPi * k * x0)) * radial;
      Q(out + N, mode + N) += coeff;
    }
  }
  Q = 0.5 * (Q + Q.adjoint()).eval();

  Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(components * nm,
                                                 components * nm);
  for (int a = 0; a < components; ++a)
    full.block(a * nm, a * nm, nm, nm) = Q;
  return full;
}

Eigen::MatrixXcd massive_operator(const Eigen::MatrixXcd& M,
                                  const WellReport& well, double h, int N,
                                  const CutoffParams& cp) {
  const int nm = 2 * N + 1;
  if (M.rows() != M.cols() || M.rows() % nm != 0)
    throw std::invalid_argument(
        "massive_operator: operator size does not match the mode lattice");
  const int components = static_cast<int>(M.rows()) / nm;
  const Eigen::MatrixXcd Q =
      cutoff_matrix(components, h, N, well.x0, well.xi0, cp);
  return M + (Eigen::MatrixXcd::Identity(M.rows(), M.cols()) - Q);
}

double fiber_mass(const Eigen::VectorXcd& v, double h, int N, double xi0,
                  double width) {
  const int nm = 2 * N + 1;
  if (v.size() % nm != 0)
    throw std::invalid_argument("fiber_mass: state size does not match the mode lattice");
  const int components = static_cast<int>(v.size()) / nm;
  double inside = 0.0, total = 0.0;
  for (int a = 0; a < components; ++a) {
    for (int mode = -N; mode <= N; ++mode) {
      const double w = std::norm(v(a * nm + mode + N));
      total += w;
      if (std::abs(wrap_half(2.0 * kPi * mode * h - xi0)) < width) inside += w;
    }
  }
  return total > 0.0 ? inside / total : 0.0;
}

double position_mass(const Eigen::VectorXcd& v, int N, double x0,
                     double width) {
  const int nm = 2 * N + 1;
  if (v.size() % nm != 0)
    throw std::invalid_argument("position_mass: state size does not match the mode lattice");
  const int components = static_cast<int>(v.size()) / nm;
  const int grid = std::max(1024, 8 * (N + 1));
  std::vector<cplx> root(static_cast<std::size_t>(grid));
  for (int g = 0; g < grid; ++g)
    root[static_cast<std::size_t>(g)] =
        std::exp(kI * (2.0 * kPi * g / grid));
  double inside = 0.0, total = 0.0;
  for (int g = 0; g < grid; ++g) {
    const double x = static_cast<double>(g) / grid;
    double density = 0.0;
    for (int a = 0; a < components; ++a) {
      cplx u = 0.0;
      for (int mode = -N; mode <= N; ++mode) {
        const int twist = ((mode * g) % grid + grid) % grid;
        u += v(a * nm + mode + N) * root[static_cast<std::size_t>(twist)];
      }
      density += std::norm(u);
    }
    total += density;
    if (std::abs(wrap_half(x - x0)) < width) inside += density;
  }
  return total > 0.0 ? inside / total : 0.0;
}

}  // namespace moirewell
