#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "moirewell/models.hpp"
#include "moirewell/symbols.hpp"

using namespace moirewell;

namespace {

constexpr double kPi = 3.14159265358979323846;

double frob_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

// First-order product correction, computed entirely with pointwise symbol
// arithmetic: -(i/2) sum_k (d_xi A_ik d_x B_kj - d_x A_ik d_xi B_kj).
Eigen::MatrixXcd first_order_correction(const PhaseSpaceSymbol& A,
                                        const PhaseSpaceSymbol& B, double x,
                                        double xi) {
  const int d = A.dim();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      cplx acc = 0.0;
      for (int k = 0; k < d; ++k) {
        const ScalarSymbol& a = A.at(0, i, k);
        const ScalarSymbol& b = B.at(0, k, j);
        if (a.empty() || b.empty()) continue;
        acc += a.dxi().eval(x, xi, 0.0) * b.dx().eval(x, xi, 0.0) -
               a.dx().eval(x, xi, 0.0) * b.dxi().eval(x, xi, 0.0);
      }
      out(i, j) = cplx(0.0, -0.5) * acc;
    }
  return out;
}

}  // namespace

TEST_CASE("coupling profiles take their tabulated values") {
  const ScalarSymbol uac = acoustic_profile();
  const ScalarSymbol up = chiral_profile(+1);
  const ScalarSymbol um = chiral_profile(-1);
  CHECK(std::abs(uac.eval(0.0, 0.0, 0.0) - 3.0) < 1e-14);
  CHECK(std::abs(uac.eval(0.5, 0.0, 0.0) + 1.0) < 1e-14);
  CHECK(std::abs(uac.eval(1.0 / 3.0, 0.0, 0.0) - 0.0) < 1e-14);
  CHECK(std::abs(up.eval(0.0, 0.0, 0.0)) < 1e-14);
  CHECK(std::abs(um.eval(0.0, 0.0, 0.0)) < 1e-14);
  CHECK(std::abs(up.eval(1.0 / 6.0, 0.0, 0.0) - 2.0) < 1e-14);
  CHECK(std::abs(up.eval(1.0 / 3.0, 0.0, 0.0) - 3.0) < 1e-14);
  CHECK(std::abs(um.eval(2.0 / 3.0, 0.0, 0.0) - 3.0) < 1e-14);
  // U_+ U_- = (1 - cos)^2 - 3 sin^2 and U_+ + U_- = 2 (1 - cos)
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    const double x = uni(rng);
    const double c = std::cos(2 * kPi * x), s = std::sin(2 * kPi * x);
    const cplx pv = up.eval(x, 0, 0), mv = um.eval(x, 0, 0);
    CHECK(std::abs(pv * mv - ((1 - c) * (1 - c) - 3 * s * s)) < 1e-12);
    CHECK(std::abs(pv + mv - 2.0 * (1 - c)) < 1e-12);
  }
}

TEST_CASE("lattice symbol at the origin is three times the bare hop") {
  const ModelParams bare{0.0, 0.0, 0.0};
  const PhaseSpaceSymbol S = harper_symbol(bare);
  CHECK(frob_diff(eval_grade(S, 0, 0.0, 0.0), 3.0 * pauli1_pair()) < 1e-14);
}

TEST_CASE("full symbols are Hermitian and match the sampled potential") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const ModelParams params{0.35, 0.8, 0.17};
  const PhaseSpaceSymbol H = harper_symbol(params);
  const PhaseSpaceSymbol L = lowenergy_symbol(params, 0.4);
  for (int t = 0; t < 25; ++t) {
    const double x = uni(rng), xi = 2.0 * uni(rng) - 1.0, h = 0.05 * uni(rng);
    const Eigen::MatrixXcd Hv = eval_symbol(H, x, xi, h);
    const Eigen::MatrixXcd Lv = eval_symbol(L, x, xi, h);
    CHECK(frob_diff(Hv, Hv.adjoint()) < 1e-13);
    CHECK(frob_diff(Lv, Lv.adjoint()) < 1e-13);
    const Eigen::MatrixXcd expect =
        2.0 * std::cos(2 * kPi * xi) * hop_matrix(params.kperp) +
        pauli1_pair() + potential_matrix(x, params);
    CHECK(frob_diff(Hv, expect) < 1e-12);
  }
}

TEST_CASE("squared chiral symbol vanishes at the branch-touching point") {
  const ModelParams params{0.0, 1.0, 0.0};
  const PhaseSpaceSymbol sq = chiral_squared(ModelKind::Harper, params);
  const Eigen::MatrixXcd P = eval_grade(sq, 0, 0.0, 1.0 / 3.0);
  CHECK(P.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("squared chiral symbol is positive semidefinite at leading order") {
  for (const ModelKind kind : {ModelKind::Harper, ModelKind::LowEnergy}) {
    const ModelParams params{0.0, 1.3, kind == ModelKind::Harper ? 0.5 : 0.0};
    const PhaseSpaceSymbol sq = chiral_squared(kind, params);
    for (int i = 0; i < 100; ++i)
      for (int j = 0; j < 100; ++j) {
        const double x = i / 100.0;
        const double xi =
            kind == ModelKind::Harper ? j / 100.0 : -3.0 + 6.0 * j / 100.0;
        const Eigen::MatrixXcd P = eval_grade(sq, 0, x, xi);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(P);
        CHECK(es.eigenvalues().minCoeff() > -1e-11);
      }
  }
}

TEST_CASE("first correction of the squared symbol matches the bracket") {
  std::mt19937 rng(37);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (const ModelKind kind : {ModelKind::Harper, ModelKind::LowEnergy}) {
    for (const double kperp : {0.0, 0.5}) {
      const ModelParams params{0.0, 0.9, kperp};
      if (kind == ModelKind::LowEnergy && kperp != 0.0) continue;
      const PhaseSpaceSymbol D = chiral_offdiag(kind, params);
      const PhaseSpaceSymbol Ds = D.adjoint();
      const PhaseSpaceSymbol sq =
          expand_h_phases(chiral_squared(kind, params), 2);
      for (int t = 0; t < 15; ++t) {
        const double x = uni(rng);
        const double xi = kind == ModelKind::Harper ? uni(rng) : uni(rng) - 0.5;
        Eigen::MatrixXcd got = eval_grade(sq, 2, x, xi);
        Eigen::MatrixXcd want = Eigen::MatrixXcd::Zero(4, 4);
        want.topLeftCorner<2, 2>() = first_order_correction(D, Ds, x, xi);
        want.bottomRightCorner<2, 2>() = first_order_correction(Ds, D, x, xi);
        CHECK(frob_diff(got, want) < 1e-10);
      }
    }
  }
}

TEST_CASE("slow-momentum corrections of the continuum squared symbol") {
  const double w1 = 1.1, kappa = 0.7;
  const ModelParams params{0.0, w1, 0.0};
  const PhaseSpaceSymbol sq =
      chiral_squared(ModelKind::LowEnergy, params, kappa);
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  Eigen::Matrix2cd s2, s3;
  s2 << cplx(0, 0), cplx(0, -1), cplx(0, 1), cplx(0, 0);
  s3 << 1, 0, 0, -1;
  for (int t = 0; t < 15; ++t) {
    const double x = uni(rng), xi = uni(rng) - 0.5;
    const double f = w1 * (1.0 - std::cos(2 * kPi * x));
    const double gp = 2 * kPi * std::sqrt(3.0) * w1 * std::cos(2 * kPi * x);
    Eigen::MatrixXcd want = Eigen::MatrixXcd::Zero(4, 4);
    want.topLeftCorner<2, 2>() =
        2 * xi * kappa * Eigen::Matrix2cd::Identity() - gp * s3 -
        2 * f * kappa * s2;
    want.bottomRightCorner<2, 2>() =
        2 * xi * kappa * Eigen::Matrix2cd::Identity() + gp * s3 -
        2 * f * kappa * s2;
    CHECK(frob_diff(eval_grade(sq, 2, x, xi), want) < 1e-11);
    Eigen::MatrixXcd want4 =
        kappa * kappa * Eigen::MatrixXcd::Identity(4, 4);
    CHECK(frob_diff(eval_grade(sq, 4, x, xi), want4) < 1e-12);
  }
}

TEST_CASE("lattice wells sit at the expected heights and offsets") {
  for (const double w1 : {0.4, 1.0, 2.0}) {
    const ModelParams params{0.0, w1, 0.0};
    const auto wells = find_wells(ModelKind::Harper, params);
    REQUIRE(wells.size() == 2);
    CHECK(std::abs(wells[0].x0) < 1e-9);
    CHECK(std::abs(wells[0].xi0 - 1.0 / 3.0) < 1e-9);
    CHECK(std::abs(wells[1].x0) < 1e-9);
    CHECK(std::abs(wells[1].xi0 - 2.0 / 3.0) < 1e-9);
    for (const auto& w : wells) {
      CHECK(!w.double_degenerate);
      CHECK(std::abs(w.scale - 12.0 * kPi * kPi) < 1e-6);
      CHECK(std::abs(w.omega - w1) < 1e-9);
      CHECK(std::abs(w.mu1 + w.mu2) < 1e-9);  // symmetric pair
    }
    CHECK(std::abs(wells[0].c - 1.0) < 1e-9);
    CHECK(std::abs(wells[0].mu2 - w1) < 1e-9);
    CHECK(std::abs(wells[1].c + 1.0) < 1e-9);
  }
}

TEST_CASE("transverse zone edge mirrors the well pattern") {
  const ModelParams params{0.0, 1.0, 0.5};
  const auto wells = find_wells(ModelKind::Harper, params);
  REQUIRE(wells.size() == 2);
  CHECK(std::abs(wells[0].xi0 - 1.0 / 6.0) < 1e-9);
  CHECK(std::abs(wells[1].xi0 - 5.0 / 6.0) < 1e-9);
  CHECK(std::abs(wells[0].c + 1.0) < 1e-9);
  CHECK(std::abs(wells[1].c - 1.0) < 1e-9);
  CHECK(std::abs(wells[0].omega - 1.0) < 1e-9);
}

TEST_CASE("generic transverse momentum leaves only rank-one zeros") {
  const ModelParams params{0.0, 1.0, 0.3};
  const ZeroSetSurvey survey = survey_zero_set(ModelKind::Harper, params);
  CHECK(survey.wells.empty());
  CHECK(survey.isolated_zeros.size() == 4);
  for (const auto& z : survey.isolated_zeros) {
    const double d1 = std::abs(z[1] - 0.25), d2 = std::abs(z[1] - 0.75);
    CHECK(std::min(d1, d2) < 1e-7);
  }
  CHECK(survey.curves.empty());
}

TEST_CASE("continuum well carries the scaled harmonic data") {
  for (const double w1 : {0.7, 1.0}) {
    const ModelParams params{0.0, w1, 0.0};
    const ZeroSetSurvey survey = survey_zero_set(ModelKind::LowEnergy, params);
    REQUIRE(survey.wells.size() == 1);
    const WellReport& w = survey.wells[0];
    CHECK(std::abs(w.x0) < 1e-9);
    CHECK(std::abs(w.xi0) < 1e-9);
    CHECK(std::abs(w.scale - 1.0) < 1e-8);
    CHECK(std::abs(w.omega - 2.0 * kPi * std::sqrt(3.0) * w1) < 1e-8);
    CHECK(std::abs(w.c + 1.0) < 1e-8);
    CHECK(survey.curves.size() == 1);
  }
}

TEST_CASE("zero-curve topology switches with the coupling strength") {
  auto count = [](double w1) {
    const ModelParams params{0.0, w1, 0.0};
    return trace_zero_set(ModelKind::Harper, params).size();
  };
  CHECK(count(0.4) == 2);
  CHECK(count(1.0) == 1);
  CHECK(count(2.0) == 2);
}

TEST_CASE("rescaled second block reproduces the reference normal form") {
  const ModelParams params{0.0, 1.0, 0.0};
  const auto wells = find_wells(ModelKind::Harper, params);
  REQUIRE(wells.size() == 2);
  const PhaseSpaceSymbol T = well_normal_form(ModelKind::Harper, params,
                                              wells[0], 0, 1);
  const NormalFormData nf = extract_normal_form(T);
  CHECK(std::abs(nf.omega - 1.0) < 1e-9);
  CHECK(std::abs(nf.mu1 + 1.0) < 1e-9);
  CHECK(std::abs(nf.mu2 - 1.0) < 1e-9);
  // first block has the opposite offsets
  const PhaseSpaceSymbol T0 = well_normal_form(ModelKind::Harper, params,
                                               wells[0], 0, 0);
  const NormalFormData nf0 = extract_normal_form(T0);
  CHECK(std::abs(nf0.mu1 - 1.0) < 1e-9);
  CHECK(std::abs(nf0.mu2 + 1.0) < 1e-9);
}

TEST_CASE("anti-chiral branches and their minima") {
  SUBCASE("lattice branch values and harmonic data") {
    for (const double w0 : {0.7, 1.0}) {
      const ModelParams params{w0, 0.0, 0.0};
      const auto wells = antichiral_wells(ModelKind::Harper, params);
      REQUIRE(wells.size() == 4);
      const double expected[4] = {-3.0 - 3.0 * w0, -3.0 - w0, -1.0 - 3.0 * w0,
                                  -1.0 - w0};
      const double pos[4][2] = {{0.0, 0.0}, {0.5, 0.0}, {0.0, 0.5}, {0.5, 0.5}};
      const PhaseSpaceSymbol A = antichiral_diag(ModelKind::Harper, params);
      for (int j = 0; j < 4; ++j) {
        CHECK(wells[j].branch == j);
        CHECK(std::abs(wells[j].bottom - expected[j]) < 1e-14);
        CHECK(std::abs(wells[j].x0 - pos[j][0]) < 1e-14);
        CHECK(std::abs(wells[j].xi0 - pos[j][1]) < 1e-14);
        CHECK(std::abs(wells[j].slope -
                       8.0 * kPi * kPi * std::sqrt(w0)) < 1e-12);
        const cplx v =
            A.at(0, j, j).eval(wells[j].x0, wells[j].xi0, 0.0);
        CHECK(std::abs(v - expected[j]) < 1e-13);
      }
    }
  }
  SUBCASE("zone edge swaps the kinetic minima") {
    const ModelParams params{1.0, 0.0, 0.5};
    const auto wells = antichiral_wells(ModelKind::Harper, params);
    REQUIRE(wells.size() == 4);
    CHECK(wells[0].xi0 == 0.5);
    CHECK(wells[2].xi0 == 0.0);
    CHECK(std::abs(wells[0].bottom + 6.0) < 1e-14);
  }
  SUBCASE("continuum branch is unit-slope in the momentum direction") {
    const ModelParams params{0.8, 0.0, 0.0};
    const PhaseSpaceSymbol A = antichiral_diag(ModelKind::LowEnergy, params);
    for (int j = 0; j < 4; ++j) {
      const ScalarSymbol slope = A.at(0, j, j).dxi();
      REQUIRE(slope.terms().size() == 1);
      CHECK(std::abs(std::abs(slope.terms()[0].coeff) - 1.0) < 1e-14);
    }
    CHECK(antichiral_wells(ModelKind::LowEnergy, params).empty());
  }
  SUBCASE("parameter validation") {
    CHECK_THROWS_AS(antichiral_diag(ModelKind::Harper,
                                    ModelParams{1.0, 0.5, 0.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(antichiral_diag(ModelKind::Harper,
                                    ModelParams{1.0, 0.0, 0.3}),
                    std::invalid_argument);
    CHECK_THROWS_AS(antichiral_diag(ModelKind::LowEnergy,
                                    ModelParams{1.0, 0.0, 0.25}),
                    std::invalid_argument);
  }
}

TEST_CASE("unfolded chain agrees with the plain mode window") {
  const ModelParams params{0.25, 0.9, 0.2};
  auto sorted_eigs = [](const Eigen::MatrixXcd& H) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
    return es.eigenvalues();
  };
  SUBCASE("q = 2 sublattice split") {
    const double alpha_prime = 0.003;
    const UnfoldedFamily fam(1, 2, params);
    const Eigen::MatrixXcd A = fam.assemble(alpha_prime, 15);
    CHECK(frob_diff(A, A.adjoint()) < 1e-13);
    const Eigen::MatrixXcd B = mode_window(params, 0.5 + alpha_prime, 30);
    REQUIRE(A.rows() == B.rows());
    const Eigen::VectorXd ea = sorted_eigs(A), eb = sorted_eigs(B);
    CHECK((ea - eb).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((ea - eb).cwiseAbs().maxCoeff() < 1e-11);  // machine-level in practice
  }
  SUBCASE("q = 3 sublattice split") {
    const double alpha_prime = 0.007;
    const UnfoldedFamily fam(2, 3, params);
    const Eigen::MatrixXcd A = fam.assemble(alpha_prime, 10);
    const Eigen::MatrixXcd B =
        mode_window(params, 2.0 / 3.0 + alpha_prime, 30);
    REQUIRE(A.rows() == B.rows());
    const Eigen::VectorXd ea = sorted_eigs(A), eb = sorted_eigs(B);
    CHECK((ea - eb).cwiseAbs().maxCoeff() < 1e-11);
  }
  SUBCASE("lowest terms are enforced") {
    CHECK_THROWS_AS(UnfoldedFamily(2, 4, params), std::invalid_argument);
    CHECK_THROWS_AS(UnfoldedFamily(3, 6, params), std::invalid_argument);
    CHECK_NOTHROW(UnfoldedFamily(3, 4, params));
  }
}

TEST_CASE("block-form metadata for the period-two family") {
  const ModelParams params{0.0, 1.0, 0.0};
  const UnfoldedFamily fam(1, 2, params);
  Eigen::MatrixXcd J = fam.twist(), K = fam.shift();
  CHECK(std::abs(J(0, 0) - 1.0) < 1e-14);
  CHECK(std::abs(J(1, 1) + 1.0) < 1e-14);
  CHECK(std::abs(K(0, 1) - 1.0) < 1e-14);
  CHECK(std::abs(K(1, 0) - 1.0) < 1e-14);
  std::mt19937 rng(53);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int t = 0; t < 10; ++t) {
    const double xi = uni(rng);
    const double cth = std::cos(2 * kPi * xi), sth = std::sin(2 * kPi * xi);
    Eigen::Matrix2cd s1;
    s1 << 0, 1, 1, 0;
    const Eigen::MatrixXcd U = fam.block_acoustic(xi);
    const Eigen::MatrixXcd Up = fam.block_chiral(xi, +1);
    const Eigen::MatrixXcd Um = fam.block_chiral(xi, -1);
    CHECK(frob_diff(U, Eigen::Matrix2cd::Identity() + 2.0 * cth * s1) < 1e-13);
    CHECK(frob_diff(Up, Eigen::Matrix2cd::Identity() +
                            (-cth + std::sqrt(3.0) * sth) * s1) < 1e-13);
    CHECK(frob_diff(Um, Eigen::Matrix2cd::Identity() +
                            (-cth - std::sqrt(3.0) * sth) * s1) < 1e-13);
    CHECK(frob_diff(U, U.adjoint()) < 1e-14);
  }
}

TEST_CASE("model names round trip") {
  CHECK(model_from_name(model_name(ModelKind::Harper)) == ModelKind::Harper);
  CHECK(model_from_name(model_name(ModelKind::LowEnergy)) ==
        ModelKind::LowEnergy);
  CHECK_THROWS_AS(model_from_name("nonsense"), ConfigError);
}
