#include "doctest.h"
#include "oracles.hpp"

#include "sqzrot/error.hpp"
#include "sqzrot/observables.hpp"
#include "sqzrot/states.hpp"

#include <random>

using namespace sqzrot;
using oracle::I;

namespace {

SphericalState random_state(int L, unsigned seed)
{
    return {L, oracle::random_coeffs(L, seed)};
}

const SqueezeParam eta_half{cplx{0.5, 0.0}};

} // namespace

TEST_CASE("squeeze parameter")
{
    CHECK_THROWS_AS(SqueezeParam(cplx{1.1, 0.0}), DomainError);
    CHECK_THROWS_AS(SqueezeParam(cplx{0.0, std::nan("")}), DomainError);
    const SqueezeParam p{cplx{0.5, 0.0}};
    CHECK(p.s().real() == doctest::Approx(std::sqrt(0.75)).epsilon(1e-15));
    CHECK(p.s().imag() == 0.0);
    CHECK_FALSE(p.singular());
    CHECK(SqueezeParam(cplx{1.0, 0.0}).singular());
    CHECK(SqueezeParam(cplx{-1.0, 0.0}).singular());
    CHECK_FALSE(SqueezeParam::from_polar(1.0, oracle::pi / 4).singular());
    CHECK(SqueezeParam::from_polar(0.7, 0.0).eta().imag() == 0.0);
    const auto q = SqueezeParam::from_polar(0.5, oracle::pi / 4);
    CHECK(q.modulus() == doctest::Approx(0.5));
    CHECK(q.alpha() == doctest::Approx(oracle::pi / 4));
}

TEST_CASE("inner product and norm")
{
    const auto a = random_state(10, 1);
    const auto b = random_state(14, 2);
    CHECK(std::abs(inner(a, a) - cplx{1.0, 0.0}) < 1e-14);
    CHECK(norm(a) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(inner(a, b) - std::conj(inner(b, a))) < 1e-15);
    CHECK(std::abs(inner(a, b)) <= 1.0);
    CHECK(std::abs(inner(a, b) - inner(a.padded(14), b)) < 1e-15);
    CHECK_THROWS_AS(SphericalState(3, Coeffs(15)), DomainError);
    CHECK_THROWS_AS(SphericalState(3, Coeffs(16)), DomainError);
}

TEST_CASE("shell weights and tail mass")
{
    const auto y = SphericalState::basis(6, 5, -2);
    const auto w = y.shell_weights();
    CHECK(w[5] == doctest::Approx(1.0));
    CHECK(y.tail_mass() == doctest::Approx(1.0));
    CHECK(y.tail_mass(1) == 0.0);
    CHECK(y(5, -2) == cplx{1.0, 0.0});
    CHECK(y.shell(5).size() == 11u);
}

TEST_CASE("angular momentum blocks")
{
    const auto b0 = angmom_ladder_elements(0);
    CHECK(b0.Lz.rows() == 1);
    CHECK(b0.Lx.norm() == 0.0);
    CHECK(b0.Ly.norm() == 0.0);
    CHECK(b0.Lz.norm() == 0.0);

    const auto b1 = angmom_ladder_elements(1);
    const Eigen::MatrixXcd plus = b1.Lx + I * b1.Ly;
    CHECK(std::abs(b1.Lz(0, 0) - cplx(-1.0)) < 1e-15);
    CHECK(std::abs(b1.Lz(1, 1)) < 1e-15);
    CHECK(std::abs(b1.Lz(2, 2) - cplx(1.0)) < 1e-15);
    CHECK(std::abs(plus(1, 0) - std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(plus(2, 1) - std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(plus(0, 1)) < 1e-15);

    for (int l = 0; l <= 60; ++l) {
        const auto b = angmom_ladder_elements(l);
        const auto n = 2 * l + 1;
        const Eigen::MatrixXcd cas = b.Lx * b.Lx + b.Ly * b.Ly + b.Lz * b.Lz;
        CHECK((cas - l * (l + 1.0) * Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12 * (1 + l * l));
        const Eigen::MatrixXcd comm = b.Lx * b.Ly - b.Ly * b.Lx - I * b.Lz;
        CHECK(comm.cwiseAbs().maxCoeff() < 1e-11 * (1 + l));
    }
}

TEST_CASE("squeezed operators")
{
    const SqueezeParam zero{cplx{0.0, 0.0}};
    for (int l : {1, 4}) {
        const auto b = angmom_ladder_elements(l);
        CHECK((scripted_operator(ScriptedOp::L3, zero, l) - b.Lx).cwiseAbs().maxCoeff() < 1e-14);
        CHECK((scripted_operator(ScriptedOp::Lplus, zero, l) - (I * b.Ly - b.Lz)).cwiseAbs().maxCoeff() < 1e-14);
    }

    // l = 1 composed by hand from the ladder matrices.
    const double e = 0.3;
    const double s = std::sqrt(1 - e * e);
    const double r2 = std::sqrt(2.0);
    Eigen::MatrixXcd Lp = Eigen::MatrixXcd::Zero(3, 3), Lz = Eigen::MatrixXcd::Zero(3, 3);
    Lp(1, 0) = r2;
    Lp(2, 1) = r2;
    Lz(0, 0) = -1;
    Lz(2, 2) = 1;
    const Eigen::MatrixXcd Lm = Lp.adjoint();
    const Eigen::MatrixXcd Lx = (Lp + Lm) / 2.0, Ly = (Lp - Lm) / (2.0 * I);
    const SqueezeParam p{cplx{e, 0.0}};
    CHECK((scripted_operator(ScriptedOp::L3, p, 1) - (Lx + I * e * Ly) / s).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((scripted_operator(ScriptedOp::Lplus, p, 1) - ((e * Lx + I * Ly) / s - Lz)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((scripted_operator(ScriptedOp::Lminus, p, 1) - (-(e * Lx + I * Ly) / s - Lz)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((scripted_operator(ScriptedOp::Lplus, p, 1, Scaling::scaled) - (e * Lx + I * Ly - s * Lz)).cwiseAbs().maxCoeff() <
          1e-14);

    CHECK_THROWS_AS(scripted_operator(ScriptedOp::L3, SqueezeParam(cplx{1.0, 0.0}), 2), SingularParameterError);
    CHECK_NOTHROW(scripted_operator(ScriptedOp::L3, SqueezeParam(cplx{1.0, 0.0}), 2, Scaling::scaled));
}

TEST_CASE("squeezed operators close an su(2)-type algebra")
{
    const auto q = SqueezeParam::from_polar(0.6, 0.9);
    for (int l : {1, 3, 7}) {
        const auto L3 = scripted_operator(ScriptedOp::L3, q, l);
        const auto Lp = scripted_operator(ScriptedOp::Lplus, q, l);
        const auto Lm = scripted_operator(ScriptedOp::Lminus, q, l);
        CHECK((L3 * Lp - Lp * L3 - Lp).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((L3 * Lm - Lm * L3 + Lm).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((Lp * Lm - Lm * Lp - 2.0 * L3).cwiseAbs().maxCoeff() < 1e-11);
    }
}

TEST_CASE("parent packet projection")
{
    for (double e : {0.0, 0.5, 1.0})
        for (double N : {1.0, 5.0, 20.0}) {
            CAPTURE(e);
            CAPTURE(N);
            const auto c = project_parent(SqueezeParam(cplx{e, 0.0}), N, 64);
            CHECK(norm(std::span<const cplx>(c)) == doctest::Approx(1.0).epsilon(1e-10));
        }
    const auto tiny = build_parent(SqueezeParam(cplx{0.0, 0.0}), 1e-6, 6);
    CHECK(std::abs(tiny(0, 0)) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK_THROWS_AS(build_parent(eta_half, 20.0, 8), TruncationError);
    CHECK_NOTHROW(build_parent(eta_half, 20.0, 8, {1e-10, false}));
    CHECK_THROWS_AS(build_parent(eta_half, -1.0, 8), DomainError);
}

TEST_CASE("content far above the band limit is not mistaken for convergence")
{
    // The phase carrier near m = N eta folds into low orders with a small top-shell tail.
    const auto folded = build_parent(eta_half, 800.0, 96, {1e-3, false});
    CHECK(folded.tail_mass() < 1e-3);
    CHECK(std::abs(measure(folded).mean_L[2] - parent_mean_Lz(0.5, 800.0)) > 100.0);
    CHECK_THROWS_AS(build_parent(eta_half, 800.0, 96, {1e-3, true}), TruncationError);
}

TEST_CASE("parent coefficients match brute-force trapezoidal integration")
{
    const int L = 40;
    const auto parent = build_parent(eta_half, 5.0, L);
    const auto ref = oracle::trapezoid_projection({0.5, 0.0}, 5.0, L, 2000, 2000);
    double worst = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i)
        worst = std::max(worst, std::abs(parent.coeffs()[i] - ref[i]));
    CHECK(worst < 1e-6);
}

TEST_CASE("parent is annihilated by the squeezed L3")
{
    for (auto q : {SqueezeParam(cplx{0.25, 0.0}), SqueezeParam(cplx{1.0, 0.0}), SqueezeParam::from_polar(0.5, 0.7)}) {
        const auto st = build_parent(q, 20.0, 64);
        CHECK(annihilation_residual(st, q) < 1e-8);
    }
}

TEST_CASE("ladder application")
{
    const auto parent = build_parent(eta_half, 5.0, 30);
    const auto same = apply_ladder_k(parent, eta_half, 0);
    CHECK(same.coeffs() == parent.coeffs());

    // eta = 1: the scaled ladder is L_+.
    const auto st = random_state(6, 21);
    const auto up = apply_ladder_k(st, SqueezeParam(cplx{1.0, 0.0}), 1);
    Coeffs expected(st.coeffs().size());
    for (int l = 0; l <= 6; ++l)
        for (int m = -l; m < l; ++m)
            expected[lm_index(l, m + 1)] = oracle::lplus(l, m) * st(l, m);
    const SphericalState ref(6, expected);
    CHECK(std::abs(std::abs(inner(ref, up)) - 1.0) < 1e-14);
    CHECK(std::abs(inner(ref, up) - cplx{1.0, 0.0}) < 1e-14);

    CHECK_THROWS_AS(apply_ladder_k(SphericalState::basis(3, 3, 3), SqueezeParam(cplx{1.0, 0.0}), 1),
                    DegenerateStateError);
}

TEST_CASE("ladder matches the dense full-table oracle")
{
    const int L = 40;
    const auto parent = build_parent(eta_half, 20.0, L, {1e-10, false});
    const auto got = apply_ladder_k(parent, eta_half, 5);
    const Eigen::VectorXcd ref = oracle::dense_ladder(parent.coeffs(), L, {0.5, 0.0}, 5);
    double worst = 0.0;
    for (std::size_t i = 0; i < got.coeffs().size(); ++i)
        worst = std::max(worst, std::abs(got.coeffs()[i] - ref(static_cast<Eigen::Index>(i))));
    CHECK(worst < 1e-10);

    const auto full = oracle::full_angmom(L);
    const auto r = measure(got);
    CHECK(std::abs(r.mean_L[2] - oracle::expectation(full.Lz, ref).real()) < 1e-10);
    CHECK(std::abs(r.mean_L[0] - oracle::expectation(full.Lx, ref).real()) < 1e-10);
}

TEST_CASE("spatial and coefficient ladder routes agree")
{
    for (auto q : {eta_half, SqueezeParam::from_polar(0.5, oracle::pi / 4), SqueezeParam::from_polar(1.0, oracle::pi / 4)})
        for (int k : {1, 5, 10}) {
            CAPTURE(k);
            const int L = 64;
            const auto spatial = build_state({q, 20.0, k, 1.0}, L);
            const auto ladder = apply_ladder_k(build_parent(q, 20.0, L), q, k);
            CHECK(1.0 - std::abs(inner(spatial, ladder)) < 1e-12);
        }
    CHECK_THROWS_AS(build_state({SqueezeParam(cplx{1.0, 0.0}), 20.0, 1, 1.0}, 48), DegenerateStateError);
}

TEST_CASE("automatic band limit")
{
    const WavepacketSpec clone{SqueezeParam(cplx{1.0, 0.0}), 20.0, 0, 1.0};
    const int L = auto_lmax(clone);
    CHECK(L >= 40);
    CHECK(L <= 120);
    CHECK(L == 48);  // regression anchor

    CHECK(auto_lmax({SqueezeParam(cplx{0.0, 0.0}), 0.001, 0, 1.0}) <= 8);

    int prev = 1 << 30;
    for (double tol : {1e-14, 1e-12, 1e-10, 1e-8, 1e-6}) {
        const int l = auto_lmax(clone, tol);
        CHECK(l <= prev);
        prev = l;
    }
    CHECK_THROWS_AS(auto_lmax(clone, 1e-3), DomainError);
    CHECK_THROWS_AS(auto_lmax(clone, 0.0), DomainError);

    const auto b = auto_build({eta_half, 20.0, 20, 1.0});
    CHECK(b.state.tail_mass() < 1e-10);
    CHECK(b.l_max >= 20);
}

TEST_CASE("eigenvalue of the squeezed L3")
{
    const auto parent = auto_build({eta_half, 20.0, 0, 1.0});
    const auto r0 = eigen_residual(parent.state, eta_half, 0);
    CHECK(std::abs(r0.lambda) < 1e-8);
    CHECK(r0.residual < 1e-8);

    const auto b5 = auto_build({eta_half, 20.0, 5, 1.0});
    const auto r5 = eigen_residual(b5.state, eta_half, 5);
    CHECK(r5.residual < 1e-8);
    CHECK(r5.expected.real() == doctest::Approx(5.0 * std::sqrt(0.75)));
    CHECK(r5.algebra_value == 5.0);
    MESSAGE("k = 5, eta = 0.5: lambda = " << r5.lambda.real() << " " << r5.lambda.imag() << "i, k sqrt(1-eta^2) = "
                                          << r5.expected.real());

    CHECK_THROWS_AS(eigen_residual(parent.state, SqueezeParam(cplx{1.0, 0.0}), 0), SingularParameterError);
}

TEST_CASE("eigen residual grows as the band limit is cut")
{
    // L3 acts within each shell; the residual leaves rounding level once aliasing from
    // shells beyond the projection grid reaches the kept shells.
    const WavepacketSpec spec{eta_half, 20.0, 1, 1.0};
    const int L = auto_lmax(spec);
    double prev_tail = -1.0, prev_res = 0.0;
    for (int l = L; l >= 6; l /= 2) {
        const auto st = build_state(spec, l, {1e-10, false});
        const double res = eigen_residual(st, eta_half, 1).residual;
        CAPTURE(l);
        CHECK(st.tail_mass() > prev_tail);
        CHECK((res > prev_res || std::max(res, prev_res) < 1e-13));
        prev_tail = st.tail_mass();
        prev_res = res;
    }
    CHECK(prev_res > 1e-8);
}
