#include "doctest.h"
#include "oracles.hpp"

#include "sqzrot/error.hpp"
#include "sqzrot/observables.hpp"

using namespace sqzrot;

namespace {

SphericalState parent(cplx eta, double N)
{
    const SqueezeParam q(eta);
    return auto_build({q, N, 0, 1.0}).state;
}

} // namespace

TEST_CASE("moments agree with dense matrices")
{
    const int L = 8;
    const SphericalState st(L, oracle::random_coeffs(L, 31));
    const auto full = oracle::full_angmom(L);
    const Eigen::VectorXcd v = oracle::to_vector(st.coeffs());
    const auto r = measure(st);
    const double mx = oracle::expectation(full.Lx, v).real();
    const double my = oracle::expectation(full.Ly, v).real();
    const double mz = oracle::expectation(full.Lz, v).real();
    CHECK(r.mean_L[0] == doctest::Approx(mx).epsilon(1e-12));
    CHECK(r.mean_L[1] == doctest::Approx(my).epsilon(1e-12));
    CHECK(r.mean_L[2] == doctest::Approx(mz).epsilon(1e-12));
    CHECK(r.var_Lx == doctest::Approx(oracle::expectation(full.Lx * full.Lx, v).real() - mx * mx).epsilon(1e-12));
    CHECK(r.var_Ly == doctest::Approx(oracle::expectation(full.Ly * full.Ly, v).real() - my * my).epsilon(1e-12));
    CHECK(r.var_Lz == doctest::Approx(oracle::expectation(full.Lz * full.Lz, v).real() - mz * mz).epsilon(1e-12));
    const double anti = oracle::expectation(full.Lx * full.Ly + full.Ly * full.Lx, v).real();
    CHECK(r.anticom_xy == doctest::Approx(anti).epsilon(1e-12));
    CHECK(r.covariance_term == doctest::Approx(std::abs(anti - mx * my)).epsilon(1e-12));
    CHECK(r.robertson_rhs == doctest::Approx(0.25 * mz * mz).epsilon(1e-12));
    CHECK(r.schroedinger_rhs == doctest::Approx(0.25 * mz * mz + std::pow(0.5 * anti - mx * my, 2)).epsilon(1e-12));
    CHECK(r.max_imag < 1e-12);
    CHECK_FALSE(r.product_rhs_alpha.has_value());
}

TEST_CASE("pure Y00 has vanishing moments")
{
    const auto r = measure(SphericalState::basis(4, 0, 0));
    for (double m : r.mean_L)
        CHECK(m == 0.0);
    CHECK(r.var_Lx == 0.0);
    CHECK_THROWS_AS(check_squeezing(r, SqueezeParam(cplx{0.5, 0.0})), UndefinedRatioError);
}

TEST_CASE("parent mean angular momentum follows the closed form")
{
    const auto r1 = measure(parent({1.0, 0.0}, 20.0));
    CHECK(std::abs(r1.mean_L[2] - 19.5) < 1e-8);
    CHECK(parent_mean_Lz(1.0, 20.0) == doctest::Approx(19.5).epsilon(1e-15));

    const auto r2 = measure(parent({0.5, 0.0}, 5.0));
    CHECK(std::abs(r2.mean_L[2] - 0.5 * (5.0 / std::tanh(10.0) - 0.5)) < 1e-8);

    const auto r0 = measure(parent({0.0, 0.0}, 7.0));
    CHECK(r0.mean_L[0] > 0.0);
    CHECK(std::abs(r0.mean_L[1]) < 1e-12);
    CHECK(std::abs(r0.mean_L[2]) < 1e-12);
}

TEST_CASE("squeezing ratio equals |eta|^2")
{
    const SqueezeParam one(cplx{1.0, 0.0});
    CHECK(check_squeezing(measure(parent({1.0, 0.0}, 20.0)), one) < 1e-6);
    const SqueezeParam half(cplx{0.5, 0.0});
    const auto r = measure(parent({0.5, 0.0}, 20.0));
    CHECK(r.squeeze_ratio == doctest::Approx(0.25).epsilon(1e-6));
    CHECK(check_squeezing(r, half) < 1e-6);
    const auto tilted = SqueezeParam::from_polar(1.0, oracle::pi / 4);
    const auto rt = measure(auto_build({tilted, 20.0, 0, 1.0}).state, tilted);
    CHECK(rt.squeeze_ratio == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("uncertainty products")
{
    for (double e : {0.25, 0.5, 1.0}) {
        const SqueezeParam q(cplx{e, 0.0});
        const auto r = measure(parent({e, 0.0}, 20.0), q);
        CAPTURE(e);
        CHECK(std::abs(r.product_lhs - 0.25 * r.mean_L[2] * r.mean_L[2]) < 1e-8);
        const auto dev = check_uncertainty_product(r, q);
        CHECK(dev.dev_bracket < 1e-8);
        REQUIRE(dev.dev_alpha.has_value());
        CHECK(*dev.dev_alpha < 1e-8);
    }

    const auto tilted = SqueezeParam::from_polar(1.0, oracle::pi / 4);
    const auto rt = measure(auto_build({tilted, 20.0, 0, 1.0}).state, tilted);
    REQUIRE(rt.product_rhs_alpha.has_value());
    CHECK(*rt.product_rhs_alpha == doctest::Approx(0.5 * rt.mean_L[2] * rt.mean_L[2]).epsilon(1e-12));
    CHECK(rt.product_lhs >= rt.robertson_rhs);

    const SqueezeParam zero(cplx{0.0, 0.0});
    const auto rz = measure(parent({0.0, 0.0}, 20.0), zero);
    CHECK(std::abs(rz.mean_L[2]) < 1e-10);
    CHECK(rz.product_lhs >= rz.robertson_rhs);

    const auto vertical = SqueezeParam::from_polar(0.5, oracle::pi / 2);
    const auto rv = measure(auto_build({vertical, 20.0, 0, 1.0}).state, vertical);
    CHECK_FALSE(check_uncertainty_product(rv, vertical).dev_alpha.has_value());
}
