#include "doctest.h"
#include "oracles.hpp"

#include "sqzrot/dynamics.hpp"
#include "sqzrot/error.hpp"

#include <random>

using namespace sqzrot;

namespace {

const SphericalState& clone_parent()
{
    static const SphericalState st = auto_build({SqueezeParam(cplx{1.0, 0.0}), 20.0, 0, 1.0}).state;
    return st;
}

double fidelity_at_third(double eta)
{
    const auto st = auto_build({SqueezeParam(cplx{eta, 0.0}), 20.0, 0, 1.0}).state;
    return clone_fidelity(st, evolve_revivals(st, 1.0 / 3.0), 3, detection_grid(st.l_max()));
}

} // namespace

TEST_CASE("rigid rotor evolution")
{
    const double omega0 = 1.7;
    const SphericalState st(10, oracle::random_coeffs(10, 41));
    CHECK(std::abs(inner(st, evolve(st, 0.0, omega0)) - 1.0) < 1e-15);
    const double T = revival_period(omega0);
    CHECK(T == doctest::Approx(2.0 * oracle::pi / omega0));
    CHECK(std::abs(inner(st, evolve(st, T, omega0)) - 1.0) < 1e-12);
    CHECK(std::abs(inner(st, evolve(st, T / 2, omega0)) - 1.0) < 1e-12);
    CHECK(std::abs(autocorrelation(st, 0.0, omega0) - 1.0) < 1e-15);
    CHECK(std::abs(std::abs(autocorrelation(st, T, omega0)) - 1.0) < 1e-12);
    CHECK_THROWS_AS(revival_period(0.0), DomainError);

    std::mt19937 gen(5);
    std::uniform_real_distribution<double> u(0.0, 3.0 * T);
    for (int i = 0; i < 20; ++i) {
        const double t = u(gen);
        const auto direct = oracle::direct_autocorrelation(st.coeffs(), 10, t, omega0);
        CHECK(std::abs(autocorrelation(st, t, omega0) - direct) < 1e-11);
        CHECK(std::abs(inner(st, evolve(st, t, omega0)) - direct) < 1e-11);
    }
}

TEST_CASE("fractional times")
{
    CHECK(fractional_time(1, 3, 1.0).q_expected == 3);
    CHECK(fractional_time(1, 4, 1.0).q_expected == 2);
    CHECK(fractional_time(1, 10, 1.0).q_expected == 5);
    CHECK(fractional_time(3, 7, 2.0).t == doctest::Approx(3.0 / 7.0 * oracle::pi));
    CHECK_THROWS_AS(fractional_time(2, 4, 1.0), DomainError);
    CHECK_THROWS_AS(fractional_time(0, 3, 1.0), DomainError);
    CHECK_THROWS_AS(fractional_time(1, 1, 1.0), DomainError);
}

TEST_CASE("density on the sphere")
{
    const auto d0 = density(SphericalState::basis(3, 0, 0), build_grid(5));
    for (double v : d0.values)
        CHECK(v == doctest::Approx(1.0 / (4.0 * oracle::pi)).epsilon(1e-14));
    for (std::size_t i = 1; i < d0.thetas.size(); ++i)
        CHECK(d0.thetas[i] > d0.thetas[i - 1]);

    const SphericalState r(12, oracle::random_coeffs(12, 17));
    CHECK(integrate(density(r, build_grid(12))) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK_THROWS_AS(density(r, build_grid(11)), BandLimitError);

    const auto& st = clone_parent();
    const auto d = density(st, detection_grid(st.l_max()));
    const auto peak = std::max_element(d.values.begin(), d.values.end()) - d.values.begin();
    const double theta = d.thetas[static_cast<std::size_t>(peak) / d.phis.size()];
    double phi = d.phis[static_cast<std::size_t>(peak) % d.phis.size()];
    if (phi > oracle::pi)
        phi -= 2.0 * oracle::pi;
    CHECK(std::abs(theta - oracle::pi / 2) < 0.05);
    CHECK(std::abs(phi) < 0.05);

    const auto ax = packet_axis(d);
    CHECK(std::abs(ax[0]) > 0.99);
}

TEST_CASE("density about a rotated axis")
{
    const SphericalState r(8, oracle::random_coeffs(8, 23));
    const auto g = build_grid(16);
    const auto d = density_about(r, {0.0, 0.0, 1.0}, g);
    CHECK(integrate(d) == doctest::Approx(1.0).epsilon(1e-12));
    const auto tilted = density_about(r, {0.6, 0.0, 0.8}, g);
    CHECK(integrate(tilted) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("packet counting in the clone and ring regimes")
{
    const auto& st = clone_parent();
    const auto g = detection_grid(st.l_max());
    CHECK(count_packets(st, g).count == 1);
    const auto third = count_packets(evolve_revivals(st, 1.0 / 3.0), g);
    CHECK(third.outcome == PacketOutcome::lobes);
    CHECK(third.count == 3);
    CHECK(count_packets(evolve_revivals(st, 0.25), g).count == 2);
    CHECK(count_packets(evolve_revivals(st, 0.1), g).count == 5);

    const auto ring = auto_build({SqueezeParam(cplx{0.0, 0.0}), 20.0, 0, 1.0}).state;
    const auto pr = count_packets(evolve_revivals(ring, 1.0 / 3.0), detection_grid(ring.l_max()));
    CHECK(pr.outcome == PacketOutcome::ring);
    CHECK(pr.count == 0);
}

TEST_CASE("clone fidelity")
{
    const auto& st = clone_parent();
    const auto g = detection_grid(st.l_max());
    CHECK(clone_fidelity(st, st, 1, g) == doctest::Approx(1.0).epsilon(1e-10));
    const double f1 = fidelity_at_third(1.0);
    const double f25 = fidelity_at_third(0.25);
    CHECK(f1 > 0.99);
    CHECK(f25 < f1);
    CHECK_THROWS_AS(clone_fidelity(st, evolve_revivals(st, 1.0 / 3.0), 2, g), CountMismatchError);
}

TEST_CASE("revival scans")
{
    const WavepacketSpec spec{SqueezeParam(cplx{1.0, 0.0}), 20.0, 0, 1.0};
    const auto half = scan_revivals(clone_parent(), spec, {0.0, 1.0}, {{1, 2}});
    REQUIRE(half.events.size() == 1);
    CHECK(half.events[0].q_expected == 1);
    CHECK(half.events[0].abs_A == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(half.samples[1].abs_A == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_FALSE(half.events[0].best_effort);

    const auto split = scan_revivals(clone_parent(), spec, {0.0}, {{1, 3}, {1, 4}});
    REQUIRE(split.events.size() == 2);
    CHECK(split.events[0].q_detected == 3);
    CHECK(split.events[1].q_detected == 2);
    CHECK(split.events[0].clone_fidelity.has_value());

    const auto none = scan_revivals(clone_parent(), spec, {0.0, 0.5, 1.0}, {});
    CHECK(none.events.empty());
    CHECK(none.samples.size() == 3);
    CHECK(none.T_rev == doctest::Approx(2.0 * oracle::pi));

    CHECK_THROWS_AS(scan_revivals(clone_parent(), spec, {0.0}, {{2, 6}}), DomainError);
}

TEST_CASE("scan results do not depend on the thread count")
{
    const WavepacketSpec spec{SqueezeParam(cplx{0.5, 0.0}), 20.0, 0, 1.0};
    const auto st = auto_build(spec).state;
    std::vector<double> taus;
    for (int i = 0; i <= 40; ++i)
        taus.push_back(i / 40.0);
    const int saved = kernels::max_threads();
    kernels::set_threads(1);
    const auto a = scan_revivals(st, spec, taus, {{1, 3}});
    kernels::set_threads(3);
    const auto b = scan_revivals(st, spec, taus, {{1, 3}});
    kernels::set_threads(saved);
    for (std::size_t i = 0; i < taus.size(); ++i)
        CHECK(a.samples[i].abs_A == b.samples[i].abs_A);
    CHECK(*a.events[0].clone_fidelity == *b.events[0].clone_fidelity);
}
