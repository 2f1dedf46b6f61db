#include "sqzrot/dynamics.hpp"

#include "sqzrot/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace sqzrot {

double revival_period(double omega0)
{
    if (!(omega0 > 0.0) || !std::isfinite(omega0))
        throw DomainError("omega0 must be positive");
    return 2.0 * std::numbers::pi / omega0;
}

SphericalState evolve_revivals(const SphericalState& state, double tau)
{
    Coeffs c = state.coeffs();
    for (int l = 0; l <= state.l_max(); ++l) {
        const cplx phase = rotor_phase(l, tau);
        for (int m = -l; m <= l; ++m)
            c[lm_index(l, m)] *= phase;
    }
    return {state.l_max(), std::move(c)};
}

SphericalState evolve(const SphericalState& state, double t, double omega0)
{
    return evolve_revivals(state, t / revival_period(omega0));
}

cplx autocorrelation_revivals(const SphericalState& initial, double tau)
{
    const auto w = initial.shell_weights();
    const double taus[1] = {tau};
    return kernels::serial::autocorrelation_trace(w, taus)[0];
}

cplx autocorrelation(const SphericalState& initial, double t, double omega0)
{
    return autocorrelation_revivals(initial, t / revival_period(omega0));
}

FractionalTime fractional_time(int m, int n, double omega0)
{
    if (m < 1 || n < 2)
        throw DomainError("fractional time: need m >= 1 and n >= 2");
    if (std::gcd(m, n) != 1)
        throw DomainError("fractional time: m/n must be in lowest terms, got " + std::to_string(m) + "/" +
                          std::to_string(n));
    FractionalTime f;
    f.tau = static_cast<double>(m) / n;
    f.t = f.tau * revival_period(omega0);
    f.q_expected = (n % 2 == 1) ? n : n / 2;
    return f;
}

DensityGrid density(const SphericalState& state, const SphereGrid& grid)
{
    if (grid.l_max < state.l_max())
        throw BandLimitError("density: grid band limit " + std::to_string(grid.l_max) +
                             " is below the state band limit " + std::to_string(state.l_max()));
    const auto psi = kernels::omp::synthesize(state.coeffs(), state.l_max(), grid);
    DensityGrid d;
    d.thetas.resize(static_cast<std::size_t>(grid.n_theta));
    d.weights.resize(static_cast<std::size_t>(grid.n_theta));
    d.phis.resize(static_cast<std::size_t>(grid.n_phi));
    d.values.resize(grid.size());
    for (int j = 0; j < grid.n_phi; ++j)
        d.phis[static_cast<std::size_t>(j)] = grid.phi(j);
    // Gauss nodes run in increasing x, i.e. decreasing theta.
    for (int r = 0; r < grid.n_theta; ++r) {
        const int i = grid.n_theta - 1 - r;
        d.thetas[static_cast<std::size_t>(r)] = grid.theta(i);
        d.weights[static_cast<std::size_t>(r)] = grid.weight(i);
        for (int j = 0; j < grid.n_phi; ++j)
            d.values[static_cast<std::size_t>(r) * grid.n_phi + j] =
                std::norm(psi[static_cast<std::size_t>(i) * grid.n_phi + j]);
    }
    return d;
}

namespace {

Direction normalized(Direction v)
{
    const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    return {v[0] / n, v[1] / n, v[2] / n};
}

Direction cross(const Direction& a, const Direction& b)
{
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double max_over_mean(const std::vector<double>& v)
{
    const double peak = *std::max_element(v.begin(), v.end());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    return peak / mean;
}

} // namespace

DensityGrid density_about(const SphericalState& state, const Direction& axis, const SphereGrid& grid)
{
    if (grid.l_max < state.l_max())
        throw BandLimitError("density: grid band limit " + std::to_string(grid.l_max) +
                             " is below the state band limit " + std::to_string(state.l_max()));
    const Direction w = normalized(axis);
    // Any unit vector orthogonal to the axis fixes the frame azimuth origin.
    const Direction helper = (std::abs(w[2]) < 0.9) ? Direction{0.0, 0.0, 1.0} : Direction{1.0, 0.0, 0.0};
    const Direction u = normalized(cross(helper, w));
    const Direction v = cross(w, u);

    DensityGrid d;
    d.thetas.resize(static_cast<std::size_t>(grid.n_theta));
    d.weights.resize(static_cast<std::size_t>(grid.n_theta));
    d.phis.resize(static_cast<std::size_t>(grid.n_phi));
    for (int j = 0; j < grid.n_phi; ++j)
        d.phis[static_cast<std::size_t>(j)] = grid.phi(j);
    std::vector<double> cos_t(grid.size());
    std::vector<double> phi(grid.size());
    for (int r = 0; r < grid.n_theta; ++r) {
        const int i = grid.n_theta - 1 - r;
        const double ct = grid.nodes_x[static_cast<std::size_t>(i)];
        const double st = std::sqrt(std::max(0.0, (1.0 - ct) * (1.0 + ct)));
        d.thetas[static_cast<std::size_t>(r)] = grid.theta(i);
        d.weights[static_cast<std::size_t>(r)] = grid.weight(i);
        for (int j = 0; j < grid.n_phi; ++j) {
            const double cp = std::cos(grid.phi(j));
            const double sp = std::sin(grid.phi(j));
            Direction p;
            for (int c = 0; c < 3; ++c)
                p[static_cast<std::size_t>(c)] = st * cp * u[static_cast<std::size_t>(c)] +
                                                 st * sp * v[static_cast<std::size_t>(c)] +
                                                 ct * w[static_cast<std::size_t>(c)];
            const std::size_t idx = static_cast<std::size_t>(r) * grid.n_phi + j;
            cos_t[idx] = std::clamp(p[2], -1.0, 1.0);
            phi[idx] = std::atan2(p[1], p[0]);
        }
    }
    const auto psi = kernels::omp::evaluate(state.coeffs(), state.l_max(), cos_t, phi);
    d.values.resize(grid.size());
    for (std::size_t idx = 0; idx < psi.size(); ++idx)
        d.values[idx] = std::norm(psi[idx]);
    return d;
}

Direction packet_axis(const DensityGrid& d)
{
    const std::size_t n_phi = d.phis.size();
    Eigen::Matrix3d moment = Eigen::Matrix3d::Zero();
    for (std::size_t r = 0; r < d.thetas.size(); ++r) {
        const double st = std::sin(d.thetas[r]);
        const double ct = std::cos(d.thetas[r]);
        for (std::size_t j = 0; j < n_phi; ++j) {
            const Eigen::Vector3d p(st * std::cos(d.phis[j]), st * std::sin(d.phis[j]), ct);
            moment += (d.weights[r] * d.values[r * n_phi + j]) * (p * p.transpose());
        }
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(moment);
    const Eigen::Vector3d ev = eig.eigenvalues();  // ascending
    const int pick = (ev(1) - ev(0) > ev(2) - ev(1)) ? 0 : 2;
    const Eigen::Vector3d a = eig.eigenvectors().col(pick);
    return {a(0), a(1), a(2)};
}

double integrate(const DensityGrid& d)
{
    const std::size_t n_phi = d.phis.size();
    double total = 0.0;
    for (std::size_t r = 0; r < d.thetas.size(); ++r) {
        double row = 0.0;
        for (std::size_t j = 0; j < n_phi; ++j)
            row += d.values[r * n_phi + j];
        total += d.weights[r] * row;
    }
    return total;
}

std::vector<double> azimuthal_profile(const DensityGrid& d)
{
    const std::size_t n_phi = d.phis.size();
    std::vector<double> rho(n_phi, 0.0);
    for (std::size_t r = 0; r < d.thetas.size(); ++r)
        for (std::size_t j = 0; j < n_phi; ++j)
            rho[j] += d.weights[r] * d.values[r * n_phi + j];
    return rho;
}

SphereGrid detection_grid(int l_max)
{
    return build_grid(std::max(2 * l_max, 32));
}

PacketCount count_packets(const SphericalState& state_t, const SphereGrid& grid, double threshold_frac)
{
    if (!(threshold_frac > 0.0 && threshold_frac < 1.0))
        throw DomainError("count_packets: threshold fraction must lie in (0, 1)");
    PacketCount out;
    const DensityGrid lab = density(state_t, grid);
    out.profile = azimuthal_profile(lab);
    const auto& rho = out.profile;
    const int n = static_cast<int>(rho.size());
    const double peak = *std::max_element(rho.begin(), rho.end());
    out.flatness = max_over_mean(rho);
    if (out.flatness < ring_flatness) {
        out.outcome = PacketOutcome::ring;
        return out;
    }

    out.axis = packet_axis(lab);
    const DensityGrid framed = density_about(state_t, out.axis, grid);
    std::vector<double> band(framed.phis.size(), 0.0);
    double band_mass = 0.0;
    for (std::size_t r = 0; r < framed.thetas.size(); ++r) {
        const double th = framed.thetas[r];
        if (th < ring_cap_angle || th > std::numbers::pi - ring_cap_angle)
            continue;
        for (std::size_t j = 0; j < band.size(); ++j) {
            const double v = framed.weights[r] * framed.values[r * band.size() + j];
            band[j] += v;
            band_mass += v;
        }
    }
    out.band_fraction = band_mass / integrate(framed);
    out.band_flatness = (band_mass > 0.0) ? max_over_mean(band) : 0.0;
    if (out.band_fraction >= ring_min_band_fraction && out.band_flatness < ring_flatness) {
        out.outcome = PacketOutcome::ring;
        return out;
    }
    const double cut = threshold_frac * peak;
    std::vector<char> above(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
        above[static_cast<std::size_t>(j)] = rho[static_cast<std::size_t>(j)] > cut;
    // Start scanning just after a sub-threshold node so runs never straddle the seam.
    int start = 0;
    while (start < n && above[static_cast<std::size_t>(start)])
        ++start;
    if (start == n) {
        out.outcome = PacketOutcome::ring;
        return out;
    }
    for (int step = 1; step <= n; ++step) {
        const int j = (start + step) % n;
        if (!above[static_cast<std::size_t>(j)])
            continue;
        Lobe lobe;
        lobe.first = j;
        lobe.peak = j;
        double sx = 0.0;
        double sy = 0.0;
        int cur = j;
        while (above[static_cast<std::size_t>(cur)]) {
            const double v = rho[static_cast<std::size_t>(cur)];
            if (v > rho[static_cast<std::size_t>(lobe.peak)])
                lobe.peak = cur;
            sx += v * std::cos(2.0 * std::numbers::pi * cur / n);
            sy += v * std::sin(2.0 * std::numbers::pi * cur / n);
            lobe.last = cur;
            cur = (cur + 1) % n;
            ++step;
        }
        lobe.center = std::atan2(sy, sx);
        if (lobe.center < 0.0)
            lobe.center += 2.0 * std::numbers::pi;
        out.lobes.push_back(lobe);
    }
    out.count = static_cast<int>(out.lobes.size());
    return out;
}

} // namespace sqzrot

namespace sqzrot {

namespace {

// Best |<initial| R(delta) lobe>|^2 over rotations about z, with the overlap
// written as the trigonometric polynomial sum_m a_m e^{i m delta}.
double best_rotated_overlap(const SphericalState& initial, const Coeffs& lobe, int l_max)
{
    std::vector<cplx> a(2 * static_cast<std::size_t>(l_max) + 1);
    for (int l = 0; l <= l_max; ++l)
        for (int m = -l; m <= l; ++m)
            a[static_cast<std::size_t>(m + l_max)] += std::conj(initial(l, m)) * lobe[lm_index(l, m)];
    const auto overlap = [&](double delta) {
        cplx acc{0.0, 0.0};
        for (int m = -l_max; m <= l_max; ++m)
            acc += a[static_cast<std::size_t>(m + l_max)] * std::polar(1.0, m * delta);
        return std::norm(acc);
    };

    const int samples = std::max(64, 8 * (2 * l_max + 1));
    const double h = 2.0 * std::numbers::pi / samples;
    int best = 0;
    double best_value = -1.0;
    for (int s = 0; s < samples; ++s) {
        const double v = overlap(s * h);
        if (v > best_value) {
            best_value = v;
            best = s;
        }
    }
    // Golden-section refinement inside the bracketing samples.
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = (best - 1) * h;
    double hi = (best + 1) * h;
    double x1 = hi - g * (hi - lo);
    double x2 = lo + g * (hi - lo);
    double f1 = overlap(x1);
    double f2 = overlap(x2);
    for (int it = 0; it < 80 && hi - lo > 1e-12; ++it) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = overlap(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = overlap(x1);
        }
    }
    return std::max({best_value, f1, f2});
}

double fidelity_from_count(const SphericalState& initial, const SphericalState& state_t, const PacketCount& pc,
                           const SphereGrid& grid)
{
    const int l_max = std::max(initial.l_max(), state_t.l_max());
    const SphericalState init = initial.padded(l_max);
    const SphericalState later = state_t.padded(l_max);
    const int n = static_cast<int>(pc.profile.size());
    const int q = pc.count;

    // Sector of lobe s runs from the profile minimum before it to the one after it.
    std::vector<int> cut_after(static_cast<std::size_t>(q));
    for (int s = 0; s < q; ++s) {
        const Lobe& cur = pc.lobes[static_cast<std::size_t>(s)];
        const Lobe& next = pc.lobes[static_cast<std::size_t>((s + 1) % q)];
        int best = (cur.last + 1) % n;
        for (int j = (cur.last + 1) % n; j != next.first; j = (j + 1) % n)
            if (pc.profile[static_cast<std::size_t>(j)] < pc.profile[static_cast<std::size_t>(best)])
                best = j;
        cut_after[static_cast<std::size_t>(s)] = best;
    }

    const auto psi = kernels::omp::synthesize(later.coeffs(), l_max, grid);
    double fidelity = 0.0;
    for (int s = 0; s < q; ++s) {
        std::vector<cplx> masked(psi.size(), cplx{0.0, 0.0});
        if (q == 1) {
            masked = psi;
        } else {
            const int begin = cut_after[static_cast<std::size_t>((s + q - 1) % q)];
            const int end = cut_after[static_cast<std::size_t>(s)];
            for (int j = begin; j != end; j = (j + 1) % n)
                for (int i = 0; i < grid.n_theta; ++i) {
                    const std::size_t idx = static_cast<std::size_t>(i) * grid.n_phi + static_cast<std::size_t>(j);
                    masked[idx] = psi[idx];
                }
        }
        Coeffs lobe = kernels::omp::analyze(masked, grid, l_max);
        const double nrm = norm(std::span<const cplx>(lobe));
        if (!(nrm > 0.0))
            continue;
        for (auto& c : lobe)
            c /= nrm;
        fidelity = std::max(fidelity, best_rotated_overlap(init, lobe, l_max));
    }
    return std::min(fidelity, 1.0);
}

} // namespace

double clone_fidelity(const SphericalState& initial, const SphericalState& state_t, int q, const SphereGrid& grid,
                      double threshold_frac)
{
    if (q < 1)
        throw DomainError("clone_fidelity: q must be positive");
    const PacketCount pc = count_packets(state_t, grid, threshold_frac);
    if (pc.outcome == PacketOutcome::ring)
        throw CountMismatchError("clone_fidelity: ring outcome, expected " + std::to_string(q) + " lobes");
    if (pc.count != q)
        throw CountMismatchError("clone_fidelity: detected " + std::to_string(pc.count) + " lobes, expected " +
                                 std::to_string(q));
    return fidelity_from_count(initial, state_t, pc, grid);
}

RevivalScanResult scan_revivals(const SphericalState& initial, const WavepacketSpec& spec,
                                const std::vector<double>& taus, const std::vector<std::pair<int, int>>& fractions,
                                double threshold_frac)
{
    spec.validate();
    if (taus.empty())
        throw DomainError("scan_revivals: empty time grid");
    RevivalScanResult out;
    out.omega0 = spec.omega0;
    out.T_rev = revival_period(spec.omega0);
    out.l_max = initial.l_max();

    const auto weights = initial.shell_weights();
    const auto trace = kernels::omp::autocorrelation_trace(weights, taus);
    out.samples.reserve(taus.size());
    for (std::size_t s = 0; s < taus.size(); ++s)
        out.samples.push_back({taus[s] * out.T_rev, taus[s], std::abs(trace[s])});

    const SphereGrid grid = detection_grid(initial.l_max());
    for (const auto& [m, n] : fractions) {
        const FractionalTime ft = fractional_time(m, n, spec.omega0);
        RevivalEvent ev;
        ev.m = m;
        ev.n = n;
        ev.t = ft.t;
        ev.tau = ft.tau;
        ev.q_expected = ft.q_expected;
        ev.threshold_frac = threshold_frac;
        ev.best_effort = spec.k > 0;
        ev.abs_A = std::abs(autocorrelation_revivals(initial, ft.tau));
        const SphericalState later = evolve_revivals(initial, ft.tau);
        const PacketCount pc = count_packets(later, grid, threshold_frac);
        ev.outcome = pc.outcome;
        ev.q_detected = pc.count;
        if (pc.outcome == PacketOutcome::lobes && pc.count == ft.q_expected)
            ev.clone_fidelity = fidelity_from_count(initial, later, pc, grid);
        out.events.push_back(ev);
    }
    return out;
}

RevivalScanResult scan_revivals(const WavepacketSpec& spec, const std::vector<double>& taus,
                                const std::vector<std::pair<int, int>>& fractions, double threshold_frac)
{
    const AutoBuild built = auto_build(spec);
    return scan_revivals(built.state, spec, taus, fractions, threshold_frac);
}

} // namespace sqzrot
