#include "sqzrot/kernels.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sqzrot {

cplx rotor_phase(int l, double tau)
{
    // Reduce l(l+1) tau modulo one in extended precision so integer and
    // half-integer tau give exact unit phases.
    const long double turns = static_cast<long double>(l) * (l + 1) * static_cast<long double>(tau);
    const long double frac = turns - std::floor(turns);
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(frac);
    return {std::cos(angle), std::sin(angle)};
}

namespace kernels {

namespace {

const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

std::vector<cplx> twiddles(int n_phi, double phi_step)
{
    std::vector<cplx> tw(static_cast<std::size_t>(n_phi));
    for (int k = 0; k < n_phi; ++k)
        tw[static_cast<std::size_t>(k)] = {std::cos(k * phi_step), std::sin(k * phi_step)};
    return tw;
}

std::size_t wrap(std::int64_t m, std::int64_t j, std::int64_t n)
{
    std::int64_t r = (m * j) % n;
    if (r < 0)
        r += n;
    return static_cast<std::size_t>(r);
}

// Per-output work units shared by the serial and OpenMP drivers.

void synthesize_row(int i, std::span<const cplx> coeffs, int l_max, const SphereGrid& grid,
                    const LegendreRecurrence& rec, std::span<const cplx> tw,
                    std::span<cplx> row_out)
{
    const double x = grid.nodes_x[static_cast<std::size_t>(i)];
    std::vector<double> col(static_cast<std::size_t>(l_max) + 1);
    std::vector<cplx> fm(2 * static_cast<std::size_t>(l_max) + 1);
    for (int m = 0; m <= l_max; ++m) {
        rec.column(m, x, col);
        cplx pos{0.0, 0.0};
        cplx neg{0.0, 0.0};
        for (int l = m; l <= l_max; ++l) {
            const double p = col[static_cast<std::size_t>(l - m)];
            pos += coeffs[lm_index(l, m)] * p;
            if (m > 0)
                neg += coeffs[lm_index(l, -m)] * p;
        }
        fm[static_cast<std::size_t>(l_max + m)] = pos;
        if (m > 0)
            fm[static_cast<std::size_t>(l_max - m)] = (m % 2 == 0) ? neg : -neg;
    }
    for (int j = 0; j < grid.n_phi; ++j) {
        cplx acc{0.0, 0.0};
        for (int m = -l_max; m <= l_max; ++m)
            acc += fm[static_cast<std::size_t>(l_max + m)] * tw[wrap(m, j, grid.n_phi)];
        row_out[static_cast<std::size_t>(j)] = acc * inv_sqrt_2pi;
    }
}

void fourier_row(int i, std::span<const cplx> values, const SphereGrid& grid, int l_max,
                 std::span<const cplx> tw, std::span<cplx> out)
{
    const std::size_t base = static_cast<std::size_t>(i) * grid.n_phi;
    for (int m = -l_max; m <= l_max; ++m) {
        cplx acc{0.0, 0.0};
        for (int j = 0; j < grid.n_phi; ++j)
            acc += values[base + static_cast<std::size_t>(j)] * std::conj(tw[wrap(m, j, grid.n_phi)]);
        out[static_cast<std::size_t>(l_max + m)] = acc * grid.phi_step;
    }
}

void legendre_order(int m, const std::vector<cplx>& fourier, const SphereGrid& grid, int l_max,
                    const LegendreRecurrence& rec, std::span<cplx> coeffs)
{
    const std::size_t width = 2 * static_cast<std::size_t>(l_max) + 1;
    std::vector<double> col(static_cast<std::size_t>(l_max) + 1);
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    for (int i = 0; i < grid.n_theta; ++i) {
        rec.column(m, grid.nodes_x[static_cast<std::size_t>(i)], col);
        const double w = grid.weights_x[static_cast<std::size_t>(i)] * inv_sqrt_2pi;
        const cplx fp = fourier[static_cast<std::size_t>(i) * width + static_cast<std::size_t>(l_max + m)] * w;
        const cplx fn = fourier[static_cast<std::size_t>(i) * width + static_cast<std::size_t>(l_max - m)] * (w * sign);
        for (int l = m; l <= l_max; ++l) {
            const double p = col[static_cast<std::size_t>(l - m)];
            coeffs[lm_index(l, m)] += fp * p;
            if (m > 0)
                coeffs[lm_index(l, -m)] += fn * p;
        }
    }
}

cplx evaluate_point(std::span<const cplx> coeffs, int l_max, const LegendreRecurrence& rec, double x,
                    double phi, std::span<double> col)
{
    cplx acc{0.0, 0.0};
    for (int m = 0; m <= l_max; ++m) {
        rec.column(m, x, col);
        cplx pos{0.0, 0.0};
        cplx neg{0.0, 0.0};
        for (int l = m; l <= l_max; ++l) {
            const double p = col[static_cast<std::size_t>(l - m)];
            pos += coeffs[lm_index(l, m)] * p;
            if (m > 0)
                neg += coeffs[lm_index(l, -m)] * p;
        }
        const cplx e{std::cos(m * phi), std::sin(m * phi)};
        acc += pos * e;
        if (m > 0)
            acc += ((m % 2 == 0) ? neg : -neg) * std::conj(e);
    }
    return acc * inv_sqrt_2pi;
}

void combo_shell(int l, const LadderCombo& op, std::span<const cplx> in, std::span<cplx> out)
{
    const double ll = static_cast<double>(l) * (l + 1);
    for (int m = -l; m <= l; ++m) {
        cplx acc = (op.identity + op.z * static_cast<double>(m)) * in[lm_index(l, m)];
        if (m > -l)  // L_+ brings m-1 up to m
            acc += op.raise * std::sqrt(ll - static_cast<double>(m - 1) * m) * in[lm_index(l, m - 1)];
        if (m < l)  // L_- brings m+1 down to m
            acc += op.lower * std::sqrt(ll - static_cast<double>(m + 1) * m) * in[lm_index(l, m + 1)];
        out[lm_index(l, m)] = acc;
    }
}

cplx trace_sample(std::span<const double> shell_weights, double tau)
{
    cplx acc{0.0, 0.0};
    for (std::size_t l = 0; l < shell_weights.size(); ++l)
        acc += shell_weights[l] * rotor_phase(static_cast<int>(l), tau);
    return acc;
}

} // namespace

namespace serial {

std::vector<cplx> synthesize(std::span<const cplx> coeffs, int l_max, const SphereGrid& grid)
{
    const LegendreRecurrence rec(l_max);
    const auto tw = twiddles(grid.n_phi, grid.phi_step);
    std::vector<cplx> out(grid.size());
    for (int i = 0; i < grid.n_theta; ++i)
        synthesize_row(i, coeffs, l_max, grid, rec, tw,
                       std::span<cplx>(out).subspan(static_cast<std::size_t>(i) * grid.n_phi, grid.n_phi));
    return out;
}

Coeffs analyze(std::span<const cplx> values, const SphereGrid& grid, int l_max)
{
    const LegendreRecurrence rec(l_max);
    const auto tw = twiddles(grid.n_phi, grid.phi_step);
    const std::size_t width = 2 * static_cast<std::size_t>(l_max) + 1;
    std::vector<cplx> fourier(static_cast<std::size_t>(grid.n_theta) * width);
    for (int i = 0; i < grid.n_theta; ++i)
        fourier_row(i, values, grid, l_max, tw, std::span<cplx>(fourier).subspan(i * width, width));
    Coeffs coeffs(lm_count(l_max));
    for (int m = 0; m <= l_max; ++m)
        legendre_order(m, fourier, grid, l_max, rec, coeffs);
    return coeffs;
}

std::vector<cplx> evaluate(std::span<const cplx> coeffs, int l_max, std::span<const double> cos_thetas,
                           std::span<const double> phis)
{
    const LegendreRecurrence rec(l_max);
    std::vector<double> col(static_cast<std::size_t>(l_max) + 1);
    std::vector<cplx> out(cos_thetas.size());
    for (std::size_t p = 0; p < out.size(); ++p)
        out[p] = evaluate_point(coeffs, l_max, rec, cos_thetas[p], phis[p], col);
    return out;
}

Coeffs apply_combo(const LadderCombo& op, std::span<const cplx> coeffs, int l_max)
{
    Coeffs out(lm_count(l_max));
    for (int l = 0; l <= l_max; ++l)
        combo_shell(l, op, coeffs, out);
    return out;
}

std::vector<cplx> autocorrelation_trace(std::span<const double> shell_weights,
                                        std::span<const double> taus)
{
    std::vector<cplx> out(taus.size());
    for (std::size_t s = 0; s < taus.size(); ++s)
        out[s] = trace_sample(shell_weights, taus[s]);
    return out;
}

} // namespace serial

namespace omp {

std::vector<cplx> synthesize(std::span<const cplx> coeffs, int l_max, const SphereGrid& grid)
{
    const LegendreRecurrence rec(l_max);
    const auto tw = twiddles(grid.n_phi, grid.phi_step);
    std::vector<cplx> out(grid.size());
#pragma omp parallel for schedule(static)
    for (int i = 0; i < grid.n_theta; ++i)
        synthesize_row(i, coeffs, l_max, grid, rec, tw,
                       std::span<cplx>(out).subspan(static_cast<std::size_t>(i) * grid.n_phi, grid.n_phi));
    return out;
}

Coeffs analyze(std::span<const cplx> values, const SphereGrid& grid, int l_max)
{
    const LegendreRecurrence rec(l_max);
    const auto tw = twiddles(grid.n_phi, grid.phi_step);
    const std::size_t width = 2 * static_cast<std::size_t>(l_max) + 1;
    std::vector<cplx> fourier(static_cast<std::size_t>(grid.n_theta) * width);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < grid.n_theta; ++i)
        fourier_row(i, values, grid, l_max, tw, std::span<cplx>(fourier).subspan(i * width, width));
    Coeffs coeffs(lm_count(l_max));
#pragma omp parallel for schedule(dynamic, 4)
    for (int m = 0; m <= l_max; ++m)
        legendre_order(m, fourier, grid, l_max, rec, coeffs);
    return coeffs;
}

std::vector<cplx> evaluate(std::span<const cplx> coeffs, int l_max, std::span<const double> cos_thetas,
                           std::span<const double> phis)
{
    const LegendreRecurrence rec(l_max);
    std::vector<cplx> out(cos_thetas.size());
    const auto n = static_cast<std::int64_t>(out.size());
#pragma omp parallel
    {
        std::vector<double> col(static_cast<std::size_t>(l_max) + 1);
#pragma omp for schedule(static)
        for (std::int64_t p = 0; p < n; ++p) {
            const auto i = static_cast<std::size_t>(p);
            out[i] = evaluate_point(coeffs, l_max, rec, cos_thetas[i], phis[i], col);
        }
    }
    return out;
}

Coeffs apply_combo(const LadderCombo& op, std::span<const cplx> coeffs, int l_max)
{
    Coeffs out(lm_count(l_max));
#pragma omp parallel for schedule(dynamic, 8)
    for (int l = 0; l <= l_max; ++l)
        combo_shell(l, op, coeffs, out);
    return out;
}

std::vector<cplx> autocorrelation_trace(std::span<const double> shell_weights,
                                        std::span<const double> taus)
{
    std::vector<cplx> out(taus.size());
    const auto n = static_cast<std::int64_t>(taus.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t s = 0; s < n; ++s)
        out[static_cast<std::size_t>(s)] = trace_sample(shell_weights, taus[static_cast<std::size_t>(s)]);
    return out;
}

} // namespace omp

int max_threads()
{
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void set_threads(int n)
{
#ifdef _OPENMP
    omp_set_num_threads(n);
#else
    (void)n;
#endif
}

} // namespace kernels

} // namespace sqzrot
