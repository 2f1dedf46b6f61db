#include "sqzrot/harmonics.hpp"

#include "sqzrot/error.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace sqzrot {

namespace {

void check_lm(int l, int m)
{
    if (l < 0 || m > l || m < -l)
        throw DomainError("associated Legendre: need 0 <= |m| <= l, got l=" + std::to_string(l) +
                          " m=" + std::to_string(m));
}

} // namespace

LegendreRecurrence::LegendreRecurrence(int l_max) : l_max_(l_max)
{
    if (l_max < 0)
        throw DomainError("LegendreRecurrence: negative band limit");
    sectoral_.resize(static_cast<std::size_t>(l_max) + 1, 0.0);
    for (int k = 1; k <= l_max; ++k)
        sectoral_[k] = std::sqrt((2.0 * k + 1.0) / (2.0 * k));

    const std::size_t n = tri_index(l_max, l_max) + 1;
    a_.assign(n, 0.0);
    inv_a_.assign(n, 0.0);
    for (int m = 0; m <= l_max; ++m) {
        for (int l = m + 1; l <= l_max; ++l) {
            const double ll = static_cast<double>(l) * l;
            const double mm = static_cast<double>(m) * m;
            a_[tri_index(l, m)] = std::sqrt((4.0 * ll - 1.0) / (ll - mm));
        }
        for (int l = m + 2; l <= l_max; ++l)
            inv_a_[tri_index(l, m)] = 1.0 / a_[tri_index(l - 1, m)];
    }
}

void LegendreRecurrence::column(int m, double x, std::span<double> out) const
{
    const double sin_theta = std::sqrt(std::max(0.0, (1.0 - x) * (1.0 + x)));
    double p = 1.0 / std::numbers::sqrt2;
    for (int k = 1; k <= m; ++k)
        p *= -sectoral_[k] * sin_theta;
    out[0] = p;
    if (m == l_max_)
        return;
    double prev = p;
    double cur = x * std::sqrt(2.0 * m + 3.0) * p;
    out[1] = cur;
    for (int l = m + 2; l <= l_max_; ++l) {
        const std::size_t t = tri_index(l, m);
        const double next = a_[t] * (x * cur - prev * inv_a_[t]);
        prev = cur;
        cur = next;
        out[static_cast<std::size_t>(l - m)] = cur;
    }
}

double assoc_legendre_normalized(int l, int m, double x)
{
    check_lm(l, m);
    if (!(std::abs(x) <= 1.0))
        throw DomainError("associated Legendre: |x| > 1");
    const int am = std::abs(m);

    const double sin_theta = std::sqrt(std::max(0.0, (1.0 - x) * (1.0 + x)));
    double p = 1.0 / std::numbers::sqrt2;
    for (int k = 1; k <= am; ++k)
        p *= -std::sqrt((2.0 * k + 1.0) / (2.0 * k)) * sin_theta;

    double value = p;
    if (l > am) {
        double prev = p;
        double cur = x * std::sqrt(2.0 * am + 3.0) * p;
        double a_prev = std::sqrt(2.0 * am + 3.0);  // a_{am+1, am}
        const double mm = static_cast<double>(am) * am;
        for (int ll = am + 2; ll <= l; ++ll) {
            const double l2 = static_cast<double>(ll) * ll;
            const double a = std::sqrt((4.0 * l2 - 1.0) / (l2 - mm));
            const double next = a * (x * cur - prev / a_prev);
            prev = cur;
            cur = next;
            a_prev = a;
        }
        value = cur;
    }
    if (m < 0 && (am % 2) == 1)
        value = -value;
    return value;
}

std::complex<double> sph_harm(int l, int m, double theta, double phi)
{
    const double p = assoc_legendre_normalized(l, m, std::cos(theta));
    const double scale = p / std::sqrt(2.0 * std::numbers::pi);
    return {scale * std::cos(m * phi), scale * std::sin(m * phi)};
}

GaussLegendreRule gauss_legendre(int n)
{
    if (n < 1)
        throw DomainError("gauss_legendre: need at least one node");
    GaussLegendreRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));

    // Roots are symmetric; solve for the positive half and mirror.
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) <= 1e-15)
                break;
        }
        // Refresh the derivative at the converged root for the weight.
        double p0 = 1.0;
        double p1 = x;
        for (int j = 2; j <= n; ++j) {
            const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
        rule.nodes[static_cast<std::size_t>(i)] = -x;
        rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
        rule.weights[static_cast<std::size_t>(i)] = w;
    }
    if (n % 2 == 1)
        rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
    return rule;
}

double SphereGrid::theta(int i) const
{
    return std::acos(nodes_x[static_cast<std::size_t>(i)]);
}

SphereGrid build_grid(int n_theta, int n_phi)
{
    if (n_theta < 1 || n_phi < 1)
        throw DomainError("build_grid: node counts must be positive");
    SphereGrid grid;
    grid.n_theta = n_theta;
    grid.n_phi = n_phi;
    auto rule = gauss_legendre(n_theta);
    grid.nodes_x = std::move(rule.nodes);
    grid.weights_x = std::move(rule.weights);
    grid.phi_step = 2.0 * std::numbers::pi / n_phi;
    grid.l_max = std::min(n_theta - 1, (n_phi - 1) / 2);
    return grid;
}

SphereGrid build_grid(int l_max)
{
    if (l_max < 0)
        throw DomainError("build_grid: negative band limit");
    return build_grid(l_max + 1, 2 * l_max + 1);
}

} // namespace sqzrot
