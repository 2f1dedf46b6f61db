#ifndef SQZROT_HARMONICS_HPP
#define SQZROT_HARMONICS_HPP

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace sqzrot {

/// Packed position of (l, m), 0 <= m <= l, in a triangular table.
constexpr std::size_t tri_index(int l, int m)
{
    return static_cast<std::size_t>(l) * (l + 1) / 2 + m;
}

/// Position of (l, m), -l <= m <= l, in a coefficient table ordered by l then m.
constexpr std::size_t lm_index(int l, int m)
{
    return static_cast<std::size_t>(l) * l + l + m;
}

/// Number of (l, m) pairs with l <= l_max.
constexpr std::size_t lm_count(int l_max)
{
    return static_cast<std::size_t>(l_max + 1) * (l_max + 1);
}

/// Fully normalized associated Legendre function with Condon-Shortley phase.
///
/// Normalized so that Y_l^m(theta, phi) = P(l, m, cos theta) e^{i m phi} / sqrt(2 pi),
/// i.e. the integral of P^2 over [-1, 1] is one. Negative orders follow
/// P_l^{-m} = (-1)^m P_l^m. Evaluated with the upward recurrence in l seeded by
/// the sectoral term, which stays finite for l well beyond 500.
/// Throws DomainError if |m| > l, l < 0 or |x| > 1.
double assoc_legendre_normalized(int l, int m, double x);

/// Orthonormal spherical harmonic Y_l^m(theta, phi), Condon-Shortley phase included.
std::complex<double> sph_harm(int l, int m, double theta, double phi);

/// Precomputed coefficients of the normalized recurrence up to a band limit.
///
/// column() fills P_l^m(x) for l = m..l_max, m >= 0, using
///   P_l^m = a_lm (x P_{l-1}^m - P_{l-2}^m / a_{l-1,m}).
class LegendreRecurrence {
public:
    explicit LegendreRecurrence(int l_max);

    int l_max() const { return l_max_; }

    /// out must hold l_max - m + 1 values; out[j] = P_{m+j}^m(x).
    void column(int m, double x, std::span<double> out) const;

private:
    int l_max_;
    std::vector<double> sectoral_;  // sqrt((2k+1)/(2k)), k = 1..l_max
    std::vector<double> a_;         // a_lm, packed by tri_index
    std::vector<double> inv_a_;     // 1 / a_{l-1,m}, packed by tri_index(l, m)
};

/// Gauss-Legendre rule on [-1, 1]: nodes strictly increasing, weights positive.
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Newton iteration on P_n from Chebyshev-type initial guesses.
GaussLegendreRule gauss_legendre(int n);

/// Product quadrature on the unit sphere: Gauss-Legendre in x = cos(theta) times the
/// uniform trapezoid rule in phi. Immutable once built.
struct SphereGrid {
    int l_max = 0;  ///< band limit the grid integrates exactly (pairwise products)
    int n_theta = 0;
    int n_phi = 0;
    std::vector<double> nodes_x;
    std::vector<double> weights_x;
    double phi_step = 0.0;

    double theta(int i) const;
    double phi(int j) const { return phi_step * j; }
    /// Full area weight of node (i, j).
    double weight(int i) const { return weights_x[static_cast<std::size_t>(i)] * phi_step; }
    std::size_t size() const { return static_cast<std::size_t>(n_theta) * n_phi; }
};

/// Grid that integrates Y_{l'm'}^* Y_{lm} exactly for l, l' <= l_max:
/// l_max + 1 Gauss-Legendre nodes and 2 l_max + 1 azimuthal nodes.
SphereGrid build_grid(int l_max);

/// Grid with explicit node counts; band limit is the largest l_max they support.
SphereGrid build_grid(int n_theta, int n_phi);

} // namespace sqzrot

#endif
