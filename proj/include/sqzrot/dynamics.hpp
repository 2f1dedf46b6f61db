#ifndef SQZROT_DYNAMICS_HPP
#define SQZROT_DYNAMICS_HPP

#include "sqzrot/states.hpp"

#include <array>
#include <optional>
#include <utility>
#include <vector>

namespace sqzrot {

/// T_rev = 2 pi / omega0.
double revival_period(double omega0);

/// Rigid-rotor evolution c_lm(t) = c_lm e^{-i omega0 l(l+1) t}.
SphericalState evolve(const SphericalState& state, double t, double omega0);

/// Same evolution with time given in revival periods, tau = t / T_rev.
SphericalState evolve_revivals(const SphericalState& state, double tau);

/// A(t) = <psi(0)|psi(t)>.
cplx autocorrelation(const SphericalState& initial, double t, double omega0);
cplx autocorrelation_revivals(const SphericalState& initial, double tau);

struct FractionalTime {
    double t = 0;
    double tau = 0;       ///< t / T_rev = m / n
    int q_expected = 0;   ///< n for odd n, n / 2 for even n
};

/// t = (m/n) T_rev. Requires m >= 1, n >= 2, gcd(m, n) = 1; throws DomainError otherwise.
FractionalTime fractional_time(int m, int n, double omega0);

/// |psi|^2 sampled on a grid; thetas ascending, values row-major theta-outer.
struct DensityGrid {
    std::vector<double> thetas;
    std::vector<double> phis;
    std::vector<double> values;
    std::vector<double> weights;  ///< area weight of each theta row (per phi node)
};

/// Throws BandLimitError if grid.l_max < state.l_max().
DensityGrid density(const SphericalState& state, const SphereGrid& grid);

using Direction = std::array<double, 3>;

/// Density on a grid whose polar axis is `axis` (unit vector): thetas and phis are
/// polar and azimuthal angles in that rotated frame.
DensityGrid density_about(const SphericalState& state, const Direction& axis, const SphereGrid& grid);

/// Symmetry axis of a lab-frame density: the eigenvector of the second-moment
/// tensor <r r^T> whose eigenvalue is farthest from the other two.
Direction packet_axis(const DensityGrid& d);

/// Quadrature of the density over the sphere.
double integrate(const DensityGrid& d);

/// rho(phi_j) = sum_i w_i |psi(theta_i, phi_j)|^2.
std::vector<double> azimuthal_profile(const DensityGrid& d);

enum class PacketOutcome { lobes, ring };

struct Lobe {
    int first = 0;   ///< first phi index of the super-threshold run
    int last = 0;    ///< last phi index (may wrap below first)
    int peak = 0;    ///< phi index of the profile maximum inside the run
    double center = 0;  ///< profile-weighted circular mean of the run, radians
};

struct PacketCount {
    PacketOutcome outcome = PacketOutcome::lobes;
    int count = 0;  ///< number of lobes; 0 for a ring
    std::vector<Lobe> lobes;
    std::vector<double> profile;
    double flatness = 0;       ///< max / mean of the azimuthal profile about z
    Direction axis{};          ///< symmetry axis used for the ring test
    double band_fraction = 0;  ///< probability away from the packet axis and its antipode
    double band_flatness = 0;  ///< max / mean of the profile about the packet axis in that band
};

constexpr double default_threshold_frac = 0.5;

/// Below this max/mean ratio the azimuthal profile is treated as a ring.
constexpr double ring_flatness = 10.0 / (2.0 * 3.14159265358979323846);

/// Polar caps (radians) around the packet axis and its antipode left out of the ring test.
constexpr double ring_cap_angle = 3.14159265358979323846 / 8.0;

/// Off-axis probability needed before a flat off-axis profile counts as a ring.
constexpr double ring_min_band_fraction = 0.25;

/// Counts super-threshold runs (circular) of the azimuthal profile about z.
///
/// Two situations give the ring outcome instead of a count: the profile about z is
/// nearly flat (max / mean below ring_flatness), or a substantial share of the
/// probability lies away from the density's symmetry axis and is spread evenly
/// around it (a band encircling that axis).
PacketCount count_packets(const SphericalState& state_t, const SphereGrid& grid,
                          double threshold_frac = default_threshold_frac);

/// Largest squared overlap between the initial state and one of the q lobes of
/// state_t, each lobe cut out, rotated about z back onto the initial packet and
/// renormalized. Throws CountMismatchError if the lobe count is not q.
double clone_fidelity(const SphericalState& initial, const SphericalState& state_t, int q,
                      const SphereGrid& grid, double threshold_frac = default_threshold_frac);

struct RevivalEvent {
    int m = 0;
    int n = 0;
    double t = 0;
    double tau = 0;
    int q_expected = 0;
    int q_detected = 0;
    PacketOutcome outcome = PacketOutcome::lobes;
    std::optional<double> clone_fidelity;  ///< empty when q_detected != q_expected
    double abs_A = 0;
    double threshold_frac = default_threshold_frac;
    bool best_effort = false;  ///< k > 0: packets travel on a tilted orbit
};

struct RevivalSample {
    double t = 0;
    double tau = 0;
    double abs_A = 0;
};

struct RevivalScanResult {
    double omega0 = 1;
    double T_rev = 0;
    int l_max = 0;
    std::vector<RevivalSample> samples;
    std::vector<RevivalEvent> events;
};

/// Builds Psi_{eta k} with auto_lmax, samples |A| at taus (revival periods) and
/// detects the packets at every requested fraction (m, n).
RevivalScanResult scan_revivals(const WavepacketSpec& spec, const std::vector<double>& taus,
                                const std::vector<std::pair<int, int>>& fractions,
                                double threshold_frac = default_threshold_frac);

/// Variant on an already constructed initial state.
RevivalScanResult scan_revivals(const SphericalState& initial, const WavepacketSpec& spec,
                                const std::vector<double>& taus,
                                const std::vector<std::pair<int, int>>& fractions,
                                double threshold_frac = default_threshold_frac);

/// Grid used for detection on a state of band limit l_max.
SphereGrid detection_grid(int l_max);

} // namespace sqzrot

#endif
