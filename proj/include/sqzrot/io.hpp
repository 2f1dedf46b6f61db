#ifndef SQZROT_IO_HPP
#define SQZROT_IO_HPP

#include "sqzrot/dynamics.hpp"
#include "sqzrot/observables.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace sqzrot::io {

/// Parameters of a run as given on the command line.
struct RunConfig {
    double eta_modulus = 1.0;
    double eta_phase_alpha = 0.0;
    double N = 1.0;
    int k = 0;
    double omega0 = 1.0;
    std::optional<int> l_max;       ///< empty: auto_lmax with tail_tol 1e-10
    double grid_oversample = 2.0;   ///< density export band = ceil(oversample * l_max)

    /// Throws DomainError for non-finite fields, |eta| > 1, N <= 0, k < 0,
    /// omega0 <= 0, negative l_max or oversample < 1.
    void validate() const;
    SqueezeParam eta() const;
    WavepacketSpec spec() const;
};

/// Formats with 17 significant digits; non-finite values become null.
std::string format_number(double v);

/// {"l_max": L, "coeffs": [[re, im], ...], "config": {...}} with config optional.
std::string state_json(const SphericalState& state, const std::optional<RunConfig>& config = {});

struct LoadedState {
    SphericalState state;
    std::optional<RunConfig> config;
};

/// Throws FormatError on malformed input.
LoadedState parse_state_json(std::string_view text);

/// Closed-form comparisons available when the generating parameters are known.
struct Deviations {
    std::optional<double> mean_Lz;  ///< |<Lz> - eta (N coth 2N - 1/2)|, real eta and k = 0
    std::optional<double> squeeze;  ///< |var_Lx / var_Ly - |eta|^2|
    std::optional<double> bracket;  ///< |product_lhs - product_rhs_bracket|
    std::optional<double> alpha;    ///< |product_lhs - product_rhs_alpha|
    std::optional<EigenResidual> eigen;
};

Deviations deviations(const SphericalState& state, const ObservableReport& report, const RunConfig& config);

/// Flat JSON object; deviation fields are appended when given.
std::string report_json(const ObservableReport& report, const std::optional<Deviations>& dev = {});

/// theta,phi,density rows, theta outer.
std::string density_csv(const DensityGrid& d);

std::string scan_json(const RevivalScanResult& result, const std::optional<RunConfig>& config = {});

/// Grid used to export the density of a state with band limit l_max.
SphereGrid export_grid(int l_max, double oversample);

} // namespace sqzrot::io

#endif
