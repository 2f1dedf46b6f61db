#ifndef SQZROT_OBSERVABLES_HPP
#define SQZROT_OBSERVABLES_HPP

#include "sqzrot/states.hpp"

#include <array>
#include <optional>

namespace sqzrot {

/// Angular momentum statistics of a unit-norm state.
///
/// covariance_term and product_rhs_bracket follow the printed form
///   |<{Lx,Ly}> - <Lx><Ly>|  and  1/4 [<Lz>^2 + covariance_term^2],
/// without the factor 1/2 on the anticommutator that the Schroedinger-Robertson
/// relation carries. schroedinger_rhs holds that textbook form for comparison.
struct ObservableReport {
    std::array<double, 3> mean_L{};
    double var_Lx = 0;
    double var_Ly = 0;
    double var_Lz = 0;
    double anticom_xy = 0;
    double covariance_term = 0;
    double squeeze_ratio = 0;  ///< var_Lx / var_Ly; NaN if var_Ly vanishes
    double product_lhs = 0;
    double product_rhs_bracket = 0;
    std::optional<double> product_rhs_alpha;  ///< 1/4 <Lz>^2 / cos^2(alpha); empty until an eta is known
    double schroedinger_rhs = 0;
    double robertson_rhs = 0;  ///< 1/4 <Lz>^2
    double max_imag = 0;       ///< largest imaginary part seen among the moments
};

ObservableReport measure(const SphericalState& state);

/// measure() plus the alpha-dependent right-hand side for this eta.
ObservableReport measure(const SphericalState& state, const SqueezeParam& eta);

/// |squeeze_ratio - |eta|^2|. Throws UndefinedRatioError if var_Ly < 1e-14.
double check_squeezing(const ObservableReport& report, const SqueezeParam& eta);

struct UncertaintyDeviation {
    double dev_bracket = 0;
    std::optional<double> dev_alpha;  ///< empty when cos(alpha) = 0
};

UncertaintyDeviation check_uncertainty_product(const ObservableReport& report, const SqueezeParam& eta);

/// eta (N coth 2N - 1/2), the closed-form <Lz> of the parent for real eta.
double parent_mean_Lz(double eta, double N);

} // namespace sqzrot

#endif
