#include "sqzrot/observables.hpp"

#include "sqzrot/error.hpp"

#include <cmath>
#include <limits>

namespace sqzrot {

namespace {

// <psi| A B |psi> with the operators applied as successive actions.
cplx expect2(const SphericalState& psi, const Coeffs& b_psi, const LadderCombo& a)
{
    const Coeffs ab = kernels::omp::apply_combo(a, b_psi, psi.l_max());
    return inner(std::span<const cplx>(psi.coeffs()), std::span<const cplx>(ab));
}

std::optional<double> alpha_rhs(double lz, const SqueezeParam& eta)
{
    const double c = std::cos(eta.alpha());
    if (std::abs(c) < 1e-12)
        return std::nullopt;
    return 0.25 * lz * lz / (c * c);
}

} // namespace

ObservableReport measure(const SphericalState& psi)
{
    const std::array<LadderCombo, 3> ops{combo_Lx(), combo_Ly(), combo_Lz()};
    std::array<Coeffs, 3> images;
    ObservableReport r;
    std::array<cplx, 3> mean{};
    for (std::size_t a = 0; a < 3; ++a) {
        images[a] = apply(ops[a], psi);
        mean[a] = inner(std::span<const cplx>(psi.coeffs()), std::span<const cplx>(images[a]));
    }
    const cplx xx = expect2(psi, images[0], ops[0]);
    const cplx yy = expect2(psi, images[1], ops[1]);
    const cplx zz = expect2(psi, images[2], ops[2]);
    const cplx xy = expect2(psi, images[1], ops[0]);  // <Lx Ly>
    const cplx yx = expect2(psi, images[0], ops[1]);  // <Ly Lx>
    const cplx anti = xy + yx;

    double max_imag = 0.0;
    for (const cplx& v : {mean[0], mean[1], mean[2], xx, yy, zz, anti})
        max_imag = std::max(max_imag, std::abs(v.imag()));

    for (std::size_t a = 0; a < 3; ++a)
        r.mean_L[a] = mean[a].real();
    r.var_Lx = std::max(0.0, xx.real() - r.mean_L[0] * r.mean_L[0]);
    r.var_Ly = std::max(0.0, yy.real() - r.mean_L[1] * r.mean_L[1]);
    r.var_Lz = std::max(0.0, zz.real() - r.mean_L[2] * r.mean_L[2]);
    r.anticom_xy = anti.real();
    r.covariance_term = std::abs(r.anticom_xy - r.mean_L[0] * r.mean_L[1]);
    r.squeeze_ratio = (r.var_Ly > 0.0) ? r.var_Lx / r.var_Ly : std::numeric_limits<double>::quiet_NaN();
    r.product_lhs = r.var_Lx * r.var_Ly;
    const double lz2 = r.mean_L[2] * r.mean_L[2];
    r.robertson_rhs = 0.25 * lz2;
    r.product_rhs_bracket = 0.25 * (lz2 + r.covariance_term * r.covariance_term);
    const double cov_sr = 0.5 * r.anticom_xy - r.mean_L[0] * r.mean_L[1];
    r.schroedinger_rhs = 0.25 * lz2 + cov_sr * cov_sr;
    r.max_imag = max_imag;
    return r;
}

ObservableReport measure(const SphericalState& state, const SqueezeParam& eta)
{
    ObservableReport r = measure(state);
    r.product_rhs_alpha = alpha_rhs(r.mean_L[2], eta);
    return r;
}

double check_squeezing(const ObservableReport& report, const SqueezeParam& eta)
{
    if (report.var_Ly < 1e-14)
        throw UndefinedRatioError("squeezing ratio undefined: Var(Ly) vanishes");
    const double target = eta.modulus() * eta.modulus();
    return std::abs(report.var_Lx / report.var_Ly - target);
}

UncertaintyDeviation check_uncertainty_product(const ObservableReport& report, const SqueezeParam& eta)
{
    UncertaintyDeviation d;
    d.dev_bracket = std::abs(report.product_lhs - report.product_rhs_bracket);
    if (const auto rhs = alpha_rhs(report.mean_L[2], eta))
        d.dev_alpha = std::abs(report.product_lhs - *rhs);
    return d;
}

double parent_mean_Lz(double eta, double N)
{
    return eta * (N / std::tanh(2.0 * N) - 0.5);
}

} // namespace sqzrot
