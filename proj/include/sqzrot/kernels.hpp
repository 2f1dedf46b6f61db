#ifndef SQZROT_KERNELS_HPP
#define SQZROT_KERNELS_HPP

// Data-parallel inner loops of the library.
//
// Every kernel exists twice: a plain serial reference in kernels::serial and an
// OpenMP version in kernels::omp. The OpenMP versions partition work over
// independent outputs (theta rows, azimuthal orders, shells, time samples) and
// keep the serial summation order inside each output, so both produce
// bitwise-identical results for any thread count.

#include "sqzrot/harmonics.hpp"

#include <complex>
#include <span>
#include <vector>

namespace sqzrot {

using cplx = std::complex<double>;
using Coeffs = std::vector<cplx>;

/// a L_+ + b L_- + c L_z + d, acting block-diagonally on each shell l.
struct LadderCombo {
    cplx raise{0.0, 0.0};
    cplx lower{0.0, 0.0};
    cplx z{0.0, 0.0};
    cplx identity{0.0, 0.0};
};

/// e^{-2 pi i l(l+1) tau}: rotor phase of shell l after tau revival periods (tau = t / T_rev).
cplx rotor_phase(int l, double tau);

namespace kernels {

namespace serial {

/// Values sum_{lm} c_lm Y_lm at every grid node, theta-major then phi.
std::vector<cplx> synthesize(std::span<const cplx> coeffs, int l_max, const SphereGrid& grid);

/// Quadrature projection c_lm = sum_nodes w Y_lm^* f for l <= l_max.
Coeffs analyze(std::span<const cplx> values, const SphereGrid& grid, int l_max);

/// sum_{lm} c_lm Y_lm at arbitrary directions (cos(theta), phi).
std::vector<cplx> evaluate(std::span<const cplx> coeffs, int l_max, std::span<const double> cos_thetas,
                           std::span<const double> phis);

Coeffs apply_combo(const LadderCombo& op, std::span<const cplx> coeffs, int l_max);

/// sum_l p_l e^{-2 pi i l(l+1) tau} for each tau.
std::vector<cplx> autocorrelation_trace(std::span<const double> shell_weights,
                                        std::span<const double> taus);

} // namespace serial

namespace omp {

std::vector<cplx> synthesize(std::span<const cplx> coeffs, int l_max, const SphereGrid& grid);
Coeffs analyze(std::span<const cplx> values, const SphereGrid& grid, int l_max);
std::vector<cplx> evaluate(std::span<const cplx> coeffs, int l_max, std::span<const double> cos_thetas,
                           std::span<const double> phis);
Coeffs apply_combo(const LadderCombo& op, std::span<const cplx> coeffs, int l_max);
std::vector<cplx> autocorrelation_trace(std::span<const double> shell_weights,
                                        std::span<const double> taus);

} // namespace omp

/// Threads used by the omp kernels (1 when built without OpenMP).
int max_threads();
void set_threads(int n);

} // namespace kernels

} // namespace sqzrot

#endif
