#ifndef SQZROT_STATES_HPP
#define SQZROT_STATES_HPP

#include "sqzrot/kernels.hpp"

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <span>
#include <vector>

namespace sqzrot {

/// Squeezing parameter eta = |eta| e^{i alpha} together with s = sqrt(1 - eta^2)
/// on the principal branch.
class SqueezeParam {
public:
    /// Throws DomainError if |eta| > 1 or eta is not finite.
    explicit SqueezeParam(cplx eta);
    static SqueezeParam from_polar(double modulus, double alpha);

    cplx eta() const { return eta_; }
    cplx s() const { return s_; }
    double modulus() const { return std::abs(eta_); }
    double alpha() const { return std::arg(eta_); }
    /// True when s vanishes (eta = +-1) and the unscaled operators are undefined.
    bool singular() const;

private:
    cplx eta_;
    cplx s_;
};

/// Physical parameters of one member Psi_{eta k} of the packet family.
struct WavepacketSpec {
    SqueezeParam eta{cplx{1.0, 0.0}};
    double N = 1.0;     ///< concentration
    int k = 0;          ///< number of ladder applications
    double omega0 = 1.0;

    /// Throws DomainError unless N > 0, k >= 0, omega0 > 0 (all finite).
    void validate() const;
};

/// Unit-norm expansion psi = sum_{l <= l_max, |m| <= l} c_lm Y_lm.
///
/// Coefficients are stored by lm_index(l, m). Every constructor normalizes.
class SphericalState {
public:
    /// Normalizes coeffs; throws DomainError if the size does not match l_max or the norm is zero.
    SphericalState(int l_max, Coeffs coeffs);

    /// Pure Y_l^m.
    static SphericalState basis(int l_max, int l, int m);

    int l_max() const { return l_max_; }
    const Coeffs& coeffs() const { return coeffs_; }
    cplx operator()(int l, int m) const { return coeffs_[lm_index(l, m)]; }
    std::span<const cplx> shell(int l) const;

    /// sum_m |c_lm|^2 for every l.
    std::vector<double> shell_weights() const;
    /// Weight in the top `shells` shells (l > l_max - shells).
    double tail_mass(int shells = 2) const;

    /// Zero-padded copy with a larger band limit.
    SphericalState padded(int l_max) const;

private:
    int l_max_;
    Coeffs coeffs_;
};

/// Hermitian inner product sum conj(a) b; the shorter expansion is zero-padded.
cplx inner(const SphericalState& a, const SphericalState& b);
cplx inner(std::span<const cplx> a, std::span<const cplx> b);
double norm(const SphericalState& a);
double norm(std::span<const cplx> a);

// ---------------------------------------------------------------------------
// Angular momentum algebra

/// Dense L_x, L_y, L_z on shell l, rows and columns ordered m = -l..l.
/// Entry (r, c) is <l, m_r | L | l, m_c> (hbar = 1).
struct AngmomBlock {
    int l = 0;
    Eigen::MatrixXcd Lx;
    Eigen::MatrixXcd Ly;
    Eigen::MatrixXcd Lz;
};

AngmomBlock angmom_ladder_elements(int l);

enum class ScriptedOp { L3, Lplus, Lminus };

/// Unscaled operators divide by s; scaled ones are s times the unscaled ones
/// and stay finite at eta = +-1.
enum class Scaling { unscaled, scaled };

/// Coefficients of the squeezed operators in terms of L_+, L_-, L_z:
///   L3 = (L_x + i eta L_y) / s,  L+- = +-(eta L_x + i L_y) / s - L_z.
/// Throws SingularParameterError for an unscaled request when s = 0.
LadderCombo scripted_combo(ScriptedOp which, const SqueezeParam& eta, Scaling scaling = Scaling::unscaled);

/// Dense matrix of a squeezed operator on shell l.
Eigen::MatrixXcd scripted_operator(ScriptedOp which, const SqueezeParam& eta, int l,
                                   Scaling scaling = Scaling::unscaled);

/// Plain components as combos.
LadderCombo combo_Lx();
LadderCombo combo_Ly();
LadderCombo combo_Lz();

/// Raw action of a combo on a coefficient vector (no normalization).
Coeffs apply(const LadderCombo& op, const SphericalState& state);

// ---------------------------------------------------------------------------
// Construction

struct BuildOptions {
    double tail_tol = 1e-10;
    bool check_tail = true;
};

/// Parent packet sqrt(N / (2 pi sinh 2N)) exp(N sin(theta)(cos(phi) + i eta sin(phi))),
/// projected onto Y_lm, l <= l_max, by quadrature on an oversampled grid.
///
/// The projection grid has band limit max(2 l_max, l_max + 16) so aliasing only
/// reaches from shells beyond roughly 3 l_max. The result is renormalized.
/// Throws TruncationError when options.check_tail is set and either the top two shells
/// carry more than options.tail_tol or the expansion, resynthesized on a second grid with
/// different node counts, misses the sampled packet by more than that relative squared
/// error. The second test catches content far above l_max that the projection folds
/// back into low shells.
SphericalState build_parent(const SqueezeParam& eta, double N, int l_max, const BuildOptions& options = {});

/// Projection before renormalization (its norm tests the analytic prefactor).
Coeffs project_parent(const SqueezeParam& eta, double N, int l_max);

/// Applies the scaled ladder M_+ = eta L_x + i L_y - s L_z (= s L_+) k times,
/// renormalizing after every application.
/// Throws DegenerateStateError if a pre-normalization norm drops below 1e-250.
SphericalState apply_ladder_k(const SphericalState& state, const SqueezeParam& eta, int k);

/// Psi_{eta k} sampled in space and projected like the parent.
///
/// The ladder is applied to the closed-form packet before projection: M_+^k acting on
/// e^{N(x + i eta y)} is a degree-k polynomial in (x, y, z) times the same exponential.
/// This keeps the quadrature noise of high shells from being amplified by the
/// l^k growth of M_+^k, which limits apply_ladder_k on a projected parent for large k.
Coeffs project_packet(const SqueezeParam& eta, double N, int k, int l_max);

/// Psi_{eta k} at a fixed band limit (see project_packet).
SphericalState build_state(const WavepacketSpec& spec, int l_max, const BuildOptions& options = {});

/// Candidate band limits scanned by auto_lmax.
std::span<const int> lmax_schedule();

struct AutoBuild {
    int l_max = 0;
    SphericalState state;
};

/// Smallest band limit on the schedule (and >= k) that passes the build_parent
/// truncation test at tail_tol. tail_tol must lie in (0, 1e-6].
/// Throws ConvergenceError when l_max = 400 still fails.
AutoBuild auto_build(const WavepacketSpec& spec, double tail_tol = 1e-10);
int auto_lmax(const WavepacketSpec& spec, double tail_tol = 1e-10);

/// Outcome of the eigenvalue check of L3 on Psi_{eta k}.
struct EigenResidual {
    cplx lambda;          ///< Rayleigh quotient <psi|L3|psi>
    double residual = 0;  ///< ||L3 psi - lambda psi||
    cplx expected;        ///< k sqrt(1 - eta^2)
    double algebra_value = 0;  ///< k, implied by [L3, L+] = L+
};

/// Throws SingularParameterError at eta = +-1.
EigenResidual eigen_residual(const SphericalState& state, const SqueezeParam& eta, int k);

/// ||(L_x + i eta L_y) psi||, zero for an exact parent.
double annihilation_residual(const SphericalState& state, const SqueezeParam& eta);

} // namespace sqzrot

#endif
