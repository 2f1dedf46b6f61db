#include "sqzrot/states.hpp"

#include "sqzrot/error.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

namespace sqzrot {

namespace {

constexpr cplx I{0.0, 1.0};

double log_sinh(double x)
{
    if (x > 20.0)
        return x - std::numbers::ln2 + std::log1p(-std::exp(-2.0 * x));
    return std::log(std::sinh(x));
}

constexpr std::array<int, 12> schedule{4, 8, 16, 24, 32, 48, 64, 96, 128, 192, 256, 400};

// Polynomial in (x, y, z) with complex coefficients, total degree <= degree().
// Used to apply the ladder to the closed-form packet before any projection:
// M (P e^{N u}) = (M P + N P M u) e^{N u} for the derivation M and u = x + i eta y.
class Trivariate {
public:
    explicit Trivariate(int degree) : degree_(degree), c_(slots(degree)) {}

    int degree() const { return degree_; }
    cplx& at(int a, int b, int c) { return c_[index(a, b, c)]; }
    cplx at(int a, int b, int c) const { return c_[index(a, b, c)]; }

    Trivariate apply(const LadderCombo& op) const
    {
        // L_x = -i (y d/dz - z d/dy), L_y = -i (z d/dx - x d/dz), L_z = -i (x d/dy - y d/dx)
        const cplx ax = op.raise + op.lower;
        const cplx ay = I * (op.raise - op.lower);
        const cplx az = op.z;
        Trivariate out(degree_);
        for (int a = 0; a <= degree_; ++a)
            for (int b = 0; a + b <= degree_; ++b)
                for (int c = 0; a + b + c <= degree_; ++c) {
                    const cplx v = at(a, b, c);
                    if (v == cplx{0.0, 0.0})
                        continue;
                    const cplx mi = -I * v;
                    if (c > 0) out.at(a, b + 1, c - 1) += ax * mi * static_cast<double>(c);
                    if (b > 0) out.at(a, b - 1, c + 1) -= ax * mi * static_cast<double>(b);
                    if (a > 0) out.at(a - 1, b, c + 1) += ay * mi * static_cast<double>(a);
                    if (c > 0) out.at(a + 1, b, c - 1) -= ay * mi * static_cast<double>(c);
                    if (b > 0) out.at(a + 1, b - 1, c) += az * mi * static_cast<double>(b);
                    if (a > 0) out.at(a - 1, b + 1, c) -= az * mi * static_cast<double>(a);
                    out.at(a, b, c) += op.identity * v;
                }
        return out;
    }

    Trivariate raised(int degree) const
    {
        Trivariate out(degree);
        for (int a = 0; a <= degree_; ++a)
            for (int b = 0; a + b <= degree_; ++b)
                for (int c = 0; a + b + c <= degree_; ++c)
                    out.at(a, b, c) = at(a, b, c);
        return out;
    }

    // Product with a polynomial of degree one (raises the degree by one).
    Trivariate times_linear(const Trivariate& lin) const
    {
        Trivariate out(degree_ + 1);
        const cplx c0 = lin.at(0, 0, 0), cx = lin.at(1, 0, 0), cy = lin.at(0, 1, 0), cz = lin.at(0, 0, 1);
        for (int a = 0; a <= degree_; ++a)
            for (int b = 0; a + b <= degree_; ++b)
                for (int c = 0; a + b + c <= degree_; ++c) {
                    const cplx v = at(a, b, c);
                    out.at(a, b, c) += c0 * v;
                    out.at(a + 1, b, c) += cx * v;
                    out.at(a, b + 1, c) += cy * v;
                    out.at(a, b, c + 1) += cz * v;
                }
        return out;
    }

    void scale(cplx f)
    {
        for (auto& v : c_)
            v *= f;
    }

    double max_abs() const
    {
        double m = 0.0;
        for (const auto& v : c_)
            m = std::max(m, std::abs(v));
        return m;
    }

    cplx operator()(double x, double y, double z) const
    {
        cplx acc{0.0, 0.0};
        double xa = 1.0;
        for (int a = 0; a <= degree_; ++a, xa *= x) {
            double yb = 1.0;
            for (int b = 0; a + b <= degree_; ++b, yb *= y) {
                double zc = 1.0;
                for (int c = 0; a + b + c <= degree_; ++c, zc *= z)
                    acc += at(a, b, c) * (xa * yb * zc);
            }
        }
        return acc;
    }

private:
    static std::size_t slots(int d)
    {
        return static_cast<std::size_t>(d + 1) * (d + 1) * (d + 1);
    }
    std::size_t index(int a, int b, int c) const
    {
        const auto n = static_cast<std::size_t>(degree_ + 1);
        return (static_cast<std::size_t>(a) * n + b) * n + c;
    }

    int degree_;
    std::vector<cplx> c_;
};

// P_k with M_+^k e^{N u} = P_k e^{N u}, up to a positive scale.
Trivariate ladder_polynomial(const SqueezeParam& param, double N, int k)
{
    const LadderCombo raise = scripted_combo(ScriptedOp::Lplus, param, Scaling::scaled);
    Trivariate u(1);
    u.at(1, 0, 0) = 1.0;
    u.at(0, 1, 0) = I * param.eta();
    Trivariate mu = u.apply(raise);
    mu.scale(N);
    Trivariate p(0);
    p.at(0, 0, 0) = 1.0;
    for (int step = 0; step < k; ++step) {
        Trivariate next = p.apply(raise).raised(step + 1);
        const Trivariate grow = p.times_linear(mu);
        for (int a = 0; a <= step + 1; ++a)
            for (int b = 0; a + b <= step + 1; ++b)
                for (int c = 0; a + b + c <= step + 1; ++c)
                    next.at(a, b, c) += grow.at(a, b, c);
        const double m = next.max_abs();
        if (!(m > 0.0))
            throw DegenerateStateError("ladder application " + std::to_string(step + 1) +
                                       " annihilated the packet");
        next.scale(1.0 / m);
        p = std::move(next);
    }
    return p;
}

} // namespace

// ---------------------------------------------------------------------------

SqueezeParam::SqueezeParam(cplx eta) : eta_(eta)
{
    if (!std::isfinite(eta.real()) || !std::isfinite(eta.imag()))
        throw DomainError("squeeze parameter must be finite");
    if (std::abs(eta) > 1.0 + 1e-15)
        throw DomainError("squeeze parameter: |eta| > 1 is not supported");
    s_ = std::sqrt(1.0 - eta * eta);
}

SqueezeParam SqueezeParam::from_polar(double modulus, double alpha)
{
    if (!std::isfinite(modulus) || !std::isfinite(alpha) || modulus < 0.0)
        throw DomainError("squeeze parameter: modulus must be finite and non-negative");
    // Keep real parameters exactly real.
    if (alpha == 0.0)
        return SqueezeParam(cplx{modulus, 0.0});
    return SqueezeParam(std::polar(modulus, alpha));
}

bool SqueezeParam::singular() const
{
    return std::abs(s_) < 1e-12;
}

void WavepacketSpec::validate() const
{
    if (!std::isfinite(N) || N <= 0.0)
        throw DomainError("wave packet: N must be positive");
    if (k < 0)
        throw DomainError("wave packet: k must be non-negative");
    if (!std::isfinite(omega0) || omega0 <= 0.0)
        throw DomainError("wave packet: omega0 must be positive");
}

// ---------------------------------------------------------------------------

SphericalState::SphericalState(int l_max, Coeffs coeffs) : l_max_(l_max), coeffs_(std::move(coeffs))
{
    if (l_max < 0 || coeffs_.size() != lm_count(l_max))
        throw DomainError("spherical state: coefficient count does not match l_max=" + std::to_string(l_max));
    const double n = norm(std::span<const cplx>(coeffs_));
    if (!(n > 0.0) || !std::isfinite(n))
        throw DomainError("spherical state: cannot normalize a zero or non-finite vector");
    for (auto& c : coeffs_)
        c /= n;
}

SphericalState SphericalState::basis(int l_max, int l, int m)
{
    if (l > l_max || l < 0 || std::abs(m) > l)
        throw DomainError("basis state out of range");
    Coeffs c(lm_count(l_max));
    c[lm_index(l, m)] = 1.0;
    return {l_max, std::move(c)};
}

std::span<const cplx> SphericalState::shell(int l) const
{
    return std::span<const cplx>(coeffs_).subspan(lm_index(l, -l), 2 * static_cast<std::size_t>(l) + 1);
}

std::vector<double> SphericalState::shell_weights() const
{
    std::vector<double> w(static_cast<std::size_t>(l_max_) + 1, 0.0);
    for (int l = 0; l <= l_max_; ++l)
        for (const cplx& c : shell(l))
            w[static_cast<std::size_t>(l)] += std::norm(c);
    return w;
}

double SphericalState::tail_mass(int shells) const
{
    double mass = 0.0;
    for (int l = std::max(0, l_max_ - shells + 1); l <= l_max_; ++l)
        for (const cplx& c : shell(l))
            mass += std::norm(c);
    return mass;
}

SphericalState SphericalState::padded(int l_max) const
{
    if (l_max < l_max_)
        throw DomainError("padded: target band limit is smaller than the state's");
    Coeffs c(lm_count(l_max));
    std::copy(coeffs_.begin(), coeffs_.end(), c.begin());
    return {l_max, std::move(c)};
}

cplx inner(std::span<const cplx> a, std::span<const cplx> b)
{
    const std::size_t n = std::min(a.size(), b.size());
    cplx acc{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i)
        acc += std::conj(a[i]) * b[i];
    return acc;
}

cplx inner(const SphericalState& a, const SphericalState& b)
{
    return inner(std::span<const cplx>(a.coeffs()), std::span<const cplx>(b.coeffs()));
}

double norm(std::span<const cplx> a)
{
    double acc = 0.0;
    for (const cplx& c : a)
        acc += std::norm(c);
    return std::sqrt(acc);
}

double norm(const SphericalState& a)
{
    return norm(std::span<const cplx>(a.coeffs()));
}

// ---------------------------------------------------------------------------

AngmomBlock angmom_ladder_elements(int l)
{
    if (l < 0)
        throw DomainError("angular momentum block: negative l");
    const int dim = 2 * l + 1;
    Eigen::MatrixXcd plus = Eigen::MatrixXcd::Zero(dim, dim);
    AngmomBlock block;
    block.l = l;
    block.Lz = Eigen::MatrixXcd::Zero(dim, dim);
    const double ll = static_cast<double>(l) * (l + 1);
    for (int m = -l; m <= l; ++m) {
        block.Lz(m + l, m + l) = static_cast<double>(m);
        if (m < l)
            plus(m + 1 + l, m + l) = std::sqrt(ll - static_cast<double>(m) * (m + 1));
    }
    const Eigen::MatrixXcd minus = plus.adjoint();
    block.Lx = 0.5 * (plus + minus);
    block.Ly = (-0.5 * I) * (plus - minus);
    return block;
}

LadderCombo combo_Lx()
{
    return {0.5, 0.5, 0.0, 0.0};
}

LadderCombo combo_Ly()
{
    return {-0.5 * I, 0.5 * I, 0.0, 0.0};
}

LadderCombo combo_Lz()
{
    return {0.0, 0.0, 1.0, 0.0};
}

LadderCombo scripted_combo(ScriptedOp which, const SqueezeParam& param, Scaling scaling)
{
    const cplx eta = param.eta();
    const cplx s = param.s();
    if (scaling == Scaling::unscaled && param.singular())
        throw SingularParameterError("squeezed operators need sqrt(1 - eta^2) != 0");
    const cplx div = (scaling == Scaling::unscaled) ? 1.0 / s : cplx{1.0, 0.0};
    // -L_z in the unscaled form becomes -s L_z after multiplying by s.
    const cplx z_coeff = (scaling == Scaling::unscaled) ? cplx{-1.0, 0.0} : -s;
    switch (which) {
    case ScriptedOp::L3:
        return {0.5 * (1.0 + eta) * div, 0.5 * (1.0 - eta) * div, 0.0, 0.0};
    case ScriptedOp::Lplus:
        return {0.5 * (1.0 + eta) * div, 0.5 * (eta - 1.0) * div, z_coeff, 0.0};
    case ScriptedOp::Lminus:
        return {-0.5 * (1.0 + eta) * div, 0.5 * (1.0 - eta) * div, z_coeff, 0.0};
    }
    throw DomainError("unknown scripted operator");
}

Eigen::MatrixXcd scripted_operator(ScriptedOp which, const SqueezeParam& eta, int l, Scaling scaling)
{
    const LadderCombo op = scripted_combo(which, eta, scaling);
    const AngmomBlock b = angmom_ladder_elements(l);
    const Eigen::MatrixXcd plus = b.Lx + I * b.Ly;
    const Eigen::MatrixXcd minus = b.Lx - I * b.Ly;
    const auto dim = static_cast<Eigen::Index>(2 * l + 1);
    return op.raise * plus + op.lower * minus + op.z * b.Lz +
           op.identity * Eigen::MatrixXcd::Identity(dim, dim);
}

Coeffs apply(const LadderCombo& op, const SphericalState& state)
{
    return kernels::omp::apply_combo(op, state.coeffs(), state.l_max());
}

// ---------------------------------------------------------------------------

namespace {

struct Projection {
    Coeffs coeffs;
    double missing = 0;  // relative squared error of the expansion on an independent grid
};

class PacketSampler {
public:
    PacketSampler(const SqueezeParam& param, double N, int k)
        : eta_(param.eta()), N_(N), k_(k), poly_(ladder_polynomial(param, N, k)),
          log_pref_(0.5 * (std::log(N) - std::log(2.0 * std::numbers::pi) - log_sinh(2.0 * N)))
    {
    }

    std::vector<cplx> sample(const SphereGrid& grid) const
    {
        std::vector<cplx> values(grid.size());
#pragma omp parallel for schedule(static)
        for (int i = 0; i < grid.n_theta; ++i) {
            const double z = grid.nodes_x[static_cast<std::size_t>(i)];
            const double sin_theta = std::sqrt(std::max(0.0, (1.0 - z) * (1.0 + z)));
            for (int j = 0; j < grid.n_phi; ++j) {
                const double phi = grid.phi(j);
                const double x = sin_theta * std::cos(phi);
                const double y = sin_theta * std::sin(phi);
                cplx v = std::exp(N_ * (x + I * eta_ * y) + log_pref_);
                if (k_ > 0)
                    v *= poly_(x, y, z);
                values[static_cast<std::size_t>(i) * grid.n_phi + j] = v;
            }
        }
        return values;
    }

private:
    cplx eta_;
    double N_;
    int k_;
    Trivariate poly_;
    double log_pref_;
};

Projection project_sampled(const SqueezeParam& param, double N, int k, int l_max, bool verify)
{
    if (l_max < 0)
        throw DomainError("build_parent: negative l_max");
    if (!std::isfinite(N) || N <= 0.0)
        throw DomainError("build_parent: N must be positive");
    if (k < 0)
        throw DomainError("build_state: k must be non-negative");
    const PacketSampler sampler(param, N, k);
    const int band = std::max(2 * l_max, l_max + 16);
    const SphereGrid grid = build_grid(band);
    Projection out;
    out.coeffs = kernels::omp::analyze(sampler.sample(grid), grid, l_max);
    if (!verify)
        return out;

    // Node counts differ from the projection grid, so any aliasing folds differently.
    const SphereGrid check = build_grid(band + 2, 2 * band + 3);
    const auto exact = sampler.sample(check);
    const auto approx = kernels::omp::synthesize(out.coeffs, l_max, check);
    double err = 0.0, total = 0.0;
    for (int i = 0; i < check.n_theta; ++i) {
        double e = 0.0, t = 0.0;
        for (int j = 0; j < check.n_phi; ++j) {
            const auto idx = static_cast<std::size_t>(i) * check.n_phi + j;
            e += std::norm(exact[idx] - approx[idx]);
            t += std::norm(exact[idx]);
        }
        err += e * check.weight(i);
        total += t * check.weight(i);
    }
    out.missing = total > 0.0 ? err / total : 0.0;
    return out;
}

// Rounding allowance on the captured-mass comparison.
constexpr double mass_slack = 1e-12;

bool truncated(const SphericalState& state, double missing, double tol)
{
    return !(state.tail_mass() < tol) || missing > tol + mass_slack;
}

std::string truncation_message(const char* what, const SphericalState& state, double missing)
{
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s: top-shell mass %.3e, reconstruction error %.3e at l_max=%d", what,
                  state.tail_mass(), missing, state.l_max());
    return buf;
}

} // namespace

Coeffs project_packet(const SqueezeParam& param, double N, int k, int l_max)
{
    return project_sampled(param, N, k, l_max, false).coeffs;
}

Coeffs project_parent(const SqueezeParam& param, double N, int l_max)
{
    return project_packet(param, N, 0, l_max);
}

SphericalState build_parent(const SqueezeParam& eta, double N, int l_max, const BuildOptions& options)
{
    Projection p = project_sampled(eta, N, 0, l_max, options.check_tail);
    SphericalState state(l_max, std::move(p.coeffs));
    if (options.check_tail && truncated(state, p.missing, options.tail_tol))
        throw TruncationError(truncation_message("parent state", state, p.missing));
    return state;
}

SphericalState apply_ladder_k(const SphericalState& state, const SqueezeParam& eta, int k)
{
    if (k < 0)
        throw DomainError("apply_ladder_k: k must be non-negative");
    const LadderCombo raise = scripted_combo(ScriptedOp::Lplus, eta, Scaling::scaled);
    SphericalState current = state;
    for (int step = 0; step < k; ++step) {
        Coeffs next = kernels::omp::apply_combo(raise, current.coeffs(), current.l_max());
        const double n = norm(std::span<const cplx>(next));
        if (!(n >= 1e-250))
            throw DegenerateStateError("ladder application " + std::to_string(step + 1) +
                                       " annihilated the state");
        current = SphericalState(current.l_max(), std::move(next));
    }
    return current;
}

namespace {

struct Built {
    SphericalState state;
    double missing;
};

Built build_checked(const WavepacketSpec& spec, int l_max, bool verify)
{
    spec.validate();
    Projection p = project_sampled(spec.eta, spec.N, spec.k, l_max, verify);
    if (!(norm(std::span<const cplx>(p.coeffs)) >= 1e-250))
        throw DegenerateStateError("ladder annihilated the packet at l_max=" + std::to_string(l_max));
    return {SphericalState(l_max, std::move(p.coeffs)), p.missing};
}

} // namespace

SphericalState build_state(const WavepacketSpec& spec, int l_max, const BuildOptions& options)
{
    Built b = build_checked(spec, l_max, options.check_tail);
    if (options.check_tail && truncated(b.state, b.missing, options.tail_tol))
        throw TruncationError(truncation_message("state", b.state, b.missing));
    return std::move(b.state);
}

std::span<const int> lmax_schedule()
{
    return schedule;
}

AutoBuild auto_build(const WavepacketSpec& spec, double tail_tol)
{
    spec.validate();
    if (!(tail_tol > 0.0 && tail_tol <= 1e-6))
        throw DomainError("auto_lmax: tail tolerance must lie in (0, 1e-6]");
    for (int l_max : schedule) {
        if (l_max < spec.k)
            continue;
        Built b = build_checked(spec, l_max, true);
        if (!truncated(b.state, b.missing, tail_tol))
            return {l_max, std::move(b.state)};
    }
    throw ConvergenceError("auto_lmax: no convergence up to l_max=400");
}

int auto_lmax(const WavepacketSpec& spec, double tail_tol)
{
    return auto_build(spec, tail_tol).l_max;
}

EigenResidual eigen_residual(const SphericalState& state, const SqueezeParam& eta, int k)
{
    const LadderCombo l3 = scripted_combo(ScriptedOp::L3, eta, Scaling::unscaled);
    const Coeffs image = apply(l3, state);
    EigenResidual out;
    out.lambda = inner(std::span<const cplx>(state.coeffs()), std::span<const cplx>(image));
    Coeffs diff = image;
    for (std::size_t i = 0; i < diff.size(); ++i)
        diff[i] -= out.lambda * state.coeffs()[i];
    out.residual = norm(std::span<const cplx>(diff));
    out.expected = static_cast<double>(k) * eta.s();
    out.algebra_value = k;
    return out;
}

double annihilation_residual(const SphericalState& state, const SqueezeParam& eta)
{
    return norm(std::span<const cplx>(apply(scripted_combo(ScriptedOp::L3, eta, Scaling::scaled), state)));
}

} // namespace sqzrot
