#include "sqzrot/io.hpp"

#include "sqzrot/error.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>

namespace sqzrot::io {

namespace {

bool finite(double v) { return std::isfinite(v); }

// Minimal writer with a fixed key order and number format.
class Writer {
public:
    Writer& open(char c)
    {
        sep();
        out_ += c;
        first_ = true;
        return *this;
    }
    Writer& close(char c)
    {
        out_ += c;
        first_ = false;
        return *this;
    }
    Writer& key(std::string_view k)
    {
        sep();
        out_ += '"';
        out_ += k;
        out_ += "\":";
        first_ = true;  // value follows without a separator
        return *this;
    }
    Writer& num(double v)
    {
        sep();
        out_ += format_number(v);
        return *this;
    }
    Writer& integer(long long v)
    {
        sep();
        out_ += std::to_string(v);
        return *this;
    }
    Writer& boolean(bool v)
    {
        sep();
        out_ += v ? "true" : "false";
        return *this;
    }
    Writer& null()
    {
        sep();
        out_ += "null";
        return *this;
    }
    Writer& str(std::string_view v)
    {
        sep();
        out_ += '"';
        out_ += v;
        out_ += '"';
        return *this;
    }
    Writer& opt(const std::optional<double>& v) { return v ? num(*v) : null(); }
    Writer& field(std::string_view k, double v) { return key(k).num(v); }

    std::string take()
    {
        out_ += '\n';
        return std::move(out_);
    }

private:
    void sep()
    {
        if (!first_)
            out_ += ',';
        first_ = false;
    }

    std::string out_;
    bool first_ = true;
};

void write_config(Writer& w, const RunConfig& c)
{
    w.open('{');
    w.field("eta_modulus", c.eta_modulus);
    w.field("eta_phase_alpha", c.eta_phase_alpha);
    w.field("N", c.N);
    w.key("k").integer(c.k);
    w.field("omega0", c.omega0);
    w.key("l_max");
    if (c.l_max)
        w.integer(*c.l_max);
    else
        w.null();
    w.field("grid_oversample", c.grid_oversample);
    w.close('}');
}

RunConfig read_config(const nlohmann::json& j)
{
    RunConfig c;
    c.eta_modulus = j.at("eta_modulus").get<double>();
    c.eta_phase_alpha = j.at("eta_phase_alpha").get<double>();
    c.N = j.at("N").get<double>();
    c.k = j.at("k").get<int>();
    c.omega0 = j.at("omega0").get<double>();
    if (j.contains("l_max") && !j.at("l_max").is_null())
        c.l_max = j.at("l_max").get<int>();
    if (j.contains("grid_oversample"))
        c.grid_oversample = j.at("grid_oversample").get<double>();
    c.validate();
    return c;
}

} // namespace

void RunConfig::validate() const
{
    if (!finite(eta_modulus) || !finite(eta_phase_alpha) || !finite(N) || !finite(omega0) ||
        !finite(grid_oversample))
        throw DomainError("config: numeric fields must be finite");
    if (eta_modulus < 0.0 || eta_modulus > 1.0)
        throw DomainError("config: eta modulus must lie in [0, 1]");
    if (l_max && *l_max < 0)
        throw DomainError("config: l_max must be non-negative");
    if (grid_oversample < 1.0)
        throw DomainError("config: grid oversample must be at least 1");
    spec().validate();
}

SqueezeParam RunConfig::eta() const
{
    return SqueezeParam::from_polar(eta_modulus, eta_phase_alpha);
}

WavepacketSpec RunConfig::spec() const
{
    return WavepacketSpec{eta(), N, k, omega0};
}

std::string format_number(double v)
{
    if (!std::isfinite(v))
        return "null";
    if (v == 0.0)
        return "0";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string state_json(const SphericalState& state, const std::optional<RunConfig>& config)
{
    Writer w;
    w.open('{');
    w.key("l_max").integer(state.l_max());
    w.key("coeffs").open('[');
    for (const cplx& c : state.coeffs())
        w.open('[').num(c.real()).num(c.imag()).close(']');
    w.close(']');
    if (config) {
        w.key("config");
        write_config(w, *config);
    }
    w.close('}');
    return w.take();
}

LoadedState parse_state_json(std::string_view text)
{
    try {
        const auto j = nlohmann::json::parse(text);
        const int l_max = j.at("l_max").get<int>();
        if (l_max < 0)
            throw FormatError("state file: negative l_max");
        const auto& arr = j.at("coeffs");
        if (!arr.is_array() || arr.size() != lm_count(l_max))
            throw FormatError("state file: expected " + std::to_string(lm_count(l_max)) + " coefficients");
        Coeffs c;
        c.reserve(arr.size());
        for (const auto& pair : arr) {
            if (!pair.is_array() || pair.size() != 2)
                throw FormatError("state file: coefficients must be [re, im] pairs");
            c.emplace_back(pair[0].get<double>(), pair[1].get<double>());
        }
        std::optional<RunConfig> config;
        if (j.contains("config") && !j.at("config").is_null())
            config = read_config(j.at("config"));
        return {SphericalState(l_max, std::move(c)), config};
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("state file: ") + e.what());
    } catch (const DomainError& e) {
        throw FormatError(std::string("state file: ") + e.what());
    }
}

Deviations deviations(const SphericalState& state, const ObservableReport& report, const RunConfig& config)
{
    const SqueezeParam eta = config.eta();
    Deviations d;
    if (config.k == 0 && eta.eta().imag() == 0.0)
        d.mean_Lz = std::abs(report.mean_L[2] - parent_mean_Lz(eta.eta().real(), config.N));
    if (report.var_Ly >= 1e-14)
        d.squeeze = check_squeezing(report, eta);
    const UncertaintyDeviation u = check_uncertainty_product(report, eta);
    d.bracket = u.dev_bracket;
    d.alpha = u.dev_alpha;
    if (!eta.singular())
        d.eigen = eigen_residual(state, eta, config.k);
    return d;
}

std::string report_json(const ObservableReport& r, const std::optional<Deviations>& dev)
{
    Writer w;
    w.open('{');
    w.key("mean_L").open('[').num(r.mean_L[0]).num(r.mean_L[1]).num(r.mean_L[2]).close(']');
    w.field("var_Lx", r.var_Lx);
    w.field("var_Ly", r.var_Ly);
    w.field("var_Lz", r.var_Lz);
    w.field("anticom_xy", r.anticom_xy);
    w.field("covariance_term", r.covariance_term);
    w.field("squeeze_ratio", r.squeeze_ratio);
    w.field("product_lhs", r.product_lhs);
    w.field("product_rhs_bracket", r.product_rhs_bracket);
    w.key("product_rhs_alpha").opt(r.product_rhs_alpha);
    w.field("schroedinger_rhs", r.schroedinger_rhs);
    w.field("robertson_rhs", r.robertson_rhs);
    w.field("max_imag", r.max_imag);
    if (dev) {
        w.key("dev_mean_Lz").opt(dev->mean_Lz);
        w.key("dev_squeeze").opt(dev->squeeze);
        w.key("dev_bracket").opt(dev->bracket);
        w.key("dev_alpha").opt(dev->alpha);
        if (dev->eigen) {
            const EigenResidual& e = *dev->eigen;
            w.field("L3_lambda_re", e.lambda.real());
            w.field("L3_lambda_im", e.lambda.imag());
            w.field("L3_residual", e.residual);
            w.field("L3_expected_re", e.expected.real());
            w.field("L3_expected_im", e.expected.imag());
            w.field("L3_algebra_value", e.algebra_value);
        }
    }
    w.close('}');
    return w.take();
}

std::string density_csv(const DensityGrid& d)
{
    std::string out = "theta,phi,density\n";
    out.reserve(out.size() + d.values.size() * 64);
    std::size_t idx = 0;
    for (const double theta : d.thetas)
        for (const double phi : d.phis) {
            out += format_number(theta);
            out += ',';
            out += format_number(phi);
            out += ',';
            out += format_number(d.values[idx++]);
            out += '\n';
        }
    return out;
}

std::string scan_json(const RevivalScanResult& r, const std::optional<RunConfig>& config)
{
    Writer w;
    w.open('{');
    if (config) {
        w.key("config");
        write_config(w, *config);
    }
    w.field("omega0", r.omega0);
    w.field("T_rev", r.T_rev);
    w.key("l_max").integer(r.l_max);
    w.key("samples").open('[');
    for (const auto& s : r.samples) {
        w.open('{');
        w.field("t", s.t).field("tau", s.tau).field("abs_A", s.abs_A);
        w.close('}');
    }
    w.close(']');
    w.key("events").open('[');
    for (const auto& e : r.events) {
        w.open('{');
        w.key("m").integer(e.m);
        w.key("n").integer(e.n);
        w.field("t", e.t);
        w.field("tau", e.tau);
        w.key("q_expected").integer(e.q_expected);
        w.key("q_detected").integer(e.q_detected);
        w.key("outcome").str(e.outcome == PacketOutcome::ring ? "ring" : "lobes");
        w.key("clone_fidelity").opt(e.clone_fidelity);
        w.field("abs_A", e.abs_A);
        w.field("threshold_frac", e.threshold_frac);
        w.key("best_effort").boolean(e.best_effort);
        w.close('}');
    }
    w.close(']');
    w.close('}');
    return w.take();
}

SphereGrid export_grid(int l_max, double oversample)
{
    const int band = std::max(l_max, static_cast<int>(std::ceil(oversample * std::max(l_max, 1))));
    return build_grid(band);
}

} // namespace sqzrot::io
