#include "cli.hpp"

#include "sqzrot/error.hpp"
#include "sqzrot/io.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace sqzrot::cli {

namespace {

struct ConfigFlags {
    io::RunConfig config;
    int l_max = -1;
    CLI::Option* l_max_opt = nullptr;

    void attach(CLI::App* app)
    {
        app->add_option("--eta", config.eta_modulus, "squeezing modulus |eta| in [0, 1]")->required();
        app->add_option("--alpha", config.eta_phase_alpha, "squeezing phase alpha (radians)");
        app->add_option("--N", config.N, "concentration N > 0")->required();
        app->add_option("--k", config.k, "ladder applications k >= 0");
        app->add_option("--omega0", config.omega0, "rotor frequency");
        l_max_opt = app->add_option("--lmax", l_max, "band limit (default: automatic)");
        app->add_option("--oversample", config.grid_oversample, "density export grid multiplier");
    }

    io::RunConfig resolve()
    {
        if (l_max_opt->count() > 0)
            config.l_max = l_max;
        config.validate();
        return config;
    }
};

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw FormatError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void emit(const std::string& path, const std::string& text, std::ostream& out)
{
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw FormatError("cannot write " + path);
    f << text;
}

std::string fmt(const char* pattern, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

AutoBuild construct(const io::RunConfig& config)
{
    if (config.l_max)
        return {*config.l_max, build_state(config.spec(), *config.l_max, {1e-10, false})};
    return auto_build(config.spec(), 1e-10);
}

int cmd_build(ConfigFlags& flags, const std::string& out_path, std::ostream& out, std::ostream& err)
{
    const io::RunConfig config = flags.resolve();
    const AutoBuild b = construct(config);
    const ObservableReport r = measure(b.state);
    emit(out_path, io::state_json(b.state, config), out);
    std::ostream& summary = out_path.empty() ? err : out;
    summary << "l_max " << b.l_max << (config.l_max ? " (given)" : " (auto)") << '\n'
            << "tail_mass " << fmt("%.3e", b.state.tail_mass()) << '\n'
            << "norm " << fmt("%.15f", norm(b.state)) << '\n'
            << "mean_L " << fmt("%.10f", r.mean_L[0]) << ' ' << fmt("%.10f", r.mean_L[1]) << ' '
            << fmt("%.10f", r.mean_L[2]) << '\n';
    if (b.state.tail_mass() > 1e-10)
        err << "warning: tail mass above 1e-10, expansion may be truncated\n";
    return exit_ok;
}

int cmd_observe(const std::string& state_path, const std::string& out_path, std::ostream& out)
{
    const io::LoadedState loaded = io::parse_state_json(read_file(state_path));
    if (loaded.config) {
        const ObservableReport r = measure(loaded.state, loaded.config->eta());
        emit(out_path, io::report_json(r, io::deviations(loaded.state, r, *loaded.config)), out);
    } else {
        emit(out_path, io::report_json(measure(loaded.state)), out);
    }
    return exit_ok;
}

int cmd_evolve(const std::string& state_path, const std::string& time, const std::string& out_path,
               const std::string& density_path, double oversample, bool oversample_given, std::ostream& out)
{
    const double tau = parse_time(time);
    const io::LoadedState loaded = io::parse_state_json(read_file(state_path));
    if (!oversample_given && loaded.config)
        oversample = loaded.config->grid_oversample;
    if (!(oversample >= 1.0))
        throw DomainError("oversample must be at least 1");
    const SphericalState evolved = evolve_revivals(loaded.state, tau);
    const DensityGrid d = density(evolved, io::export_grid(evolved.l_max(), oversample));
    if (!out_path.empty())
        emit(out_path, io::state_json(evolved, loaded.config), out);
    emit(density_path, io::density_csv(d), out);
    return exit_ok;
}

int cmd_scan(ConfigFlags& flags, const std::string& fractions, int samples, double threshold,
             const std::string& out_path, std::ostream& out)
{
    const io::RunConfig config = flags.resolve();
    if (samples < 2)
        throw DomainError("samples must be at least 2");
    const auto fr = parse_fractions(fractions);
    for (const auto& [m, n] : fr)
        fractional_time(m, n, config.omega0);
    std::vector<double> taus(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i)
        taus[static_cast<std::size_t>(i)] = static_cast<double>(i) / (samples - 1);
    const AutoBuild b = construct(config);
    const RevivalScanResult r = scan_revivals(b.state, config.spec(), taus, fr, threshold);
    emit(out_path, io::scan_json(r, config), out);
    return exit_ok;
}

} // namespace

double parse_time(const std::string& text)
{
    const auto slash = text.find('/');
    std::size_t used = 0;
    try {
        if (slash == std::string::npos) {
            const double v = std::stod(text, &used);
            if (used != text.size() || !std::isfinite(v))
                throw std::invalid_argument(text);
            return v;
        }
        const std::string num = text.substr(0, slash), den = text.substr(slash + 1);
        const double p = std::stod(num, &used);
        if (used != num.size())
            throw std::invalid_argument(text);
        const double q = std::stod(den, &used);
        if (used != den.size() || q == 0.0 || !std::isfinite(p / q))
            throw std::invalid_argument(text);
        return p / q;
    } catch (const std::out_of_range&) {
        throw std::invalid_argument(text);
    }
}

std::vector<std::pair<int, int>> parse_fractions(const std::string& text)
{
    std::vector<std::pair<int, int>> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
        if (item.empty())
            continue;
        const auto slash = item.find('/');
        if (slash == std::string::npos)
            throw std::invalid_argument("fraction '" + item + "' is not of the form m/n");
        std::size_t a = 0, b = 0;
        const std::string ms = item.substr(0, slash), ns = item.substr(slash + 1);
        const int m = std::stoi(ms, &a);
        const int n = std::stoi(ns, &b);
        if (a != ms.size() || b != ns.size())
            throw std::invalid_argument("fraction '" + item + "' is not of the form m/n");
        out.emplace_back(m, n);
    }
    return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Squeezed angular-momentum wave packets on a rigid rotor"};
    app.require_subcommand(1);

    ConfigFlags build_flags;
    std::string build_out;
    auto* build = app.add_subcommand("build", "construct a state and write it as JSON");
    build_flags.attach(build);
    build->add_option("--out", build_out, "state file (default: stdout)");

    std::string observe_in, observe_out;
    auto* observe = app.add_subcommand("observe", "angular momentum statistics of a state file");
    observe->add_option("state", observe_in, "state JSON")->required();
    observe->add_option("--out", observe_out, "report file (default: stdout)");

    std::string evolve_in, evolve_t = "0", evolve_out, evolve_density;
    double evolve_oversample = 2.0;
    auto* evolve_cmd = app.add_subcommand("evolve", "evolve a state and export its density");
    evolve_cmd->add_option("state", evolve_in, "state JSON")->required();
    evolve_cmd->add_option("--t", evolve_t, "time in revival periods, e.g. 1/3")->required();
    evolve_cmd->add_option("--out", evolve_out, "evolved state file");
    evolve_cmd->add_option("--density", evolve_density, "density CSV (default: stdout)");
    auto* oversample_opt = evolve_cmd->add_option("--oversample", evolve_oversample, "density grid multiplier");

    ConfigFlags scan_flags;
    std::string scan_fractions, scan_out;
    int scan_samples = 101;
    double scan_threshold = default_threshold_frac;
    auto* scan = app.add_subcommand("scan", "autocorrelation trace and fractional revival detection");
    scan_flags.attach(scan);
    scan->add_option("--fractions", scan_fractions, "comma-separated m/n list, e.g. 1/3,1/4");
    scan->add_option("--samples", scan_samples, "uniform samples on [0, 1] revival periods");
    scan->add_option("--threshold", scan_threshold, "lobe threshold as a fraction of the profile maximum");
    scan->add_option("--out", scan_out, "scan file (default: stdout)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(std::move(reversed));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*build)
            return cmd_build(build_flags, build_out, out, err);
        if (*observe)
            return cmd_observe(observe_in, observe_out, out);
        if (*evolve_cmd)
            return cmd_evolve(evolve_in, evolve_t, evolve_out, evolve_density, evolve_oversample,
                              oversample_opt->count() > 0, out);
        if (*scan)
            return cmd_scan(scan_flags, scan_fractions, scan_samples, scan_threshold, scan_out, out);
    } catch (const ConvergenceError& e) {
        err << "error: " << e.what() << '\n';
        return exit_convergence;
    } catch (const TruncationError& e) {
        err << "error: " << e.what() << '\n';
        return exit_convergence;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::invalid_argument& e) {
        err << "error: invalid argument " << e.what() << '\n';
        return exit_usage;
    } catch (const std::out_of_range& e) {
        err << "error: argument out of range " << e.what() << '\n';
        return exit_usage;
    }
    return exit_usage;
}

} // namespace sqzrot::cli
