#include "cli/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "modval/error.hpp"
#include "modval/rng.hpp"
#include "modval/stokes.hpp"

#ifndef MODVAL_VERSION
#define MODVAL_VERSION "0.0.0"
#endif

namespace modval::cli {

namespace {

double parse_number(const std::string& text, const std::string& whole) {
    if (text.empty()) throw Error(ErrorCode::InvalidArgument, "cannot parse angle '" + whole + "'");
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidArgument, "cannot parse angle '" + whole + "'");
    }
    if (used != text.size() || !std::isfinite(v)) {
        throw Error(ErrorCode::InvalidArgument, "cannot parse angle '" + whole + "'");
    }
    return v;
}

StokesExampleConfig stokes_cfg(double varphi, double theta, double gamma) {
    StokesExampleConfig cfg;
    cfg.varphi = varphi;
    cfg.theta = theta;
    cfg.gamma = gamma;
    cfg.validate();
    return cfg;
}

void push_sweep_rows(Table& t, const std::vector<SweepRow>& rows) {
    for (const auto& r : rows) t.rows.push_back({r.theta, r.g, r.pr_H, r.pr_V, r.chi_m, r.chi_w});
}

}  // namespace

double parse_angle(const std::string& text) {
    const auto pos = text.find("pi");
    if (pos == std::string::npos) return parse_number(text, text);

    std::string coef = text.substr(0, pos);
    double factor = 1.0;
    if (coef == "" || coef == "+") {
        factor = 1.0;
    } else if (coef == "-") {
        factor = -1.0;
    } else {
        if (coef.back() == '*') coef.pop_back();
        factor = parse_number(coef, text);
    }
    const std::string rest = text.substr(pos + 2);
    if (!rest.empty()) {
        if (rest[0] != '/') throw Error(ErrorCode::InvalidArgument, "cannot parse angle '" + text + "'");
        const double den = parse_number(rest.substr(1), text);
        if (den == 0.0) throw Error(ErrorCode::InvalidArgument, "zero denominator in angle '" + text + "'");
        factor /= den;
    }
    return factor * kPi;
}

std::vector<double> parse_angle_list(const std::vector<std::string>& items) {
    std::vector<double> out;
    out.reserve(items.size());
    for (const auto& s : items) out.push_back(parse_angle(s));
    return out;
}

Format parse_format(const std::string& text) {
    if (text == "csv") return Format::Csv;
    if (text == "json") return Format::Json;
    throw Error(ErrorCode::InvalidArgument, "unknown format '" + text + "' (expected csv or json)");
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string Table::to_csv() const {
    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) out += ',';
        out += columns[i];
    }
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += format_double(row[i]);
        }
        out += '\n';
    }
    return out;
}

json Table::to_json() const {
    json arr = json::array();
    for (const auto& row : rows) {
        json obj = json::object();
        for (std::size_t i = 0; i < columns.size(); ++i) {
            // JSON has no NaN; singular entries become null
            if (std::isfinite(row[i])) {
                obj[columns[i]] = row[i];
            } else {
                obj[columns[i]] = nullptr;
            }
        }
        arr.push_back(std::move(obj));
    }
    return arr;
}

std::string Table::render(Format format) const {
    if (format == Format::Csv) return to_csv();
    return to_json().dump(2) + "\n";
}

std::vector<double> default_fig2a_couplings() {
    std::vector<double> gs;
    for (int k = 0; k <= 5; ++k) gs.push_back(0.05 * k * kPi);
    return gs;
}

Table fig2a(const Fig2aParams& p) {
    const auto thetas = p.thetas.empty() ? linspace(0.0, 2.0 * kPi, 201) : p.thetas;
    Table t{{"theta", "g", "pr_H", "pr_V", "chi_m", "chi_w"}, {}};
    push_sweep_rows(t, sweep_theta(stokes_cfg(p.varphi, 0.0, p.gamma), thetas, p.gs));
    return t;
}

Table fig2a_inset(const InsetParams& p) {
    Table t{{"theta", "g", "pr_H", "pr_V", "chi_m", "chi_w"}, {}};
    push_sweep_rows(t, sweep_g(stokes_cfg(p.varphi, p.theta, p.gamma), linspace(p.g_min, p.g_max, p.g_steps)));
    return t;
}

Table fig2b(const Fig2bParams& p) {
    Table t{{"g", "theta", "mod_modular", "mod_weak"}, {}};
    const auto gs = linspace(p.g_min, p.g_max, p.g_steps);
    for (double theta : p.thetas) {
        for (const auto& r : sweep_g(stokes_cfg(p.varphi, theta, p.gamma), gs)) {
            t.rows.push_back({r.g, r.theta, r.mod_modular, r.mod_weak});
        }
    }
    return t;
}

double hidden_scale_from_seed(std::uint64_t seed) { return 0.5 + CounterRng(seed).substream(0x5ca1e).uniform(0); }

CalibrateOutcome calibrate(const CalibrateParams& p) {
    const auto cfg = stokes_cfg(p.varphi, p.theta, p.gamma);
    CalibrateOutcome out;
    out.hidden_scale = p.hidden_scale ? *p.hidden_scale : hidden_scale_from_seed(p.seed);
    if (!(out.hidden_scale > 0.0)) throw Error(ErrorCode::InvalidArgument, "hidden scale must be positive");
    const SimulatedDevice device(cfg, out.hidden_scale, p.trials, p.seed);
    // Scan far enough that the first crossing is inside the window for any scale.
    const SearchInterval interval{0.0, 2.0 * kPi / out.hidden_scale};
    out.result = calibrate_coupling(device, p.varphi, interval);
    out.realized_coupling = device.true_coupling(out.result.g_hat);
    return out;
}

json calibrate_report(const CalibrateOutcome& o) {
    const auto& r = o.result;
    json trace = json::array();
    for (const auto& s : r.trace) {
        trace.push_back({{"iteration", s.iteration},
                         {"lo", s.lo},
                         {"hi", s.hi},
                         {"setting", s.setting},
                         {"difference", s.difference}});
    }
    return json{{"g_hat", r.g_hat},
                {"residual", r.residual},
                {"iterations", r.iterations},
                {"root_family", r.root_family},
                {"standard_error", r.standard_error},
                {"tangential", r.tangential},
                {"coupling_at_crossing", r.coupling_at_crossing},
                {"hidden_scale", o.hidden_scale},
                {"realized_coupling", o.realized_coupling},
                {"warnings", r.warnings},
                {"trace", trace}};
}

Table calibrate_trace(const CalibrateOutcome& o) {
    Table t{{"iteration", "lo", "hi", "setting", "difference"}, {}};
    for (const auto& s : o.result.trace) {
        t.rows.push_back({static_cast<double>(s.iteration), s.lo, s.hi, s.setting, s.difference});
    }
    return t;
}

Table sample(const SampleParams& p) {
    const auto cfg = stokes_cfg(p.varphi, p.theta, p.gamma);
    const auto pointer = stokes_pointer(cfg);
    const auto sel = stokes_states(cfg);
    const auto counts = sample_experiment(pointer, stokes_operator(), p.g, sel, p.trials, p.seed, p.workers);
    const auto est = estimate_modulus(counts, pointer);
    const double chi_exact = relative_change(pointer, stokes_operator(), p.g, sel).chi_m;
    Table t{{"g", "theta", "trials", "n_H", "n_V", "rejected", "chi_hat", "chi_se", "chi_exact", "mod_hat", "mod_se",
             "mod_exact"},
            {}};
    t.rows.push_back({p.g, p.theta, static_cast<double>(p.trials), static_cast<double>(counts.n_mu0_accepted()),
                      static_cast<double>(counts.n_mu1_accepted()), static_cast<double>(counts.rejected), est.chi,
                      est.chi_standard_error, chi_exact, est.modulus, est.standard_error,
                      modulus_stokes(cfg, p.g)});
    return t;
}

bool VerifySummary::passed() const {
    for (const auto& c : checks) {
        if (!c.passed) return false;
    }
    return !checks.empty();
}

json VerifySummary::to_json() const {
    json list = json::array();
    std::size_t failures = 0;
    for (const auto& c : checks) {
        if (!c.passed) ++failures;
        list.push_back({{"name", c.name},
                        {"module", c.module},
                        {"value", c.value},
                        {"tolerance", c.tolerance},
                        {"passed", c.passed},
                        {"detail", c.detail}});
    }
    return json{{"seed", seed},
                {"tolerance_scale", tolerance_scale},
                {"passed", passed()},
                {"total", checks.size()},
                {"failures", failures},
                {"checks", list}};
}

json RunManifest::to_json() const {
    return json{{"subcommand", subcommand},
                {"parameters", parameters},
                {"seed", seed},
                {"tool_version", tool_version},
                {"outputs", outputs},
                {"wall_clock_seconds", wall_clock_seconds}};
}

std::string tool_version() { return MODVAL_VERSION; }

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
    f << content;
    f.close();
    if (!f) throw Error(ErrorCode::Io, "failed writing '" + path + "'");
}

std::string manifest_path(const std::string& out) { return out + ".manifest.json"; }

}  // namespace modval::cli
