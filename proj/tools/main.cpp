// modval: figure datasets, calibration, Monte Carlo runs and self-verification
// for modular values of pre/post-selected systems.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cli/commands.hpp"
#include "modval/error.hpp"
#include "modval/stokes.hpp"

using namespace modval;
using namespace modval::cli;

namespace {

struct Common {
    std::string varphi = "-0.2pi";
    std::string gamma = "0.70710678118654752440";
    std::string out;
    std::string format = "csv";
    std::uint64_t seed = 1;
};

void add_common(CLI::App* cmd, Common& c, bool with_seed) {
    cmd->add_option("--varphi", c.varphi, "pre-selection angle (radians, or e.g. -0.2pi)");
    cmd->add_option("--gamma", c.gamma, "pointer amplitude on H");
    cmd->add_option("--out", c.out, "output file (default stdout); writes <out>.manifest.json alongside");
    cmd->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    if (with_seed) cmd->add_option("--seed", c.seed, "RNG seed");
}

double parse_gamma(const std::string& s) {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw Error(ErrorCode::InvalidArgument, "cannot parse gamma '" + s + "'");
    return v;
}

int emit(const std::string& subcommand, const Common& c, json parameters, const std::string& body,
         std::chrono::steady_clock::time_point start) {
    if (c.out.empty()) {
        std::fwrite(body.data(), 1, body.size(), stdout);
        return 0;
    }
    write_file(c.out, body);
    RunManifest m;
    m.subcommand = subcommand;
    m.parameters = std::move(parameters);
    m.seed = c.seed;
    m.tool_version = tool_version();
    m.outputs = {c.out};
    m.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_file(manifest_path(c.out), m.to_json().dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Modular values: figure datasets, calibration and verification"};
    app.set_version_flag("--version", tool_version());
    app.require_subcommand(1);

    Common c2a, cin, c2b, ccal, csam, cver;
    std::vector<std::string> g_list;
    int theta_steps = 201;
    auto* fig2a_cmd = app.add_subcommand("fig2a", "Pr(H), Pr(V), chi over theta for a list of couplings");
    add_common(fig2a_cmd, c2a, false);
    fig2a_cmd->add_option("--g", g_list, "couplings (comma separated)")->delimiter(',');
    fig2a_cmd->add_option("--theta-steps", theta_steps, "theta grid points on [0, 2pi]")->check(CLI::PositiveNumber);

    std::string inset_theta = "1.5pi", inset_gmin = "0", inset_gmax = "pi";
    int inset_steps = 201;
    auto* inset_cmd = app.add_subcommand("fig2a-inset", "chi_m and chi_w over g at fixed theta");
    add_common(inset_cmd, cin, false);
    inset_cmd->add_option("--theta", inset_theta, "post-selection angle");
    inset_cmd->add_option("--g-min", inset_gmin);
    inset_cmd->add_option("--g-max", inset_gmax);
    inset_cmd->add_option("--g-steps", inset_steps)->check(CLI::PositiveNumber);

    std::vector<std::string> b_thetas;
    std::string b_gmin = "0", b_gmax = "2pi";
    int b_steps = 201;
    auto* fig2b_cmd = app.add_subcommand("fig2b", "|S_m| and |<S>_w| over g");
    add_common(fig2b_cmd, c2b, false);
    fig2b_cmd->add_option("--theta", b_thetas, "post-selection angles (comma separated)")->delimiter(',');
    fig2b_cmd->add_option("--g-min", b_gmin);
    fig2b_cmd->add_option("--g-max", b_gmax);
    fig2b_cmd->add_option("--g-steps", b_steps)->check(CLI::PositiveNumber);

    ccal.varphi = "-0.3pi";
    ccal.format = "json";
    std::string cal_theta = "1.5pi";
    std::uint64_t cal_trials = 0;
    std::optional<double> cal_scale;
    auto* cal_cmd = app.add_subcommand("calibrate", "find the setting where Pr(H) = Pr(V) on a simulated device");
    add_common(cal_cmd, ccal, true);
    cal_cmd->add_option("--theta", cal_theta, "post-selection angle");
    cal_cmd->add_option("--trials", cal_trials, "Monte Carlo trials per step (0: exact device)");
    cal_cmd->add_option("--hidden-scale", cal_scale, "true coupling per unit setting (default: drawn from seed)");

    std::string sam_theta = "1.5pi", sam_g = "0.1pi";
    std::uint64_t sam_trials = 1000000;
    unsigned sam_workers = 1;
    auto* sam_cmd = app.add_subcommand("sample", "Monte Carlo estimate of chi and |S_m|");
    add_common(sam_cmd, csam, true);
    sam_cmd->add_option("--theta", sam_theta, "post-selection angle");
    sam_cmd->add_option("--g", sam_g, "coupling");
    sam_cmd->add_option("--trials", sam_trials)->check(CLI::PositiveNumber);
    sam_cmd->add_option("--workers", sam_workers)->check(CLI::PositiveNumber);

    cver.format = "json";
    cver.seed = VerifyOptions{}.seed;
    double tolerance_scale = 1.0;
    auto* ver_cmd = app.add_subcommand("verify", "run the invariant suite; nonzero exit on failure");
    ver_cmd->add_option("--seed", cver.seed, "RNG seed");
    ver_cmd->add_option("--out", cver.out, "output file (default stdout)");
    ver_cmd->add_option("--format", cver.format)->check(CLI::IsMember({"csv", "json"}));
    ver_cmd->add_option("--tolerance-scale", tolerance_scale, "test mode: multiply every tolerance");

    CLI11_PARSE(app, argc, argv);
    const auto start = std::chrono::steady_clock::now();

    try {
        if (*fig2a_cmd) {
            Fig2aParams p;
            p.varphi = parse_angle(c2a.varphi);
            p.gamma = parse_gamma(c2a.gamma);
            if (!g_list.empty()) p.gs = parse_angle_list(g_list);
            p.thetas = modval::linspace(0.0, 2.0 * kPi, theta_steps);
            const json params{{"varphi", p.varphi}, {"gamma", p.gamma}, {"g", p.gs}, {"theta_steps", theta_steps}};
            return emit("fig2a", c2a, params, fig2a(p).render(parse_format(c2a.format)), start);
        }
        if (*inset_cmd) {
            InsetParams p;
            p.varphi = parse_angle(cin.varphi);
            p.gamma = parse_gamma(cin.gamma);
            p.theta = parse_angle(inset_theta);
            p.g_min = parse_angle(inset_gmin);
            p.g_max = parse_angle(inset_gmax);
            p.g_steps = inset_steps;
            const json params{{"varphi", p.varphi}, {"gamma", p.gamma}, {"theta", p.theta},
                              {"g_min", p.g_min},   {"g_max", p.g_max}, {"g_steps", p.g_steps}};
            return emit("fig2a-inset", cin, params, fig2a_inset(p).render(parse_format(cin.format)), start);
        }
        if (*fig2b_cmd) {
            Fig2bParams p;
            p.varphi = parse_angle(c2b.varphi);
            p.gamma = parse_gamma(c2b.gamma);
            if (!b_thetas.empty()) p.thetas = parse_angle_list(b_thetas);
            p.g_min = parse_angle(b_gmin);
            p.g_max = parse_angle(b_gmax);
            p.g_steps = b_steps;
            const json params{{"varphi", p.varphi}, {"gamma", p.gamma}, {"theta", p.thetas},
                              {"g_min", p.g_min},   {"g_max", p.g_max}, {"g_steps", p.g_steps}};
            return emit("fig2b", c2b, params, fig2b(p).render(parse_format(c2b.format)), start);
        }
        if (*cal_cmd) {
            CalibrateParams p;
            p.varphi = parse_angle(ccal.varphi);
            p.gamma = parse_gamma(ccal.gamma);
            p.theta = parse_angle(cal_theta);
            p.trials = cal_trials;
            p.seed = ccal.seed;
            p.hidden_scale = cal_scale;
            const auto outcome = calibrate(p);
            const std::string body = parse_format(ccal.format) == Format::Json
                                         ? calibrate_report(outcome).dump(2) + "\n"
                                         : calibrate_trace(outcome).to_csv();
            const json params{{"varphi", p.varphi},
                              {"gamma", p.gamma},
                              {"theta", p.theta},
                              {"trials", p.trials},
                              {"hidden_scale", outcome.hidden_scale}};
            return emit("calibrate", ccal, params, body, start);
        }
        if (*sam_cmd) {
            SampleParams p;
            p.varphi = parse_angle(csam.varphi);
            p.gamma = parse_gamma(csam.gamma);
            p.theta = parse_angle(sam_theta);
            p.g = parse_angle(sam_g);
            p.trials = sam_trials;
            p.seed = csam.seed;
            p.workers = sam_workers;
            const json params{{"varphi", p.varphi}, {"gamma", p.gamma},   {"theta", p.theta},
                              {"g", p.g},           {"trials", p.trials}, {"workers", p.workers}};
            return emit("sample", csam, params, sample(p).render(parse_format(csam.format)), start);
        }
        if (*ver_cmd) {
            VerifyOptions opts;
            opts.seed = cver.seed;
            opts.tolerance_scale = tolerance_scale;
            const auto summary = run_verification(opts);
            std::string body;
            if (parse_format(cver.format) == Format::Json) {
                body = summary.to_json().dump(2) + "\n";
            } else {
                body = "module,name,value,tolerance,passed\n";
                for (const auto& c : summary.checks) {
                    body += c.module + "," + c.name + "," + format_double(c.value) + "," + format_double(c.tolerance) +
                            "," + (c.passed ? "1" : "0") + "\n";
                }
            }
            emit("verify", cver, json{{"tolerance_scale", tolerance_scale}}, body, start);
            return summary.passed() ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "modval: error: %s\n", e.what());
        return 2;
    }
    return 0;
}
