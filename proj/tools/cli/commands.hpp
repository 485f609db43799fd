#pragma once

// Subcommands of the modval tool, exposed as plain functions so they can be
// driven from tests without spawning a process.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "modval/linalg.hpp"
#include "modval/pointer.hpp"

namespace modval::cli {

using nlohmann::json;

enum class Format { Csv, Json };

/// "0.2pi", "-pi", "pi/2" and "1.3" (radians).
double parse_angle(const std::string& text);
std::vector<double> parse_angle_list(const std::vector<std::string>& items);
Format parse_format(const std::string& text);

/// printf("%.17g")
std::string format_double(double x);

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::string to_csv() const;
    json to_json() const;
    std::string render(Format format) const;
};

/// Default g list 0, 0.05pi, ..., 0.25pi.
std::vector<double> default_fig2a_couplings();

struct Fig2aParams {
    double varphi = -0.2 * kPi;
    double gamma = 0.70710678118654752440;
    std::vector<double> gs = default_fig2a_couplings();
    std::vector<double> thetas;  // empty: 201 points on [0, 2pi]
};

/// theta,g,pr_H,pr_V,chi_m,chi_w; theta outermost.
Table fig2a(const Fig2aParams& p);

struct InsetParams {
    double varphi = -0.2 * kPi;
    double gamma = 0.70710678118654752440;
    double theta = 1.5 * kPi;
    double g_min = 0.0;
    double g_max = kPi;
    int g_steps = 201;
};

/// Same columns as fig2a, swept in g at one theta.
Table fig2a_inset(const InsetParams& p);

struct Fig2bParams {
    double varphi = -0.2 * kPi;
    double gamma = 0.70710678118654752440;
    std::vector<double> thetas{0.5 * kPi, 1.5 * kPi};
    double g_min = 0.0;
    double g_max = 2.0 * kPi;
    int g_steps = 201;
};

/// g,theta,mod_modular,mod_weak; one block per theta.
Table fig2b(const Fig2bParams& p);

struct CalibrateParams {
    double varphi = -0.3 * kPi;
    double theta = 1.5 * kPi;
    double gamma = 0.70710678118654752440;
    std::uint64_t trials = 0;  // per step; 0 is an exact device
    std::uint64_t seed = 1;
    std::optional<double> hidden_scale;  // drawn from the seed when absent
};

/// Hidden scale in [0.5, 1.5) derived from the seed.
double hidden_scale_from_seed(std::uint64_t seed);

struct CalibrateOutcome {
    CalibrationResult result;
    double hidden_scale = 1.0;
    double realized_coupling = 0.0;  // hidden_scale * g_hat
};

CalibrateOutcome calibrate(const CalibrateParams& p);
json calibrate_report(const CalibrateOutcome& outcome);
/// iteration,lo,hi,setting,difference
Table calibrate_trace(const CalibrateOutcome& outcome);

struct SampleParams {
    double varphi = -0.2 * kPi;
    double theta = 1.5 * kPi;
    double gamma = 0.70710678118654752440;
    double g = 0.1 * kPi;
    std::uint64_t trials = 1000000;
    std::uint64_t seed = 1;
    unsigned workers = 1;
};

/// g,theta,trials,n_H,n_V,rejected,chi_hat,chi_se,chi_exact,mod_hat,mod_se,mod_exact
Table sample(const SampleParams& p);

struct VerifyOptions {
    std::uint64_t seed = 20240601;
    /// Multiplies every tolerance; values below 1 are a test-mode corruption.
    double tolerance_scale = 1.0;
};

struct CheckResult {
    std::string name;
    std::string module;
    double value = 0.0;  // worst residual observed
    double tolerance = 0.0;
    bool passed = false;
    std::string detail;
};

struct VerifySummary {
    std::uint64_t seed = 0;
    double tolerance_scale = 1.0;
    std::vector<CheckResult> checks;
    bool passed() const;
    json to_json() const;
};

VerifySummary run_verification(const VerifyOptions& options);

struct RunManifest {
    std::string subcommand;
    json parameters = json::object();
    std::uint64_t seed = 0;
    std::string tool_version;
    std::vector<std::string> outputs;
    double wall_clock_seconds = 0.0;

    json to_json() const;
};

std::string tool_version();

/// Writes content to path, throwing Error(Io) on failure.
void write_file(const std::string& path, const std::string& content);

/// <out>.manifest.json
std::string manifest_path(const std::string& out);

}  // namespace modval::cli
