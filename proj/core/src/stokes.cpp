#include "modval/stokes.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>

#include "modval/error.hpp"
#include "modval/rng.hpp"

namespace modval {

namespace {
constexpr std::size_t kH = 0;
constexpr std::size_t kV = 1;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}  // namespace

double StokesExampleConfig::gamma_bar() const { return std::sqrt(1.0 - gamma * gamma); }

void StokesExampleConfig::validate() const {
    if (!(gamma > 0.0 && gamma < 1.0)) throw Error(ErrorCode::InvalidArgument, "gamma must lie in (0, 1)");
    if (!std::isfinite(varphi) || !std::isfinite(theta)) {
        throw Error(ErrorCode::InvalidArgument, "angles must be finite");
    }
}

HermitianObservable stokes_operator() {
    const std::array<double, 2> diag{1.0, -1.0};
    return HermitianObservable::diagonal(diag);
}

PointerConfig stokes_pointer(const StokesExampleConfig& cfg) {
    cfg.validate();
    return PointerConfig::qubit(cfg.gamma, kV, {"H", "V"});
}

PrePostSelection stokes_states(const StokesExampleConfig& cfg) {
    cfg.validate();
    const double r = 1.0 / std::sqrt(2.0);
    StateVector psi{Complex(r, 0.0), -r * std::polar(1.0, cfg.varphi)};
    StateVector phi{Complex(std::cos(0.5 * cfg.theta), 0.0), Complex(std::sin(0.5 * cfg.theta), 0.0)};
    return PrePostSelection(std::move(psi), std::move(phi));
}

double pr_H(const StokesExampleConfig& cfg) {
    return cfg.gamma * cfg.gamma * (1.0 - std::cos(cfg.varphi) * std::sin(cfg.theta)) / 2.0;
}

double pr_V(const StokesExampleConfig& cfg, double g) {
    const double gb = cfg.gamma_bar();
    return gb * gb * (1.0 - std::cos(2.0 * g + cfg.varphi) * std::sin(cfg.theta)) / 2.0;
}

double modulus_stokes(const StokesExampleConfig& cfg, double g) {
    const double denom = 1.0 - std::cos(cfg.varphi) * std::sin(cfg.theta);
    if (!(denom > tol::kOverlap)) {
        throw Error(ErrorCode::SingularSelection, "1 - cos(varphi) sin(theta) vanishes");
    }
    const double num = std::max(0.0, 1.0 - std::cos(2.0 * g + cfg.varphi) * std::sin(cfg.theta));
    return std::sqrt(num / denom);
}

std::vector<double> no_change_points(double varphi, int k_max) {
    if (k_max < 0) throw Error(ErrorCode::InvalidArgument, "k_max must be non-negative");
    std::vector<double> roots;
    for (int k = 0; k <= k_max; ++k) {
        roots.push_back(k * kPi);
        roots.push_back(-varphi + k * kPi);
    }
    std::sort(roots.begin(), roots.end());
    std::vector<double> out;
    for (double r : roots) {
        if (out.empty() || std::abs(r - out.back()) > 1e-12) out.push_back(r);
    }
    return out;
}

std::vector<double> locate_no_change_points(const StokesExampleConfig& cfg, double lo, double hi, int scan_steps) {
    if (!(hi > lo) || scan_steps < 2) throw Error(ErrorCode::InvalidArgument, "bad root search interval");
    const auto sel = stokes_states(cfg);
    const auto pointer = stokes_pointer(cfg);
    const auto s = stokes_operator();
    auto diff = [&](double g) {
        return joint_probability(pointer, s, g, sel, 0) - joint_probability(pointer, s, g, sel, 1);
    };
    constexpr double kFloor = 1e-13;

    const auto grid = linspace(lo, hi, scan_steps + 1);
    std::vector<double> values(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) values[k] = diff(grid[k]);

    std::vector<double> roots;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (std::abs(values[k]) <= kFloor) {
            roots.push_back(grid[k]);
            continue;
        }
        if (k + 1 == grid.size() || std::abs(values[k + 1]) <= kFloor) continue;
        if ((values[k] > 0.0) == (values[k + 1] > 0.0)) continue;
        double a = grid[k], b = grid[k + 1];
        const bool a_positive = values[k] > 0.0;
        for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
            const double m = 0.5 * (a + b);
            if (m <= a || m >= b) break;
            const double d = diff(m);
            if (d == 0.0) {
                a = b = m;
                break;
            }
            if ((d > 0.0) == a_positive) {
                a = m;
            } else {
                b = m;
            }
        }
        roots.push_back(0.5 * (a + b));
    }
    std::sort(roots.begin(), roots.end());
    std::vector<double> out;
    for (double r : roots) {
        if (out.empty() || r - out.back() > 1e-9) out.push_back(r);
    }
    return out;
}

std::vector<double> linspace(double lo, double hi, int n) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "linspace needs at least one point");
    std::vector<double> out(static_cast<std::size_t>(n));
    if (n == 1) {
        out[0] = lo;
        return out;
    }
    const double step = (hi - lo) / (n - 1);
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo + i * step;
    out.back() = hi;
    return out;
}

std::vector<double> unwrap_phases(const std::vector<double>& raw) {
    std::vector<double> out(raw.size());
    double offset = 0.0;
    double previous = kNaN;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (std::isnan(raw[i])) {
            out[i] = kNaN;
            continue;
        }
        double v = raw[i] + offset;
        if (!std::isnan(previous)) {
            const double shift = 2.0 * kPi * std::round((previous - v) / (2.0 * kPi));
            v += shift;
            offset += shift;
        }
        out[i] = v;
        previous = v;
    }
    return out;
}

namespace {

void require_monotone(const std::vector<double>& grid, const char* what) {
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) {
            throw Error(ErrorCode::InvalidArgument, std::string(what) + " grid must be strictly increasing");
        }
    }
}

SweepRow make_row(const StokesExampleConfig& cfg, const HermitianObservable& s, const PointerConfig& pointer,
                  double g) {
    SweepRow row;
    row.theta = cfg.theta;
    row.g = g;
    row.pr_H = pr_H(cfg);
    row.pr_V = pr_V(cfg, g);
    try {
        const PrePostSelection sel = stokes_states(cfg);
        const ComplexValueResult weak = weak_value(s, sel);
        const ComplexValueResult modular = modular_value(s, g, sel);
        row.chi_m = row.pr_V / row.pr_H;
        row.chi_w = 1.0 + 2.0 * g * weak.value.imag();
        row.mod_modular = modulus_stokes(cfg, g);
        row.mod_weak = weak.modulus;
        row.arg_modular = modular.argument;

        const double general_H = joint_probability(pointer, s, g, sel, kH);
        const double general_V = joint_probability(pointer, s, g, sel, kV);
        row.crosscheck_residual = std::max({std::abs(general_H - row.pr_H), std::abs(general_V - row.pr_V),
                                            std::abs(modular.modulus - row.mod_modular)});
    } catch (const Error& e) {
        if (e.code() != ErrorCode::SingularSelection) throw;
        row.singular = true;
        row.chi_m = row.chi_w = row.mod_modular = row.mod_weak = row.arg_modular = kNaN;
    }
    return row;
}

}  // namespace

std::vector<SweepRow> sweep_theta(const StokesExampleConfig& base, const std::vector<double>& thetas,
                                  const std::vector<double>& gs) {
    require_monotone(thetas, "theta");
    require_monotone(gs, "g");
    const HermitianObservable s = stokes_operator();
    const PointerConfig pointer = stokes_pointer(base);

    std::vector<SweepRow> rows;
    rows.reserve(thetas.size() * gs.size());
    for (double theta : thetas) {
        StokesExampleConfig cfg = base;
        cfg.theta = theta;
        for (double g : gs) rows.push_back(make_row(cfg, s, pointer, g));
    }
    // Unwrap along theta separately for each g.
    for (std::size_t j = 0; j < gs.size(); ++j) {
        std::vector<double> raw;
        for (std::size_t i = 0; i < thetas.size(); ++i) raw.push_back(rows[i * gs.size() + j].arg_modular);
        const std::vector<double> unwrapped = unwrap_phases(raw);
        for (std::size_t i = 0; i < thetas.size(); ++i) rows[i * gs.size() + j].arg_modular_unwrapped = unwrapped[i];
    }
    return rows;
}

std::vector<SweepRow> sweep_g(const StokesExampleConfig& cfg, const std::vector<double>& gs) {
    require_monotone(gs, "g");
    const HermitianObservable s = stokes_operator();
    const PointerConfig pointer = stokes_pointer(cfg);
    std::vector<SweepRow> rows;
    rows.reserve(gs.size());
    std::vector<double> raw;
    for (double g : gs) {
        rows.push_back(make_row(cfg, s, pointer, g));
        raw.push_back(rows.back().arg_modular);
    }
    const std::vector<double> unwrapped = unwrap_phases(raw);
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i].arg_modular_unwrapped = unwrapped[i];
    return rows;
}

// ---------------------------------------------------------------------------

SimulatedDevice::SimulatedDevice(StokesExampleConfig cfg, double hidden_scale, std::uint64_t trials_per_step,
                                 std::uint64_t seed)
    : cfg_(cfg), scale_(hidden_scale), trials_(trials_per_step), seed_(seed) {
    cfg_.validate();
    if (!(hidden_scale > 0.0)) throw Error(ErrorCode::InvalidArgument, "hidden scale must be positive");
}

DeviceReading SimulatedDevice::operator()(double setting) const {
    const double g = true_coupling(setting);
    if (trials_ == 0) return DeviceReading{pr_H(cfg_), pr_V(cfg_, g), 0.0};

    const std::uint64_t stream = CounterRng(seed_).substream(std::bit_cast<std::uint64_t>(setting)).bits(0);
    const ExperimentCounts counts = sample_outcomes({pr_H(cfg_), pr_V(cfg_, g)}, trials_, stream);
    const double n = static_cast<double>(trials_);
    const double h = static_cast<double>(counts.accepted[kH]) / n;
    const double v = static_cast<double>(counts.accepted[kV]) / n;
    // Var(n_H - n_V)/N^2 for a multinomial draw.
    const double var = std::max(0.0, h + v - (h - v) * (h - v)) / n;
    return DeviceReading{h, v, std::sqrt(var)};
}

}  // namespace modval
