#pragma once

// Worked example: a polarization qubit measured through the Stokes operator
// S = |H><H| - |V><V|, pre-selected in (|H> - e^{i varphi}|V>)/sqrt(2) and
// post-selected in cos(theta/2)|H> + sin(theta/2)|V>, with a qubit pointer
// gamma|H> + gamma_bar|V> coupled through P = |V><V|.

#include <cstdint>
#include <vector>

#include "modval/linalg.hpp"
#include "modval/pointer.hpp"
#include "modval/values.hpp"

namespace modval {

struct StokesExampleConfig {
    double varphi = -0.2 * kPi;  // lateral angle of the pre-selected state
    double theta = 1.5 * kPi;    // azimuthal angle of the post-selected state
    double gamma = 0.70710678118654752440;

    double gamma_bar() const;
    void validate() const;
};

/// S = diag(1, -1) in the {H, V} basis.
HermitianObservable stokes_operator();

/// Pointer gamma|H> + gamma_bar|V>, eta = V.
PointerConfig stokes_pointer(const StokesExampleConfig& cfg);

PrePostSelection stokes_states(const StokesExampleConfig& cfg);

/// gamma^2 (1 - cos(varphi) sin(theta)) / 2
double pr_H(const StokesExampleConfig& cfg);
/// gamma_bar^2 (1 - cos(2g + varphi) sin(theta)) / 2
double pr_V(const StokesExampleConfig& cfg, double g);

/// sqrt[(1 - cos(2g + varphi) sin(theta)) / (1 - cos(varphi) sin(theta))]
double modulus_stokes(const StokesExampleConfig& cfg, double g);

/// {k pi} U {-varphi + k pi} for k = 0..k_max, sorted, duplicates merged.
std::vector<double> no_change_points(double varphi, int k_max);

/// Roots of Pr(H) - Pr(V) on [lo, hi] located numerically from the general
/// joint probabilities: scan points where |D| <= 1e-13 plus a bisection of
/// every sign change between neighbours. Touching roots between scan points
/// are not found.
std::vector<double> locate_no_change_points(const StokesExampleConfig& cfg, double lo, double hi,
                                            int scan_steps = 1000);

struct SweepRow {
    double theta = 0.0;
    double g = 0.0;
    double pr_H = 0.0;
    double pr_V = 0.0;
    double chi_m = 0.0;
    double chi_w = 0.0;
    double mod_modular = 0.0;
    double mod_weak = 0.0;
    double arg_modular = 0.0;            // principal value
    double arg_modular_unwrapped = 0.0;  // continued along the sweep axis
    /// Largest disagreement between the closed forms and the general
    /// machinery on this row.
    double crosscheck_residual = 0.0;
    bool singular = false;
};

/// One row per (theta, g) pair, theta outermost.
std::vector<SweepRow> sweep_theta(const StokesExampleConfig& base, const std::vector<double>& thetas,
                                  const std::vector<double>& gs);
std::vector<SweepRow> sweep_g(const StokesExampleConfig& cfg, const std::vector<double>& gs);

/// n evenly spaced points from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, int n);

/// Adds multiples of 2 pi so consecutive values differ by less than pi.
std::vector<double> unwrap_phases(const std::vector<double>& raw);

/// Simulated "Device g~": a Stokes instance whose true coupling is
/// hidden_scale * setting. With trials_per_step == 0 the readings are exact;
/// otherwise each reading is a Monte Carlo estimate from that many trials,
/// drawn from a substream keyed on the setting.
class SimulatedDevice {
  public:
    SimulatedDevice(StokesExampleConfig cfg, double hidden_scale, std::uint64_t trials_per_step = 0,
                    std::uint64_t seed = 0);

    DeviceReading operator()(double setting) const;
    double true_coupling(double setting) const noexcept { return scale_ * setting; }
    double hidden_scale() const noexcept { return scale_; }

  private:
    StokesExampleConfig cfg_;
    double scale_;
    std::uint64_t trials_;
    std::uint64_t seed_;
};

}  // namespace modval
