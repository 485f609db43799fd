#pragma once

// Von Neumann coupling of the system to a qubit/qudit pointer through
// U(g) = exp(-i g A (x) |eta><eta|): Kraus operators, joint transitional
// probabilities, the relative change chi, Monte Carlo sampling of the
// experiment and the coupling calibration procedure.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "modval/linalg.hpp"
#include "modval/values.hpp"

namespace modval {

/// Pointer amplitudes below this are treated as absent.
inline constexpr double kAmplitudeEpsilon = 1e-10;

class PointerConfig {
  public:
    /// General qudit pointer prepared in |xi> with P = |eta><eta|.
    PointerConfig(StateVector xi, std::size_t eta_index, std::vector<std::string> labels = {});

    /// Qubit pointer gamma|0> + gamma_bar|1>, gamma_bar = sqrt(1 - gamma^2).
    static PointerConfig qubit(double gamma, std::size_t eta_index = 1,
                               std::vector<std::string> labels = {"0", "1"});

    const StateVector& xi() const noexcept { return xi_; }
    std::size_t eta_index() const noexcept { return eta_; }
    std::size_t dim() const noexcept { return xi_.dim(); }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    bool is_qubit() const noexcept { return dim() == 2; }

    /// <mu|xi>
    Complex amplitude(std::size_t mu) const;

    /// Qubit only: the outcome that is not eta, and the two amplitude moduli
    /// (gamma for the reference outcome, gamma_bar for eta).
    std::size_t reference_index() const;
    double gamma() const;
    double gamma_bar() const;

  private:
    StateVector xi_;
    std::size_t eta_;
    std::vector<std::string> labels_;
};

struct KrausOperator {
    std::size_t mu = 0;
    CMatrix matrix;  // <mu|xi> e^{-igA delta_{mu,eta}}
};

KrausOperator kraus(const PointerConfig& config, const HermitianObservable& obs, double g, std::size_t mu);
std::vector<KrausOperator> kraus_set(const PointerConfig& config, const HermitianObservable& obs, double g);

/// Pr_g(mu, phi | xi, psi) = Tr(M_mu^dagger Pi_f M_mu rho_i).
double joint_probability(const PointerConfig& config, const HermitianObservable& obs, double g,
                         const PrePostSelection& sel, std::size_t mu);

/// |<mu|xi>|^2 |<phi| e^{-igA delta_{mu,eta}} |psi>|^2, the reduced form of
/// joint_probability.
double joint_probability_closed_form(const PointerConfig& config, const HermitianObservable& obs, double g,
                                     const PrePostSelection& sel, std::size_t mu);

struct JointProbabilityTable {
    double g = 0.0;
    std::vector<double> entries;  // indexed by pointer outcome mu
    double total() const noexcept;
};

JointProbabilityTable joint_probability_table(const PointerConfig& config, const HermitianObservable& obs, double g,
                                              const PrePostSelection& sel);

struct RelativeChange {
    double chi_m = 0.0;          // Pr(eta, phi) / Pr(reference, phi)
    double chi_w_linear = 0.0;   // 1 + 2g Im<A>_w, valid for small g
    double g = 0.0;
};

RelativeChange relative_change(const PointerConfig& config, const HermitianObservable& obs, double g,
                               const PrePostSelection& sel);

/// |gamma/gamma_bar| sqrt(chi), the modulus of the modular value implied by chi.
double modulus_from_relative_change(const PointerConfig& config, double chi);

/// Normalized pointer state after the interaction and post-selection of the
/// system: proportional to sum_mu <phi|M_mu|psi> |mu>.
StateVector pointer_final_state(const PointerConfig& config, const HermitianObservable& obs, double g,
                                const PrePostSelection& sel);

struct ExperimentCounts {
    std::vector<std::uint64_t> accepted;  // per pointer outcome, post-selection succeeded
    std::uint64_t rejected = 0;           // post-selection failed, any mu
    std::uint64_t seed = 0;
    std::uint64_t total = 0;

    std::uint64_t n_mu0_accepted() const { return accepted.at(0); }
    std::uint64_t n_mu1_accepted() const { return accepted.at(1); }
};

/// Draws N independent trials of (pointer outcome, post-selection success)
/// from the exact Born probabilities. Trial t uses counter t of the seeded
/// stream, so the counts do not depend on the number of workers.
ExperimentCounts sample_experiment(const PointerConfig& config, const HermitianObservable& obs, double g,
                                   const PrePostSelection& sel, std::uint64_t trials, std::uint64_t seed,
                                   unsigned workers = 1);

/// Same, from a precomputed outcome distribution (entries of `accept` plus
/// the implied rejection mass).
ExperimentCounts sample_outcomes(const std::vector<double>& accept, std::uint64_t trials, std::uint64_t seed,
                                 unsigned workers = 1);

struct ModulusEstimate {
    double modulus = 0.0;
    double standard_error = 0.0;
    double chi = 0.0;
    double chi_standard_error = 0.0;
};

/// |gamma/gamma_bar| sqrt(n_eta / n_ref) with delta-method standard errors.
ModulusEstimate estimate_modulus(const ExperimentCounts& counts, const PointerConfig& config);

// ---------------------------------------------------------------------------
// Calibration

struct DeviceReading {
    double pr_H = 0.0;
    double pr_V = 0.0;
    /// Standard error of pr_H - pr_V; zero for an exact device.
    double difference_error = 0.0;
    double difference() const noexcept { return pr_H - pr_V; }
};

/// Black box mapping the (uncalibrated) coupling control to joint probabilities.
using Device = std::function<DeviceReading(double setting)>;

struct SearchInterval {
    double lo = 0.0;
    double hi = 2.0 * kPi;
};

struct CalibrationOptions {
    int scan_steps = 256;
    double bracket_tolerance = 1e-13;
    int max_iterations = 200;
    /// A scanned difference counts as signed only when |D| > significance * error.
    double significance = 3.0;
    /// Differences this small are treated as zero (rounding noise of an exact device).
    double zero_floor = 1e-13;
    /// Accept a touching (double) root when no sign change exists and the
    /// minimum |D| falls below this.
    double tangent_tolerance = 1e-12;
};

struct CalibrationStep {
    int iteration = 0;
    double lo = 0.0;
    double hi = 0.0;
    double setting = 0.0;
    double difference = 0.0;
};

struct CalibrationResult {
    double g_hat = 0.0;           // control setting where Pr(H) = Pr(V)
    double residual = 0.0;        // Pr(H) - Pr(V) at g_hat
    double standard_error = 0.0;  // of g_hat; zero for an exact device
    int iterations = 0;
    bool tangential = false;      // double root found without a sign change
    /// Smallest positive member of {k pi} U {-varphi + k pi}: the coupling the
    /// device realizes at g_hat.
    double coupling_at_crossing = 0.0;
    /// Both root families on [0, 2pi].
    std::vector<double> root_family;
    std::vector<CalibrationStep> trace;
    std::vector<std::string> warnings;
};

CalibrationResult calibrate_coupling(const Device& device, double varphi, SearchInterval interval = {},
                                     CalibrationOptions options = {});

}  // namespace modval
