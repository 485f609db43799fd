#include "modval/pointer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "modval/error.hpp"
#include "modval/rng.hpp"
#include "modval/stokes.hpp"

namespace modval {

// ---------------------------------------------------------------------------
// PointerConfig

PointerConfig::PointerConfig(StateVector xi, std::size_t eta_index, std::vector<std::string> labels)
    : xi_(xi.normalized()), eta_(eta_index), labels_(std::move(labels)) {
    if (eta_ >= xi_.dim()) {
        throw Error(ErrorCode::InvalidArgument, "eta index " + std::to_string(eta_) + " out of range");
    }
    if (labels_.empty()) {
        for (std::size_t mu = 0; mu < xi_.dim(); ++mu) labels_.push_back(std::to_string(mu));
    }
    if (labels_.size() != xi_.dim()) {
        throw Error(ErrorCode::InvalidArgument, "pointer labels do not match the pointer dimension");
    }
}

PointerConfig PointerConfig::qubit(double gamma, std::size_t eta_index, std::vector<std::string> labels) {
    if (!(gamma > kAmplitudeEpsilon && gamma < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "qubit pointer amplitude gamma must lie in (0, 1)");
    }
    const double gamma_bar = std::sqrt(1.0 - gamma * gamma);
    if (gamma_bar <= kAmplitudeEpsilon) {
        throw Error(ErrorCode::InvalidArgument, "qubit pointer amplitude gamma_bar vanishes");
    }
    if (eta_index > 1) throw Error(ErrorCode::InvalidArgument, "qubit eta index must be 0 or 1");
    // gamma sits on the reference outcome, gamma_bar on eta.
    const Complex a0 = eta_index == 1 ? gamma : gamma_bar;
    const Complex a1 = eta_index == 1 ? gamma_bar : gamma;
    return PointerConfig(StateVector{a0, a1}, eta_index, std::move(labels));
}

Complex PointerConfig::amplitude(std::size_t mu) const {
    if (mu >= dim()) throw Error(ErrorCode::InvalidArgument, "pointer outcome " + std::to_string(mu) + " out of range");
    return xi_[mu];
}

std::size_t PointerConfig::reference_index() const {
    if (!is_qubit()) throw Error(ErrorCode::InvalidArgument, "operation requires a qubit pointer");
    return 1 - eta_;
}

double PointerConfig::gamma() const { return std::abs(amplitude(reference_index())); }

double PointerConfig::gamma_bar() const {
    reference_index();
    return std::abs(amplitude(eta_));
}

// ---------------------------------------------------------------------------
// Kraus operators and joint probabilities

namespace {

CMatrix kraus_matrix(const PointerConfig& config, const CMatrix& evolution, std::size_t mu) {
    const auto n = evolution.rows();
    const Complex amp = config.amplitude(mu);
    if (mu == config.eta_index()) return amp * evolution;
    return amp * CMatrix::Identity(n, n);
}

}  // namespace

KrausOperator kraus(const PointerConfig& config, const HermitianObservable& obs, double g, std::size_t mu) {
    return KrausOperator{mu, kraus_matrix(config, unitary(obs, g), mu)};
}

std::vector<KrausOperator> kraus_set(const PointerConfig& config, const HermitianObservable& obs, double g) {
    const CMatrix u = unitary(obs, g);
    std::vector<KrausOperator> out;
    out.reserve(config.dim());
    for (std::size_t mu = 0; mu < config.dim(); ++mu) out.push_back({mu, kraus_matrix(config, u, mu)});
    return out;
}

double joint_probability(const PointerConfig& config, const HermitianObservable& obs, double g,
                         const PrePostSelection& sel, std::size_t mu) {
    require_same_dim(obs.dim(), sel.dim(), "joint_probability");
    const CMatrix m = kraus(config, obs, g, mu).matrix;
    const CVector& psi = sel.psi().amplitudes();
    const CVector& phi = sel.phi().amplitudes();
    const CMatrix rho = psi * psi.adjoint();
    const CMatrix pi_f = phi * phi.adjoint();
    return (m.adjoint() * pi_f * m * rho).trace().real();
}

double joint_probability_closed_form(const PointerConfig& config, const HermitianObservable& obs, double g,
                                     const PrePostSelection& sel, std::size_t mu) {
    require_same_dim(obs.dim(), sel.dim(), "joint_probability_closed_form");
    const double weight = std::norm(config.amplitude(mu));
    const Complex transition =
        mu == config.eta_index() ? inner(sel.phi(), evolve(obs, g, sel.psi())) : sel.overlap();
    return weight * std::norm(transition);
}

double JointProbabilityTable::total() const noexcept { return std::accumulate(entries.begin(), entries.end(), 0.0); }

JointProbabilityTable joint_probability_table(const PointerConfig& config, const HermitianObservable& obs, double g,
                                              const PrePostSelection& sel) {
    JointProbabilityTable table{g, {}};
    for (std::size_t mu = 0; mu < config.dim(); ++mu) {
        table.entries.push_back(joint_probability(config, obs, g, sel, mu));
    }
    return table;
}

RelativeChange relative_change(const PointerConfig& config, const HermitianObservable& obs, double g,
                               const PrePostSelection& sel) {
    const std::size_t ref = config.reference_index();
    const double p_ref = joint_probability(config, obs, g, sel, ref);
    const double p_eta = joint_probability(config, obs, g, sel, config.eta_index());
    if (!(p_ref > 0.0)) {
        throw Error(ErrorCode::SingularSelection, "reference outcome has zero joint probability");
    }
    const double im_weak = weak_value(obs, sel).value.imag();
    return RelativeChange{p_eta / p_ref, 1.0 + 2.0 * g * im_weak, g};
}

double modulus_from_relative_change(const PointerConfig& config, double chi) {
    return std::abs(config.gamma() / config.gamma_bar()) * std::sqrt(chi);
}

StateVector pointer_final_state(const PointerConfig& config, const HermitianObservable& obs, double g,
                                const PrePostSelection& sel) {
    require_same_dim(obs.dim(), sel.dim(), "pointer_final_state");
    CVector amps(static_cast<Eigen::Index>(config.dim()));
    const CMatrix u = unitary(obs, g);
    for (std::size_t mu = 0; mu < config.dim(); ++mu) {
        amps(static_cast<Eigen::Index>(mu)) = matrix_element(sel.phi(), kraus_matrix(config, u, mu), sel.psi());
    }
    if (amps.norm() <= tol::kOverlap) {
        throw Error(ErrorCode::SingularSelection, "post-selection amplitude vanishes for every pointer outcome");
    }
    // Strip the common global phase of <phi|psi> so g = 0 returns |xi> itself.
    amps *= std::polar(1.0, -std::arg(sel.overlap()));
    return StateVector(amps).normalized();
}

// ---------------------------------------------------------------------------
// Monte Carlo

ExperimentCounts sample_outcomes(const std::vector<double>& accept, std::uint64_t trials, std::uint64_t seed,
                                 unsigned workers) {
    if (trials == 0) throw Error(ErrorCode::InvalidArgument, "number of trials must be at least 1");
    std::vector<double> cumulative(accept.size());
    double running = 0.0;
    for (std::size_t k = 0; k < accept.size(); ++k) {
        if (!(accept[k] >= 0.0)) throw Error(ErrorCode::InvalidArgument, "negative outcome probability");
        running += accept[k];
        cumulative[k] = running;
    }
    if (running > 1.0 + 1e-12) throw Error(ErrorCode::InvalidArgument, "outcome probabilities exceed 1");

    const CounterRng rng(seed);
    const std::size_t n_outcomes = accept.size();
    auto run_range = [&](std::uint64_t begin, std::uint64_t end) {
        std::vector<std::uint64_t> local(n_outcomes + 1, 0);
        for (std::uint64_t t = begin; t < end; ++t) {
            const double u = rng.uniform(t);
            const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
            ++local[static_cast<std::size_t>(it - cumulative.begin())];  // index n_outcomes = rejected
        }
        return local;
    };

    workers = std::max(1u, workers);
    std::vector<std::vector<std::uint64_t>> partial(workers);
    if (workers == 1) {
        partial[0] = run_range(0, trials);
    } else {
        std::vector<std::thread> pool;
        const std::uint64_t chunk = (trials + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::uint64_t begin = std::min<std::uint64_t>(trials, w * chunk);
            const std::uint64_t end = std::min<std::uint64_t>(trials, begin + chunk);
            pool.emplace_back([&, w, begin, end] { partial[w] = run_range(begin, end); });
        }
        for (auto& t : pool) t.join();
    }

    ExperimentCounts counts;
    counts.accepted.assign(n_outcomes, 0);
    counts.seed = seed;
    counts.total = trials;
    for (const auto& local : partial) {
        for (std::size_t k = 0; k < n_outcomes; ++k) counts.accepted[k] += local[k];
        counts.rejected += local[n_outcomes];
    }
    return counts;
}

ExperimentCounts sample_experiment(const PointerConfig& config, const HermitianObservable& obs, double g,
                                   const PrePostSelection& sel, std::uint64_t trials, std::uint64_t seed,
                                   unsigned workers) {
    std::vector<double> accept;
    accept.reserve(config.dim());
    for (std::size_t mu = 0; mu < config.dim(); ++mu) {
        accept.push_back(std::clamp(joint_probability_closed_form(config, obs, g, sel, mu), 0.0, 1.0));
    }
    return sample_outcomes(accept, trials, seed, workers);
}

ModulusEstimate estimate_modulus(const ExperimentCounts& counts, const PointerConfig& config) {
    const auto n_ref = counts.accepted.at(config.reference_index());
    const auto n_eta = counts.accepted.at(config.eta_index());
    if (n_ref == 0 || n_eta == 0) {
        throw Error(ErrorCode::InsufficientStatistics,
                    "need accepted counts on both pointer outcomes (got " + std::to_string(n_ref) + " and " +
                        std::to_string(n_eta) + ")");
    }
    const double chi = static_cast<double>(n_eta) / static_cast<double>(n_ref);
    // Multinomial delta method: Var(ln chi) ~ 1/n_eta + 1/n_ref.
    const double rel = std::sqrt(1.0 / static_cast<double>(n_eta) + 1.0 / static_cast<double>(n_ref));
    const double modulus = modulus_from_relative_change(config, chi);
    return ModulusEstimate{modulus, 0.5 * rel * modulus, chi, rel * chi};
}

// ---------------------------------------------------------------------------
// Calibration

namespace {

int sign_of(const DeviceReading& r, const CalibrationOptions& options) {
    const double d = r.difference();
    const double threshold = std::max(options.significance * r.difference_error, options.zero_floor);
    if (d > threshold) return 1;
    if (d < -threshold) return -1;
    return 0;
}

double golden_minimize(const std::function<double(double)>& f, double a, double b, double tolerance) {
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - ratio * (b - a);
    double d = a + ratio * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (b - a > tolerance) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

CalibrationResult calibrate_coupling(const Device& device, double varphi, SearchInterval interval,
                                     CalibrationOptions options) {
    if (!(interval.hi > interval.lo)) throw Error(ErrorCode::InvalidArgument, "empty calibration interval");
    if (options.scan_steps < 2) throw Error(ErrorCode::InvalidArgument, "scan needs at least 2 steps");

    CalibrationResult result;
    for (double root : no_change_points(varphi, 2)) {
        if (root >= -1e-12 && root <= 2.0 * kPi + 1e-12) result.root_family.push_back(std::max(root, 0.0));
    }
    for (double root : result.root_family) {
        if (root > 1e-12) {
            result.coupling_at_crossing = root;
            break;
        }
    }
    if (std::abs(wrap_angle(varphi)) < 1e-12 || std::abs(std::abs(wrap_angle(varphi)) - kPi) < 1e-12) {
        result.warnings.push_back("varphi is a multiple of pi: the k*pi and -varphi+k*pi root families coincide");
    }

    // Coarse scan for the first significant sign change.
    const double step = (interval.hi - interval.lo) / options.scan_steps;
    std::vector<double> settings;
    std::vector<DeviceReading> readings;
    double bracket_lo = 0.0, bracket_hi = 0.0;
    DeviceReading reading_lo, reading_hi;
    int last_sign = 0;
    double last_setting = 0.0;
    DeviceReading last_reading;
    bool bracketed = false;
    for (int k = 0; k <= options.scan_steps; ++k) {
        const double s = interval.lo + k * step;
        const DeviceReading r = device(s);
        settings.push_back(s);
        readings.push_back(r);
        const int sg = sign_of(r, options);
        if (sg == 0) continue;
        if (last_sign != 0 && sg != last_sign) {
            bracket_lo = last_setting;
            reading_lo = last_reading;
            bracket_hi = s;
            reading_hi = r;
            bracketed = true;
            break;
        }
        last_sign = sg;
        last_setting = s;
        last_reading = r;
    }

    if (!bracketed) {
        // Look for a touching root: an interior scan minimum of |D| that
        // refines to zero.
        std::size_t best = settings.size();
        for (std::size_t k = 1; k + 1 < settings.size(); ++k) {
            const double here = std::abs(readings[k].difference());
            if (here <= std::abs(readings[k - 1].difference()) && here <= std::abs(readings[k + 1].difference()) &&
                settings[k] > interval.lo + 0.5 * step) {
                best = k;
                break;
            }
        }
        if (best < settings.size() && readings[best].difference_error == 0.0) {
            int evaluations = 0;
            auto objective = [&](double s) {
                ++evaluations;
                return std::abs(device(s).difference());
            };
            const double g = golden_minimize(objective, settings[best - 1], settings[best + 1], 1e-10);
            const DeviceReading r = device(g);
            if (std::abs(r.difference()) <= options.tangent_tolerance) {
                result.g_hat = g;
                result.residual = r.difference();
                result.iterations = evaluations;
                result.tangential = true;
                result.warnings.push_back("crossing is a double root (no sign change); located by minimizing |D|");
                result.trace.push_back({evaluations, settings[best - 1], settings[best + 1], g, r.difference()});
                return result;
            }
        }
        throw Error(ErrorCode::NoCrossing, "Pr(H) - Pr(V) has no sign change on [" + std::to_string(interval.lo) +
                                               ", " + std::to_string(interval.hi) + "]");
    }

    const double slope = (reading_hi.difference() - reading_lo.difference()) / (bracket_hi - bracket_lo);
    const int sign_lo = reading_lo.difference() > 0.0 ? 1 : -1;
    double lo = bracket_lo, hi = bracket_hi;
    int it = 0;
    while (hi - lo > options.bracket_tolerance && it < options.max_iterations) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        ++it;
        const DeviceReading r = device(mid);
        result.trace.push_back({it, lo, hi, mid, r.difference()});
        const double d = r.difference();
        if (d == 0.0) {
            lo = hi = mid;
            break;
        }
        if ((d > 0.0 ? 1 : -1) == sign_lo) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    result.g_hat = 0.5 * (lo + hi);
    const DeviceReading final_reading = device(result.g_hat);
    result.residual = final_reading.difference();
    result.iterations = it;
    if (slope != 0.0) result.standard_error = final_reading.difference_error / std::abs(slope);
    return result;
}

}  // namespace modval
