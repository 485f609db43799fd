#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "cli/commands.hpp"
#include "modval/error.hpp"
#include "modval/phases.hpp"
#include "modval/stokes.hpp"
#include "modval/values.hpp"

namespace modval::cli {

namespace {

using Rng = std::mt19937_64;

CMatrix gaussian_matrix(Rng& rng, std::size_t dim) {
    std::normal_distribution<double> n(0.0, 1.0);
    const auto d = static_cast<Eigen::Index>(dim);
    CMatrix m(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) m(i, j) = Complex(n(rng), n(rng));
    }
    return m;
}

HermitianObservable random_observable(Rng& rng, std::size_t dim) {
    const CMatrix m = gaussian_matrix(rng, dim);
    return HermitianObservable(CMatrix(0.5 * (m + m.adjoint())));
}

StateVector random_state(Rng& rng, std::size_t dim) {
    std::normal_distribution<double> n(0.0, 1.0);
    CVector v(static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = Complex(n(rng), n(rng));
    return StateVector(v).normalized();
}

PrePostSelection random_selection(Rng& rng, std::size_t dim) {
    for (;;) {
        StateVector psi = random_state(rng, dim), phi = random_state(rng, dim);
        if (std::abs(inner(phi, psi)) > 0.05) return PrePostSelection(psi, phi);
    }
}

std::vector<StateVector> random_basis(Rng& rng, std::size_t dim) {
    const CMatrix q = Eigen::HouseholderQR<CMatrix>(gaussian_matrix(rng, dim)).householderQ();
    std::vector<StateVector> out;
    for (Eigen::Index j = 0; j < q.cols(); ++j) out.emplace_back(CVector(q.col(j)));
    return out;
}

StokesExampleConfig stokes(double varphi, double theta) {
    StokesExampleConfig cfg;
    cfg.varphi = varphi;
    cfg.theta = theta;
    return cfg;
}

struct Check {
    const char* module;
    const char* name;
    double tolerance;
    std::function<double(Rng&)> run;
};

std::vector<Check> checks() {
    std::vector<Check> c;
    c.push_back({"linalg-core", "spectral_reconstruction", 1e-12, [](Rng& rng) {
                     double worst = 0.0;
                     for (int rep = 0; rep < 50; ++rep) {
                         const auto a = random_observable(rng, 2 + rep % 5);
                         const auto spec = hermitian_eig(a);
                         CMatrix sum = CMatrix::Zero(a.matrix().rows(), a.matrix().cols());
                         for (std::size_t k = 0; k < spec.eigenvalues.size(); ++k) {
                             sum += spec.eigenvalues[k] * spec.projectors[k];
                         }
                         worst = std::max(worst, (sum - a.matrix()).cwiseAbs().maxCoeff());
                     }
                     return worst;
                 }});
    c.push_back({"linalg-core", "unitarity", 1e-12, [](Rng& rng) {
                     double worst = 0.0;
                     std::uniform_real_distribution<double> gd(-5.0, 5.0);
                     for (int rep = 0; rep < 50; ++rep) {
                         const auto a = random_observable(rng, 2 + rep % 5);
                         const CMatrix u = unitary(a, gd(rng));
                         const CMatrix eye = CMatrix::Identity(u.rows(), u.cols());
                         worst = std::max(worst, (u.adjoint() * u - eye).cwiseAbs().maxCoeff());
                     }
                     return worst;
                 }});
    c.push_back({"values", "modular_equals_spectral_sum", 1e-10, [](Rng& rng) {
                     double worst = 0.0;
                     std::uniform_real_distribution<double> gd(-3.0, 3.0);
                     for (int rep = 0; rep < 100; ++rep) {
                         const std::size_t dim = 2 + rep % 5;
                         const auto a = random_observable(rng, dim);
                         const auto sel = random_selection(rng, dim);
                         const double g = gd(rng);
                         worst = std::max(worst, std::abs(modular_value(a, g, sel).value -
                                                          generalized_value(FunctionSpec::modular(g), a, sel).value));
                     }
                     return worst;
                 }});
    c.push_back({"values", "conditional_probabilities_sum_to_one", 1e-12, [](Rng& rng) {
                     double worst = 0.0;
                     for (int rep = 0; rep < 50; ++rep) {
                         const std::size_t dim = 2 + rep % 5;
                         const auto spec = hermitian_eig(random_observable(rng, dim));
                         const auto sel = random_selection(rng, dim);
                         Complex sum = 0.0;
                         for (const auto& p : spec.projectors) sum += conditional_probability(p, sel).value;
                         worst = std::max(worst, std::abs(sum - 1.0));
                     }
                     return worst;
                 }});
    const std::pair<const char*, int> rules[] = {
        {"chain_rule_weak", 0}, {"chain_rule_modular", 1}, {"chain_rule_polynomial", 2}};
    for (const auto& [name, kind] : rules) {
        c.push_back({"values", name, 1e-10, [kind = kind](Rng& rng) {
                         double worst = 0.0;
                         std::uniform_real_distribution<double> gd(-3.0, 3.0);
                         for (int rep = 0; rep < 50; ++rep) {
                             const std::size_t dim = 2 + rep % 4;
                             const HermitianObservable a = random_observable(rng, dim);
                             FunctionSpec f = FunctionSpec::weak();
                             if (kind == 1) f = FunctionSpec::modular(gd(rng));
                             if (kind == 2) {
                                 f = FunctionSpec::custom("a^3 - 2a + 1",
                                                          [](double x) { return Complex(x * x * x - 2.0 * x + 1.0); });
                             }
                             worst = std::max(worst,
                                              chain_rule_check(f, a, random_basis(rng, dim), random_selection(rng, dim)));
                         }
                         return worst;
                     }});
    }
    c.push_back({"values", "derivative_relation", 1e-6, [](Rng& rng) {
                     double worst = 0.0;
                     for (int rep = 0; rep < 20; ++rep) {
                         const std::size_t dim = 2 + rep % 4;
                         const auto a = random_observable(rng, dim);
                         const auto sel = random_selection(rng, dim);
                         const auto est = weak_from_modular_derivative(a, sel, 1e-4);
                         worst = std::max(worst, std::abs(est.value.value - weak_value(a, sel).value));
                     }
                     return worst;
                 }});
    c.push_back({"pointer-sim", "kraus_completeness", 1e-12, [](Rng& rng) {
                     double worst = 0.0;
                     std::uniform_real_distribution<double> gd(-3.0, 3.0);
                     for (int rep = 0; rep < 30; ++rep) {
                         const std::size_t dim = 2 + rep % 3;
                         const auto a = random_observable(rng, dim);
                         const PointerConfig pointer(random_state(rng, 2 + rep % 2), rep % 2);
                         CMatrix sum = CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
                         for (const auto& k : kraus_set(pointer, a, gd(rng))) sum += k.matrix.adjoint() * k.matrix;
                         worst = std::max(worst, (sum - CMatrix::Identity(sum.rows(), sum.cols())).cwiseAbs().maxCoeff());
                     }
                     return worst;
                 }});
    c.push_back({"pointer-sim", "joint_probability_closed_form", 1e-12, [](Rng& rng) {
                     double worst = 0.0;
                     std::uniform_real_distribution<double> gd(-3.0, 3.0);
                     for (int rep = 0; rep < 30; ++rep) {
                         const std::size_t dim = 2 + rep % 3;
                         const auto a = random_observable(rng, dim);
                         const auto sel = random_selection(rng, dim);
                         const PointerConfig pointer(random_state(rng, 3), rep % 3);
                         const double g = gd(rng);
                         for (std::size_t mu = 0; mu < 3; ++mu) {
                             worst = std::max(worst, std::abs(joint_probability(pointer, a, g, sel, mu) -
                                                              joint_probability_closed_form(pointer, a, g, sel, mu)));
                         }
                     }
                     return worst;
                 }});
    c.push_back({"pointer-sim", "modulus_from_relative_change", 1e-10, [](Rng& rng) {
                     double worst = 0.0;
                     std::uniform_real_distribution<double> gd(-3.0, 3.0), amp(0.1, 0.9);
                     for (int rep = 0; rep < 50; ++rep) {
                         const std::size_t dim = 2 + rep % 3;
                         const auto a = random_observable(rng, dim);
                         const auto sel = random_selection(rng, dim);
                         const auto pointer = PointerConfig::qubit(amp(rng));
                         const double g = gd(rng);
                         const double chi = relative_change(pointer, a, g, sel).chi_m;
                         worst = std::max(worst, std::abs(modulus_from_relative_change(pointer, chi) -
                                                          modular_value(a, g, sel).modulus));
                     }
                     return worst;
                 }});
    c.push_back({"pointer-sim", "sampling_independent_of_workers", 0.0, [](Rng& rng) {
                     const std::uint64_t seed = rng();
                     const std::vector<double> probs{0.2, 0.3, 0.1};
                     const auto one = sample_outcomes(probs, 20000, seed, 1);
                     const auto many = sample_outcomes(probs, 20000, seed, 3);
                     double diff = std::abs(static_cast<double>(one.rejected) - static_cast<double>(many.rejected));
                     for (std::size_t k = 0; k < probs.size(); ++k) {
                         diff += std::abs(static_cast<double>(one.accepted[k]) - static_cast<double>(many.accepted[k]));
                     }
                     return diff;
                 }});
    c.push_back({"pointer-sim", "monte_carlo_chi_sigma", 3.0, [](Rng& rng) {
                     const auto cfg = stokes(-0.2 * kPi, 1.5 * kPi);
                     const auto pointer = stokes_pointer(cfg);
                     const auto sel = stokes_states(cfg);
                     const double g = 0.1 * kPi;
                     const auto counts = sample_experiment(pointer, stokes_operator(), g, sel, 100000, rng());
                     const auto est = estimate_modulus(counts, pointer);
                     const double chi = relative_change(pointer, stokes_operator(), g, sel).chi_m;
                     return std::abs(est.chi - chi) / est.chi_standard_error;
                 }});
    c.push_back({"qubit-example", "fig2a_no_change_rows", 1e-12, [](Rng&) {
                     Fig2aParams p;
                     p.gs = {0.0, 0.2 * kPi};
                     double worst = 0.0;
                     for (const auto& row : fig2a(p).rows) worst = std::max(worst, std::abs(row[3] - row[2]));
                     return worst;
                 }});
    c.push_back({"qubit-example", "no_change_roots", 1e-9, [](Rng&) {
                     const double vp = -0.2 * kPi;
                     std::vector<double> expected;
                     for (double r : no_change_points(vp, 3)) {
                         if (r >= 0.0 && r <= 2.0 * kPi + 1e-12) expected.push_back(r);
                     }
                     const auto found = locate_no_change_points(stokes(vp, 1.5 * kPi), 0.0, 2.0 * kPi, 997);
                     if (found.size() != expected.size()) return std::numeric_limits<double>::infinity();
                     double worst = 0.0;
                     for (std::size_t i = 0; i < found.size(); ++i) worst = std::max(worst, std::abs(found[i] - expected[i]));
                     return worst;
                 }});
    c.push_back({"qubit-example", "calibration_exact_device", 1e-6, [](Rng&) {
                     CalibrateParams p;
                     p.hidden_scale = 1.0;
                     return std::abs(calibrate(p).result.g_hat - 0.3 * kPi);
                 }});
    c.push_back({"phases", "argument_decomposition", 1e-10, [](Rng& rng) {
                     double worst = 0.0;
                     std::uniform_real_distribution<double> gd(-3.0, 3.0);
                     for (int rep = 0; rep < 100; ++rep) {
                         const std::size_t dim = 2 + rep % 2;
                         const auto d = argument_decomposition(random_observable(rng, dim), gd(rng),
                                                               random_selection(rng, dim));
                         worst = std::max(worst, std::abs(d.residual()));
                     }
                     return worst;
                 }});
    c.push_back({"phases", "projector_weak_argument", 1e-12, [](Rng& rng) {
                     double worst = 0.0;
                     for (int rep = 0; rep < 100; ++rep) {
                         const std::size_t dim = 2 + rep % 3;
                         const auto sel = random_selection(rng, dim);
                         const auto a = random_state(rng, dim);
                         worst = std::max(worst, std::abs(angle_distance(projector_weak_argument(a, sel),
                                                                         geometric_phase(sel.psi(), a, sel.phi()))));
                     }
                     return worst;
                 }});
    c.push_back({"phases", "geometric_phase_is_minus_half_solid_angle", 1e-9, [](Rng& rng) {
                     double worst = 0.0;
                     for (int rep = 0; rep < 100; ++rep) {
                         const auto a = random_state(rng, 2), b = random_state(rng, 2), cc = random_state(rng, 2);
                         worst = std::max(worst, std::abs(angle_distance(geometric_phase(a, b, cc),
                                                                         -0.5 * solid_angle(a, b, cc))));
                     }
                     return worst;
                 }});
    c.push_back({"phases", "octant_triple", 1e-9, [](Rng&) {
                     const StateVector h = StateVector::basis(2, 0), d{1.0, 1.0}, l{Complex(1.0), Complex(0.0, 1.0)};
                     return std::max(std::abs(geometric_phase(h, d, l) + kPi / 4),
                                     std::abs(solid_angle(h, d, l) - kPi / 2));
                 }});
    return c;
}

}  // namespace

VerifySummary run_verification(const VerifyOptions& options) {
    VerifySummary summary;
    summary.seed = options.seed;
    summary.tolerance_scale = options.tolerance_scale;
    std::uint64_t index = 0;
    for (const auto& check : checks()) {
        // each check gets its own stream so adding checks does not shift others
        Rng rng(options.seed + 0x9e3779b97f4a7c15ULL * ++index);
        CheckResult r;
        r.name = check.name;
        r.module = check.module;
        r.tolerance = check.tolerance * options.tolerance_scale;
        try {
            r.value = check.run(rng);
            r.passed = std::isfinite(r.value) && r.value <= r.tolerance;
        } catch (const std::exception& e) {
            r.value = std::numeric_limits<double>::infinity();
            r.passed = false;
            r.detail = e.what();
        }
        summary.checks.push_back(std::move(r));
    }
    return summary;
}

}  // namespace modval::cli
