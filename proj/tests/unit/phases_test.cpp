#include "modval/phases.hpp"

#include <array>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "modval/error.hpp"
#include "modval/stokes.hpp"
#include "oracles.hpp"

using namespace modval;
using modval::testing::random_hermitian;
using modval::testing::random_selection;
using modval::testing::random_state;

namespace {

const StateVector kZero = StateVector::basis(2, 0);
const StateVector kPlus{1.0, 1.0};
const StateVector kPlusI{Complex(1.0), Complex(0.0, 1.0)};

Eigen::Vector3d vec(const BlochPoint& p) { return {p.x, p.y, p.z}; }

StokesExampleConfig cfg_of(double varphi, double theta) {
    StokesExampleConfig cfg;
    cfg.varphi = varphi;
    cfg.theta = theta;
    return cfg;
}

}  // namespace

TEST(IntrinsicPhase, Basics) {
    std::mt19937_64 rng(50);
    const StateVector a = random_state(rng, 3);
    EXPECT_NEAR(intrinsic_phase(a, a), 0.0, 1e-15);
    EXPECT_NEAR(intrinsic_phase(kZero, kZero.with_phase(kPi / 3)), kPi / 3, 1e-15);
    try {
        intrinsic_phase(kZero, StateVector::basis(2, 1));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UndefinedPhase);
    }
}

TEST(IntrinsicPhase, StokesEvolvedState) {
    const auto cfg = cfg_of(-0.2 * kPi, 1.5 * kPi);
    const auto sel = stokes_states(cfg);
    const double g = 0.3;
    const StateVector evolved = evolve(stokes_operator(), g, sel.psi());
    // <psi|psi(g)> = (e^{-ig} + e^{ig})/2 for |psi| components of equal weight
    const Complex expected = 0.5 * std::polar(1.0, -g) + 0.5 * std::polar(1.0, g);
    EXPECT_NEAR(intrinsic_phase(sel.psi(), evolved), std::arg(expected), 1e-15);
}

TEST(GeometricPhase, OctantTriple) {
    EXPECT_NEAR(geometric_phase(kZero, kPlus, kPlusI), -kPi / 4, 1e-12);
    EXPECT_NEAR(solid_angle(kZero, kPlus, kPlusI), kPi / 2, 1e-9);
    EXPECT_NEAR(solid_angle(kZero, kPlusI, kPlus), -kPi / 2, 1e-9);
}

TEST(GeometricPhase, RepeatedStateGivesZero) {
    std::mt19937_64 rng(51);
    const StateVector a = random_state(rng, 3), b = random_state(rng, 3);
    EXPECT_NEAR(geometric_phase(a, a, b), 0.0, 1e-12);
    EXPECT_NEAR(geometric_phase(a, b, b), 0.0, 1e-12);
    EXPECT_NEAR(solid_angle(kZero, kZero, kPlus), 0.0, 1e-12);
}

TEST(GeometricPhase, GaugeCyclicAndConjugateSymmetries) {
    std::mt19937_64 rng(52);
    std::uniform_real_distribution<double> phase(-kPi, kPi);
    for (int rep = 0; rep < 300; ++rep) {
        const std::size_t dim = 2 + rep % 4;
        const StateVector a = random_state(rng, dim), b = random_state(rng, dim), c = random_state(rng, dim);
        const double d = geometric_phase(a, b, c);
        const double gauged =
            geometric_phase(a.with_phase(phase(rng)), b.with_phase(phase(rng)), c.with_phase(phase(rng)));
        EXPECT_LT(std::abs(angle_distance(d, gauged)), 1e-12);
        EXPECT_LT(std::abs(angle_distance(d, geometric_phase(b, c, a))), 1e-12);
        EXPECT_LT(std::abs(angle_distance(-d, geometric_phase(a, c, b))), 1e-12);
    }
}

TEST(SolidAngle, MatchesMinusTwiceGeometricPhaseAndIndependentFormula) {
    std::mt19937_64 rng(53);
    for (int rep = 0; rep < 1000; ++rep) {
        const StateVector a = random_state(rng, 2), b = random_state(rng, 2), c = random_state(rng, 2);
        const double omega = solid_angle(a, b, c);
        EXPECT_LT(std::abs(angle_distance(geometric_phase(a, b, c), -omega / 2)), 1e-9);
        const double ref =
            modval::testing::oosterom_solid_angle(vec(bloch_coordinates(a)), vec(bloch_coordinates(b)),
                                                  vec(bloch_coordinates(c)));
        EXPECT_NEAR(omega, ref, 1e-9);
        EXPECT_NEAR(solid_angle(b, a, c), -omega, 1e-12);
    }
}

TEST(SolidAngle, RejectsAntipodalAndNonQubit) {
    EXPECT_THROW(solid_angle(kZero, StateVector::basis(2, 1), kPlus), Error);
    EXPECT_THROW(solid_angle(StateVector::basis(3, 0), StateVector::basis(3, 0), StateVector::basis(3, 0)), Error);
}

TEST(BlochCoordinates, PolarizationConventions) {
    const double r = 1.0 / std::sqrt(2.0);
    struct Case {
        StateVector state;
        std::array<double, 3> expected;
    };
    const Case cases[] = {
        {StateVector::basis(2, 0), {0, 0, 1}},                       // H
        {StateVector::basis(2, 1), {0, 0, -1}},                      // V
        {StateVector{r, r}, {1, 0, 0}},                              // D
        {StateVector{r, -r}, {-1, 0, 0}},                            // A
        {StateVector{Complex(r), Complex(0, r)}, {0, 1, 0}},         // L
        {StateVector{Complex(r), Complex(0, -r)}, {0, -1, 0}},       // R
    };
    for (const auto& c : cases) {
        const BlochPoint p = bloch_coordinates(c.state);
        EXPECT_NEAR(p.x, c.expected[0], 1e-15);
        EXPECT_NEAR(p.y, c.expected[1], 1e-15);
        EXPECT_NEAR(p.z, c.expected[2], 1e-15);
    }
    std::mt19937_64 rng(54);
    for (int rep = 0; rep < 100; ++rep) {
        const StateVector s = random_state(rng, 2);
        const StateVector orth{-std::conj(s[1]), std::conj(s[0])};
        const BlochPoint p = bloch_coordinates(s), q = bloch_coordinates(orth);
        EXPECT_NEAR(p.norm(), 1.0, 1e-12);
        EXPECT_NEAR(p.dot(q), -1.0, 1e-12);
    }
}

TEST(ArgumentDecomposition, ZeroCoupling) {
    std::mt19937_64 rng(55);
    const HermitianObservable a(random_hermitian(rng, 3));
    const auto d = argument_decomposition(a, 0.0, random_selection(rng, 3));
    EXPECT_NEAR(d.total_argument, 0.0, 1e-15);
    EXPECT_NEAR(d.geometric, 0.0, 1e-15);
    EXPECT_NEAR(d.intrinsic, 0.0, 1e-15);
    EXPECT_FALSE(d.solid_angle.has_value());
}

TEST(ArgumentDecomposition, IdentityIsPureDynamicalPhase) {
    std::mt19937_64 rng(56);
    const double g = 0.9;
    const auto d = argument_decomposition(HermitianObservable::identity(2), g, random_selection(rng, 2));
    EXPECT_NEAR(d.geometric, 0.0, 1e-12);
    EXPECT_NEAR(angle_distance(d.intrinsic, -g), 0.0, 1e-12);
    EXPECT_NEAR(angle_distance(d.total_argument, -g), 0.0, 1e-12);
}

TEST(ArgumentDecomposition, StokesInstanceResidual) {
    const auto sel = stokes_states(cfg_of(-0.2 * kPi, 1.5 * kPi));
    const auto d = argument_decomposition(stokes_operator(), 0.1 * kPi, sel);
    EXPECT_LT(std::abs(d.residual()), 1e-10);
    ASSERT_TRUE(d.solid_angle.has_value());
    EXPECT_LT(std::abs(angle_distance(d.geometric, -*d.solid_angle / 2)), 1e-9);
}

TEST(ArgumentDecomposition, DegenerateLegIsNamed) {
    // varphi = -0.2pi, theta = pi/2, g = 0.1pi: <phi|psi(g)> = 0
    const auto sel = stokes_states(cfg_of(-0.2 * kPi, 0.5 * kPi));
    try {
        argument_decomposition(stokes_operator(), 0.1 * kPi, sel);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UndefinedPhase);
        EXPECT_NE(std::string(e.what()).find("psi(g) -> phi"), std::string::npos);
    }
    // psi(g) orthogonal to psi: Stokes with g = pi/2 maps the equator state to its antipode
    const auto sel2 = stokes_states(cfg_of(-0.2 * kPi, 1.5 * kPi));
    try {
        argument_decomposition(stokes_operator(), 0.5 * kPi, sel2);
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("psi -> psi(g)"), std::string::npos);
    }
}

TEST(ArgumentDecomposition, RandomInstancesSatisfyIdentity) {
    std::mt19937_64 rng(57);
    std::uniform_real_distribution<double> gdist(-3.0, 3.0);
    for (int rep = 0; rep < 300; ++rep) {
        const std::size_t dim = 2 + rep % 2;
        const HermitianObservable a(random_hermitian(rng, dim));
        const auto d = argument_decomposition(a, gdist(rng), random_selection(rng, dim));
        EXPECT_LT(std::abs(d.residual()), 1e-10);
        EXPECT_EQ(d.solid_angle.has_value(), dim == 2);
    }
}

TEST(SmallG, LeadingOrderArgument) {
    std::mt19937_64 rng(58);
    const HermitianObservable a(random_hermitian(rng, 2));
    const PrePostSelection sel = random_selection(rng, 2, 0.3);
    EXPECT_EQ(small_g_argument(a, 0.0, sel), 0.0);
    auto err = [&](double g) { return std::abs(modular_value(a, g, sel).argument - small_g_argument(a, g, sel)); };
    EXPECT_NEAR(err(1e-2) / err(5e-3), 4.0, 0.8);

    const auto stokes_sel = stokes_states(cfg_of(-0.2 * kPi, 1.5 * kPi));
    EXPECT_NEAR(small_g_argument(stokes_operator(), 1e-3, stokes_sel),
                modular_value(stokes_operator(), 1e-3, stokes_sel).argument, 1e-5);
}

TEST(ProjectorWeakArgument, EqualsGeometricPhase) {
    const PrePostSelection octant(kZero, kPlusI);
    EXPECT_NEAR(projector_weak_argument(kPlus, octant), -kPi / 4, 1e-12);

    std::mt19937_64 rng(59);
    const PrePostSelection sel = random_selection(rng, 2);
    EXPECT_NEAR(projector_weak_argument(sel.psi(), sel), 0.0, 1e-12);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t dim = 2 + rep % 3;
        const PrePostSelection s = random_selection(rng, dim);
        const StateVector a = random_state(rng, dim);
        EXPECT_LT(std::abs(angle_distance(projector_weak_argument(a, s), geometric_phase(s.psi(), a, s.phi()))),
                  1e-12);
    }
}
