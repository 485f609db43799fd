#pragma once

// Test-only helpers: seeded random instances and independent reference
// computations. Nothing here calls into the spectral machinery under test.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "modval/linalg.hpp"
#include "modval/values.hpp"

namespace modval::testing {

inline CMatrix random_hermitian(std::mt19937_64& rng, std::size_t dim, double scale = 1.0) {
    std::normal_distribution<double> n(0.0, scale);
    const auto d = static_cast<Eigen::Index>(dim);
    CMatrix m(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) m(i, j) = Complex(n(rng), n(rng));
    }
    return 0.5 * (m + m.adjoint());
}

inline StateVector random_state(std::mt19937_64& rng, std::size_t dim) {
    std::normal_distribution<double> n(0.0, 1.0);
    CVector v(static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = Complex(n(rng), n(rng));
    return StateVector(v).normalized();
}

/// Columns of a Haar-ish random unitary from QR of a Gaussian matrix.
inline std::vector<StateVector> random_basis(std::mt19937_64& rng, std::size_t dim) {
    std::normal_distribution<double> n(0.0, 1.0);
    const auto d = static_cast<Eigen::Index>(dim);
    CMatrix m(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) m(i, j) = Complex(n(rng), n(rng));
    }
    const CMatrix q = Eigen::HouseholderQR<CMatrix>(m).householderQ();
    std::vector<StateVector> out;
    for (Eigen::Index j = 0; j < d; ++j) out.emplace_back(CVector(q.col(j)));
    return out;
}

/// Pre/post pair with a comfortably non-vanishing overlap.
inline PrePostSelection random_selection(std::mt19937_64& rng, std::size_t dim, double min_overlap = 0.05) {
    for (;;) {
        StateVector psi = random_state(rng, dim);
        StateVector phi = random_state(rng, dim);
        if (std::abs(inner(phi, psi)) > min_overlap) return PrePostSelection(psi, phi);
    }
}

/// exp(-i g A) by summing the Taylor series until the terms drop below 1e-18.
inline CMatrix taylor_exp(const CMatrix& a, double g) {
    const CMatrix x = Complex(0.0, -g) * a;
    CMatrix term = CMatrix::Identity(a.rows(), a.cols());
    CMatrix sum = term;
    for (int k = 1; k < 200; ++k) {
        term = (term * x / static_cast<double>(k)).eval();
        sum += term;
        if (term.cwiseAbs().maxCoeff() < 1e-18) break;
    }
    return sum;
}

/// Signed solid angle by the Van Oosterom-Strackee formula, an independent
/// route to the l'Huilier computation in the library.
inline double oosterom_solid_angle(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& c) {
    const double num = a.dot(b.cross(c));
    const double den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
    return 2.0 * std::atan2(num, den);
}

inline double wrap(double x) {
    double r = std::remainder(x, 2.0 * 3.14159265358979323846);
    return r;
}

}  // namespace modval::testing
