#pragma once

// Pancharatnam phases and the polar decomposition of the modular value's
// argument into a geometric and an intrinsic part.

#include <optional>
#include <string>

#include "modval/linalg.hpp"
#include "modval/values.hpp"

namespace modval {

struct BlochPoint {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double dot(const BlochPoint& o) const noexcept { return x * o.x + y * o.y + z * o.z; }
    BlochPoint cross(const BlochPoint& o) const noexcept {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const noexcept;
};

struct PhaseDecomposition {
    double total_argument = 0.0;  // arg (A)_m
    double geometric = 0.0;       // Delta(psi, psi(g), phi)
    double intrinsic = 0.0;       // delta(psi, psi(g))
    std::optional<double> solid_angle;  // qubits only

    /// (geometric + intrinsic - total_argument) reduced to [-pi, pi).
    double residual() const noexcept { return angle_distance(geometric + intrinsic, total_argument); }
};

/// arg<a|b> on [-pi, pi).
double intrinsic_phase(const StateVector& a, const StateVector& b);

/// arg[<a|c><c|b><b|a>]: gauge invariant.
double geometric_phase(const StateVector& a, const StateVector& b, const StateVector& c);

/// |H> -> +z, |V> -> -z, |D> -> +x, |L> -> +y.
BlochPoint bloch_coordinates(const StateVector& state);

/// Signed area of the geodesic triangle spanned by the Bloch images of three
/// qubit states, positive when a.(b x c) > 0. Satisfies
/// geometric_phase(a, b, c) = -solid_angle(a, b, c) / 2.
double solid_angle(const StateVector& a, const StateVector& b, const StateVector& c);
double solid_angle(const BlochPoint& a, const BlochPoint& b, const BlochPoint& c);

/// arg (A)_m = Delta(psi, psi(g), phi) + delta(psi, psi(g)) (mod 2 pi).
PhaseDecomposition argument_decomposition(const HermitianObservable& obs, double g, const PrePostSelection& sel);

/// -g Re<A>_w, the leading-order argument of the modular value.
double small_g_argument(const HermitianObservable& obs, double g, const PrePostSelection& sel);

/// arg <|a><a|>_w, checked against geometric_phase(psi, a, phi).
double projector_weak_argument(const StateVector& a, const PrePostSelection& sel);

}  // namespace modval
