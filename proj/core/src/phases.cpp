#include "modval/phases.hpp"

#include <algorithm>
#include <cmath>

#include "modval/error.hpp"

namespace modval {

double BlochPoint::norm() const noexcept { return std::sqrt(x * x + y * y + z * z); }

namespace {

Complex checked_overlap(const StateVector& bra, const StateVector& ket, const char* leg) {
    const Complex z = inner(bra.normalized(), ket.normalized());
    if (std::abs(z) <= tol::kOverlap) {
        throw Error(ErrorCode::UndefinedPhase, std::string("states ") + leg + " are orthogonal");
    }
    return z;
}

double arc(const BlochPoint& u, const BlochPoint& v) { return std::atan2(u.cross(v).norm(), u.dot(v)); }

}  // namespace

double intrinsic_phase(const StateVector& a, const StateVector& b) {
    return principal_arg(checked_overlap(a, b, "(a, b)"));
}

double geometric_phase(const StateVector& a, const StateVector& b, const StateVector& c) {
    const Complex ac = checked_overlap(a, c, "(a, c)");
    const Complex cb = checked_overlap(c, b, "(c, b)");
    const Complex ba = checked_overlap(b, a, "(b, a)");
    return principal_arg(ac * cb * ba);
}

BlochPoint bloch_coordinates(const StateVector& state) {
    if (state.dim() != 2) throw Error(ErrorCode::InvalidArgument, "Bloch coordinates need a qubit state");
    const StateVector s = state.normalized();
    const Complex coherence = std::conj(s[0]) * s[1];
    return BlochPoint{2.0 * coherence.real(), 2.0 * coherence.imag(), std::norm(s[0]) - std::norm(s[1])};
}

double solid_angle(const BlochPoint& a, const BlochPoint& b, const BlochPoint& c) {
    const BlochPoint* pts[3] = {&a, &b, &c};
    for (int i = 0; i < 3; ++i) {
        const BlochPoint& p = *pts[i];
        const BlochPoint& q = *pts[(i + 1) % 3];
        if (p.dot(q) < -1.0 + 1e-12) {
            throw Error(ErrorCode::InvalidArgument, "antipodal Bloch points: geodesic is not unique");
        }
    }
    // l'Huilier: tan(E/4)^2 = tan(s/2) tan((s-a)/2) tan((s-b)/2) tan((s-c)/2)
    const double side_a = arc(b, c);
    const double side_b = arc(c, a);
    const double side_c = arc(a, b);
    const double s = 0.5 * (side_a + side_b + side_c);
    const double product = std::tan(0.5 * s) * std::tan(0.5 * (s - side_a)) * std::tan(0.5 * (s - side_b)) *
                           std::tan(0.5 * (s - side_c));
    const double excess = 4.0 * std::atan(std::sqrt(std::max(0.0, product)));
    const double orientation = a.dot(b.cross(c));
    if (orientation == 0.0) return 0.0;
    return orientation > 0.0 ? excess : -excess;
}

double solid_angle(const StateVector& a, const StateVector& b, const StateVector& c) {
    for (const StateVector* s : {&a, &b, &c}) {
        if (s->dim() != 2) throw Error(ErrorCode::InvalidArgument, "solid angle is defined for qubit states only");
    }
    return solid_angle(bloch_coordinates(a), bloch_coordinates(b), bloch_coordinates(c));
}

PhaseDecomposition argument_decomposition(const HermitianObservable& obs, double g, const PrePostSelection& sel) {
    require_same_dim(obs.dim(), sel.dim(), "argument_decomposition");
    const StateVector& psi = sel.psi();
    const StateVector& phi = sel.phi();
    const StateVector evolved = evolve(obs, g, psi);

    const Complex psi_phi = inner(psi, phi);
    const Complex phi_evolved = inner(phi, evolved);
    const Complex evolved_psi = inner(evolved, psi);
    if (std::abs(psi_phi) <= tol::kOverlap) {
        throw Error(ErrorCode::UndefinedPhase, "leg psi -> phi degenerated: <phi|psi> vanishes");
    }
    if (std::abs(evolved_psi) <= tol::kOverlap) {
        throw Error(ErrorCode::UndefinedPhase, "leg psi -> psi(g) degenerated: <psi(g)|psi> vanishes");
    }
    if (std::abs(phi_evolved) <= tol::kOverlap) {
        throw Error(ErrorCode::UndefinedPhase, "leg psi(g) -> phi degenerated: <phi|psi(g)> vanishes");
    }

    PhaseDecomposition out;
    out.total_argument = modular_value(obs, g, sel).argument;
    out.geometric = principal_arg(psi_phi * phi_evolved * evolved_psi);
    out.intrinsic = principal_arg(std::conj(evolved_psi));
    if (sel.dim() == 2) {
        const BlochPoint a = bloch_coordinates(psi);
        const BlochPoint b = bloch_coordinates(evolved);
        const BlochPoint c = bloch_coordinates(phi);
        const bool near_antipodal =
            std::min({a.dot(b), b.dot(c), c.dot(a)}) < -1.0 + 1e-12;
        if (!near_antipodal) out.solid_angle = solid_angle(a, b, c);
    }
    return out;
}

double small_g_argument(const HermitianObservable& obs, double g, const PrePostSelection& sel) {
    return -g * weak_value(obs, sel).value.real();
}

double projector_weak_argument(const StateVector& a, const PrePostSelection& sel) {
    const double geometric = geometric_phase(sel.psi(), a, sel.phi());
    const double weak_arg = weak_value(HermitianObservable::projector(a), sel).argument;
    if (std::abs(angle_distance(weak_arg, geometric)) > 1e-12) {
        throw Error(ErrorCode::Internal, "projector weak-value argument " + std::to_string(weak_arg) +
                                             " disagrees with the geometric phase " + std::to_string(geometric));
    }
    return weak_arg;
}

}  // namespace modval
