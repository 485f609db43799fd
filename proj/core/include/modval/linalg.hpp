#pragma once

// Small dense complex linear algebra: state vectors, Hermitian observables,
// spectral decompositions and the unitary e^{-igA} built from them.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace modval {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr double kPi = 3.14159265358979323846;

/// Tolerances shared across modules.
namespace tol {
inline constexpr double kHermitian = 1e-12;
inline constexpr double kNormalized = 1e-12;
inline constexpr double kDegeneracy = 1e-9;  // relative to spectral norm
inline constexpr double kProjector = 1e-10;
inline constexpr double kOverlap = 1e-10;  // orthogonality threshold for selections
}  // namespace tol

/// Wraps an angle to the principal branch [-pi, pi).
double wrap_angle(double x) noexcept;

/// arg(z) on [-pi, pi).
double principal_arg(Complex z) noexcept;

/// Shortest signed distance between two angles, in [-pi, pi).
inline double angle_distance(double a, double b) noexcept { return wrap_angle(a - b); }

/// A ket in a finite Hilbert space of dimension >= 2. Not necessarily
/// normalized; call normalized() where the physics requires it.
class StateVector {
  public:
    explicit StateVector(CVector amplitudes);
    StateVector(std::initializer_list<Complex> amplitudes);

    /// Computational basis ket |index> of the given dimension.
    static StateVector basis(std::size_t dim, std::size_t index);

    std::size_t dim() const noexcept { return static_cast<std::size_t>(amps_.size()); }
    const CVector& amplitudes() const noexcept { return amps_; }
    Complex operator[](std::size_t i) const { return amps_(static_cast<Eigen::Index>(i)); }

    double norm() const noexcept { return amps_.norm(); }
    bool is_normalized(double tolerance = tol::kNormalized) const noexcept;
    StateVector normalized() const;

    /// Multiplies by a global phase e^{i*phase}.
    StateVector with_phase(double phase) const;

  private:
    CVector amps_;
};

/// Hermitian matrix, checked on construction.
class HermitianObservable {
  public:
    explicit HermitianObservable(CMatrix matrix);

    static HermitianObservable identity(std::size_t dim);
    static HermitianObservable diagonal(std::span<const double> entries);
    /// |v><v| for a (normalized internally) state.
    static HermitianObservable projector(const StateVector& v);

    std::size_t dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }
    const CMatrix& matrix() const noexcept { return m_; }

  private:
    CMatrix m_;
};

/// Eigenvalues in ascending order with one projector per distinct eigenvalue.
struct SpectralDecomposition {
    std::vector<double> eigenvalues;
    std::vector<CMatrix> projectors;
    std::vector<std::size_t> multiplicities;

    std::size_t size() const noexcept { return eigenvalues.size(); }
    /// sum_a f(a) Pi_a
    template <typename F>
    CMatrix apply(F&& f) const;
};

SpectralDecomposition hermitian_eig(const HermitianObservable& obs);

/// e^{-igA} as a matrix, built from the spectral sum.
CMatrix unitary(const HermitianObservable& obs, double g);
CMatrix unitary(const SpectralDecomposition& spec, double g);

/// e^{-igA}|state> = sum_a e^{-iga} Pi_a |state>.
StateVector evolve(const HermitianObservable& obs, double g, const StateVector& state);

/// <bra|ket>, conjugate-linear in the first argument.
Complex inner(const StateVector& bra, const StateVector& ket);

/// <bra|M|ket>
Complex matrix_element(const StateVector& bra, const CMatrix& m, const StateVector& ket);

bool is_projector(const CMatrix& m, double tolerance = tol::kProjector);

/// Throws DimensionMismatch unless a == b.
void require_same_dim(std::size_t a, std::size_t b, const char* context);

std::string describe(const CMatrix& m);

template <typename F>
CMatrix SpectralDecomposition::apply(F&& f) const {
    const auto n = projectors.empty() ? Eigen::Index{0} : projectors.front().rows();
    CMatrix out = CMatrix::Zero(n, n);
    for (std::size_t k = 0; k < eigenvalues.size(); ++k) {
        out += Complex(f(eigenvalues[k])) * projectors[k];
    }
    return out;
}

}  // namespace modval
