#include "modval/linalg.hpp"

#include <cmath>
#include <sstream>

#include "modval/error.hpp"

namespace modval {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "invalid argument";
        case ErrorCode::DimensionMismatch: return "dimension mismatch";
        case ErrorCode::NotHermitian: return "not Hermitian";
        case ErrorCode::NotProjector: return "not a projector";
        case ErrorCode::EigenNonConvergence: return "eigensolver did not converge";
        case ErrorCode::SingularSelection: return "singular selection";
        case ErrorCode::SingularChain: return "singular chain";
        case ErrorCode::IncompleteBasis: return "incomplete basis";
        case ErrorCode::UndefinedPhase: return "undefined phase";
        case ErrorCode::InsufficientStatistics: return "insufficient statistics";
        case ErrorCode::NoCrossing: return "no crossing found";
        case ErrorCode::Io: return "i/o error";
        case ErrorCode::Internal: return "internal error";
    }
    return "unknown error";
}

double wrap_angle(double x) noexcept {
    double r = std::fmod(x + kPi, 2.0 * kPi);
    if (r < 0.0) r += 2.0 * kPi;
    r -= kPi;
    // fmod can land exactly on +pi after the shift when x is a multiple of 2pi minus pi.
    if (r >= kPi) r -= 2.0 * kPi;
    return r;
}

double principal_arg(Complex z) noexcept {
    double a = std::arg(z);
    if (a >= kPi) a -= 2.0 * kPi;
    return a;
}

namespace {

bool all_finite(const CMatrix& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        const Complex z = m.data()[i];
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
    return true;
}

}  // namespace

void require_same_dim(std::size_t a, std::size_t b, const char* context) {
    if (a != b) {
        throw Error(ErrorCode::DimensionMismatch,
                    std::string(context) + ": " + std::to_string(a) + " vs " + std::to_string(b));
    }
}

std::string describe(const CMatrix& m) {
    std::ostringstream os;
    os.precision(17);
    os << "[";
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        os << (r ? "; " : "");
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            os << (c ? ", " : "") << m(r, c);
        }
    }
    os << "]";
    return os.str();
}

// ---------------------------------------------------------------------------
// StateVector

StateVector::StateVector(CVector amplitudes) : amps_(std::move(amplitudes)) {
    if (amps_.size() < 2) {
        throw Error(ErrorCode::InvalidArgument, "state dimension must be at least 2");
    }
    if (!all_finite(amps_)) {
        throw Error(ErrorCode::InvalidArgument, "state has non-finite amplitudes");
    }
}

StateVector::StateVector(std::initializer_list<Complex> amplitudes)
    : StateVector(CVector(Eigen::Map<const CVector>(amplitudes.begin(),
                                                    static_cast<Eigen::Index>(amplitudes.size())))) {}

StateVector StateVector::basis(std::size_t dim, std::size_t index) {
    if (index >= dim) {
        throw Error(ErrorCode::InvalidArgument,
                    "basis index " + std::to_string(index) + " out of range for dim " + std::to_string(dim));
    }
    CVector v = CVector::Zero(static_cast<Eigen::Index>(dim));
    v(static_cast<Eigen::Index>(index)) = 1.0;
    return StateVector(std::move(v));
}

bool StateVector::is_normalized(double tolerance) const noexcept {
    return std::abs(amps_.squaredNorm() - 1.0) <= tolerance;
}

StateVector StateVector::normalized() const {
    const double n = amps_.norm();
    if (!(n > 0.0)) throw Error(ErrorCode::InvalidArgument, "cannot normalize the zero vector");
    return StateVector(amps_ / n);
}

StateVector StateVector::with_phase(double phase) const {
    return StateVector(amps_ * std::polar(1.0, phase));
}

// ---------------------------------------------------------------------------
// HermitianObservable

HermitianObservable::HermitianObservable(CMatrix matrix) : m_(std::move(matrix)) {
    if (m_.rows() != m_.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "observable matrix must be square");
    }
    if (m_.rows() < 2) throw Error(ErrorCode::InvalidArgument, "observable dimension must be at least 2");
    if (!all_finite(m_)) throw Error(ErrorCode::InvalidArgument, "observable has non-finite entries");
    const double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
    const double asym = (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
    if (asym > tol::kHermitian * scale) {
        throw Error(ErrorCode::NotHermitian, "max |A - A^dagger| = " + std::to_string(asym));
    }
    // Symmetrize away the sub-tolerance noise so the eigensolver sees an exact Hermitian.
    m_ = 0.5 * (m_ + m_.adjoint()).eval();
}

HermitianObservable HermitianObservable::identity(std::size_t dim) {
    return HermitianObservable(CMatrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim)));
}

HermitianObservable HermitianObservable::diagonal(std::span<const double> entries) {
    CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(entries.size()), static_cast<Eigen::Index>(entries.size()));
    for (std::size_t i = 0; i < entries.size(); ++i) {
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = entries[i];
    }
    return HermitianObservable(std::move(m));
}

HermitianObservable HermitianObservable::projector(const StateVector& v) {
    const CVector u = v.normalized().amplitudes();
    return HermitianObservable(u * u.adjoint());
}

// ---------------------------------------------------------------------------
// Spectral machinery

SpectralDecomposition hermitian_eig(const HermitianObservable& obs) {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(obs.matrix());
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::EigenNonConvergence, describe(obs.matrix()));
    }
    const Eigen::VectorXd& vals = solver.eigenvalues();  // ascending
    const CMatrix& vecs = solver.eigenvectors();
    const Eigen::Index n = vals.size();

    const double spectral_norm = std::max(std::abs(vals(0)), std::abs(vals(n - 1)));
    const double gap = tol::kDegeneracy * std::max(spectral_norm, 1.0);

    SpectralDecomposition out;
    Eigen::Index start = 0;
    while (start < n) {
        Eigen::Index end = start + 1;
        while (end < n && vals(end) - vals(end - 1) < gap) ++end;
        double sum = 0.0;
        CMatrix proj = CMatrix::Zero(n, n);
        for (Eigen::Index k = start; k < end; ++k) {
            sum += vals(k);
            proj += vecs.col(k) * vecs.col(k).adjoint();
        }
        const auto mult = static_cast<std::size_t>(end - start);
        out.eigenvalues.push_back(sum / static_cast<double>(mult));
        out.projectors.push_back(std::move(proj));
        out.multiplicities.push_back(mult);
        start = end;
    }
    return out;
}

CMatrix unitary(const SpectralDecomposition& spec, double g) {
    return spec.apply([g](double a) { return std::polar(1.0, -g * a); });
}

CMatrix unitary(const HermitianObservable& obs, double g) { return unitary(hermitian_eig(obs), g); }

StateVector evolve(const HermitianObservable& obs, double g, const StateVector& state) {
    require_same_dim(obs.dim(), state.dim(), "evolve");
    if (g == 0.0) return state;
    const SpectralDecomposition spec = hermitian_eig(obs);
    CVector out = CVector::Zero(static_cast<Eigen::Index>(state.dim()));
    for (std::size_t k = 0; k < spec.size(); ++k) {
        out += std::polar(1.0, -g * spec.eigenvalues[k]) * (spec.projectors[k] * state.amplitudes());
    }
    return StateVector(std::move(out));
}

Complex inner(const StateVector& bra, const StateVector& ket) {
    require_same_dim(bra.dim(), ket.dim(), "inner");
    return bra.amplitudes().dot(ket.amplitudes());  // Eigen conjugates the left operand
}

Complex matrix_element(const StateVector& bra, const CMatrix& m, const StateVector& ket) {
    require_same_dim(bra.dim(), static_cast<std::size_t>(m.rows()), "matrix_element");
    require_same_dim(ket.dim(), static_cast<std::size_t>(m.cols()), "matrix_element");
    return bra.amplitudes().dot(m * ket.amplitudes());
}

bool is_projector(const CMatrix& m, double tolerance) {
    if (m.rows() != m.cols()) return false;
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > tolerance) return false;
    return (m * m - m).cwiseAbs().maxCoeff() <= tolerance;
}

}  // namespace modval
