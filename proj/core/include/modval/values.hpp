#pragma once

// Weak values, modular values, generalized F-values and complex conditional
// probabilities for a pre/post-selected pure-state system.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "modval/linalg.hpp"

namespace modval {

/// Pre-selected |psi> and post-selected |phi>, both stored normalized, with
/// the overlap <phi|psi> cached. Construction fails when the pair is
/// orthogonal to within tol::kOverlap.
class PrePostSelection {
  public:
    PrePostSelection(StateVector psi, StateVector phi);

    const StateVector& psi() const noexcept { return psi_; }
    const StateVector& phi() const noexcept { return phi_; }
    /// <phi|psi>
    Complex overlap() const noexcept { return overlap_; }
    std::size_t dim() const noexcept { return psi_.dim(); }

  private:
    StateVector psi_;
    StateVector phi_;
    Complex overlap_;
};

/// A complex value together with its polar form; argument on [-pi, pi).
struct ComplexValueResult {
    Complex value;
    double modulus = 0.0;
    double argument = 0.0;

    static ComplexValueResult from(Complex z);
};

/// The function F in (A)_F = <phi|F(A)|psi>/<phi|psi>.
struct FunctionSpec {
    enum class Kind { Weak, Modular, Custom };

    Kind kind = Kind::Weak;
    double g = 0.0;  // only meaningful for Modular
    std::string name;
    std::function<Complex(double)> evaluator;

    static FunctionSpec weak();
    static FunctionSpec modular(double g);
    static FunctionSpec custom(std::string name, std::function<Complex(double)> f);
};

/// <phi|A|psi>/<phi|psi>
ComplexValueResult weak_value(const HermitianObservable& obs, const PrePostSelection& sel);

/// <phi|Pi|psi>/<phi|psi> for an (idempotent) eigenprojector Pi.
ComplexValueResult conditional_probability(const HermitianObservable& eigen_projector,
                                           const PrePostSelection& sel);
ComplexValueResult conditional_probability(const CMatrix& eigen_projector, const PrePostSelection& sel);

/// <phi|e^{-igA}|psi>/<phi|psi>, evaluated through evolve().
ComplexValueResult modular_value(const HermitianObservable& obs, double g, const PrePostSelection& sel);

/// sum_a F(a) Pr(a|psi,phi) over the spectral decomposition of A.
ComplexValueResult generalized_value(const FunctionSpec& f, const HermitianObservable& obs,
                                     const PrePostSelection& sel);

struct ChainRuleOptions {
    /// Throw SingularChain instead of falling back to the cancelled form when
    /// an intermediate overlap <x|psi> is below tol::kOverlap.
    bool strict = false;
};

/// | (A)_F[psi->phi] - sum_x (A)_F[psi->x] * <Pi_x>_w[psi->phi] |
///
/// The basis must be orthonormal and complete. Terms whose intermediate
/// overlap <x|psi> vanishes are evaluated in the cancelled form
/// <x|F(A)|psi><phi|x>/<phi|psi> unless options.strict is set.
double chain_rule_check(const FunctionSpec& f, const HermitianObservable& obs,
                        const std::vector<StateVector>& basis, const PrePostSelection& sel,
                        ChainRuleOptions options = {});

struct DerivativeEstimate {
    ComplexValueResult value;
    double step = 0.0;
    /// C in |error| ~ C h^2, from comparing the estimates at h and h/2.
    double error_constant = 0.0;
    double error_bound = 0.0;  // error_constant * h^2
};

/// i * [(A)_m(h) - (A)_m(-h)] / (2h), the central-difference form of
/// <A>_w = i d/dg (A)_m at g = 0. Requires 0 < h <= 1e-3.
DerivativeEstimate weak_from_modular_derivative(const HermitianObservable& obs, const PrePostSelection& sel,
                                                double h);

}  // namespace modval
