#include "modval/values.hpp"

#include <cmath>

#include "modval/error.hpp"

namespace modval {

PrePostSelection::PrePostSelection(StateVector psi, StateVector phi)
    : psi_(psi.normalized()), phi_(phi.normalized()), overlap_(0.0) {
    require_same_dim(psi_.dim(), phi_.dim(), "PrePostSelection");
    overlap_ = inner(phi_, psi_);
    if (std::abs(overlap_) <= tol::kOverlap) {
        throw Error(ErrorCode::SingularSelection,
                    "|<phi|psi>| = " + std::to_string(std::abs(overlap_)) + " is below the orthogonality threshold");
    }
}

ComplexValueResult ComplexValueResult::from(Complex z) {
    return ComplexValueResult{z, std::abs(z), principal_arg(z)};
}

FunctionSpec FunctionSpec::weak() {
    return FunctionSpec{Kind::Weak, 0.0, "weak", [](double a) { return Complex(a, 0.0); }};
}

FunctionSpec FunctionSpec::modular(double g) {
    return FunctionSpec{Kind::Modular, g, "modular", [g](double a) { return std::polar(1.0, -g * a); }};
}

FunctionSpec FunctionSpec::custom(std::string name, std::function<Complex(double)> f) {
    return FunctionSpec{Kind::Custom, 0.0, std::move(name), std::move(f)};
}

ComplexValueResult weak_value(const HermitianObservable& obs, const PrePostSelection& sel) {
    require_same_dim(obs.dim(), sel.dim(), "weak_value");
    return ComplexValueResult::from(matrix_element(sel.phi(), obs.matrix(), sel.psi()) / sel.overlap());
}

ComplexValueResult conditional_probability(const CMatrix& eigen_projector, const PrePostSelection& sel) {
    require_same_dim(static_cast<std::size_t>(eigen_projector.rows()), sel.dim(), "conditional_probability");
    if (!is_projector(eigen_projector)) {
        throw Error(ErrorCode::NotProjector, describe(eigen_projector));
    }
    return ComplexValueResult::from(matrix_element(sel.phi(), eigen_projector, sel.psi()) / sel.overlap());
}

ComplexValueResult conditional_probability(const HermitianObservable& eigen_projector, const PrePostSelection& sel) {
    return conditional_probability(eigen_projector.matrix(), sel);
}

ComplexValueResult modular_value(const HermitianObservable& obs, double g, const PrePostSelection& sel) {
    require_same_dim(obs.dim(), sel.dim(), "modular_value");
    const StateVector evolved = evolve(obs, g, sel.psi());
    return ComplexValueResult::from(inner(sel.phi(), evolved) / sel.overlap());
}

ComplexValueResult generalized_value(const FunctionSpec& f, const HermitianObservable& obs,
                                     const PrePostSelection& sel) {
    require_same_dim(obs.dim(), sel.dim(), "generalized_value");
    if (!f.evaluator) throw Error(ErrorCode::InvalidArgument, "function '" + f.name + "' has no evaluator");
    const SpectralDecomposition spec = hermitian_eig(obs);
    Complex total = 0.0;
    for (std::size_t k = 0; k < spec.size(); ++k) {
        const double a = spec.eigenvalues[k];
        const Complex fa = f.evaluator(a);
        if (!std::isfinite(fa.real()) || !std::isfinite(fa.imag())) {
            throw Error(ErrorCode::InvalidArgument,
                        "function '" + f.name + "' is not finite at eigenvalue " + std::to_string(a));
        }
        total += fa * conditional_probability(spec.projectors[k], sel).value;
    }
    return ComplexValueResult::from(total);
}

namespace {

void require_orthonormal_basis(const std::vector<StateVector>& basis, std::size_t dim) {
    if (basis.size() != dim) {
        throw Error(ErrorCode::IncompleteBasis,
                    "basis has " + std::to_string(basis.size()) + " vectors for dimension " + std::to_string(dim));
    }
    for (std::size_t i = 0; i < basis.size(); ++i) {
        require_same_dim(basis[i].dim(), dim, "chain_rule_check basis");
        for (std::size_t j = i; j < basis.size(); ++j) {
            const Complex expected = (i == j) ? 1.0 : 0.0;
            if (std::abs(inner(basis[i], basis[j]) - expected) > tol::kProjector) {
                throw Error(ErrorCode::IncompleteBasis,
                            "basis vectors " + std::to_string(i) + " and " + std::to_string(j) + " are not orthonormal");
            }
        }
    }
}

}  // namespace

double chain_rule_check(const FunctionSpec& f, const HermitianObservable& obs, const std::vector<StateVector>& basis,
                        const PrePostSelection& sel, ChainRuleOptions options) {
    require_same_dim(obs.dim(), sel.dim(), "chain_rule_check");
    require_orthonormal_basis(basis, sel.dim());

    const Complex direct = generalized_value(f, obs, sel).value;

    Complex chained = 0.0;
    CMatrix f_of_a;  // built lazily for the cancelled form
    for (std::size_t x = 0; x < basis.size(); ++x) {
        const StateVector& ket = basis[x];
        const Complex x_psi = inner(ket, sel.psi());
        if (std::abs(x_psi) > tol::kOverlap) {
            const PrePostSelection leg(sel.psi(), ket);
            const Complex via_x = generalized_value(f, obs, leg).value;
            const Complex pr_x = conditional_probability(HermitianObservable::projector(ket), sel).value;
            chained += via_x * pr_x;
            continue;
        }
        if (options.strict) {
            throw Error(ErrorCode::SingularChain, "intermediate state x = " + std::to_string(x) +
                                                      " is orthogonal to the pre-selection (|<x|psi>| = " +
                                                      std::to_string(std::abs(x_psi)) + ")");
        }
        if (f_of_a.size() == 0) f_of_a = hermitian_eig(obs).apply(f.evaluator);
        chained += matrix_element(ket, f_of_a, sel.psi()) * inner(sel.phi(), ket) / sel.overlap();
    }
    return std::abs(direct - chained);
}

DerivativeEstimate weak_from_modular_derivative(const HermitianObservable& obs, const PrePostSelection& sel,
                                                double h) {
    if (!(h > 0.0 && h <= 1e-3)) {
        throw Error(ErrorCode::InvalidArgument, "step h must satisfy 0 < h <= 1e-3");
    }
    const Complex i(0.0, 1.0);
    auto central = [&](double step) {
        return i * (modular_value(obs, step, sel).value - modular_value(obs, -step, sel).value) / (2.0 * step);
    };
    const Complex at_h = central(h);
    const Complex at_half = central(0.5 * h);
    // est(h) - est(h/2) ~ C h^2 (1 - 1/4)
    const double c = std::abs(at_h - at_half) / (0.75 * h * h);
    return DerivativeEstimate{ComplexValueResult::from(at_h), h, c, c * h * h};
}

}  // namespace modval
