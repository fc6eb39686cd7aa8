#pragma once

#include "steerscan/errors.hpp"
#include "steerscan/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace steerscan {

/// Orthonormal traceless Hermitian generators of SU(d).
///
/// Canonical ordering: the diagonal family E_k (k = 0..d-2) first, then the
/// symmetric off-diagonal E+_{k,l}, then the antisymmetric E-_{k,l}, both in
/// lexicographic (k, l) order with k < l.
struct GeneratorBasis {
    int dim = 0;
    std::vector<CMatrix> generators;
    std::string ordering_tag;

    std::size_t size() const noexcept { return generators.size(); }
    const CMatrix& operator[](std::size_t i) const { return generators[i]; }
};

inline constexpr const char* kCanonicalOrdering = "diag,sym,antisym;lex(k,l)";

/// Builds the d^2 - 1 generators from scratch.
inline GeneratorBasis make_generator_basis(int d)
{
    if (d < 2) {
        throw InvalidDimension("generator basis requires dimension >= 2, got " + std::to_string(d));
    }
    GeneratorBasis basis;
    basis.dim = d;
    basis.ordering_tag = kCanonicalOrdering;
    basis.generators.reserve(static_cast<std::size_t>(d * d - 1));

    for (int k = 0; k <= d - 2; ++k) {
        CMatrix e = CMatrix::Zero(d, d);
        for (int j = 0; j <= k; ++j) {
            e(j, j) = 1.0;
        }
        e(k + 1, k + 1) = -static_cast<double>(k + 1);
        e *= std::sqrt(1.0 / ((k + 1.0) * (k + 2.0)));
        basis.generators.push_back(std::move(e));
    }

    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int k = 0; k < d; ++k) {
        for (int l = k + 1; l < d; ++l) {
            CMatrix e = CMatrix::Zero(d, d);
            e(k, l) = inv_sqrt2;
            e(l, k) = inv_sqrt2;
            basis.generators.push_back(std::move(e));
        }
    }
    const Complex i_unit(0.0, 1.0);
    for (int k = 0; k < d; ++k) {
        for (int l = k + 1; l < d; ++l) {
            CMatrix e = CMatrix::Zero(d, d);
            e(k, l) = -i_unit * inv_sqrt2;
            e(l, k) = i_unit * inv_sqrt2;
            basis.generators.push_back(std::move(e));
        }
    }
    return basis;
}

/// Shared immutable basis for dimension d; built on first use.
inline const GeneratorBasis& generator_basis(int d)
{
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<const GeneratorBasis>> cache;

    if (d < 2) {
        throw InvalidDimension("generator basis requires dimension >= 2, got " + std::to_string(d));
    }
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(d);
    if (it == cache.end()) {
        it = cache.emplace(d, std::make_unique<const GeneratorBasis>(make_generator_basis(d))).first;
    }
    return *it->second;
}

/// Worst-case deviation of each basis invariant.
struct BasisDiagnostics {
    double hermiticity = 0.0;      // max |G - G^dagger|
    double trace = 0.0;            // max |tr G|
    double orthonormality = 0.0;   // max |tr(G_i G_j) - delta_ij|
    double casimir = 0.0;          // max |sum_i G_i^2 - (d - 1/d) I|
    long count_error = 0;          // size - (d^2 - 1)

    double worst() const
    {
        return std::max({hermiticity, trace, orthonormality, casimir});
    }
    bool ok(double tol_structure = 1e-12, double tol_casimir = 1e-10) const
    {
        return count_error == 0 && hermiticity <= tol_structure && trace <= tol_structure &&
               orthonormality <= tol_structure && casimir <= tol_casimir;
    }
};

inline BasisDiagnostics verify_basis(const GeneratorBasis& basis)
{
    BasisDiagnostics diag;
    const int d = basis.dim;
    diag.count_error = static_cast<long>(basis.size()) - static_cast<long>(d * d - 1);

    CMatrix casimir = CMatrix::Zero(d, d);
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const CMatrix& g = basis[i];
        diag.hermiticity = std::max(diag.hermiticity, hermiticity_deviation(g));
        diag.trace = std::max(diag.trace, std::abs(g.trace()));
        for (std::size_t j = 0; j < basis.size(); ++j) {
            const double expected = (i == j) ? 1.0 : 0.0;
            diag.orthonormality =
                std::max(diag.orthonormality, std::abs((g * basis[j]).trace() - expected));
        }
        casimir += g * g;
    }
    if (d > 0) {
        casimir -= (d - 1.0 / d) * CMatrix::Identity(d, d);
        diag.casimir = casimir.cwiseAbs().maxCoeff();
    }
    return diag;
}

} // namespace steerscan
