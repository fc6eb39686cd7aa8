#pragma once

#include "steerscan/basis.hpp"
#include "steerscan/errors.hpp"
#include "steerscan/linalg.hpp"

#include <cmath>
#include <optional>
#include <sstream>
#include <string>

namespace steerscan {

/// Tolerances for accepting a matrix as a density matrix.
struct DensityTolerances {
    double hermiticity = 1e-10;
    double trace = 1e-10;
    double min_eigenvalue = -1e-9;
};

/// Per-invariant deviations found by validate_density.
struct DensityDiagnostics {
    double hermiticity = 0.0;    // max |M - M^dagger|
    double trace = 0.0;          // |tr M - 1|
    double psd_violation = 0.0;  // max(0, -lambda_min)
    double min_eigenvalue = 0.0;
    std::string failed;          // first failing invariant, empty if accepted

    bool ok() const noexcept { return failed.empty(); }
};

inline DensityDiagnostics diagnose_density(const CMatrix& mat, const DensityTolerances& tol = {})
{
    DensityDiagnostics diag;
    diag.hermiticity = hermiticity_deviation(mat);
    diag.trace = std::abs(mat.trace() - Complex(1.0, 0.0));
    diag.min_eigenvalue = hermitian_eigenvalues(mat)(0);
    diag.psd_violation = std::max(0.0, -diag.min_eigenvalue);
    if (diag.hermiticity > tol.hermiticity) {
        diag.failed = "hermiticity";
    } else if (diag.trace > tol.trace) {
        diag.failed = "trace";
    } else if (diag.min_eigenvalue < tol.min_eigenvalue) {
        diag.failed = "psd";
    }
    return diag;
}

/// Bipartite state on C^{d_A} (x) C^{d_B}; row index i * d_B + j for |i>_A |j>_B.
///
/// Construction validates hermiticity, unit trace and positivity and throws
/// ValidationError on failure.
class DensityMatrix {
public:
    DensityMatrix(CMatrix mat, int d_a, int d_b, const DensityTolerances& tol = {})
        : d_a_(d_a), d_b_(d_b), mat_(std::move(mat))
    {
        if (d_a < 1 || d_b < 1) {
            throw InvalidDimension("subsystem dimensions must be positive");
        }
        if (mat_.rows() != d_a * d_b || mat_.cols() != d_a * d_b) {
            std::ostringstream os;
            os << "density matrix must be " << d_a * d_b << "x" << d_a * d_b << ", got "
               << mat_.rows() << "x" << mat_.cols();
            throw DimensionMismatch(os.str());
        }
        const DensityDiagnostics diag = diagnose_density(mat_, tol);
        if (!diag.ok()) {
            double dev = diag.hermiticity;
            if (diag.failed == "trace") {
                dev = diag.trace;
            } else if (diag.failed == "psd") {
                dev = diag.psd_violation;
            }
            std::ostringstream os;
            os << "invalid density matrix: " << diag.failed << " deviation " << dev;
            throw ValidationError(diag.failed, dev, os.str());
        }
    }

    int dim_a() const noexcept { return d_a_; }
    int dim_b() const noexcept { return d_b_; }
    int dim() const noexcept { return d_a_ * d_b_; }
    const CMatrix& matrix() const noexcept { return mat_; }

private:
    int d_a_;
    int d_b_;
    CMatrix mat_;
};

/// Result of validate_density: a state when accepted, diagnostics either way.
struct DensityValidation {
    std::optional<DensityMatrix> state;
    DensityDiagnostics diagnostics;

    bool ok() const noexcept { return state.has_value(); }
};

inline DensityValidation validate_density(const CMatrix& mat, int d_a, int d_b,
                                          const DensityTolerances& tol = {})
{
    if (d_a < 1 || d_b < 1 || mat.rows() != d_a * d_b || mat.cols() != d_a * d_b) {
        throw DimensionMismatch("matrix shape does not match d_A * d_B");
    }
    DensityValidation out;
    out.diagnostics = diagnose_density(mat, tol);
    if (out.diagnostics.ok()) {
        out.state.emplace(mat, d_a, d_b, tol);
    }
    return out;
}

/// tr_B of a (d_A d_B)-square matrix.
inline CMatrix partial_trace_b(const CMatrix& m, int da, int db)
{
    CMatrix out = CMatrix::Zero(da, da);
    for (int a = 0; a < da; ++a) {
        for (int c = 0; c < da; ++c) {
            out(a, c) = m.block(a * db, c * db, db, db).trace();
        }
    }
    return out;
}

/// tr_A of a (d_A d_B)-square matrix.
inline CMatrix partial_trace_a(const CMatrix& m, int da, int db)
{
    CMatrix out = CMatrix::Zero(db, db);
    for (int a = 0; a < da; ++a) {
        out += m.block(a * db, a * db, db, db);
    }
    return out;
}

/// Local Bloch vectors and correlation tensor over the canonical generator bases.
struct BlochForm {
    int d_a = 0;
    int d_b = 0;
    RVector r;   // length d_A^2 - 1
    RVector s;   // length d_B^2 - 1
    RMatrix t;   // (d_A^2 - 1) x (d_B^2 - 1)
};

inline constexpr double kImaginaryTolerance = 1e-10;

inline BlochForm bloch_decompose(const DensityMatrix& rho)
{
    const int da = rho.dim_a();
    const int db = rho.dim_b();
    const GeneratorBasis& ga = generator_basis(da);
    const GeneratorBasis& hb = generator_basis(db);
    const CMatrix herm = 0.5 * (rho.matrix() + rho.matrix().adjoint());

    const CMatrix rho_a = partial_trace_b(herm, da, db);
    const CMatrix rho_b = partial_trace_a(herm, da, db);

    double worst_imag = 0.0;
    auto real_part = [&worst_imag](Complex z) {
        worst_imag = std::max(worst_imag, std::abs(z.imag()));
        return z.real();
    };

    BlochForm out;
    out.d_a = da;
    out.d_b = db;
    out.r.resize(static_cast<Eigen::Index>(ga.size()));
    out.s.resize(static_cast<Eigen::Index>(hb.size()));
    out.t.resize(static_cast<Eigen::Index>(ga.size()), static_cast<Eigen::Index>(hb.size()));

    for (std::size_t i = 0; i < ga.size(); ++i) {
        out.r(static_cast<Eigen::Index>(i)) = real_part((rho_a * ga[i]).trace());
    }
    for (std::size_t j = 0; j < hb.size(); ++j) {
        out.s(static_cast<Eigen::Index>(j)) = real_part((rho_b * hb[j]).trace());
    }

    // t_ij = sum rho[(a,b),(c,d)] G_i[c,a] H_j[d,b]; contract Alice's index first.
    for (std::size_t i = 0; i < ga.size(); ++i) {
        const CMatrix& g = ga[i];
        CMatrix partial = CMatrix::Zero(db, db);  // partial[b,d] = sum_{a,c} rho[(a,b),(c,d)] G[c,a]
        for (int a = 0; a < da; ++a) {
            for (int c = 0; c < da; ++c) {
                const Complex gca = g(c, a);
                if (gca == Complex(0.0, 0.0)) {
                    continue;
                }
                partial += gca * herm.block(a * db, c * db, db, db);
            }
        }
        for (std::size_t j = 0; j < hb.size(); ++j) {
            out.t(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                real_part((partial * hb[j]).trace());
        }
    }

    if (worst_imag > kImaginaryTolerance) {
        throw ValidationError("imaginary", worst_imag,
                              "Bloch coefficients have imaginary parts up to " +
                                  std::to_string(worst_imag));
    }
    return out;
}

/// Expands r, s, T back into a matrix. Hermitian with unit trace; positivity is not checked.
inline CMatrix bloch_reconstruct(const BlochForm& b)
{
    if (b.d_a < 2 || b.d_b < 2) {
        throw InvalidDimension("Bloch form requires subsystem dimensions >= 2");
    }
    const Eigen::Index na = b.d_a * b.d_a - 1;
    const Eigen::Index nb = b.d_b * b.d_b - 1;
    if (b.r.size() != na || b.s.size() != nb || b.t.rows() != na || b.t.cols() != nb) {
        throw DimensionMismatch("Bloch form vector/tensor sizes do not match d_A, d_B");
    }
    const GeneratorBasis& ga = generator_basis(b.d_a);
    const GeneratorBasis& hb = generator_basis(b.d_b);
    const CMatrix id_a = CMatrix::Identity(b.d_a, b.d_a) / static_cast<double>(b.d_a);
    const CMatrix id_b = CMatrix::Identity(b.d_b, b.d_b) / static_cast<double>(b.d_b);

    CMatrix local_a = CMatrix::Zero(b.d_a, b.d_a);
    for (Eigen::Index i = 0; i < na; ++i) {
        local_a += b.r(i) * ga[static_cast<std::size_t>(i)];
    }
    CMatrix local_b = CMatrix::Zero(b.d_b, b.d_b);
    for (Eigen::Index j = 0; j < nb; ++j) {
        local_b += b.s(j) * hb[static_cast<std::size_t>(j)];
    }

    CMatrix out = kron(id_a, id_b) + kron(local_a, id_b) + kron(id_a, local_b);
    for (Eigen::Index i = 0; i < na; ++i) {
        CMatrix weighted = CMatrix::Zero(b.d_b, b.d_b);
        for (Eigen::Index j = 0; j < nb; ++j) {
            weighted += b.t(i, j) * hb[static_cast<std::size_t>(j)];
        }
        out += kron(ga[static_cast<std::size_t>(i)], weighted);
    }
    return out;
}

/// Reconstructs and validates; throws ValidationError if the result is not a state.
inline DensityMatrix bloch_reconstruct_state(const BlochForm& b, const DensityTolerances& tol = {})
{
    return DensityMatrix(bloch_reconstruct(b), b.d_a, b.d_b, tol);
}

/// Exchanges the tensor factors: <ji|rho'|lk> = <ij|rho|kl>.
inline DensityMatrix swap_parties(const DensityMatrix& rho)
{
    const int da = rho.dim_a();
    const int db = rho.dim_b();
    const CMatrix& m = rho.matrix();
    CMatrix out(m.rows(), m.cols());
    for (int i = 0; i < da; ++i) {
        for (int j = 0; j < db; ++j) {
            for (int k = 0; k < da; ++k) {
                for (int l = 0; l < db; ++l) {
                    out(j * da + i, l * da + k) = m(i * db + j, k * db + l);
                }
            }
        }
    }
    return DensityMatrix(std::move(out), db, da);
}

/// Partial transpose on party B.
inline CMatrix partial_transpose_b(const DensityMatrix& rho)
{
    const int da = rho.dim_a();
    const int db = rho.dim_b();
    const CMatrix& m = rho.matrix();
    CMatrix out(m.rows(), m.cols());
    for (int a = 0; a < da; ++a) {
        for (int b = 0; b < db; ++b) {
            for (int c = 0; c < da; ++c) {
                for (int d = 0; d < db; ++d) {
                    out(a * db + b, c * db + d) = m(a * db + d, c * db + b);
                }
            }
        }
    }
    return out;
}

inline double ppt_min_eigenvalue(const DensityMatrix& rho)
{
    return hermitian_eigenvalues(partial_transpose_b(rho))(0);
}

inline CMatrix reduced_state_a(const DensityMatrix& rho)
{
    return partial_trace_b(rho.matrix(), rho.dim_a(), rho.dim_b());
}

inline CMatrix reduced_state_b(const DensityMatrix& rho)
{
    return partial_trace_a(rho.matrix(), rho.dim_a(), rho.dim_b());
}

} // namespace steerscan
