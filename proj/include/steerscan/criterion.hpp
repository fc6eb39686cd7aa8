#pragma once

#include "steerscan/bloch.hpp"
#include "steerscan/errors.hpp"
#include "steerscan/linalg.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>

namespace steerscan {

/// Which party is trying to steer the other.
enum class Direction { AliceToBob, BobToAlice };

inline const char* to_string(Direction dir)
{
    return dir == Direction::AliceToBob ? "A->B" : "B->A";
}

/// Augmented-correlation parameters (x, y): x weights Alice's block, y weights Bob's.
struct ScalarParams {
    double x = 0.0;
    double y = 0.0;
};

/// Weighted form (x, y, g, h); g scales Alice's Bloch block and h Bob's.
struct WeightedParams {
    double x = 0.0;
    double y = 0.0;
    double g = 1.0;
    double h = 1.0;
};

/// Vector parameters. Absent eta/gamma mean the unweighted augmented matrix.
struct VectorParams {
    RVector alpha;
    RVector beta;
    std::optional<RVector> eta;
    std::optional<RVector> gamma;
};

/// Parameters are labelled by party, not by direction: x (and g, alpha, eta)
/// always belong to Alice, y (and h, beta, gamma) to Bob.
using CriterionParams = std::variant<ScalarParams, WeightedParams, VectorParams>;

inline const char* variant_label(const CriterionParams& p)
{
    switch (p.index()) {
    case 0: return "T1";
    case 1: return "T2";
    default: return "VEC";
    }
}

inline constexpr double kDefaultMargin = 1e-9;

namespace detail {

inline void check_scalar(double v, const char* name)
{
    if (!std::isfinite(v) || v < 0.0) {
        throw InvalidParameter(std::string("parameter ") + name +
                               " must be finite and nonnegative, got " + std::to_string(v));
    }
}

inline void check_vector(const RVector& v, const char* name)
{
    if (v.size() == 0) {
        throw InvalidParameter(std::string("parameter vector ") + name + " must be nonempty");
    }
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        check_scalar(v(i), name);
    }
}

inline void check_bloch_shape(const BlochForm& b)
{
    if (b.r.size() != b.t.rows() || b.s.size() != b.t.cols()) {
        throw DimensionMismatch("Bloch vectors do not match the correlation tensor");
    }
}

} // namespace detail

inline void validate_params(const CriterionParams& params)
{
    std::visit(
        [](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, ScalarParams>) {
                detail::check_scalar(p.x, "x");
                detail::check_scalar(p.y, "y");
            } else if constexpr (std::is_same_v<T, WeightedParams>) {
                detail::check_scalar(p.x, "x");
                detail::check_scalar(p.y, "y");
                detail::check_scalar(p.g, "g");
                detail::check_scalar(p.h, "h");
            } else {
                detail::check_vector(p.alpha, "alpha");
                detail::check_vector(p.beta, "beta");
                if (p.eta) {
                    detail::check_vector(*p.eta, "eta");
                }
                if (p.gamma) {
                    detail::check_vector(*p.gamma, "gamma");
                }
            }
        },
        params);
}

namespace detail {

template <typename Real>
using MatrixT = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using VectorT = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

template <typename Real>
MatrixT<Real> weighted_correlation_t(const BlochForm& b, Real x, Real y, Real g, Real h)
{
    check_bloch_shape(b);
    const Eigen::Index na = b.t.rows();
    const Eigen::Index nb = b.t.cols();
    MatrixT<Real> m(na + 1, nb + 1);
    m(0, 0) = x * y;
    m.block(0, 1, 1, nb) = (x * h) * b.s.transpose().cast<Real>();
    m.block(1, 0, na, 1) = (y * g) * b.r.cast<Real>();
    m.block(1, 1, na, nb) = (g * h) * b.t.cast<Real>();
    return m;
}

template <typename Real>
MatrixT<Real> vector_correlation_t(const BlochForm& b, const RVector& alpha, const RVector& beta,
                                   const std::optional<RVector>& eta,
                                   const std::optional<RVector>& gamma)
{
    check_vector(alpha, "alpha");
    check_vector(beta, "beta");
    check_bloch_shape(b);
    const RVector one = RVector::Ones(1);
    const RVector& e = eta ? *eta : one;
    const RVector& c = gamma ? *gamma : one;
    check_vector(e, "eta");
    check_vector(c, "gamma");

    const VectorT<Real> a = alpha.cast<Real>();
    const VectorT<Real> bt = beta.cast<Real>();
    const MatrixT<Real> eta_r = kron(MatrixT<Real>(e.cast<Real>()), MatrixT<Real>(b.r.cast<Real>()));
    const MatrixT<Real> gamma_s =
        kron(MatrixT<Real>(c.cast<Real>()), MatrixT<Real>(b.s.cast<Real>()));
    const MatrixT<Real> corr =
        kron(MatrixT<Real>(e.cast<Real>() * c.cast<Real>().transpose()), b.t.cast<Real>());

    const Eigen::Index n = a.size();
    const Eigen::Index m = bt.size();
    MatrixT<Real> out(n + eta_r.rows(), m + gamma_s.rows());
    out.block(0, 0, n, m) = a * bt.transpose();
    out.block(0, m, n, gamma_s.rows()) = a * gamma_s.transpose();
    out.block(n, 0, eta_r.rows(), m) = eta_r * bt.transpose();
    out.block(n, m, corr.rows(), corr.cols()) = corr;
    return out;
}

template <typename Real>
MatrixT<Real> correlation_matrix_t(const BlochForm& b, const CriterionParams& params)
{
    validate_params(params);
    return std::visit(
        [&b](const auto& p) -> MatrixT<Real> {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, ScalarParams>) {
                return weighted_correlation_t<Real>(b, p.x, p.y, Real(1), Real(1));
            } else if constexpr (std::is_same_v<T, WeightedParams>) {
                return weighted_correlation_t<Real>(b, p.x, p.y, p.g, p.h);
            } else {
                return vector_correlation_t<Real>(b, p.alpha, p.beta, p.eta, p.gamma);
            }
        },
        params);
}

template <typename Real>
Real trace_norm_t(const MatrixT<Real>& m)
{
    if (m.size() == 0) {
        return Real(0);
    }
    Eigen::JacobiSVD<MatrixT<Real>> svd(m);
    return svd.singularValues().sum();
}

template <typename Real>
Real unsteerable_bound_t(int d_a, int d_b, const CriterionParams& params)
{
    if (d_a < 2 || d_b < 2) {
        throw InvalidDimension("bound requires subsystem dimensions >= 2");
    }
    validate_params(params);
    const Real steer_side = Real(d_a) - Real(1) / Real(d_a);
    const Real steered_side = Real(1) - Real(1) / Real(d_b);

    Real a2 = 0;
    Real b2 = 0;
    Real e2 = 1;
    Real c2 = 1;
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, ScalarParams>) {
                a2 = Real(p.x) * Real(p.x);
                b2 = Real(p.y) * Real(p.y);
            } else if constexpr (std::is_same_v<T, WeightedParams>) {
                a2 = Real(p.x) * Real(p.x);
                b2 = Real(p.y) * Real(p.y);
                e2 = Real(p.g) * Real(p.g);
                c2 = Real(p.h) * Real(p.h);
            } else {
                a2 = p.alpha.template cast<Real>().squaredNorm();
                b2 = p.beta.template cast<Real>().squaredNorm();
                e2 = p.eta ? p.eta->template cast<Real>().squaredNorm() : Real(1);
                c2 = p.gamma ? p.gamma->template cast<Real>().squaredNorm() : Real(1);
            }
        },
        params);
    using std::sqrt;
    return sqrt(a2 + e2 * steer_side) * sqrt(b2 + c2 * steered_side);
}

} // namespace detail

/// [[x y, x s^T], [y r, T]], size d_A^2 x d_B^2.
inline RMatrix augmented_correlation(const BlochForm& b, double x, double y)
{
    detail::check_scalar(x, "x");
    detail::check_scalar(y, "y");
    return detail::weighted_correlation_t<double>(b, x, y, 1.0, 1.0);
}

/// [[x y, x h s^T], [y g r, g h T]].
inline RMatrix weighted_correlation(const BlochForm& b, double x, double y, double g, double h)
{
    detail::check_scalar(x, "x");
    detail::check_scalar(y, "y");
    detail::check_scalar(g, "g");
    detail::check_scalar(h, "h");
    return detail::weighted_correlation_t<double>(b, x, y, g, h);
}

/// Vector form. Without eta/gamma: [[a b^T, a s^T], [r b^T, T]].
/// With them: [[a b^T, a (gamma^T (x) s^T)], [(eta (x) r) b^T, (eta gamma^T) (x) T]].
/// A missing eta or gamma is treated as the singleton (1).
inline RMatrix vector_correlation(const BlochForm& b, const RVector& alpha, const RVector& beta,
                                  const std::optional<RVector>& eta = std::nullopt,
                                  const std::optional<RVector>& gamma = std::nullopt)
{
    return detail::vector_correlation_t<double>(b, alpha, beta, eta, gamma);
}

inline RMatrix correlation_matrix(const BlochForm& b, const CriterionParams& params)
{
    return detail::correlation_matrix_t<double>(b, params);
}

/// Sum of singular values. The SVD runs in extended precision.
inline double trace_norm(const RMatrix& m)
{
    if (!m.allFinite()) {
        throw InvalidParameter("trace norm of a matrix with non-finite entries");
    }
    return static_cast<double>(detail::trace_norm_t<long double>(m.cast<long double>()));
}

/// Right-hand side of the unsteerability inequality for the steering party A:
/// sqrt(|a|^2 + |eta|^2 (d_A - 1/d_A)) * sqrt(|b|^2 + |gamma|^2 (1 - 1/d_B)).
inline double unsteerable_bound(int d_a, int d_b, const CriterionParams& params)
{
    return static_cast<double>(detail::unsteerable_bound_t<long double>(d_a, d_b, params));
}

/// Re-labels party-indexed parameters for evaluation on the swapped state.
inline CriterionParams exchange_party_params(const CriterionParams& params)
{
    return std::visit(
        [](const auto& p) -> CriterionParams {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, ScalarParams>) {
                return ScalarParams{p.y, p.x};
            } else if constexpr (std::is_same_v<T, WeightedParams>) {
                return WeightedParams{p.y, p.x, p.h, p.g};
            } else {
                return VectorParams{p.beta, p.alpha, p.gamma, p.eta};
            }
        },
        params);
}

struct CriterionReport {
    Direction direction = Direction::AliceToBob;
    CriterionParams params;
    double lhs = 0.0;
    double rhs = 0.0;
    double violation = 0.0;
    /// True only when the violation exceeds the certification margin. False
    /// means "not detected", never "certified unsteerable".
    bool steerable = false;
};

/// Evaluates the criterion for one state and direction, decomposing the state once.
///
/// B->A is handled by swapping the parties of the state and the roles of the
/// party-labelled parameters, then applying the A->B inequality.
class DirectedEvaluator {
public:
    DirectedEvaluator(const DensityMatrix& rho, Direction dir, double margin = kDefaultMargin)
        : direction_(dir), margin_(margin),
          oriented_(dir == Direction::AliceToBob ? bloch_decompose(rho)
                                                 : bloch_decompose(swap_parties(rho)))
    {
        if (rho.dim_a() < 2 || rho.dim_b() < 2) {
            throw InvalidDimension("criterion requires subsystem dimensions >= 2");
        }
    }

    Direction direction() const noexcept { return direction_; }
    double margin() const noexcept { return margin_; }

    /// Bloch form with the steering party first.
    const BlochForm& oriented() const noexcept { return oriented_; }

    CriterionReport report(const CriterionParams& params) const
    {
        validate_params(params);
        const CriterionParams local =
            direction_ == Direction::AliceToBob ? params : exchange_party_params(params);
        CriterionReport out;
        out.direction = direction_;
        out.params = params;
        // lhs and rhs grow like x*y while the violation stays O(1); subtract before rounding.
        const long double lhs =
            detail::trace_norm_t<long double>(detail::correlation_matrix_t<long double>(oriented_, local));
        const long double rhs =
            detail::unsteerable_bound_t<long double>(oriented_.d_a, oriented_.d_b, local);
        out.lhs = static_cast<double>(lhs);
        out.rhs = static_cast<double>(rhs);
        out.violation = static_cast<double>(lhs - rhs);
        out.steerable = out.violation > margin_;
        return out;
    }

    double violation(const CriterionParams& params) const { return report(params).violation; }

private:
    Direction direction_;
    double margin_;
    BlochForm oriented_;
};

inline CriterionReport evaluate(const DensityMatrix& rho, const CriterionParams& params,
                                Direction dir, double margin = kDefaultMargin)
{
    return DirectedEvaluator(rho, dir, margin).report(params);
}

} // namespace steerscan
