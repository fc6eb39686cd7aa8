#pragma once

#include "steerscan/bloch.hpp"
#include "steerscan/errors.hpp"
#include "steerscan/linalg.hpp"

#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace steerscan {

namespace detail {

inline void check_mixing(double p)
{
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
        throw InvalidParameter("mixing parameter p must lie in [0, 1], got " + std::to_string(p));
    }
}

inline CMatrix projector(const Eigen::VectorXcd& psi)
{
    return psi * psi.adjoint();
}

} // namespace detail

/// p |psi-><psi-| + (1 - p) |0><0| (x) I/2 with |psi-> = (|01> - |10>)/sqrt(2).
inline DensityMatrix example1_state(double p)
{
    detail::check_mixing(p);
    Eigen::VectorXcd singlet = Eigen::VectorXcd::Zero(4);
    singlet(1) = 1.0 / std::sqrt(2.0);
    singlet(2) = -1.0 / std::sqrt(2.0);
    CMatrix zero_half = CMatrix::Zero(4, 4);
    zero_half(0, 0) = 0.5;
    zero_half(1, 1) = 0.5;
    return DensityMatrix(p * detail::projector(singlet) + (1.0 - p) * zero_half, 2, 2);
}

/// p |psi><psi| + (1 - p) I/4 with |psi> = 2/3 (|00> + |11>) + 1/3 |10>.
inline DensityMatrix example2_state(double p)
{
    detail::check_mixing(p);
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(4);
    psi(0) = 2.0 / 3.0;
    psi(2) = 1.0 / 3.0;
    psi(3) = 2.0 / 3.0;
    return DensityMatrix(p * detail::projector(psi) + (1.0 - p) * CMatrix::Identity(4, 4) / 4.0,
                         2, 2);
}

/// p * P_anti / (d(d-1)/2) + (1 - p) I/d^2. For d = 2 this is p |psi-><psi-| + (1 - p) I/4.
inline DensityMatrix werner_state(int d, double p)
{
    detail::check_mixing(p);
    if (d < 2) {
        throw InvalidDimension("werner family requires d >= 2");
    }
    const int n = d * d;
    CMatrix swap = CMatrix::Zero(n, n);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            swap(j * d + i, i * d + j) = 1.0;
        }
    }
    const CMatrix anti = 0.5 * (CMatrix::Identity(n, n) - swap);
    const double anti_rank = d * (d - 1) / 2.0;
    return DensityMatrix(p * anti / anti_rank + (1.0 - p) * CMatrix::Identity(n, n) / n, d, d);
}

/// p |phi+><phi+| + (1 - p) I/d^2 with |phi+> = sum_i |ii> / sqrt(d).
inline DensityMatrix isotropic_state(int d, double p)
{
    detail::check_mixing(p);
    if (d < 2) {
        throw InvalidDimension("isotropic family requires d >= 2");
    }
    const int n = d * d;
    Eigen::VectorXcd phi = Eigen::VectorXcd::Zero(n);
    for (int i = 0; i < d; ++i) {
        phi(i * d + i) = 1.0 / std::sqrt(static_cast<double>(d));
    }
    return DensityMatrix(p * detail::projector(phi) + (1.0 - p) * CMatrix::Identity(n, n) / n, d,
                         d);
}

/// p * rho1 + (1 - p) * rho0.
inline DensityMatrix interpolate_states(const DensityMatrix& rho0, const DensityMatrix& rho1,
                                        double p)
{
    detail::check_mixing(p);
    if (rho0.dim_a() != rho1.dim_a() || rho0.dim_b() != rho1.dim_b()) {
        throw DimensionMismatch("interpolated states must share subsystem dimensions");
    }
    return DensityMatrix(p * rho1.matrix() + (1.0 - p) * rho0.matrix(), rho0.dim_a(),
                         rho0.dim_b());
}

/// A named one-parameter family p -> rho(p) on [0, 1].
struct StateFamily {
    std::string name;
    std::function<DensityMatrix(double)> at;
};

inline const std::vector<std::string>& registered_families()
{
    static const std::vector<std::string> names = {"example1", "example2", "werner", "isotropic"};
    return names;
}

/// Looks up a registered family; `dim` only applies to werner and isotropic.
inline StateFamily make_family(const std::string& name, int dim = 2)
{
    if (name == "example1") {
        return {name, [](double p) { return example1_state(p); }};
    }
    if (name == "example2") {
        return {name, [](double p) { return example2_state(p); }};
    }
    if (name == "werner") {
        if (dim < 2) {
            throw InvalidDimension("werner family requires d >= 2");
        }
        return {name, [dim](double p) { return werner_state(dim, p); }};
    }
    if (name == "isotropic") {
        if (dim < 2) {
            throw InvalidDimension("isotropic family requires d >= 2");
        }
        return {name, [dim](double p) { return isotropic_state(dim, p); }};
    }
    throw InvalidParameter("unknown state family '" + name + "'");
}

inline StateFamily make_interpolation_family(DensityMatrix rho0, DensityMatrix rho1)
{
    if (rho0.dim_a() != rho1.dim_a() || rho0.dim_b() != rho1.dim_b()) {
        throw DimensionMismatch("interpolated states must share subsystem dimensions");
    }
    return {"interpolation",
            [rho0 = std::move(rho0), rho1 = std::move(rho1)](double p) {
                return interpolate_states(rho0, rho1, p);
            }};
}

} // namespace steerscan
