#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

namespace steerscan {

struct SimplexOptions {
    int max_iterations = 200;
    double tolerance = 1e-10;   // stop once every vertex is this close to the best one
    double initial_step = 0.5;
    std::vector<double> lower;  // optional box, empty = unbounded
    std::vector<double> upper;
};

struct SimplexResult {
    std::vector<double> point;
    double value = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
};

/// Derivative-free maximization with a reflection / expansion / contraction /
/// shrink simplex. Points are clamped into the box when one is given.
/// Deterministic: ties keep the earlier vertex.
template <typename Objective>
SimplexResult simplex_maximize(Objective&& f, std::vector<double> start,
                               const SimplexOptions& opts = {})
{
    const std::size_t n = start.size();
    SimplexResult result;

    auto clamp = [&opts](std::vector<double>& p) {
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (i < opts.lower.size()) {
                p[i] = std::max(p[i], opts.lower[i]);
            }
            if (i < opts.upper.size()) {
                p[i] = std::min(p[i], opts.upper[i]);
            }
        }
    };
    auto eval = [&](const std::vector<double>& p) {
        ++result.evaluations;
        const double v = f(p);
        return std::isnan(v) ? -HUGE_VAL : v;
    };

    clamp(start);
    std::vector<std::vector<double>> verts(n + 1, start);
    std::vector<double> vals(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        auto& v = verts[i + 1];
        v[i] += opts.initial_step;
        if (i < opts.upper.size() && v[i] > opts.upper[i]) {
            v[i] = start[i] - opts.initial_step;
        }
        clamp(v);
    }
    for (std::size_t i = 0; i <= n; ++i) {
        vals[i] = eval(verts[i]);
    }

    std::vector<std::size_t> order(n + 1);
    auto combine = [n](const std::vector<double>& a, const std::vector<double>& b, double t) {
        std::vector<double> out(n);
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = a[i] + t * (b[i] - a[i]);
        }
        return out;
    };

    for (; result.iterations < opts.max_iterations; ++result.iterations) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&vals](std::size_t a, std::size_t b) { return vals[a] > vals[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second_worst = order[n > 0 ? n - 1 : 0];

        double spread = 0.0;
        for (std::size_t i = 0; i <= n; ++i) {
            for (std::size_t k = 0; k < n; ++k) {
                spread = std::max(spread, std::abs(verts[i][k] - verts[best][k]));
            }
        }
        if (spread <= opts.tolerance) {
            result.converged = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) {
                continue;
            }
            for (std::size_t k = 0; k < n; ++k) {
                centroid[k] += verts[i][k] / static_cast<double>(n);
            }
        }

        auto reflected = combine(centroid, verts[worst], -1.0);
        clamp(reflected);
        const double f_reflected = eval(reflected);

        if (f_reflected > vals[best]) {
            auto expanded = combine(centroid, verts[worst], -2.0);
            clamp(expanded);
            const double f_expanded = eval(expanded);
            if (f_expanded > f_reflected) {
                verts[worst] = std::move(expanded);
                vals[worst] = f_expanded;
            } else {
                verts[worst] = std::move(reflected);
                vals[worst] = f_reflected;
            }
            continue;
        }
        if (f_reflected > vals[second_worst]) {
            verts[worst] = std::move(reflected);
            vals[worst] = f_reflected;
            continue;
        }

        // Contract toward the better of the worst vertex and its reflection.
        const bool outside = f_reflected > vals[worst];
        auto contracted = outside ? combine(centroid, reflected, 0.5)
                                  : combine(centroid, verts[worst], 0.5);
        clamp(contracted);
        const double f_contracted = eval(contracted);
        if (f_contracted > std::max(f_reflected, vals[worst])) {
            verts[worst] = std::move(contracted);
            vals[worst] = f_contracted;
            continue;
        }

        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) {
                continue;
            }
            verts[i] = combine(verts[best], verts[i], 0.5);
            vals[i] = eval(verts[i]);
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i <= n; ++i) {
        if (vals[i] > vals[best]) {
            best = i;
        }
    }
    result.point = verts[best];
    result.value = vals[best];
    return result;
}

} // namespace steerscan
