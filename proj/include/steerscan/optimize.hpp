#pragma once

#include "steerscan/criterion.hpp"
#include "steerscan/errors.hpp"
#include "steerscan/families.hpp"
#include "steerscan/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <thread>
#include <variant>
#include <vector>

namespace steerscan {

enum class SearchVariant { T1, T2 };

/// Grid-then-simplex search over the criterion's scalar parameters.
struct ParamSearchConfig {
    SearchVariant variant = SearchVariant::T1;
    double cap = 1e4;            // every scalar searched in [0, cap]
    int grid_points = 25;        // per scalar: {0} plus a log grid from 1e-2 to cap
    int polish_iterations = 200;
    double polish_tolerance = 1e-10;
    int threads = 1;             // grid workers, 0 = hardware concurrency
};

inline void validate_config(const ParamSearchConfig& cfg)
{
    if (!(cfg.cap > 0.0) || !std::isfinite(cfg.cap)) {
        throw InvalidParameter("search cap must be positive and finite");
    }
    if (cfg.grid_points < 3) {
        throw InvalidParameter("search grid needs at least 3 points per scalar");
    }
    if (cfg.polish_iterations < 0 || cfg.threads < 0) {
        throw InvalidParameter("polish iterations and thread count must be nonnegative");
    }
}

/// {0} followed by grid_points - 1 log-spaced values from min(1e-2, cap) to cap.
inline std::vector<double> search_grid(const ParamSearchConfig& cfg)
{
    validate_config(cfg);
    const double lo = std::min(1e-2, cfg.cap);
    const int n = cfg.grid_points - 1;
    std::vector<double> grid{0.0};
    const double a = std::log10(lo);
    const double b = std::log10(cfg.cap);
    for (int i = 0; i < n; ++i) {
        const double t = n == 1 ? 1.0 : static_cast<double>(i) / (n - 1);
        grid.push_back(std::pow(10.0, a + t * (b - a)));
    }
    grid.back() = cfg.cap;
    return grid;
}

inline int resolve_threads(int requested)
{
    if (requested > 0) {
        return requested;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace detail {

inline CriterionParams params_from_coords(SearchVariant variant, const std::vector<double>& c)
{
    if (variant == SearchVariant::T1) {
        return ScalarParams{c[0], c[1]};
    }
    return WeightedParams{c[0], c[1], c[2], c[3]};
}

inline std::optional<std::vector<double>> coords_from_params(SearchVariant variant,
                                                             const CriterionParams& p)
{
    if (variant == SearchVariant::T1) {
        if (const auto* s = std::get_if<ScalarParams>(&p)) {
            return std::vector<double>{s->x, s->y};
        }
        if (const auto* w = std::get_if<WeightedParams>(&p); w && w->g > 0.0 && w->h > 0.0) {
            return std::vector<double>{w->x / w->g, w->y / w->h};
        }
        return std::nullopt;
    }
    if (const auto* w = std::get_if<WeightedParams>(&p)) {
        return std::vector<double>{w->x, w->y, w->g, w->h};
    }
    if (const auto* s = std::get_if<ScalarParams>(&p)) {
        return std::vector<double>{s->x, s->y, 1.0, 1.0};
    }
    return std::nullopt;
}

/// Runs fn(i) for i in [0, n) on up to `threads` workers.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn)
{
    const std::size_t workers =
        std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) {
                fn(i);
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
}

} // namespace detail

struct ParamSearchResult {
    CriterionParams params;
    CriterionReport report;
    double grid_best = 0.0;   // best violation on the grid alone
    long evaluations = 0;
};

/// Maximizes the violation over the parameter grid, then polishes the best grid
/// point (and the warm start, if any) with the simplex in log10 coordinates.
/// Polish results are kept only when they improve on the grid.
inline ParamSearchResult optimize_params(const DirectedEvaluator& evaluator,
                                         const ParamSearchConfig& cfg,
                                         const std::optional<CriterionParams>& warm_start = {})
{
    const std::vector<double> grid = search_grid(cfg);
    const std::size_t dims = cfg.variant == SearchVariant::T1 ? 2 : 4;

    std::size_t total = 1;
    for (std::size_t k = 0; k < dims; ++k) {
        total *= grid.size();
    }
    auto coords_at = [&](std::size_t index) {
        std::vector<double> c(dims);
        for (std::size_t k = 0; k < dims; ++k) {
            c[k] = grid[index % grid.size()];
            index /= grid.size();
        }
        return c;
    };

    std::vector<double> values(total);
    detail::parallel_for(total, resolve_threads(cfg.threads), [&](std::size_t i) {
        values[i] = evaluator.violation(detail::params_from_coords(cfg.variant, coords_at(i)));
    });
    ParamSearchResult out;
    out.evaluations = static_cast<long>(total);

    std::size_t best_index = 0;
    for (std::size_t i = 1; i < total; ++i) {
        if (values[i] > values[best_index]) {
            best_index = i;
        }
    }
    std::vector<double> best = coords_at(best_index);
    double best_value = values[best_index];
    out.grid_best = best_value;

    const double floor = grid[1];
    SimplexOptions opts;
    opts.max_iterations = cfg.polish_iterations;
    opts.tolerance = cfg.polish_tolerance;
    opts.initial_step = 0.25;
    opts.lower.assign(dims, std::log10(floor));
    opts.upper.assign(dims, std::log10(cfg.cap));

    auto to_log = [floor](const std::vector<double>& c) {
        std::vector<double> u(c.size());
        for (std::size_t k = 0; k < c.size(); ++k) {
            u[k] = std::log10(std::max(c[k], floor));
        }
        return u;
    };
    auto from_log = [](const std::vector<double>& u) {
        std::vector<double> c(u.size());
        for (std::size_t k = 0; k < u.size(); ++k) {
            c[k] = std::pow(10.0, u[k]);
        }
        return c;
    };
    auto objective = [&](const std::vector<double>& u) {
        return evaluator.violation(detail::params_from_coords(cfg.variant, from_log(u)));
    };
    auto consider = [&](const std::vector<double>& coords, double value) {
        if (value > best_value) {
            best_value = value;
            best = coords;
        }
    };

    std::vector<std::vector<double>> starts{best};
    if (warm_start) {
        if (auto c = detail::coords_from_params(cfg.variant, *warm_start)) {
            bool in_box = true;
            for (double& v : *c) {
                in_box = in_box && std::isfinite(v) && v >= 0.0;
                v = std::min(v, cfg.cap);
            }
            if (in_box) {
                ++out.evaluations;
                consider(*c, evaluator.violation(detail::params_from_coords(cfg.variant, *c)));
                starts.push_back(*c);
            }
        }
    }
    if (cfg.polish_iterations > 0) {
        for (const auto& start : starts) {
            const SimplexResult polished = simplex_maximize(objective, to_log(start), opts);
            out.evaluations += polished.evaluations;
            consider(from_log(polished.point), polished.value);
        }
    }

    out.params = detail::params_from_coords(cfg.variant, best);
    out.report = evaluator.report(out.params);
    return out;
}

inline ParamSearchResult optimize_params(const DensityMatrix& rho, Direction dir,
                                         const ParamSearchConfig& cfg,
                                         const std::optional<CriterionParams>& warm_start = {},
                                         double margin = kDefaultMargin)
{
    return optimize_params(DirectedEvaluator(rho, dir, margin), cfg, warm_start);
}

/// Fixed parameters, or a search configuration for per-probe optimization.
using ParamChoice = std::variant<CriterionParams, ParamSearchConfig>;

struct ThresholdOptions {
    double tol = 1e-9;
    int bracket_points = 11;   // coarse probes on [0, 1] used to detect the sign change
    int max_bisections = 200;
    double margin = 0.0;       // bisection follows the sign of the violation
};

struct Probe {
    double p = 0.0;
    double violation = 0.0;
    bool steerable = false;
};

struct ThresholdResult {
    double p_star = 0.0;
    Direction direction = Direction::AliceToBob;
    CriterionParams params;        // fixed params, or the best found at the upper bracket
    bool auto_params = false;
    double tol = 0.0;              // requested bisection tolerance
    double achieved_tol = 0.0;     // final bracket width
    double lower = 0.0;            // largest probed p with no detection
    double upper = 1.0;            // smallest probed p with detection
    std::vector<Probe> probes;
};

inline std::string format_probes(const std::vector<Probe>& probes)
{
    std::ostringstream os;
    os.precision(10);
    for (const auto& pr : probes) {
        os << "\n  p=" << pr.p << " violation=" << pr.violation
           << (pr.steerable ? " steerable" : "");
    }
    return os.str();
}

class ThresholdError : public Error {
public:
    ThresholdError(const std::string& what, std::vector<Probe> probes)
        : Error(what + format_probes(probes)), probes_(std::move(probes)) {}
    const std::vector<Probe>& probes() const noexcept { return probes_; }

private:
    std::vector<Probe> probes_;
};

/// No sign change of the violation on [0, 1].
class NoThresholdError : public ThresholdError {
public:
    using ThresholdError::ThresholdError;
};

/// More than one sign change among the bracketing probes.
class NonMonotoneError : public ThresholdError {
public:
    using ThresholdError::ThresholdError;
};

namespace detail {

/// Evaluates one family member, optimizing parameters when requested.
class FamilyProbe {
public:
    FamilyProbe(const StateFamily& family, Direction dir, const ParamChoice& choice,
                double margin)
        : family_(family), dir_(dir), choice_(choice), margin_(margin)
    {
        if (const auto* fixed = std::get_if<CriterionParams>(&choice_)) {
            validate_params(*fixed);
        } else {
            validate_config(std::get<ParamSearchConfig>(choice_));
        }
    }

    CriterionReport operator()(double p)
    {
        const DirectedEvaluator evaluator(family_.at(p), dir_, margin_);
        if (const auto* fixed = std::get_if<CriterionParams>(&choice_)) {
            return evaluator.report(*fixed);
        }
        const auto& cfg = std::get<ParamSearchConfig>(choice_);
        ParamSearchResult found = optimize_params(evaluator, cfg, warm_);
        warm_ = found.params;
        return found.report;
    }

    bool is_auto() const noexcept { return std::holds_alternative<ParamSearchConfig>(choice_); }

private:
    const StateFamily& family_;
    Direction dir_;
    ParamChoice choice_;
    double margin_;
    std::optional<CriterionParams> warm_;
};

} // namespace detail

/// Bisects p in [0, 1] for the onset of a detected violation.
///
/// Requires no detection at p = 0 and detection at p = 1; the coarse bracketing
/// probes must show a single sign change.
inline ThresholdResult threshold_scan(const StateFamily& family, Direction dir,
                                      const ParamChoice& choice,
                                      const ThresholdOptions& opts = {})
{
    if (!(opts.tol > 0.0) || opts.bracket_points < 2) {
        throw InvalidParameter("threshold scan needs tol > 0 and at least 2 bracket points");
    }
    detail::FamilyProbe probe(family, dir, choice, opts.margin);
    ThresholdResult out;
    out.direction = dir;
    out.auto_params = probe.is_auto();
    out.tol = opts.tol;

    std::vector<CriterionParams> probe_params;
    auto run = [&](double p) {
        CriterionReport rep = probe(p);
        out.probes.push_back({p, rep.violation, rep.steerable});
        probe_params.push_back(rep.params);
        return rep.steerable;
    };

    const int n = opts.bracket_points;
    std::vector<bool> flags;
    for (int i = 0; i < n; ++i) {
        flags.push_back(run(static_cast<double>(i) / (n - 1)));
    }
    if (flags.front() || !flags.back()) {
        throw NoThresholdError("no threshold in range: need no detection at p=0 and detection at p=1",
                               out.probes);
    }
    int changes = 0;
    int first_true = n - 1;
    for (int i = 1; i < n; ++i) {
        if (flags[i] != flags[i - 1]) {
            ++changes;
        }
    }
    for (int i = 0; i < n; ++i) {
        if (flags[i]) {
            first_true = i;
            break;
        }
    }
    if (changes != 1) {
        throw NonMonotoneError("non-monotone detection pattern among bracketing probes",
                               out.probes);
    }

    double lo = static_cast<double>(first_true - 1) / (n - 1);
    double hi = static_cast<double>(first_true) / (n - 1);
    CriterionParams upper_params = probe_params[static_cast<std::size_t>(first_true)];
    for (int it = 0; it < opts.max_bisections && hi - lo > opts.tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        if (run(mid)) {
            hi = mid;
            upper_params = probe_params.back();
        } else {
            lo = mid;
        }
    }

    out.lower = lo;
    out.upper = hi;
    out.achieved_tol = hi - lo;
    out.p_star = 0.5 * (lo + hi);
    out.params = upper_params;
    return out;
}

struct CurvePoint {
    double p = 0.0;
    CriterionReport report;
};

/// One report per grid point, in input order.
inline std::vector<CurvePoint> detection_curve(const StateFamily& family, Direction dir,
                                               const ParamChoice& choice,
                                               const std::vector<double>& p_grid,
                                               double margin = kDefaultMargin)
{
    for (double p : p_grid) {
        if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
            throw InvalidParameter("curve grid values must lie in [0, 1]");
        }
    }
    detail::FamilyProbe probe(family, dir, choice, margin);
    std::vector<CurvePoint> out;
    out.reserve(p_grid.size());
    for (double p : p_grid) {
        out.push_back({p, probe(p)});
    }
    return out;
}

} // namespace steerscan
