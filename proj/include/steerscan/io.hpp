#pragma once

// JSON / CSV serialization. Requires nlohmann/json on the include path.

#include "steerscan/basis.hpp"
#include "steerscan/bloch.hpp"
#include "steerscan/criterion.hpp"
#include "steerscan/errors.hpp"
#include "steerscan/optimize.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace steerscan {

using Json = nlohmann::ordered_json;

/// Shortest form that still carries 17 significant digits; parses back to the same double.
inline std::string format_double(double v)
{
    if (!std::isfinite(v)) {
        return "null";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline void write_json_value(std::ostream& os, const Json& j, int indent, int depth)
{
    const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
    const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
    const char* nl = indent > 0 ? "\n" : "";
    switch (j.type()) {
    case Json::value_t::object: {
        if (j.empty()) {
            os << "{}";
            return;
        }
        os << '{' << nl;
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) {
                os << ',' << nl;
            }
            first = false;
            os << pad << Json(it.key()).dump() << (indent > 0 ? ": " : ":");
            write_json_value(os, it.value(), indent, depth + 1);
        }
        os << nl << close_pad << '}';
        return;
    }
    case Json::value_t::array: {
        if (j.empty()) {
            os << "[]";
            return;
        }
        // Arrays of scalars stay on one line.
        const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) {
            return e.is_primitive();
        });
        if (flat || indent == 0) {
            os << '[';
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) {
                    os << (indent > 0 ? ", " : ",");
                }
                write_json_value(os, j[i], 0, 0);
            }
            os << ']';
            return;
        }
        os << '[' << nl;
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (i) {
                os << ',' << nl;
            }
            os << pad;
            write_json_value(os, j[i], indent, depth + 1);
        }
        os << nl << close_pad << ']';
        return;
    }
    case Json::value_t::number_float:
        os << format_double(j.get<double>());
        return;
    default:
        os << j.dump();
        return;
    }
}

} // namespace detail

/// Serializes with stable key order (insertion order) and 17-digit floats.
inline std::string dump_json(const Json& j, int indent = 2)
{
    std::ostringstream os;
    detail::write_json_value(os, j, indent, 0);
    return os.str();
}

// ---------------------------------------------------------------------------
// Density matrices: { "dA": int, "dB": int, "matrix": [[[re, im], ...], ...] }

inline Json density_to_json(const DensityMatrix& rho)
{
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < rho.matrix().rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index k = 0; k < rho.matrix().cols(); ++k) {
            const Complex z = rho.matrix()(i, k);
            row.push_back(Json::array({z.real(), z.imag()}));
        }
        rows.push_back(std::move(row));
    }
    Json out;
    out["dA"] = rho.dim_a();
    out["dB"] = rho.dim_b();
    out["matrix"] = std::move(rows);
    return out;
}

/// Parses and validates; throws IoError on malformed input, ValidationError /
/// DimensionMismatch on a matrix that is not a valid state.
inline DensityMatrix density_from_json(const Json& j, const DensityTolerances& tol = {})
{
    if (!j.is_object() || !j.contains("dA") || !j.contains("dB") || !j.contains("matrix")) {
        throw IoError("density JSON must be an object with keys dA, dB, matrix");
    }
    if (!j["dA"].is_number_integer() || !j["dB"].is_number_integer()) {
        throw IoError("dA and dB must be integers");
    }
    const int da = j["dA"].get<int>();
    const int db = j["dB"].get<int>();
    if (da < 1 || db < 1) {
        throw InvalidDimension("dA and dB must be positive");
    }
    const Json& rows = j["matrix"];
    const int n = da * db;
    if (!rows.is_array() || static_cast<int>(rows.size()) != n) {
        throw DimensionMismatch("matrix must have dA*dB = " + std::to_string(n) + " rows");
    }
    CMatrix m(n, n);
    for (int i = 0; i < n; ++i) {
        const Json& row = rows[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<int>(row.size()) != n) {
            throw DimensionMismatch("row " + std::to_string(i) + " must have " + std::to_string(n) +
                                    " entries");
        }
        for (int k = 0; k < n; ++k) {
            const Json& e = row[static_cast<std::size_t>(k)];
            if (e.is_number()) {
                m(i, k) = Complex(e.get<double>(), 0.0);
            } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
                m(i, k) = Complex(e[0].get<double>(), e[1].get<double>());
            } else {
                throw IoError("matrix entry (" + std::to_string(i) + "," + std::to_string(k) +
                              ") must be [re, im]");
            }
        }
    }
    return DensityMatrix(std::move(m), da, db, tol);
}

inline Json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path + "'");
    }
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw IoError("cannot parse '" + path + "': " + e.what());
    }
}

inline DensityMatrix read_density_file(const std::string& path, const DensityTolerances& tol = {})
{
    return density_from_json(read_json_file(path), tol);
}

// ---------------------------------------------------------------------------
// Reports

inline Json params_to_json(const CriterionParams& params)
{
    Json out;
    out["variant"] = variant_label(params);
    std::visit(
        [&out](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            auto vec = [](const RVector& v) {
                Json a = Json::array();
                for (Eigen::Index i = 0; i < v.size(); ++i) {
                    a.push_back(v(i));
                }
                return a;
            };
            if constexpr (std::is_same_v<T, ScalarParams>) {
                out["x"] = p.x;
                out["y"] = p.y;
            } else if constexpr (std::is_same_v<T, WeightedParams>) {
                out["x"] = p.x;
                out["y"] = p.y;
                out["g"] = p.g;
                out["h"] = p.h;
            } else {
                out["alpha"] = vec(p.alpha);
                out["beta"] = vec(p.beta);
                out["eta"] = p.eta ? vec(*p.eta) : Json(nullptr);
                out["gamma"] = p.gamma ? vec(*p.gamma) : Json(nullptr);
            }
        },
        params);
    return out;
}

inline Json report_to_json(const CriterionReport& r)
{
    Json out;
    out["direction"] = to_string(r.direction);
    out["params"] = params_to_json(r.params);
    out["lhs"] = r.lhs;
    out["rhs"] = r.rhs;
    out["violation"] = r.violation;
    out["steerable"] = r.steerable;
    return out;
}

inline Json threshold_to_json(const ThresholdResult& t)
{
    Json out;
    out["direction"] = to_string(t.direction);
    out["p_star"] = t.p_star;
    out["bracket"] = Json::array({t.lower, t.upper});
    out["params"] = params_to_json(t.params);
    out["params_mode"] = t.auto_params ? "auto" : "fixed";
    out["tol"] = t.tol;
    out["achieved_tol"] = t.achieved_tol;
    out["probes"] = static_cast<long>(t.probes.size());
    return out;
}

inline Json basis_to_json(const GeneratorBasis& basis, const BasisDiagnostics& diag)
{
    Json gens = Json::array();
    for (const CMatrix& g : basis.generators) {
        Json rows = Json::array();
        for (Eigen::Index i = 0; i < g.rows(); ++i) {
            Json row = Json::array();
            for (Eigen::Index k = 0; k < g.cols(); ++k) {
                row.push_back(Json::array({g(i, k).real(), g(i, k).imag()}));
            }
            rows.push_back(std::move(row));
        }
        gens.push_back(std::move(rows));
    }
    Json d;
    d["hermiticity"] = diag.hermiticity;
    d["trace"] = diag.trace;
    d["orthonormality"] = diag.orthonormality;
    d["casimir"] = diag.casimir;
    d["count_error"] = diag.count_error;

    Json out;
    out["dim"] = basis.dim;
    out["ordering"] = basis.ordering_tag;
    out["count"] = static_cast<long>(basis.size());
    out["generators"] = std::move(gens);
    out["diagnostics"] = std::move(d);
    return out;
}

// ---------------------------------------------------------------------------
// CSV

inline void write_curve_csv(std::ostream& os, const std::vector<CurvePoint>& points)
{
    os << "p,lhs,rhs,violation\n";
    for (const auto& pt : points) {
        os << format_double(pt.p) << ',' << format_double(pt.report.lhs) << ','
           << format_double(pt.report.rhs) << ',' << format_double(pt.report.violation) << '\n';
    }
}

inline void write_reports_csv(std::ostream& os, const std::vector<CriterionReport>& reports)
{
    os << "direction,variant,x,y,g,h,lhs,rhs,violation,steerable\n";
    for (const auto& r : reports) {
        std::string x, y, g = "1", h = "1";
        if (const auto* s = std::get_if<ScalarParams>(&r.params)) {
            x = format_double(s->x);
            y = format_double(s->y);
        } else if (const auto* w = std::get_if<WeightedParams>(&r.params)) {
            x = format_double(w->x);
            y = format_double(w->y);
            g = format_double(w->g);
            h = format_double(w->h);
        }
        os << to_string(r.direction) << ',' << variant_label(r.params) << ',' << x << ',' << y
           << ',' << g << ',' << h << ',' << format_double(r.lhs) << ',' << format_double(r.rhs)
           << ',' << format_double(r.violation) << ',' << (r.steerable ? "true" : "false") << '\n';
    }
}

} // namespace steerscan
