#include "cli_app.hpp"

#include "steerscan/io.hpp"
#include "steerscan/steerscan.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace steerscan::cli {
namespace {

class UsageError : public Error {
public:
    using Error::Error;
};

struct Options {
    int dim = 2;
    std::vector<std::string> files;
    std::string family;
    int family_dim = 2;
    std::optional<double> p;
    std::vector<double> t1;
    std::vector<double> t2;
    bool auto_params = false;
    std::string variant = "t1";
    std::string dir;
    double tol = 1e-9;
    double cap = 1e4;
    int grid = 25;
    double margin = kDefaultMargin;
    std::string format;
    std::string out_path;
    std::vector<double> range{0.0, 1.0};
    int steps = 11;
};

std::string utc_timestamp()
{
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string fixed8(double v)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.8f", v);
    return buf;
}

std::string describe_params(const CriterionParams& params)
{
    std::ostringstream os;
    os << std::setprecision(10) << variant_label(params) << " (";
    if (const auto* s = std::get_if<ScalarParams>(&params)) {
        os << s->x << ", " << s->y;
    } else if (const auto* w = std::get_if<WeightedParams>(&params)) {
        os << w->x << ", " << w->y << ", " << w->g << ", " << w->h;
    }
    os << ')';
    return os.str();
}

std::vector<Direction> parse_directions(const std::string& dir, bool allow_both)
{
    if (dir == "ab") {
        return {Direction::AliceToBob};
    }
    if (dir == "ba") {
        return {Direction::BobToAlice};
    }
    if (dir == "both" && allow_both) {
        return {Direction::AliceToBob, Direction::BobToAlice};
    }
    throw UsageError("--dir must be ab, ba" + std::string(allow_both ? " or both" : ""));
}

int resolve_env_threads(const char* env)
{
    if (env == nullptr || *env == '\0') {
        return 0;
    }
    try {
        const int n = std::stoi(env);
        return n < 0 ? 0 : n;
    } catch (const std::exception&) {
        throw UsageError(std::string("STEERSCAN_THREADS must be an integer, got '") + env + "'");
    }
}

class Session {
public:
    Session(const Options& opts, std::string command, std::ostream& out, int threads)
        : opts_(opts), command_(std::move(command)), out_(out), threads_(threads) {}

    ParamChoice param_choice() const
    {
        const int modes = (!opts_.t1.empty()) + (!opts_.t2.empty()) + (opts_.auto_params ? 1 : 0);
        if (modes != 1) {
            throw UsageError("choose exactly one of --t1 X Y, --t2 X Y G H, --auto");
        }
        if (!opts_.t1.empty()) {
            return CriterionParams{ScalarParams{opts_.t1[0], opts_.t1[1]}};
        }
        if (!opts_.t2.empty()) {
            return CriterionParams{
                WeightedParams{opts_.t2[0], opts_.t2[1], opts_.t2[2], opts_.t2[3]}};
        }
        ParamSearchConfig cfg;
        cfg.cap = opts_.cap;
        cfg.grid_points = opts_.grid;
        cfg.threads = threads_;
        if (opts_.variant == "t2") {
            cfg.variant = SearchVariant::T2;
        } else if (opts_.variant != "t1") {
            throw UsageError("--variant must be t1 or t2");
        }
        validate_config(cfg);
        return cfg;
    }

    std::string params_mode() const
    {
        if (opts_.auto_params) {
            return "auto-" + opts_.variant;
        }
        return opts_.t1.empty() ? "fixed-t2" : "fixed-t1";
    }

    std::string input_label() const
    {
        if (!opts_.family.empty()) {
            return "family:" + opts_.family;
        }
        std::string label = "file:";
        for (std::size_t i = 0; i < opts_.files.size(); ++i) {
            label += (i ? "," : "") + opts_.files[i];
        }
        return label;
    }

    void check_single_source() const
    {
        if (opts_.family.empty() == opts_.files.empty()) {
            throw UsageError("give exactly one input source: --family NAME or --file PATH");
        }
    }

    /// The single state used by `check`.
    DensityMatrix single_state() const
    {
        check_single_source();
        if (!opts_.family.empty()) {
            if (!opts_.p) {
                throw UsageError("--family needs --p for check");
            }
            return make_family(opts_.family, opts_.family_dim).at(*opts_.p);
        }
        if (opts_.files.size() != 1) {
            throw UsageError("check takes exactly one --file");
        }
        return read_density_file(opts_.files[0]);
    }

    /// Named family, or p * rho1 + (1 - p) * rho0 from `--file rho0 rho1`.
    StateFamily family() const
    {
        check_single_source();
        if (!opts_.family.empty()) {
            return make_family(opts_.family, opts_.family_dim);
        }
        if (opts_.files.size() != 2) {
            throw UsageError("interpolation needs two files: --file RHO0 RHO1");
        }
        return make_interpolation_family(read_density_file(opts_.files[0]),
                                         read_density_file(opts_.files[1]));
    }

    Json manifest(const std::vector<Direction>& dirs) const
    {
        Json m;
        m["command"] = command_;
        m["input"] = input_label();
        Json d = Json::array();
        for (Direction dir : dirs) {
            d.push_back(to_string(dir));
        }
        m["directions"] = std::move(d);
        m["params_mode"] = params_mode();
        Json tol;
        tol["tol"] = opts_.tol;
        tol["cap"] = opts_.cap;
        tol["grid"] = opts_.grid;
        tol["margin"] = opts_.margin;
        m["tolerances"] = std::move(tol);
        m["format"] = opts_.format;
        m["timestamp"] = utc_timestamp();
        return m;
    }

    /// Writes to --out when given, otherwise to stdout.
    void emit(const std::string& text) const
    {
        if (opts_.out_path.empty()) {
            out_ << text;
            return;
        }
        std::ofstream file(opts_.out_path, std::ios::out | std::ios::trunc);
        if (!file) {
            throw IoError("cannot write '" + opts_.out_path + "'");
        }
        file << text;
        file.flush();
        if (!file) {
            throw IoError("write to '" + opts_.out_path + "' failed");
        }
    }

    const Options& opts() const { return opts_; }

private:
    const Options& opts_;
    std::string command_;
    std::ostream& out_;
    int threads_;
};

int cmd_basis(const Options& opts, std::ostream& out, std::ostream& err)
{
    Session session(opts, "basis", out, 1);
    const GeneratorBasis& basis = generator_basis(opts.dim);
    const BasisDiagnostics diag = verify_basis(basis);

    std::ostringstream os;
    if (opts.format == "json") {
        os << dump_json(basis_to_json(basis, diag)) << '\n';
    } else if (opts.format == "csv") {
        os << "generator,row,col,re,im\n";
        for (std::size_t g = 0; g < basis.size(); ++g) {
            for (Eigen::Index i = 0; i < basis[g].rows(); ++i) {
                for (Eigen::Index k = 0; k < basis[g].cols(); ++k) {
                    os << g << ',' << i << ',' << k << ',' << format_double(basis[g](i, k).real())
                       << ',' << format_double(basis[g](i, k).imag()) << '\n';
                }
            }
        }
    } else {
        os << "SU(" << basis.dim << ") generators: " << basis.size() << " (" << basis.ordering_tag
           << ")\n";
        for (std::size_t g = 0; g < basis.size(); ++g) {
            os << "G" << g + 1 << ":\n";
            for (Eigen::Index i = 0; i < basis[g].rows(); ++i) {
                os << "  ";
                for (Eigen::Index k = 0; k < basis[g].cols(); ++k) {
                    const Complex z = basis[g](i, k);
                    os << std::setw(22) << ("(" + fixed8(z.real()) + "," + fixed8(z.imag()) + ")");
                }
                os << '\n';
            }
        }
        os << "max deviations: hermiticity " << format_double(diag.hermiticity) << ", trace "
           << format_double(diag.trace) << ", orthonormality " << format_double(diag.orthonormality)
           << ", casimir " << format_double(diag.casimir) << '\n';
    }
    session.emit(os.str());
    if (!diag.ok()) {
        err << "steerscan: basis invariants violated (worst deviation " << diag.worst() << ")\n";
        return kUsageError;
    }
    return kSuccess;
}

int cmd_check(const Options& opts, std::ostream& out, int threads)
{
    Session session(opts, "check", out, threads);
    const std::vector<Direction> dirs = parse_directions(opts.dir, true);
    const ParamChoice choice = session.param_choice();
    const DensityMatrix rho = session.single_state();

    std::vector<CriterionReport> reports;
    for (Direction dir : dirs) {
        const DirectedEvaluator evaluator(rho, dir, opts.margin);
        if (const auto* fixed = std::get_if<CriterionParams>(&choice)) {
            reports.push_back(evaluator.report(*fixed));
        } else {
            reports.push_back(optimize_params(evaluator, std::get<ParamSearchConfig>(choice)).report);
        }
    }

    std::ostringstream os;
    if (opts.format == "json") {
        Json doc;
        doc["manifest"] = session.manifest(dirs);
        Json arr = Json::array();
        for (const auto& r : reports) {
            arr.push_back(report_to_json(r));
        }
        doc["reports"] = std::move(arr);
        os << dump_json(doc) << '\n';
    } else if (opts.format == "csv") {
        write_reports_csv(os, reports);
    } else {
        os << std::left << std::setw(6) << "dir" << std::setw(34) << "params" << std::setw(18)
           << "lhs" << std::setw(18) << "rhs" << std::setw(18) << "violation"
           << "verdict\n";
        for (const auto& r : reports) {
            os << std::setw(6) << to_string(r.direction) << std::setw(34) << describe_params(r.params)
               << std::setw(18) << fixed8(r.lhs) << std::setw(18) << fixed8(r.rhs) << std::setw(18)
               << fixed8(r.violation) << (r.steerable ? "steerable" : "not detected") << '\n';
        }
    }
    session.emit(os.str());

    for (const auto& r : reports) {
        if (r.steerable) {
            return kSuccess;
        }
    }
    return kNotDetected;
}

int cmd_scan(const Options& opts, std::ostream& out, int threads)
{
    Session session(opts, "scan", out, threads);
    const std::vector<Direction> dirs = parse_directions(opts.dir, true);
    const ParamChoice choice = session.param_choice();
    const StateFamily family = session.family();

    ThresholdOptions topts;
    topts.tol = opts.tol;
    std::vector<ThresholdResult> results;
    for (Direction dir : dirs) {
        results.push_back(threshold_scan(family, dir, choice, topts));
    }

    std::ostringstream os;
    if (opts.format == "json") {
        Json doc;
        doc["manifest"] = session.manifest(dirs);
        Json arr = Json::array();
        for (const auto& t : results) {
            arr.push_back(threshold_to_json(t));
        }
        doc["thresholds"] = std::move(arr);
        os << dump_json(doc) << '\n';
    } else if (opts.format == "csv") {
        os << "direction,p_star,lower,upper,params\n";
        for (const auto& t : results) {
            os << to_string(t.direction) << ',' << format_double(t.p_star) << ','
               << format_double(t.lower) << ',' << format_double(t.upper) << ",\""
               << describe_params(t.params) << "\"\n";
        }
    } else {
        for (const auto& t : results) {
            os << to_string(t.direction) << "  steerable for p > " << fixed8(t.p_star) << "  with "
               << describe_params(t.params) << (t.auto_params ? " [auto]" : "") << '\n';
        }
    }
    session.emit(os.str());
    return kSuccess;
}

int cmd_curve(const Options& opts, std::ostream& out, int threads)
{
    Session session(opts, "curve", out, threads);
    const std::vector<Direction> dirs = parse_directions(opts.dir, false);
    if (opts.steps < 1) {
        throw UsageError("--steps must be at least 1");
    }
    const double lo = opts.range[0];
    const double hi = opts.range[1];
    if (!(lo >= 0.0 && hi <= 1.0 && lo <= hi)) {
        throw UsageError("--range must satisfy 0 <= LO <= HI <= 1");
    }
    const ParamChoice choice = session.param_choice();
    const StateFamily family = session.family();

    std::vector<double> grid;
    for (int i = 0; i < opts.steps; ++i) {
        grid.push_back(opts.steps == 1 ? lo : lo + (hi - lo) * i / (opts.steps - 1));
    }
    const std::vector<CurvePoint> points =
        detection_curve(family, dirs.front(), choice, grid, opts.margin);

    std::ostringstream os;
    if (opts.format == "json") {
        Json doc;
        doc["manifest"] = session.manifest(dirs);
        Json arr = Json::array();
        for (const auto& pt : points) {
            Json row;
            row["p"] = pt.p;
            row["lhs"] = pt.report.lhs;
            row["rhs"] = pt.report.rhs;
            row["violation"] = pt.report.violation;
            arr.push_back(std::move(row));
        }
        doc["points"] = std::move(arr);
        os << dump_json(doc) << '\n';
    } else if (opts.format == "table") {
        os << std::left << std::setw(14) << "p" << std::setw(18) << "lhs" << std::setw(18) << "rhs"
           << "violation\n";
        for (const auto& pt : points) {
            os << std::setw(14) << fixed8(pt.p) << std::setw(18) << fixed8(pt.report.lhs)
               << std::setw(18) << fixed8(pt.report.rhs) << fixed8(pt.report.violation) << '\n';
        }
    } else {
        write_curve_csv(os, points);
    }
    session.emit(os.str());
    return kSuccess;
}

void add_state_options(CLI::App* cmd, Options& o)
{
    cmd->add_option("--file", o.files, "density-matrix JSON file(s); two files interpolate rho0 -> rho1")
        ->expected(1, 2);
    cmd->add_option("--family", o.family, "registered family: example1, example2, werner, isotropic");
    cmd->add_option("--family-dim", o.family_dim, "local dimension for werner/isotropic")
        ->capture_default_str();
}

void add_param_options(CLI::App* cmd, Options& o)
{
    cmd->add_option("--t1", o.t1, "fixed (x, y)")->expected(2)->allow_extra_args(false);
    cmd->add_option("--t2", o.t2, "fixed (x, y, g, h)")->expected(4)->allow_extra_args(false);
    cmd->add_flag("--auto", o.auto_params, "optimize parameters");
    cmd->add_option("--variant", o.variant, "parameter family searched by --auto (t1|t2)")
        ->capture_default_str();
    cmd->add_option("--cap", o.cap, "upper bound for searched parameters")->capture_default_str();
    cmd->add_option("--grid", o.grid, "grid points per searched parameter")->capture_default_str();
    cmd->add_option("--margin", o.margin, "certification margin on the violation")
        ->capture_default_str();
}

void add_output_options(CLI::App* cmd, Options& o, const std::string& default_format)
{
    o.format = default_format;
    cmd->add_option("--format", o.format, "output format")
        ->check(CLI::IsMember({"json", "csv", "table"}))
        ->capture_default_str();
    cmd->add_option("--out", o.out_path, "write output to PATH instead of stdout");
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
        const char* threads_env)
{
    CLI::App app{"Steering detection via parameterized correlation-matrix trace norms"};
    app.name("steerscan");
    app.require_subcommand(1);

    // Each subcommand gets its own option set so defaults do not leak between them.
    Options basis_opts, check_opts, scan_opts, curve_opts;

    auto* basis = app.add_subcommand("basis", "print the SU(d) generator basis and its diagnostics");
    basis->add_option("--dim", basis_opts.dim, "local dimension d")->required();
    add_output_options(basis, basis_opts, "table");

    auto* check = app.add_subcommand("check", "evaluate the criterion on one state");
    add_state_options(check, check_opts);
    check->add_option("--p", check_opts.p, "mixing parameter for --family");
    add_param_options(check, check_opts);
    check_opts.dir = "both";
    check->add_option("--dir", check_opts.dir, "ab, ba or both")->capture_default_str();
    add_output_options(check, check_opts, "table");

    auto* scan = app.add_subcommand("scan", "bisect a one-parameter family for its detection threshold");
    add_state_options(scan, scan_opts);
    add_param_options(scan, scan_opts);
    scan_opts.dir = "ab";
    scan->add_option("--dir", scan_opts.dir, "ab, ba or both")->capture_default_str();
    scan->add_option("--tol", scan_opts.tol, "bisection tolerance")->capture_default_str();
    add_output_options(scan, scan_opts, "table");

    auto* curve = app.add_subcommand("curve", "tabulate lhs, rhs and violation along a family");
    add_state_options(curve, curve_opts);
    add_param_options(curve, curve_opts);
    curve_opts.dir = "ab";
    curve->add_option("--dir", curve_opts.dir, "ab or ba")->capture_default_str();
    curve->add_option("--range", curve_opts.range, "p range LO HI")->expected(2)->capture_default_str();
    curve->add_option("--steps", curve_opts.steps, "number of grid points")->capture_default_str();
    add_output_options(curve, curve_opts, "csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "steerscan: " << e.what() << '\n';
        return kUsageError;
    }

    try {
        const int threads = resolve_env_threads(threads_env);
        if (basis->parsed()) {
            return cmd_basis(basis_opts, out, err);
        }
        if (check->parsed()) {
            return cmd_check(check_opts, out, threads);
        }
        if (scan->parsed()) {
            return cmd_scan(scan_opts, out, threads);
        }
        return cmd_curve(curve_opts, out, threads);
    } catch (const NoThresholdError& e) {
        err << "steerscan: " << e.what() << '\n';
    } catch (const NonMonotoneError& e) {
        err << "steerscan: " << e.what() << '\n';
    } catch (const IoError& e) {
        err << "steerscan: I/O error: " << e.what() << '\n';
    } catch (const InvalidDimension& e) {
        err << "steerscan: invalid dimension: " << e.what() << '\n';
    } catch (const std::exception& e) {
        err << "steerscan: error: " << e.what() << '\n';
    }
    return kUsageError;
}

} // namespace steerscan::cli
