#pragma once

// Orchestration behind the `mixgn` command-line tool: solve, verify, sweep and
// oracle runs, JSON/CSV reporting and exit-code mapping.

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "mixgn/field_io.hpp"
#include "mixgn/solver.hpp"
#include "mixgn/verifier.hpp"

namespace mixgn::cli {

inline constexpr const char* kVersion = "1.0.0";

enum ExitCode : int {
    kOk = 0,
    kCheckFailed = 1,
    kParameterError = 2,
    kNotConverged = 3,
    kIoError = 4,
};

struct RunConfig {
    std::string subcommand;
    Params params{3, 0.5, 4.0};
    GridSpec grid{3, 64, 12.0};
    SolverConfig solver;
    std::optional<std::filesystem::path> in;
    std::optional<std::filesystem::path> out;
    std::optional<std::filesystem::path> report;
    std::uint64_t seed = 1;
    int samples = 0;
    std::string axis = "p";
    double from = 0.0;
    double to = 0.0;
    int steps = 0;
    bool timestamp = true;
};

using nlohmann::json;

/// Machine-readable diagnostic written to stderr on every failing exit path.
inline void emit_error(std::ostream& err, const std::string& kind, const std::string& message, int code)
{
    err << json{{"error", {{"kind", kind}, {"message", message}, {"exit_code", code}}}}.dump() << '\n';
}

inline json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json to_json(const Params& p) { return {{"N", p.N}, {"s", p.s}, {"p", p.p}}; }
inline json to_json(const GridSpec& g) { return {{"dim", g.dim}, {"n", g.n}, {"half_width", g.half_width}}; }
inline json to_json(const NormTriple& t) { return {{"a", t.a}, {"b", t.b}, {"m", t.m}}; }

inline json to_json(const SolverConfig& c, const Params& params)
{
    return {{"tol", c.tol},
            {"max_iter", c.max_iter},
            {"gamma", c.stabilizer_exponent(params)},
            {"dealias", c.dealias},
            {"init", {{"amplitude", c.init.amplitude}, {"width", c.init.width}}}};
}

inline json to_json(const IdentityReport& r)
{
    json j{{"nehari_residual", finite_or_null(r.nehari_residual)},
           {"pohozaev_residual", finite_or_null(r.pohozaev_residual)},
           {"ratio_15_d12", finite_or_null(r.ratio_15_d12)},
           {"ratio_15_lp", finite_or_null(r.ratio_15_lp)},
           {"identity_16_residual", finite_or_null(r.identity_16_residual)},
           {"c_consistency", finite_or_null(r.c_consistency)},
           {"energy_form_residual", finite_or_null(r.energy_form_residual)}};
    j["equation_residual"] = r.equation_residual ? finite_or_null(*r.equation_residual) : json(nullptr);
    j["discrete_nehari_residual"] =
        r.discrete_nehari_residual ? finite_or_null(*r.discrete_nehari_residual) : json(nullptr);
    return j;
}

inline json to_json(const Tolerances& t)
{
    return {{"equation", t.equation},
            {"nehari", t.nehari},
            {"pohozaev", t.pohozaev},
            {"ratio", t.ratio},
            {"best_constant_agreement", t.best_constant_agreement}};
}

inline std::string utc_timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

/// Checks the solve report layout; returns the list of violations.
inline std::vector<std::string> validate_solve_report(const json& j)
{
    std::vector<std::string> bad;
    auto need = [&](const json& obj, const char* key, auto pred, const char* what) {
        if (!obj.is_object() || !obj.contains(key) || !pred(obj.at(key))) {
            bad.push_back(std::string(key) + " must be " + what);
        }
    };
    auto is_obj = [](const json& v) { return v.is_object(); };
    auto is_num = [](const json& v) { return v.is_number(); };
    auto is_num_or_null = [](const json& v) { return v.is_number() || v.is_null(); };
    auto is_arr = [](const json& v) { return v.is_array(); };
    auto is_int = [](const json& v) { return v.is_number_integer(); };

    need(j, "params", is_obj, "an object");
    need(j, "grid", is_obj, "an object");
    need(j, "solver", is_obj, "an object");
    need(j, "triple", is_obj, "an object");
    need(j, "energy_c", is_num, "a number");
    need(j, "best_constant", is_obj, "an object");
    need(j, "identities", is_obj, "an object");
    need(j, "gn_sample_min", is_num_or_null, "a number or null");
    need(j, "convergence", is_obj, "an object");
    need(j, "versions", is_obj, "an object");
    if (!bad.empty()) {
        return bad;
    }
    for (const char* k : {"N", "s", "p"}) {
        need(j["params"], k, is_num, "a number");
    }
    for (const char* k : {"dim", "n"}) {
        need(j["grid"], k, is_int, "an integer");
    }
    need(j["grid"], "half_width", is_num, "a number");
    for (const char* k : {"a", "b", "m"}) {
        need(j["triple"], k, is_num, "a number");
    }
    for (const char* k : {"from_Q", "from_c"}) {
        need(j["best_constant"], k, is_num_or_null, "a number or null");
    }
    for (const char* k : {"nehari_residual", "pohozaev_residual", "ratio_15_d12", "ratio_15_lp",
                          "identity_16_residual", "c_consistency"}) {
        need(j["identities"], k, is_num_or_null, "a number or null");
    }
    need(j["convergence"], "iterations", is_int, "an integer");
    need(j["convergence"], "residuals", is_arr, "an array");
    need(j["convergence"], "converged", [](const json& v) { return v.is_boolean(); }, "a boolean");
    return bad;
}

inline void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream os(path, std::ios::trunc);
    if (!os) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    os << text;
    if (!os) {
        throw IoError("write failed: " + path.string());
    }
}

inline void emit_json(const json& j, const RunConfig& cfg, std::ostream& out)
{
    const std::string text = j.dump(2) + "\n";
    if (cfg.report) {
        write_text(*cfg.report, text);
    } else {
        out << text;
    }
}

inline void validate(const RunConfig& cfg)
{
    mixgn::validate(cfg.params);
    mixgn::validate(cfg.grid);
    mixgn::validate(cfg.solver);
    if (cfg.params.N != cfg.grid.dim) {
        throw ParameterError(detail::concat("field computations need --dim 3 (got ", cfg.params.N, ")"));
    }
    if (cfg.samples < 0) {
        throw ParameterError(detail::concat("--samples must be >= 0 (got ", cfg.samples, ")"));
    }
}

struct SolveOutcome {
    json report;
    SolveResult result;
};

/// Full solve pipeline without any I/O.
inline SolveOutcome solve_pipeline(const RunConfig& cfg)
{
    SolveResult result = petviashvili_solve(cfg.params, cfg.grid, cfg.solver);
    const SolveReport& rep = result.report;

    json j;
    j["params"] = to_json(cfg.params);
    j["grid"] = to_json(cfg.grid);
    j["solver"] = to_json(cfg.solver, cfg.params);
    j["triple"] = to_json(rep.final_triple);
    j["energy_c"] = rep.energy_c;
    j["best_constant"] = {{"from_Q", finite_or_null(rep.best_constant)},
                          {"from_c", rep.energy_c > 0.0 ? finite_or_null(rep.best_constant_from_c) : json(nullptr)}};
    j["identities"] = to_json(rep.identity_report);
    j["tolerances"] = to_json(published_tolerances(cfg.grid));

    const NormTriple& t = rep.final_triple;
    if (t.a > 0.0 && t.b > 0.0 && t.m > 0.0) {
        const BuildQResult q = build_Q(result.field, cfg.params);
        j["build_Q"] = {{"lambda1", q.lambdas.lambda1},
                        {"lambda2", q.lambdas.lambda2},
                        {"predicted", to_json(q.predicted)},
                        {"measured", to_json(q.measured)}};
    }
    j["gn_sample_min"] = nullptr;
    if (cfg.samples > 0) {
        const GnSampleResult gn = gn_sample(t, cfg.params, cfg.grid, cfg.seed, cfg.samples);
        j["gn_sample_min"] = gn.min_ratio;
        j["gn_sample"] = {{"count", cfg.samples}, {"seed", cfg.seed}, {"resampled", gn.resampled}};
    }
    json residuals = json::array();
    for (double r : rep.residual_history) {
        residuals.push_back(finite_or_null(r));
    }
    json stabilizers = json::array();
    for (double m : rep.stabilizer_history) {
        stabilizers.push_back(finite_or_null(m));
    }
    j["convergence"] = {{"iterations", rep.iterations},
                        {"converged", rep.converged},
                        {"residuals", std::move(residuals)},
                        {"stabilizers", std::move(stabilizers)}};
    j["versions"] = {{"mixgn", kVersion}, {"report_schema", 1}};
    if (cfg.timestamp) {
        j["timestamp"] = utc_timestamp();
        j["wall_time"] = rep.wall_time;
    }
    return {std::move(j), std::move(result)};
}

inline int run_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    try {
        validate(cfg);
        SolveOutcome outcome = solve_pipeline(cfg);
        if (const auto bad = validate_solve_report(outcome.report); !bad.empty()) {
            emit_error(err, "schema", bad.front(), kCheckFailed);
            return kCheckFailed;
        }
        if (cfg.out) {
            save_field(outcome.result.field, *cfg.out);
        }
        emit_json(outcome.report, cfg, out);
        if (!outcome.result.report.converged) {
            emit_error(err, "not_converged",
                       detail::concat("no convergence within ", cfg.solver.max_iter, " iterations"), kNotConverged);
            return kNotConverged;
        }
        return kOk;
    } catch (const ParameterError& e) {
        emit_error(err, "parameter", e.what(), kParameterError);
        return kParameterError;
    } catch (const DegenerateInputError& e) {
        emit_error(err, "degenerate_input", e.what(), kParameterError);
        return kParameterError;
    } catch (const IoError& e) {
        emit_error(err, "io", e.what(), kIoError);
        return kIoError;
    }
}

inline int run_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    try {
        mixgn::validate(cfg.params);
        if (!cfg.in) {
            throw ParameterError("verify needs --in <field file>");
        }
        Field u;
        try {
            u = load_field(*cfg.in);
        } catch (const FormatError& e) {
            emit_error(err, "format", e.what(), kIoError);
            return kIoError;
        }
        const NormTriple t = norm_triple(u, cfg.params);
        const IdentityReport rep = check_identities(t, cfg.params, &u);
        const Tolerances tol = published_tolerances(u.grid());
        const ToleranceVerdict verdict = within_tolerances(rep, tol);

        json j;
        j["params"] = to_json(cfg.params);
        j["grid"] = to_json(u.grid());
        j["triple"] = to_json(t);
        j["identities"] = to_json(rep);
        j["tolerances"] = to_json(tol);
        j["best_constant"] = {{"from_Q", best_constant_from_Q(t.m, cfg.params)},
                              {"from_c", energy_I(t, cfg.params) > 0.0
                                             ? json(best_constant_from_c(energy_I(t, cfg.params), cfg.params))
                                             : json(nullptr)}};
        j["passed"] = verdict.passed;
        j["failures"] = verdict.failures;
        j["versions"] = {{"mixgn", kVersion}, {"report_schema", 1}};
        emit_json(j, cfg, out);
        if (!verdict.passed) {
            emit_error(err, "tolerance", verdict.failures.front(), kCheckFailed);
            return kCheckFailed;
        }
        return kOk;
    } catch (const ParameterError& e) {
        emit_error(err, "parameter", e.what(), kParameterError);
        return kParameterError;
    } catch (const DegenerateInputError& e) {
        emit_error(err, "degenerate_input", e.what(), kCheckFailed);
        return kCheckFailed;
    } catch (const IoError& e) {
        emit_error(err, "io", e.what(), kIoError);
        return kIoError;
    }
}

/// 17 significant digits with a '.' decimal point, whatever the global locale.
inline std::string format_csv_number(double v)
{
    if (!std::isfinite(v)) {
        return "nan";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

inline std::vector<double> sweep_values(const RunConfig& cfg)
{
    if (cfg.steps < 1) {
        throw ParameterError(detail::concat("--steps must be >= 1 (got ", cfg.steps, ")"));
    }
    if (cfg.axis != "p" && cfg.axis != "s") {
        throw ParameterError("--axis must be 'p' or 's' (got '" + cfg.axis + "')");
    }
    std::vector<double> values;
    for (int i = 0; i < cfg.steps; ++i) {
        values.push_back(cfg.steps == 1 ? cfg.from : cfg.from + (cfg.to - cfg.from) * i / (cfg.steps - 1));
    }
    return values;
}

inline constexpr const char* kSweepHeader =
    "N,s,p,a,b,m,c,C_best,nehari_res,pohozaev_res,iterations,converged";

inline int run_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    std::vector<Params> points;
    try {
        mixgn::validate(cfg.grid);
        mixgn::validate(cfg.solver);
        for (double v : sweep_values(cfg)) {
            Params p = cfg.params;
            (cfg.axis == "p" ? p.p : p.s) = v;
            mixgn::validate(p);
            if (p.N != cfg.grid.dim) {
                throw ParameterError("field computations need --dim 3");
            }
            points.push_back(p);
        }
    } catch (const ParameterError& e) {
        emit_error(err, "parameter", e.what(), kParameterError);
        return kParameterError;
    }

    std::ostringstream csv;
    csv << kSweepHeader << '\n';
    for (const Params& p : points) {
        NormTriple t{NAN, NAN, NAN};
        double c = NAN;
        double best = NAN;
        double neh = NAN;
        double poh = NAN;
        int iterations = 0;
        bool converged = false;
        try {
            const SolveResult r = petviashvili_solve(p, cfg.grid, cfg.solver);
            t = r.report.final_triple;
            c = r.report.energy_c;
            best = r.report.best_constant;
            neh = r.report.identity_report.nehari_residual;
            poh = r.report.identity_report.pohozaev_residual;
            iterations = r.report.iterations;
            converged = r.report.converged;
        } catch (const Error& e) {
            emit_error(err, "sweep_point", detail::concat("p = ", p.p, ", s = ", p.s, ": ", e.what()), kOk);
        }
        csv << p.N << ',' << format_csv_number(p.s) << ',' << format_csv_number(p.p) << ','
            << format_csv_number(t.a) << ',' << format_csv_number(t.b) << ',' << format_csv_number(t.m) << ','
            << format_csv_number(c) << ',' << format_csv_number(best) << ',' << format_csv_number(neh) << ','
            << format_csv_number(poh) << ',' << iterations << ',' << (converged ? 1 : 0) << '\n';
    }
    try {
        if (cfg.out) {
            write_text(*cfg.out, csv.str());
        } else {
            out << csv.str();
        }
    } catch (const IoError& e) {
        emit_error(err, "io", e.what(), kIoError);
        return kIoError;
    }
    return kOk;
}

struct OracleTolerances {
    double gaussian = 1e-5;
    double cramer = 1e-12;
    double djdz = 1e-6;
    double gateaux = 1e-5;
};

inline int run_oracle(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    try {
        mixgn::validate(cfg.params);
        mixgn::validate(cfg.grid);
        const OracleTolerances tol;
        bool ok = true;
        out << std::setprecision(10);

        out << "# Gaussian closed forms (n = " << cfg.grid.n << ", L = " << cfg.grid.half_width
            << ", s = " << cfg.params.s << ")\n";
        out << std::left << std::setw(24) << "quantity" << std::setw(20) << "computed" << std::setw(20) << "expected"
            << "rel_error\n";
        for (const auto& row : gaussian_oracle(cfg.params, cfg.grid)) {
            const bool pass = row.rel_error <= tol.gaussian;
            ok = ok && pass;
            out << std::setw(24) << row.name << std::setw(20) << row.computed << std::setw(20) << row.expected
                << row.rel_error << (pass ? "" : "  FAIL") << '\n';
        }

        const Params cramer_params{3, 0.5, 4.0};
        const CramerResult cr = cramer_dets(cramer_params, 1.0);
        out << "# Cramer system (N = 3, s = 0.5, p = 4, k = 1): detD detD1 detD2 detD3 x1 x2 x3\n";
        out << cr.detD << ' ' << cr.detD1 << ' ' << cr.detD2 << ' ' << cr.detD3 << ' ' << cr.x1 << ' ' << cr.x2
            << ' ' << cr.x3 << '\n';
        auto rel = [](double x, double y) { return std::abs(x - y) / std::max(std::abs(y), 1e-300); };
        const double cramer_err = std::max({rel(cr.detD, cr.detD_closed), rel(cr.detD1, cr.detD1_closed),
                                            rel(cr.detD2, cr.detD2_closed), rel(cr.x1, cr.x1_closed),
                                            rel(cr.x2, cr.x2_closed), std::abs(cr.detD3)});
        const bool cramer_ok = cramer_err <= tol.cramer;
        ok = ok && cramer_ok;
        out << "closed-form mismatch " << cramer_err << (cramer_ok ? "" : "  FAIL") << '\n';

        int negatives = 0;
        int scanned = 0;
        for (int N = 3; N <= 6; ++N) {
            for (double s : {0.1, 0.25, 0.5, 0.75, 0.9}) {
                for (int i = 1; i <= 400; ++i) {
                    const double t = 0.02 * i;
                    if (std::abs(t - 1.0) < 1e-9) {
                        continue;
                    }
                    const G3G4 g = g3_g4(t, N, s);
                    ++scanned;
                    if (!(g.g3 > 0.0) || !(g.g4 > 0.0)) {
                        ++negatives;
                    }
                }
            }
        }
        out << "# g3/g4 scan: " << scanned << " samples, " << negatives << " non-positive\n";
        ok = ok && negatives == 0;

        const Field gauss = synth_gaussian(cfg.grid, 1.0, 1.0);
        const Params field_params{3, cfg.params.s, cfg.params.p};
        const DerivativeReport d = derivative_checks(gauss, field_params, cfg.seed);
        const bool djdz_ok = d.djdz_max_rel_error <= tol.djdz;
        const bool gat_ok = d.gateaux_rel_error <= tol.gateaux;
        ok = ok && djdz_ok && gat_ok;
        out << "# derivative checks on the unit Gaussian\n";
        out << "dJ/dz vs central difference  " << d.djdz_max_rel_error << (djdz_ok ? "" : "  FAIL") << '\n';
        out << "Gateaux dW vs symmetric diff " << d.gateaux_rel_error << (gat_ok ? "" : "  FAIL") << '\n';
        out << "FD order ratio (eps vs eps/2) " << d.fd_order_ratio << '\n';

        out << (ok ? "oracle: PASS\n" : "oracle: FAIL\n");
        if (!ok) {
            emit_error(err, "oracle", "one or more closed-form comparisons out of tolerance", kCheckFailed);
            return kCheckFailed;
        }
        return kOk;
    } catch (const ParameterError& e) {
        emit_error(err, "parameter", e.what(), kParameterError);
        return kParameterError;
    }
}

inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    if (cfg.subcommand == "solve") {
        return run_solve(cfg, out, err);
    }
    if (cfg.subcommand == "verify") {
        return run_verify(cfg, out, err);
    }
    if (cfg.subcommand == "sweep") {
        return run_sweep(cfg, out, err);
    }
    if (cfg.subcommand == "oracle") {
        return run_oracle(cfg, out, err);
    }
    emit_error(err, "parameter", "unknown subcommand '" + cfg.subcommand + "'", kParameterError);
    return kParameterError;
}

} // namespace mixgn::cli
