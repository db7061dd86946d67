// Batch front end: parse a problem-spec file, run hypothesis and estimate
// checks, solve on grids, run verification, and emit machine-readable
// reports. Exit codes: 0 pass, 1 check failure, 2 numeric failure,
// 3 input error.

#include <algorithm>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "degenheat/degenheat.hpp"

namespace {

using namespace degenheat;
namespace fs = std::filesystem;

constexpr int kExitPass = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitNumericFailure = 2;
constexpr int kExitInputError = 3;

struct RunConfig {
    std::string command;
    fs::path spec_path;
    fs::path out_dir = "out";
    std::string format = "csv";
    std::optional<double> tol;
    std::optional<double> rho_min;
    std::optional<double> eps_split;
    std::optional<std::string> duhamel_form;
    std::optional<std::string> grid_override;
    // verify-specific knobs
    double oracle_halfwidth = 12.0;
    double oracle_dt = 1e-3;
    double oracle_dx = 0.02;
    bool skip_oracle = false;
    double residual_floor = 1e-3;
};

unsigned thread_budget() {
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("DEGENHEAT_THREADS")) {
        const unsigned long cap = std::strtoul(env, nullptr, 10);
        if (cap >= 1) threads = std::min<unsigned long>(threads, cap);
    }
    return threads;
}

void apply_grid_override(const std::string& text, GridSpec& grid) {
    // T0:T1:NT,X0:X1:NX
    const auto comma = text.find(',');
    if (comma == std::string::npos)
        throw ParseError("--grid: expected 'T0:T1:NT,X0:X1:NX'");
    const auto parse_axis = [](const std::string& axis, double& begin, double& end,
                               std::size_t& count) {
        const auto first = axis.find(':');
        const auto second = axis.find(':', first == std::string::npos ? first : first + 1);
        if (first == std::string::npos || second == std::string::npos)
            throw ParseError("--grid: expected 'begin:end:count' per axis");
        begin = io::detail::parse_number(axis.substr(0, first), "--grid");
        end = io::detail::parse_number(axis.substr(first + 1, second - first - 1), "--grid");
        count = io::detail::parse_count(axis.substr(second + 1), "--grid");
    };
    parse_axis(text.substr(0, comma), grid.t_begin, grid.t_end, grid.t_count);
    parse_axis(text.substr(comma + 1), grid.x_begin, grid.x_end, grid.x_count);
    try {
        grid.validate();
    } catch (const DomainError& e) {
        throw ParseError(std::string("--grid: ") + e.what());
    }
}

io::SpecDocument load_spec(const RunConfig& config) {
    io::SpecDocument doc = io::parse_spec_file(config.spec_path);
    if (config.tol) doc.problem.tolerances.quad_tol = *config.tol;
    if (config.rho_min) doc.problem.tolerances.rho_min = *config.rho_min;
    if (config.eps_split) doc.problem.tolerances.eps_split_rel = *config.eps_split;
    if (config.duhamel_form) {
        try {
            doc.problem.duhamel_form = duhamel_form_from_string(*config.duhamel_form);
        } catch (const DomainError& e) {
            throw ParseError(std::string("--duhamel-form: ") + e.what());
        }
    }
    if (config.grid_override) apply_grid_override(*config.grid_override, doc.grid);
    try {
        doc.problem.validate();
    } catch (const DomainError& e) {
        throw ParseError(e.what());
    }
    return doc;
}

std::string run_header_text(const RunConfig& config, const io::SpecDocument& doc) {
    io::SpecDocument echoed = doc;
    echoed.has_tolerances = true;  // echo the effective numerical settings
    std::string header;
    header += "# degenheat 0.1.0\n";
    header += "# command = " + config.command + "\n";
    header += "# format = " + config.format + "\n";
    header += "# duhamel_form = " + std::string(to_string(doc.problem.duhamel_form)) + "\n";
    header += "\n";
    header += io::serialize_spec(echoed);
    return header;
}

void write_report(const RunConfig& config, const std::string& stem, const std::string& csv,
                  const nlohmann::ordered_json& json) {
    if (config.format == "json") {
        io::write_text_file(config.out_dir / (stem + ".json"), json.dump(2) + "\n");
    } else {
        io::write_text_file(config.out_dir / (stem + ".csv"), csv);
    }
}

std::vector<std::pair<double, double>> default_lemma_points(const GridSpec& grid) {
    std::vector<std::pair<double, double>> points;
    const int nt = 5;
    for (int i = 0; i < nt; ++i) {
        const double t =
            grid.t_begin + (grid.t_end - grid.t_begin) * static_cast<double>(i) / (nt - 1);
        points.emplace_back(t, 0.0);
        points.emplace_back(t, 0.5 * t);
    }
    return points;
}

int run_check(const RunConfig& config, const io::SpecDocument& doc) {
    const ConditionReport conditions =
        check_conditions(doc.problem.coefficient, doc.grid.t_end, 1024);
    const OmegaCache cache(doc.problem.coefficient, doc.problem.tolerances.omega_tol,
                           doc.problem.tolerances.p_floor);
    const auto points = default_lemma_points(doc.grid);
    const LemmaReport lemmas = lemma_report(cache, points);

    write_report(config, "conditions", io::conditions_to_csv(conditions),
                 io::conditions_to_json(conditions));
    write_report(config, "lemmas", io::lemmas_to_csv(lemmas), io::lemmas_to_json(lemmas));

    std::cout << "conditions: " << (conditions.passes() ? "pass" : "fail") << "\n";
    std::cout << "estimate identities: " << (lemmas.identities_ok ? "pass" : "fail") << "\n";
    return conditions.passes() && lemmas.identities_ok ? kExitPass : kExitCheckFailure;
}

int run_solve(const RunConfig& config, const io::SpecDocument& doc) {
    const Solver solver(doc.problem);
    const SolutionField field = solver.solve_grid(doc.grid, thread_budget());
    io::write_text_file(config.out_dir / "run_header.txt", run_header_text(config, doc));
    write_report(config, "solution", io::field_to_csv(field), io::field_to_json(field));
    std::cout << "solved " << field.nt() << " x " << field.nx() << " grid\n";
    return kExitPass;
}

int run_verify(const RunConfig& config, const io::SpecDocument& doc) {
    // The residual stencil needs a grid fine enough that its truncation
    // error separates from an O(1) equation violation; refine the output
    // grid before differencing.
    GridSpec grid = doc.grid;
    if (grid.t_count >= 2) grid.t_count = 4 * (grid.t_count - 1) + 1;
    if (grid.x_count >= 2) grid.x_count = 2 * (grid.x_count - 1) + 1;

    const Solver solver(doc.problem);
    const SolutionField field = solver.solve_grid(grid, thread_budget());

    bool all_pass = true;

    // Residual against the equation, judged against the stencil's own
    // truncation order plus an absolute floor.
    const ResidualReport residual = fd_residual(field, doc.problem);
    const double residual_threshold =
        std::max(config.residual_floor,
                 2.0 * (residual.dt * residual.dt + residual.dx * residual.dx) *
                     residual.derivative_scale);
    const bool residual_pass = residual.sup_norm <= residual_threshold;
    all_pass = all_pass && residual_pass;
    write_report(config, "residual", io::residual_to_csv(residual, residual_threshold, residual_pass),
                 io::residual_to_json(residual, residual_threshold, residual_pass));
    std::cout << "residual sup = " << io::format_g17(residual.sup_norm)
              << " threshold = " << io::format_g17(residual_threshold) << " "
              << (residual_pass ? "pass" : "fail") << "\n";

    // Initial trace along t_k = 4^{-k}.
    std::vector<double> times;
    for (int k = 1; k <= 5; ++k) times.push_back(std::pow(4.0, -k));
    const auto xs = doc.grid.x_points();
    const InitialTraceReport trace = initial_check(doc.problem, times, xs);
    all_pass = all_pass && trace.decreasing;
    write_report(config, "initial_trace", io::initial_trace_to_csv(trace),
                 io::initial_trace_to_json(trace));
    std::cout << "initial trace decreasing: " << (trace.decreasing ? "pass" : "fail") << "\n";

    // Independent time-stepping reference, when the data decays inside the box.
    if (!config.skip_oracle) {
        OracleConfig oracle_config;
        oracle_config.domain_halfwidth = config.oracle_halfwidth;
        oracle_config.dt = config.oracle_dt;
        oracle_config.dx = config.oracle_dx;
        try {
            const SolutionField reference = cn_oracle(doc.problem, grid, oracle_config);
            const FieldDifference diff = compare_fields(field, reference);
            double scale = 0.0;
            for (const auto& v : field.values()) scale = std::max(scale, std::abs(v));
            const double threshold = std::max(
                1e-4, 10.0 * (oracle_config.dt * oracle_config.dt + oracle_config.dx * oracle_config.dx) *
                          std::max(1.0, scale));
            const bool oracle_pass = diff.sup_norm <= threshold;
            all_pass = all_pass && oracle_pass;
            nlohmann::ordered_json json;
            json["sup_norm"] = diff.sup_norm;
            json["l2_norm"] = diff.l2_norm;
            json["threshold"] = threshold;
            json["pass"] = oracle_pass;
            std::string csv = "metric,value\n";
            csv += "sup_norm," + io::format_g17(diff.sup_norm) + "\n";
            csv += "l2_norm," + io::format_g17(diff.l2_norm) + "\n";
            csv += "threshold," + io::format_g17(threshold) + "\n";
            csv += std::string("pass,") + (oracle_pass ? "true" : "false") + "\n";
            write_report(config, "oracle_compare", csv, json);
            std::cout << "oracle sup diff = " << io::format_g17(diff.sup_norm) << " "
                      << (oracle_pass ? "pass" : "fail") << "\n";
        } catch (const OracleError& e) {
            // Data does not decay inside the box; the comparison is skipped
            // rather than failed.
            std::cout << "oracle comparison skipped: " << e.what() << "\n";
        }
    }

    return all_pass ? kExitPass : kExitCheckFailure;
}

int run_sweep(const RunConfig& config, const io::SpecDocument& doc) {
    struct Level {
        std::string label;
        double quad_tol;
        bool refine_grid;
    };
    const std::vector<Level> levels = {
        {"tol_1e-6", 1e-6, false}, {"tol_1e-8", 1e-8, false},     {"tol_1e-10", 1e-10, false},
        {"fine_1e-8", 1e-8, true}, {"reference", 1e-10, true},
    };

    const auto refined = [](const GridSpec& grid) {
        GridSpec out = grid;
        if (out.t_count >= 2) out.t_count = 2 * (out.t_count - 1) + 1;
        if (out.x_count >= 2) out.x_count = 2 * (out.x_count - 1) + 1;
        return out;
    };

    struct Row {
        Level level;
        GridSpec grid{};
        std::size_t evaluations = 0;
        std::vector<std::complex<double>> values;
    };
    std::vector<Row> rows;
    for (const Level& level : levels) {
        Row row;
        row.level = level;
        row.grid = level.refine_grid ? refined(doc.grid) : doc.grid;
        ProblemSpec problem = doc.problem;
        problem.tolerances.quad_tol = level.quad_tol;
        const Solver solver(problem);
        const SolutionField field = solver.solve_grid(row.grid, thread_budget());
        row.evaluations = solver.quad_evaluations();
        row.values.assign(field.values().begin(), field.values().end());
        rows.push_back(std::move(row));
    }

    // Accuracy against the reference run at the base grid's common points.
    const Row& reference = rows.back();
    const auto value_at = [](const Row& row, std::size_t i, std::size_t j,
                             const GridSpec& base) -> std::complex<double> {
        const std::size_t ti = row.level.refine_grid && base.t_count >= 2 ? 2 * i : i;
        const std::size_t xj = row.level.refine_grid && base.x_count >= 2 ? 2 * j : j;
        const std::size_t nx = row.grid.x_count;
        return row.values[ti * nx + xj];
    };

    std::string csv = "label,quad_tol,nt,nx,evaluations,sup_diff_vs_ref,l2_diff_vs_ref,pass\n";
    nlohmann::ordered_json json = nlohmann::ordered_json::array();
    bool all_pass = true;
    for (const Row& row : rows) {
        double sup = 0.0;
        double sum_sq = 0.0;
        std::size_t n = 0;
        for (std::size_t i = 0; i < doc.grid.t_count; ++i) {
            for (std::size_t j = 0; j < doc.grid.x_count; ++j) {
                const double mag =
                    std::abs(value_at(row, i, j, doc.grid) - value_at(reference, i, j, doc.grid));
                sup = std::max(sup, mag);
                sum_sq += mag * mag;
                ++n;
            }
        }
        const double l2 = std::sqrt(sum_sq / static_cast<double>(n));
        const double budget = 1e3 * (row.level.quad_tol + reference.level.quad_tol) + 1e-12;
        const bool pass = sup <= budget;
        all_pass = all_pass && pass;
        csv += row.level.label + "," + io::format_g17(row.level.quad_tol) + "," +
               std::to_string(row.grid.t_count) + "," + std::to_string(row.grid.x_count) + "," +
               std::to_string(row.evaluations) + "," + io::format_g17(sup) + "," +
               io::format_g17(l2) + "," + (pass ? "true" : "false") + "\n";
        json.push_back({{"label", row.level.label},
                        {"quad_tol", row.level.quad_tol},
                        {"nt", row.grid.t_count},
                        {"nx", row.grid.x_count},
                        {"evaluations", row.evaluations},
                        {"sup_diff_vs_ref", sup},
                        {"l2_diff_vs_ref", l2},
                        {"pass", pass}});
    }
    write_report(config, "sweep", csv, json);
    std::cout << "sweep: " << (all_pass ? "pass" : "fail") << "\n";
    return all_pass ? kExitPass : kExitCheckFailure;
}

int dispatch(const RunConfig& config) {
    const io::SpecDocument doc = load_spec(config);
    fs::create_directories(config.out_dir);
    if (config.command == "check") return run_check(config, doc);
    if (config.command == "solve") return run_solve(config, doc);
    if (config.command == "verify") return run_verify(config, doc);
    return run_sweep(config, doc);
}

int error_record(const char* kind, const std::string& message, int code) {
    std::cerr << "degenheat: error kind=" << kind << " message=\"" << message << "\"\n";
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"degenheat: kernel-representation solver for p(t) u_t = u_xx + f(t, x)"};
    app.require_subcommand(1);

    RunConfig config;
    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--spec", config.spec_path, "problem-spec file")->required();
        cmd->add_option("--out", config.out_dir, "output directory");
        cmd->add_option("--format", config.format, "output format")
            ->check(CLI::IsMember({"csv", "json"}));
        cmd->add_option("--tol", config.tol, "quadrature tolerance override");
        cmd->add_option("--rho-min", config.rho_min, "Re omega floor override");
        cmd->add_option("--eps-split", config.eps_split, "near-diagonal slice width (relative to t)");
        cmd->add_option("--duhamel-form", config.duhamel_form, "source-term weight form")
            ->check(CLI::IsMember({"paper", "corrected"}));
        cmd->add_option("--grid", config.grid_override, "grid override T0:T1:NT,X0:X1:NX");
    };

    add_common(app.add_subcommand("check", "hypothesis and estimate checks"));
    add_common(app.add_subcommand("solve", "solve on the grid"));
    CLI::App* verify = app.add_subcommand("verify", "residual, initial-trace and reference checks");
    add_common(verify);
    verify->add_option("--oracle-l", config.oracle_halfwidth, "reference solver domain halfwidth");
    verify->add_option("--oracle-dt", config.oracle_dt, "reference solver time step");
    verify->add_option("--oracle-dx", config.oracle_dx, "reference solver space step");
    verify->add_flag("--no-oracle", config.skip_oracle, "skip the reference comparison");
    verify->add_option("--residual-floor", config.residual_floor,
                       "absolute floor of the residual pass threshold");
    add_common(app.add_subcommand("sweep", "accuracy/cost table across tolerances and grids"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInputError;
    }
    config.command = app.get_subcommands().front()->get_name();

    try {
        return dispatch(config);
    } catch (const ParseError& e) {
        return error_record("parse", e.what(), kExitInputError);
    } catch (const DegenerateRegimeError& e) {
        return error_record("degenerate_regime", e.what(), kExitNumericFailure);
    } catch (const DegenerateCoefficientError& e) {
        return error_record("degenerate_coefficient", e.what(), kExitNumericFailure);
    } catch (const DegenerateKernelError& e) {
        return error_record("degenerate_kernel", e.what(), kExitNumericFailure);
    } catch (const NonConvergenceError& e) {
        return error_record("non_convergence", e.what(), kExitNumericFailure);
    } catch (const OracleError& e) {
        return error_record("oracle", e.what(), kExitNumericFailure);
    } catch (const GridMismatchError& e) {
        return error_record("grid_mismatch", e.what(), kExitNumericFailure);
    } catch (const DomainError& e) {
        return error_record("domain", e.what(), kExitNumericFailure);
    } catch (const Error& e) {
        return error_record("internal", e.what(), kExitNumericFailure);
    } catch (const std::exception& e) {
        return error_record("internal", e.what(), kExitNumericFailure);
    }
}
