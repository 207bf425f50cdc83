#include "cpflow/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cpflow/curvature.hpp"
#include "cpflow/errors.hpp"
#include "cpflow/flow.hpp"
#include "cpflow/io.hpp"
#include "cpflow/obstructions.hpp"
#include "cpflow/parallel.hpp"
#include "cpflow/potential.hpp"

namespace cpflow
{

namespace fs = std::filesystem;
using nlohmann::json;

namespace
{

constexpr const char* kDefaultManifest = "cpflow_manifest.json";

struct Options {
    std::string surface;
    std::string manifest{kDefaultManifest};
    std::string report;
    bool json_stdout{false};

    // curvature
    bool extended{false};

    // flow / solve
    std::string variant{"extended"};
    std::string target_file;
    std::string integrator{"rk4"};
    double dt{0.05};
    double tol{-1.0};
    double max_time{1000.0};
    int sample_every{1};
    double radius_cap{50.0};
    std::string trace;
    std::string trace_json;
    std::string radii_out;
    bool no_potential{false};
    int max_iter{100};

    // check
    std::optional<std::size_t> subset_cap;
    std::string subsets_file;
};

std::string fmt(double x, int digits = 17)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

json vec_json(const Eigen::VectorXd& v)
{
    return std::vector<double>(v.data(), v.data() + v.size());
}

struct Run {
    const Options& opt;
    std::ostream& out;
    std::ostream& err;
    json manifest;

    void output(const char* key, const std::string& path)
    {
        if (!path.empty()) {
            manifest["outputs"][key] = path;
        }
    }

    io::SurfaceFile load()
    {
        manifest["input"] = opt.surface;
        if (fs::exists(opt.surface)) {
            manifest["input_digest"] = "sha256:" + io::sha256_file(opt.surface);
        }
        return io::load_surface(opt.surface);
    }

    void emit_report(const json& report)
    {
        if (!opt.report.empty()) {
            io::write_json(opt.report, report);
            output("report", opt.report);
        }
        if (opt.json_stdout) {
            out << report.dump(2) << '\n';
        }
    }
};

Eigen::VectorXd load_target_or_zero(Run& run, std::size_t n)
{
    if (run.opt.target_file.empty()) {
        return Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    }
    run.manifest["target_file"] = run.opt.target_file;
    return io::load_target(run.opt.target_file, n);
}

void save_radii(Run& run, const io::SurfaceFile& surface, const PackingMetric& metric)
{
    if (run.opt.radii_out.empty()) {
        return;
    }
    io::SurfaceFile result = surface;
    result.radii = metric.radii;
    io::save_surface(run.opt.radii_out, result);
    run.output("radii", run.opt.radii_out);
}

int cmd_curvature(Run& run)
{
    const io::SurfaceFile surface = run.load();
    const PackingMetric metric = surface.metric();
    run.manifest["config"] = {{"extended", run.opt.extended}};

    const OmegaMembership omega = omega_membership(surface.complex, metric);
    const CurvatureVector k = run.opt.extended ? extended_curvature(surface.complex, metric)
                                               : curvature(surface.complex, metric);
    const double defect = k.values.sum() -
                          2.0 * M_PI * surface.complex.euler_characteristic() -
                          gauss_bonnet_lambda(surface.background) * k.total_area;

    json report{{"format", io::kFormatVersion},
                {"background", std::string(to_string(surface.background))},
                {"extended", run.opt.extended},
                {"curvature", vec_json(k.values)},
                {"total_area", k.total_area},
                {"euler_characteristic", surface.complex.euler_characteristic()},
                {"gauss_bonnet_defect", defect},
                {"in_omega", omega.member},
                {"violating_faces", omega.violating_faces},
                {"degenerate_faces", k.degenerate_faces}};
    run.emit_report(report);
    if (!run.opt.json_stdout) {
        run.out << std::left << std::setw(8) << "vertex" << std::setw(24) << "radius" << "K\n";
        for (Eigen::Index i = 0; i < k.values.size(); ++i) {
            run.out << std::setw(8) << i << std::setw(24) << fmt(metric.radii[i], 15)
                    << fmt(k.values[i], 15) << '\n';
        }
        run.out << "gauss_bonnet_defect " << fmt(defect, 6) << '\n';
        run.out << "in_omega " << (omega.member ? "yes" : "no") << '\n';
        run.out << "degenerate_faces";
        for (auto f : k.degenerate_faces) {
            run.out << ' ' << f;
        }
        run.out << '\n';
    }
    return kExitOk;
}

int cmd_gb(Run& run)
{
    const io::SurfaceFile surface = run.load();
    const PackingMetric metric = surface.metric();
    const double defect = gauss_bonnet_defect(surface.complex, metric);
    run.emit_report({{"format", io::kFormatVersion}, {"gauss_bonnet_defect", defect}});
    if (!run.opt.json_stdout) {
        run.out << fmt(defect) << '\n';
    }
    return kExitOk;
}

FlowVariant parse_variant(const std::string& s)
{
    if (s == "classical") {
        return FlowVariant::classical;
    }
    if (s == "prescribed") {
        return FlowVariant::prescribed;
    }
    return FlowVariant::extended;
}

int cmd_flow(Run& run)
{
    const Options& opt = run.opt;
    const io::SurfaceFile surface = run.load();
    const PackingMetric metric = surface.metric();
    const std::size_t n = surface.complex.vertex_count();

    FlowConfig config;
    config.variant = parse_variant(opt.variant);
    if (config.variant == FlowVariant::prescribed && opt.target_file.empty()) {
        throw ConfigError("--variant prescribed requires --target-file");
    }
    if (!opt.target_file.empty()) {
        config.target = load_target_or_zero(run, n);
    }
    config.integrator = opt.integrator == "euler" ? Integrator::euler : Integrator::rk4;
    config.step = opt.dt;
    config.max_time = opt.max_time;
    if (opt.tol > 0.0) {
        config.tolerance = opt.tol;
    }
    config.sample_every = opt.sample_every;
    config.divergence_radius_cap = opt.radius_cap;
    config.record_potential = !opt.no_potential;
    run.manifest["config"] = {{"variant", std::string(to_string(config.variant))},
                              {"integrator", std::string(to_string(config.integrator))},
                              {"dt", config.step},
                              {"tol", config.tolerance},
                              {"max_time", config.max_time},
                              {"sample_every", config.sample_every},
                              {"radius_cap", config.divergence_radius_cap},
                              {"potential", config.record_potential}};

    const FlowResult result = run_flow(surface.complex, surface.inversive, to_u(metric), config);

    if (!opt.trace.empty()) {
        std::ofstream csv(opt.trace);
        if (!csv) {
            throw ParseError("cannot write " + opt.trace);
        }
        io::write_trace_csv(csv, result.trace, n);
        run.output("trace", opt.trace);
    }
    if (!opt.trace_json.empty()) {
        io::write_json(opt.trace_json, io::trace_to_json(result.trace, n));
        run.output("trace_json", opt.trace_json);
    }
    const PackingMetric final_metric = from_u(result.final_u, surface.inversive);
    if (result.status != FlowStatus::diverged) {
        save_radii(run, surface, final_metric);
    }

    json report{{"format", io::kFormatVersion},
                {"status", std::string(to_string(result.status))},
                {"final_time", result.final_time},
                {"iterations", result.iterations},
                {"final_residual", result.final_residual},
                {"samples", result.trace.size()},
                {"final_radii", vec_json(final_metric.radii)}};
    if (result.exit_time) {
        report["exit_time"] = *result.exit_time;
        run.manifest["exit_time"] = *result.exit_time;
    }
    run.manifest["flow_status"] = std::string(to_string(result.status));
    run.emit_report(report);
    if (!opt.json_stdout) {
        run.out << "status " << to_string(result.status) << '\n'
                << "time " << fmt(result.final_time, 12) << '\n'
                << "iterations " << result.iterations << '\n'
                << "residual " << fmt(result.final_residual, 6) << '\n';
        if (result.exit_time) {
            run.out << "exit_time " << fmt(*result.exit_time, 12) << '\n';
        }
    }
    switch (result.status) {
    case FlowStatus::converged:
        return kExitOk;
    case FlowStatus::max_time_reached:
        return kExitMaxTime;
    default:
        return kExitFailed;
    }
}

json newton_json(const NewtonResult& r, const Eigen::VectorXd& radii)
{
    json history = json::array();
    for (const auto& h : r.history) {
        history.push_back({{"iteration", h.iteration},
                           {"residual", h.residual},
                           {"potential_change", h.potential_change},
                           {"u_norm", h.u_norm},
                           {"step", h.step},
                           {"newton_direction", h.newton_direction}});
    }
    const char* status = r.status == NewtonStatus::converged    ? "converged"
                         : r.status == NewtonStatus::no_descent ? "no_descent"
                                                                : "max_iter";
    return {{"format", io::kFormatVersion}, {"status", status},    {"iterations", r.iterations},
            {"residual", r.residual},       {"radii", vec_json(radii)}, {"history", history}};
}

int cmd_solve(Run& run)
{
    const Options& opt = run.opt;
    const io::SurfaceFile surface = run.load();
    const std::size_t n = surface.complex.vertex_count();
    const Eigen::VectorXd start =
        surface.radii.value_or(Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n)));
    const PackingMetric metric = PackingMetric::make(surface.complex, surface.background,
                                                     surface.inversive, start,
                                                     surface.allow_negative_inversive);
    const Eigen::VectorXd target = load_target_or_zero(run, n);
    const double tol = opt.tol > 0.0 ? opt.tol : 1e-10;
    run.manifest["config"] = {{"tol", tol},
                              {"max_iter", opt.max_iter},
                              {"start", surface.radii ? "file radii" : "unit radii"}};

    const UCoords u0 = to_u(metric);
    const PotentialContext ctx(surface.complex, surface.inversive, u0, target);
    int code = kExitOk;
    NewtonResult result;
    try {
        result = newton_solve(ctx, u0, tol, opt.max_iter);
    } catch (const MaxIterError& e) {
        result = e.result();
        code = kExitMaxTime;
        run.err << "error: " << e.what() << '\n';
    } catch (const NoDescentError& e) {
        result = e.result();
        code = kExitFailed;
        run.err << "error: " << e.what() << '\n';
    }
    run.manifest["solve_status"] = code == kExitOk ? "converged"
                                   : code == kExitMaxTime ? "max_iter"
                                                          : "no_descent";
    const PackingMetric solution = from_u(result.solution, surface.inversive);
    if (code == kExitOk) {
        save_radii(run, surface, solution);
    }
    run.emit_report(newton_json(result, solution.radii));
    if (!opt.json_stdout) {
        run.out << "status " << run.manifest["solve_status"].get<std::string>() << '\n'
                << "iterations " << result.iterations << '\n'
                << "residual " << fmt(result.residual, 6) << '\n';
    }
    return code;
}

int cmd_check(Run& run)
{
    const Options& opt = run.opt;
    const io::SurfaceFile surface = run.load();
    SubsetSelection selection;
    if (!opt.subsets_file.empty()) {
        selection.exhaustive_when_small = false;
        selection.cap = 0;
        selection.extra = io::load_subsets(opt.subsets_file);
    } else if (opt.subset_cap) {
        selection.exhaustive_when_small = false;
        selection.cap = *opt.subset_cap;
    }
    run.manifest["config"] = {{"subset_cap", opt.subset_cap ? json(*opt.subset_cap) : json(nullptr)},
                              {"subsets_file", opt.subsets_file}};

    json reports = json::array();
    bool verdict = true;
    auto add = [&](const ObstructionReport& r) {
        reports.push_back(io::obstruction_report_to_json(r));
        verdict = verdict && r.verdict;
    };
    add(check_zero_curvature_necessary(surface.complex, surface.inversive, selection));
    json skipped = json::array();
    if (surface.radii) {
        const PackingMetric metric = surface.metric();
        if (omega_membership(surface.complex, metric).member) {
            add(check_theorem_41(surface.complex, metric, selection));
        } else {
            skipped.push_back("subset_curvature_lower_bound: metric outside the admissible space");
        }
        add(check_closure_inequality(surface.complex, metric, selection));
    } else {
        skipped.push_back("metric checks: no radii in the surface file");
    }
    const json report{{"format", io::kFormatVersion},
                      {"label", "necessary conditions"},
                      {"reports", reports},
                      {"skipped", skipped}};
    if (!opt.report.empty()) {
        io::write_json(opt.report, report);
        run.output("report", opt.report);
    }
    run.out << report.dump(2) << '\n';
    run.manifest["verdicts"] = json::array();
    for (const auto& r : reports) {
        run.manifest["verdicts"].push_back({{"kind", r["kind"]}, {"verdict", r["verdict"]}});
    }
    return kExitOk;
}

bool is_usage_error(const std::exception& e)
{
    return dynamic_cast<const ParseError*>(&e) || dynamic_cast<const ConfigError*>(&e) ||
           dynamic_cast<const NonManifoldError*>(&e) || dynamic_cast<const BadFaceError*>(&e) ||
           dynamic_cast<const DisconnectedLinkError*>(&e) ||
           dynamic_cast<const std::invalid_argument*>(&e);
}

std::string manifest_path(int argc, const char* const* argv)
{
    std::string path = kDefaultManifest;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--manifest" && i + 1 < argc) {
            path = argv[i + 1];
        } else if (arg.rfind("--manifest=", 0) == 0) {
            path = arg.substr(11);
        }
    }
    return path;
}

void write_manifest(const std::string& path, const json& manifest, std::ostream& err)
{
    std::ofstream f(path);
    if (!f) {
        err << "warning: cannot write manifest " << path << '\n';
        return;
    }
    f << manifest.dump(2) << '\n';
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    Options opt;
    CLI::App app{"Inversive-distance circle packings and combinatorial Ricci flow", "cpflow"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    auto common = [&](CLI::App* sub) {
        sub->add_option("surface", opt.surface, "Surface file (JSON)")->required();
        sub->add_option("--manifest", opt.manifest, "Run manifest path");
        sub->add_option("--report", opt.report, "Write the JSON report to this path");
        sub->add_flag("--json", opt.json_stdout, "Print the JSON report instead of a table");
    };

    CLI::App* curv = app.add_subcommand("curvature", "Per-vertex curvature report");
    common(curv);
    curv->add_flag("--extended", opt.extended, "Use the extended curvature");

    CLI::App* gb = app.add_subcommand("gb", "Gauss-Bonnet defect of the extended curvature");
    common(gb);

    CLI::App* flow = app.add_subcommand("flow", "Integrate a Ricci flow");
    common(flow);
    flow->add_option("--variant", opt.variant, "classical | extended | prescribed")
        ->check(CLI::IsMember({"classical", "extended", "prescribed"}));
    flow->add_option("--target-file", opt.target_file, "Prescribed curvature (JSON)");
    flow->add_option("--dt", opt.dt, "Step size")->check(CLI::PositiveNumber);
    flow->add_option("--tol", opt.tol, "Convergence tolerance (default 1e-9)")
        ->check(CLI::PositiveNumber);
    flow->add_option("--max-time", opt.max_time, "Final time")->check(CLI::PositiveNumber);
    flow->add_option("--integrator", opt.integrator, "rk4 | euler")
        ->check(CLI::IsMember({"rk4", "euler"}));
    flow->add_option("--sample-every", opt.sample_every, "Record every k-th step")
        ->check(CLI::PositiveNumber);
    flow->add_option("--radius-cap", opt.radius_cap, "Divergence radius cap")
        ->check(CLI::PositiveNumber);
    flow->add_option("--trace", opt.trace, "Trace CSV path");
    flow->add_option("--trace-json", opt.trace_json, "Trace JSON path");
    flow->add_option("--radii-out", opt.radii_out, "Write the final metric as a surface file");
    flow->add_flag("--no-potential", opt.no_potential, "Skip potential evaluation in the trace");

    CLI::App* solve = app.add_subcommand("solve", "Newton descent on the prescribed potential");
    common(solve);
    solve->add_option("--target-file", opt.target_file, "Prescribed curvature (JSON), default 0");
    solve->add_option("--tol", opt.tol, "Residual tolerance (default 1e-10)")
        ->check(CLI::PositiveNumber);
    solve->add_option("--max-iter", opt.max_iter, "Iteration limit")->check(CLI::NonNegativeNumber);
    solve->add_option("--radii-out", opt.radii_out, "Write the solution as a surface file");

    CLI::App* check = app.add_subcommand("check", "Subset obstruction checks");
    common(check);
    check->add_option("--subset-cap", opt.subset_cap, "Visit subsets up to this size");
    check->add_option("--subsets-file", opt.subsets_file, "Explicit subsets (JSON)");

    json manifest{{"tool_version", kToolVersion},
                  {"arguments", std::vector<std::string>(argv + std::min(argc, 1), argv + argc)},
                  {"threads", thread_budget()},
                  {"outputs", json::object()}};
    const std::string mpath = manifest_path(argc, argv);

    int code = kExitOk;
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        code = e.get_exit_code() == 0 ? kExitOk : kExitUsage;
        if (code == kExitOk) {
            out << (e.get_name() == "CallForVersion" ? std::string(kToolVersion) + "\n"
                                                     : app.help());
        } else {
            err << "error: " << e.what() << '\n';
        }
        manifest["command"] = nullptr;
        manifest["status"] = code == kExitOk ? "help" : "usage_error";
        manifest["exit_code"] = code;
        write_manifest(mpath, manifest, err);
        return code;
    }

    CLI::App* chosen = app.get_subcommands().front();
    manifest["command"] = chosen->get_name();
    Run run{opt, out, err, std::move(manifest)};
    try {
        if (chosen == curv) {
            code = cmd_curvature(run);
        } else if (chosen == gb) {
            code = cmd_gb(run);
        } else if (chosen == flow) {
            code = cmd_flow(run);
        } else if (chosen == solve) {
            code = cmd_solve(run);
        } else {
            code = cmd_check(run);
        }
        run.manifest["status"] = code == kExitOk         ? "ok"
                                 : code == kExitMaxTime ? "incomplete"
                                                        : "failed";
    } catch (const std::exception& e) {
        if (is_usage_error(e)) {
            code = kExitUsage;
            run.manifest["status"] = "usage_error";
        } else if (dynamic_cast<const StepError*>(&e)) {
            code = kExitFailed;
            run.manifest["status"] = "failed";
        } else {
            code = kExitDomain;
            run.manifest["status"] = "domain_error";
        }
        run.manifest["message"] = e.what();
        err << "error: " << e.what() << '\n';
    }
    run.manifest["exit_code"] = code;
    write_manifest(opt.manifest, run.manifest, err);
    return code;
}

}  // namespace cpflow
