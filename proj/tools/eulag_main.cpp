// Command-line front end: simulate trajectories, predict divergence,
// reproduce the divergence tables, scan spectral radii, and compare
// schemes. Exit codes: 0 success, 2 validation error, 3 numerical
// blow-up (partial trace preserved), 4 file i/o error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eulag/eulag.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitBlowUp = 3;
constexpr int kExitIo = 4;

struct ObjectiveOpts {
    std::optional<double> smoothness;
    std::string matrix_file;
    std::size_t dim = 5;
};

void add_objective_opts(CLI::App* cmd, ObjectiveOpts& o) {
    auto* lflag = cmd->add_option("--L", o.smoothness, "smoothness constant; builds the default "
                                                       "log-spaced spectrum");
    auto* mflag = cmd->add_option("--matrix", o.matrix_file, "objective matrix file");
    cmd->add_option("--dim", o.dim, "dimension for the default spectrum")->default_val(5);
    lflag->excludes(mflag);
    mflag->excludes(lflag);
}

eulag::QuadraticObjective make_objective(const ObjectiveOpts& o) {
    if (!o.matrix_file.empty()) return eulag::load_objective(o.matrix_file);
    eulag::require(o.smoothness.has_value(), eulag::errc::invalid_argument,
                   "either --L or --matrix is required");
    return eulag::default_objective(*o.smoothness, o.dim);
}

eulag::IndexConvention parse_convention(const std::string& s) {
    if (s == "k") return eulag::IndexConvention::K;
    if (s == "k+1") return eulag::IndexConvention::KPlusOne;
    eulag::fail(eulag::errc::invalid_argument, "--index-convention must be k or k+1");
}

void emit(const std::string& path, const std::string& content) {
    if (path.empty())
        std::cout << content;
    else
        eulag::atomic_write_file(path, content);
}

void emit_plot(const std::string& path, const eulag::PlotSpec& spec) {
    if (!path.empty()) eulag::atomic_write_file(path, eulag::render_svg(spec));
}

eulag::PlotSeries gap_series(const std::string& label,
                             const std::vector<eulag::TraceRecord>& records) {
    eulag::PlotSeries s{label, {}};
    s.points.reserve(records.size());
    for (const auto& r : records) s.points.emplace_back(static_cast<double>(r.k), r.f_gap);
    return s;
}

int run_simulate(const std::string& scheme_name, const ObjectiveOpts& objopts,
                 eulag::ExperimentSpec spec, std::int64_t iters, const std::string& out_path,
                 const std::string& plot_path) {
    const auto scheme = eulag::scheme_from_string(scheme_name);
    eulag::require(scheme.has_value(), eulag::errc::invalid_argument,
                   "unknown scheme " + scheme_name);
    const eulag::QuadraticObjective obj = make_objective(objopts);

    if (iters == 0) {
        std::ostringstream csv;
        eulag::write_trace_csv({}, csv);
        emit(out_path, csv.str());
        return 0;
    }
    spec.budget = iters;
    const eulag::RunResult run = eulag::run_trajectory(*scheme, spec, obj);

    std::ostringstream csv;
    eulag::write_trace_csv(run.records, csv);
    emit(out_path, csv.str());
    emit_plot(plot_path, eulag::PlotSpec{"suboptimality, " + scheme_name, "k", "f(x_k) - f(x*)",
                                         false, true, {gap_series(scheme_name, run.records)}});

    const auto verdict = eulag::detect_divergence(run.records, spec.detector);
    if (verdict.diverged)
        std::cerr << "divergence detected at k = " << *verdict.empirical_k << " ("
                  << to_string(*verdict.criterion) << ")\n";
    if (run.nonfinite_k) {
        std::cerr << "trajectory became non-finite at k = " << *run.nonfinite_k
                  << "; partial trace written\n";
        return kExitBlowUp;
    }
    return 0;
}

int run_predict(double p, double C, double delta, const ObjectiveOpts& objopts,
                eulag::IndexConvention conv) {
    const eulag::QuadraticObjective obj = make_objective(objopts);
    const double L = obj.smoothness_constant();
    const eulag::SchemeParams params(p, C, delta, conv);

    if (params.step_assumption_violated(L))
        eulag::fail(eulag::errc::assumption_violated,
                    "delta = " + eulag::format_double(delta) + " >= 1/L = " +
                        eulag::format_double(1.0 / L));
    if (params.constant_assumption_violated(L))
        eulag::fail(eulag::errc::assumption_violated,
                    "C = " + eulag::format_double(C) + " >= 1/(eps L) = " +
                        eulag::format_double(1.0 / (params.epsilon() * L)));

    std::cout << "assumptions: delta < 1/L ok, C < 1/(eps L) ok\n";
    if (p > 2.0) {
        std::cout << "explicit-implicit divergence bound: "
                  << eulag::format_double(eulag::divergence_bound(params, L)) << "\n";
    } else {
        std::cout << "explicit-implicit divergence bound: stable (no finite bound)\n";
    }
    for (auto scheme : {eulag::SchemeKind::Explicit, eulag::SchemeKind::Implicit,
                        eulag::SchemeKind::ExplicitImplicit}) {
        std::cout << to_string(scheme) << ": "
                  << to_string(eulag::limit_classification(scheme, params, L)) << "\n";
    }
    return 0;
}

int run_table(std::vector<double> ps, std::vector<double> Ls, std::vector<double> deltas,
              double C, const eulag::TableOptions& opts, const std::string& out_path) {
    std::vector<eulag::TableCell> grid;
    for (double p : ps)
        for (double L : Ls)
            for (double delta : deltas) grid.push_back({p, L, delta});
    const auto rows = eulag::reproduce_divergence_table(grid, C, opts);
    std::ostringstream csv;
    eulag::write_table_csv(rows, csv);
    emit(out_path, csv.str());
    return 0;
}

int run_scan(const std::string& scheme_name, double p, double C, double delta,
             const ObjectiveOpts& objopts, eulag::IndexConvention conv, std::int64_t k_max,
             std::int64_t stride, const std::string& out_path, const std::string& plot_path) {
    const auto scheme = eulag::scheme_from_string(scheme_name);
    eulag::require(scheme.has_value(), eulag::errc::invalid_argument,
                   "unknown scheme " + scheme_name);
    const eulag::QuadraticObjective obj = make_objective(objopts);
    const eulag::SchemeParams params(p, C, delta, conv);
    if (stride <= 0) stride = std::max<std::int64_t>(1, k_max / 100000);

    const auto report = eulag::make_stability_report(*scheme, params, obj.smoothness_constant(),
                                                     1, k_max, stride);
    std::ostringstream csv;
    eulag::write_stability_csv(report, csv);
    emit(out_path, csv.str());

    if (!plot_path.empty()) {
        eulag::PlotSeries s{"R(M_k)", {}};
        for (const auto& [k, r] : report.per_k) s.points.emplace_back(static_cast<double>(k), r);
        emit_plot(plot_path, eulag::PlotSpec{"spectral radius, " + scheme_name, "k", "R(M_k)",
                                             true, false, {std::move(s)}});
    }
    if (report.first_unstable_k)
        std::cerr << "first unstable iteration: " << *report.first_unstable_k << "\n";
    else
        std::cerr << "no unstable iteration up to k = " << k_max << "\n";
    return 0;
}

int run_compare(const std::vector<std::string>& series, const ObjectiveOpts& objopts,
                eulag::ExperimentSpec spec, const std::string& out_path,
                const std::string& plot_path) {
    eulag::require(series.size() >= 2, eulag::errc::invalid_argument,
                   "compare needs at least two schemes");
    for (const std::string& name : series) {
        if (name == "ode") {
            spec.include_reference = true;
        } else {
            const auto scheme = eulag::scheme_from_string(name);
            eulag::require(scheme.has_value(), eulag::errc::invalid_argument,
                           "unknown scheme " + name);
            spec.schemes.push_back(*scheme);
        }
    }
    eulag::require(!spec.schemes.empty(), eulag::errc::invalid_argument,
                   "compare needs at least one discrete scheme");
    const eulag::QuadraticObjective obj = make_objective(objopts);

    const auto traces = eulag::compare_schemes(spec, obj);
    std::ostringstream csv;
    eulag::write_compare_csv(eulag::align_traces(traces), csv);
    emit(out_path, csv.str());

    eulag::PlotSpec plot{"scheme comparison", "k", "f(x_k) - f(x*)", false, true, {}};
    for (const auto& t : traces) plot.series.push_back(gap_series(t.label, t.records));
    emit_plot(plot_path, plot);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Euler discretizations of the accelerated-optimization ODE "
                 "and their stability analysis"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "run one scheme and write a trace CSV");
    std::string sim_scheme;
    double sim_p = 2.0, sim_C = 1.0, sim_delta = 0.01, sim_thresh = 10.0;
    std::int64_t sim_iters = 0, sim_stride = 1, sim_window = 50;
    std::string sim_out, sim_plot, sim_conv = "k+1";
    std::optional<double> sim_nesterov_step;
    ObjectiveOpts sim_obj;
    sim->add_option("--scheme", sim_scheme,
                    "explicit | implicit | explicit-implicit | rk4 | nesterov")
        ->required();
    sim->add_option("--p", sim_p, "order of the method (>= 2)")->required();
    sim->add_option("--C", sim_C, "constant C")->default_val(1.0);
    sim->add_option("--delta", sim_delta, "step size")->required();
    sim->add_option("--iters", sim_iters, "iteration budget")->required();
    sim->add_option("--stride", sim_stride, "record stride")->default_val(1);
    sim->add_option("--out", sim_out, "trace CSV path (stdout when omitted)");
    sim->add_option("--plot", sim_plot, "SVG plot path");
    sim->add_option("--index-convention", sim_conv, "k | k+1")->default_val("k+1");
    sim->add_option("--nesterov-step", sim_nesterov_step, "baseline step (default 1/L)");
    sim->add_option("--gap-threshold", sim_thresh, "divergence gap threshold")->default_val(10.0);
    sim->add_option("--window", sim_window, "divergence window (records)")->default_val(50);
    add_objective_opts(sim, sim_obj);

    // predict
    auto* pre = app.add_subcommand("predict", "print the analytic bound and classifications");
    double pre_p = 2.0, pre_C = 1.0, pre_delta = 0.01;
    std::string pre_conv = "k+1";
    ObjectiveOpts pre_obj;
    pre->add_option("--p", pre_p, "order of the method")->required();
    pre->add_option("--C", pre_C, "constant C")->default_val(1.0);
    pre->add_option("--delta", pre_delta, "step size")->required();
    pre->add_option("--index-convention", pre_conv, "k | k+1")->default_val("k+1");
    add_objective_opts(pre, pre_obj);

    // table
    auto* tab = app.add_subcommand("table", "reproduce the divergence-iteration tables");
    std::vector<double> tab_p{3.0, 4.0}, tab_L{10.0, 100.0}, tab_delta{0.01, 0.001};
    double tab_C = 1.0;
    std::string tab_out, tab_conv = "k+1";
    eulag::TableOptions tab_opts;
    tab->add_option("--p", tab_p, "orders")->delimiter(',')->expected(0, 64);
    tab->add_option("--L", tab_L, "smoothness constants")->delimiter(',')->expected(0, 64);
    tab->add_option("--delta", tab_delta, "step sizes")->delimiter(',')->expected(0, 64);
    tab->add_option("--C", tab_C, "constant C")->default_val(1.0);
    tab->add_option("--out", tab_out, "table CSV path (stdout when omitted)");
    tab->add_option("--empirical-budget", tab_opts.empirical_budget_limit,
                    "largest budget for which rows get a real run")
        ->default_val(200000);
    tab->add_flag("--force-empirical", tab_opts.force_empirical, "run every row");
    tab->add_option("--index-convention", tab_conv, "k | k+1")->default_val("k+1");

    // scan
    auto* scn = app.add_subcommand("scan", "emit per-k spectral radii");
    std::string scn_scheme, scn_out, scn_plot, scn_conv = "k+1";
    double scn_p = 2.0, scn_C = 1.0, scn_delta = 0.01;
    std::int64_t scn_kmax = 10000, scn_stride = 0;
    ObjectiveOpts scn_obj;
    scn->add_option("--scheme", scn_scheme, "explicit | implicit | explicit-implicit")
        ->required();
    scn->add_option("--p", scn_p, "order of the method")->required();
    scn->add_option("--C", scn_C, "constant C")->default_val(1.0);
    scn->add_option("--delta", scn_delta, "step size")->required();
    scn->add_option("--kmax", scn_kmax, "scan upper limit")->default_val(10000);
    scn->add_option("--stride", scn_stride, "CSV stride (0 = auto)")->default_val(0);
    scn->add_option("--out", scn_out, "radius CSV path (stdout when omitted)");
    scn->add_option("--plot", scn_plot, "SVG plot path");
    scn->add_option("--index-convention", scn_conv, "k | k+1")->default_val("k+1");
    add_objective_opts(scn, scn_obj);

    // compare
    auto* cmp = app.add_subcommand("compare", "aligned traces for several schemes");
    std::vector<std::string> cmp_series;
    double cmp_p = 2.0, cmp_C = 1.0, cmp_delta = 0.01;
    std::int64_t cmp_iters = 1000, cmp_stride = 1;
    std::string cmp_out, cmp_plot, cmp_conv = "k+1";
    std::optional<double> cmp_nesterov_step;
    ObjectiveOpts cmp_obj;
    cmp->add_option("--schemes", cmp_series,
                    "two or more of: explicit, implicit, explicit-implicit, rk4, nesterov, ode")
        ->delimiter(',')
        ->required();
    cmp->add_option("--p", cmp_p, "order of the method")->required();
    cmp->add_option("--C", cmp_C, "constant C")->default_val(1.0);
    cmp->add_option("--delta", cmp_delta, "step size")->required();
    cmp->add_option("--iters", cmp_iters, "iteration budget")->default_val(1000);
    cmp->add_option("--stride", cmp_stride, "record stride")->default_val(1);
    cmp->add_option("--out", cmp_out, "CSV path (stdout when omitted)");
    cmp->add_option("--plot", cmp_plot, "SVG plot path");
    cmp->add_option("--index-convention", cmp_conv, "k | k+1")->default_val("k+1");
    cmp->add_option("--nesterov-step", cmp_nesterov_step, "baseline step (default 1/L)");
    add_objective_opts(cmp, cmp_obj);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) {
            eulag::ExperimentSpec spec;
            spec.params = eulag::SchemeParams(sim_p, sim_C, sim_delta, parse_convention(sim_conv));
            spec.stride = sim_stride;
            spec.detector = {sim_thresh, sim_window};
            spec.nesterov_step = sim_nesterov_step;
            return run_simulate(sim_scheme, sim_obj, spec, sim_iters, sim_out, sim_plot);
        }
        if (pre->parsed())
            return run_predict(pre_p, pre_C, pre_delta, pre_obj, parse_convention(pre_conv));
        if (tab->parsed()) {
            tab_opts.convention = parse_convention(tab_conv);
            return run_table(tab_p, tab_L, tab_delta, tab_C, tab_opts, tab_out);
        }
        if (scn->parsed())
            return run_scan(scn_scheme, scn_p, scn_C, scn_delta, scn_obj,
                            parse_convention(scn_conv), scn_kmax, scn_stride, scn_out, scn_plot);
        if (cmp->parsed()) {
            eulag::ExperimentSpec spec;
            spec.params = eulag::SchemeParams(cmp_p, cmp_C, cmp_delta, parse_convention(cmp_conv));
            spec.budget = cmp_iters;
            spec.stride = cmp_stride;
            spec.nesterov_step = cmp_nesterov_step;
            return run_compare(cmp_series, cmp_obj, spec, cmp_out, cmp_plot);
        }
    } catch (const eulag::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code() == eulag::errc::io_failure ? kExitIo : kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitValidation;
}
