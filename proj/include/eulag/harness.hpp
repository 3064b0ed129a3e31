#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "eulag/errors.hpp"
#include "eulag/io.hpp"
#include "eulag/objective.hpp"
#include "eulag/schemes.hpp"
#include "eulag/stability.hpp"

namespace eulag {

struct TraceRecord {
    std::int64_t k = 0;
    double t = 0.0;    // delta * k
    double f_gap = 0.0; // f(x_k) - f(x*)
    double x_dist = 0.0;
};

struct DivergenceSettings {
    double gap_threshold = 10.0;
    std::int64_t window = 50; // recorded points
};

enum class DivergenceCriterion { GapExceedsInitial, MonotoneGrowthWindow, NonFinite };

inline const char* to_string(DivergenceCriterion c) {
    switch (c) {
        case DivergenceCriterion::GapExceedsInitial: return "gap-exceeds-initial";
        case DivergenceCriterion::MonotoneGrowthWindow: return "monotone-growth-window";
        case DivergenceCriterion::NonFinite: return "non-finite";
    }
    return "?";
}

struct DivergenceVerdict {
    bool diverged = false;
    std::optional<std::int64_t> empirical_k;
    std::optional<DivergenceCriterion> criterion;
};

struct ExperimentSpec {
    std::vector<SchemeKind> schemes;
    SchemeParams params;
    std::int64_t budget = 1000;
    std::int64_t stride = 1;
    DivergenceSettings detector;
    std::optional<Vector> x0;            // default: all-ones scaled so f(x0) = 1
    std::optional<double> nesterov_step; // default: 1/L
    bool include_reference = false;
    std::optional<double> reference_fine_step; // default: delta/20
};

// All-ones direction scaled so the initial suboptimality is exactly 1.
inline Vector default_initial_point(const QuadraticObjective& obj) {
    double trace = 0.0;
    for (double lam : obj.eigen().eigenvalues) trace += lam;
    const double alpha = std::sqrt(2.0 / trace);
    Vector x0 = obj.minimizer();
    for (double& v : x0) v += alpha;
    return x0;
}

struct RunResult {
    std::vector<TraceRecord> records;
    std::optional<std::int64_t> nonfinite_k; // first step whose state went non-finite
};

inline RunResult run_trajectory(SchemeKind scheme, const ExperimentSpec& spec,
                                const QuadraticObjective& obj) {
    require(spec.budget >= 1, errc::invalid_argument, "budget must be >= 1");
    require(spec.stride >= 1, errc::invalid_argument, "stride must be >= 1");

    const Vector x0 = spec.x0 ? *spec.x0 : default_initial_point(obj);
    require(x0.size() == obj.dim(), errc::dimension_mismatch, "initial point");
    const double nesterov_step =
        spec.nesterov_step ? *spec.nesterov_step : 1.0 / obj.smoothness_constant();

    RunResult out;
    out.records.reserve(static_cast<std::size_t>(
        std::min<std::int64_t>(spec.budget / spec.stride + 2, 1 << 20)));

    IterateState state = make_initial_state(x0);
    auto record = [&](const IterateState& s) {
        out.records.push_back(TraceRecord{s.k, spec.params.delta * static_cast<double>(s.k),
                                          obj.suboptimality(s.x), norm(s.x - obj.minimizer())});
    };
    record(state);

    for (std::int64_t i = 1; i <= spec.budget; ++i) {
        switch (scheme) {
            case SchemeKind::Explicit:
                state = step_explicit(state, spec.params, obj);
                break;
            case SchemeKind::Implicit:
                state = step_implicit(state, spec.params, obj);
                break;
            case SchemeKind::ExplicitImplicit:
                state = step_explicit_implicit(state, spec.params, obj);
                break;
            case SchemeKind::NesterovC:
                state = nesterov_c_step(state, obj, nesterov_step);
                break;
            case SchemeKind::RungeKutta4: {
                const double t = spec.params.delta * static_cast<double>(state.k);
                auto [xn, zn] = rk4_step(t, state.x, state.z, spec.params, obj, spec.params.delta);
                state.x = std::move(xn);
                state.z = std::move(zn);
                ++state.k;
                break;
            }
        }
        bool finite = true;
        for (double v : state.x) finite = finite && std::isfinite(v);
        for (double v : state.z) finite = finite && std::isfinite(v);
        if (!finite) {
            out.nonfinite_k = state.k;
            break;
        }
        if ((state.k - 1) % spec.stride == 0 || i == spec.budget) record(state);
    }
    return out;
}

// Fires on the first record that (a) is non-finite, (b) exceeds
// max(initial gap, 1) * threshold, or (c) completes a strictly increasing
// window; for (c) the reported k is the window's first record, where the
// growth began.
inline DivergenceVerdict detect_divergence(const std::vector<TraceRecord>& trace,
                                           const DivergenceSettings& settings = {}) {
    if (trace.empty()) fail(errc::empty_trace, "detect_divergence");
    require(settings.window >= 2, errc::invalid_argument, "window must be >= 2");
    require(settings.gap_threshold > 0.0, errc::invalid_argument, "threshold must be positive");

    const double limit = std::max(trace.front().f_gap, 1.0) * settings.gap_threshold;
    std::int64_t run = 0;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const TraceRecord& r = trace[i];
        if (!std::isfinite(r.f_gap) || !std::isfinite(r.x_dist))
            return {true, r.k, DivergenceCriterion::NonFinite};
        if (r.f_gap > limit)
            return {true, r.k, DivergenceCriterion::GapExceedsInitial};
        if (i > 0 && r.f_gap > trace[i - 1].f_gap) {
            if (++run >= settings.window - 1)
                return {true, trace[i - static_cast<std::size_t>(settings.window - 1)].k,
                        DivergenceCriterion::MonotoneGrowthWindow};
        } else {
            run = 0;
        }
    }
    return {false, std::nullopt, std::nullopt};
}

// Least-squares slope of log(f_gap) vs log(t) on the running minimum
// within [t_lo, t_hi]; the running minimum suppresses the oscillation of
// the raw gap.
inline double fit_rate(const std::vector<TraceRecord>& trace, double t_lo, double t_hi) {
    require(t_lo > 0.0 && t_hi > t_lo, errc::invalid_argument, "bad fit window");
    if (t_hi < 10.0 * t_lo * (1.0 - 1e-12))
        fail(errc::window_too_narrow, "window must span at least one decade");

    double running = std::numeric_limits<double>::infinity();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::int64_t n = 0;
    for (const TraceRecord& r : trace) {
        if (r.t < t_lo || r.t > t_hi) continue;
        if (!(r.f_gap > 0.0)) fail(errc::non_positive_gap, "at t = " + format_double(r.t));
        running = std::min(running, r.f_gap);
        const double x = std::log(r.t);
        const double y = std::log(running);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 2) fail(errc::window_too_narrow, "fewer than two records in window");
    const double denom = static_cast<double>(n) * sxx - sx * sx;
    require(denom != 0.0, errc::window_too_narrow, "degenerate abscissa");
    return (static_cast<double>(n) * sxy - sx * sy) / denom;
}

struct TableCell {
    double p = 3.0;
    double L = 10.0;
    double delta = 0.01;
};

struct TableRow {
    double p = 0, L = 0, delta = 0, C = 1;
    double analytic_bound = 0;
    std::optional<std::int64_t> first_unstable_k;
    std::optional<std::int64_t> empirical_k;
    std::string status; // ok | skipped, -unguaranteed when delta >= 1/L
};

struct TableOptions {
    std::int64_t empirical_budget_limit = 200000;
    bool force_empirical = false;
    std::int64_t scan_k_max = 100000000;
    IndexConvention convention = IndexConvention::KPlusOne;
    DivergenceSettings detector;
};

// One row per (p, L, delta) cell: analytic bound, exact-scan onset, and an
// empirical verdict from a real 1-dim run when the budget permits. The
// largest eigenmode governs, so the 1-dim run with lambda = L is the
// d-dimensional answer.
inline std::vector<TableRow> reproduce_divergence_table(const std::vector<TableCell>& grid,
                                                        double C,
                                                        const TableOptions& opts = {}) {
    std::vector<TableRow> rows;
    rows.reserve(grid.size());
    for (const TableCell& cell : grid) {
        if (cell.p <= 2.0) fail(errc::order_too_low, "table rows require p > 2");
        const SchemeParams params(cell.p, C, cell.delta, opts.convention);

        TableRow row;
        row.p = cell.p;
        row.L = cell.L;
        row.delta = cell.delta;
        row.C = C;
        row.analytic_bound = divergence_bound_formula(params, cell.L);
        row.first_unstable_k = first_unstable_iteration(
            SchemeKind::ExplicitImplicit, params, cell.L, opts.scan_k_max, ScanStrategy::Bracket);

        const std::int64_t budget =
            static_cast<std::int64_t>(std::ceil(row.analytic_bound * 1.05)) + 2000;
        if (budget <= opts.empirical_budget_limit || opts.force_empirical) {
            ExperimentSpec spec;
            spec.params = params;
            spec.budget = budget;
            spec.detector = opts.detector;
            const QuadraticObjective obj(Matrix::diagonal({cell.L}), {0.0});
            const RunResult run = run_trajectory(SchemeKind::ExplicitImplicit, spec, obj);
            row.empirical_k = detect_divergence(run.records, opts.detector).empirical_k;
            row.status = "ok";
        } else {
            row.status = "skipped";
        }
        if (params.step_assumption_violated(cell.L)) row.status += "-unguaranteed";
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::vector<TableCell> default_table_grid() {
    std::vector<TableCell> grid;
    for (double p : {3.0, 4.0})
        for (double L : {10.0, 100.0})
            for (double delta : {0.01, 0.001}) grid.push_back({p, L, delta});
    return grid;
}

struct LabeledTrace {
    std::string label;
    std::vector<TraceRecord> records;
};

// Aligned runs of every requested scheme on a shared objective, budget,
// and stride, the Nesterov-C baseline always included, plus the dense ODE
// reference when asked for.
inline std::vector<LabeledTrace> compare_schemes(const ExperimentSpec& spec,
                                                 const QuadraticObjective& obj) {
    std::vector<LabeledTrace> out;
    bool have_nesterov = false;
    for (SchemeKind scheme : spec.schemes) {
        have_nesterov = have_nesterov || scheme == SchemeKind::NesterovC;
        out.push_back({to_string(scheme), run_trajectory(scheme, spec, obj).records});
    }
    if (!have_nesterov)
        out.push_back({to_string(SchemeKind::NesterovC),
                       run_trajectory(SchemeKind::NesterovC, spec, obj).records});

    if (spec.include_reference) {
        const Vector x0 = spec.x0 ? *spec.x0 : default_initial_point(obj);
        const double fine = spec.reference_fine_step ? *spec.reference_fine_step
                                                     : spec.params.delta / 20.0;
        std::vector<double> times;
        for (std::int64_t k = 1; k <= spec.budget + 1; ++k)
            if ((k - 1) % spec.stride == 0 || k == spec.budget + 1)
                times.push_back(spec.params.delta * static_cast<double>(k));
        const double t0 = spec.params.delta;
        auto samples = reference_ode_solve(spec.params, obj, x0, t0, times.back(), fine, times);
        LabeledTrace ref{"reference", {}};
        ref.records.reserve(samples.size());
        for (const OdeSample& s : samples) {
            const std::int64_t k = static_cast<std::int64_t>(std::llround(s.t / spec.params.delta));
            ref.records.push_back(
                TraceRecord{k, s.t, obj.suboptimality(s.x), norm(s.x - obj.minimizer())});
        }
        out.push_back(std::move(ref));
    }
    return out;
}

// ---- CSV schemas ----

inline void write_trace_csv(const std::vector<TraceRecord>& trace, std::ostream& out) {
    out << "k,t,f_gap,x_dist\n";
    for (const TraceRecord& r : trace)
        out << r.k << "," << format_double(r.t) << "," << format_double(r.f_gap) << ","
            << format_double(r.x_dist) << "\n";
}

inline std::vector<TraceRecord> parse_trace_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "k,t,f_gap,x_dist")
        fail(errc::io_failure, "trace csv: bad header");
    std::vector<TraceRecord> trace;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split(line, ',');
        if (cells.size() != 4) fail(errc::io_failure, "trace csv: bad row " + line);
        trace.push_back(TraceRecord{std::stoll(cells[0]), parse_double(cells[1]),
                                    parse_double(cells[2]), parse_double(cells[3])});
    }
    return trace;
}

inline void write_table_csv(const std::vector<TableRow>& rows, std::ostream& out) {
    out << "p,L,delta,C,analytic_bound,first_unstable_k,empirical_k,status\n";
    for (const TableRow& r : rows) {
        out << format_double(r.p) << "," << format_double(r.L) << "," << format_double(r.delta)
            << "," << format_double(r.C) << "," << format_double(r.analytic_bound) << ",";
        if (r.first_unstable_k) out << *r.first_unstable_k;
        out << ",";
        if (r.empirical_k) out << *r.empirical_k;
        out << "," << r.status << "\n";
    }
}

inline std::vector<TableRow> parse_table_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) ||
        line != "p,L,delta,C,analytic_bound,first_unstable_k,empirical_k,status")
        fail(errc::io_failure, "table csv: bad header");
    std::vector<TableRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split(line, ',');
        if (cells.size() != 8) fail(errc::io_failure, "table csv: bad row " + line);
        TableRow r;
        r.p = parse_double(cells[0]);
        r.L = parse_double(cells[1]);
        r.delta = parse_double(cells[2]);
        r.C = parse_double(cells[3]);
        r.analytic_bound = parse_double(cells[4]);
        if (!cells[5].empty()) r.first_unstable_k = std::stoll(cells[5]);
        if (!cells[6].empty()) r.empirical_k = std::stoll(cells[6]);
        r.status = cells[7];
        rows.push_back(std::move(r));
    }
    return rows;
}

// Aligned multi-series table: one k column, one f_gap column per series.
struct CompareTable {
    std::vector<std::string> labels;
    std::vector<std::int64_t> ks;
    std::vector<std::vector<std::optional<double>>> cells; // cells[row][series]
};

inline CompareTable align_traces(const std::vector<LabeledTrace>& traces) {
    CompareTable table;
    std::vector<std::int64_t> ks;
    for (const LabeledTrace& t : traces) {
        table.labels.push_back(t.label);
        for (const TraceRecord& r : t.records) ks.push_back(r.k);
    }
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    table.ks = ks;
    table.cells.assign(ks.size(), std::vector<std::optional<double>>(traces.size()));
    for (std::size_t s = 0; s < traces.size(); ++s) {
        for (const TraceRecord& r : traces[s].records) {
            const auto it = std::lower_bound(ks.begin(), ks.end(), r.k);
            table.cells[static_cast<std::size_t>(it - ks.begin())][s] = r.f_gap;
        }
    }
    return table;
}

inline void write_compare_csv(const CompareTable& table, std::ostream& out) {
    out << "k";
    for (const std::string& label : table.labels) out << "," << label;
    out << "\n";
    for (std::size_t i = 0; i < table.ks.size(); ++i) {
        out << table.ks[i];
        for (const auto& cell : table.cells[i]) {
            out << ",";
            if (cell) out << format_double(*cell);
        }
        out << "\n";
    }
}

inline CompareTable parse_compare_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) fail(errc::io_failure, "compare csv: empty");
    auto header = split(line, ',');
    if (header.size() < 2 || header[0] != "k") fail(errc::io_failure, "compare csv: bad header");
    CompareTable table;
    table.labels.assign(header.begin() + 1, header.end());
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split(line, ',');
        if (cells.size() != header.size()) fail(errc::io_failure, "compare csv: ragged row");
        table.ks.push_back(std::stoll(cells[0]));
        std::vector<std::optional<double>> row;
        for (std::size_t i = 1; i < cells.size(); ++i)
            row.push_back(cells[i].empty() ? std::optional<double>{}
                                           : std::optional<double>{parse_double(cells[i])});
        table.cells.push_back(std::move(row));
    }
    return table;
}

} // namespace eulag
