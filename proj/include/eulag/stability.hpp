#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "eulag/errors.hpp"
#include "eulag/io.hpp"
#include "eulag/schemes.hpp"

namespace eulag {

// Per-eigenmode 2x2 transition matrix advancing (x~_i, z_i) from step k to
// k+1, together with the scalars a_k, b_k it was built from.
struct ModeMatrix {
    double m11 = 0, m12 = 0, m21 = 0, m22 = 0;
    double a_k = 0; // p/k
    double b_k = 0; // gradient weight times the mode eigenvalue
    std::int64_t k = 0;
    SchemeKind scheme = SchemeKind::ExplicitImplicit;

    double trace() const { return m11 + m22; }
    double det() const { return m11 * m22 - m12 * m21; }
};

inline ModeMatrix transition_matrix(SchemeKind kind, std::int64_t k, const SchemeParams& params,
                                    double mode_eigenvalue) {
    require(k >= 1, errc::zero_time, "transition matrix at k = 0");
    require(mode_eigenvalue > 0.0, errc::invalid_argument, "mode eigenvalue must be positive");
    const double kd = static_cast<double>(k);
    const double a = params.p / kd;

    ModeMatrix m;
    m.k = k;
    m.scheme = kind;
    m.a_k = a;
    switch (kind) {
        case SchemeKind::Explicit: {
            const double b = params.C * params.p * params.epsilon() * std::pow(kd, params.p - 1.0) *
                             mode_eigenvalue;
            m.b_k = b;
            m.m11 = (kd - params.p) / kd;
            m.m12 = a;
            m.m21 = -b;
            m.m22 = 1.0;
            return m;
        }
        case SchemeKind::ExplicitImplicit: {
            const double b = params.z_weight(k) * mode_eigenvalue;
            m.b_k = b;
            m.m11 = 1.0 - a;
            m.m12 = a;
            m.m21 = -b * (1.0 - a);
            m.m22 = 1.0 - a * b;
            return m;
        }
        case SchemeKind::Implicit: {
            // Closed-form inverse of N_k.
            const double b = params.C * params.p * params.epsilon() * std::pow(kd, params.p - 1.0) *
                             mode_eigenvalue;
            m.b_k = b;
            const double n11 = (kd + params.p) / kd;
            const double n12 = -a;
            const double det = n11 - n12 * b;
            if (std::abs(det) < 1e-14) fail(errc::singular_system, "|det N_k| below 1e-14");
            m.m11 = 1.0 / det;
            m.m12 = a / det;
            m.m21 = -b / det;
            m.m22 = n11 / det;
            return m;
        }
        default:
            fail(errc::no_matrix_form, std::string(to_string(kind)) + " scheme");
    }
}

struct Complex2x2Eigs {
    std::complex<double> lambda1; // + branch of the quadratic formula
    std::complex<double> lambda2;
    double discriminant = 0.0;
};

inline Complex2x2Eigs eig2x2(const ModeMatrix& m) {
    const double tr = m.trace();
    const double dt = m.det();
    const double disc = tr * tr - 4.0 * dt;
    Complex2x2Eigs out;
    out.discriminant = disc;
    if (disc >= 0.0) {
        const double r = std::sqrt(disc);
        out.lambda1 = {(tr + r) / 2.0, 0.0};
        out.lambda2 = {(tr - r) / 2.0, 0.0};
    } else {
        const double im = std::sqrt(-disc) / 2.0;
        out.lambda1 = {tr / 2.0, im};
        out.lambda2 = {tr / 2.0, -im};
    }
    return out;
}

// hypot keeps the magnitude finite even when entries have grown huge.
inline double spectral_radius(const ModeMatrix& m) {
    const Complex2x2Eigs e = eig2x2(m);
    const double r1 = std::hypot(e.lambda1.real(), e.lambda1.imag());
    const double r2 = std::hypot(e.lambda2.real(), e.lambda2.imag());
    return std::max(r1, r2);
}

enum class LimitClass { Converging, Stable, Diverging };

inline const char* to_string(LimitClass c) {
    switch (c) {
        case LimitClass::Converging: return "converging";
        case LimitClass::Stable: return "stable";
        case LimitClass::Diverging: return "diverging";
    }
    return "?";
}

inline std::optional<LimitClass> limit_class_from_string(const std::string& s) {
    if (s == "converging") return LimitClass::Converging;
    if (s == "stable") return LimitClass::Stable;
    if (s == "diverging") return LimitClass::Diverging;
    return std::nullopt;
}

// End behavior of R(M_k) as k grows: explicit always diverges, implicit
// always converges, explicit-implicit is stable at p = 2 (given
// c = 4 C eps lambda < 4) and diverging for p > 2.
inline LimitClass limit_classification(SchemeKind scheme, const SchemeParams& params,
                                       double mode_eigenvalue) {
    require(mode_eigenvalue > 0.0, errc::invalid_argument, "mode eigenvalue must be positive");
    switch (scheme) {
        case SchemeKind::Explicit:
            return LimitClass::Diverging;
        case SchemeKind::Implicit:
            return LimitClass::Converging;
        case SchemeKind::ExplicitImplicit: {
            if (params.p == 2.0) {
                const double c = 4.0 * params.C * params.epsilon() * mode_eigenvalue;
                if (c >= 4.0)
                    fail(errc::assumption_violated, "p = 2 requires c = 4 C eps lambda < 4");
                return LimitClass::Stable;
            }
            return LimitClass::Diverging;
        }
        default:
            fail(errc::no_matrix_form, std::string(to_string(scheme)) + " scheme");
    }
}

// (4 / (C L p^2 eps))^(1/(p-2)), no precondition checks. The published
// tables include rows with delta = 1/L exactly, which the checked variant
// rejects.
inline double divergence_bound_formula(const SchemeParams& params, double smoothness) {
    return std::pow(4.0 / (params.C * smoothness * params.p * params.p * params.epsilon()),
                    1.0 / (params.p - 2.0));
}

inline double divergence_bound(const SchemeParams& params, double smoothness) {
    require(smoothness > 0.0, errc::invalid_argument, "smoothness constant must be positive");
    if (params.p <= 2.0) fail(errc::order_too_low, "bound undefined at p = 2");
    if (params.constant_assumption_violated(smoothness))
        fail(errc::assumption_violated, "requires C < 1/(eps L)");
    if (params.step_assumption_violated(smoothness))
        fail(errc::assumption_violated, "requires delta < 1/L");
    return divergence_bound_formula(params, smoothness);
}

enum class ScanStrategy { Linear, Bracket };

// Smallest integer k in (p, k_max] with R(M_k) > 1. The bracketed variant
// doubles until the predicate flips, then bisects; valid because R(M_k) > 1
// is a step predicate beyond the warm-up region k <= p.
inline std::optional<std::int64_t> first_unstable_iteration(SchemeKind scheme,
                                                            const SchemeParams& params,
                                                            double mode_eigenvalue,
                                                            std::int64_t k_max,
                                                            ScanStrategy strategy = ScanStrategy::Linear) {
    require(has_matrix_form(scheme), errc::no_matrix_form, "first unstable iteration");
    const std::int64_t k_first = static_cast<std::int64_t>(std::floor(params.p)) + 1;
    require(k_max >= k_first, errc::invalid_argument, "k_max must exceed p");

    auto unstable = [&](std::int64_t k) {
        return spectral_radius(transition_matrix(scheme, k, params, mode_eigenvalue)) > 1.0;
    };

    if (strategy == ScanStrategy::Linear) {
        for (std::int64_t k = k_first; k <= k_max; ++k)
            if (unstable(k)) return k;
        return std::nullopt;
    }

    if (unstable(k_first)) return k_first;
    std::int64_t lo = k_first; // known stable
    std::int64_t hi = k_first;
    while (true) {
        hi = std::min(hi * 2, k_max);
        if (unstable(hi)) break;
        lo = hi;
        if (hi == k_max) return std::nullopt;
    }
    while (hi - lo > 1) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (unstable(mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

struct ClaimViolation {
    std::int64_t k = 0;
    std::string what;
};

struct ClaimScanReport {
    std::int64_t checked = 0;
    std::vector<ClaimViolation> violations;
    bool ok() const { return violations.empty(); }
};

// Checks, at every k in [k_lo, k_hi], that divergence of the
// explicit-implicit matrices only ever occurs with real eigenvalues and
// -a_k b_k - a_k + 2 < 0, and that the complex regime has radius exactly
// sqrt(1 - p/k). A violation is a test failure, not a runtime condition.
inline ClaimScanReport verify_claims(const SchemeParams& params, double mode_eigenvalue,
                                     std::int64_t k_lo, std::int64_t k_hi) {
    if (params.p <= 2.0) fail(errc::order_too_low, "claims assume p > 2");
    require(static_cast<double>(k_lo) > params.p, errc::invalid_argument,
            "claim scan range must start above p");
    require(k_hi >= k_lo, errc::invalid_argument, "empty claim scan range");

    ClaimScanReport report;
    for (std::int64_t k = k_lo; k <= k_hi; ++k) {
        const ModeMatrix m = transition_matrix(SchemeKind::ExplicitImplicit, k, params,
                                               mode_eigenvalue);
        const Complex2x2Eigs e = eig2x2(m);
        const double radius = spectral_radius(m);
        ++report.checked;

        if (e.discriminant <= 0.0) {
            const double expected = std::sqrt(1.0 - m.a_k);
            if (std::abs(radius - expected) > 1e-12 || radius >= 1.0)
                report.violations.push_back(
                    {k, "complex regime radius " + format_double(radius) + " != sqrt(1-p/k)"});
        } else if (2.0 - m.a_k - m.a_k * m.b_k > 0.0) {
            const double r1 = std::abs(e.lambda1.real());
            if (r1 > 1.0 + 1e-12)
                report.violations.push_back(
                    {k, "|lambda1| = " + format_double(r1) + " > 1 in lambda1-dominant regime"});
        }
        if (radius > 1.0 &&
            !(e.discriminant > 0.0 && 2.0 - m.a_k - m.a_k * m.b_k < 0.0))
            report.violations.push_back(
                {k, "divergence outside the real lambda2-dominant regime"});
    }
    return report;
}

// Radius of the frozen-k limit matrices from the end-behavior analysis,
// with c = C p^2 eps k^{p-2} lambda.
inline double asymptotic_radius(SchemeKind scheme, const SchemeParams& params,
                                double mode_eigenvalue, std::int64_t k) {
    require(k >= 1, errc::zero_time, "asymptotic radius at k = 0");
    require(mode_eigenvalue > 0.0, errc::invalid_argument, "mode eigenvalue must be positive");
    const double c = params.C * params.p * params.p * params.epsilon() *
                     std::pow(static_cast<double>(k), params.p - 2.0) * mode_eigenvalue;
    switch (scheme) {
        case SchemeKind::Implicit:
            return 1.0 / std::sqrt(1.0 + c);
        case SchemeKind::Explicit:
            return std::sqrt(1.0 + c);
        case SchemeKind::ExplicitImplicit: {
            // roots of l^2 + l(c-2) + 1
            if (c <= 4.0) return 1.0;
            return (c - 2.0 + std::sqrt(c * c - 4.0 * c)) / 2.0;
        }
        default:
            fail(errc::no_matrix_form, std::string(to_string(scheme)) + " scheme");
    }
}

struct StabilityReport {
    SchemeKind scheme = SchemeKind::ExplicitImplicit;
    SchemeParams params;
    double mode_eigenvalue = 1.0;
    std::vector<std::pair<std::int64_t, double>> per_k;
    LimitClass limit_class = LimitClass::Stable;
    std::optional<double> analytic_bound;
    std::optional<std::int64_t> first_unstable_k;
};

inline StabilityReport make_stability_report(SchemeKind scheme, const SchemeParams& params,
                                             double mode_eigenvalue, std::int64_t k_lo,
                                             std::int64_t k_hi, std::int64_t stride = 1,
                                             ScanStrategy strategy = ScanStrategy::Linear) {
    require(has_matrix_form(scheme), errc::no_matrix_form, "stability report");
    require(k_lo >= 1 && k_hi >= k_lo, errc::invalid_argument, "bad report range");
    require(stride >= 1, errc::invalid_argument, "stride must be >= 1");

    StabilityReport rep;
    rep.scheme = scheme;
    rep.params = params;
    rep.mode_eigenvalue = mode_eigenvalue;
    rep.limit_class = limit_classification(scheme, params, mode_eigenvalue);
    if (scheme == SchemeKind::ExplicitImplicit && params.p > 2.0)
        rep.analytic_bound = divergence_bound_formula(params, mode_eigenvalue);

    for (std::int64_t k = k_lo; k <= k_hi; k += stride)
        rep.per_k.emplace_back(k, spectral_radius(transition_matrix(scheme, k, params,
                                                                    mode_eigenvalue)));
    if (rep.per_k.empty() || rep.per_k.back().first != k_hi)
        rep.per_k.emplace_back(k_hi, spectral_radius(transition_matrix(scheme, k_hi, params,
                                                                       mode_eigenvalue)));

    const std::int64_t k_first = static_cast<std::int64_t>(std::floor(params.p)) + 1;
    if (k_hi >= k_first)
        rep.first_unstable_k =
            first_unstable_iteration(scheme, params, mode_eigenvalue, k_hi, strategy);
    return rep;
}

inline void write_stability_csv(const StabilityReport& rep, std::ostream& out) {
    out << "# scheme=" << to_string(rep.scheme) << " p=" << format_double(rep.params.p)
        << " C=" << format_double(rep.params.C) << " delta=" << format_double(rep.params.delta)
        << " L=" << format_double(rep.mode_eigenvalue) << " analytic_bound="
        << (rep.analytic_bound ? format_double(*rep.analytic_bound) : std::string("none"))
        << " first_unstable_k="
        << (rep.first_unstable_k ? std::to_string(*rep.first_unstable_k) : std::string("none"))
        << " limit_class=" << to_string(rep.limit_class) << "\n";
    out << "k,spectral_radius\n";
    for (const auto& [k, r] : rep.per_k) out << k << "," << format_double(r) << "\n";
}

inline StabilityReport parse_stability_csv(std::istream& in, IndexConvention convention =
                                                                 IndexConvention::KPlusOne) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("# ", 0) != 0)
        fail(errc::io_failure, "stability csv: missing metadata line");

    StabilityReport rep;
    double p = 0, C = 0, delta = 0;
    for (const std::string& tok : split(line.substr(2), ' ')) {
        const auto kv = split(tok, '=');
        if (kv.size() != 2) fail(errc::io_failure, "stability csv: bad metadata token " + tok);
        const std::string& key = kv[0];
        const std::string& val = kv[1];
        if (key == "scheme") {
            auto s = scheme_from_string(val);
            if (!s) fail(errc::io_failure, "stability csv: unknown scheme " + val);
            rep.scheme = *s;
        } else if (key == "p") {
            p = parse_double(val);
        } else if (key == "C") {
            C = parse_double(val);
        } else if (key == "delta") {
            delta = parse_double(val);
        } else if (key == "L") {
            rep.mode_eigenvalue = parse_double(val);
        } else if (key == "analytic_bound") {
            if (val != "none") rep.analytic_bound = parse_double(val);
        } else if (key == "first_unstable_k") {
            if (val != "none") rep.first_unstable_k = std::stoll(val);
        } else if (key == "limit_class") {
            auto c = limit_class_from_string(val);
            if (!c) fail(errc::io_failure, "stability csv: unknown limit class " + val);
            rep.limit_class = *c;
        } else {
            fail(errc::io_failure, "stability csv: unknown metadata key " + key);
        }
    }
    rep.params = SchemeParams(p, C, delta, convention);

    if (!std::getline(in, line) || line != "k,spectral_radius")
        fail(errc::io_failure, "stability csv: missing column header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split(line, ',');
        if (cells.size() != 2) fail(errc::io_failure, "stability csv: bad row " + line);
        rep.per_k.emplace_back(std::stoll(cells[0]), parse_double(cells[1]));
    }
    return rep;
}

} // namespace eulag
