#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "eulag/errors.hpp"
#include "eulag/objective.hpp"

namespace eulag {

enum class SchemeKind {
    Explicit,
    Implicit,
    ExplicitImplicit,
    RungeKutta4,
    NesterovC,
};

inline bool has_matrix_form(SchemeKind k) {
    return k == SchemeKind::Explicit || k == SchemeKind::Implicit ||
           k == SchemeKind::ExplicitImplicit;
}

inline const char* to_string(SchemeKind k) {
    switch (k) {
        case SchemeKind::Explicit: return "explicit";
        case SchemeKind::Implicit: return "implicit";
        case SchemeKind::ExplicitImplicit: return "explicit-implicit";
        case SchemeKind::RungeKutta4: return "rk4";
        case SchemeKind::NesterovC: return "nesterov";
    }
    return "?";
}

inline std::optional<SchemeKind> scheme_from_string(const std::string& s) {
    if (s == "explicit") return SchemeKind::Explicit;
    if (s == "implicit") return SchemeKind::Implicit;
    if (s == "explicit-implicit") return SchemeKind::ExplicitImplicit;
    if (s == "rk4") return SchemeKind::RungeKutta4;
    if (s == "nesterov") return SchemeKind::NesterovC;
    return std::nullopt;
}

// The explicit-implicit z-update can index the gradient weight by the new
// iterate (k+1, the matrix form) or the old one (k, the scalar form). The
// two differ by at most a couple of iterations in every divergence
// prediction; the matrix form is the default.
enum class IndexConvention { KPlusOne, K };

// (p, C, delta) of the underlying second-order equation. epsilon = delta^p
// is always derived, never stored.
struct SchemeParams {
    double p = 2.0;
    double C = 1.0;
    double delta = 0.01;
    IndexConvention convention = IndexConvention::KPlusOne;

    SchemeParams() = default;
    SchemeParams(double p_, double C_, double delta_,
                 IndexConvention conv = IndexConvention::KPlusOne)
        : p(p_), C(C_), delta(delta_), convention(conv) {
        require(p >= 2.0, errc::invalid_argument, "order p must be >= 2");
        require(C > 0.0, errc::invalid_argument, "constant C must be positive");
        require(delta > 0.0, errc::invalid_argument, "step size delta must be positive");
    }

    double epsilon() const { return std::pow(delta, p); }

    // Theorem precondition C < 1/(epsilon L); callers warn when violated.
    bool constant_assumption_violated(double smoothness) const {
        return C >= 1.0 / (epsilon() * smoothness);
    }
    bool step_assumption_violated(double smoothness) const { return delta >= 1.0 / smoothness; }

    // Gradient weight for the step k -> k+1 under the active convention.
    double z_weight(std::int64_t k) const {
        const double base =
            convention == IndexConvention::KPlusOne ? static_cast<double>(k + 1)
                                                    : static_cast<double>(k);
        return C * p * epsilon() * std::pow(base, p - 1.0);
    }
};

struct IterateState {
    std::int64_t k = 1;
    Vector x;
    Vector z;
};

inline IterateState make_initial_state(const Vector& x0, std::int64_t k0 = 1) {
    return IterateState{k0, x0, x0};
}

// x_{k+1} = x_k + (p/k)(z_k - x_k);  z_{k+1} = z_k - C p eps k^{p-1} grad f(x_k)
inline IterateState step_explicit(const IterateState& s, const SchemeParams& params,
                                  const QuadraticObjective& obj) {
    require(s.k >= 1, errc::zero_time, "explicit step at k = 0");
    const double a = params.p / static_cast<double>(s.k);
    const double w = params.C * params.p * params.epsilon() *
                     std::pow(static_cast<double>(s.k), params.p - 1.0);
    IterateState out;
    out.k = s.k + 1;
    out.x = axpy(a, s.z - s.x, s.x);
    out.z = axpy(-w, obj.gradient(s.x), s.z);
    return out;
}

// x updates from the old pair, z from the freshly computed x.
inline IterateState step_explicit_implicit(const IterateState& s, const SchemeParams& params,
                                           const QuadraticObjective& obj) {
    require(s.k >= 1, errc::zero_time, "explicit-implicit step at k = 0");
    const double a = params.p / static_cast<double>(s.k);
    IterateState out;
    out.k = s.k + 1;
    out.x = axpy(a, s.z - s.x, s.x);
    out.z = axpy(-params.z_weight(s.k), obj.gradient(out.x), s.z);
    return out;
}

// Solves the implicit pair exactly via the cached eigendecomposition: in
// each mode, (x~, z) advances by the inverse of
//   N_k = [ (k+p)/k   -p/k ]
//         [ C p eps k^{p-1} D_i   1 ].
inline IterateState step_implicit(const IterateState& s, const SchemeParams& params,
                                  const QuadraticObjective& obj) {
    require(s.k >= 1, errc::zero_time, "implicit step at k = 0");
    const double kd = static_cast<double>(s.k);
    const double a11 = (kd + params.p) / kd;
    const double a12 = -params.p / kd;
    const double w = params.C * params.p * params.epsilon() * std::pow(kd, params.p - 1.0);

    Vector xt = obj.to_eigenbasis(s.x);
    Vector zt = obj.eigen().basis.apply_transposed(s.z - obj.minimizer());
    const Vector& lams = obj.eigen().eigenvalues;
    for (std::size_t i = 0; i < xt.size(); ++i) {
        const double a21 = w * lams[i];
        const double det = a11 - a12 * a21;
        if (std::abs(det) < 1e-14) fail(errc::singular_system, "|det N_k| below 1e-14");
        const double xi = (xt[i] - a12 * zt[i]) / det;
        const double zi = (a11 * zt[i] - a21 * xt[i]) / det;
        xt[i] = xi;
        zt[i] = zi;
    }
    IterateState out;
    out.k = s.k + 1;
    out.x = obj.from_eigenbasis(xt);
    out.z = obj.eigen().basis.apply(zt) + obj.minimizer();
    return out;
}

// Momentum (k-1)/(k+2) with a plain gradient step; the convex-function
// baseline, not part of the discretization family.
inline IterateState nesterov_c_step(const IterateState& s, const QuadraticObjective& obj,
                                    double step_size) {
    require(step_size > 0.0, errc::invalid_argument, "nesterov step must be positive");
    require(step_size <= 1.0 / obj.smoothness_constant() + 1e-15, errc::invalid_argument,
            "nesterov step must be <= 1/L");
    const double kd = static_cast<double>(s.k);
    const double mom = (kd - 1.0) / (kd + 2.0);
    Vector y = axpy(mom, s.x - s.z, s.x); // z holds the previous iterate
    Vector xn = axpy(-step_size, obj.gradient(y), y);
    IterateState out;
    out.k = s.k + 1;
    out.z = s.x;
    out.x = std::move(xn);
    return out;
}

// First-order system of the underlying ODE:
//   dx/dt = (p/t)(z - x),  dz/dt = -C p t^{p-1} grad f(x)
struct OdeField {
    const SchemeParams& params;
    const QuadraticObjective& obj;

    void eval(double t, const Vector& x, const Vector& z, Vector& fx, Vector& fz) const {
        if (t <= 0.0) fail(errc::singular_time, "field requested at t <= 0");
        const double a = params.p / t;
        const double w = params.C * params.p * std::pow(t, params.p - 1.0);
        Vector g = obj.gradient(x);
        fx.resize(x.size());
        fz.resize(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            fx[i] = a * (z[i] - x[i]);
            fz[i] = -w * g[i];
        }
    }
};

// Classical four-stage step; every stage time must stay positive.
inline std::pair<Vector, Vector> rk4_step(double t, const Vector& x, const Vector& z,
                                          const SchemeParams& params,
                                          const QuadraticObjective& obj, double h) {
    require(t > 0.0 && t + h > 0.0, errc::singular_time, "rk4 step straddles t = 0");
    OdeField f{params, obj};
    Vector k1x, k1z, k2x, k2z, k3x, k3z, k4x, k4z;
    f.eval(t, x, z, k1x, k1z);
    f.eval(t + 0.5 * h, axpy(0.5 * h, k1x, x), axpy(0.5 * h, k1z, z), k2x, k2z);
    f.eval(t + 0.5 * h, axpy(0.5 * h, k2x, x), axpy(0.5 * h, k2z, z), k3x, k3z);
    f.eval(t + h, axpy(h, k3x, x), axpy(h, k3z, z), k4x, k4z);

    Vector xn = x;
    Vector zn = z;
    const double w = h / 6.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        xn[i] += w * (k1x[i] + 2.0 * (k2x[i] + k3x[i]) + k4x[i]);
        zn[i] += w * (k1z[i] + 2.0 * (k2z[i] + k3z[i]) + k4z[i]);
    }
    return {std::move(xn), std::move(zn)};
}

struct OdeSample {
    double t;
    Vector x;
    Vector z;
};

// Dense fixed-step RK4 solve of the continuous system from
// (x(t0), z(t0)) = (x0, x0), landing exactly on each requested sample time
// with one shortened step. Serves as the "exact" ODE curve.
inline std::vector<OdeSample> reference_ode_solve(const SchemeParams& params,
                                                  const QuadraticObjective& obj,
                                                  const Vector& x0, double t0, double t_end,
                                                  double fine_step,
                                                  std::span<const double> sample_times) {
    require(t0 > 0.0, errc::singular_time, "reference solve must start at t > 0");
    require(fine_step > 0.0, errc::invalid_argument, "fine_step must be positive");
    require(fine_step <= params.delta / 10.0 + 1e-15, errc::invalid_argument,
            "fine_step must be <= delta/10");
    require(t_end >= t0, errc::invalid_argument, "t_end before t0");

    std::vector<OdeSample> out;
    out.reserve(sample_times.size());
    double t = t0;
    Vector x = x0;
    Vector z = x0;
    for (double target : sample_times) {
        require(target >= t - 1e-12 && target <= t_end + 1e-12, errc::invalid_argument,
                "sample times must be ascending within [t0, t_end]");
        while (t + fine_step <= target - 1e-12 * std::max(1.0, target)) {
            std::tie(x, z) = rk4_step(t, x, z, params, obj, fine_step);
            t += fine_step;
        }
        if (target > t) {
            std::tie(x, z) = rk4_step(t, x, z, params, obj, target - t);
            t = target;
        }
        out.push_back(OdeSample{t, x, z});
    }
    return out;
}

} // namespace eulag
