#pragma once

#include <stdexcept>
#include <string>

namespace eulag {

enum class errc {
    dimension_mismatch,
    non_symmetric,
    not_positive_definite,
    convergence_failure,
    zero_time,
    singular_time,
    singular_system,
    no_matrix_form,
    order_too_low,
    assumption_violated,
    empty_trace,
    non_positive_gap,
    window_too_narrow,
    invalid_argument,
    io_failure,
};

inline const char* to_string(errc c) {
    switch (c) {
        case errc::dimension_mismatch: return "dimension mismatch";
        case errc::non_symmetric: return "matrix not symmetric";
        case errc::not_positive_definite: return "matrix not positive definite";
        case errc::convergence_failure: return "eigensolver failed to converge";
        case errc::zero_time: return "time grid singular at k = 0";
        case errc::singular_time: return "vector field evaluated at t <= 0";
        case errc::singular_system: return "implicit system singular";
        case errc::no_matrix_form: return "scheme has no transition-matrix form";
        case errc::order_too_low: return "requires order p > 2";
        case errc::assumption_violated: return "parameter assumption violated";
        case errc::empty_trace: return "trace is empty";
        case errc::non_positive_gap: return "nonpositive suboptimality in fit window";
        case errc::window_too_narrow: return "fit window narrower than one decade";
        case errc::invalid_argument: return "invalid argument";
        case errc::io_failure: return "i/o failure";
    }
    return "unknown error";
}

class error : public std::runtime_error {
public:
    error(errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

inline void require(bool ok, errc code, const std::string& what) {
    if (!ok) fail(code, what);
}

} // namespace eulag
