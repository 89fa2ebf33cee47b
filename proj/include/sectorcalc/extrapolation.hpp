#pragma once

#include <vector>

#include "sectorcalc/types.hpp"

namespace sectorcalc {

struct LimitResult {
    Matrix value;
    double error_estimate = 0.0;
    /// Diagonal of the Neville table, one entry per sample.
    std::vector<Matrix> diagonal;
};

/// Polynomial (Neville) extrapolation of samples v_i = v(h_i) to h = 0.  The returned value is the
/// diagonal entry with the smallest successive difference, which guards against late round-off growth.
LimitResult extrapolate_to_zero(const std::vector<Matrix>& values, const std::vector<double>& h);

}  // namespace sectorcalc
