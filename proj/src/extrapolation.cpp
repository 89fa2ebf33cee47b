#include "sectorcalc/extrapolation.hpp"

#include <limits>

namespace sectorcalc {

LimitResult extrapolate_to_zero(const std::vector<Matrix>& values, const std::vector<double>& h) {
    if (values.empty() || values.size() != h.size()) throw DomainError("extrapolate_to_zero: need matching, non-empty samples");
    const std::size_t n = values.size();
    std::vector<Matrix> col = values;
    LimitResult r;
    r.diagonal.push_back(values[0]);
    for (std::size_t m = 1; m < n; ++m) {
        // col[i] holds the interpolant through samples i..i+m-1 evaluated at 0
        for (std::size_t i = 0; i + m < n; ++i) {
            const double denom = h[i] - h[i + m];
            if (denom == 0.0) throw DomainError("extrapolate_to_zero: repeated abscissa");
            col[i] = (h[i] * col[i + 1] - h[i + m] * col[i]) / denom;
        }
        r.diagonal.push_back(col[0]);
    }
    r.value = r.diagonal.back();
    r.error_estimate = n > 1 ? std::numeric_limits<double>::infinity() : 0.0;
    for (std::size_t i = 1; i < r.diagonal.size(); ++i) {
        const double d = (r.diagonal[i] - r.diagonal[i - 1]).norm();
        if (d < r.error_estimate) {
            r.error_estimate = d;
            r.value = r.diagonal[i];
        }
    }
    return r;
}

}  // namespace sectorcalc
