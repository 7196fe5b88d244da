#pragma once

#include "barfi/param.hpp"
#include "barfi/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace barfi::testing {

inline ParamVector random_vector(std::size_t n, Rng& rng, double scale = 1.0) {
    ParamVector out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = scale * rng.normal();
    return out;
}

/// Central differences of a scalar function of a parameter vector.
inline ParamVector fd_gradient(const std::function<double(const ParamVector&)>& f, const ParamVector& x,
                               double h = 1e-6) {
    ParamVector g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        ParamVector up = x, down = x;
        up[i] += h;
        down[i] -= h;
        g[i] = (f(up) - f(down)) / (2.0 * h);
    }
    return g;
}

inline double max_abs_diff(const ParamVector& a, const ParamVector& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

/// |a - b|_inf / max(|b|_inf, floor)
inline double rel_diff(const ParamVector& a, const ParamVector& b, double floor = 1e-12) {
    return max_abs_diff(a, b) / std::max(b.norm_inf(), floor);
}

}  // namespace barfi::testing
