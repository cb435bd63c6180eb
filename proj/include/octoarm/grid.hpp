#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

namespace octoarm {

/// Uniform grid s_i = i * L / (N - 1) over [0, L].
inline std::vector<double> uniform_grid(double length, std::size_t n) {
    assert(n >= 2);
    std::vector<double> s(n);
    const double h = length / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) s[i] = static_cast<double>(i) * h;
    s.back() = length;
    return s;
}

/// Second-order spatial derivative on a uniform grid: centered in the
/// interior, one-sided three-point stencils at the ends.
inline std::vector<double> derivative_field(const std::vector<double>& f, double h) {
    const std::size_t n = f.size();
    assert(n >= 3);
    std::vector<double> d(n);
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    return d;
}

/// Trapezoidal tail integrals I(s_i) = integral of f over [s_i, L].
inline std::vector<double> trapz_from_tip(const std::vector<double>& f, double h) {
    const std::size_t n = f.size();
    std::vector<double> acc(n, 0.0);
    for (std::size_t i = n - 1; i-- > 0;)
        acc[i] = acc[i + 1] + 0.5 * h * (f[i] + f[i + 1]);
    return acc;
}

/// Values at interval midpoints from nodal values, cubic 4-point
/// interpolation (one-sided cubics in the first and last interval).
/// Keeps one-step integrators at fourth order on grid-sampled fields.
inline std::vector<double> midpoint_interp(const std::vector<double>& f) {
    const std::size_t n = f.size();
    assert(n >= 4);
    std::vector<double> mid(n - 1);
    for (std::size_t i = 1; i + 2 < n; ++i)
        mid[i] = (-f[i - 1] + 9.0 * f[i] + 9.0 * f[i + 1] - f[i + 2]) / 16.0;
    mid[0] = (5.0 * f[0] + 15.0 * f[1] - 5.0 * f[2] + f[3]) / 16.0;
    mid[n - 2] = (5.0 * f[n - 1] + 15.0 * f[n - 2] - 5.0 * f[n - 3] + f[n - 4]) / 16.0;
    return mid;
}

}  // namespace octoarm
