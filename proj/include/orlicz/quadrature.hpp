#pragma once

// Thin adapters over Boost.Math quadrature. Everything in the library that
// integrates a scalar function of one variable goes through here so the
// error policy (QuadratureError on non-convergence) is uniform.

#include <cmath>
#include <limits>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "orlicz/errors.hpp"

namespace orlicz::quad {

/// Adaptive Gauss-Kronrod (15 point) on [a, b] with relative tolerance.
template <typename F>
double integrate_smooth(F&& f, double a, double b, double rel_tol = 1e-12, unsigned max_depth = 15) {
    if (a == b) return 0.0;
    double err = 0.0;
    double l1 = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, a, b, max_depth, rel_tol, &err, &l1);
    if (!std::isfinite(value)) throw QuadratureError("quadrature produced a non-finite value");
    if (err > 1e3 * rel_tol * std::max(l1, std::numeric_limits<double>::min()) && err > 1e-300) {
        throw QuadratureError("adaptive Gauss-Kronrod did not converge (estimated error " +
                              std::to_string(err) + ")");
    }
    return value;
}

/// Double-exponential rule; tolerates integrable endpoint singularities.
template <typename F>
double integrate_singular(F f, double a, double b, double rel_tol = 1e-10) {
    if (a == b) return 0.0;
    thread_local boost::math::quadrature::tanh_sinh<double> rule(15);
    double err = 0.0;
    double l1 = 0.0;
    std::size_t levels = 0;
    // map to [0, 1]: Boost gives up early on very short intervals. A node
    // that rounds onto an endpoint singularity carries negligible weight.
    const double w = b - a;
    auto g = [&](double s, double sc) {
        const double x = s < 0.5 ? a + w * s : b - w * sc;
        if (x == a || x == b) {
            const double y = f(x);
            return std::isfinite(y) ? y : 0.0;
        }
        return f(x);
    };
    const double value = w * rule.integrate(g, 0.0, 1.0, rel_tol, &err, &l1, &levels);
    err *= std::abs(w);
    l1 *= std::abs(w);
    if (!std::isfinite(value)) throw QuadratureError("quadrature produced a non-finite value");
    // Boost may stop a few digits short of rel_tol near an endpoint peak;
    // accept anything within 1e-8 relative.
    const double accept = std::max(1e3 * rel_tol, 1e-8);
    if (err > accept * std::max(l1, std::numeric_limits<double>::min()) && err > 1e-300) {
        throw QuadratureError("tanh-sinh quadrature did not converge (estimated error " + std::to_string(err / l1) +
                              " relative)");
    }
    return value;
}

}  // namespace orlicz::quad
