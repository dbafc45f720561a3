#pragma once

// Weighted, averaged mixed space-time norms
//   ||f||_{L^s(L^r)} = ( avg_t ( avg_x f^r w )^{s/r} )^{1/s}
// with the inner average over space (weight w = zeta^q) and the outer one
// over time. Sums use the rectangle rule on the grid: each node carries
// h^n, each frame carries tau, and both are divided by fixed measures so
// that the norm of a constant over the whole grid is that constant.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "orlicz/errors.hpp"
#include "orlicz/fields.hpp"

namespace orlicz {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct MixedNormSpec {
    double outer = 1.0;  ///< time exponent s, or kInf
    double inner = 1.0;  ///< space exponent r, or kInf
};

/// Sampled scalar f(t, x): frames x nodes.
using Samples = std::vector<std::vector<double>>;

struct MixedDomain {
    double cell_volume = 1.0;
    double tau = 1.0;
    double space_measure = 1.0;
    double time_measure = 1.0;
    /// zeta^q per frame and node; empty means weight 1 everywhere.
    Samples weight;

    /// Whole grid, every frame, unit weight.
    static MixedDomain whole(const UniformGrid& g, std::size_t frames, double tau) {
        MixedDomain d;
        d.cell_volume = g.cell_volume();
        d.tau = tau;
        d.space_measure = static_cast<double>(g.cells()) * g.cell_volume();
        d.time_measure = static_cast<double>(frames) * tau;
        return d;
    }
};

namespace detail {

inline void check_exponent(double e) {
    if (!(e >= 1.0)) throw SpecError("mixed norm exponents must be >= 1 or infinite");
}

inline constexpr double kWeightFloor = 1e-12;

}  // namespace detail

namespace detail {

/// (c * sum w_i v_i^e)^{1/e}, scaled by max v_i so large e cannot overflow.
inline double power_mean(const std::vector<double>& v, const std::vector<double>* w, double e, double c) {
    double top = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!w || (*w)[i] != 0.0) top = std::max(top, v[i]);
    }
    if (top == 0.0) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double wi = w ? (*w)[i] : 1.0;
        if (wi != 0.0 && v[i] != 0.0) sum += std::pow(v[i] / top, e) * wi;
    }
    return top * std::pow(sum * c, 1.0 / e);
}

}  // namespace detail

inline double mixed_norm(const Samples& f, const MixedNormSpec& spec, const MixedDomain& dom) {
    detail::check_exponent(spec.outer);
    detail::check_exponent(spec.inner);
    if (!dom.weight.empty() && dom.weight.size() != f.size()) throw DomainError("weight has the wrong number of frames");
    std::vector<double> inner(f.size(), 0.0);
    for (std::size_t k = 0; k < f.size(); ++k) {
        const std::vector<double>& fk = f[k];
        const std::vector<double>* wk = dom.weight.empty() ? nullptr : &dom.weight[k];
        if (wk && wk->size() != fk.size()) throw DomainError("weight has the wrong number of nodes");
        if (spec.inner == kInf) {
            for (std::size_t c = 0; c < fk.size(); ++c) {
                if (!wk || (*wk)[c] > detail::kWeightFloor) inner[k] = std::max(inner[k], fk[c]);
            }
        } else {
            inner[k] = detail::power_mean(fk, wk, spec.inner, dom.cell_volume / dom.space_measure);
        }
    }
    if (spec.outer == kInf) return inner.empty() ? 0.0 : *std::max_element(inner.begin(), inner.end());
    return detail::power_mean(inner, nullptr, spec.outer, dom.tau / dom.time_measure);
}

namespace detail {

inline double reciprocal(double e) { return e == kInf ? 0.0 : 1.0 / e; }

inline double from_reciprocal(double r) { return r <= 1e-15 ? kInf : 1.0 / r; }

inline void check_split(double p, double p1, double p2) {
    check_exponent(p);
    check_exponent(p1);
    check_exponent(p2);
    if (std::abs(reciprocal(p) - reciprocal(p1) - reciprocal(p2)) > 1e-12) {
        throw SpecError("Hoelder exponents must satisfy 1/p = 1/p1 + 1/p2");
    }
}

}  // namespace detail

/// RHS - LHS of ||fg||_{(p,q)} <= ||f||_{(p1,q1)} ||g||_{(p2,q2)}, with
/// outer exponents p* and inner exponents q*.
inline double holder_check(const Samples& f, const Samples& g, const MixedDomain& dom, double p, double p1, double p2,
                           double q, double q1, double q2) {
    detail::check_split(p, p1, p2);
    detail::check_split(q, q1, q2);
    if (f.size() != g.size()) throw DomainError("holder_check: frame counts differ");
    Samples fg = f;
    for (std::size_t k = 0; k < f.size(); ++k) {
        if (g[k].size() != f[k].size()) throw DomainError("holder_check: node counts differ");
        for (std::size_t c = 0; c < f[k].size(); ++c) fg[k][c] *= g[k][c];
    }
    const double lhs = mixed_norm(fg, {p, q}, dom);
    const double rhs = mixed_norm(f, {p1, q1}, dom) * mixed_norm(g, {p2, q2}, dom);
    return rhs - lhs;
}

/// ||f||^theta_{(p1,q1)} ||f||^{1-theta}_{(p0,q0)} - ||f||_{(p,q)} with
/// 1/p = theta/p1 + (1-theta)/p0 and likewise for q.
inline double interpolation_check(const Samples& f, const MixedDomain& dom, double theta, double p0, double q0,
                                  double p1, double q1) {
    if (!(theta >= 0.0 && theta <= 1.0)) throw SpecError("interpolation parameter must lie in [0, 1]");
    for (double e : {p0, q0, p1, q1}) detail::check_exponent(e);
    const double p = detail::from_reciprocal(theta * detail::reciprocal(p1) + (1.0 - theta) * detail::reciprocal(p0));
    const double q = detail::from_reciprocal(theta * detail::reciprocal(q1) + (1.0 - theta) * detail::reciprocal(q0));
    const double n1 = mixed_norm(f, {p1, q1}, dom);
    const double n0 = mixed_norm(f, {p0, q0}, dom);
    const double mid = mixed_norm(f, {p, q}, dom);
    if (theta == 0.0) return n0 - mid;
    if (theta == 1.0) return n1 - mid;
    return std::pow(n1, theta) * std::pow(n0, 1.0 - theta) - mid;
}

/// ||v chi_{v > gamma}|| - gamma ||chi_{v > gamma}||; never negative.
inline double weak_type_gap(const Samples& v, double gamma, const MixedNormSpec& spec, const MixedDomain& dom) {
    Samples above = v;
    Samples chi = v;
    for (std::size_t k = 0; k < v.size(); ++k) {
        for (std::size_t c = 0; c < v[k].size(); ++c) {
            const bool in = v[k][c] > gamma;
            above[k][c] = in ? v[k][c] : 0.0;
            chi[k][c] = in ? 1.0 : 0.0;
        }
    }
    return mixed_norm(above, spec, dom) - gamma * mixed_norm(chi, spec, dom);
}

}  // namespace orlicz
