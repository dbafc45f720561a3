#pragma once

// Radial cutoff functions built from the quintic smoothstep
//   s(x) = 10x^3 - 15x^4 + 6x^5,   max s' = 15/8,
// so zeta = 1 - s((r - r_in)/(r_out - r_in)) is C^2, equals 1 on the inner
// ball, vanishes outside the outer ball and |grad zeta| <= 1.875/(r_out - r_in).

#include <algorithm>
#include <cmath>
#include <vector>

#include "orlicz/errors.hpp"
#include "orlicz/fields.hpp"

namespace orlicz {

inline double quintic_ramp(double x) {
    if (x <= 0.0) return 1.0;
    if (x >= 1.0) return 0.0;
    return std::clamp(1.0 - x * x * x * (10.0 - 15.0 * x + 6.0 * x * x), 0.0, 1.0);
}

inline double quintic_ramp_slope(double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    const double y = x * (1.0 - x);
    return -30.0 * y * y;
}

inline constexpr double kQuinticMaxSlope = 1.875;

class Cutoff {
public:
    Cutoff(Point center, double r_in, double r_out, double q) : center_(center), r_in_(r_in), r_out_(r_out), q_(q) {
        if (!(r_in >= 0.0) || !(r_out > r_in)) throw DomainError("cutoff needs 0 <= r_in < r_out");
        if (!(q > 2.0)) throw DomainError("cutoff exponent q must exceed 2");
    }

    [[nodiscard]] const Point& center() const { return center_; }
    [[nodiscard]] double inner_radius() const { return r_in_; }
    [[nodiscard]] double outer_radius() const { return r_out_; }
    [[nodiscard]] double exponent() const { return q_; }

    [[nodiscard]] double value(const Point& x, int dim) const {
        return quintic_ramp((distance(x, dim) - r_in_) / (r_out_ - r_in_));
    }

    /// Exact gradient of the ramp at x.
    [[nodiscard]] Point gradient(const Point& x, int dim) const {
        Point g{};
        const double r = distance(x, dim);
        if (r == 0.0) return g;
        const double slope = quintic_ramp_slope((r - r_in_) / (r_out_ - r_in_)) / (r_out_ - r_in_);
        for (int a = 0; a < dim; ++a) g[a] = slope * (x[a] - center_[a]) / r;
        return g;
    }

    /// Certified bound on |grad zeta|.
    [[nodiscard]] double gradient_bound() const { return kQuinticMaxSlope / (r_out_ - r_in_); }

    [[nodiscard]] std::vector<double> sample(const UniformGrid& g) const {
        std::vector<double> z(g.cells());
        for (std::size_t c = 0; c < g.cells(); ++c) z[c] = value(g.position(c), g.dim());
        return z;
    }

    /// zeta^q sampled on the grid.
    [[nodiscard]] std::vector<double> sample_weight(const UniformGrid& g) const {
        std::vector<double> z = sample(g);
        for (double& v : z) v = std::pow(v, q_);
        return z;
    }

private:
    [[nodiscard]] double distance(const Point& x, int dim) const {
        double r2 = 0.0;
        for (int a = 0; a < dim; ++a) r2 += (x[a] - center_[a]) * (x[a] - center_[a]);
        return std::sqrt(r2);
    }

    Point center_;
    double r_in_;
    double r_out_;
    double q_;
};

/// Product of a spatial cutoff and a ramp in |t - t_center|.
class CylinderCutoff {
public:
    CylinderCutoff(Cutoff space, double t_center, double t_in, double t_out)
        : space_(std::move(space)), t_center_(t_center), t_in_(t_in), t_out_(t_out) {
        if (!(t_in >= 0.0) || !(t_out > t_in)) throw DomainError("cylinder cutoff needs 0 <= t_in < t_out");
    }

    [[nodiscard]] const Cutoff& space() const { return space_; }
    [[nodiscard]] double time_factor(double t) const {
        return quintic_ramp((std::abs(t - t_center_) - t_in_) / (t_out_ - t_in_));
    }
    [[nodiscard]] double inner_half_time() const { return t_in_; }
    [[nodiscard]] double outer_half_time() const { return t_out_; }

    [[nodiscard]] double value(double t, const Point& x, int dim) const { return time_factor(t) * space_.value(x, dim); }

    /// zeta^q per frame of `st`.
    [[nodiscard]] std::vector<std::vector<double>> sample_weight(const SpaceTimeField& st) const {
        const std::vector<double> spatial = space_.sample(st.grid());
        std::vector<std::vector<double>> w(st.size(), std::vector<double>(spatial.size()));
        for (std::size_t k = 0; k < st.size(); ++k) {
            const double tf = time_factor(st.time(k));
            for (std::size_t c = 0; c < spatial.size(); ++c) w[k][c] = std::pow(tf * spatial[c], space_.exponent());
        }
        return w;
    }

private:
    Cutoff space_;
    double t_center_;
    double t_in_;
    double t_out_;
};

/// Cutoffs zeta_0..zeta_kmax for the shrinking balls B_k = B(R(1 + 2^-k)):
/// zeta_k = 1 on B_{k+1}, 0 outside B_k, |grad zeta_k| <= 3.75 * 2^k / R.
/// Requires 2B inside the grid and R >= 2h.
inline std::vector<Cutoff> make_cutoff_sequence(const Ball& ball, int k_max, double q, const UniformGrid& grid) {
    if (k_max < 1) throw DomainError("cutoff sequence needs k_max >= 1");
    if (!region_inside_grid(ball.scaled(2.0), grid)) throw ResolutionError("2B is not inside the grid");
    if (ball.radius < 2.0 * grid.spacing()) throw ResolutionError("ball radius below two grid spacings");
    std::vector<Cutoff> seq;
    seq.reserve(static_cast<std::size_t>(k_max) + 1);
    for (int k = 0; k <= k_max; ++k) {
        const double r_out = ball.radius * (1.0 + std::ldexp(1.0, -k));
        const double r_in = ball.radius * (1.0 + std::ldexp(1.0, -k - 1));
        seq.emplace_back(ball.center, r_in, r_out, q);
    }
    return seq;
}

/// Cylinder cutoffs for Q_k = 2(1 + 2^-k) Q: zeta_k = 1 on Q_{k+1} and
/// vanishes outside Q_k. Requires Q_0 = 4Q inside the space-time grid.
inline std::vector<CylinderCutoff> make_cylinder_sequence(const Cylinder& cyl, int k_max, double q,
                                                          const SpaceTimeField& st) {
    if (k_max < 1) throw DomainError("cutoff sequence needs k_max >= 1");
    const Cylinder outer = cyl.scaled(4.0);
    if (!region_inside_grid(outer.ball, st.grid())) throw ResolutionError("4Q is not inside the spatial grid");
    if (outer.t_center - outer.half_time < st.time(0) - 1e-12 ||
        outer.t_center + outer.half_time > st.time(st.size() - 1) + 1e-12) {
        throw ResolutionError("4Q is not inside the time interval");
    }
    if (cyl.ball.radius < 2.0 * st.grid().spacing()) throw ResolutionError("cylinder radius below two grid spacings");
    std::vector<CylinderCutoff> seq;
    for (int k = 0; k <= k_max; ++k) {
        const double f_out = 2.0 * (1.0 + std::ldexp(1.0, -k));
        const double f_in = 2.0 * (1.0 + std::ldexp(1.0, -k - 1));
        Cutoff space(cyl.ball.center, cyl.ball.radius * f_in, cyl.ball.radius * f_out, q);
        seq.emplace_back(std::move(space), cyl.t_center, cyl.half_time * f_in, cyl.half_time * f_out);
    }
    return seq;
}

}  // namespace orlicz
