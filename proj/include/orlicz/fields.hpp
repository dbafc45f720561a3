#pragma once

// Node-sampled fields on uniform grids in 1, 2 or 3 dimensions.
//
// Node i along axis a sits at origin[a] + i * h. Flat indices are row-major
// (axis 0 slowest). Vector fields store their components contiguously per
// node; gradients store an m x n matrix per node (row = component,
// column = derivative direction).

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <type_traits>
#include <string>
#include <vector>

#include "orlicz/errors.hpp"
#include "orlicz/matrix.hpp"

namespace orlicz {

using Point = std::array<double, 3>;
using Index = std::array<int, 3>;

class UniformGrid {
public:
    UniformGrid() = default;

    UniformGrid(int dim, Index extents, double spacing, Point origin = {0.0, 0.0, 0.0})
        : dim_(dim), extents_(extents), h_(spacing), origin_(origin) {
        if (dim < 1 || dim > 3) throw DomainError("grid dimension must be 1, 2 or 3");
        if (!(spacing > 0.0)) throw DomainError("grid spacing must be positive");
        for (int a = 0; a < 3; ++a) {
            if (a < dim) {
                if (extents_[a] < 3) throw DomainError("grid extents must be >= 3 per axis");
            } else {
                extents_[a] = 1;
                origin_[a] = 0.0;
            }
        }
    }

    /// Square/cube grid with `nodes` nodes per axis covering [lo, hi]^dim.
    static UniformGrid cube(int dim, int nodes, double lo, double hi) {
        return UniformGrid(dim, {nodes, nodes, nodes}, (hi - lo) / (nodes - 1), {lo, lo, lo});
    }

    [[nodiscard]] int dim() const { return dim_; }
    [[nodiscard]] const Index& extents() const { return extents_; }
    [[nodiscard]] int extent(int axis) const { return extents_[axis]; }
    [[nodiscard]] double spacing() const { return h_; }
    [[nodiscard]] const Point& origin() const { return origin_; }
    [[nodiscard]] std::size_t cells() const {
        return static_cast<std::size_t>(extents_[0]) * extents_[1] * extents_[2];
    }
    [[nodiscard]] double cell_volume() const { return std::pow(h_, dim_); }

    [[nodiscard]] std::size_t flat(const Index& i) const {
        return (static_cast<std::size_t>(i[0]) * extents_[1] + i[1]) * extents_[2] + i[2];
    }

    [[nodiscard]] Index unflat(std::size_t f) const {
        Index i{};
        i[2] = static_cast<int>(f % extents_[2]);
        f /= extents_[2];
        i[1] = static_cast<int>(f % extents_[1]);
        i[0] = static_cast<int>(f / extents_[1]);
        return i;
    }

    [[nodiscard]] Point position(const Index& i) const {
        Point x{};
        for (int a = 0; a < dim_; ++a) x[a] = origin_[a] + i[a] * h_;
        return x;
    }
    [[nodiscard]] Point position(std::size_t f) const { return position(unflat(f)); }

    [[nodiscard]] double lower(int axis) const { return origin_[axis]; }
    [[nodiscard]] double upper(int axis) const { return origin_[axis] + (extents_[axis] - 1) * h_; }

    [[nodiscard]] bool on_boundary(const Index& i) const {
        for (int a = 0; a < dim_; ++a) {
            if (i[a] == 0 || i[a] == extents_[a] - 1) return true;
        }
        return false;
    }

    friend bool operator==(const UniformGrid& a, const UniformGrid& b) {
        return a.dim_ == b.dim_ && a.extents_ == b.extents_ && a.h_ == b.h_ && a.origin_ == b.origin_;
    }

private:
    int dim_ = 1;
    Index extents_{3, 1, 1};
    double h_ = 1.0;
    Point origin_{0.0, 0.0, 0.0};
};

class VectorField {
public:
    VectorField() = default;
    VectorField(UniformGrid grid, int components)
        : grid_(grid), m_(components), values_(grid.cells() * static_cast<std::size_t>(components), 0.0) {
        if (components < 1) throw DomainError("a field needs at least one component");
    }
    VectorField(UniformGrid grid, int components, std::vector<double> values)
        : grid_(grid), m_(components), values_(std::move(values)) {
        if (components < 1) throw DomainError("a field needs at least one component");
        if (values_.size() != grid_.cells() * static_cast<std::size_t>(m_)) {
            throw DomainError("field value array has the wrong length");
        }
    }

    /// Samples f(x) -> R^m at every node.
    static VectorField sample(const UniformGrid& grid, int components,
                              const std::function<void(const Point&, std::span<double>)>& f) {
        VectorField u(grid, components);
        for (std::size_t c = 0; c < grid.cells(); ++c) f(grid.position(c), u.at(c));
        return u;
    }

    static VectorField sample_scalar(const UniformGrid& grid, const std::function<double(const Point&)>& f) {
        VectorField u(grid, 1);
        for (std::size_t c = 0; c < grid.cells(); ++c) u.values_[c] = f(grid.position(c));
        return u;
    }

    [[nodiscard]] const UniformGrid& grid() const { return grid_; }
    [[nodiscard]] int components() const { return m_; }
    [[nodiscard]] std::vector<double>& values() { return values_; }
    [[nodiscard]] const std::vector<double>& values() const { return values_; }

    std::span<double> at(std::size_t cell) { return {values_.data() + cell * m_, static_cast<std::size_t>(m_)}; }
    [[nodiscard]] std::span<const double> at(std::size_t cell) const {
        return {values_.data() + cell * m_, static_cast<std::size_t>(m_)};
    }
    double& operator()(std::size_t cell, int comp) { return values_[cell * m_ + comp]; }
    double operator()(std::size_t cell, int comp) const { return values_[cell * m_ + comp]; }

    [[nodiscard]] bool all_finite() const {
        return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
    }

private:
    UniformGrid grid_;
    int m_ = 1;
    std::vector<double> values_;
};

class GradientField {
public:
    GradientField(UniformGrid grid, int components)
        : grid_(grid), m_(components), values_(grid.cells() * components * grid.dim(), 0.0) {}

    [[nodiscard]] const UniformGrid& grid() const { return grid_; }
    [[nodiscard]] int components() const { return m_; }
    [[nodiscard]] std::size_t block() const { return static_cast<std::size_t>(m_) * grid_.dim(); }

    double& operator()(std::size_t cell, int comp, int axis) {
        return values_[cell * block() + static_cast<std::size_t>(comp) * grid_.dim() + axis];
    }
    double operator()(std::size_t cell, int comp, int axis) const {
        return values_[cell * block() + static_cast<std::size_t>(comp) * grid_.dim() + axis];
    }

    [[nodiscard]] Matrix at(std::size_t cell) const {
        Matrix g(static_cast<std::size_t>(m_), static_cast<std::size_t>(grid_.dim()));
        for (std::size_t k = 0; k < block(); ++k) g[k] = values_[cell * block() + k];
        return g;
    }

    /// v = |grad u| per node.
    [[nodiscard]] std::vector<double> magnitude() const {
        std::vector<double> v(grid_.cells());
        for (std::size_t c = 0; c < v.size(); ++c) {
            double s = 0.0;
            for (std::size_t k = 0; k < block(); ++k) s += values_[c * block() + k] * values_[c * block() + k];
            v[c] = std::sqrt(s);
        }
        return v;
    }

private:
    UniformGrid grid_;
    int m_;
    std::vector<double> values_;
};

/// A time-indexed sequence of fields on one grid; frame k sits at t0 + k tau.
class SpaceTimeField {
public:
    SpaceTimeField(double tau, std::vector<VectorField> frames, double t0 = 0.0)
        : tau_(tau), t0_(t0), frames_(std::move(frames)) {
        if (!(tau > 0.0)) throw DomainError("time step must be positive");
        if (frames_.size() < 2) throw DomainError("a space-time field needs at least two frames");
        for (const auto& f : frames_) {
            if (!(f.grid() == frames_.front().grid()) || f.components() != frames_.front().components()) {
                throw DomainError("space-time frames must share grid and component count");
            }
        }
    }

    [[nodiscard]] double tau() const { return tau_; }
    [[nodiscard]] double t0() const { return t0_; }
    [[nodiscard]] double time(std::size_t k) const { return t0_ + tau_ * static_cast<double>(k); }
    [[nodiscard]] std::size_t size() const { return frames_.size(); }
    [[nodiscard]] const VectorField& frame(std::size_t k) const { return frames_[k]; }
    [[nodiscard]] const std::vector<VectorField>& frames() const { return frames_; }
    [[nodiscard]] const UniformGrid& grid() const { return frames_.front().grid(); }

private:
    double tau_;
    double t0_;
    std::vector<VectorField> frames_;
};

/// Central differences inside, second-order one-sided stencils on the
/// boundary; exact for polynomials of degree <= 2 along each axis.
inline GradientField gradient(const VectorField& u) {
    const UniformGrid& g = u.grid();
    GradientField grad(g, u.components());
    const double inv2h = 1.0 / (2.0 * g.spacing());
    for (std::size_t c = 0; c < g.cells(); ++c) {
        const Index idx = g.unflat(c);
        for (int a = 0; a < g.dim(); ++a) {
            const int e = g.extent(a);
            Index i0 = idx, i1 = idx, i2 = idx;
            double w0 = 0.0, w1 = 0.0, w2 = 0.0;
            if (idx[a] == 0) {
                i1[a] = 1;
                i2[a] = 2;
                w0 = -3.0;
                w1 = 4.0;
                w2 = -1.0;
            } else if (idx[a] == e - 1) {
                i1[a] = e - 2;
                i2[a] = e - 3;
                w0 = 3.0;
                w1 = -4.0;
                w2 = 1.0;
            } else {
                i1[a] = idx[a] + 1;
                i2[a] = idx[a] - 1;
                w1 = 1.0;
                w2 = -1.0;
            }
            const std::size_t f0 = g.flat(i0), f1 = g.flat(i1), f2 = g.flat(i2);
            for (int k = 0; k < u.components(); ++k) {
                grad(c, k, a) = (w0 * u(f0, k) + w1 * u(f1, k) + w2 * u(f2, k)) * inv2h;
            }
        }
    }
    return grad;
}

// ---------------------------------------------------------------------------
// Regions and averaged integrals

struct Ball {
    Point center{};
    double radius = 0.0;

    [[nodiscard]] bool contains(const Point& x, int dim) const {
        double r2 = 0.0;
        for (int a = 0; a < dim; ++a) r2 += (x[a] - center[a]) * (x[a] - center[a]);
        return r2 <= radius * radius * (1.0 + 1e-12);
    }
    [[nodiscard]] Ball scaled(double factor) const { return {center, radius * factor}; }
};

struct Cube {
    Point center{};
    double half_width = 0.0;

    [[nodiscard]] bool contains(const Point& x, int dim) const {
        for (int a = 0; a < dim; ++a) {
            if (std::abs(x[a] - center[a]) > half_width * (1.0 + 1e-12)) return false;
        }
        return true;
    }
    [[nodiscard]] Cube scaled(double factor) const { return {center, half_width * factor}; }
};

/// Ball in space times the time interval [t_center - half_time, t_center + half_time].
struct Cylinder {
    Ball ball;
    double t_center = 0.0;
    double half_time = 0.0;

    [[nodiscard]] bool contains_time(double t) const { return std::abs(t - t_center) <= half_time * (1.0 + 1e-12); }
    /// Parabolic cylinder with radius R_x and height R_t = alpha R_x^2.
    static Cylinder with_scaling(Point center, double radius, double t_center, double alpha) {
        return {{center, radius}, t_center, 0.5 * alpha * radius * radius};
    }
    /// Both radius and height multiplied by `factor`.
    [[nodiscard]] Cylinder scaled(double factor) const {
        return {ball.scaled(factor), t_center, half_time * factor};
    }
};

template <typename Region>
bool region_inside_grid(const Region& region, const UniformGrid& g) {
    Point c{};
    double r = 0.0;
    if constexpr (std::is_same_v<Region, Ball>) {
        c = region.center;
        r = region.radius;
    } else {
        c = region.center;
        r = region.half_width;
    }
    for (int a = 0; a < g.dim(); ++a) {
        if (c[a] - r < g.lower(a) - 1e-12 || c[a] + r > g.upper(a) + 1e-12) return false;
    }
    return true;
}

/// Nodes of `g` whose positions lie in the region.
template <typename Region>
std::vector<std::size_t> region_cells(const UniformGrid& g, const Region& region) {
    std::vector<std::size_t> cells;
    for (std::size_t c = 0; c < g.cells(); ++c) {
        if (region.contains(g.position(c), g.dim())) cells.push_back(c);
    }
    return cells;
}

/// Averaged integral over a ball or cube: sum over member nodes divided by
/// their count (cell volume cancels).
template <typename Region>
double avg_integral(const UniformGrid& g, std::span<const double> f, const Region& region) {
    if (f.size() != g.cells()) throw DomainError("avg_integral: field size does not match grid");
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t c = 0; c < g.cells(); ++c) {
        if (region.contains(g.position(c), g.dim())) {
            sum += f[c];
            ++count;
        }
    }
    if (count == 0) throw EmptyRegionError("region contains no grid nodes");
    return sum / static_cast<double>(count);
}

/// Averaged integral over a space-time cylinder; `f[k]` is frame k.
inline double avg_integral(const SpaceTimeField& st, const std::vector<std::vector<double>>& f, const Cylinder& cyl) {
    const UniformGrid& g = st.grid();
    double sum = 0.0;
    std::size_t count = 0;
    const auto cells = region_cells(g, cyl.ball);
    for (std::size_t k = 0; k < st.size(); ++k) {
        if (!cyl.contains_time(st.time(k))) continue;
        for (std::size_t c : cells) {
            sum += f[k][c];
            ++count;
        }
    }
    if (count == 0) throw EmptyRegionError("cylinder contains no space-time nodes");
    return sum / static_cast<double>(count);
}

/// (f(x + s h e_axis) - f(x)) / (s h) on the index set where both nodes
/// exist. Negative s looks backwards. The returned field lives on the
/// shrunken grid whose origin tracks the surviving nodes.
inline VectorField difference_quotient(const VectorField& f, int axis, int steps) {
    const UniformGrid& g = f.grid();
    if (axis < 0 || axis >= g.dim()) throw DomainError("difference_quotient: bad axis");
    if (steps == 0) throw DomainError("difference_quotient: step must be non-zero");
    const int shift = std::abs(steps);
    if (g.extent(axis) - shift < 1) throw DomainError("difference_quotient: step exceeds extent");
    Index ext = g.extents();
    ext[axis] -= shift;
    Point origin = g.origin();
    if (steps < 0) origin[axis] += shift * g.spacing();
    if (ext[axis] < 3) throw DomainError("difference_quotient: fewer than three nodes remain");
    const UniformGrid out_grid(g.dim(), ext, g.spacing(), origin);
    VectorField out(out_grid, f.components());
    const double inv = 1.0 / (steps * g.spacing());
    for (std::size_t c = 0; c < out_grid.cells(); ++c) {
        Index i = out_grid.unflat(c);
        if (steps < 0) i[axis] += shift;
        Index j = i;
        j[axis] += steps;
        const std::size_t fi = g.flat(i), fj = g.flat(j);
        for (int k = 0; k < f.components(); ++k) out(c, k) = (f(fj, k) - f(fi, k)) * inv;
    }
    return out;
}

}  // namespace orlicz
