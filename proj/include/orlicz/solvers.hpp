#pragma once

// Discrete minimizers of the energy sum_T phi(|grad u_T|) |T| on the Kuhn
// (Freudenthal) triangulation of a uniform grid: every grid cube is split
// into dim! simplices, one per ordering of the axes, and u is continuous
// piecewise linear. For phi(t) = t^2 in 2D this reproduces the 5-point
// Laplacian.
//
// The minimizer is nonlinear conjugate gradients (Polak-Ribiere+, Jacobi
// preconditioned) with an Armijo backtracking line search whose trial step
// is the Newton step along the search direction. For p < 2 the integrand is
// regularized as phi(sqrt(t^2 + eps^2)) - phi(eps) and eps is driven to 0.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "orlicz/errors.hpp"
#include "orlicz/fields.hpp"
#include "orlicz/nfunction.hpp"

namespace orlicz {

// ---------------------------------------------------------------------------
// Mesh

class KuhnMesh {
public:
    explicit KuhnMesh(const UniformGrid& grid) : grid_(grid) {
        const int n = grid.dim();
        std::array<int, 3> perm{0, 1, 2};
        std::vector<std::array<int, 3>> perms;
        do {
            perms.push_back(perm);
        } while (std::next_permutation(perm.begin(), perm.begin() + n));
        double fact = 1.0;
        for (int k = 2; k <= n; ++k) fact *= k;
        volume_ = grid.cell_volume() / fact;

        const Index ext = grid.extents();
        Index lo{0, 0, 0};
        Index hi{n > 0 ? ext[0] - 1 : 1, n > 1 ? ext[1] - 1 : 1, n > 2 ? ext[2] - 1 : 1};
        for (lo[0] = 0; lo[0] < hi[0]; ++lo[0]) {
            for (lo[1] = 0; lo[1] < hi[1]; ++lo[1]) {
                for (lo[2] = 0; lo[2] < hi[2]; ++lo[2]) {
                    for (const auto& p : perms) {
                        Simplex s;
                        Index v = lo;
                        s.vertex[0] = static_cast<std::uint32_t>(grid.flat(v));
                        for (int k = 0; k < n; ++k) {
                            v[p[k]] += 1;
                            s.vertex[k + 1] = static_cast<std::uint32_t>(grid.flat(v));
                            s.axis[k] = static_cast<std::uint8_t>(p[k]);
                        }
                        simplices_.push_back(s);
                    }
                }
            }
        }
    }

    struct Simplex {
        std::array<std::uint32_t, 4> vertex{};
        std::array<std::uint8_t, 3> axis{};
    };

    [[nodiscard]] const UniformGrid& grid() const { return grid_; }
    [[nodiscard]] const std::vector<Simplex>& simplices() const { return simplices_; }
    [[nodiscard]] double volume() const { return volume_; }

    /// Gradient of component `comp` of u on simplex s (length dim).
    void simplex_gradient(const Simplex& s, std::span<const double> u, int m, int comp, double* out) const {
        const double inv_h = 1.0 / grid_.spacing();
        for (int k = 0; k < grid_.dim(); ++k) {
            out[s.axis[k]] = (u[s.vertex[k + 1] * m + comp] - u[s.vertex[k] * m + comp]) * inv_h;
        }
    }

private:
    UniformGrid grid_;
    double volume_ = 0.0;
    std::vector<Simplex> simplices_;
};

// ---------------------------------------------------------------------------
// Configuration and reports

struct SolveConfig {
    double tol_residual = 1e-8;
    long max_iters = 200000;
    /// Initial regularization relative to the data scale; 0 disables it.
    /// Only used for p < 2 unless `regularize_always` is set.
    double regularization = 1e-2;
    double continuation_factor = 0.25;
    bool regularize_always = false;
    double armijo_c1 = 1e-4;
    double backtrack = 0.5;
    /// Record the objective after every accepted step.
    bool trace = false;
};

struct SolveReport {
    long iterations = 0;
    double energy = 0.0;
    double residual = 0.0;
    std::vector<double> eps_schedule;
    double wall_time = 0.0;
    bool converged = false;
    std::vector<double> objective_trace;  ///< (regularized) objective at stage start and after each accepted step
    std::vector<std::size_t> stage_offsets;  ///< start of each continuation stage in objective_trace
    std::vector<double> residual_trace;   ///< unregularized residual after each continuation stage
    /// Parabolic only: per step, E(u_{k+1}) + |u_{k+1}-u_k|^2/(2 tau) and E(u_k).
    std::vector<std::pair<double, double>> dissipation;
};

class NonConvergence : public Error {
public:
    NonConvergence(const std::string& what, VectorField best, SolveReport report)
        : Error(what), best_(std::move(best)), report_(std::move(report)) {}
    [[nodiscard]] const VectorField& best() const { return best_; }
    [[nodiscard]] const SolveReport& report() const { return report_; }

private:
    VectorField best_;
    SolveReport report_;
};

using BoundaryData = std::function<void(const Point&, std::span<double>)>;

// ---------------------------------------------------------------------------
// Objective

namespace detail {

/// phi_eps(t) = phi(sqrt(t^2 + eps^2)) - phi(eps), plus an optional
/// mass term |w - ref|^2 / (2 tau) for implicit time steps.
class Objective {
public:
    Objective(const NFunction& nf, const KuhnMesh& mesh, int m, double eps)
        : nf_(nf), mesh_(mesh), m_(m), eps_(eps), phi_eps_(eps > 0.0 ? nf.value(eps) : 0.0) {}

    void set_mass(const std::vector<double>* ref, double tau) {
        ref_ = ref;
        mass_ = ref ? mesh_.grid().cell_volume() / tau : 0.0;
    }

    [[nodiscard]] double eps() const { return eps_; }

    // a(s) = phi'(s)/s and b(s) = phi''(s) at s = sqrt(|G|^2 + eps^2).
    void coefficients(double norm2, double& s, double& a, double& b) const {
        s = std::sqrt(norm2 + eps_ * eps_);
        if (s > 1e-300) {
            a = nf_.derivative(s) / s;
            b = nf_.second_derivative(s);
        } else {
            a = b = nf_.second_derivative(0.0);
        }
    }

    [[nodiscard]] double integrand(double norm2) const {
        if (eps_ == 0.0) return nf_.value(std::sqrt(norm2));
        return nf_.value(std::sqrt(norm2 + eps_ * eps_)) - phi_eps_;
    }

    [[nodiscard]] double gradient_energy(std::span<const double> u) const {
        const int n = mesh_.grid().dim();
        double total = 0.0;
        std::array<double, 3> g{};
        for (const auto& s : mesh_.simplices()) {
            double norm2 = 0.0;
            for (int c = 0; c < m_; ++c) {
                mesh_.simplex_gradient(s, u, m_, c, g.data());
                for (int a = 0; a < n; ++a) norm2 += g[a] * g[a];
            }
            total += integrand(norm2);
        }
        return total * mesh_.volume();
    }

    [[nodiscard]] double mass_energy(std::span<const double> u) const {
        if (!ref_) return 0.0;
        double total = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double d = u[i] - (*ref_)[i];
            total += d * d;
        }
        return 0.5 * mass_ * total;
    }

    [[nodiscard]] double value(std::span<const double> u) const { return gradient_energy(u) + mass_energy(u); }

    /// f(u + alpha d) - f(u), summed per simplex so that tiny decreases near
    /// the minimizer are not lost to cancellation between two large totals.
    [[nodiscard]] double delta(std::span<const double> u, std::span<const double> d, double alpha) const {
        const int n = mesh_.grid().dim();
        double total = 0.0;
        std::array<double, 24> g{};
        std::array<double, 24> dg{};
        for (const auto& s : mesh_.simplices()) {
            double norm2 = 0.0, dnorm2 = 0.0, cross = 0.0;
            for (int c = 0; c < m_; ++c) {
                mesh_.simplex_gradient(s, u, m_, c, g.data() + 3 * c);
                mesh_.simplex_gradient(s, d, m_, c, dg.data() + 3 * c);
                for (int a = 0; a < n; ++a) {
                    norm2 += g[3 * c + a] * g[3 * c + a];
                    dnorm2 += dg[3 * c + a] * dg[3 * c + a];
                    cross += g[3 * c + a] * dg[3 * c + a];
                }
            }
            if (dnorm2 == 0.0) continue;
            const double s0 = std::sqrt(norm2 + eps_ * eps_);
            const double diff2 = alpha * (2.0 * cross + alpha * dnorm2);  // |G + aD|^2 - |G|^2
            const double s1 = std::sqrt(std::max(0.0, norm2 + diff2) + eps_ * eps_);
            const double ds = diff2 / (s0 + s1);
            if (s0 > 0.0 && std::abs(ds) < 0.1 * s0) {
                // 3-point Gauss-Legendre for the integral of phi' over [s0, s1]
                const double mid = s0 + 0.5 * ds;
                const double off = 0.5 * ds * 0.7745966692414834;
                total += ds * (5.0 * nf_.derivative(mid - off) + 8.0 * nf_.derivative(mid) +
                               5.0 * nf_.derivative(mid + off)) / 18.0;
            } else {
                total += nf_.value(s1) - nf_.value(s0);
            }
        }
        total *= mesh_.volume();
        if (ref_) {
            double m = 0.0;
            for (std::size_t i = 0; i < u.size(); ++i) m += d[i] * (2.0 * (u[i] - (*ref_)[i]) + alpha * d[i]);
            total += 0.5 * mass_ * alpha * m;
        }
        return total;
    }

    /// Full gradient (all nodes; callers mask boundary dofs).
    double value_and_gradient(std::span<const double> u, std::vector<double>& grad,
                              double* gradient_part = nullptr) const {
        const int n = mesh_.grid().dim();
        const double inv_h = 1.0 / mesh_.grid().spacing();
        const double vol = mesh_.volume();
        grad.assign(u.size(), 0.0);
        double total = 0.0;
        std::array<double, 24> g{};
        for (const auto& s : mesh_.simplices()) {
            double norm2 = 0.0;
            for (int c = 0; c < m_; ++c) {
                mesh_.simplex_gradient(s, u, m_, c, g.data() + 3 * c);
                for (int a = 0; a < n; ++a) norm2 += g[3 * c + a] * g[3 * c + a];
            }
            total += integrand(norm2);
            double sn = 0.0, a_coef = 0.0, b_coef = 0.0;
            coefficients(norm2, sn, a_coef, b_coef);
            const double w = a_coef * vol * inv_h;
            for (int c = 0; c < m_; ++c) {
                for (int k = 0; k < n; ++k) {
                    const double flux = w * g[3 * c + s.axis[k]];
                    grad[s.vertex[k + 1] * m_ + c] += flux;
                    grad[s.vertex[k] * m_ + c] -= flux;
                }
            }
        }
        total *= vol;
        if (gradient_part) *gradient_part = total;
        if (ref_) {
            for (std::size_t i = 0; i < u.size(); ++i) grad[i] += mass_ * (u[i] - (*ref_)[i]);
            total += mass_energy(u);
        }
        return total;
    }

    /// d^T H d along direction d at u.
    [[nodiscard]] double curvature(std::span<const double> u, std::span<const double> d) const {
        const int n = mesh_.grid().dim();
        double total = 0.0;
        std::array<double, 24> g{};
        std::array<double, 24> dg{};
        for (const auto& s : mesh_.simplices()) {
            double norm2 = 0.0, dnorm2 = 0.0, cross = 0.0;
            for (int c = 0; c < m_; ++c) {
                mesh_.simplex_gradient(s, u, m_, c, g.data() + 3 * c);
                mesh_.simplex_gradient(s, d, m_, c, dg.data() + 3 * c);
                for (int a = 0; a < n; ++a) {
                    norm2 += g[3 * c + a] * g[3 * c + a];
                    dnorm2 += dg[3 * c + a] * dg[3 * c + a];
                    cross += g[3 * c + a] * dg[3 * c + a];
                }
            }
            if (dnorm2 == 0.0) continue;
            double sn = 0.0, a_coef = 0.0, b_coef = 0.0;
            // Keep the curvature estimate finite where phi'' blows up at 0.
            coefficients(std::max(norm2, 1e-24 * dnorm2), sn, a_coef, b_coef);
            const double c2 = cross * cross / (sn * sn);
            total += a_coef * (dnorm2 - c2) + b_coef * c2;
        }
        total *= mesh_.volume();
        if (ref_) {
            double dd = 0.0;
            for (double x : d) dd += x * x;
            total += mass_ * dd;
        }
        return total;
    }

    /// Diagonal of the Hessian, floored to stay positive.
    [[nodiscard]] std::vector<double> hessian_diagonal(std::span<const double> u) const {
        const int n = mesh_.grid().dim();
        const double inv_h2 = 1.0 / (mesh_.grid().spacing() * mesh_.grid().spacing());
        std::vector<double> diag(u.size(), 0.0);
        std::array<double, 24> g{};
        for (const auto& s : mesh_.simplices()) {
            double norm2 = 0.0;
            for (int c = 0; c < m_; ++c) {
                mesh_.simplex_gradient(s, u, m_, c, g.data() + 3 * c);
                for (int a = 0; a < n; ++a) norm2 += g[3 * c + a] * g[3 * c + a];
            }
            double sn = 0.0, a_coef = 0.0, b_coef = 0.0;
            coefficients(std::max(norm2, 1e-24), sn, a_coef, b_coef);
            for (int v = 0; v <= n; ++v) {
                // d(grad u_c)/d u_{v,c}: -1/h along axis[v], +1/h along axis[v-1]
                for (int c = 0; c < m_; ++c) {
                    double cross = 0.0;
                    double dn2 = 0.0;
                    if (v < n) {
                        cross -= g[3 * c + s.axis[v]];
                        dn2 += 1.0;
                    }
                    if (v > 0) {
                        cross += g[3 * c + s.axis[v - 1]];
                        dn2 += 1.0;
                    }
                    const double c2 = cross * cross / (sn * sn);
                    diag[s.vertex[v] * m_ + c] += (a_coef * (dn2 - c2) + b_coef * c2) * inv_h2;
                }
            }
        }
        const double vol = mesh_.volume();
        double dmax = 0.0;
        for (double& x : diag) {
            x *= vol;
            if (ref_) x += mass_;
            dmax = std::max(dmax, x);
        }
        const double floor = std::max(dmax * 1e-10, 1e-300);
        for (double& x : diag) x = std::max(x, floor);
        return diag;
    }

private:
    const NFunction& nf_;
    const KuhnMesh& mesh_;
    int m_;
    double eps_;
    double phi_eps_;
    const std::vector<double>* ref_ = nullptr;
    double mass_ = 0.0;
};

inline std::vector<char> free_mask(const UniformGrid& g, int m) {
    std::vector<char> mask(g.cells() * static_cast<std::size_t>(m), 0);
    for (std::size_t c = 0; c < g.cells(); ++c) {
        if (!g.on_boundary(g.unflat(c))) {
            for (int k = 0; k < m; ++k) mask[c * m + k] = 1;
        }
    }
    return mask;
}

inline double masked_max_abs(const std::vector<double>& v, const std::vector<char>& mask) {
    double r = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (mask[i]) r = std::max(r, std::abs(v[i]));
    }
    return r;
}

struct StageResult {
    long iterations = 0;
    bool converged = false;
    bool stalled = false;
};

/// Preconditioned nonlinear CG on the free dofs of `u`, stopping when the
/// max-norm of the objective gradient drops below tol * (1 + gradient energy).
inline StageResult minimize(const Objective& obj, std::vector<double>& u, const std::vector<char>& mask,
                            const SolveConfig& cfg, double tol, long budget, std::vector<double>* trace) {
    StageResult res;
    std::vector<double> grad, grad_new, z, z_new, d(u.size(), 0.0), trial(u.size());
    double e_grad = 0.0;
    double f = obj.value_and_gradient(u, grad, &e_grad);
    if (!std::isfinite(f)) throw NumericalBreakdown("objective is not finite at the initial iterate");
    if (trace) trace->push_back(f);
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!mask[i]) grad[i] = 0.0;
    }
    std::vector<double> diag = obj.hessian_diagonal(u);
    auto precondition = [&](const std::vector<double>& g, std::vector<double>& out) {
        out.resize(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) out[i] = mask[i] ? g[i] / diag[i] : 0.0;
    };
    precondition(grad, z);
    for (std::size_t i = 0; i < u.size(); ++i) d[i] = -z[i];
    double gz = std::inner_product(grad.begin(), grad.end(), z.begin(), 0.0);
    long since_reset = 0;
    const long reset_period = std::max<long>(50, static_cast<long>(std::sqrt(static_cast<double>(u.size()))) * 4);

    while (true) {
        if (masked_max_abs(grad, mask) <= tol * (1.0 + e_grad)) {
            res.converged = true;
            return res;
        }
        if (res.iterations >= budget) return res;
        ++res.iterations;

        double slope = std::inner_product(grad.begin(), grad.end(), d.begin(), 0.0);
        if (!(slope < 0.0)) {
            for (std::size_t i = 0; i < u.size(); ++i) d[i] = -z[i];
            slope = -gz;
        }
        const double curv = obj.curvature(u, d);
        double alpha = (curv > 0.0 && std::isfinite(curv)) ? -slope / curv : 1.0;
        if (!std::isfinite(alpha) || alpha <= 0.0) alpha = 1.0;

        bool accepted = false;
        for (int bt = 0; bt < 80; ++bt) {
            const double change = obj.delta(u, d, alpha);
            if (std::isnan(change)) throw NumericalBreakdown("NaN during line search");
            if (change <= cfg.armijo_c1 * alpha * slope && change < 0.0) {
                accepted = true;
                break;
            }
            alpha *= cfg.backtrack;
        }
        if (accepted) {
            for (std::size_t i = 0; i < u.size(); ++i) trial[i] = u[i] + alpha * d[i];
        }
        if (!accepted) {
            if (since_reset == 0) {
                // Even the preconditioned steepest-descent step makes no
                // progress: we are at the floating-point floor.
                res.stalled = true;
                return res;
            }
            since_reset = 0;
            diag = obj.hessian_diagonal(u);
            precondition(grad, z);
            gz = std::inner_product(grad.begin(), grad.end(), z.begin(), 0.0);
            for (std::size_t i = 0; i < u.size(); ++i) d[i] = -z[i];
            continue;
        }
        u.swap(trial);
        f = obj.value_and_gradient(u, grad_new, &e_grad);
        for (std::size_t i = 0; i < u.size(); ++i) {
            if (!mask[i]) grad_new[i] = 0.0;
        }
        if (trace) trace->push_back(f);

        ++since_reset;
        if (since_reset >= reset_period) {
            since_reset = 0;
            diag = obj.hessian_diagonal(u);
            precondition(grad_new, z_new);
            grad.swap(grad_new);
            z.swap(z_new);
            gz = std::inner_product(grad.begin(), grad.end(), z.begin(), 0.0);
            for (std::size_t i = 0; i < u.size(); ++i) d[i] = -z[i];
            continue;
        }
        precondition(grad_new, z_new);
        double num = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) num += grad_new[i] * (z_new[i] - z[i]);
        const double beta = std::max(0.0, num / gz);
        grad.swap(grad_new);
        z.swap(z_new);
        gz = std::inner_product(grad.begin(), grad.end(), z.begin(), 0.0);
        for (std::size_t i = 0; i < u.size(); ++i) d[i] = -z[i] + beta * d[i];
    }
}

inline double data_scale(const VectorField& u) {
    const UniformGrid& g = u.grid();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t c = 0; c < g.cells(); ++c) {
        if (!g.on_boundary(g.unflat(c))) continue;
        for (int k = 0; k < u.components(); ++k) {
            lo = std::min(lo, u(c, k));
            hi = std::max(hi, u(c, k));
        }
    }
    double diam = 0.0;
    for (int a = 0; a < g.dim(); ++a) diam = std::max(diam, g.upper(a) - g.lower(a));
    const double s = (hi - lo) / diam;
    return s > 0.0 ? s : 1.0;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Public operations

/// Discrete energy sum_T phi(|grad u_T|) |T| on the Kuhn triangulation.
inline double energy(const NFunction& nf, const VectorField& u) {
    const KuhnMesh mesh(u.grid());
    return detail::Objective(nf, mesh, u.components(), 0.0).gradient_energy(u.values());
}

/// max over interior nodal hat functions zeta and components of
/// |sum_T A(grad u_T) : grad zeta |T||, divided by (1 + energy).
inline double weak_residual(const NFunction& nf, const VectorField& u, const KuhnMesh& mesh) {
    const detail::Objective obj(nf, mesh, u.components(), 0.0);
    std::vector<double> grad;
    const double e = obj.value_and_gradient(u.values(), grad);
    return detail::masked_max_abs(grad, detail::free_mask(u.grid(), u.components())) / (1.0 + e);
}

inline double weak_residual(const NFunction& nf, const VectorField& u) { return weak_residual(nf, u, KuhnMesh(u.grid())); }

/// Per-simplex frozen coefficients phi'(|grad u_T|)/|grad u_T|.
inline std::vector<double> frozen_coefficients(const NFunction& nf, const VectorField& u, const KuhnMesh& mesh) {
    const detail::Objective obj(nf, mesh, u.components(), 0.0);
    std::vector<double> coef;
    coef.reserve(mesh.simplices().size());
    std::array<double, 3> g{};
    for (const auto& s : mesh.simplices()) {
        double norm2 = 0.0;
        for (int c = 0; c < u.components(); ++c) {
            mesh.simplex_gradient(s, u.values(), u.components(), c, g.data());
            for (int a = 0; a < u.grid().dim(); ++a) norm2 += g[a] * g[a];
        }
        double sn = 0.0, a = 0.0, b = 0.0;
        obj.coefficients(norm2, sn, a, b);
        coef.push_back(a);
    }
    return coef;
}

namespace detail {

// Runs the regularization continuation on an already initialised iterate.
inline void run_continuation(const NFunction& nf, const KuhnMesh& mesh, int m, std::vector<double>& u,
                             const std::vector<double>* ref, double tau, double scale, const SolveConfig& cfg,
                             SolveReport& report) {
    const std::vector<char> mask = free_mask(mesh.grid(), m);
    const bool singular = !std::isfinite(nf.second_derivative(0.0));
    const bool regularize = cfg.regularization > 0.0 && (singular || cfg.regularize_always);
    double eps = regularize ? cfg.regularization * scale : 0.0;
    const double eps_floor = 1e-9 * scale;
    std::vector<double>* trace = cfg.trace ? &report.objective_trace : nullptr;

    const Objective exact(nf, mesh, m, 0.0);
    auto scaled_residual = [&](const std::vector<double>& x) {
        Objective probe(nf, mesh, m, 0.0);
        probe.set_mass(ref, tau);
        std::vector<double> g;
        probe.value_and_gradient(x, g);
        return masked_max_abs(g, mask) / (1.0 + exact.gradient_energy(x));
    };

    // Reference point for the parabolic dissipation guarantee.
    Objective step_exact(nf, mesh, m, 0.0);
    step_exact.set_mass(ref, tau);
    const double start_value = ref ? step_exact.value(*ref) : 0.0;

    while (true) {
        report.eps_schedule.push_back(eps);
        report.stage_offsets.push_back(report.objective_trace.size());
        Objective obj(nf, mesh, m, eps);
        obj.set_mass(ref, tau);
        if (eps == 0.0 && ref && step_exact.value(u) > start_value) u = *ref;
        const long budget = cfg.max_iters - report.iterations;
        const StageResult stage = minimize(obj, u, mask, cfg, cfg.tol_residual, budget, trace);
        report.iterations += stage.iterations;
        const double r = scaled_residual(u);
        report.residual_trace.push_back(r);
        report.residual = r;
        if (r <= cfg.tol_residual) {
            report.converged = true;
            return;
        }
        if (report.iterations >= cfg.max_iters) return;
        if (eps == 0.0) {
            if (stage.stalled || stage.converged) return;
            continue;
        }
        eps *= cfg.continuation_factor;
        if (eps < eps_floor) eps = 0.0;
    }
}

}  // namespace detail

/// Minimizes the discrete energy with Dirichlet values taken from
/// `dirichlet` on the boundary nodes. The interior starts at the mean of
/// the boundary values.
inline std::pair<VectorField, SolveReport> solve_elliptic(const NFunction& nf, const UniformGrid& grid, int components,
                                                          const BoundaryData& dirichlet, const SolveConfig& cfg) {
    const auto t_start = std::chrono::steady_clock::now();
    VectorField u(grid, components);
    std::vector<double> mean(static_cast<std::size_t>(components), 0.0);
    std::size_t nb = 0;
    for (std::size_t c = 0; c < grid.cells(); ++c) {
        if (!grid.on_boundary(grid.unflat(c))) continue;
        dirichlet(grid.position(c), u.at(c));
        for (int k = 0; k < components; ++k) {
            if (!std::isfinite(u(c, k))) throw DomainError("non-finite boundary value");
            mean[k] += u(c, k);
        }
        ++nb;
    }
    for (std::size_t c = 0; c < grid.cells(); ++c) {
        if (grid.on_boundary(grid.unflat(c))) continue;
        for (int k = 0; k < components; ++k) u(c, k) = mean[k] / static_cast<double>(nb);
    }

    const KuhnMesh mesh(grid);
    SolveReport report;
    detail::run_continuation(nf, mesh, components, u.values(), nullptr, 1.0, detail::data_scale(u), cfg, report);
    report.energy = energy(nf, u);
    report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    if (!report.converged) {
        throw NonConvergence("elliptic solve did not reach the residual tolerance (residual " +
                                 std::to_string(report.residual) + ")",
                             u, report);
    }
    return {std::move(u), std::move(report)};
}

/// Implicit Euler: frame k+1 minimizes E(w) + |w - u_k|^2 h^n / (2 tau),
/// with boundary values held at those of `initial`.
inline std::pair<SpaceTimeField, SolveReport> solve_parabolic(const NFunction& nf, const VectorField& initial,
                                                              const BoundaryData& dirichlet, double tau, int steps,
                                                              const SolveConfig& cfg) {
    if (!(tau > 0.0)) throw DomainError("time step must be positive");
    if (steps < 1) throw DomainError("need at least one time step");
    const auto t_start = std::chrono::steady_clock::now();
    const UniformGrid& grid = initial.grid();
    const int m = initial.components();
    {
        std::vector<double> b(static_cast<std::size_t>(m));
        for (std::size_t c = 0; c < grid.cells(); ++c) {
            if (!grid.on_boundary(grid.unflat(c))) continue;
            dirichlet(grid.position(c), b);
            for (int k = 0; k < m; ++k) {
                if (std::abs(b[k] - initial(c, k)) > 1e-12 * (1.0 + std::abs(b[k]))) {
                    throw PreconditionError("initial data does not match the boundary values");
                }
            }
        }
    }
    const KuhnMesh mesh(grid);
    const double scale = detail::data_scale(initial);
    const detail::Objective exact(nf, mesh, m, 0.0);
    SolveReport report;
    std::vector<VectorField> frames{initial};
    frames.reserve(static_cast<std::size_t>(steps) + 1);
    double residual_max = 0.0;
    for (int k = 0; k < steps; ++k) {
        const std::vector<double>& prev = frames.back().values();
        std::vector<double> next = prev;
        SolveReport step_report;
        SolveConfig step_cfg = cfg;
        step_cfg.max_iters = cfg.max_iters;
        detail::run_continuation(nf, mesh, m, next, &prev, tau, scale, step_cfg, step_report);
        report.iterations += step_report.iterations;
        residual_max = std::max(residual_max, step_report.residual);
        if (report.eps_schedule.empty()) report.eps_schedule = step_report.eps_schedule;
        double jump = 0.0;
        for (std::size_t i = 0; i < next.size(); ++i) jump += (next[i] - prev[i]) * (next[i] - prev[i]);
        report.dissipation.emplace_back(exact.gradient_energy(next) + 0.5 * grid.cell_volume() * jump / tau,
                                        exact.gradient_energy(prev));
        frames.emplace_back(grid, m, std::move(next));
        if (!step_report.converged) {
            report.residual = residual_max;
            report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
            throw NonConvergence("parabolic step " + std::to_string(k + 1) + " did not converge", frames.back(),
                                 report);
        }
    }
    report.residual = residual_max;
    report.converged = true;
    report.energy = energy(nf, frames.back());
    report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return {SpaceTimeField(tau, std::move(frames)), std::move(report)};
}

// ---------------------------------------------------------------------------
// Boundary presets

struct Preset {
    std::string name;
    BoundaryData data;
    /// Exact solution when one is known for the given N-function.
    std::function<bool(const NFunction&)> exact_for;
};

/// Named boundary data: affine, quadratic (x1^2 - x2^2), exp (e^x1 cos x2),
/// sine (prod sin(pi x_a)), zero. Scalar unless noted.
inline Preset boundary_preset(const std::string& name, int dim) {
    auto is_p2 = [](const NFunction& nf) { return nf.power_exponent() == 2.0; };
    if (name == "affine") {
        return {name,
                [](const Point& x, std::span<double> out) {
                    out[0] = 0.3 + 1.0 * x[0] - 0.5 * x[1] + 0.25 * x[2];
                    for (std::size_t k = 1; k < out.size(); ++k) out[k] = 0.1 * k - 0.4 * x[0] + 0.7 * k * x[1];
                },
                [](const NFunction&) { return true; }};
    }
    if (name == "quadratic") {
        if (dim < 2) throw ConfigError("quadratic preset needs dim >= 2");
        return {name,
                [](const Point& x, std::span<double> out) {
                    for (double& o : out) o = x[0] * x[0] - x[1] * x[1];
                },
                is_p2};
    }
    if (name == "exp") {
        if (dim < 2) throw ConfigError("exp preset needs dim >= 2");
        return {name,
                [](const Point& x, std::span<double> out) {
                    for (double& o : out) o = std::exp(x[0]) * std::cos(x[1]);
                },
                is_p2};
    }
    if (name == "sine") {
        return {name,
                [dim](const Point& x, std::span<double> out) {
                    double v = 1.0;
                    for (int a = 0; a < dim; ++a) v *= std::sin(M_PI * x[a]);
                    for (double& o : out) o = v;
                },
                [](const NFunction&) { return false; }};
    }
    if (name == "zero") {
        return {name, [](const Point&, std::span<double> out) { std::fill(out.begin(), out.end(), 0.0); },
                [](const NFunction&) { return true; }};
    }
    throw ConfigError("unknown boundary preset: " + name);
}

}  // namespace orlicz
