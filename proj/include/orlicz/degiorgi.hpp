#pragma once

// Truncation machinery: the fast geometric convergence lemma, level-set
// energies W_k on shrinking balls and cylinders, the energy-inequality
// checkers, and the sup-bound ratios.
//
// Recursion constants hidden in the estimates are fitted per run; the
// checks only ask for no blow-up across k and stability under refinement.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "orlicz/bochner.hpp"
#include "orlicz/cutoff.hpp"
#include "orlicz/errors.hpp"
#include "orlicz/fields.hpp"
#include "orlicz/nfunction.hpp"
#include "orlicz/tensor_maps.hpp"

namespace orlicz {

// ---------------------------------------------------------------------------
// Sequences

struct GeometricBound {
    std::vector<double> bound;     ///< C^{-1/alpha} b^{-(1+k alpha)/alpha^2}
    std::vector<double> sequence;  ///< a_{k+1} = C b^k a_k^{1+alpha}
    bool holds = true;
};

/// Runs the recursion from a0 and compares it with the closed-form bound.
///
/// At the threshold the recursion sits exactly on the bound and any
/// rounding in a_k is amplified by (1 + alpha)^k, so it is evaluated in the
/// normalized variable x_k = a_k / bound_k, which obeys x_{k+1} = x_k^{1+alpha}
/// exactly. a_k is then x_k * bound_k.
inline GeometricBound fast_geometric_bound(double C, double b, double alpha, double a0, int k_max) {
    if (!(C > 0.0) || !(b > 1.0) || !(alpha > 0.0)) throw DomainError("need C > 0, b > 1, alpha > 0");
    if (!(a0 >= 0.0)) throw DomainError("a0 must be non-negative");
    if (k_max < 0) throw DomainError("k_max must be non-negative");
    // base 2 keeps dyadic cases exact
    const double log_c = std::log2(C);
    const double log_b = std::log2(b);
    auto log_bound = [&](int k) { return -log_c / alpha - (1.0 + k * alpha) * log_b / (alpha * alpha); };
    const double x0 = a0 == 0.0 ? 0.0 : std::exp2(std::log2(a0) - log_bound(0));
    if (x0 > 1.0 + 1e-12) throw PreconditionError("a0 exceeds C^{-1/alpha} b^{-1/alpha^2}");

    GeometricBound out;
    double x = std::min(x0, 1.0);
    for (int k = 0; k <= k_max; ++k) {
        const double bk = std::exp2(log_bound(k));
        out.bound.push_back(bk);
        out.sequence.push_back(x * bk);
        if (out.sequence.back() > bk) out.holds = false;
        x = std::pow(x, 1.0 + alpha);
    }
    return out;
}

/// gamma = a0 C^{1/alpha} b^{1/alpha^2}; a0 / gamma sits exactly at the
/// threshold of fast_geometric_bound.
inline double tune_gamma(double C, double b, double alpha, double a0) {
    if (!(C > 0.0) || !(b > 0.0) || !(alpha > 0.0) || !(a0 > 0.0)) throw DomainError("tune_gamma needs positive inputs");
    return a0 * std::pow(C, 1.0 / alpha) * std::pow(b, 1.0 / (alpha * alpha));
}

enum class LevelFunction { square, psi_prime };

struct LevelLemmaResult {
    double worst = 0.0;
    double d = 0.0;  ///< sup h(2t)/h(t) over the sampled range
};

/// max over samples of h(v) / (2^{k+1} (h(v) - h(c_k))_+), c_k = c (1 - 2^-k).
inline LevelLemmaResult level_lemma_check(LevelFunction which, const NFunction& nf, double c, int k,
                                          const std::vector<double>& samples) {
    if (!(c > 0.0) || k < 0) throw DomainError("level lemma needs c > 0 and k >= 0");
    const CompanionPsi psi(nf);
    auto h = [&](double t) { return which == LevelFunction::square ? t * t : psi.derivative(t); };
    const double ck = c * (1.0 - std::ldexp(1.0, -k));
    const double ck1 = c * (1.0 - std::ldexp(1.0, -k - 1));
    const double hk = h(ck);
    LevelLemmaResult res;
    for (double v : samples) {
        if (!(v > ck1)) throw PreconditionError("level lemma sample must exceed c_{k+1}");
        const double gap = std::max(0.0, h(v) - hk);
        const double ratio = h(v) / (std::ldexp(1.0, k + 1) * gap);
        res.worst = std::max(res.worst, ratio);
        res.d = std::max(res.d, h(2.0 * v) / h(v));
    }
    return res;
}

// ---------------------------------------------------------------------------
// Elliptic

namespace detail {

inline std::vector<double> apply_phi(const NFunction& nf, const std::vector<double>& v) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = nf.value(v[i]);
    return out;
}

inline double ratio_or_one(double num, double den) {
    if (num == 0.0 && den == 0.0) return 1.0;
    return num / den;
}

inline double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace detail

struct EnergyPair {
    double lhs = 0.0;
    double rhs = 0.0;
};

/// avg_B |grad(G(v) eta^{q/2})|^2 against avg_B phi(v) chi_{v>gamma} |grad eta|^2,
/// with G(t) = (psi'(t) - psi'(gamma))_+ and eta = 1 on B/2, 0 outside B.
inline EnergyPair elliptic_energy_check(const NFunction& nf, const VectorField& u, const Ball& ball, double gamma,
                                        double q) {
    const UniformGrid& g = u.grid();
    if (2.0 * ball.radius < 8.0 * g.spacing()) throw ResolutionError("ball is less than 8 cells across");
    if (!region_inside_grid(ball.scaled(2.0), g)) throw ResolutionError("2B is not inside the grid");
    const std::vector<double> v = gradient(u).magnitude();
    const CompanionPsi psi(nf);
    const double psi_gamma = psi.derivative(gamma);
    const Cutoff eta(ball.center, 0.5 * ball.radius, ball.radius, q);
    VectorField w(g, 1);
    for (std::size_t c = 0; c < g.cells(); ++c) {
        const double G = std::max(0.0, psi.derivative(v[c]) - psi_gamma);
        w(c, 0) = G * std::pow(eta.value(g.position(c), g.dim()), 0.5 * q);
    }
    const GradientField gw = gradient(w);
    double lhs = 0.0, rhs = 0.0;
    std::size_t count = 0;
    for (std::size_t c = 0; c < g.cells(); ++c) {
        const Point x = g.position(c);
        if (!ball.contains(x, g.dim())) continue;
        ++count;
        double gw2 = 0.0;
        for (int a = 0; a < g.dim(); ++a) gw2 += gw(c, 0, a) * gw(c, 0, a);
        lhs += gw2;
        if (v[c] > gamma) {
            const Point ge = eta.gradient(x, g.dim());
            double ge2 = 0.0;
            for (int a = 0; a < g.dim(); ++a) ge2 += ge[a] * ge[a];
            rhs += nf.value(v[c]) * ge2;
        }
    }
    if (count == 0) throw EmptyRegionError("ball contains no grid nodes");
    return {lhs / count, rhs / count};
}

/// Largest lhs/rhs over a sweep of levels (pairs with rhs = 0 must have lhs = 0).
inline double fit_energy_constant(const NFunction& nf, const VectorField& u, const Ball& ball,
                                  const std::vector<double>& gammas, double q) {
    double fit = 0.0;
    for (double gamma : gammas) {
        const EnergyPair e = elliptic_energy_check(nf, u, ball, gamma, q);
        if (e.rhs > 0.0) {
            fit = std::max(fit, e.lhs / e.rhs);
        } else if (e.lhs > 1e-14) {
            return std::numeric_limits<double>::infinity();
        }
    }
    return fit;
}

struct IterationConfig {
    double gamma_inf = 1.0;
    int k_max = 6;
    double q = 4.0;
    double alpha = 1.0;
    /// Power of alpha dividing rho(v) in the parabolic bound.
    std::optional<double> exponent_e;

    void validate() const {
        if (!(gamma_inf > 0.0)) throw ConfigError("gamma_inf must be positive");
        if (k_max < 3) throw ConfigError("k_max must be at least 3");
        if (!(q > 2.0)) throw ConfigError("q must exceed 2");
        if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
    }
};

struct DeGiorgiReport {
    std::vector<double> W;
    std::vector<double> Y;  ///< parabolic only
    std::vector<double> Z;  ///< parabolic only
    /// C_k = W_{k+1} phi(gamma_inf)^{2/n} / (2^{4k} W_k^{1+2/n}); NaN where W_k = 0.
    std::vector<double> recursion_constants;
    /// Parabolic lemma fits, per k (NaN where W_k = 0).
    std::vector<double> sup_l1_constants;
    std::vector<double> l1_linf_constants;
    double gamma_inf = 0.0;
    double max_over_median = 0.0;
    bool cellwise_monotone = true;
    bool degenerate = false;
    bool passed = false;
    std::string note;
};

namespace detail {

inline void fit_recursion(DeGiorgiReport& rep, double phi_gamma, int dim) {
    const double e = 2.0 / dim;
    std::vector<double> positive;
    rep.recursion_constants.clear();
    for (std::size_t k = 0; k + 1 < rep.W.size(); ++k) {
        if (rep.W[k] > 0.0) {
            const double ck = rep.W[k + 1] * std::pow(phi_gamma, e) /
                              (std::ldexp(1.0, 4 * static_cast<int>(k)) * std::pow(rep.W[k], 1.0 + e));
            rep.recursion_constants.push_back(ck);
            if (ck > 0.0) positive.push_back(ck);
        } else {
            rep.recursion_constants.push_back(std::numeric_limits<double>::quiet_NaN());
        }
    }
    const bool any = std::any_of(rep.W.begin(), rep.W.end(), [](double w) { return w > 0.0; });
    rep.degenerate = !any;
    if (positive.empty()) {
        rep.max_over_median = 1.0;
    } else {
        rep.max_over_median = *std::max_element(positive.begin(), positive.end()) / median(positive);
    }
    rep.passed = rep.degenerate ||
                 (rep.max_over_median <= 1e3 && rep.W.back() <= rep.W.front() && rep.cellwise_monotone);
}

}  // namespace detail

/// W_k = avg_{2B} phi(v) chi_{v > gamma_k} zeta_k^q with gamma_k = gamma_inf (1 - 2^-k).
inline DeGiorgiReport elliptic_wk(const NFunction& nf, const UniformGrid& g, const std::vector<double>& v,
                                  const Ball& ball, const IterationConfig& cfg) {
    cfg.validate();
    if (v.size() != g.cells()) throw DomainError("v does not match the grid");
    const auto cutoffs = make_cutoff_sequence(ball, cfg.k_max, cfg.q, g);
    const auto cells = region_cells(g, ball.scaled(2.0));
    if (cells.empty()) throw EmptyRegionError("2B contains no grid nodes");
    DeGiorgiReport rep;
    rep.gamma_inf = cfg.gamma_inf;
    std::vector<double> prev(cells.size(), 0.0);
    for (int k = 0; k <= cfg.k_max; ++k) {
        const double gamma_k = cfg.gamma_inf * (1.0 - std::ldexp(1.0, -k));
        double sum = 0.0;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const std::size_t c = cells[i];
            double term = 0.0;
            if (v[c] > gamma_k) {
                term = nf.value(v[c]) * std::pow(cutoffs[k].value(g.position(c), g.dim()), cfg.q);
            }
            if (k > 0 && term > prev[i]) rep.cellwise_monotone = false;
            prev[i] = term;
            sum += term;
        }
        rep.W.push_back(sum / static_cast<double>(cells.size()));
    }
    detail::fit_recursion(rep, nf.value(cfg.gamma_inf), g.dim());
    return rep;
}

/// sup_B phi(v) / avg_{2B} phi(v); 0/0 is 1.
inline double verify_elliptic_bound(const NFunction& nf, const UniformGrid& g, const std::vector<double>& v,
                                    const Ball& ball) {
    if (!region_inside_grid(ball.scaled(2.0), g)) throw ResolutionError("2B is not inside the grid");
    const std::vector<double> f = detail::apply_phi(nf, v);
    double sup = 0.0;
    bool any = false;
    for (std::size_t c : region_cells(g, ball)) {
        sup = std::max(sup, f[c]);
        any = true;
    }
    if (!any) throw EmptyRegionError("ball contains no grid nodes");
    return detail::ratio_or_one(sup, avg_integral(g, std::span<const double>(f), ball.scaled(2.0)));
}

/// Fixed point of phi(gamma) = W_0 C^{n/2} 16^{n^2/4}, where C is the
/// largest fitted recursion constant at the current gamma: the level at
/// which W_0 / phi(gamma) meets the fast-convergence threshold.
/// `report_at(gamma)` recomputes the sequences for a given gamma_inf.
template <typename ReportAt>
double tune_gamma_fixed_point(const NFunction& nf, double gamma0, int n, ReportAt&& report_at, int rounds = 5) {
    double gamma = gamma0;
    if (!(gamma > 0.0)) return 1.0;
    for (int it = 0; it < rounds; ++it) {
        const DeGiorgiReport rep = report_at(gamma);
        double c_fit = 0.0;
        for (double ck : rep.recursion_constants) {
            if (std::isfinite(ck)) c_fit = std::max(c_fit, ck);
        }
        if (c_fit == 0.0 || rep.W.front() == 0.0) break;
        const double target = rep.W.front() * std::pow(c_fit, n / 2.0) * std::pow(16.0, n * n / 4.0);
        double lo = 0.0, hi = std::max(gamma, 1.0);
        while (nf.value(hi) < target) hi *= 2.0;
        for (int b = 0; b < 200 && hi - lo > 1e-13 * hi; ++b) {
            const double mid = 0.5 * (lo + hi);
            (nf.value(mid) < target ? lo : hi) = mid;
        }
        gamma = 0.5 * (lo + hi);
    }
    return gamma;
}

inline double auto_gamma(const NFunction& nf, const UniformGrid& g, const std::vector<double>& v, const Ball& ball,
                         IterationConfig cfg) {
    double sup = 0.0;
    for (std::size_t c : region_cells(g, ball.scaled(2.0))) sup = std::max(sup, v[c]);
    return tune_gamma_fixed_point(nf, sup, g.dim(), [&](double gamma) {
        cfg.gamma_inf = gamma;
        return elliptic_wk(nf, g, v, ball, cfg);
    });
}

// ---------------------------------------------------------------------------
// Parabolic

/// Spatial gradient magnitude per frame.
inline Samples gradient_magnitudes(const SpaceTimeField& st) {
    Samples v;
    v.reserve(st.size());
    for (const auto& f : st.frames()) v.push_back(gradient(f).magnitude());
    return v;
}

namespace detail {

/// Averaging domain for the parabolic sequences: the outer cylinder 4Q.
inline MixedDomain cylinder_domain(const SpaceTimeField& st, const Cylinder& cyl) {
    const Cylinder outer = cyl.scaled(4.0);
    MixedDomain dom;
    dom.cell_volume = st.grid().cell_volume();
    dom.tau = st.tau();
    dom.space_measure = static_cast<double>(region_cells(st.grid(), outer.ball).size()) * dom.cell_volume;
    std::size_t frames = 0;
    for (std::size_t k = 0; k < st.size(); ++k) {
        if (outer.contains_time(st.time(k))) ++frames;
    }
    dom.time_measure = static_cast<double>(frames) * st.tau();
    return dom;
}

}  // namespace detail

/// Y_k = ||phi(v) chi_{v>gamma_k}||_{L1(L1)(k)}, Z_k = ||v^2 chi_{v>gamma_k}||_{L1(L1)(k)},
/// W_k = Y_k + Z_k / alpha, plus fits of the two lemma quantities
/// ||v^2 chi||_{Linf(L1)(k+1)} ~ 2^{3k} alpha W_k and
/// ||phi(v) chi||_{L1(L^{n/(n-2)})(k+1)} ~ 2^{3k} W_k.
inline DeGiorgiReport parabolic_sequences(const NFunction& nf, const SpaceTimeField& st, const Cylinder& cyl,
                                          const IterationConfig& cfg) {
    cfg.validate();
    const int n = st.grid().dim();
    if (n < 2) throw DomainError("the parabolic pipeline needs n >= 2");
    const auto cutoffs = make_cylinder_sequence(cyl, cfg.k_max + 1, cfg.q, st);
    const Samples v = gradient_magnitudes(st);
    MixedDomain dom = detail::cylinder_domain(st, cyl);
    const double inner_exp = n == 2 ? kInf : static_cast<double>(n) / (n - 2);

    DeGiorgiReport rep;
    rep.gamma_inf = cfg.gamma_inf;
    if (n == 2) rep.note = "n = 2: inner exponent n/(n-2) taken as infinity";
    Samples phi_chi(v.size()), v2_chi(v.size());
    auto levels = [&](double gamma) {
        for (std::size_t k = 0; k < v.size(); ++k) {
            phi_chi[k].resize(v[k].size());
            v2_chi[k].resize(v[k].size());
            for (std::size_t c = 0; c < v[k].size(); ++c) {
                const bool in = v[k][c] > gamma;
                phi_chi[k][c] = in ? nf.value(v[k][c]) : 0.0;
                v2_chi[k][c] = in ? v[k][c] * v[k][c] : 0.0;
            }
        }
    };
    Samples prev_terms;
    for (int k = 0; k <= cfg.k_max; ++k) {
        const double gamma_k = cfg.gamma_inf * (1.0 - std::ldexp(1.0, -k));
        levels(gamma_k);
        dom.weight = cutoffs[k].sample_weight(st);
        const double y = mixed_norm(phi_chi, {1.0, 1.0}, dom);
        const double z = mixed_norm(v2_chi, {1.0, 1.0}, dom);
        rep.Y.push_back(y);
        rep.Z.push_back(z);
        rep.W.push_back(y + z / cfg.alpha);
        // per-node monotonicity of the integrand
        Samples terms(v.size());
        for (std::size_t f = 0; f < v.size(); ++f) {
            terms[f].resize(v[f].size());
            for (std::size_t c = 0; c < v[f].size(); ++c) {
                terms[f][c] = (phi_chi[f][c] + v2_chi[f][c] / cfg.alpha) * dom.weight[f][c];
                if (k > 0 && terms[f][c] > prev_terms[f][c]) rep.cellwise_monotone = false;
            }
        }
        prev_terms = std::move(terms);

        dom.weight = cutoffs[k + 1].sample_weight(st);
        const double w = rep.W.back();
        const double scale = std::ldexp(1.0, 3 * k);
        const double sup_l1 = mixed_norm(v2_chi, {kInf, 1.0}, dom);
        const double l1_linf = mixed_norm(phi_chi, {1.0, inner_exp}, dom);
        const double nan = std::numeric_limits<double>::quiet_NaN();
        rep.sup_l1_constants.push_back(w > 0.0 ? sup_l1 / (scale * cfg.alpha * w) : nan);
        rep.l1_linf_constants.push_back(w > 0.0 ? l1_linf / (scale * w) : nan);
    }
    detail::fit_recursion(rep, nf.value(cfg.gamma_inf), n);
    return rep;
}

/// rho(t) = (phi(t) t^{4/n - 2})^{n/2}.
inline double rho(const NFunction& nf, double t, int n) {
    if (t == 0.0) return 0.0;
    return std::pow(nf.value(t) * std::pow(t, 4.0 / n - 2.0), n / 2.0);
}

struct ParabolicBound {
    double ratio = 1.0;
    double exponent_e = 0.0;
    double ratio_alt = 1.0;  ///< with the other exponent variant
    double exponent_alt = 0.0;
};

/// sup_Q min{rho(v)/alpha^e, v^2/alpha} / avg_{2Q}(v^2/alpha + phi(v)).
/// Default e = (2-n)/2; the variant (2-n)/n is reported alongside.
inline ParabolicBound verify_parabolic_bound(const NFunction& nf, const SpaceTimeField& st, const Cylinder& cyl,
                                             const IterationConfig& cfg) {
    const UniformGrid& g = st.grid();
    const int n = g.dim();
    if (n < 2) throw DomainError("the parabolic pipeline needs n >= 2");
    const Cylinder twice = cyl.scaled(2.0);
    if (!region_inside_grid(twice.ball, g)) throw ResolutionError("2Q is not inside the spatial grid");
    if (twice.t_center - twice.half_time < st.time(0) - 1e-12 ||
        twice.t_center + twice.half_time > st.time(st.size() - 1) + 1e-12) {
        throw ResolutionError("2Q is not inside the time interval");
    }
    const Samples v = gradient_magnitudes(st);
    double vmax = 0.0;
    for (const auto& f : v) vmax = std::max(vmax, *std::max_element(f.begin(), f.end()));
    if (vmax > 0.0) {
        double last = 0.0;
        for (double t : log_grid(vmax * 1e-6, vmax, 64)) {
            const double r = rho(nf, t, n);
            if (r < last) throw AssumptionError("rho is not increasing on the range of v");
            last = r;
        }
    }
    ParabolicBound out;
    out.exponent_e = cfg.exponent_e.value_or((2.0 - n) / 2.0);
    out.exponent_alt = out.exponent_e == (2.0 - n) / 2.0 ? (2.0 - n) / n : (2.0 - n) / 2.0;
    const double a = cfg.alpha;

    Samples den(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) {
        den[k].resize(v[k].size());
        for (std::size_t c = 0; c < v[k].size(); ++c) den[k][c] = v[k][c] * v[k][c] / a + nf.value(v[k][c]);
    }
    const double avg = avg_integral(st, den, twice);
    auto sup_for = [&](double e) {
        double sup = 0.0;
        bool any = false;
        const auto cells = region_cells(g, cyl.ball);
        for (std::size_t k = 0; k < v.size(); ++k) {
            if (!cyl.contains_time(st.time(k))) continue;
            for (std::size_t c : cells) {
                const double x = v[k][c];
                sup = std::max(sup, std::min(rho(nf, x, n) / std::pow(a, e), x * x / a));
                any = true;
            }
        }
        if (!any) throw EmptyRegionError("cylinder contains no space-time nodes");
        return sup;
    };
    out.ratio = detail::ratio_or_one(sup_for(out.exponent_e), avg);
    out.ratio_alt = detail::ratio_or_one(sup_for(out.exponent_alt), avg);
    return out;
}

// ---------------------------------------------------------------------------
// Difference quotients

struct DifferenceBand {
    std::vector<double> h;
    std::vector<double> ratio;
    double lo = 0.0;
    double hi = 0.0;
    double slope = 0.0;  ///< least-squares slope of log ratio against log h
};

/// For each step s (in grid spacings), avg_Q |tau_h V(grad u)|^2 over all
/// axes divided by (h^2/R^2) avg_{5Q} |V(grad u)|^2, with h = s * spacing.
inline DifferenceBand difference_quotient_check(const NFunction& nf, const VectorField& u, const Cube& cube,
                                                const std::vector<int>& steps) {
    const UniformGrid& g = u.grid();
    if (!region_inside_grid(cube.scaled(5.0), g)) throw ResolutionError("5Q is not inside the grid");
    if (steps.empty()) throw DomainError("need at least one step");
    const GradientField grad = gradient(u);
    const std::size_t block = grad.block();
    std::vector<double> V(g.cells() * block);
    for (std::size_t c = 0; c < g.cells(); ++c) {
        const Matrix m = V_map(nf, grad.at(c));
        for (std::size_t k = 0; k < block; ++k) V[c * block + k] = m[k];
    }
    std::vector<double> v2(g.cells());
    for (std::size_t c = 0; c < g.cells(); ++c) {
        double s = 0.0;
        for (std::size_t k = 0; k < block; ++k) s += V[c * block + k] * V[c * block + k];
        v2[c] = s;
    }
    const double rhs_avg = avg_integral(g, std::span<const double>(v2), cube.scaled(5.0));
    const auto cells = region_cells(g, cube);
    if (cells.empty()) throw EmptyRegionError("cube contains no grid nodes");

    DifferenceBand band;
    for (int s : steps) {
        if (s <= 0) throw DomainError("steps must be positive");
        const double h = s * g.spacing();
        if (h > 4.0 * cube.half_width) throw ResolutionError("step leaves 5Q");
        double lhs = 0.0;
        for (std::size_t c : cells) {
            Index i = g.unflat(c);
            for (int a = 0; a < g.dim(); ++a) {
                Index j = i;
                j[a] += s;
                const std::size_t cj = g.flat(j);
                for (std::size_t k = 0; k < block; ++k) {
                    const double d = V[cj * block + k] - V[c * block + k];
                    lhs += d * d;
                }
            }
        }
        lhs /= static_cast<double>(cells.size());
        const double rhs = h * h / (cube.half_width * cube.half_width) * rhs_avg;
        band.h.push_back(h);
        band.ratio.push_back(detail::ratio_or_one(lhs, rhs));
    }
    band.lo = *std::min_element(band.ratio.begin(), band.ratio.end());
    band.hi = *std::max_element(band.ratio.begin(), band.ratio.end());
    if (band.h.size() >= 2 && band.lo > 0.0) {
        double mx = 0.0, my = 0.0;
        const double n = static_cast<double>(band.h.size());
        for (std::size_t i = 0; i < band.h.size(); ++i) {
            mx += std::log(band.h[i]) / n;
            my += std::log(band.ratio[i]) / n;
        }
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t i = 0; i < band.h.size(); ++i) {
            const double dx = std::log(band.h[i]) - mx;
            sxy += dx * (std::log(band.ratio[i]) - my);
            sxx += dx * dx;
        }
        band.slope = sxy / sxx;
    }
    return band;
}

}  // namespace orlicz
