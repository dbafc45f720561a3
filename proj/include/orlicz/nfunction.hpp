#pragma once

// N-functions phi(t) = int_0^t phi'(s) ds, described through their derivative.
//
// Three families are supported:
//   * Power(p):    phi(t) = t^p, p > 1, everything in closed form;
//   * PowerLog:    phi(t) = c * t * log(1 + t);
//   * Tabulated:   phi' given at knots, interpolated by a monotone cubic
//                  (Fritsch-Carlson), phi obtained by integrating the
//                  interpolant segment by segment.
//
// The conjugate phi* is closed form for Power and otherwise computed by
// bisection inversion of phi' followed by quadrature of the inverse.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "orlicz/config.hpp"
#include "orlicz/errors.hpp"
#include "orlicz/quadrature.hpp"

namespace orlicz {

struct Power {
    double p;
};

struct PowerLog {
    double scale = 1.0;
};

/// Monotone cubic interpolant of tabulated (t, phi'(t)) data.
class TabulatedDerivative {
public:
    TabulatedDerivative(std::vector<double> t, std::vector<double> dphi) : t_(std::move(t)), y_(std::move(dphi)) {
        if (t_.size() != y_.size()) throw DomainError("tabulated derivative: column length mismatch");
        if (t_.empty()) throw DomainError("tabulated derivative: empty table");
        if (t_.front() < 0.0) throw DomainError("tabulated derivative: negative abscissa");
        if (t_.front() == 0.0) {
            if (y_.front() != 0.0) throw DomainError("tabulated derivative: phi'(0) must be 0");
        } else {
            t_.insert(t_.begin(), 0.0);
            y_.insert(y_.begin(), 0.0);
        }
        if (t_.size() < 2) throw DomainError("tabulated derivative: need at least one positive abscissa");
        for (std::size_t i = 1; i < t_.size(); ++i) {
            if (!(t_[i] > t_[i - 1])) throw DomainError("tabulated derivative: abscissae must be strictly increasing");
            if (y_[i] < y_[i - 1]) throw DomainError("tabulated derivative: phi' must be non-decreasing");
            if (!(y_[i] > 0.0)) throw DomainError("tabulated derivative: phi' must be positive for t > 0");
        }
        build_slopes();
        cumulative_.assign(t_.size(), 0.0);
        for (std::size_t i = 0; i + 1 < t_.size(); ++i) {
            cumulative_[i + 1] = cumulative_[i] + segment_integral(i, 1.0);
        }
    }

    [[nodiscard]] double cap() const { return t_.back(); }
    [[nodiscard]] const std::vector<double>& knots() const { return t_; }
    [[nodiscard]] const std::vector<double>& values() const { return y_; }

    [[nodiscard]] double derivative(double t) const {
        const auto [i, x] = locate(t);
        const double h = t_[i + 1] - t_[i];
        const double x2 = x * x;
        const double x3 = x2 * x;
        return (2 * x3 - 3 * x2 + 1) * y_[i] + (x3 - 2 * x2 + x) * h * m_[i] + (-2 * x3 + 3 * x2) * y_[i + 1] +
               (x3 - x2) * h * m_[i + 1];
    }

    [[nodiscard]] double second_derivative(double t) const {
        const auto [i, x] = locate(t);
        const double h = t_[i + 1] - t_[i];
        const double x2 = x * x;
        return (6 * x2 - 6 * x) * y_[i] / h + (3 * x2 - 4 * x + 1) * m_[i] + (-6 * x2 + 6 * x) * y_[i + 1] / h +
               (3 * x2 - 2 * x) * m_[i + 1];
    }

    [[nodiscard]] double value(double t) const {
        const auto [i, x] = locate(t);
        return cumulative_[i] + segment_integral(i, x);
    }

    /// True if phi' is constant on a knot interval that intersects [0, t_max].
    [[nodiscard]] bool has_flat_segment_below(double t_max) const {
        for (std::size_t i = 0; i + 1 < t_.size() && t_[i] <= t_max; ++i) {
            const double width = t_[i + 1] - t_[i];
            if (y_[i + 1] <= y_[i] && width > 1e-12 * t_[i + 1]) return true;
        }
        return false;
    }

private:
    std::pair<std::size_t, double> locate(double t) const {
        if (t < 0.0 || t > cap() * (1.0 + 1e-14)) {
            throw DomainError("argument " + std::to_string(t) + " outside tabulated domain [0, " +
                              std::to_string(cap()) + "]");
        }
        t = std::min(t, cap());
        auto it = std::upper_bound(t_.begin(), t_.end(), t);
        std::size_t i = (it == t_.begin()) ? 0 : static_cast<std::size_t>(it - t_.begin()) - 1;
        if (i + 1 >= t_.size()) i = t_.size() - 2;
        const double x = (t - t_[i]) / (t_[i + 1] - t_[i]);
        return {i, x};
    }

    // Integral of the Hermite cubic over [t_i, t_i + x h].
    double segment_integral(std::size_t i, double x) const {
        const double h = t_[i + 1] - t_[i];
        const double x2 = x * x;
        const double x3 = x2 * x;
        const double x4 = x3 * x;
        return h * (y_[i] * (x4 / 2 - x3 + x) + h * m_[i] * (x4 / 4 - 2 * x3 / 3 + x2 / 2) +
                    y_[i + 1] * (-x4 / 2 + x3) + h * m_[i + 1] * (x4 / 4 - x3 / 3));
    }

    void build_slopes() {
        const std::size_t n = t_.size();
        std::vector<double> h(n - 1), d(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            h[i] = t_[i + 1] - t_[i];
            d[i] = (y_[i + 1] - y_[i]) / h[i];
        }
        m_.assign(n, 0.0);
        if (n == 2) {
            m_[0] = m_[1] = d[0];
            return;
        }
        for (std::size_t k = 1; k + 1 < n; ++k) {
            if (d[k - 1] * d[k] <= 0.0) {
                m_[k] = 0.0;
            } else {
                const double w1 = 2 * h[k] + h[k - 1];
                const double w2 = h[k] + 2 * h[k - 1];
                m_[k] = (w1 + w2) / (w1 / d[k - 1] + w2 / d[k]);
            }
        }
        auto end_slope = [](double h0, double h1, double d0, double d1) {
            double m = ((2 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
            if (m * d0 <= 0.0) return 0.0;
            if (d0 * d1 <= 0.0 && std::abs(m) > 3 * std::abs(d0)) return 3 * d0;
            return m;
        };
        m_[0] = end_slope(h[0], h[1], d[0], d[1]);
        m_[n - 1] = end_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
    }

    std::vector<double> t_;
    std::vector<double> y_;
    std::vector<double> m_;
    std::vector<double> cumulative_;
};

class NFunction {
public:
    using Family = std::variant<Power, PowerLog, TabulatedDerivative>;

    static NFunction power(double p) {
        if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("Power N-function needs p > 1");
        return NFunction(Power{p});
    }

    static NFunction powerlog(double scale = 1.0) {
        if (!(scale > 0.0)) throw DomainError("PowerLog scale must be positive");
        return NFunction(PowerLog{scale});
    }

    static NFunction tabulated(std::vector<double> t, std::vector<double> dphi) {
        return NFunction(TabulatedDerivative(std::move(t), std::move(dphi)));
    }

    /// Two-column text table `t phi'(t)`; blank lines and `#` comments ignored.
    static NFunction from_table_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open derivative table: " + path);
        std::vector<double> t, d;
        std::string line;
        while (std::getline(in, line)) {
            if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            for (char& c : line) {
                if (c == ',') c = ' ';
            }
            std::istringstream row(line);
            double a = 0.0, b = 0.0;
            if (!(row >> a)) continue;
            if (!(row >> b)) throw ConfigError("derivative table row needs two columns: " + line);
            t.push_back(a);
            d.push_back(b);
        }
        return tabulated(std::move(t), std::move(d));
    }

    /// `family = power|powerlog|tabulated`, with `p`, `scale` or `file`.
    static NFunction from_config(const KeyValueConfig& cfg) {
        const std::string family = cfg.require("family");
        if (family == "power") return power(cfg.require_double("p"));
        if (family == "powerlog") return powerlog(cfg.get_double("scale", 1.0));
        if (family == "tabulated") return from_table_file(cfg.require("file"));
        throw ConfigError("unknown N-function family: " + family);
    }

    /// Shorthand `power:2.5`, `powerlog`, `powerlog:0.5`, `tabulated:<path>`.
    static std::optional<NFunction> from_shorthand(const std::string& text) {
        const auto colon = text.find(':');
        const std::string head = text.substr(0, colon);
        const std::string tail = colon == std::string::npos ? std::string{} : text.substr(colon + 1);
        KeyValueConfig cfg;
        if (head == "power" && !tail.empty()) {
            cfg.set("family", "power");
            cfg.set("p", tail);
        } else if (head == "powerlog") {
            cfg.set("family", "powerlog");
            if (!tail.empty()) cfg.set("scale", tail);
        } else if (head == "tabulated" && !tail.empty()) {
            cfg.set("family", "tabulated");
            cfg.set("file", tail);
        } else {
            return std::nullopt;
        }
        return from_config(cfg);
    }

    [[nodiscard]] const Family& family() const { return family_; }

    [[nodiscard]] std::optional<double> power_exponent() const {
        if (const auto* pw = std::get_if<Power>(&family_)) return pw->p;
        return std::nullopt;
    }

    [[nodiscard]] std::string describe() const {
        return std::visit(
            [](const auto& f) -> std::string {
                using T = std::decay_t<decltype(f)>;
                std::ostringstream os;
                if constexpr (std::is_same_v<T, Power>) {
                    os << "power:" << f.p;
                } else if constexpr (std::is_same_v<T, PowerLog>) {
                    os << "powerlog:" << f.scale;
                } else {
                    os << "tabulated[" << f.knots().size() << " knots]";
                }
                return os.str();
            },
            family_);
    }

    [[nodiscard]] double domain_cap() const {
        if (const auto* tab = std::get_if<TabulatedDerivative>(&family_)) return tab->cap();
        return std::numeric_limits<double>::infinity();
    }

    [[nodiscard]] double value(double t) const {
        check_argument(t);
        return std::visit(
            [t](const auto& f) -> double {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, Power>) {
                    return std::pow(t, f.p);
                } else if constexpr (std::is_same_v<T, PowerLog>) {
                    return f.scale * t * std::log1p(t);
                } else {
                    return f.value(t);
                }
            },
            family_);
    }

    [[nodiscard]] double derivative(double t) const {
        check_argument(t);
        return std::visit(
            [t](const auto& f) -> double {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, Power>) {
                    return f.p * std::pow(t, f.p - 1.0);
                } else if constexpr (std::is_same_v<T, PowerLog>) {
                    return f.scale * (std::log1p(t) + t / (1.0 + t));
                } else {
                    return f.derivative(t);
                }
            },
            family_);
    }

    [[nodiscard]] double second_derivative(double t) const {
        check_argument(t);
        return std::visit(
            [t](const auto& f) -> double {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, Power>) {
                    if (t == 0.0) {
                        if (f.p < 2.0) return std::numeric_limits<double>::infinity();
                        return f.p == 2.0 ? 2.0 : 0.0;
                    }
                    return f.p * (f.p - 1.0) * std::pow(t, f.p - 2.0);
                } else if constexpr (std::is_same_v<T, PowerLog>) {
                    const double s = 1.0 + t;
                    return f.scale * (2.0 + t) / (s * s);
                } else {
                    return f.second_derivative(t);
                }
            },
            family_);
    }

    /// (phi')^{-1}(s): bracket by doubling, then safeguarded Newton to full
    /// precision (quadrature over this function needs it smooth to rounding).
    [[nodiscard]] double inverse_derivative(double s) const {
        if (s < 0.0) throw DomainError("inverse derivative of a negative value");
        if (s == 0.0) return 0.0;
        if (const auto p = power_exponent()) return std::pow(s / *p, 1.0 / (*p - 1.0));
        double hi = 1.0;
        const double cap = domain_cap();
        int guard = 0;
        while (derivative(std::min(hi, cap)) < s) {
            if (hi >= cap) throw DomainError("phi' does not reach " + std::to_string(s) + " within the domain");
            hi *= 2.0;
            if (++guard > 2000 || std::isinf(hi)) {
                throw DomainError("(phi')^{-1}(" + std::to_string(s) + ") overflows double");
            }
        }
        hi = std::min(hi, cap);
        const double lo = hi == 1.0 ? 0.0 : 0.5 * hi;
        std::uintmax_t iters = 200;
        return boost::math::tools::newton_raphson_iterate(
            [&](double x) { return std::make_pair(derivative(x) - s, second_derivative(x)); }, 0.5 * (lo + hi), lo, hi,
            std::numeric_limits<double>::digits - 2, iters);
    }

private:
    explicit NFunction(Family f) : family_(std::move(f)) {}

    void check_argument(double t) const {
        if (!(t >= 0.0)) throw DomainError("N-function argument must be non-negative");
        if (t > domain_cap() * (1.0 + 1e-14)) {
            throw DomainError("argument " + std::to_string(t) + " exceeds domain cap " + std::to_string(domain_cap()));
        }
    }

    Family family_;
};

// ---------------------------------------------------------------------------
// Scalar quantities

inline double phi(const NFunction& nf, double t) { return nf.value(t); }
inline double phi_prime(const NFunction& nf, double t) { return nf.derivative(t); }
inline double phi_second(const NFunction& nf, double t) { return nf.second_derivative(t); }

/// Complementary N-function phi*(t) = int_0^t (phi')^{-1}(s) ds.
inline double phi_star(const NFunction& nf, double t) {
    if (!(t >= 0.0)) throw DomainError("phi* argument must be non-negative");
    if (t == 0.0) return 0.0;
    if (const auto p = nf.power_exponent()) {
        const double q = *p / (*p - 1.0);
        return (*p - 1.0) * std::pow(*p, -q) * std::pow(t, q);
    }
    if (const auto* tab = std::get_if<TabulatedDerivative>(&nf.family())) {
        const double s_max = nf.inverse_derivative(t);
        if (tab->has_flat_segment_below(s_max)) {
            throw ConjugateError("tabulated phi' has a flat segment; (phi')^{-1} is not a function there");
        }
        // Integrate knot-to-knot in the dual variable so kinks of the
        // interpolant do not slow down the adaptive rule.
        double total = 0.0;
        double a = 0.0;
        for (double y : tab->values()) {
            if (y <= a) continue;
            const double b = std::min(y, t);
            total += quad::integrate_smooth([&](double s) { return nf.inverse_derivative(s); }, a, b, 1e-11);
            a = b;
            if (a >= t) break;
        }
        return total;
    }
    return quad::integrate_smooth([&](double s) { return nf.inverse_derivative(s); }, 0.0, t, 1e-11);
}

/// phi*(phi'(s)) / phi(s); identically p - 1 for Power(p).
inline double conjugate_identity_ratio(const NFunction& nf, double s) {
    if (!(s > 0.0)) throw DomainError("conjugate identity ratio needs s > 0");
    return phi_star(nf, nf.derivative(s)) / nf.value(s);
}

/// phi(s) + phi*(t) - s t, non-negative by Young's inequality.
inline double young_gap(const NFunction& nf, double s, double t) {
    return nf.value(s) + phi_star(nf, t) - s * t;
}

inline std::vector<double> log_grid(double lo, double hi, int samples) {
    if (!(lo > 0.0) || !(hi > lo) || samples < 2) throw DomainError("log grid needs 0 < lo < hi and >= 2 samples");
    std::vector<double> g(static_cast<std::size_t>(samples));
    const double a = std::log(lo);
    const double b = std::log(hi);
    for (int i = 0; i < samples; ++i) g[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (samples - 1));
    g.front() = lo;
    g.back() = hi;
    return g;
}

struct Band {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double x) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    [[nodiscard]] bool empty() const { return lo > hi; }
};

struct Delta2Report {
    double constant = 1.0;
    double grid_min = 0.0;
    double grid_max = 0.0;
    Band assumption_band;  ///< observed range of phi''(t) t / phi'(t)
    Band growth_band;      ///< observed range of t phi'(t) / phi(t)
};

/// Grid supremum of phi(2t)/phi(t) and the observed band of phi'' t / phi'.
inline Delta2Report delta2_estimate(const NFunction& nf, double t_lo, double t_hi, int samples) {
    if (samples < 16) throw DomainError("delta2_estimate needs at least 16 samples");
    Delta2Report rep;
    rep.grid_min = t_lo;
    rep.grid_max = t_hi;
    rep.constant = 0.0;
    for (double t : log_grid(t_lo, t_hi, samples)) {
        const double value = nf.value(t);
        const double slope = nf.derivative(t);
        rep.constant = std::max(rep.constant, nf.value(2.0 * t) / value);
        rep.assumption_band.add(nf.second_derivative(t) * t / slope);
        rep.growth_band.add(t * slope / value);
    }
    return rep;
}

/// Luxemburg norm inf{t > 0 : sum_i w_i phi(|u_i| / t) <= 1}.
inline double luxemburg_norm(const std::vector<std::pair<double, double>>& values, const NFunction& nf) {
    double vmax = 0.0;
    for (const auto& [v, w] : values) {
        if (!(v >= 0.0) || !(w > 0.0)) throw DomainError("luxemburg_norm needs |u| >= 0 and positive weights");
        vmax = std::max(vmax, v);
    }
    if (vmax == 0.0) return 0.0;
    auto modular = [&](double t) {
        double sum = 0.0;
        for (const auto& [v, w] : values) {
            if (v > 0.0) sum += w * nf.value(v / t);
        }
        return sum;
    };
    // The tabulated family cannot evaluate above its cap, so keep the lower
    // bracket above vmax / cap.
    const double floor_t = std::isfinite(nf.domain_cap()) ? vmax / nf.domain_cap() : 0.0;
    double lo = std::max(vmax, floor_t);
    double hi = lo;
    int doublings = 0;
    while (modular(hi) > 1.0) {
        hi *= 2.0;
        if (++doublings > 200) throw BracketError("luxemburg_norm: upper bracket not found");
    }
    doublings = 0;
    while (modular(lo) <= 1.0) {
        const double next = lo * 0.5;
        if (next < floor_t) {
            lo = floor_t;
            if (modular(lo) <= 1.0) throw BracketError("luxemburg_norm: modular bounded by 1 on the whole domain");
            break;
        }
        lo = next;
        if (++doublings > 200) throw BracketError("luxemburg_norm: lower bracket not found");
    }
    while (hi - lo > 1e-13 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (modular(mid) > 1.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return hi;
}

// ---------------------------------------------------------------------------
// Shifted N-functions and the companion psi

class ShiftedNFunction {
public:
    ShiftedNFunction(NFunction base, double lambda) : base_(std::move(base)), lambda_(lambda) {
        if (!(lambda >= 0.0)) throw DomainError("shift lambda must be non-negative");
    }

    [[nodiscard]] const NFunction& base() const { return base_; }
    [[nodiscard]] double lambda() const { return lambda_; }

    [[nodiscard]] double derivative(double t) const {
        if (lambda_ == 0.0) return base_.derivative(t);
        if (t == 0.0) return 0.0;
        return base_.derivative(lambda_ + t) * t / (lambda_ + t);
    }

    [[nodiscard]] double value(double t) const {
        if (lambda_ == 0.0) return base_.value(t);
        if (!(t >= 0.0)) throw DomainError("shifted N-function argument must be non-negative");
        if (t == 0.0) return 0.0;
        if (const auto p = base_.power_exponent(); p && *p == 2.0) return t * t;
        // the integrand changes scale at s = lambda; put it on an endpoint
        auto f = [this](double s) { return derivative(s); };
        if (t <= lambda_) return quad::integrate_singular(f, 0.0, t, 1e-12);
        return quad::integrate_singular(f, 0.0, lambda_, 1e-12) + quad::integrate_singular(f, lambda_, t, 1e-12);
    }

private:
    NFunction base_;
    double lambda_;
};

/// psi with psi'(t) = sqrt(t phi'(t)).
class CompanionPsi {
public:
    explicit CompanionPsi(NFunction base) : base_(std::move(base)) {}

    [[nodiscard]] const NFunction& base() const { return base_; }

    [[nodiscard]] double derivative(double t) const { return std::sqrt(t * base_.derivative(t)); }

    [[nodiscard]] double second_derivative(double t) const {
        if (!(t > 0.0)) throw SingularPointError("psi'' evaluated at 0");
        const double d = base_.derivative(t);
        return (d + t * base_.second_derivative(t)) / (2.0 * std::sqrt(t * d));
    }

    [[nodiscard]] double value(double t) const {
        if (t == 0.0) return 0.0;
        if (const auto p = base_.power_exponent()) {
            // psi'(t) = sqrt(p) t^{p/2}
            return std::sqrt(*p) * std::pow(t, *p / 2.0 + 1.0) / (*p / 2.0 + 1.0);
        }
        return quad::integrate_singular([this](double s) { return derivative(s); }, 0.0, t, 1e-12);
    }

private:
    NFunction base_;
};

struct ShiftedReport {
    std::vector<double> lambdas;
    std::vector<double> delta2_per_lambda;  ///< sup_t phi_lambda(2t)/phi_lambda(t)
    double delta2_sup = 0.0;
    double epsilon = 0.0;  ///< phi_lambda(kt) <= k^{1+eps} phi_lambda(t) for k in (0,1]
    Band k2_band;          ///< phi_lambda(k lambda) / (k^2 phi(lambda))
};

/// Empirical shifted Delta2 constant, lower growth index and the
/// phi_lambda(k lambda) ~ k^2 phi(lambda) band.
inline ShiftedReport shifted_props(const NFunction& nf, const std::vector<double>& lambdas, const std::vector<double>& grid,
                                   const std::vector<double>& k_grid = log_grid(1e-3, 1.0, 24)) {
    ShiftedReport rep;
    rep.lambdas = lambdas;
    double min_index = std::numeric_limits<double>::infinity();
    for (double lambda : lambdas) {
        const ShiftedNFunction shifted(nf, lambda);
        double sup = 0.0;
        std::vector<double> values(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (!(grid[i] > 0.0)) throw DomainError("shifted_props grid must be positive");
            values[i] = shifted.value(grid[i]);
            sup = std::max(sup, shifted.value(2.0 * grid[i]) / values[i]);
        }
        rep.delta2_per_lambda.push_back(sup);
        rep.delta2_sup = std::max(rep.delta2_sup, sup);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            for (double k : k_grid) {
                if (!(k > 0.0) || k >= 1.0) continue;
                const double ratio = shifted.value(k * grid[i]) / values[i];
                min_index = std::min(min_index, std::log(ratio) / std::log(k));
            }
        }
        if (lambda > 0.0) {
            const double base_value = nf.value(lambda);
            for (double k : k_grid) {
                if (!(k > 0.0) || k > 1.0) continue;
                rep.k2_band.add(shifted.value(k * lambda) / (k * k * base_value));
            }
        }
    }
    rep.epsilon = min_index - 1.0;
    return rep;
}

struct PsiReport {
    Band assumption_band;  ///< psi''(t) t / psi'(t)
    Band curvature_band;   ///< psi''(t) / sqrt(phi''(t))
};

inline PsiReport psi_props(const NFunction& nf, const std::vector<double>& grid) {
    const CompanionPsi psi(nf);
    PsiReport rep;
    for (double t : grid) {
        if (!(t > 0.0)) throw DomainError("psi_props grid must be positive");
        const double second = psi.second_derivative(t);
        rep.assumption_band.add(second * t / psi.derivative(t));
        rep.curvature_band.add(second / std::sqrt(nf.second_derivative(t)));
    }
    return rep;
}

}  // namespace orlicz
