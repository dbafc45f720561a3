#pragma once

// The flux A(Q) = phi'(|Q|)/|Q| Q, the map V(Q) = psi'(|Q|)/|Q| Q, the
// Jacobian of A, and randomized scanners for the comparison relations
// between them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "orlicz/errors.hpp"
#include "orlicz/matrix.hpp"
#include "orlicz/nfunction.hpp"
#include "orlicz/quadrature.hpp"

namespace orlicz {

namespace detail {
inline constexpr double kZeroNorm = 1e-300;
}

/// phi'(t)/t, with the t -> 0 limit where it is finite.
inline double flux_factor(const NFunction& nf, double t) {
    if (t > detail::kZeroNorm) return nf.derivative(t) / t;
    return nf.second_derivative(0.0);
}

inline Matrix A_map(const NFunction& nf, const Matrix& q) {
    const double norm = q.norm();
    if (norm < detail::kZeroNorm) return Matrix(q.rows(), q.cols());
    return q * (nf.derivative(norm) / norm);
}

inline Matrix V_map(const NFunction& nf, const Matrix& q) {
    const double norm = q.norm();
    if (norm < detail::kZeroNorm) return Matrix(q.rows(), q.cols());
    return q * (std::sqrt(norm * nf.derivative(norm)) / norm);
}

/// dA_{kl}/dP_{ij} = phi'(|P|)/|P| (delta_ik delta_jl - P_ij P_kl/|P|^2) + phi''(|P|) P_ij P_kl/|P|^2
inline Tensor4 jacobian_A(const NFunction& nf, const Matrix& p) {
    const double norm = p.norm();
    if (!(norm > 0.0)) throw SingularPointError("Jacobian of A is undefined at P = 0");
    const double a = nf.derivative(norm) / norm;
    const double b = nf.second_derivative(norm);
    const double inv2 = 1.0 / (norm * norm);
    Tensor4 jac(p.rows(), p.cols());
    for (std::size_t i = 0; i < p.rows(); ++i) {
        for (std::size_t j = 0; j < p.cols(); ++j) {
            for (std::size_t k = 0; k < p.rows(); ++k) {
                for (std::size_t l = 0; l < p.cols(); ++l) {
                    const double outer = p(i, j) * p(k, l) * inv2;
                    const double delta = (i == k && j == l) ? 1.0 : 0.0;
                    jac(i, j, k, l) = a * (delta - outer) + b * outer;
                }
            }
        }
    }
    return jac;
}

/// Central finite differences of A_map; used to cross-check jacobian_A.
inline Tensor4 jacobian_A_fd(const NFunction& nf, const Matrix& p, double step) {
    Tensor4 jac(p.rows(), p.cols());
    for (std::size_t i = 0; i < p.rows(); ++i) {
        for (std::size_t j = 0; j < p.cols(); ++j) {
            Matrix plus = p;
            Matrix minus = p;
            plus(i, j) += step;
            minus(i, j) -= step;
            const Matrix diff = (A_map(nf, plus) - A_map(nf, minus)) * (0.5 / step);
            for (std::size_t k = 0; k < p.rows(); ++k) {
                for (std::size_t l = 0; l < p.cols(); ++l) jac(i, j, k, l) = diff(k, l);
            }
        }
    }
    return jac;
}

/// Ratio of int_0^1 phi'(|[P,Q]_s|)/|[P,Q]_s| ds to phi'(|P|+|Q|)/(|P|+|Q|).
inline double segment_integral_check(const NFunction& nf, const Matrix& p, const Matrix& q) {
    const double scale = p.norm() + q.norm();
    if (!(scale > 0.0)) throw DomainError("segment integral needs |P| + |Q| > 0");
    const Matrix dir = p - q;
    const double dd = dot(dir, dir);
    // Split at the point c of the segment closest to the origin, where the
    // integrand peaks (or is singular when phi'(t)/t blows up at 0), and
    // parametrize from c so the peak sits on an endpoint of the
    // double-exponential rule.
    const double split = dd > 0.0 ? std::clamp(-dot(q, dir) / dd, 0.0, 1.0) : 0.0;
    const Matrix c = q + dir * split;
    const double c2 = dot(c, c);
    // c is orthogonal to dir unless the split was clamped to an endpoint
    const double cd = split > 0.0 && split < 1.0 ? 0.0 : dot(c, dir);
    auto integrand = [&](double r) {
        const double t = std::sqrt(std::max(0.0, c2 + r * (2.0 * cd + dd * r)));
        if (t > detail::kZeroNorm) return nf.derivative(t) / t;
        // a node that rounds onto the origin has measure zero
        const double d0 = nf.second_derivative(0.0);
        return std::isfinite(d0) ? d0 : 0.0;
    };
    auto piece = [&](double a, double b) {
        if (b - a <= 0.0) return 0.0;
        return quad::integrate_singular(integrand, a, b, 1e-10);
    };
    const double integral = piece(-split, 0.0) + piece(0.0, 1.0 - split);
    return integral / (nf.derivative(scale) / scale);
}

enum class Relation { b, c, d1, d2, d3, e, segment_integral };

inline std::string_view relation_name(Relation r) {
    switch (r) {
        case Relation::b: return "b";
        case Relation::c: return "c";
        case Relation::d1: return "d1";
        case Relation::d2: return "d2";
        case Relation::d3: return "d3";
        case Relation::e: return "e";
        case Relation::segment_integral: return "segment_integral";
    }
    return "?";
}

inline Relation parse_relation(std::string_view name) {
    for (Relation r : {Relation::b, Relation::c, Relation::d1, Relation::d2, Relation::d3, Relation::e,
                       Relation::segment_integral}) {
        if (relation_name(r) == name) return r;
    }
    throw ConfigError("unknown relation: " + std::string(name));
}

/// True for the two-sided (~) relations; b and e are one-sided (<~).
inline bool is_two_sided(Relation r) { return r != Relation::b && r != Relation::e; }

struct EquivalenceBand {
    Relation which = Relation::b;
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    long samples = 0;
    long skipped = 0;

    [[nodiscard]] bool empty() const { return samples == 0; }
};

struct ScanOptions {
    std::size_t rows = 2;
    std::size_t cols = 2;
    long trials = 1000;
    double scale_lo = 1e-3;  ///< log-uniform overall scale range
    double scale_hi = 1e3;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    /// Force Q = P (only identical pairs); used to exercise the skip path.
    bool identical_pairs = false;
};

namespace detail {

inline Matrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols, double scale) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = scale * unit(rng);
    return m;
}

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    return std::exp(u(rng));
}

// LHS/RHS of the selected relation, or NaN when the instance is skipped.
inline double relation_ratio(const NFunction& nf, Relation which, const Matrix& p, const Matrix& q, const Matrix& r) {
    const Matrix diff = p - q;
    const double dist = diff.norm();
    if (!(dist > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    const double np = p.norm();
    const double sum = np + q.norm();
    switch (which) {
        case Relation::b:
            return (A_map(nf, p) - A_map(nf, q)).norm() / (nf.second_derivative(sum) * dist);
        case Relation::c:
            return nf.second_derivative(sum) * dist / ShiftedNFunction(nf, np).derivative(dist);
        case Relation::d1:
            return dist * dist * nf.second_derivative(sum) / ShiftedNFunction(nf, np).value(dist);
        case Relation::d2: {
            const double vdiff = (V_map(nf, p) - V_map(nf, q)).norm();
            return ShiftedNFunction(nf, np).value(dist) / (vdiff * vdiff);
        }
        case Relation::d3: {
            const double vdiff = (V_map(nf, p) - V_map(nf, q)).norm();
            return vdiff * vdiff / dot(A_map(nf, p) - A_map(nf, q), diff);
        }
        case Relation::e: {
            const double nr = r.norm();
            const ShiftedNFunction shift_r(nf, nr);
            const double rhs = shift_r.derivative((p - r).norm()) + shift_r.derivative((q - r).norm());
            return ShiftedNFunction(nf, np).derivative(dist) / rhs;
        }
        case Relation::segment_integral:
            return segment_integral_check(nf, p, q);
    }
    return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace detail

/// Random scan of one comparison relation; reports the observed ratio band.
///
/// Trials are split into a fixed number of chunks, each with its own
/// generator seeded from (seed, chunk), so the band does not depend on the
/// thread count.
inline EquivalenceBand equivalence_scan(const NFunction& nf, Relation which, const ScanOptions& opt) {
    if (opt.trials < 1) throw DomainError("equivalence_scan needs trials >= 1");
    if (opt.rows < 1 || opt.cols < 1 || opt.rows > 8 || opt.cols > 8) throw DomainError("dims must lie in [1, 8]");
    if (!(opt.scale_lo > 0.0) || !(opt.scale_hi >= opt.scale_lo)) throw DomainError("scale range must be positive");

    constexpr long kChunks = 16;
    std::vector<EquivalenceBand> partial(kChunks);
    auto run_chunk = [&](long chunk) {
        EquivalenceBand band;
        band.which = which;
        std::seed_seq seq{static_cast<std::uint64_t>(opt.seed), static_cast<std::uint64_t>(chunk), std::uint64_t{0x9e37}};
        std::mt19937_64 rng(seq);
        std::uniform_int_distribution<int> mode(0, 2);
        const long begin = opt.trials * chunk / kChunks;
        const long end = opt.trials * (chunk + 1) / kChunks;
        for (long t = begin; t < end; ++t) {
            const Matrix p = detail::random_matrix(rng, opt.rows, opt.cols,
                                                   detail::log_uniform(rng, opt.scale_lo, opt.scale_hi));
            Matrix q;
            if (opt.identical_pairs) {
                q = p;
            } else if (mode(rng) == 0) {
                // near pair: |P - Q| much smaller than |P|
                const double rel = detail::log_uniform(rng, 1e-3, 1.0);
                q = p + detail::random_matrix(rng, opt.rows, opt.cols, rel * p.norm());
            } else {
                q = detail::random_matrix(rng, opt.rows, opt.cols, detail::log_uniform(rng, opt.scale_lo, opt.scale_hi));
            }
            const Matrix r = detail::random_matrix(rng, opt.rows, opt.cols,
                                                   detail::log_uniform(rng, opt.scale_lo, opt.scale_hi));
            const double ratio = detail::relation_ratio(nf, which, p, q, r);
            if (!std::isfinite(ratio)) {
                ++band.skipped;
                continue;
            }
            band.lo = std::min(band.lo, ratio);
            band.hi = std::max(band.hi, ratio);
            ++band.samples;
        }
        partial[static_cast<std::size_t>(chunk)] = band;
    };

    const unsigned threads = std::max(1u, std::min<unsigned>(opt.threads, kChunks));
    if (threads == 1) {
        for (long c = 0; c < kChunks; ++c) run_chunk(c);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < threads; ++w) {
            pool.emplace_back([&, w] {
                for (long c = w; c < kChunks; c += threads) run_chunk(c);
            });
        }
    }

    EquivalenceBand total;
    total.which = which;
    for (const auto& b : partial) {
        total.lo = std::min(total.lo, b.lo);
        total.hi = std::max(total.hi, b.hi);
        total.samples += b.samples;
        total.skipped += b.skipped;
    }
    return total;
}

}  // namespace orlicz
