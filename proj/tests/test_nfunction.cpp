#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "orlicz/nfunction.hpp"

using namespace orlicz;

namespace {

double legendre_sup(const NFunction& nf, double t) {
    // brute-force sup_s (s t - phi(s)) on a fine grid, then golden refinement
    double best_s = 0.0, best = 0.0;
    for (double s = 1e-4; s < 50.0; s *= 1.01) {
        const double v = s * t - nf.value(s);
        if (v > best) {
            best = v;
            best_s = s;
        }
    }
    double lo = best_s / 1.02, hi = best_s * 1.02;
    for (int i = 0; i < 200; ++i) {
        const double a = lo + (hi - lo) * 0.382, b = lo + (hi - lo) * 0.618;
        if (a * t - nf.value(a) > b * t - nf.value(b)) {
            hi = b;
        } else {
            lo = a;
        }
    }
    const double s = 0.5 * (lo + hi);
    return s * t - nf.value(s);
}

}  // namespace

TEST(Power, ClosedForms) {
    for (double p : {1.5, 2.0, 3.0}) {
        const NFunction nf = NFunction::power(p);
        for (double t : {0.25, 1.0, 7.0}) {
            EXPECT_NEAR(phi(nf, t), std::pow(t, p), 1e-12 * std::pow(t, p));
            EXPECT_NEAR(phi_prime(nf, t), p * std::pow(t, p - 1), 1e-12 * p * std::pow(t, p - 1));
            EXPECT_NEAR(phi_second(nf, t), p * (p - 1) * std::pow(t, p - 2), 1e-12 * p * p * std::pow(t, p - 2));
        }
    }
}

TEST(Power, SecondDerivativeAtZero) {
    EXPECT_TRUE(std::isinf(phi_second(NFunction::power(1.5), 0.0)));
    EXPECT_EQ(phi_second(NFunction::power(2.0), 0.0), 2.0);
    EXPECT_EQ(phi_second(NFunction::power(3.0), 0.0), 0.0);
}

TEST(Power, RejectsExponentAtMostOne) {
    EXPECT_THROW(NFunction::power(1.0), DomainError);
    EXPECT_THROW(NFunction::power(0.5), DomainError);
}

TEST(Power, NegativeArgumentRejected) { EXPECT_THROW(phi(NFunction::power(2.0), -1.0), DomainError); }

TEST(Conjugate, PowerClosedForm) {
    // phi(t) = t^2: phi*(t) = t^2 / 4
    EXPECT_NEAR(phi_star(NFunction::power(2.0), 2.0), 1.0, 1e-14);
    // phi(t) = t^3: phi*(t) = 2 (t/3)^{3/2}; at t = 3 this is 2
    EXPECT_NEAR(phi_star(NFunction::power(3.0), 3.0), 2.0, 1e-12);
    EXPECT_EQ(phi_star(NFunction::power(3.0), 0.0), 0.0);
}

TEST(Conjugate, IdentityRatioIsPMinusOne) {
    for (double p : {1.5, 2.0, 3.0}) {
        const NFunction nf = NFunction::power(p);
        for (double s : log_grid(1e-3, 1e3, 100)) EXPECT_NEAR(conjugate_identity_ratio(nf, s), p - 1.0, 1e-8 * (p - 1));
    }
}

TEST(Conjugate, PowerLogMatchesLegendreTransform) {
    const NFunction nf = NFunction::powerlog();
    for (double t : {0.3, 1.0, 2.5}) EXPECT_NEAR(phi_star(nf, t), legendre_sup(nf, t), 1e-7 * (1 + phi_star(nf, t)));
}

TEST(Conjugate, FlatTabulatedSegmentRaises) {
    const NFunction nf = NFunction::tabulated({1.0, 2.0, 3.0, 4.0}, {1.0, 2.0, 2.0, 3.0});
    EXPECT_THROW(phi_star(nf, 2.5), ConjugateError);
    EXPECT_NO_THROW(phi_star(nf, 1.5));
}

TEST(Young, GapNonNegativeOnRandomPairs) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(std::log(1e-2), std::log(1e2));
    for (const NFunction& nf : {NFunction::power(1.5), NFunction::power(3.0), NFunction::powerlog()}) {
        for (int i = 0; i < 300; ++i) {
            const double s = std::exp(u(rng)), t = std::exp(u(rng));
            EXPECT_GE(young_gap(nf, s, t), -1e-9 * (1 + s * t));
        }
    }
}

TEST(Young, EqualityAtDerivative) {
    for (const NFunction& nf : {NFunction::power(1.5), NFunction::power(3.0), NFunction::powerlog()}) {
        for (double s : {0.1, 1.0, 4.0}) {
            const double t = phi_prime(nf, s);
            EXPECT_NEAR(young_gap(nf, s, t), 0.0, 1e-8 * (1 + s * t));
        }
    }
}

TEST(Delta2, PowerConstantAndBands) {
    for (double p : {1.5, 2.0, 3.0}) {
        const Delta2Report r = delta2_estimate(NFunction::power(p), 1e-3, 1e3, 64);
        EXPECT_NEAR(r.constant, std::pow(2.0, p), 1e-9);
        EXPECT_NEAR(r.assumption_band.lo, p - 1, 1e-9);
        EXPECT_NEAR(r.assumption_band.hi, p - 1, 1e-9);
        EXPECT_NEAR(r.growth_band.lo, p, 1e-9);
    }
}

TEST(Delta2, PowerLogBetweenTwoAndFour) {
    // phi(2t)/phi(t) = 2 log(1+2t)/log(1+t) decreases from 4 (t -> 0) to 2
    const Delta2Report r = delta2_estimate(NFunction::powerlog(), 1e-3, 1e3, 64);
    EXPECT_GT(r.constant, 3.99);
    EXPECT_LE(r.constant, 4.0);
    EXPECT_GT(r.assumption_band.lo, 0.0);
    EXPECT_LT(r.assumption_band.hi, 1.0 + 1e-9);
}

TEST(Delta2, TooFewSamples) { EXPECT_THROW(delta2_estimate(NFunction::power(2), 1, 2, 4), DomainError); }

TEST(PowerLog, DerivativesMatchFiniteDifferences) {
    const NFunction nf = NFunction::powerlog(0.5);
    for (double t : {0.2, 1.0, 9.0}) {
        const double h = 1e-5 * t;
        EXPECT_NEAR(phi_prime(nf, t), (phi(nf, t + h) - phi(nf, t - h)) / (2 * h), 1e-7 * phi_prime(nf, t));
        EXPECT_NEAR(phi_second(nf, t), (phi_prime(nf, t + h) - phi_prime(nf, t - h)) / (2 * h),
                    1e-6 * phi_second(nf, t));
    }
}

TEST(Tabulated, ReproducesQuadraticFromLinearDerivative) {
    // phi' = 2t is reproduced exactly by the monotone cubic, so phi = t^2.
    const NFunction nf = NFunction::tabulated({0.5, 1.0, 2.0, 4.0}, {1.0, 2.0, 4.0, 8.0});
    for (double t : {0.1, 0.7, 1.5, 3.9}) {
        EXPECT_NEAR(phi_prime(nf, t), 2 * t, 1e-12);
        EXPECT_NEAR(phi(nf, t), t * t, 1e-12);
        EXPECT_NEAR(phi_second(nf, t), 2.0, 1e-10);
    }
}

TEST(Tabulated, ApproximatesPowerOnFineTable) {
    std::vector<double> t, d;
    for (double x : log_grid(1e-3, 10.0, 200)) {
        t.push_back(x);
        d.push_back(2.5 * std::pow(x, 1.5));
    }
    const NFunction nf = NFunction::tabulated(t, d);
    for (double x : {0.05, 0.5, 5.0}) EXPECT_NEAR(phi(nf, x), std::pow(x, 2.5), 1e-4 * std::pow(x, 2.5));
    EXPECT_THROW(phi(nf, 11.0), DomainError);
}

TEST(Tabulated, ValidatesInput) {
    EXPECT_THROW(NFunction::tabulated({1.0, 2.0}, {2.0, 1.0}), DomainError);
    EXPECT_THROW(NFunction::tabulated({2.0, 1.0}, {1.0, 2.0}), DomainError);
    EXPECT_THROW(NFunction::tabulated({0.0, 1.0}, {1.0, 2.0}), DomainError);
    EXPECT_THROW(NFunction::tabulated({1.0}, {1.0, 2.0}), DomainError);
}

TEST(Config, ShorthandAndFiles) {
    EXPECT_EQ(NFunction::from_shorthand("power:2.5")->power_exponent().value(), 2.5);
    EXPECT_TRUE(NFunction::from_shorthand("powerlog").has_value());
    EXPECT_FALSE(NFunction::from_shorthand("nonsense").has_value());

    const auto dir = std::filesystem::temp_directory_path();
    const auto table = dir / "orlicz_test_table.txt";
    {
        std::ofstream f(table);
        f << "# t dphi\n1 2\n2 4\n4 8\n";
    }
    const auto cfg = dir / "orlicz_test_phi.cfg";
    {
        std::ofstream f(cfg);
        f << "family = tabulated\nfile = " << table.string() << "\n";
    }
    const NFunction nf = NFunction::from_config(KeyValueConfig::load(cfg.string()));
    EXPECT_NEAR(phi(nf, 3.0), 9.0, 1e-12);
    EXPECT_THROW(NFunction::from_config(KeyValueConfig::parse("family = cubic\n")), ConfigError);
    std::filesystem::remove(table);
    std::filesystem::remove(cfg);
}

TEST(Luxemburg, PowerIsWeightedLp) {
    const NFunction nf = NFunction::power(3.0);
    EXPECT_NEAR(luxemburg_norm({{2.0, 1.0}}, nf), 2.0, 1e-12);
    const std::vector<std::pair<double, double>> v{{1.0, 0.5}, {2.0, 0.25}, {3.0, 0.25}};
    const double expected = std::cbrt(0.5 + 0.25 * 8 + 0.25 * 27);
    EXPECT_NEAR(luxemburg_norm(v, nf), expected, 1e-11);
    EXPECT_EQ(luxemburg_norm({{0.0, 1.0}}, nf), 0.0);
}

TEST(Luxemburg, HomogeneousForPowerLog) {
    const NFunction nf = NFunction::powerlog();
    const std::vector<std::pair<double, double>> v{{1.0, 0.5}, {3.0, 0.5}};
    std::vector<std::pair<double, double>> v2 = v;
    for (auto& [x, w] : v2) x *= 2.5;
    EXPECT_NEAR(luxemburg_norm(v2, nf), 2.5 * luxemburg_norm(v, nf), 1e-10);
}

TEST(Luxemburg, CappedTableCannotBracket) {
    const NFunction nf = NFunction::tabulated({1e-3, 1e-2}, {1e-6, 1e-5});
    EXPECT_THROW(luxemburg_norm({{1.0, 1.0}}, nf), BracketError);
}

TEST(Shifted, ZeroShiftAndQuadraticCase) {
    const NFunction p3 = NFunction::power(3.0);
    EXPECT_NEAR(ShiftedNFunction(p3, 0.0).value(1.7), phi(p3, 1.7), 1e-12);
    const ShiftedNFunction q(NFunction::power(2.0), 5.0);
    EXPECT_NEAR(q.value(0.3), 0.09, 1e-15);
    EXPECT_NEAR(q.derivative(0.3), 0.6, 1e-14);
}

TEST(Shifted, Delta2BoundedUniformlyInShift) {
    const auto lambdas = log_grid(1e-3, 1e3, 9);
    const auto grid = log_grid(1e-3, 1e3, 25);
    for (double p : {1.5, 3.0}) {
        const ShiftedReport r = shifted_props(NFunction::power(p), lambdas, grid);
        EXPECT_LT(r.delta2_sup, std::pow(2.0, std::max(p, 2.0)) + 1e-6);
        EXPECT_GT(r.epsilon, 0.0);
        EXPECT_GT(r.k2_band.lo, 0.1);
        EXPECT_LT(r.k2_band.hi, 10.0);
    }
}

TEST(Psi, PowerCompanion) {
    const CompanionPsi psi(NFunction::power(3.0));
    EXPECT_NEAR(psi.derivative(4.0), std::sqrt(4.0 * 3.0 * 16.0), 1e-12);
    const PsiReport r = psi_props(NFunction::power(3.0), log_grid(1e-2, 1e2, 20));
    EXPECT_NEAR(r.assumption_band.lo, 1.5, 1e-9);
    EXPECT_NEAR(r.assumption_band.hi, 1.5, 1e-9);
    EXPECT_THROW((void)psi.second_derivative(0.0), SingularPointError);
}

TEST(Psi, ValueMatchesQuadratureOfDerivative) {
    const CompanionPsi psi(NFunction::powerlog());
    const double h = 1e-5;
    EXPECT_NEAR((psi.value(1.0 + h) - psi.value(1.0 - h)) / (2 * h), psi.derivative(1.0), 1e-6);
}

TEST(Inverse, DerivativeRoundTrip) {
    for (const NFunction& nf : {NFunction::power(1.5), NFunction::powerlog()}) {
        for (double s : {0.01, 1.0, 30.0}) EXPECT_NEAR(phi_prime(nf, nf.inverse_derivative(s)), s, 1e-10 * s);
    }
}
