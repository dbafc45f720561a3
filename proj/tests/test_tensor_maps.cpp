#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "orlicz/tensor_maps.hpp"

using namespace orlicz;

TEST(Maps, ZeroMatrixMapsToZero) {
    const Matrix z(2, 3);
    for (double p : {1.5, 2.0, 3.0}) {
        EXPECT_TRUE(A_map(NFunction::power(p), z).is_zero());
        EXPECT_TRUE(V_map(NFunction::power(p), z).is_zero());
    }
}

TEST(Maps, QuadraticCase) {
    // phi = t^2: A(Q) = 2Q, V(Q) = sqrt(2) Q
    const NFunction nf = NFunction::power(2.0);
    const Matrix q(2, 2, {1.0, -2.0, 0.5, 3.0});
    const Matrix a = A_map(nf, q);
    const Matrix v = V_map(nf, q);
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_NEAR(a[i], 2.0 * q[i], 1e-14);
        EXPECT_NEAR(v[i], std::sqrt(2.0) * q[i], 1e-14);
    }
}

TEST(Maps, PowerScaling) {
    // |A(Q)| = phi'(|Q|), |V(Q)|^2 = |Q| phi'(|Q|)
    const NFunction nf = NFunction::power(3.0);
    const Matrix q(1, 3, {0.3, -0.4, 1.2});
    const double n = q.norm();
    EXPECT_NEAR(A_map(nf, q).norm(), 3 * n * n, 1e-13);
    EXPECT_NEAR(std::pow(V_map(nf, q).norm(), 2), n * 3 * n * n, 1e-12);
}

TEST(Jacobian, SingularAtZero) { EXPECT_THROW(jacobian_A(NFunction::power(2.0), Matrix(2, 2)), SingularPointError); }

TEST(Jacobian, QuadraticIsTwiceIdentity) {
    const Tensor4 j = jacobian_A(NFunction::power(2.0), Matrix(2, 2, {1, 2, 3, 4}));
    for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b)
            for (std::size_t c = 0; c < 2; ++c)
                for (std::size_t d = 0; d < 2; ++d) EXPECT_NEAR(j(a, b, c, d), (a == c && b == d) ? 2.0 : 0.0, 1e-14);
}

TEST(Jacobian, MatchesFiniteDifferences) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (const NFunction& nf : {NFunction::power(1.5), NFunction::power(3.0), NFunction::powerlog()}) {
        for (int t = 0; t < 20; ++t) {
            Matrix p(3, 2);
            for (std::size_t i = 0; i < p.size(); ++i) p[i] = u(rng);
            const Tensor4 exact = jacobian_A(nf, p);
            const Tensor4 fd = jacobian_A_fd(nf, p, 1e-6 * p.norm());
            double scale = 0.0, err = 0.0;
            for (std::size_t a = 0; a < 3; ++a)
                for (std::size_t b = 0; b < 2; ++b)
                    for (std::size_t c = 0; c < 3; ++c)
                        for (std::size_t d = 0; d < 2; ++d) {
                            scale = std::max(scale, std::abs(exact(a, b, c, d)));
                            err = std::max(err, std::abs(exact(a, b, c, d) - fd(a, b, c, d)));
                        }
            EXPECT_LT(err, 1e-5 * scale);
        }
    }
}

TEST(Jacobian, ContractionWithDirection) {
    // B : J : B = phi'/|P| (|B|^2 - (P:B)^2/|P|^2) + phi'' (P:B)^2/|P|^2
    const NFunction nf = NFunction::power(2.5);
    const Matrix p(2, 2, {0.3, 1.0, -0.2, 0.7});
    const Matrix b(2, 2, {1.0, 0.0, 0.5, -1.0});
    const double n = p.norm();
    const double pb = dot(p, b);
    const double expected = nf.derivative(n) / n * (dot(b, b) - pb * pb / (n * n)) + nf.second_derivative(n) * pb * pb / (n * n);
    EXPECT_NEAR(jacobian_A(nf, p).contract(b, b), expected, 1e-12);
}

TEST(SegmentIntegral, QuadraticIsRatioOfConstants) {
    // phi'(t)/t = 2 for phi = t^2, so the ratio is exactly 1
    const NFunction nf = NFunction::power(2.0);
    EXPECT_NEAR(segment_integral_check(nf, Matrix(1, 2, {1, 0}), Matrix(1, 2, {0, 3})), 1.0, 1e-10);
}

TEST(SegmentIntegral, SingularThroughOrigin) {
    // P = -Q passes through 0; for p = 1.5 the integrand blows up like |s - 1/2|^{-1/2}
    const NFunction nf = NFunction::power(1.5);
    const Matrix p(1, 1, {1.0});
    const Matrix q(1, 1, {-1.0});
    // int_0^1 1.5 |2s-1|^{-1/2} ds = 1.5 * 2 = 3; rhs = 1.5 * 2^{-1/2}
    EXPECT_NEAR(segment_integral_check(nf, p, q), 3.0 / (1.5 / std::sqrt(2.0)), 1e-7);
}

TEST(SegmentIntegral, DegenerateRejected) {
    EXPECT_THROW(segment_integral_check(NFunction::power(2), Matrix(1, 1), Matrix(1, 1)), DomainError);
}

TEST(Scan, TwoSidedBandsAreBounded) {
    ScanOptions opt;
    opt.trials = 2000;
    opt.rows = 2;
    opt.cols = 3;
    for (double p : {1.5, 3.0}) {
        const NFunction nf = NFunction::power(p);
        for (Relation r : {Relation::c, Relation::d1, Relation::d2, Relation::d3, Relation::segment_integral}) {
            const EquivalenceBand band = equivalence_scan(nf, r, opt);
            EXPECT_EQ(band.samples, opt.trials) << relation_name(r);
            EXPECT_GT(band.lo, 0.0) << relation_name(r);
            EXPECT_LT(band.hi / band.lo, 1e4) << relation_name(r);
        }
        for (Relation r : {Relation::b, Relation::e}) {
            const EquivalenceBand band = equivalence_scan(nf, r, opt);
            EXPECT_TRUE(std::isfinite(band.hi)) << relation_name(r);
        }
    }
}

TEST(Scan, IdenticalPairsAreSkipped) {
    ScanOptions opt;
    opt.trials = 50;
    opt.identical_pairs = true;
    const EquivalenceBand band = equivalence_scan(NFunction::power(2.0), Relation::c, opt);
    EXPECT_EQ(band.samples, 0);
    EXPECT_EQ(band.skipped, 50);
    EXPECT_TRUE(band.empty());
}

TEST(Scan, DeterministicAcrossThreadCounts) {
    ScanOptions opt;
    opt.trials = 500;
    opt.seed = 99;
    const NFunction nf = NFunction::power(2.5);
    const EquivalenceBand one = equivalence_scan(nf, Relation::d3, opt);
    opt.threads = 4;
    const EquivalenceBand four = equivalence_scan(nf, Relation::d3, opt);
    EXPECT_EQ(one.lo, four.lo);
    EXPECT_EQ(one.hi, four.hi);
}

TEST(Scan, QuadraticRelationsAreExact) {
    // phi = t^2: |A(P)-A(Q)| = 2|P-Q| and phi''(|P|+|Q|)|P-Q| = 2|P-Q|
    ScanOptions opt;
    opt.trials = 200;
    const EquivalenceBand band = equivalence_scan(NFunction::power(2.0), Relation::b, opt);
    EXPECT_NEAR(band.lo, 1.0, 1e-12);
    EXPECT_NEAR(band.hi, 1.0, 1e-12);
}

TEST(Scan, BadInputs) {
    ScanOptions opt;
    opt.trials = 0;
    EXPECT_THROW(equivalence_scan(NFunction::power(2), Relation::b, opt), DomainError);
    EXPECT_THROW(parse_relation("zz"), ConfigError);
    EXPECT_EQ(parse_relation("d2"), Relation::d2);
}
