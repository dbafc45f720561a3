#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "orlicz/cutoff.hpp"
#include "orlicz/field_io.hpp"
#include "orlicz/fields.hpp"

using namespace orlicz;

TEST(Grid, IndexRoundTrip) {
    const UniformGrid g(3, {4, 5, 6}, 0.5, {-1, 0, 2});
    for (std::size_t c = 0; c < g.cells(); ++c) EXPECT_EQ(g.flat(g.unflat(c)), c);
    EXPECT_EQ(g.cells(), 120u);
    const Point x = g.position(Index{1, 2, 3});
    EXPECT_DOUBLE_EQ(x[0], -0.5);
    EXPECT_DOUBLE_EQ(x[1], 1.0);
    EXPECT_DOUBLE_EQ(x[2], 3.5);
    EXPECT_TRUE(g.on_boundary({0, 2, 3}));
    EXPECT_FALSE(g.on_boundary({1, 2, 3}));
}

TEST(Grid, RejectsBadShapes) {
    EXPECT_THROW(UniformGrid(4, {3, 3, 3}, 1.0), DomainError);
    EXPECT_THROW(UniformGrid(2, {2, 3, 1}, 1.0), DomainError);
    EXPECT_THROW(UniformGrid(2, {3, 3, 1}, 0.0), DomainError);
}

TEST(Gradient, ExactForQuadratics) {
    const UniformGrid g = UniformGrid::cube(2, 9, -1, 1);
    const VectorField u = VectorField::sample_scalar(g, [](const Point& x) { return x[0] * x[0] - 3 * x[0] * x[1] + x[1]; });
    const GradientField du = gradient(u);
    for (std::size_t c = 0; c < g.cells(); ++c) {
        const Point x = g.position(c);
        EXPECT_NEAR(du(c, 0, 0), 2 * x[0] - 3 * x[1], 1e-12);
        EXPECT_NEAR(du(c, 0, 1), -3 * x[0] + 1, 1e-12);
    }
}

TEST(Gradient, VectorFieldMagnitude) {
    const UniformGrid g = UniformGrid::cube(2, 5, 0, 1);
    const VectorField u = VectorField::sample(g, 2, [](const Point& x, std::span<double> out) {
        out[0] = 3 * x[0];
        out[1] = 4 * x[1];
    });
    for (double v : gradient(u).magnitude()) EXPECT_NEAR(v, 5.0, 1e-12);
}

TEST(Regions, AveragedIntegralOfConstant) {
    const UniformGrid g = UniformGrid::cube(2, 33, -1, 1);
    const std::vector<double> f(g.cells(), 3.5);
    EXPECT_DOUBLE_EQ(avg_integral(g, std::span<const double>(f), Ball{{0, 0, 0}, 0.5}), 3.5);
    EXPECT_THROW(avg_integral(g, std::span<const double>(f), Ball{{5, 5, 0}, 0.1}), EmptyRegionError);
}

TEST(Regions, AveragedQuadraticOverBall) {
    // avg over B(0,R) of |x|^2 = R^2/2 in 2D
    const UniformGrid g = UniformGrid::cube(2, 257, -1, 1);
    std::vector<double> f(g.cells());
    for (std::size_t c = 0; c < g.cells(); ++c) {
        const Point x = g.position(c);
        f[c] = x[0] * x[0] + x[1] * x[1];
    }
    EXPECT_NEAR(avg_integral(g, std::span<const double>(f), Ball{{0, 0, 0}, 0.8}), 0.32, 0.32 * 0.02);
}

TEST(DifferenceQuotient, LinearFieldGivesSlope) {
    const UniformGrid g = UniformGrid::cube(2, 11, 0, 1);
    const VectorField u = VectorField::sample_scalar(g, [](const Point& x) { return 2 * x[0] - x[1]; });
    for (int s : {1, 3, -2}) {
        const VectorField d0 = difference_quotient(u, 0, s);
        const VectorField d1 = difference_quotient(u, 1, s);
        for (double v : d0.values()) EXPECT_NEAR(v, 2.0, 1e-12);
        for (double v : d1.values()) EXPECT_NEAR(v, -1.0, 1e-12);
        EXPECT_EQ(d0.grid().extent(0), 11 - std::abs(s));
    }
    EXPECT_THROW(difference_quotient(u, 0, 0), DomainError);
    EXPECT_THROW(difference_quotient(u, 0, 9), DomainError);
}

TEST(Cutoff, RampProperties) {
    EXPECT_EQ(quintic_ramp(-0.1), 1.0);
    EXPECT_EQ(quintic_ramp(1.2), 0.0);
    EXPECT_NEAR(quintic_ramp(0.5), 0.5, 1e-15);
    double max_slope = 0.0;
    for (int i = 0; i <= 1000; ++i) max_slope = std::max(max_slope, std::abs(quintic_ramp_slope(i / 1000.0)));
    EXPECT_NEAR(max_slope, kQuinticMaxSlope, 1e-12);
}

TEST(Cutoff, SupportAndGradientBound) {
    const Cutoff z({0, 0, 0}, 0.5, 1.0, 3.0);
    EXPECT_EQ(z.value({0.3, 0.3, 0}, 2), 1.0);
    EXPECT_EQ(z.value({1.0, 0.1, 0}, 2), 0.0);
    const UniformGrid g = UniformGrid::cube(2, 41, -1.2, 1.2);
    for (std::size_t c = 0; c < g.cells(); ++c) {
        const Point gr = z.gradient(g.position(c), 2);
        EXPECT_LE(std::hypot(gr[0], gr[1]), z.gradient_bound() + 1e-12);
    }
    EXPECT_THROW(Cutoff({0, 0, 0}, 1.0, 0.5, 3.0), DomainError);
    EXPECT_THROW(Cutoff({0, 0, 0}, 0.5, 1.0, 2.0), DomainError);
}

TEST(Cutoff, GradientMatchesFiniteDifferences) {
    const Cutoff z({0.1, -0.2, 0}, 0.3, 0.9, 4.0);
    const Point x{0.5, 0.2, 0};
    const Point gr = z.gradient(x, 2);
    const double h = 1e-6;
    EXPECT_NEAR(gr[0], (z.value({x[0] + h, x[1], 0}, 2) - z.value({x[0] - h, x[1], 0}, 2)) / (2 * h), 1e-7);
    EXPECT_NEAR(gr[1], (z.value({x[0], x[1] + h, 0}, 2) - z.value({x[0], x[1] - h, 0}, 2)) / (2 * h), 1e-7);
}

TEST(Cutoff, SequenceIsNestedWithDyadicGradients) {
    const UniformGrid g = UniformGrid::cube(2, 129, -1, 1);
    const Ball ball{{0, 0, 0}, 0.4};
    const auto seq = make_cutoff_sequence(ball, 5, 4.0, g);
    ASSERT_EQ(seq.size(), 6u);
    for (std::size_t k = 0; k < seq.size(); ++k) {
        EXPECT_LE(seq[k].gradient_bound(), 3.75 * std::ldexp(1.0, static_cast<int>(k)) / ball.radius + 1e-12);
        if (k + 1 < seq.size()) {
            for (std::size_t c = 0; c < g.cells(); c += 7) {
                const Point x = g.position(c);
                EXPECT_LE(seq[k + 1].value(x, 2), seq[k].value(x, 2));
            }
        }
    }
}

TEST(Cutoff, ResolutionChecks) {
    const UniformGrid g = UniformGrid::cube(2, 9, -1, 1);
    EXPECT_THROW(make_cutoff_sequence(Ball{{0, 0, 0}, 0.6}, 3, 4.0, g), ResolutionError);
    EXPECT_THROW(make_cutoff_sequence(Ball{{0, 0, 0}, 0.2}, 3, 4.0, g), ResolutionError);
    EXPECT_NO_THROW(make_cutoff_sequence(Ball{{0, 0, 0}, 0.5}, 3, 4.0, g));
}

TEST(Cutoff, CylinderSequence) {
    const UniformGrid g = UniformGrid::cube(2, 33, 0, 1);
    std::vector<VectorField> frames(41, VectorField(g, 1));
    const SpaceTimeField st(0.001, frames);
    const Cylinder cyl = Cylinder::with_scaling({0.5, 0.5, 0}, 0.1, 0.02, 0.4);
    const auto seq = make_cylinder_sequence(cyl, 4, 4.0, st);
    EXPECT_EQ(seq.size(), 5u);
    EXPECT_EQ(seq[0].value(0.02, {0.5, 0.5, 0}, 2), 1.0);
    EXPECT_EQ(seq[0].value(0.02 + 0.4 * 0.01 * 2.0, {0.5, 0.5, 0}, 2), 0.0);
    const Cylinder late = Cylinder::with_scaling({0.5, 0.5, 0}, 0.1, 0.038, 0.4);
    EXPECT_THROW(make_cylinder_sequence(late, 4, 4.0, st), ResolutionError);
}

TEST(FieldIO, BinaryRoundTrip) {
    const UniformGrid g(2, {4, 5, 1}, 0.25, {-0.5, 1.0, 0});
    std::vector<VectorField> frames;
    for (int k = 0; k < 3; ++k) {
        frames.push_back(VectorField::sample(g, 2, [k](const Point& x, std::span<double> out) {
            out[0] = x[0] + k;
            out[1] = x[1] * x[0] - k;
        }));
    }
    const FieldFile in{frames, 0.125};
    const FieldFile out = decode_binary(encode_binary(in));
    ASSERT_EQ(out.frames.size(), 3u);
    EXPECT_EQ(out.tau, 0.125);
    EXPECT_TRUE(out.frames[0].grid() == g);
    for (int k = 0; k < 3; ++k) EXPECT_EQ(out.frames[k].values(), frames[k].values());
    EXPECT_THROW(decode_binary("garbage"), ConfigError);
    std::string truncated = encode_binary(in);
    truncated.resize(truncated.size() - 3);
    EXPECT_THROW(decode_binary(truncated), ConfigError);
}

TEST(FieldIO, CsvRoundTripAndAtomicWrite) {
    const UniformGrid g = UniformGrid::cube(2, 4, 0, 1);
    const VectorField u = VectorField::sample_scalar(g, [](const Point& x) { return x[0] - 2 * x[1]; });
    const auto path = std::filesystem::temp_directory_path() / "orlicz_field_test.csv";
    write_field_file(path, FieldFile{{u, u}, 0.5});
    EXPECT_FALSE(std::filesystem::exists(path.string() + ".tmp"));
    const FieldFile back = read_field_file(path);
    ASSERT_EQ(back.frames.size(), 2u);
    EXPECT_DOUBLE_EQ(back.tau, 0.5);
    EXPECT_TRUE(back.frames[1].grid() == g);
    for (std::size_t i = 0; i < u.values().size(); ++i) EXPECT_DOUBLE_EQ(back.frames[1].values()[i], u.values()[i]);
    std::filesystem::remove(path);
}
