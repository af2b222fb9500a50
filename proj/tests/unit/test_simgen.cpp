#include <cmath>

#include <gtest/gtest.h>

#include <fusedlasso/error.hpp>
#include <fusedlasso/rng.hpp>
#include <fusedlasso/simgen.hpp>

using namespace fusedlasso;

namespace {

SimConfig config(int n, int p, std::uint64_t seed, double sigma = 1.0) {
    SimConfig c;
    c.n = n;
    c.p = p;
    c.seed = seed;
    c.sigma = sigma;
    return c;
}

} // namespace

TEST(CounterRng, StreamsAreReproducibleAndDistinct) {
    CounterRng a(7, 3), b(7, 3), c(7, 4), d(8, 3);
    for (int i = 0; i < 100; ++i) {
        auto x = a();
        EXPECT_EQ(x, b());
        EXPECT_NE(x, c());
        EXPECT_NE(x, d());
    }
    EXPECT_EQ(a.counter(), 100u);
}

TEST(PaintIntervals, LaterIntervalsOverwriteAndRunsAreClipped) {
    std::vector<double> row(10, 0.0);
    paint_intervals(row, {{2, 5, 3}, {4, 2, -1}, {-2, 5, 2}, {9, 10, 1}});
    EXPECT_EQ(row, (std::vector<double>{2, 2, 3, -1, -1, 3, 0, 0, 1, 1}));
    std::vector<double> empty(4, 0.0);
    paint_intervals(empty, {{3, 0, 5}, {-5, 3, 5}, {11, 2, 5}});
    EXPECT_EQ(empty, (std::vector<double>(4, 0.0)));
}

TEST(PaintBoxes, LaterBoxesOverwrite) {
    std::vector<double> image(9, 0.0);
    paint_boxes(image, 3, {{{1, 2, 5, }, {1, 3, 0}}, {{2, 5, -2}, {3, 1, 0}}});
    EXPECT_EQ(image, (std::vector<double>{5, 5, 5, 5, 5, -2, 0, 0, -2}));
}

TEST(Gen1d, DeterministicGivenSeed) {
    SimInstance a = gen_1d(config(10, 40, 5)), b = gen_1d(config(10, 40, 5)), c = gen_1d(config(10, 40, 6));
    EXPECT_EQ(a.X, b.X);
    EXPECT_EQ(a.y, b.y);
    EXPECT_NE(a.X, c.X);
    EXPECT_EQ(a.graph.edges().size(), 39u);
}

TEST(Gen1d, CentralBlockOfOnes) {
    SimInstance s = gen_1d(config(5, 100, 1));
    EXPECT_EQ(s.metadata.block, 10);
    EXPECT_EQ(s.metadata.block_start, 45);
    for (int k = 0; k < 100; ++k) EXPECT_EQ(s.beta_true[k], (k >= 45 && k < 55) ? 1.0 : 0.0);
    SimInstance big = gen_1d(config(2, 2000, 1));
    EXPECT_EQ(big.metadata.block, 100);
    EXPECT_EQ(big.beta_true.sum(), 100.0);
}

TEST(Gen1d, NoiselessResponseIsExact) {
    SimConfig c = config(8, 30, 2, 0.0);
    SimInstance s = gen_1d(c);
    EXPECT_EQ(s.y, s.X * s.beta_true);
    c.signal = false;
    SimInstance z = gen_1d(c);
    EXPECT_EQ(z.beta_true, Eigen::VectorXd::Zero(30));
    EXPECT_EQ(z.y, Eigen::VectorXd::Zero(8));
}

TEST(Gen1d, IntervalCountAndDesignNoiseMatchTheModel) {
    SimConfig c = config(100, 400, 9);
    SimInstance s = gen_1d(c);
    double count = 0.0;
    double sum = 0.0, sq = 0.0;
    std::vector<double> row(400);
    for (int i = 0; i < c.n; ++i) {
        auto intervals = row_intervals_1d(c, i);
        count += static_cast<double>(intervals.size());
        std::fill(row.begin(), row.end(), 0.0);
        paint_intervals(row, intervals);
        for (int k = 0; k < 400; ++k) {
            double e = s.X(i, k) - row[k];
            sum += e;
            sq += e * e;
        }
        for (const auto& iv : intervals) {
            EXPECT_GE(iv.value, -3);
            EXPECT_LE(iv.value, 3);
            EXPECT_GE(iv.start, 2 - iv.length);
            EXPECT_LE(iv.start, 400);
        }
    }
    const double mean = count / c.n, expected = std::sqrt(400.0) / 2.0;
    EXPECT_NEAR(mean, expected, 3.0 * std::sqrt(expected / c.n));
    const double m = 40000.0, noise_mean = sum / m, sd = std::sqrt(sq / m - noise_mean * noise_mean);
    EXPECT_NEAR(noise_mean, 0.0, 0.02);
    EXPECT_NEAR(sd, 1.0, 0.02);
}

TEST(Gen1d, ResponseNoiseHasTheConfiguredScale) {
    SimConfig c = config(4000, 10, 3, 2.5);
    SimInstance s = gen_1d(c);
    Eigen::VectorXd e = s.y - s.X * s.beta_true;
    double sd = std::sqrt(e.squaredNorm() / e.size() - std::pow(e.mean(), 2));
    EXPECT_NEAR(sd, 2.5, 0.1);
}

TEST(Gen2d, SquareBlockOfOneHundredOnAGrid) {
    SimInstance s = gen_2d(config(3, 20, 1));
    EXPECT_EQ(s.X.cols(), 400);
    EXPECT_EQ(s.graph.edges().size(), 2u * 20 * 19);
    EXPECT_EQ(s.beta_true.sum(), 100.0);
    EXPECT_EQ(s.metadata.block, 10);
    EXPECT_EQ(s.metadata.block_start, 5);
    for (int r = 0; r < 20; ++r) {
        for (int col = 0; col < 20; ++col) {
            bool inside = r >= 5 && r < 15 && col >= 5 && col < 15;
            EXPECT_EQ(s.beta_true[r * 20 + col], inside ? 1.0 : 0.0);
        }
    }
    SimInstance small = gen_2d(config(3, 9, 1));
    EXPECT_EQ(small.beta_true.sum(), 9.0);
}

TEST(Gen2d, DesignIsPaintedBoxesPlusNoise) {
    SimConfig c = config(30, 12, 4);
    SimInstance s = gen_2d(c);
    std::vector<double> image(144);
    double sq = 0.0;
    for (int i = 0; i < c.n; ++i) {
        std::fill(image.begin(), image.end(), 0.0);
        paint_boxes(image, 12, row_boxes_2d(c, i));
        for (int k = 0; k < 144; ++k) sq += std::pow(s.X(i, k) - image[k], 2);
    }
    EXPECT_NEAR(std::sqrt(sq / (30 * 144)), 1.0, 0.05);
}

TEST(Simgen, RejectsInvalidConfigs) {
    EXPECT_THROW(gen_1d(config(0, 10, 1)), Error);
    EXPECT_THROW(gen_1d(config(5, 1, 1)), Error);
    EXPECT_THROW(gen_2d(config(5, 10, 1, -1.0)), Error);
}
