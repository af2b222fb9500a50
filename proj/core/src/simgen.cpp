#include "fusedlasso/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include "fusedlasso/error.hpp"
#include "fusedlasso/rng.hpp"

namespace fusedlasso {

namespace {

// Stream 0 drives the response noise; stream i + 1 drives design row i.
constexpr std::uint64_t kNoiseStream = 0;

void check(const SimConfig& c) {
    if (c.n < 1 || c.p < 2 || !(c.sigma >= 0.0) || !std::isfinite(c.sigma)) {
        throw Error(ErrorCode::invalid_argument, "simulation needs n >= 1, p >= 2, finite sigma >= 0");
    }
}

int poisson(CounterRng& rng, double mean) {
    if (mean <= 0.0) return 0;
    return boost::random::poisson_distribution<int, double>(mean)(rng);
}

int uniform_int(CounterRng& rng, int lo, int hi) {
    return boost::random::uniform_int_distribution<int>(lo, hi)(rng);
}

// Start uniform on {2 - length, ..., p}, so a run may be cut off on the left.
Interval random_interval(CounterRng& rng, int p, int value) {
    int length = poisson(rng, std::sqrt(static_cast<double>(p)));
    int start = uniform_int(rng, 2 - length, p);
    return {start, length, value};
}

// Structure of one design row; the row's Gaussian noise continues the same stream.
std::vector<Interval> draw_intervals(CounterRng& rng, int p) {
    int count = poisson(rng, std::sqrt(static_cast<double>(p)) / 2.0);
    std::vector<Interval> intervals;
    intervals.reserve(static_cast<std::size_t>(count));
    for (int j = 0; j < count; ++j) {
        Interval iv = random_interval(rng, p, 0);
        iv.value = uniform_int(rng, -3, 3);
        intervals.push_back(iv);
    }
    return intervals;
}

std::vector<Box> draw_boxes(CounterRng& rng, int side) {
    int count = poisson(rng, std::sqrt(static_cast<double>(side)));
    std::vector<Box> boxes;
    boxes.reserve(static_cast<std::size_t>(count));
    for (int j = 0; j < count; ++j) {
        Interval rows = random_interval(rng, side, 0);
        Interval cols = random_interval(rng, side, 0);
        rows.value = uniform_int(rng, -3, 3);
        boxes.push_back({rows, cols});
    }
    return boxes;
}

void add_response(SimInstance& sim, const SimConfig& c) {
    CounterRng rng(c.seed, kNoiseStream);
    boost::random::normal_distribution<double> normal(0.0, 1.0);
    sim.y = sim.X * sim.beta_true;
    for (int i = 0; i < c.n; ++i) sim.y[i] += c.sigma * normal(rng);
}

} // namespace

void paint_intervals(std::span<double> row, const std::vector<Interval>& intervals) {
    const int size = static_cast<int>(row.size());
    for (const auto& iv : intervals) {
        int lo = std::max(iv.start, 1);
        int hi = std::min(iv.start + iv.length - 1, size);
        for (int k = lo; k <= hi; ++k) row[k - 1] = iv.value;
    }
}

void paint_boxes(std::span<double> image, int side, const std::vector<Box>& boxes) {
    for (const auto& b : boxes) {
        int r0 = std::max(b.rows.start, 1), r1 = std::min(b.rows.start + b.rows.length - 1, side);
        int c0 = std::max(b.cols.start, 1), c1 = std::min(b.cols.start + b.cols.length - 1, side);
        for (int r = r0; r <= r1; ++r) {
            for (int c = c0; c <= c1; ++c) image[(r - 1) * side + (c - 1)] = b.rows.value;
        }
    }
}

std::vector<Interval> row_intervals_1d(const SimConfig& c, int row) {
    check(c);
    CounterRng rng(c.seed, static_cast<std::uint64_t>(row) + 1);
    return draw_intervals(rng, c.p);
}

std::vector<Box> row_boxes_2d(const SimConfig& c, int row) {
    check(c);
    CounterRng rng(c.seed, static_cast<std::uint64_t>(row) + 1);
    return draw_boxes(rng, c.p);
}

SimInstance gen_1d(const SimConfig& c) {
    check(c);
    const int n = c.n, p = c.p;
    SimInstance sim{Eigen::MatrixXd(n, p), Eigen::VectorXd::Zero(p), Eigen::VectorXd(), PenaltyGraph::chain(p), {}};

    std::vector<double> row(static_cast<std::size_t>(p));
    for (int i = 0; i < n; ++i) {
        CounterRng rng(c.seed, static_cast<std::uint64_t>(i) + 1);
        std::vector<Interval> intervals = draw_intervals(rng, p);
        boost::random::normal_distribution<double> normal(0.0, 1.0);
        std::fill(row.begin(), row.end(), 0.0);
        paint_intervals(row, intervals);
        for (int k = 0; k < p; ++k) sim.X(i, k) = row[k] + normal(rng);
    }

    const int block = std::min(100, (p + 9) / 10);
    const int start = (p - block) / 2;
    if (c.signal) sim.beta_true.segment(start, block).setOnes();
    sim.metadata = {1, c.seed, n, p, c.sigma, block, start};
    add_response(sim, c);
    return sim;
}

SimInstance gen_2d(const SimConfig& c) {
    check(c);
    const int n = c.n, side = c.p, p = side * side;
    SimInstance sim{Eigen::MatrixXd(n, p), Eigen::VectorXd::Zero(p), Eigen::VectorXd(), PenaltyGraph::grid(side), {}};

    std::vector<double> image(static_cast<std::size_t>(p));
    for (int i = 0; i < n; ++i) {
        CounterRng rng(c.seed, static_cast<std::uint64_t>(i) + 1);
        std::vector<Box> boxes = draw_boxes(rng, side);
        boost::random::normal_distribution<double> normal(0.0, 1.0);
        std::fill(image.begin(), image.end(), 0.0);
        paint_boxes(image, side, boxes);
        for (int k = 0; k < p; ++k) sim.X(i, k) = image[k] + normal(rng);
    }

    // Rows/columns side/2 - 4 .. side/2 + 5 (1-based) once that fits, else a scaled centred square.
    int block, start;
    if (side >= 20) {
        block = 10;
        start = side / 2 - 5;
    } else {
        block = std::max(1, (side + 2) / 3);
        start = (side - block) / 2;
    }
    if (c.signal) {
        for (int r = start; r < start + block; ++r) {
            for (int col = start; col < start + block; ++col) sim.beta_true[r * side + col] = 1.0;
        }
    }
    sim.metadata = {2, c.seed, n, side, c.sigma, block, start};
    add_response(sim, c);
    return sim;
}

} // namespace fusedlasso
