#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fusedlasso/graph.hpp"

namespace fusedlasso {

struct SimConfig {
    int n = 50;
    int p = 100;          ///< 1D: coefficient count; 2D: side length (p * p coefficients)
    double sigma = 10.0;  ///< noise standard deviation
    std::uint64_t seed = 1;
    bool signal = true;   ///< false forces beta_true = 0
};

struct SimMetadata {
    int dims = 1;
    std::uint64_t seed = 0;
    int n = 0;
    int p = 0;
    double sigma = 0.0;
    int block = 0;        ///< 1D: length of the nonzero run; 2D: side of the nonzero square
    int block_start = 0;  ///< 0-based first index (row and column in 2D)
};

struct SimInstance {
    Eigen::MatrixXd X;
    Eigen::VectorXd beta_true;
    Eigen::VectorXd y;
    PenaltyGraph graph;
    SimMetadata metadata;
};

/// Constant run: positions start .. start + length - 1 (1-based, may start below 1).
struct Interval {
    int start;
    int length;
    int value;
};

/// Writes each interval's value over `row` in order, clipped to [1, size]; later ones win.
void paint_intervals(std::span<double> row, const std::vector<Interval>& intervals);

/// Axis-aligned box on a side x side image stored row-major; later boxes win.
struct Box {
    Interval rows;
    Interval cols; ///< value unused; the box takes rows.value
};

void paint_boxes(std::span<double> image, int side, const std::vector<Box>& boxes);

/// The intervals painted into design row `row` (0-based) of gen_1d(config).
std::vector<Interval> row_intervals_1d(const SimConfig& config, int row);

/// The boxes painted into design row `row` (0-based) of gen_2d(config); config.p is the side.
std::vector<Box> row_boxes_2d(const SimConfig& config, int row);

/// Random intervals per row, Gaussian noise everywhere, a central run of ones in beta, chain graph.
SimInstance gen_1d(const SimConfig& config);

/// Random boxes per row on a side x side grid, a central square of ones, 4-neighbour grid graph.
SimInstance gen_2d(const SimConfig& config);

} // namespace fusedlasso
