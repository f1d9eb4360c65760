#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace divest {

/// Axis-aligned box in R^d.
struct Box {
    std::vector<double> lower;
    std::vector<double> upper;

    int dimension() const { return static_cast<int>(lower.size()); }
    bool contains(std::span<const double> x) const;
    /// Coordinatewise intersection; may be empty (lower >= upper somewhere).
    Box intersect(const Box& other) const;
    bool empty() const;
};

/// Tensor grid with points_per_axis nodes per axis, endpoints included.
/// Nodes are enumerated row-major: the last axis varies fastest.
/// Quadrature uses the tensor trapezoid weights.
class EvaluationGrid {
public:
    EvaluationGrid(std::vector<double> lower, std::vector<double> upper, std::size_t points_per_axis);
    EvaluationGrid(const Box& box, std::size_t points_per_axis)
        : EvaluationGrid(box.lower, box.upper, points_per_axis) {}

    int dimension() const { return static_cast<int>(lower_.size()); }
    std::size_t points_per_axis() const { return points_; }
    std::size_t size() const { return size_; }
    const std::vector<double>& lower() const { return lower_; }
    const std::vector<double>& upper() const { return upper_; }
    Box box() const { return {lower_, upper_}; }

    double spacing(int axis) const { return spacing_[axis]; }
    double axis_coordinate(int axis, std::size_t i) const;
    /// Writes the coordinates of node `index` into `out` (size d).
    void node(std::size_t index, std::span<double> out) const;
    std::vector<double> node(std::size_t index) const;
    /// Per-axis index of node `index`.
    void unravel(std::size_t index, std::span<std::size_t> out) const;
    /// Trapezoid weight of node `index`.
    double weight(std::size_t index) const;
    const std::vector<double>& weights() const { return weights_; }

private:
    std::vector<double> lower_;
    std::vector<double> upper_;
    std::size_t points_;
    std::size_t size_;
    std::vector<double> spacing_;
    std::vector<double> weights_;
};

}  // namespace divest
