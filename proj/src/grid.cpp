#include "divest/grid.hpp"

#include "divest/error.hpp"

#include <algorithm>
#include <cmath>

namespace divest {

bool Box::contains(std::span<const double> x) const {
    for (std::size_t k = 0; k < lower.size(); ++k)
        if (x[k] < lower[k] || x[k] > upper[k]) return false;
    return true;
}

Box Box::intersect(const Box& other) const {
    Box out{lower, upper};
    for (std::size_t k = 0; k < lower.size(); ++k) {
        out.lower[k] = std::max(lower[k], other.lower[k]);
        out.upper[k] = std::min(upper[k], other.upper[k]);
    }
    return out;
}

bool Box::empty() const {
    for (std::size_t k = 0; k < lower.size(); ++k)
        if (!(lower[k] < upper[k])) return true;
    return false;
}

EvaluationGrid::EvaluationGrid(std::vector<double> lower, std::vector<double> upper,
                               std::size_t points_per_axis)
    : lower_(std::move(lower)), upper_(std::move(upper)), points_(points_per_axis) {
    if (lower_.empty() || lower_.size() != upper_.size())
        throw ParameterError("grid bounds must be non-empty and of equal dimension");
    if (points_ < 1) throw ParameterError("grid needs at least one point per axis");
    for (std::size_t k = 0; k < lower_.size(); ++k) {
        if (!std::isfinite(lower_[k]) || !std::isfinite(upper_[k]) || !(lower_[k] < upper_[k]))
            throw ParameterError("grid requires finite lower < upper on every axis");
    }
    size_ = 1;
    for (std::size_t k = 0; k < lower_.size(); ++k) size_ *= points_;
    spacing_.resize(lower_.size());
    for (std::size_t k = 0; k < lower_.size(); ++k)
        spacing_[k] = points_ > 1 ? (upper_[k] - lower_[k]) / static_cast<double>(points_ - 1)
                                  : (upper_[k] - lower_[k]);

    // A single-node axis carries the whole box width.
    std::vector<std::vector<double>> axis_w(lower_.size(), std::vector<double>(points_));
    for (std::size_t k = 0; k < lower_.size(); ++k) {
        for (std::size_t i = 0; i < points_; ++i) {
            const bool edge = points_ > 1 && (i == 0 || i + 1 == points_);
            axis_w[k][i] = edge ? 0.5 * spacing_[k] : spacing_[k];
        }
    }
    weights_.resize(size_);
    std::vector<std::size_t> idx(lower_.size());
    for (std::size_t n = 0; n < size_; ++n) {
        unravel(n, idx);
        double w = 1.0;
        for (std::size_t k = 0; k < lower_.size(); ++k) w *= axis_w[k][idx[k]];
        weights_[n] = w;
    }
}

double EvaluationGrid::axis_coordinate(int axis, std::size_t i) const {
    if (points_ == 1) return 0.5 * (lower_[axis] + upper_[axis]);
    if (i + 1 == points_) return upper_[axis];
    return lower_[axis] + spacing_[axis] * static_cast<double>(i);
}

void EvaluationGrid::unravel(std::size_t index, std::span<std::size_t> out) const {
    for (int k = dimension() - 1; k >= 0; --k) {
        out[k] = index % points_;
        index /= points_;
    }
}

void EvaluationGrid::node(std::size_t index, std::span<double> out) const {
    for (int k = dimension() - 1; k >= 0; --k) {
        out[k] = axis_coordinate(k, index % points_);
        index /= points_;
    }
}

std::vector<double> EvaluationGrid::node(std::size_t index) const {
    std::vector<double> out(lower_.size());
    node(index, out);
    return out;
}

double EvaluationGrid::weight(std::size_t index) const { return weights_[index]; }

}  // namespace divest
