#pragma once

// Two-objective minimization: dominance, exact hypervolume, improvement,
// adaptive reference point.

#include <array>
#include <cstddef>
#include <vector>

namespace heatplan::moo {

using Point2 = std::array<double, 2>;

/// a <= b componentwise with at least one strict <.
[[nodiscard]] bool dominates(const Point2& a, const Point2& b);

/// Indices of the non-dominated points, ordered by first objective ascending.
/// Exact duplicates keep only the lowest index; non-finite points are skipped.
[[nodiscard]] std::vector<std::size_t> pareto_filter(const std::vector<Point2>& points);
[[nodiscard]] std::vector<Point2> pareto_points(const std::vector<Point2>& points);

/// Area dominated by the points and bounded by r. Points that do not strictly
/// dominate r contribute nothing and are counted in *clipped.
[[nodiscard]] double hypervolume(const std::vector<Point2>& points, const Point2& r, std::size_t* clipped = nullptr);

/// hypervolume(front + {y}) - hypervolume(front), computed without rebuilding the front.
[[nodiscard]] double hypervolume_improvement(const std::vector<Point2>& front, const Point2& y, const Point2& r);

struct ReferencePoint {
    Point2 r{0.0, 0.0};
    /// Per coordinate: the literal max - 0.1 * min was not worse than the max,
    /// so max + 0.1 * range + 1e-6 was used instead.
    std::array<bool, 2> fallback{false, false};
};

/// Throws std::invalid_argument on an empty set.
[[nodiscard]] ReferencePoint adaptive_reference(const std::vector<Point2>& standardized);

/// Hypervolume of the front of every prefix: entry k covers points[0..k].
[[nodiscard]] std::vector<double> hypervolume_trace(const std::vector<Point2>& points, const Point2& r);

}  // namespace heatplan::moo
