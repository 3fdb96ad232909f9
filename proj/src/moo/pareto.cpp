#include "heatplan/moo/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace heatplan::moo {

bool dominates(const Point2& a, const Point2& b) {
    return a[0] <= b[0] && a[1] <= b[1] && (a[0] < b[0] || a[1] < b[1]);
}

namespace {

bool finite(const Point2& p) { return std::isfinite(p[0]) && std::isfinite(p[1]); }

}  // namespace

std::vector<std::size_t> pareto_filter(const std::vector<Point2>& points) {
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < points.size(); ++i)
        if (finite(points[i])) order.push_back(i);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (points[a][0] != points[b][0]) return points[a][0] < points[b][0];
        if (points[a][1] != points[b][1]) return points[a][1] < points[b][1];
        return a < b;
    });
    std::vector<std::size_t> front;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i : order) {
        if (points[i][1] < best) {
            front.push_back(i);
            best = points[i][1];
        }
    }
    return front;
}

std::vector<Point2> pareto_points(const std::vector<Point2>& points) {
    std::vector<Point2> out;
    for (std::size_t i : pareto_filter(points)) out.push_back(points[i]);
    return out;
}

double hypervolume(const std::vector<Point2>& points, const Point2& r, std::size_t* clipped) {
    std::vector<Point2> inside;
    std::size_t outside = 0;
    for (const auto& p : points) {
        if (finite(p) && p[0] < r[0] && p[1] < r[1])
            inside.push_back(p);
        else
            ++outside;
    }
    if (clipped) *clipped = outside;
    std::sort(inside.begin(), inside.end());
    double area = 0.0;
    double bound = r[1];
    for (const auto& p : inside) {
        if (p[1] < bound) {
            area += (r[0] - p[0]) * (bound - p[1]);
            bound = p[1];
        }
    }
    return area;
}

double hypervolume_improvement(const std::vector<Point2>& front, const Point2& y, const Point2& r) {
    if (!finite(y) || !(y[0] < r[0] && y[1] < r[1])) return 0.0;
    // The front's boxes clipped to y's box; their union is the overlap.
    std::vector<Point2> clipped;
    clipped.reserve(front.size());
    for (const auto& p : front) {
        if (!(p[0] < r[0] && p[1] < r[1])) continue;
        clipped.push_back({std::max(p[0], y[0]), std::max(p[1], y[1])});
    }
    const double box = (r[0] - y[0]) * (r[1] - y[1]);
    return std::max(0.0, box - hypervolume(clipped, r));
}

ReferencePoint adaptive_reference(const std::vector<Point2>& standardized) {
    if (standardized.empty()) throw std::invalid_argument("reference point needs at least one observation");
    ReferencePoint ref;
    for (int i = 0; i < 2; ++i) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto& p : standardized) {
            if (!std::isfinite(p[i])) continue;
            lo = std::min(lo, p[i]);
            hi = std::max(hi, p[i]);
        }
        if (!std::isfinite(lo)) throw std::invalid_argument("reference point needs a finite observation");
        const double literal = hi - 0.1 * lo;
        if (literal > hi) {
            ref.r[i] = literal;
        } else {
            ref.r[i] = hi + 0.1 * (hi - lo) + 1e-6;
            ref.fallback[i] = true;
        }
    }
    return ref;
}

std::vector<double> hypervolume_trace(const std::vector<Point2>& points, const Point2& r) {
    std::vector<double> out;
    out.reserve(points.size());
    std::vector<Point2> front;
    double hv = 0.0;
    for (const auto& p : points) {
        // Fronts only grow in hypervolume, so the improvement can be accumulated.
        const double gain = hypervolume_improvement(front, p, r);
        if (gain > 0.0) {
            front.push_back(p);
            front = pareto_points(front);
            hv = hypervolume(front, r);
        }
        out.push_back(hv);
    }
    return out;
}

}  // namespace heatplan::moo
