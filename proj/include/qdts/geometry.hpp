#pragma once

#include <algorithm>
#include <cmath>

namespace qdts {

/// A time-stamped planar location. Coordinates are meters in a projected
/// frame, timestamps are seconds.
struct Point {
    double x = 0.0;
    double y = 0.0;
    double t = 0.0;
};

inline double spatial_distance(const Point& a, const Point& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

/// Axis-aligned box over (x, y, t). All bounds are closed.
struct Box {
    double x_min = 0.0, x_max = 0.0;
    double y_min = 0.0, y_max = 0.0;
    double t_min = 0.0, t_max = 0.0;

    bool contains(const Point& p) const {
        return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max &&
               p.t >= t_min && p.t <= t_max;
    }

    bool intersects(const Box& o) const {
        return x_min <= o.x_max && o.x_min <= x_max && y_min <= o.y_max &&
               o.y_min <= y_max && t_min <= o.t_max && o.t_min <= t_max;
    }

    double x_extent() const { return x_max - x_min; }
    double y_extent() const { return y_max - y_min; }
    double t_extent() const { return t_max - t_min; }
};

} // namespace qdts
