#include "qdts/error_measures.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace qdts {

ErrorMeasure parse_measure(std::string_view name) {
    if (name == "sed") return ErrorMeasure::Sed;
    if (name == "ped") return ErrorMeasure::Ped;
    if (name == "dad") return ErrorMeasure::Dad;
    if (name == "sad") return ErrorMeasure::Sad;
    throw std::invalid_argument("unknown error measure '" + std::string(name) + "'");
}

std::string_view to_string(ErrorMeasure m) {
    switch (m) {
        case ErrorMeasure::Sed: return "sed";
        case ErrorMeasure::Ped: return "ped";
        case ErrorMeasure::Dad: return "dad";
        case ErrorMeasure::Sad: return "sad";
    }
    return "?";
}

namespace {

double sed_error(const Point& ps, const Point& pe, const Point& p) {
    const double dt = pe.t - ps.t;
    if (dt == 0.0) return spatial_distance(p, ps);
    const double tau = (p.t - ps.t) / dt;
    const Point sync{ps.x + tau * (pe.x - ps.x), ps.y + tau * (pe.y - ps.y), p.t};
    return spatial_distance(p, sync);
}

double ped_error(const Point& ps, const Point& pe, const Point& p) {
    const double dx = pe.x - ps.x;
    const double dy = pe.y - ps.y;
    const double len_sq = dx * dx + dy * dy;
    if (len_sq == 0.0) return spatial_distance(p, ps);
    const double cross = dx * (p.y - ps.y) - dy * (p.x - ps.x);
    return std::abs(cross) / std::sqrt(len_sq);
}

double dad_error(const Point& ps, const Point& pe, const Point& p, const Point& pn) {
    const double ux = pn.x - p.x, uy = pn.y - p.y;
    const double vx = pe.x - ps.x, vy = pe.y - ps.y;
    const double nu = std::sqrt(ux * ux + uy * uy);
    const double nv = std::sqrt(vx * vx + vy * vy);
    if (nu == 0.0 || nv == 0.0) return 0.0;
    const double c = std::clamp((ux * vx + uy * vy) / (nu * nv), -1.0, 1.0);
    return std::acos(c);
}

double sad_error(const Point& ps, const Point& pe, const Point& p, const Point& pn) {
    const double anchor_dt = pe.t - ps.t;
    const double anchor_speed = anchor_dt == 0.0 ? 0.0 : spatial_distance(ps, pe) / anchor_dt;
    const double seg_dt = pn.t - p.t;
    const double seg_speed = seg_dt == 0.0 ? 0.0 : spatial_distance(p, pn) / seg_dt;
    return std::abs(seg_speed - anchor_speed);
}

} // namespace

double point_error(ErrorMeasure m, const Point& ps, const Point& pe, const Point& p,
                   const Point* p_next) {
    switch (m) {
        case ErrorMeasure::Sed: return sed_error(ps, pe, p);
        case ErrorMeasure::Ped: return ped_error(ps, pe, p);
        case ErrorMeasure::Dad:
            assert(p_next != nullptr);
            return dad_error(ps, pe, p, *p_next);
        case ErrorMeasure::Sad:
            assert(p_next != nullptr);
            return sad_error(ps, pe, p, *p_next);
    }
    return 0.0;
}

double segment_error(ErrorMeasure m, const Trajectory& t, std::uint32_t s_j,
                     std::uint32_t s_j1) {
    assert(s_j < s_j1 && s_j1 < t.points.size());
    const Point& ps = t.points[s_j];
    const Point& pe = t.points[s_j1];
    double worst = 0.0;
    for (std::uint32_t i = s_j; i < s_j1; ++i)
        worst = std::max(worst, point_error(m, ps, pe, t.points[i], &t.points[i + 1]));
    return worst;
}

double trajectory_error(ErrorMeasure m, const Trajectory& t,
                        std::span<const std::uint32_t> kept) {
    assert(kept.size() >= 2);
    double worst = 0.0;
    for (std::size_t j = 0; j + 1 < kept.size(); ++j)
        worst = std::max(worst, segment_error(m, t, kept[j], kept[j + 1]));
    return worst;
}

} // namespace qdts
