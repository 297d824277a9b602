#include "qdts/workload.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <random>
#include <stdexcept>

#include "qdts/errors.hpp"

namespace qdts {

namespace {

constexpr int kZipfGrid = 64;

RangeQuery box_around(const Point& center, const WorkloadSpec& spec) {
    const double hs = 0.5 * spec.spatial_extent;
    const double ht = 0.5 * spec.temporal_extent;
    return RangeQuery{center.x - hs, center.x + hs, center.y - hs, center.y + hs,
                      center.t - ht, center.t + ht};
}

void check_spec(const WorkloadSpec& spec) {
    if (spec.spatial_extent <= 0 || spec.temporal_extent <= 0)
        throw std::invalid_argument("workload extents must be positive");
    if (spec.distribution == CenterDistribution::Gaussian && spec.gaussian_sigma <= 0)
        throw std::invalid_argument("gaussian sigma must be positive");
    if (spec.distribution == CenterDistribution::Zipf && spec.zipf_a <= 1)
        throw std::invalid_argument("zipf exponent must exceed 1");
}

} // namespace

CenterDistribution parse_distribution(std::string_view name) {
    if (name == "data") return CenterDistribution::Data;
    if (name == "gaussian") return CenterDistribution::Gaussian;
    if (name == "zipf") return CenterDistribution::Zipf;
    throw std::invalid_argument("unknown distribution '" + std::string(name) + "'");
}

std::string_view to_string(CenterDistribution d) {
    switch (d) {
        case CenterDistribution::Data: return "data";
        case CenterDistribution::Gaussian: return "gaussian";
        case CenterDistribution::Zipf: return "zipf";
    }
    return "?";
}

QueryWorkload generate(const TrajectoryDatabase& db, const WorkloadSpec& spec) {
    check_spec(spec);
    if (db.point_count() == 0)
        throw std::invalid_argument("workload generation needs a nonempty database");

    std::mt19937_64 rng(spec.seed);
    QueryWorkload out;
    out.reserve(spec.count);
    const Box& b = db.bounds();

    switch (spec.distribution) {
        case CenterDistribution::Data: {
            // Uniform over points: map a global index to (trajectory, point).
            std::vector<std::size_t> offsets(db.trajectory_count() + 1, 0);
            for (std::size_t i = 0; i < db.trajectory_count(); ++i)
                offsets[i + 1] = offsets[i] + db.trajectory(i).size();
            std::uniform_int_distribution<std::size_t> pick(0, db.point_count() - 1);
            for (std::size_t i = 0; i < spec.count; ++i) {
                const std::size_t g = pick(rng);
                const auto it = std::upper_bound(offsets.begin(), offsets.end(), g);
                const std::size_t traj = std::size_t(it - offsets.begin()) - 1;
                const Point& p = db.trajectory(traj).points[g - offsets[traj]];
                out.push_back(box_around(p, spec));
            }
            break;
        }
        case CenterDistribution::Gaussian: {
            std::normal_distribution<double> normal(spec.gaussian_mu, spec.gaussian_sigma);
            for (std::size_t i = 0; i < spec.count; ++i) {
                const double u = std::clamp(normal(rng), 0.0, 1.0);
                const double v = std::clamp(normal(rng), 0.0, 1.0);
                const double w = std::clamp(normal(rng), 0.0, 1.0);
                const Point center{b.x_min + u * b.x_extent(), b.y_min + v * b.y_extent(),
                                   b.t_min + w * b.t_extent()};
                out.push_back(box_around(center, spec));
            }
            break;
        }
        case CenterDistribution::Zipf: {
            // Rank the 64x64 spatial cells by point density, densest first
            // (row-major order breaks ties), and sample the rank.
            std::vector<std::size_t> density(kZipfGrid * kZipfGrid, 0);
            const double inv_x = b.x_extent() > 0 ? kZipfGrid / b.x_extent() : 0.0;
            const double inv_y = b.y_extent() > 0 ? kZipfGrid / b.y_extent() : 0.0;
            for (const Trajectory& t : db.trajectories())
                for (const Point& p : t.points) {
                    const int cx = std::min(kZipfGrid - 1,
                                            std::max(0, int((p.x - b.x_min) * inv_x)));
                    const int cy = std::min(kZipfGrid - 1,
                                            std::max(0, int((p.y - b.y_min) * inv_y)));
                    ++density[cy * kZipfGrid + cx];
                }
            std::vector<int> cells(density.size());
            for (std::size_t i = 0; i < cells.size(); ++i) cells[i] = int(i);
            std::stable_sort(cells.begin(), cells.end(), [&](int a, int c) {
                return density[a] > density[c];
            });
            std::vector<double> cdf(cells.size());
            double acc = 0.0;
            for (std::size_t r = 0; r < cells.size(); ++r) {
                acc += std::pow(double(r + 1), -spec.zipf_a);
                cdf[r] = acc;
            }
            std::uniform_real_distribution<double> uniform(0.0, acc);
            const double cell_x = b.x_extent() / kZipfGrid;
            const double cell_y = b.y_extent() / kZipfGrid;
            for (std::size_t i = 0; i < spec.count; ++i) {
                const double u = uniform(rng);
                const std::size_t rank =
                    std::size_t(std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
                const int cell = cells[std::min(rank, cells.size() - 1)];
                const int cy = cell / kZipfGrid, cx = cell % kZipfGrid;
                const Point center{b.x_min + (cx + 0.5) * cell_x,
                                   b.y_min + (cy + 0.5) * cell_y,
                                   0.5 * (b.t_min + b.t_max)};
                out.push_back(box_around(center, spec));
            }
            break;
        }
    }
    return out;
}

QueryWorkload generate_from_centers(std::span<const Point> centers,
                                    const WorkloadSpec& spec) {
    check_spec(spec);
    if (centers.empty())
        throw std::invalid_argument("centers list is empty");
    std::mt19937_64 rng(spec.seed);
    std::uniform_int_distribution<std::size_t> pick(0, centers.size() - 1);
    QueryWorkload out;
    out.reserve(spec.count);
    for (std::size_t i = 0; i < spec.count; ++i)
        out.push_back(box_around(centers[pick(rng)], spec));
    return out;
}

} // namespace qdts
