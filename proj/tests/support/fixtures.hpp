#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "qdts/trajectory.hpp"

namespace qdts::test {

inline Trajectory make_trajectory(std::string id, std::vector<Point> points) {
    return Trajectory{std::move(id), std::move(points)};
}

/// Random trajectory with strictly increasing integer-ish timestamps.
inline Trajectory random_trajectory(std::mt19937_64& rng, std::string id,
                                    std::size_t min_len = 2, std::size_t max_len = 50,
                                    double extent = 1000.0) {
    std::uniform_int_distribution<std::size_t> len_dist(min_len, max_len);
    std::uniform_real_distribution<double> coord(0.0, extent);
    std::uniform_real_distribution<double> dt(0.5, 10.0);
    const std::size_t n = len_dist(rng);
    Trajectory t{std::move(id), {}};
    double clock = coord(rng);
    for (std::size_t i = 0; i < n; ++i) {
        clock += dt(rng);
        t.points.push_back(Point{coord(rng), coord(rng), clock});
    }
    return t;
}

inline TrajectoryDatabase random_database(std::mt19937_64& rng, std::size_t m,
                                          std::size_t min_len = 2,
                                          std::size_t max_len = 40,
                                          double extent = 1000.0) {
    std::vector<Trajectory> ts;
    for (std::size_t i = 0; i < m; ++i)
        ts.push_back(random_trajectory(rng, "T" + std::to_string(i), min_len, max_len,
                                       extent));
    return TrajectoryDatabase(std::move(ts));
}

/// Self-cleaning temp directory for file-based tests.
class TempDir {
public:
    TempDir() {
        static std::mt19937_64 rng(std::random_device{}());
        path_ = std::filesystem::temp_directory_path() /
                ("qdts_test_" + std::to_string(rng()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    std::filesystem::path file(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline std::filesystem::path write_text(const TempDir& dir, const std::string& name,
                                        const std::string& contents) {
    const auto p = dir.file(name);
    std::ofstream out(p);
    out << contents;
    return p;
}

} // namespace qdts::test
