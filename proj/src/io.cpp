#include "qdts/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "qdts/errors.hpp"

namespace qdts {

namespace {

constexpr double kEarthRadiusM = 6371000.0;

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

double parse_double(std::string_view field, const char* what, std::size_t line_no) {
    field = trim(field);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(value))
        throw MalformedRow("line " + std::to_string(line_no) + ": bad " + what + " '" +
                           std::string(field) + "'");
    return value;
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw MissingFile("cannot open '" + path.string() + "'");
    return in;
}

// Longest round-trippable representation; shortest would also round-trip
// but %.17g keeps the writer trivial and deterministic.
void write_double(std::ostream& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
}

} // namespace

std::pair<double, double> project_latlon(double lat, double lon, double ref_lat,
                                         double ref_lon) {
    if (!(std::abs(lat) <= 90.0) || !(std::abs(lon) <= 180.0))
        throw OutOfRangeCoordinate("lat/lon (" + std::to_string(lat) + ", " +
                                   std::to_string(lon) + ") out of range");
    const double deg = std::numbers::pi / 180.0;
    const double x = kEarthRadiusM * (lon - ref_lon) * std::cos(ref_lat * deg) * deg;
    const double y = kEarthRadiusM * (lat - ref_lat) * deg;
    return {x, y};
}

TrajectoryDatabase load_trajectories(const std::filesystem::path& path,
                                     TrajectoryFormat format) {
    (void)format;  // csv is the only ingestion format
    std::ifstream in = open_or_throw(path);

    std::string header;
    if (!std::getline(in, header)) throw MalformedRow("empty file '" + path.string() + "'");
    const auto cols = split_csv(header);
    bool latlon = false;
    if (cols.size() == 4 && trim(cols[0]) == "traj_id" && trim(cols[1]) == "t") {
        if (trim(cols[2]) == "x" && trim(cols[3]) == "y")
            latlon = false;
        else if (trim(cols[2]) == "lat" && trim(cols[3]) == "lon")
            latlon = true;
        else
            throw MalformedRow("unrecognized header '" + header + "'");
    } else {
        throw MalformedRow("unrecognized header '" + header + "'");
    }

    struct Row {
        std::string id;
        double t, a, b;
    };
    std::vector<Row> rows;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv = trim(line);
        if (sv.empty()) continue;
        const auto fields = split_csv(sv);
        if (fields.size() != 4)
            throw MalformedRow("line " + std::to_string(line_no) + ": expected 4 fields, got " +
                               std::to_string(fields.size()));
        Row r;
        r.id = std::string(trim(fields[0]));
        if (r.id.empty())
            throw MalformedRow("line " + std::to_string(line_no) + ": empty traj_id");
        r.t = parse_double(fields[1], "t", line_no);
        r.a = parse_double(fields[2], latlon ? "lat" : "x", line_no);
        r.b = parse_double(fields[3], latlon ? "lon" : "y", line_no);
        rows.push_back(std::move(r));
    }

    double ref_lat = 0.0, ref_lon = 0.0;
    if (latlon && !rows.empty()) {
        double lat_lo = rows[0].a, lat_hi = rows[0].a;
        double lon_lo = rows[0].b, lon_hi = rows[0].b;
        for (const Row& r : rows) {
            lat_lo = std::min(lat_lo, r.a);
            lat_hi = std::max(lat_hi, r.a);
            lon_lo = std::min(lon_lo, r.b);
            lon_hi = std::max(lon_hi, r.b);
        }
        ref_lat = 0.5 * (lat_lo + lat_hi);
        ref_lon = 0.5 * (lon_lo + lon_hi);
    }

    // Group by id in order of first appearance.
    std::vector<Trajectory> trajectories;
    std::map<std::string, std::size_t, std::less<>> slot;
    for (Row& r : rows) {
        auto [it, fresh] = slot.emplace(r.id, trajectories.size());
        if (fresh) trajectories.push_back(Trajectory{r.id, {}});
        Point p;
        if (latlon) {
            auto [x, y] = project_latlon(r.a, r.b, ref_lat, ref_lon);
            p = Point{x, y, r.t};
        } else {
            p = Point{r.a, r.b, r.t};
        }
        trajectories[it->second].points.push_back(p);
    }
    for (Trajectory& t : trajectories)
        std::stable_sort(t.points.begin(), t.points.end(),
                         [](const Point& a, const Point& b) { return a.t < b.t; });

    return TrajectoryDatabase(std::move(trajectories));
}

void save_trajectories(const TrajectoryDatabase& db, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw MissingFile("cannot write '" + path.string() + "'");
    out << "traj_id,t,x,y\n";
    for (const Trajectory& t : db.trajectories())
        for (const Point& p : t.points) {
            out << t.id << ',';
            write_double(out, p.t);
            out << ',';
            write_double(out, p.x);
            out << ',';
            write_double(out, p.y);
            out << '\n';
        }
}

QueryWorkload load_workload(const std::filesystem::path& path) {
    std::ifstream in = open_or_throw(path);
    std::string line;
    if (!std::getline(in, line)) throw MalformedRow("empty workload '" + path.string() + "'");
    if (trim(line) != "x_min,x_max,y_min,y_max,t_min,t_max")
        throw MalformedRow("unrecognized workload header '" + line + "'");
    QueryWorkload workload;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv = trim(line);
        if (sv.empty()) continue;
        const auto f = split_csv(sv);
        if (f.size() != 6)
            throw MalformedRow("line " + std::to_string(line_no) + ": expected 6 fields");
        RangeQuery q{parse_double(f[0], "x_min", line_no), parse_double(f[1], "x_max", line_no),
                     parse_double(f[2], "y_min", line_no), parse_double(f[3], "y_max", line_no),
                     parse_double(f[4], "t_min", line_no), parse_double(f[5], "t_max", line_no)};
        if (q.x_min > q.x_max || q.y_min > q.y_max || q.t_min > q.t_max)
            throw MalformedRow("line " + std::to_string(line_no) + ": min exceeds max");
        workload.push_back(q);
    }
    return workload;
}

void save_workload(const QueryWorkload& workload, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw MissingFile("cannot write '" + path.string() + "'");
    out << "x_min,x_max,y_min,y_max,t_min,t_max\n";
    for (const RangeQuery& q : workload) {
        const double vals[] = {q.x_min, q.x_max, q.y_min, q.y_max, q.t_min, q.t_max};
        for (int i = 0; i < 6; ++i) {
            if (i) out << ',';
            write_double(out, vals[i]);
        }
        out << '\n';
    }
}

void save_kept(const SimplifiedDatabase& view, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw MissingFile("cannot write '" + path.string() + "'");
    out << "traj_id,kept_index\n";
    const TrajectoryDatabase& db = view.database();
    for (std::size_t i = 0; i < db.trajectory_count(); ++i)
        for (std::uint32_t idx : view.kept(i))
            out << db.trajectory(i).id << ',' << idx << '\n';
}

SimplifiedDatabase load_kept(const TrajectoryDatabase& db,
                             const std::filesystem::path& path) {
    std::ifstream in = open_or_throw(path);
    std::string line;
    if (!std::getline(in, line)) throw MalformedRow("empty kept file '" + path.string() + "'");
    if (trim(line) != "traj_id,kept_index")
        throw MalformedRow("unrecognized kept header '" + line + "'");
    std::vector<std::vector<std::uint32_t>> kept(db.trajectory_count());
    std::size_t total = 0;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv = trim(line);
        if (sv.empty()) continue;
        const auto f = split_csv(sv);
        if (f.size() != 2)
            throw MalformedRow("line " + std::to_string(line_no) + ": expected 2 fields");
        const auto traj = db.index_of(trim(f[0]));
        if (!traj)
            throw MalformedRow("line " + std::to_string(line_no) + ": unknown trajectory '" +
                               std::string(trim(f[0])) + "'");
        const double idx = parse_double(f[1], "kept_index", line_no);
        if (idx < 0 || idx != std::floor(idx) || idx >= double(db.trajectory(*traj).size()))
            throw MalformedRow("line " + std::to_string(line_no) + ": bad kept_index");
        kept[*traj].push_back(static_cast<std::uint32_t>(idx));
        ++total;
    }
    for (auto& k : kept) std::sort(k.begin(), k.end());
    return SimplifiedDatabase::from_kept_sets(db, std::move(kept), total);
}

std::vector<Point> load_centers(const std::filesystem::path& path) {
    std::ifstream in = open_or_throw(path);
    std::string line;
    if (!std::getline(in, line)) throw MalformedRow("empty centers '" + path.string() + "'");
    if (trim(line) != "x,y,t")
        throw MalformedRow("unrecognized centers header '" + line + "'");
    std::vector<Point> centers;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv = trim(line);
        if (sv.empty()) continue;
        const auto f = split_csv(sv);
        if (f.size() != 3)
            throw MalformedRow("line " + std::to_string(line_no) + ": expected 3 fields");
        centers.push_back(Point{parse_double(f[0], "x", line_no),
                                parse_double(f[1], "y", line_no),
                                parse_double(f[2], "t", line_no)});
    }
    return centers;
}

} // namespace qdts
