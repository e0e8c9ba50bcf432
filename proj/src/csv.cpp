#include "burstpdmp/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "burstpdmp/errors.hpp"

namespace burstpdmp {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    if (res.ec != std::errc{}) throw numeric_error("format_double: to_chars failed");
    return std::string(buf, res.ptr);
}

void write_trajectory_csv(std::ostream& os, const TrajectorySample& traj) {
    os << "t,x,y,event\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        os << format_double(traj.times[i]) << ',' << format_double(traj.states[i].x) << ','
           << format_double(traj.states[i].y) << ','
           << (traj.events[i] == EventKind::Jump ? "jump" : "obs") << '\n';
    }
}

void write_trajectory_csv_1d(std::ostream& os, const Trajectory1D& traj) {
    os << "t,y,event\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        os << format_double(traj.times[i]) << ',' << format_double(traj.values[i]) << ','
           << (traj.events[i] == EventKind::Jump ? "jump" : "obs") << '\n';
    }
}

void write_density_csv(std::ostream& os, const DensityGrid& grid) {
    os << "y_left,y_right,value\n";
    const double dy = grid.dy();
    for (std::size_t i = 0; i < grid.values.size(); ++i) {
        const double left = static_cast<double>(i) * dy;
        const double right = (i + 1 == grid.values.size()) ? grid.y_max
                                                           : static_cast<double>(i + 1) * dy;
        os << format_double(left) << ',' << format_double(right) << ','
           << format_double(grid.values[i]) << '\n';
    }
}

void write_distances_csv(std::ostream& os, const std::vector<DistanceRow>& rows) {
    os << "gamma1,norm,value\n";
    for (const auto& r : rows)
        os << format_double(r.gamma1) << ',' << r.norm << ',' << format_double(r.value) << '\n';
}

void write_moments_csv(std::ostream& os, const std::vector<MomentRow>& rows) {
    os << "gamma1,moment_name,estimate,stderr\n";
    for (const auto& r : rows)
        os << format_double(r.gamma1) << ',' << r.name << ',' << format_double(r.estimate) << ','
           << format_double(r.stderr_) << '\n';
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw config_error("cannot open for writing: " + path);
    os << contents;
    os.flush();
    if (!os) throw config_error("write failed: " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw config_error("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

} // namespace burstpdmp
