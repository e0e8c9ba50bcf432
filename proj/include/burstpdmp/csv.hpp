#pragma once

// CSV writers for trajectory, density, and summary outputs.  Numbers are
// rendered with std::to_chars shortest round-trip form so that re-running an
// experiment with the same seed produces byte-identical files.

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "burstpdmp/density.hpp"
#include "burstpdmp/reduced.hpp"
#include "burstpdmp/simulator.hpp"

namespace burstpdmp {

// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double v);

void write_trajectory_csv(std::ostream& os, const TrajectorySample& traj);
void write_trajectory_csv_1d(std::ostream& os, const Trajectory1D& traj);

// Rows are y_left,y_right,value.  tail_mass goes to the run manifest, not here.
void write_density_csv(std::ostream& os, const DensityGrid& grid);

struct DistanceRow {
    double gamma1 = 0.0;
    std::string norm;
    double value = 0.0;
};
void write_distances_csv(std::ostream& os, const std::vector<DistanceRow>& rows);

struct MomentRow {
    double gamma1 = 0.0;
    std::string name;
    double estimate = 0.0;
    double stderr_ = 0.0;
};
void write_moments_csv(std::ostream& os, const std::vector<MomentRow>& rows);

void write_file(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

} // namespace burstpdmp
