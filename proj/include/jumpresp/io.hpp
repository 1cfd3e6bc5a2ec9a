#pragma once

#include <string>

#include "jumpresp/core_model.hpp"
#include "jumpresp/response_estimators.hpp"

namespace jumpresp {

// Trajectory CSV: "# dt=<value>" and "# K=<value>" header lines, then one
// comma-separated row per sample, printed with shortest round-trip precision.
void write_trajectory_csv(const std::string& path, const Trajectory& traj);
Trajectory read_trajectory_csv(const std::string& path);

// Packed little-endian float64 rows in `path`, header lines in `path.hdr`.
void write_trajectory_binary(const std::string& path, const Trajectory& traj);
Trajectory read_trajectory_binary(const std::string& path);

// Dispatches on the extension: ".bin" is binary, anything else CSV.
void write_trajectory(const std::string& path, const Trajectory& traj);
Trajectory read_trajectory(const std::string& path);

// Curve CSV: header "lag,value_1..value_J,stderr_1..stderr_J".
void write_curve(std::ostream& os, const ResponseCurve& curve);
void write_curve(const std::string& path, const ResponseCurve& curve);
ResponseCurve read_curve(const std::string& path);

// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

}  // namespace jumpresp
