#pragma once

#include <filesystem>
#include <ostream>
#include <string>

#include "circmotion/simulator.hpp"

namespace circmotion {

/// `t,agent,x,y,theta,omega,u` with one row per (sample, agent); agents are
/// numbered from 1 and headings are unwrapped radians. With `heading_mod_2pi`
/// a trailing `theta_mod_2pi` column is added.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj, bool heading_mod_2pi = false);

/// `t,p1_abs,...,pH_abs,omega_err_max,radius_err_max,centroid_x,centroid_y,lyapunov`,
/// H = traj.harmonics. Quantities without a target are written as `nan`.
void write_metrics_csv(std::ostream& out, const Trajectory& traj);

/// Convergence report as JSON.
std::string report_json(const ConvergenceReport& report, const std::string& scenario_name);

/// Formats with 9 significant digits, the precision used by every CSV column.
std::string format_number(double v);

}  // namespace circmotion
