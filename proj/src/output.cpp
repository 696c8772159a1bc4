#include "circmotion/output.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include <json.hpp>

namespace circmotion {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, bool heading_mod_2pi) {
  out << "t,agent,x,y,theta,omega,u";
  if (heading_mod_2pi) out << ",theta_mod_2pi";
  out << '\n';
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const SwarmState& s = traj.states[i];
    const std::string t = format_number(traj.times[i]);
    for (int k = 0; k < s.size(); ++k) {
      const AgentState& a = s.agents[k];
      out << t << ',' << k + 1 << ',' << format_number(a.position.x()) << ','
          << format_number(a.position.y()) << ',' << format_number(a.heading) << ','
          << format_number(a.angular_velocity) << ',' << format_number(traj.controls[i](k));
      if (heading_mod_2pi) {
        double wrapped = std::fmod(a.heading, 2.0 * std::numbers::pi);
        if (wrapped < 0) wrapped += 2.0 * std::numbers::pi;
        out << ',' << format_number(wrapped);
      }
      out << '\n';
    }
  }
}

void write_metrics_csv(std::ostream& out, const Trajectory& traj) {
  out << 't';
  for (int h = 1; h <= traj.harmonics; ++h) out << ",p" << h << "_abs";
  out << ",omega_err_max,radius_err_max,centroid_x,centroid_y,lyapunov\n";
  for (std::size_t i = 0; i < traj.metrics.size(); ++i) {
    const SampleMetrics& m = traj.metrics[i];
    out << format_number(traj.times[i]);
    for (Eigen::Index h = 0; h < m.order_abs.size(); ++h) out << ',' << format_number(m.order_abs(h));
    out << ',' << format_number(m.omega_error_max) << ',' << format_number(m.radius_error_max)
        << ',' << format_number(m.centroid.x()) << ',' << format_number(m.centroid.y()) << ','
        << format_number(m.lyapunov) << '\n';
  }
}

std::string report_json(const ConvergenceReport& r, const std::string& scenario_name) {
  using json = nlohmann::json;
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  auto vec = [](const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
  };
  json j;
  j["scenario"] = scenario_name;
  j["converged"] = r.converged;
  j["t_converged"] = opt(r.t_converged);
  j["final"] = {{"order_abs", r.final.order_abs},
                {"omega_error_max", r.final.omega_error_max},
                {"radius_error_max", opt(r.final.radius_error_max)},
                {"circle_residual_max", opt(r.final.circle_residual_max)},
                {"centroid_distance", opt(r.final.centroid_distance)},
                {"pattern_residuals", vec(r.final.pattern_residuals)},
                {"block_order_abs", vec(r.final.block_order_abs)}};
  j["lyapunov_violations"] = r.lyapunov_violations;
  j["warnings"] = r.warnings;
  return j.dump(2) + "\n";
}

}  // namespace circmotion
