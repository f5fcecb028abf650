#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "activepref/types.hpp"

namespace activepref {

using Point2 = Eigen::Vector2d;

struct GainVector {
  double k_x = 1.0;
  double k_y = 1.0;
  double k_theta = 1.0;

  static GainVector from_log(const Vector& w);  // elementwise exp
  Vector to_log() const;
  Vector as_vector() const;
};

struct BezierPath {
  std::vector<Point2> control_points;
  double t_period = 10.0;
  double t_final = 12.0;

  BezierPath() = default;
  BezierPath(std::vector<Point2> points, double period = 10.0, double final_time = 12.0);
  int degree() const { return static_cast<int>(control_points.size()) - 1; }
  void validate() const;  // throws ConfigError
};

// Position and derivatives with respect to the curve phase.
struct BezierSample {
  Point2 position;
  Point2 d1;
  Point2 d2;
};

BezierSample bezier_eval(const BezierPath& path, double t_phase);

struct RobotState {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
};

// Wraps to (-pi, pi].
double wrap_angle(double a);

struct ReferenceState {
  Point2 position;
  double theta = 0.0;
  double v = 0.0;
  double omega = 0.0;
};

// `theta_hint` supplies the heading where the path tangent vanishes.
ReferenceState reference_state(const BezierPath& path, double sim_time,
                               double theta_hint = 0.0);

struct ControlCommand {
  double v = 0.0;
  double omega = 0.0;
};

ControlCommand control_step(const GainVector& gains, const RobotState& state,
                            const ReferenceState& ref);

enum class StartCondition { kPerfect, kLateral, kHeading };

std::string_view start_name(StartCondition s);
StartCondition parse_start(std::string_view name);  // throws ConfigError

struct Scenario {
  BezierPath path;
  StartCondition start = StartCondition::kPerfect;
  std::string label;
};

RobotState initial_state(const Scenario& scenario);

struct TrajectorySample {
  double t = 0.0;
  RobotState state;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  double dt = 0.02;
};

class SimulationDiverged : public Error {
 public:
  using Error::Error;
};

// Explicit Euler on the unicycle over [0, t_final]. Throws SimulationDiverged
// on a non-finite or unbounded state.
Trajectory simulate(const GainVector& gains, const Scenario& scenario,
                    double dt = 0.02);

// Same integration, but stops at divergence and returns the finite prefix.
struct SimulationOutcome {
  Trajectory trajectory;
  bool diverged = false;
};
SimulationOutcome simulate_until_divergence(const GainVector& gains,
                                            const Scenario& scenario,
                                            double dt = 0.02);

// Reference path sampled at `n` uniform phases.
std::vector<Point2> discretize_path(const BezierPath& path, int n = 200);

// Symmetric Hausdorff distance between two point sets.
double hausdorff_distance(const std::vector<Point2>& a, const std::vector<Point2>& b);

double tracking_error(const Trajectory& traj, const BezierPath& path);

// Control points of the four reference trajectories, ids 1..4.
BezierPath builtin_trajectory(int id, double t_period = 10.0, double t_final = 12.0);

// Scenario set for a trajectory id ("1".."4" or "all") and start ("perfect",
// "lateral", "heading" or "all").
std::vector<Scenario> make_scenarios(std::string_view trajectory, std::string_view start,
                                     double t_period = 10.0, double t_final = 12.0);

}  // namespace activepref
