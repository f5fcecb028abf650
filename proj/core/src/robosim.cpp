#include "activepref/robosim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace activepref {

GainVector GainVector::from_log(const Vector& w) {
  if (w.size() != 3) throw DimensionMismatch("gain vector needs 3 components");
  return {std::exp(w[0]), std::exp(w[1]), std::exp(w[2])};
}

Vector GainVector::to_log() const {
  return as_vector().array().log().matrix();
}

Vector GainVector::as_vector() const {
  Vector v(3);
  v << k_x, k_y, k_theta;
  return v;
}

BezierPath::BezierPath(std::vector<Point2> points, double period, double final_time)
    : control_points(std::move(points)), t_period(period), t_final(final_time) {
  validate();
}

void BezierPath::validate() const {
  if (control_points.size() < 2) {
    throw ConfigError("a Bezier path needs at least 2 control points", "control_points");
  }
  if (!(t_period > 0.0)) throw ConfigError("t_period must be positive", "t_period");
  if (!(t_final >= t_period)) throw ConfigError("t_final must be >= t_period", "t_final");
}

namespace {

Point2 de_casteljau(std::vector<Point2> pts, double t) {
  for (std::size_t level = pts.size(); level > 1; --level) {
    for (std::size_t i = 0; i + 1 < level; ++i) {
      pts[i] = (1.0 - t) * pts[i] + t * pts[i + 1];
    }
  }
  return pts.front();
}

std::vector<Point2> differences(const std::vector<Point2>& pts) {
  std::vector<Point2> out;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) out.push_back(pts[i + 1] - pts[i]);
  return out;
}

}  // namespace

BezierSample bezier_eval(const BezierPath& path, double t_phase) {
  if (!(t_phase >= 0.0 && t_phase <= 1.0)) {
    throw Error("Bezier phase must lie in [0, 1]");
  }
  const auto& pts = path.control_points;
  if (pts.empty()) throw ConfigError("empty Bezier path", "control_points");
  const double n = static_cast<double>(pts.size()) - 1.0;
  BezierSample s;
  s.position = de_casteljau(pts, t_phase);
  s.d1.setZero();
  s.d2.setZero();
  if (pts.size() >= 2) {
    const auto diff1 = differences(pts);
    s.d1 = n * de_casteljau(diff1, t_phase);
    if (pts.size() >= 3) {
      s.d2 = n * (n - 1.0) * de_casteljau(differences(diff1), t_phase);
    }
  }
  return s;
}

double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(a, two_pi);
  if (r <= -std::numbers::pi) r += two_pi;
  if (r > std::numbers::pi) r -= two_pi;
  return r;
}

namespace {

constexpr double kCuspSpeed = 1e-12;

double tangent_heading(const BezierSample& s, double fallback) {
  if (s.d1.norm() > kCuspSpeed) return std::atan2(s.d1.y(), s.d1.x());
  return fallback;
}

}  // namespace

ReferenceState reference_state(const BezierPath& path, double sim_time,
                               double theta_hint) {
  if (!(sim_time >= 0.0)) throw Error("simulation time must be non-negative");
  ReferenceState ref;
  if (sim_time >= path.t_period) {
    const BezierSample end = bezier_eval(path, 1.0);
    ref.position = end.position;
    ref.theta = tangent_heading(end, theta_hint);
    return ref;
  }
  const double phase = std::clamp(sim_time / path.t_period, 0.0, 1.0);
  const BezierSample s = bezier_eval(path, phase);
  ref.position = s.position;
  const double speed = s.d1.norm();
  if (speed <= kCuspSpeed) {
    ref.theta = theta_hint;
    return ref;
  }
  ref.theta = std::atan2(s.d1.y(), s.d1.x());
  ref.v = speed / path.t_period;
  const double kappa = (s.d1.x() * s.d2.y() - s.d1.y() * s.d2.x()) / (speed * speed * speed);
  ref.omega = ref.v * kappa;
  return ref;
}

ControlCommand control_step(const GainVector& gains, const RobotState& state,
                            const ReferenceState& ref) {
  const double dx = ref.position.x() - state.x;
  const double dy = ref.position.y() - state.y;
  const double c = std::cos(state.theta);
  const double s = std::sin(state.theta);
  const double e_x = c * dx + s * dy;
  const double e_y = -s * dx + c * dy;
  const double e_theta = wrap_angle(ref.theta - state.theta);
  ControlCommand cmd;
  cmd.v = ref.v * std::cos(e_theta) + gains.k_x * e_x;
  cmd.omega = ref.omega + gains.k_y * ref.v * e_y + gains.k_theta * std::sin(e_theta);
  return cmd;
}

std::string_view start_name(StartCondition s) {
  switch (s) {
    case StartCondition::kPerfect: return "perfect";
    case StartCondition::kLateral: return "lateral";
    case StartCondition::kHeading: return "heading";
  }
  return "unknown";
}

StartCondition parse_start(std::string_view name) {
  for (auto s : {StartCondition::kPerfect, StartCondition::kLateral, StartCondition::kHeading}) {
    if (start_name(s) == name) return s;
  }
  throw ConfigError("unknown start condition '" + std::string(name) + "'", "start");
}

RobotState initial_state(const Scenario& scenario) {
  BezierSample s0 = bezier_eval(scenario.path, 0.0);
  double heading = tangent_heading(s0, 0.0);
  if (s0.d1.norm() <= kCuspSpeed && s0.d2.norm() > kCuspSpeed) {
    heading = std::atan2(s0.d2.y(), s0.d2.x());
  }
  RobotState st{s0.position.x(), s0.position.y(), heading};
  switch (scenario.start) {
    case StartCondition::kPerfect:
      break;
    case StartCondition::kLateral:
      st.x += -std::sin(heading);
      st.y += std::cos(heading);
      break;
    case StartCondition::kHeading:
      st.theta = wrap_angle(heading + std::numbers::pi / 4.0);
      break;
  }
  return st;
}

SimulationOutcome simulate_until_divergence(const GainVector& gains,
                                            const Scenario& scenario, double dt) {
  if (!(dt > 0.0)) throw ConfigError("dt must be positive", "dt");
  scenario.path.validate();
  constexpr double kDivergenceBound = 1e9;
  const auto steps = static_cast<long>(std::llround(scenario.path.t_final / dt));
  SimulationOutcome out;
  Trajectory& traj = out.trajectory;
  traj.dt = dt;
  traj.samples.reserve(static_cast<std::size_t>(steps) + 1);
  RobotState st = initial_state(scenario);
  double hint = st.theta;
  traj.samples.push_back({0.0, st});
  for (long k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    const ReferenceState ref = reference_state(scenario.path, t, hint);
    hint = ref.theta;
    const ControlCommand cmd = control_step(gains, st, ref);
    st.x += cmd.v * std::cos(st.theta) * dt;
    st.y += cmd.v * std::sin(st.theta) * dt;
    st.theta = wrap_angle(st.theta + cmd.omega * dt);
    if (!std::isfinite(st.x) || !std::isfinite(st.y) || !std::isfinite(st.theta) ||
        std::abs(st.x) > kDivergenceBound || std::abs(st.y) > kDivergenceBound) {
      out.diverged = true;
      return out;
    }
    traj.samples.push_back({static_cast<double>(k + 1) * dt, st});
  }
  return out;
}

Trajectory simulate(const GainVector& gains, const Scenario& scenario, double dt) {
  SimulationOutcome out = simulate_until_divergence(gains, scenario, dt);
  if (out.diverged) {
    const double t = out.trajectory.samples.back().t + dt;
    throw SimulationDiverged("simulation diverged at t = " + std::to_string(t));
  }
  return std::move(out.trajectory);
}

std::vector<Point2> discretize_path(const BezierPath& path, int n) {
  if (n < 2) throw ConfigError("path discretization needs >= 2 points", "n");
  std::vector<Point2> pts;
  pts.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    pts.push_back(bezier_eval(path, static_cast<double>(i) / (n - 1)).position);
  }
  return pts;
}

namespace {

double directed_hausdorff(const std::vector<Point2>& a, const std::vector<Point2>& b) {
  double worst = 0.0;
  for (const auto& x : a) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& y : b) {
      best = std::min(best, (x - y).squaredNorm());
      if (best <= worst) break;
    }
    worst = std::max(worst, best);
  }
  return std::sqrt(worst);
}

}  // namespace

double hausdorff_distance(const std::vector<Point2>& a, const std::vector<Point2>& b) {
  if (a.empty() || b.empty()) throw Error("Hausdorff distance of an empty set");
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

double tracking_error(const Trajectory& traj, const BezierPath& path) {
  if (traj.samples.empty()) throw Error("tracking error of an empty trajectory");
  std::vector<Point2> robot;
  robot.reserve(traj.samples.size());
  for (const auto& s : traj.samples) robot.emplace_back(s.state.x, s.state.y);
  return hausdorff_distance(robot, discretize_path(path, 200));
}

BezierPath builtin_trajectory(int id, double t_period, double t_final) {
  std::vector<Point2> pts;
  switch (id) {
    case 1: pts = {{0, 0}, {2, 4}, {6, -2}, {8, 0}}; break;
    case 2: pts = {{0, 0}, {2, 5}, {4, -5}, {6, 5}, {8, 0}}; break;
    case 3: pts = {{0, 0}, {5, 0}, {5, 0}, {5, 5}}; break;
    case 4: pts = {{0, 0}, {4, 4}, {8, -4}, {4, -4}, {0, 4}}; break;
    default:
      throw ConfigError("unknown trajectory id " + std::to_string(id), "trajectory");
  }
  return BezierPath(std::move(pts), t_period, t_final);
}

std::vector<Scenario> make_scenarios(std::string_view trajectory, std::string_view start,
                                     double t_period, double t_final) {
  std::vector<int> ids;
  if (trajectory == "all") {
    ids = {1, 2, 3, 4};
  } else if (trajectory.size() == 1 && trajectory[0] >= '1' && trajectory[0] <= '4') {
    ids = {trajectory[0] - '0'};
  } else {
    throw ConfigError("unknown trajectory '" + std::string(trajectory) + "'", "trajectory");
  }
  std::vector<StartCondition> starts;
  if (start == "all") {
    starts = {StartCondition::kPerfect, StartCondition::kLateral, StartCondition::kHeading};
  } else {
    starts = {parse_start(start)};
  }
  std::vector<Scenario> out;
  for (int id : ids) {
    for (auto s : starts) {
      out.push_back({builtin_trajectory(id, t_period, t_final), s,
                     "trajectory" + std::to_string(id) + "/" + std::string(start_name(s))});
    }
  }
  return out;
}

}  // namespace activepref
