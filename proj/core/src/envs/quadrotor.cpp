#include "rcrl/envs/quadrotor.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "rcrl/core/errors.hpp"

namespace rcrl::envs {

double QuadConstraint(const StateVec& s, double z_low, double z_high) {
  if (s.size() <= kQuadZIndex) throw DimensionMismatch("quadrotor state too short for z");
  const double z = s[kQuadZIndex];
  return std::max(z_low - z, z - z_high);
}

double QuadReward(const StateVec& x, const ActionVec& a, const StateVec& ref_x,
                  const ActionVec& ref_a, const Quadrotor2DParams& params) {
  if (x.size() != kQuadBodyDim || ref_x.size() != kQuadBodyDim || a.size() != 2 ||
      ref_a.size() != 2) {
    throw DimensionMismatch("quad reward expects |x| = 6 and |a| = 2");
  }
  double cost = 0.0;
  for (int i = 0; i < kQuadBodyDim; ++i) {
    const double d = x[i] - ref_x[i];
    cost += params.q_diag[i] * d * d;
  }
  for (int i = 0; i < 2; ++i) {
    const double d = a[i] - ref_a[i];
    cost += params.r_diag[i] * d * d;
  }
  return -cost;
}

StateVec QuadDynamics(const StateVec& x, const ActionVec& thrusts, double dt,
                      const Quadrotor2DParams& p) {
  if (x.size() < kQuadBodyDim || thrusts.size() != 2) {
    throw DimensionMismatch("quad dynamics expects |x| >= 6 and |thrusts| = 2");
  }
  const double t1 = thrusts[0] * p.MaxMotorThrust();
  const double t2 = thrusts[1] * p.MaxMotorThrust();
  const double theta = x[4];
  const double xdd = (t1 + t2) * std::sin(theta) / p.mass;
  const double zdd = (t1 + t2) * std::cos(theta) / p.mass - p.gravity;
  const double thdd = (t2 - t1) * p.arm / p.inertia;

  StateVec next(kQuadBodyDim);
  next[0] = x[0] + dt * x[1];
  next[1] = x[1] + dt * xdd;
  next[2] = x[2] + dt * x[3];
  next[3] = x[3] + dt * zdd;
  next[4] = x[4] + dt * x[5];
  next[5] = x[5] + dt * thdd;
  if (!next.allFinite()) throw IntegrationOverflow("quadrotor: non-finite state after step");
  return next;
}

WaypointCursor::WaypointCursor(int index, int count) : index_(index), count_(count) {
  if (count <= 0 || index < 0 || index >= count) {
    throw std::out_of_range("waypoint index outside [0, count)");
  }
}

Quadrotor2D::Quadrotor2D(Quadrotor2DParams params) : params_(params) {
  if (!(params_.mass > 0 && params_.inertia > 0 && params_.arm > 0)) {
    throw ConfigError("env.mass/inertia/arm", "must be > 0");
  }
  if (params_.num_waypoints <= 0) throw ConfigError("env.num_waypoints", "must be > 0");
  for (double q : params_.q_diag) {
    if (q < 0) throw ConfigError("env.q_diag", "must be >= 0");
  }
  for (double r : params_.r_diag) {
    if (!(r > 0)) throw ConfigError("env.r_diag", "must be > 0");
  }

  spec_.name = "quadrotor2d";
  spec_.state_dim = kQuadStateDim;
  spec_.action_dim = 2;
  spec_.action_low = ActionVec::Zero(2);
  spec_.action_high = ActionVec::Ones(2);
  spec_.dt = params_.dt;
  spec_.max_episode_len = params_.max_episode_len;
  spec_.state_scale.resize(kQuadStateDim);
  spec_.state_scale << 1.5, 1.0, 1.5, 1.5, 0.2, 1.0, 1.5, 1.0, 1.5, 1.5, 0.2, 1.0;
  spec_.termination = "step count reaches max_episode_len, or |x| > exit_x or |z| > exit_z";
  spec_.Validate();

  waypoints_.reserve(params_.num_waypoints);
  const double period = params_.num_waypoints * params_.dt;
  const double omega = 2.0 * std::numbers::pi / period;
  for (int i = 0; i < params_.num_waypoints; ++i) {
    const double phi = 2.0 * std::numbers::pi * i / params_.num_waypoints;
    StateVec w = StateVec::Zero(kQuadBodyDim);
    w[0] = params_.center_x + params_.radius * std::cos(phi);
    w[1] = -params_.radius * omega * std::sin(phi);
    w[2] = params_.center_z + params_.radius * std::sin(phi);
    w[3] = params_.radius * omega * std::cos(phi);
    waypoints_.push_back(std::move(w));
  }
}

StateVec Quadrotor2D::Waypoint(int index) const {
  return waypoints_.at(static_cast<std::size_t>(index));
}

int Quadrotor2D::NearestWaypoint(double x, double z) const {
  int best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (int i = 0; i < params_.num_waypoints; ++i) {
    const double dx = waypoints_[i][0] - x;
    const double dz = waypoints_[i][2] - z;
    const double d2 = dx * dx + dz * dz;
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  return best;
}

int Quadrotor2D::ReferenceIndex(const StateVec& s) const {
  const double angle = std::atan2(s[kQuadBodyDim + 2] - params_.center_z,
                                  s[kQuadBodyDim + 0] - params_.center_x);
  const double step = 2.0 * std::numbers::pi / params_.num_waypoints;
  long idx = std::lround(angle / step);
  idx %= params_.num_waypoints;
  if (idx < 0) idx += params_.num_waypoints;
  return static_cast<int>(idx);
}

StateVec Quadrotor2D::Canonicalize(const StateVec& s) const {
  if (s.size() != kQuadStateDim) throw DimensionMismatch("quadrotor state must have length 12");
  StateVec out = s;
  out.tail(kQuadBodyDim) = waypoints_[NearestWaypoint(s[0], s[2])];
  return out;
}

std::array<std::array<double, 2>, kQuadBodyDim> Quadrotor2D::InitRanges() {
  return {{{-1.5, 1.5}, {-1.0, 1.0}, {0.25, 1.75}, {-1.5, 1.5}, {-0.2, 0.2}, {-0.1, 0.1}}};
}

std::vector<std::array<double, 2>> Quadrotor2D::EvaluationStarts() {
  return {{1.0, 1.0}, {-1.0, 1.0}, {0.0, 0.53}, {0.0, 1.47}};
}

StateVec Quadrotor2D::Reset(CounterRng& rng) const {
  StateVec s = StateVec::Zero(kQuadStateDim);
  const auto ranges = InitRanges();
  for (int i = 0; i < kQuadBodyDim; ++i) s[i] = rng.Uniform(ranges[i][0], ranges[i][1]);
  return Canonicalize(s);
}

StateVec Quadrotor2D::StaticStart(double x, double z) const {
  StateVec s = StateVec::Zero(kQuadStateDim);
  s[0] = x;
  s[2] = z;
  return Canonicalize(s);
}

double Quadrotor2D::Constraint(const StateVec& s) const {
  return QuadConstraint(s, params_.z_low, params_.z_high);
}

double Quadrotor2D::Reward(const StateVec& s, const ActionVec& a) const {
  return QuadReward(s.head(kQuadBodyDim), a, s.tail(kQuadBodyDim), HoverAction(), params_);
}

StateVec Quadrotor2D::Propagate(const StateVec& s, const ActionVec& a) const {
  if (s.size() != kQuadStateDim) throw DimensionMismatch("quadrotor state must have length 12");
  WaypointCursor cursor(ReferenceIndex(s), params_.num_waypoints);
  cursor.Advance();
  StateVec next(kQuadStateDim);
  next.head(kQuadBodyDim) = QuadDynamics(s.head(kQuadBodyDim), a, params_.dt, params_);
  next.tail(kQuadBodyDim) = waypoints_[cursor.index()];
  return next;
}

bool Quadrotor2D::OutOfBounds(const StateVec& s) const {
  return std::abs(s[0]) > params_.exit_x || std::abs(s[kQuadZIndex]) > params_.exit_z;
}

}  // namespace rcrl::envs
