#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

#include "rcrl/core/environment.hpp"

namespace rcrl::envs {

// Planar quadrotor tracking a counter-clockwise circle.
//
// Body state x = [x, xdot, z, zdot, theta, thetadot]. The observed state is
// s = [x; x_ref] (12 entries), where x_ref is the body state of the current
// waypoint. Actions are the two motor thrusts normalised to [0, 1].

inline constexpr int kQuadBodyDim = 6;
inline constexpr int kQuadStateDim = 12;
inline constexpr int kQuadZIndex = 2;

struct Quadrotor2DParams {
  double mass = 0.027;       // kg
  double inertia = 1.4e-5;   // kg m^2
  double arm = 0.0397;       // m
  double gravity = 9.81;     // m/s^2
  double dt = 0.02;          // s
  int num_waypoints = 360;
  int max_episode_len = 360;
  double center_x = 0.0;
  double center_z = 1.0;
  double radius = 1.0;
  double z_low = 0.5;
  double z_high = 1.5;
  /// Episodes end outside {|x| <= exit_x, |z| <= exit_z}.
  double exit_x = 2.0;
  double exit_z = 3.0;
  std::array<double, kQuadBodyDim> q_diag = {10.0, 1.0, 10.0, 1.0, 0.2, 0.2};
  std::array<double, 2> r_diag = {1e-4, 1e-4};

  /// Thrust per motor [N] at normalised command 1. 0.5 is hover.
  double MaxMotorThrust() const { return mass * gravity; }
};

/// h(s) = max{z_low - z, z - z_high}. `s` may be the body or full state.
double QuadConstraint(const StateVec& s, double z_low = 0.5, double z_high = 1.5);

/// -(x - x_ref)' Q (x - x_ref) - (a - a_ref)' R (a - a_ref) with diagonal Q, R.
double QuadReward(const StateVec& x, const ActionVec& a, const StateVec& ref_x,
                  const ActionVec& ref_a, const Quadrotor2DParams& params = {});

/// One explicit Euler step of the rigid-body dynamics under normalised thrusts.
StateVec QuadDynamics(const StateVec& x, const ActionVec& thrusts, double dt,
                      const Quadrotor2DParams& params = {});

/// Index of the waypoint being tracked; advances one step counter-clockwise.
class WaypointCursor {
 public:
  explicit WaypointCursor(int index = 0, int count = 360);
  int index() const { return index_; }
  void Advance() { index_ = (index_ + 1) % count_; }

 private:
  int index_;
  int count_;
};

class Quadrotor2D : public Environment {
 public:
  explicit Quadrotor2D(Quadrotor2DParams params = {});

  const EnvSpec& spec() const override { return spec_; }
  StateVec Reset(CounterRng& rng) const override;
  double Constraint(const StateVec& s) const override;
  double Reward(const StateVec& s, const ActionVec& a) const override;
  StateVec Propagate(const StateVec& s, const ActionVec& a) const override;
  bool OutOfBounds(const StateVec& s) const override;
  /// Sets the reference block to the waypoint nearest to (x, z).
  StateVec Canonicalize(const StateVec& s) const override;

  const Quadrotor2DParams& params() const { return params_; }

  /// Body state of waypoint i (position on the circle, tangential velocity).
  StateVec Waypoint(int index) const;
  /// Nearest waypoint to (x, z); ties go to the lower index.
  int NearestWaypoint(double x, double z) const;
  /// Waypoint index encoded in the reference block of s.
  int ReferenceIndex(const StateVec& s) const;
  /// Normalised hover thrust pair.
  ActionVec HoverAction() const { return ActionVec::Constant(2, 0.5); }

  /// Hover start at (x, z) with zero rates, reference assigned.
  StateVec StaticStart(double x, double z) const;

  /// Fixed evaluation starts (x, z).
  static std::vector<std::array<double, 2>> EvaluationStarts();

  /// Initialisation ranges for [x, xdot, z, zdot, theta, thetadot].
  static std::array<std::array<double, 2>, kQuadBodyDim> InitRanges();

 private:
  Quadrotor2DParams params_;
  EnvSpec spec_;
  std::vector<StateVec> waypoints_;
};

}  // namespace rcrl::envs
