#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rcrl/core/rng.hpp"

namespace rcrl {

using StateVec = Eigen::VectorXd;
using ActionVec = Eigen::VectorXd;

/// Why a transition ended its episode.
enum class EpisodeEnd : std::uint8_t {
  kRunning = 0,
  /// Step budget exhausted. Value targets bootstrap normally.
  kTimeout = 1,
  /// Left the environment's bounding region. Value targets do not bootstrap
  /// through the successor; the safety target uses h(s') instead.
  kBoundaryExit = 2,
};

/// One environment step as stored in the replay buffer.
struct Transition {
  StateVec s;
  ActionVec a;
  double r = 0.0;
  StateVec s_next;
  double h = 0.0;       // h(s)
  double h_next = 0.0;  // h(s')
  int c = 0;            // 1 iff h(s) > 0
  EpisodeEnd done = EpisodeEnd::kRunning;

  bool terminal() const { return done == EpisodeEnd::kBoundaryExit; }
};

struct EnvSpec {
  std::string name;
  int state_dim = 0;
  int action_dim = 0;
  ActionVec action_low;
  ActionVec action_high;
  double dt = 0.0;
  int max_episode_len = 0;
  /// Per-coordinate magnitude used to normalise network inputs.
  StateVec state_scale;
  std::string termination;

  /// Throws ConfigError if any invariant is broken.
  void Validate() const;
};

/// Deterministic, immutable control task. Stepping is a pure function of
/// (s, a), so one instance can be shared across threads.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual const EnvSpec& spec() const = 0;

  /// Sample s0 ~ d0.
  virtual StateVec Reset(CounterRng& rng) const = 0;

  /// State constraint; h(s) <= 0 means safe.
  virtual double Constraint(const StateVec& s) const = 0;

  virtual double Reward(const StateVec& s, const ActionVec& a) const = 0;

  /// One dt of the integrator. `a` is already inside the action bounds.
  virtual StateVec Propagate(const StateVec& s, const ActionVec& a) const = 0;

  /// True when s lies outside the region in which episodes may continue.
  virtual bool OutOfBounds(const StateVec& s) const = 0;

  /// Fills in coordinates that are functions of the others (e.g. the
  /// tracking reference). Identity by default.
  virtual StateVec Canonicalize(const StateVec& s) const { return s; }

  /// Clamp, integrate, and fill every field of the transition except the
  /// timeout flag, which belongs to the episode loop.
  Transition Step(const StateVec& s, const ActionVec& a) const;

  ActionVec Clamp(const ActionVec& a) const;

  /// Cost indicator c(s) = 1{h(s) > 0}.
  static int Cost(double h) { return h > 0.0 ? 1 : 0; }
};

using EnvPtr = std::shared_ptr<const Environment>;

}  // namespace rcrl
