#include "rcrl/rac/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "rcrl/core/errors.hpp"
#include "rcrl/envs/quadrotor.hpp"

namespace rcrl::rac {

oracle::GridSpec DefaultGrid(const EnvSpec& spec, int n) {
  if (spec.state_dim != 2) {
    throw ConfigError("env", "a state-space grid needs a 2-D environment, got " +
                                 std::to_string(spec.state_dim) + " dimensions");
  }
  return oracle::GridSpec({{-spec.state_scale[0], spec.state_scale[0], n},
                           {-spec.state_scale[1], spec.state_scale[1], n}});
}

oracle::OracleConfig DefaultOracleConfig(int n, double gamma) {
  oracle::OracleConfig cfg;
  cfg.gamma = gamma;
  cfg.pad_cells = std::max(1, (n - 1) / 5);
  return cfg;
}

Eigen::VectorXd Halton(std::size_t index, int dims) {
  static constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
  if (dims < 1 || dims > 16) throw std::invalid_argument("Halton supports 1..16 dimensions");
  Eigen::VectorXd x(dims);
  for (int d = 0; d < dims; ++d) {
    const int base = kPrimes[d];
    double f = 1.0, r = 0.0;
    for (std::size_t i = index + 1; i > 0; i /= base) {
      f /= base;
      r += f * static_cast<double>(i % base);
    }
    x[d] = r;
  }
  return x;
}

namespace {

std::size_t NearestNode(const oracle::GridSpec& g, const StateVec& x) {
  std::vector<int> idx(g.dims());
  for (int d = 0; d < g.dims(); ++d) {
    const oracle::Axis& ax = g.axis(d);
    const long i = std::lround((x[d] - ax.lower) / ax.step());
    idx[d] = static_cast<int>(std::clamp<long>(i, 0, ax.count - 1));
  }
  return g.Flatten(idx);
}

Eigen::MatrixXd ToMatrix(const std::vector<StateVec>& v, int rows) {
  Eigen::MatrixXd m(rows, static_cast<Eigen::Index>(v.size()));
  for (std::size_t j = 0; j < v.size(); ++j) m.col(static_cast<Eigen::Index>(j)) = v[j];
  return m;
}

}  // namespace

ProbeSet MakeProbeSet(const Environment& env, const oracle::KernelMask* kernel, int count,
                      int margin, CounterRng rng) {
  const int sd = env.spec().state_dim;
  std::vector<StateVec> feas, infeas;
  const std::size_t limit = static_cast<std::size_t>(count) * 1000;
  if (kernel) {
    const oracle::GridSpec& g = kernel->spec;
    const oracle::KernelMask deep = kernel->Eroded(margin);
    for (std::size_t i = 0; i < limit && (feas.size() < static_cast<std::size_t>(count) ||
                                          infeas.size() < static_cast<std::size_t>(count));
         ++i) {
      const Eigen::VectorXd u = Halton(i, g.dims());
      StateVec s(g.dims());
      for (int d = 0; d < g.dims(); ++d) s[d] = g.axis(d).lower + u[d] * (g.axis(d).upper - g.axis(d).lower);
      const std::size_t node = NearestNode(g, s);
      if (deep.feasible[node] && feas.size() < static_cast<std::size_t>(count)) {
        feas.push_back(s);
      } else if (!kernel->feasible[node] && infeas.size() < static_cast<std::size_t>(count)) {
        infeas.push_back(s);
      }
    }
  } else {
    for (std::size_t i = 0; i < limit && (feas.size() < static_cast<std::size_t>(count) ||
                                          infeas.size() < static_cast<std::size_t>(count));
         ++i) {
      const StateVec s = env.Reset(rng);
      auto& bucket = env.Constraint(s) <= 0.0 ? feas : infeas;
      if (bucket.size() < static_cast<std::size_t>(count)) bucket.push_back(s);
    }
  }
  return {ToMatrix(feas, sd), ToMatrix(infeas, sd)};
}

EpisodeStats RunEpisode(const Environment& env, const oracle::Policy& policy, StateVec s0) {
  const int horizon = env.spec().max_episode_len;
  EpisodeStats st;
  StateVec s = env.Canonicalize(s0);
  int cost = 0;
  for (int t = 0; t < horizon; ++t) {
    const Transition tr = env.Step(s, policy(s));
    st.ret += tr.r;
    cost += tr.c;
    st.any_violation = st.any_violation || tr.c == 1;
    ++st.length;
    s = tr.s_next;
    if (tr.terminal()) {
      const int c_exit = Environment::Cost(tr.h_next);
      cost += c_exit * (horizon - t - 1);
      st.any_violation = st.any_violation || c_exit == 1;
      st.violation_rate = static_cast<double>(cost) / horizon;
      return st;
    }
  }
  st.any_violation = st.any_violation || env.Constraint(s) > 0.0;
  st.violation_rate = static_cast<double>(cost) / horizon;
  return st;
}

EvalSummary Evaluate(const Environment& env, const oracle::Policy& policy,
                     const std::vector<StateVec>& starts) {
  if (starts.empty()) throw std::invalid_argument("evaluation needs at least one start");
  EvalSummary sum;
  for (const StateVec& s0 : starts) {
    const EpisodeStats ep = RunEpisode(env, policy, s0);
    sum.avg_return += ep.ret;
    sum.violation_rate += ep.violation_rate;
    sum.violating_episodes += ep.any_violation ? 1.0 : 0.0;
  }
  sum.episodes = static_cast<int>(starts.size());
  sum.avg_return /= sum.episodes;
  sum.violation_rate /= sum.episodes;
  sum.violating_episodes /= sum.episodes;
  return sum;
}

std::vector<StateVec> EvaluationStarts(const Environment& env, const oracle::KernelMask* kernel,
                                       int n, int margin, CounterRng rng) {
  std::vector<StateVec> starts;
  if (const auto* quad = dynamic_cast<const envs::Quadrotor2D*>(&env)) {
    for (const auto& [x, z] : envs::Quadrotor2D::EvaluationStarts()) {
      starts.push_back(quad->StaticStart(x, z));
    }
    return starts;
  }
  if (kernel) {
    const oracle::KernelMask inner = kernel->Eroded(margin);
    std::vector<std::size_t> cells;
    for (std::size_t i = 0; i < inner.feasible.size(); ++i) {
      if (inner.feasible[i]) cells.push_back(i);
    }
    if (cells.empty()) throw std::runtime_error("oracle kernel has no interior cells to start from");
    for (int i = 0; i < n; ++i) {
      const unsigned __int128 m = cells.size();
      starts.push_back(kernel->spec.Point(cells[static_cast<std::size_t>((m * rng()) >> 64)]));
    }
    return starts;
  }
  for (int i = 0; i < n; ++i) starts.push_back(env.Reset(rng));
  return starts;
}

void SliceSpec::Validate(int state_dim) const {
  if (axes.size() != 2 || ranges.size() != 2) {
    throw ConfigError("slice.axes", "a slice needs exactly two axes");
  }
  std::set<int> seen;
  for (int a : axes) {
    if (a < 0 || a >= state_dim) throw ConfigError("slice.axes", "axis index out of range");
    seen.insert(a);
  }
  if (seen.size() != 2) throw ConfigError("slice.axes", "axes must differ");
  if (base.size() != state_dim) throw ConfigError("slice.base", "base state has wrong dimension");
  oracle::GridSpec(std::vector<oracle::Axis>(ranges.begin(), ranges.end()));
}

oracle::GridSpec SliceSpec::Grid() const { return oracle::GridSpec(ranges); }

StateVec SliceSpec::StateAt(const Environment& env, const Eigen::VectorXd& point) const {
  StateVec s = base;
  s[axes[0]] = point[0];
  s[axes[1]] = point[1];
  return env.Canonicalize(s);
}

oracle::ValueGrid ExportSlice(const Learner& learner, const Environment& env,
                              const SliceSpec& slice) {
  slice.Validate(env.spec().state_dim);
  oracle::ValueGrid out{slice.Grid()};
  Eigen::MatrixXd states(env.spec().state_dim, static_cast<Eigen::Index>(out.spec.size()));
  for (std::size_t i = 0; i < out.spec.size(); ++i) {
    states.col(static_cast<Eigen::Index>(i)) = slice.StateAt(env, out.spec.Point(i));
  }
  const Eigen::VectorXd f = learner.ConstraintAtPolicy(states);
  out.values.assign(f.data(), f.data() + f.size());
  return out;
}

SliceSpec FullSlice(const oracle::GridSpec& grid, int state_dim) {
  if (grid.dims() != 2 || state_dim != 2) {
    throw ConfigError("slice.axes", "a full-state slice needs a 2-D environment");
  }
  return {{0, 1}, {grid.axis(0), grid.axis(1)}, StateVec::Zero(2)};
}

std::vector<SliceSpec> QuadrotorSlices(const std::vector<double>& zdots, int n) {
  std::vector<SliceSpec> out;
  for (double zdot : zdots) {
    SliceSpec s;
    s.axes = {0, envs::kQuadZIndex};
    s.ranges = {{-1.5, 1.5, n}, {0.5, 1.5, n}};
    s.base = StateVec::Zero(envs::kQuadStateDim);
    s.base[3] = zdot;
    out.push_back(std::move(s));
  }
  return out;
}

oracle::KernelMask LearnedFeasibleMask(const Learner& learner, const Environment& env,
                                       const oracle::GridSpec& grid) {
  return oracle::KernelMask::FromValues(
      ExportSlice(learner, env, FullSlice(grid, env.spec().state_dim)));
}

oracle::KernelMask PersistentFeasibleMask(const Learner& learner, const Environment& env,
                                          const oracle::GridSpec& grid,
                                          const oracle::OracleConfig& cfg) {
  const oracle::Policy policy = [&](const StateVec& s) { return learner.Act(s); };
  const oracle::StateFunction constraint = [&](const StateVec& s) {
    return std::max(env.Constraint(s), learner.ConstraintAtPolicy(s));
  };
  return oracle::EvaluatePolicySafety(env, policy, grid, cfg, constraint).Kernel();
}

}  // namespace rcrl::rac
