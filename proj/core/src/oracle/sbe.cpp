#include "rcrl/oracle/sbe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rcrl/core/errors.hpp"

namespace rcrl::oracle {

void OracleConfig::Validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("oracle.gamma", "must lie in (0, 1)");
  if (action_samples < 1) throw ConfigError("oracle.action_samples", "must be >= 1");
  if (!(tolerance > 0.0)) throw ConfigError("oracle.tolerance", "must be > 0");
  if (max_sweeps < 1) throw ConfigError("oracle.max_sweeps", "must be >= 1");
  if (pad_cells < 0) throw ConfigError("oracle.pad_cells", "must be >= 0");
}

TransitionTable::TransitionTable(GridSpec grid, int num_actions, std::vector<Successor> successors)
    : grid_(std::move(grid)), num_actions_(num_actions), successors_(std::move(successors)) {
  if (grid_.dims() > 3) throw DimensionMismatch("grid oracle supports at most 3 dimensions");
  if (num_actions_ < 1 || successors_.size() != grid_.size() * num_actions_) {
    throw DimensionMismatch("transition table size does not match grid x actions");
  }
}

Successor TransitionTable::Locate(const StateVec& x, double exterior_value) const {
  Successor out;
  std::int64_t base = 0;
  for (int d = 0; d < grid_.dims(); ++d) {
    const Axis& ax = grid_.axis(d);
    const double u = (x[d] - ax.lower) / ax.step();
    // Nodes on the far boundary are inside; anything beyond is exterior.
    if (!(u >= -1e-9 && u <= ax.count - 1 + 1e-9)) {
      out.base = -1;
      out.exterior = exterior_value;
      return out;
    }
    const double uc = std::clamp(u, 0.0, ax.count - 1.0);
    const int i = std::min(static_cast<int>(uc), ax.count - 2);
    out.frac[d] = uc - i;
    base += static_cast<std::int64_t>(grid_.stride(d)) * i;
  }
  out.base = base;
  return out;
}

double TransitionTable::Lookup(const Successor& s, std::span<const double> values) const {
  if (s.base < 0) return s.exterior;
  const int dims = grid_.dims();
  double acc = 0.0;
  for (int corner = 0; corner < (1 << dims); ++corner) {
    double w = 1.0;
    std::size_t idx = static_cast<std::size_t>(s.base);
    for (int d = 0; d < dims; ++d) {
      if (corner & (1 << d)) {
        w *= s.frac[d];
        idx += grid_.stride(d);
      } else {
        w *= 1.0 - s.frac[d];
      }
    }
    if (w != 0.0) acc += w * values[idx];
  }
  return acc;
}

TransitionTable TransitionTable::Build(const Environment& env, const GridSpec& grid,
                                       std::span<const ActionVec> actions,
                                       const StateFunction& exterior) {
  const int na = static_cast<int>(actions.size());
  TransitionTable table(grid, na, std::vector<Successor>(grid.size() * na));
  for (std::size_t cell = 0; cell < grid.size(); ++cell) {
    const StateVec s = grid.Point(cell);
    for (int a = 0; a < na; ++a) {
      const StateVec next = env.Propagate(s, env.Clamp(actions[a]));
      if (!next.allFinite()) throw IntegrationOverflow("oracle: non-finite successor");
      Successor succ = table.Locate(next, 0.0);
      if (succ.base < 0) succ.exterior = exterior(next);
      table.successors_[cell * na + a] = succ;
    }
  }
  return table;
}

TransitionTable TransitionTable::BuildForPolicy(const Environment& env, const GridSpec& grid,
                                                const Policy& policy,
                                                const StateFunction& exterior) {
  TransitionTable table(grid, 1, std::vector<Successor>(grid.size()));
  for (std::size_t cell = 0; cell < grid.size(); ++cell) {
    const StateVec s = grid.Point(cell);
    const StateVec next = env.Propagate(s, env.Clamp(policy(s)));
    if (!next.allFinite()) throw IntegrationOverflow("oracle: non-finite successor");
    Successor succ = table.Locate(next, 0.0);
    if (succ.base < 0) succ.exterior = exterior(next);
    table.successors_[cell] = succ;
  }
  return table;
}

std::vector<double> ApplySafetyOperator(const TransitionTable& table, std::span<const double> h,
                                        double gamma, std::span<const double> q) {
  const std::size_t n = table.grid().size();
  if (h.size() != n || q.size() != n) throw DimensionMismatch("operator inputs must match grid");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (int a = 0; a < table.num_actions(); ++a) {
      best = std::min(best, table.Lookup(table.at(i, a), q));
    }
    out[i] = (1.0 - gamma) * h[i] + gamma * std::max(h[i], best);
  }
  return out;
}

double ContractionRatio(const TransitionTable& table, std::span<const double> h, double gamma,
                        std::span<const double> q, std::span<const double> q_hat) {
  double den = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) den = std::max(den, std::abs(q[i] - q_hat[i]));
  if (den == 0.0) return 0.0;
  const std::vector<double> bq = ApplySafetyOperator(table, h, gamma, q);
  const std::vector<double> bq_hat = ApplySafetyOperator(table, h, gamma, q_hat);
  double num = 0.0;
  for (std::size_t i = 0; i < bq.size(); ++i) num = std::max(num, std::abs(bq[i] - bq_hat[i]));
  return num / den;
}

std::vector<ActionVec> SampleActions(const EnvSpec& spec, int samples_per_axis) {
  const int dims = spec.action_dim;
  std::vector<ActionVec> actions;
  std::vector<int> idx(dims, 0);
  while (true) {
    ActionVec a(dims);
    for (int d = 0; d < dims; ++d) {
      const double lo = spec.action_low[d], hi = spec.action_high[d];
      a[d] = samples_per_axis == 1 ? 0.5 * (lo + hi)
                                   : lo + (hi - lo) * idx[d] / (samples_per_axis - 1);
    }
    actions.push_back(std::move(a));
    int d = dims - 1;
    while (d >= 0 && ++idx[d] == samples_per_axis) idx[d--] = 0;
    if (d < 0) break;
  }
  return actions;
}

namespace {

void RequireGridMatchesEnv(const Environment& env, const GridSpec& grid) {
  if (grid.dims() != env.spec().state_dim) {
    throw DimensionMismatch("grid has " + std::to_string(grid.dims()) +
                            " axes but the environment state has " +
                            std::to_string(env.spec().state_dim) + " entries");
  }
  if (grid.dims() > 3) throw DimensionMismatch("grid oracle supports at most 3 dimensions");
}

ValueGrid Crop(const ValueGrid& working, const GridSpec& requested, int pad) {
  ValueGrid out(requested);
  for (std::size_t flat = 0; flat < requested.size(); ++flat) {
    std::vector<int> idx = requested.Unflatten(flat);
    for (int& i : idx) i += pad;
    out.values[flat] = working.values[working.spec.Flatten(idx)];
  }
  return out;
}

SafetyValueSolution Iterate(const TransitionTable& table, const std::vector<double>& h,
                            const GridSpec& requested, const OracleConfig& cfg) {
  SafetyValueSolution sol;
  std::vector<double> v = h;
  double residual = std::numeric_limits<double>::infinity();
  int sweep = 0;
  while (sweep < cfg.max_sweeps) {
    std::vector<double> next = ApplySafetyOperator(table, h, cfg.gamma, v);
    residual = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) residual = std::max(residual, std::abs(next[i] - v[i]));
    v.swap(next);
    ++sweep;
    sol.residual_history.push_back(residual);
    if (residual < cfg.tolerance) break;
  }
  if (!(residual < cfg.tolerance)) {
    throw ConvergenceFailure("safety value iteration did not converge in " +
                                 std::to_string(cfg.max_sweeps) + " sweeps (residual " +
                                 std::to_string(residual) + ")",
                             residual);
  }
  sol.working = ValueGrid(table.grid());
  sol.working.values = std::move(v);
  sol.value = Crop(sol.working, requested, cfg.pad_cells);
  sol.sweeps = sweep;
  sol.residual = residual;
  return sol;
}

std::vector<double> NodeValues(const GridSpec& grid, const StateFunction& f) {
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = f(grid.Point(i));
  return out;
}

}  // namespace

SafetyValueSolution SolveSbe(const Environment& env, const GridSpec& grid, const OracleConfig& cfg) {
  cfg.Validate();
  RequireGridMatchesEnv(env, grid);
  const GridSpec working = grid.Padded(cfg.pad_cells);
  const StateFunction h = [&env](const StateVec& s) { return env.Constraint(s); };
  const std::vector<ActionVec> actions = SampleActions(env.spec(), cfg.action_samples);
  const TransitionTable table = TransitionTable::Build(env, working, actions, h);
  return Iterate(table, NodeValues(working, h), grid, cfg);
}

SafetyValueSolution EvaluatePolicySafety(const Environment& env, const Policy& policy,
                                         const GridSpec& grid, const OracleConfig& cfg,
                                         const StateFunction& constraint) {
  cfg.Validate();
  RequireGridMatchesEnv(env, grid);
  const GridSpec working = grid.Padded(cfg.pad_cells);
  const StateFunction h = constraint ? constraint
                                     : StateFunction([&env](const StateVec& s) {
                                         return env.Constraint(s);
                                       });
  const TransitionTable table = TransitionTable::BuildForPolicy(env, working, policy, h);
  return Iterate(table, NodeValues(working, h), grid, cfg);
}

GreedySafetyPolicy::GreedySafetyPolicy(const Environment& env, SafetyValueSolution solution,
                                       const OracleConfig& cfg)
    : env_(&env),
      solution_(std::move(solution)),
      actions_(SampleActions(env.spec(), cfg.action_samples)),
      locator_(solution_.working.spec, 1,
               std::vector<Successor>(solution_.working.spec.size())) {}

ActionVec GreedySafetyPolicy::operator()(const StateVec& s) const {
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_a = 0;
  for (std::size_t a = 0; a < actions_.size(); ++a) {
    const StateVec next = env_->Propagate(s, actions_[a]);
    Successor succ = locator_.Locate(next, 0.0);
    const double v = succ.base < 0 ? env_->Constraint(next)
                                   : locator_.Lookup(succ, solution_.working.values);
    if (v < best) {
      best = v;
      best_a = a;
    }
  }
  return actions_[best_a];
}

KernelMask AnalyticKernel(const GridSpec& grid, double a_max, double bound) {
  if (grid.dims() != 2) throw DimensionMismatch("analytic kernel needs a 2-D grid");
  KernelMask mask{grid, std::vector<std::uint8_t>(grid.size())};
  const double k = 1.0 / (2.0 * a_max);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const StateVec s = grid.Point(i);
    const double x1 = s[0], x2 = s[1];
    const bool in_box = std::max(std::abs(x1), std::abs(x2)) <= bound;
    const bool brake_pos = x2 <= 0.0 || x1 + x2 * x2 * k <= bound;
    const bool brake_neg = x2 >= 0.0 || -x1 + x2 * x2 * k <= bound;
    mask.feasible[i] = in_box && brake_pos && brake_neg;
  }
  return mask;
}

double ContractionCheck(const OracleConfig& cfg, int trials, CounterRng& rng) {
  cfg.Validate();
  if (trials < 1) throw std::invalid_argument("contraction check needs at least one trial");
  const GridSpec grid = GridSpec::Uniform(2, 0.0, 1.0, 16);
  const std::size_t n = grid.size();
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const int na = 1 + static_cast<int>(rng() % 3);
    std::vector<Successor> succ(n * na);
    for (Successor& s : succ) {
      if (rng.Uniform() < 0.1) {
        s.base = -1;
        s.exterior = rng.Uniform(-1.0, 1.0);
        continue;
      }
      const int i0 = static_cast<int>(rng() % 15), i1 = static_cast<int>(rng() % 15);
      s.base = static_cast<std::int64_t>(grid.Flatten({i0, i1}));
      s.frac = {rng.Uniform(), rng.Uniform(), 0.0};
    }
    const TransitionTable table(grid, na, std::move(succ));
    std::vector<double> h(n), q(n), q_hat(n);
    const double scale = rng.Uniform(0.01, 2.0);
    for (std::size_t i = 0; i < n; ++i) {
      h[i] = rng.Uniform(-1.0, 1.0);
      q[i] = rng.Uniform(-2.0, 2.0);
      q_hat[i] = q[i] + scale * rng.Uniform(-1.0, 1.0);
    }
    worst = std::max(worst, ContractionRatio(table, h, cfg.gamma, q, q_hat));
  }
  return worst;
}

}  // namespace rcrl::oracle
