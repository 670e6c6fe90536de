#include "run_config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "rcrl/core/errors.hpp"
#include "rcrl/rac/evaluation.hpp"

#include "toml.hpp"

namespace rcrl::cli {
namespace {

std::string Join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

// Reads keys out of a table, removing each one it consumes so that whatever
// is left at the end is unknown.
class Reader {
 public:
  explicit Reader(toml::table& root) : root_(root) {}

  toml::table* Table(const std::string& path) {
    toml::node* n = root_.at_path(path).node();
    if (!n) return nullptr;
    if (!n->is_table()) throw ConfigError(path, "expected a table");
    return n->as_table();
  }

  template <typename T>
  void Read(const std::string& table, const std::string& key, T* out) {
    toml::table* t = table.empty() ? &root_ : Table(table);
    if (!t) return;
    toml::node* n = t->get(key);
    if (!n) return;
    const std::string field = Join(table, key);
    Assign(*n, field, out);
    t->erase(key);
  }

  /// Throws on the first key nobody consumed.
  void Finish() {
    Prune(root_);
    if (auto leftover = FirstLeaf(root_, "")) throw ConfigError(*leftover, "unknown key");
  }

 private:
  static void Assign(toml::node& n, const std::string& field, double* out) {
    if (auto v = n.value_exact<double>()) {
      *out = *v;
    } else if (auto i = n.value_exact<std::int64_t>()) {
      *out = static_cast<double>(*i);
    } else {
      throw ConfigError(field, "expected a number");
    }
  }
  static void Assign(toml::node& n, const std::string& field, std::int64_t* out) {
    auto v = n.value_exact<std::int64_t>();
    if (!v) throw ConfigError(field, "expected an integer");
    *out = *v;
  }
  static void Assign(toml::node& n, const std::string& field, int* out) {
    std::int64_t v = 0;
    Assign(n, field, &v);
    if (v < INT32_MIN || v > INT32_MAX) throw ConfigError(field, "integer out of range");
    *out = static_cast<int>(v);
  }
  static void Assign(toml::node& n, const std::string& field, std::uint64_t* out) {
    std::int64_t v = 0;
    Assign(n, field, &v);
    if (v < 0) throw ConfigError(field, "must be >= 0");
    *out = static_cast<std::uint64_t>(v);
  }
  static void Assign(toml::node& n, const std::string& field, bool* out) {
    auto v = n.value_exact<bool>();
    if (!v) throw ConfigError(field, "expected true or false");
    *out = *v;
  }
  static void Assign(toml::node& n, const std::string& field, std::string* out) {
    auto v = n.value_exact<std::string>();
    if (!v) throw ConfigError(field, "expected a string");
    *out = *v;
  }
  static void Assign(toml::node& n, const std::string& field, std::vector<double>* out) {
    toml::array* arr = n.as_array();
    if (!arr) throw ConfigError(field, "expected an array of numbers");
    out->clear();
    for (std::size_t i = 0; i < arr->size(); ++i) {
      double v = 0.0;
      Assign(*arr->get(i), field + "[" + std::to_string(i) + "]", &v);
      out->push_back(v);
    }
  }

  static void Prune(toml::table& t) {
    std::vector<std::string> empty;
    for (auto& [k, v] : t) {
      if (toml::table* sub = v.as_table()) {
        Prune(*sub);
        if (sub->empty()) empty.emplace_back(k.str());
      }
    }
    for (const auto& k : empty) t.erase(k);
  }

  static std::optional<std::string> FirstLeaf(const toml::table& t, const std::string& prefix) {
    for (const auto& [k, v] : t) {
      const std::string path = Join(prefix, std::string(k.str()));
      if (const toml::table* sub = v.as_table()) {
        if (auto leaf = FirstLeaf(*sub, path)) return leaf;
      } else {
        return path;
      }
    }
    return std::nullopt;
  }

  toml::table& root_;
};

void ApplyOverride(toml::table& root, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override", "expected key=value, got '" + spec + "'");
  }
  const std::string key = spec.substr(0, eq);
  const std::string value = spec.substr(eq + 1);

  toml::table holder;
  try {
    holder = toml::parse("v = " + value);
  } catch (const toml::parse_error&) {
    holder = toml::table{};
    holder.insert("v", value);
  }

  std::vector<std::string> parts;
  std::stringstream ss(key);
  for (std::string p; std::getline(ss, p, '.');) {
    if (p.empty()) throw ConfigError("override", "empty path segment in '" + key + "'");
    parts.push_back(p);
  }
  toml::table* t = &root;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    toml::node* n = t->get(parts[i]);
    if (!n) {
      t->insert(parts[i], toml::table{});
      n = t->get(parts[i]);
    }
    if (!n->is_table()) throw ConfigError(key, "'" + parts[i] + "' is not a table");
    t = n->as_table();
  }
  t->insert_or_assign(parts.back(), std::move(*holder.get("v")));
}

void ReadSchedule(Reader& r, const std::string& path, approx::LinearSchedule* s) {
  r.Read(path, "start", &s->start);
  r.Read(path, "end", &s->end);
  r.Read(path, "steps", &s->steps);
}

toml::table ScheduleTable(const approx::LinearSchedule& s) {
  return toml::table{{"start", s.start}, {"end", s.end}, {"steps", s.steps}};
}

RunConfig FromTable(toml::table root) {
  RunConfig c;
  Reader r(root);
  r.Read("", "seed", &c.seed);
  r.Read("", "out_root", &c.out_root);

  r.Read("env", "name", &c.env_name);
  if (toml::table* params = r.Table("env.params")) {
    std::vector<std::string> keys;
    for (auto& [k, _] : *params) keys.emplace_back(k.str());
    for (const auto& k : keys) {
      double v = 0.0;
      r.Read("env.params", k, &v);
      c.env_params[k] = v;
    }
  }

  std::string kind = "rcrl";
  r.Read("algorithm", "kind", &kind);
  c.train.constraint = constraints::DefaultForAlgorithm(kind);
  std::visit(
      [&](auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, constraints::CumulativeCost>) {
          r.Read("algorithm", "threshold", &k.threshold);
        } else if constexpr (std::is_same_v<K, constraints::Cbf>) {
          r.Read("algorithm", "mu", &k.mu);
        } else if constexpr (std::is_same_v<K, constraints::SafetyIndex>) {
          r.Read("algorithm", "sigma", &k.sigma);
          r.Read("algorithm", "n", &k.n);
          r.Read("algorithm", "k", &k.k);
          r.Read("algorithm", "eta_d", &k.eta_d);
        } else if constexpr (std::is_same_v<K, constraints::RewardShaping>) {
          r.Read("algorithm", "rho", &k.rho);
        }
      },
      c.train.constraint);

  rac::TrainerConfig& t = c.train;
  r.Read("train", "total_steps", &t.total_steps);
  r.Read("train", "eval_interval", &t.eval_interval);
  r.Read("train", "eval_episodes", &t.eval_episodes);
  r.Read("train", "warmup_steps", &t.warmup_steps);
  r.Read("train", "update_after", &t.update_after);
  r.Read("train", "checkpoint_interval", &t.checkpoint_interval);
  r.Read("train", "batch_size", &t.batch_size);
  r.Read("train", "buffer_capacity", &t.buffer_capacity);
  r.Read("train", "gamma", &t.gamma);
  r.Read("train", "tau", &t.tau);
  r.Read("train", "actor_interval", &t.actor_interval);
  r.Read("train", "multiplier_interval", &t.multiplier_interval);
  r.Read("train", "exploration_start", &t.exploration_start);
  r.Read("train", "exploration_end", &t.exploration_end);
  r.Read("train", "reward_scale", &t.reward_scale);
  r.Read("train", "probe_count", &t.probe_count);
  r.Read("train", "probe_grid", &t.probe_grid);
  r.Read("train", "probe_margin_cells", &t.probe_margin_cells);
  r.Read("train", "threaded_rollout", &t.threaded_rollout);
  r.Read("train", "queue_capacity", &t.queue_capacity);
  r.Read("train", "policy_lag", &t.policy_lag);

  r.Read("network", "hidden_width", &t.hidden_width);
  r.Read("network", "hidden_layers", &t.hidden_layers);

  ReadSchedule(r, "optim.critic_lr", &t.critic_lr);
  ReadSchedule(r, "optim.actor_lr", &t.actor_lr);
  ReadSchedule(r, "optim.multiplier_lr", &t.multiplier_lr);
  r.Read("optim", "adam_beta1", &t.adam_beta1);
  r.Read("optim", "adam_beta2", &t.adam_beta2);
  r.Read("optim", "clip_norm", &t.clip_norm);
  r.Read("optim", "lambda_max", &t.lambda_max);
  r.Read("optim", "lambda_init", &t.lambda_init);

  r.Read("oracle", "grid", &c.oracle.grid);
  r.Read("oracle", "gamma", &c.oracle.gamma);
  r.Read("oracle", "action_samples", &c.oracle.action_samples);
  r.Read("oracle", "tolerance", &c.oracle.tolerance);
  r.Read("oracle", "max_sweeps", &c.oracle.max_sweeps);
  r.Read("oracle", "pad_cells", &c.oracle.pad_cells);

  r.Read("eval", "starts", &c.eval_starts);

  r.Read("slice", "resolution", &c.slice.resolution);
  r.Read("slice", "zdots", &c.slice.zdots);

  r.Finish();
  return c;
}

toml::table ToTable(const RunConfig& c) {
  toml::table root;
  root.insert("seed", static_cast<std::int64_t>(c.seed));
  if (!c.out_root.empty()) root.insert("out_root", c.out_root);

  toml::table env{{"name", c.env_name}};
  if (!c.env_params.empty()) {
    toml::table params;
    for (const auto& [k, v] : c.env_params) params.insert(k, v);
    env.insert("params", std::move(params));
  }
  root.insert("env", std::move(env));

  toml::table alg{{"kind", c.algorithm()}};
  std::visit(
      [&](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, constraints::CumulativeCost>) {
          alg.insert("threshold", k.threshold);
        } else if constexpr (std::is_same_v<K, constraints::Cbf>) {
          alg.insert("mu", k.mu);
        } else if constexpr (std::is_same_v<K, constraints::SafetyIndex>) {
          alg.insert("sigma", k.sigma);
          alg.insert("n", k.n);
          alg.insert("k", k.k);
          alg.insert("eta_d", k.eta_d);
        } else if constexpr (std::is_same_v<K, constraints::RewardShaping>) {
          alg.insert("rho", k.rho);
        }
      },
      c.train.constraint);
  root.insert("algorithm", std::move(alg));

  const rac::TrainerConfig& t = c.train;
  root.insert("train", toml::table{
                           {"total_steps", t.total_steps},
                           {"eval_interval", t.eval_interval},
                           {"eval_episodes", t.eval_episodes},
                           {"warmup_steps", t.warmup_steps},
                           {"update_after", t.update_after},
                           {"checkpoint_interval", t.checkpoint_interval},
                           {"batch_size", t.batch_size},
                           {"buffer_capacity", t.buffer_capacity},
                           {"gamma", t.gamma},
                           {"tau", t.tau},
                           {"actor_interval", t.actor_interval},
                           {"multiplier_interval", t.multiplier_interval},
                           {"exploration_start", t.exploration_start},
                           {"exploration_end", t.exploration_end},
                           {"reward_scale", t.reward_scale},
                           {"probe_count", t.probe_count},
                           {"probe_grid", t.probe_grid},
                           {"probe_margin_cells", t.probe_margin_cells},
                           {"threaded_rollout", t.threaded_rollout},
                           {"queue_capacity", t.queue_capacity},
                           {"policy_lag", t.policy_lag},
                       });
  root.insert("network",
              toml::table{{"hidden_width", t.hidden_width}, {"hidden_layers", t.hidden_layers}});
  root.insert("optim", toml::table{
                           {"adam_beta1", t.adam_beta1},
                           {"adam_beta2", t.adam_beta2},
                           {"clip_norm", t.clip_norm},
                           {"lambda_max", t.lambda_max},
                           {"lambda_init", t.lambda_init},
                           {"critic_lr", ScheduleTable(t.critic_lr)},
                           {"actor_lr", ScheduleTable(t.actor_lr)},
                           {"multiplier_lr", ScheduleTable(t.multiplier_lr)},
                       });
  root.insert("oracle", toml::table{
                            {"grid", c.oracle.grid},
                            {"gamma", c.oracle.gamma},
                            {"action_samples", c.oracle.action_samples},
                            {"tolerance", c.oracle.tolerance},
                            {"max_sweeps", c.oracle.max_sweeps},
                            {"pad_cells", c.oracle.pad_cells},
                        });
  root.insert("eval", toml::table{{"starts", c.eval_starts}});
  toml::array zdots;
  for (double z : c.slice.zdots) zdots.push_back(z);
  root.insert("slice", toml::table{{"resolution", c.slice.resolution}, {"zdots", zdots}});
  return root;
}

}  // namespace

oracle::OracleConfig OracleSettings::ToOracleConfig() const {
  oracle::OracleConfig cfg = rac::DefaultOracleConfig(grid, gamma);
  cfg.action_samples = action_samples;
  cfg.tolerance = tolerance;
  cfg.max_sweeps = max_sweeps;
  if (pad_cells >= 0) cfg.pad_cells = pad_cells;
  return cfg;
}

std::string RunConfig::algorithm() const { return constraints::AlgorithmName(train.constraint); }

void RunConfig::Validate() const {
  envs::MakeEnvironment(env_name, env_params);
  train.Validate();
  if (oracle.grid < 3) throw ConfigError("oracle.grid", "must be >= 3");
  oracle.ToOracleConfig().Validate();
  if (eval_starts < 1) throw ConfigError("eval.starts", "must be >= 1");
  if (slice.resolution < 2) throw ConfigError("slice.resolution", "must be >= 2");
}

RunConfig ParseRunConfig(const std::string& text, const std::vector<std::string>& overrides) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << e.description() << " (line " << e.source().begin.line << ")";
    throw ConfigError("config", msg.str());
  }
  for (const auto& o : overrides) ApplyOverride(root, o);
  return FromTable(std::move(root));
}

RunConfig LoadRunConfig(const std::filesystem::path& path,
                        const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ParseRunConfig(ss.str(), overrides);
}

std::string SerializeRunConfig(const RunConfig& config) {
  std::ostringstream ss;
  ss << ToTable(config) << "\n";
  return ss.str();
}

std::string ToJson(const RunConfig& config) {
  std::ostringstream ss;
  ss << toml::json_formatter{ToTable(config)};
  return ss.str();
}

std::string ConfigHash(const RunConfig& config) {
  RunConfig c = config;
  c.out_root.clear();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : SerializeRunConfig(c)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace rcrl::cli
