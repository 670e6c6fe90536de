#include "rcrl/rac/trainer.hpp"

#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <thread>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include <json.hpp>

#include "rcrl/core/errors.hpp"
#include "rcrl/core/version.hpp"
#include "rcrl/oracle/sbe.hpp"
#include "rcrl/rac/bounded_queue.hpp"

namespace rcrl::rac {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

std::string Num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

/// Environment side of the loop: episode bookkeeping, exploration noise and
/// warmup actions. Transition k depends only on the actor parameters handed
/// in and this object's own random stream.
class Rollout {
 public:
  Rollout(EnvPtr env, const TrainerConfig& cfg, const approx::Mlp& actor_template, CounterRng rng)
      : env_(std::move(env)), cfg_(cfg), actor_(actor_template), rng_(rng) {
    const EnvSpec& sp = env_->spec();
    mid_ = 0.5 * (sp.action_high + sp.action_low);
    half_ = 0.5 * (sp.action_high - sp.action_low);
  }

  Transition Next(std::int64_t k, const Eigen::VectorXd& actor_params) {
    const EnvSpec& sp = env_->spec();
    if (need_reset_) {
      s_ = env_->Canonicalize(env_->Reset(rng_));
      t_ = 0;
      need_reset_ = false;
    }
    ActionVec a(sp.action_dim);
    if (k < cfg_.warmup_steps) {
      for (int i = 0; i < sp.action_dim; ++i) a[i] = rng_.Uniform(sp.action_low[i], sp.action_high[i]);
    } else {
      actor_.set_params(actor_params);
      a = actor_.Forward(Eigen::VectorXd(s_.array() / sp.state_scale.array()));
      const double frac = cfg_.total_steps > 0 ? static_cast<double>(k) / cfg_.total_steps : 0.0;
      const double sigma =
          cfg_.exploration_start + (cfg_.exploration_end - cfg_.exploration_start) * frac;
      for (int i = 0; i < sp.action_dim; ++i) a[i] += sigma * half_[i] * noise_(rng_);
    }
    Transition tr = env_->Step(s_, a);
    ++t_;
    if (!tr.terminal() && t_ >= sp.max_episode_len) tr.done = EpisodeEnd::kTimeout;
    s_ = tr.s_next;
    need_reset_ = tr.done != EpisodeEnd::kRunning;
    return tr;
  }

 private:
  EnvPtr env_;
  const TrainerConfig& cfg_;
  approx::Mlp actor_;
  CounterRng rng_;
  std::normal_distribution<double> noise_;
  Eigen::VectorXd mid_, half_;
  StateVec s_;
  int t_ = 0;
  bool need_reset_ = true;
};

/// Actor parameters by version (version v = after v learner steps).
class SnapshotStore {
 public:
  void Publish(std::int64_t v, Eigen::VectorXd params) {
    std::lock_guard lock(mu_);
    snaps_[v] = std::move(params);
    cv_.notify_all();
  }
  /// Blocks until version v exists. Returns false on abort.
  bool Get(std::int64_t v, Eigen::VectorXd& out) {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return aborted_ || snaps_.count(v) > 0; });
    if (aborted_) return false;
    out = snaps_.at(v);
    return true;
  }
  void DropBefore(std::int64_t v) {
    std::lock_guard lock(mu_);
    snaps_.erase(snaps_.begin(), snaps_.lower_bound(v));
  }
  void Abort() {
    std::lock_guard lock(mu_);
    aborted_ = true;
    cv_.notify_all();
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::map<std::int64_t, Eigen::VectorXd> snaps_;
  bool aborted_ = false;
};

class ArtifactWriter {
 public:
  ArtifactWriter(const RunOptions& opt, std::uint64_t seed, const TrainerConfig& cfg)
      : opt_(opt), seed_(seed), cfg_(cfg) {}

  bool enabled() const { return !opt_.out_dir.empty(); }

  void Begin() {
    if (!enabled()) return;
    fs::create_directories(opt_.out_dir / "checkpoints");
    fs::remove(opt_.out_dir / "FAILED");
    WriteManifest("running", "");
    metrics_.open(opt_.out_dir / "metrics.csv", std::ios::trunc);
    if (!metrics_) throw std::runtime_error("cannot write " + (opt_.out_dir / "metrics.csv").string());
    metrics_ << MetricsHeader() << '\n';
    metrics_.flush();
  }

  void Row(const MetricsRow& row) {
    if (!enabled()) return;
    metrics_ << FormatMetricsRow(row) << '\n';
    metrics_.flush();
  }

  fs::path Checkpoint(const Learner& learner, const std::string& tag, std::int64_t step) {
    if (!enabled()) return {};
    const fs::path p = opt_.out_dir / "checkpoints" / (tag + ".ckpt");
    Json side;
    side["step"] = step;
    side["seed"] = seed_;
    side["algorithm"] = opt_.algorithm;
    side["env"] = opt_.env_name;
    side["config"] = Json::parse(opt_.config_json);
    approx::SaveCheckpoint(p, learner.Networks(), side.dump(2));
    return p;
  }

  void Finish() {
    if (!enabled()) return;
    metrics_.close();
    WriteManifest("completed", "");
  }

  void Fail(const std::string& message) {
    if (!enabled()) return;
    try {
      if (metrics_.is_open()) metrics_.close();
      fs::create_directories(opt_.out_dir);
      std::ofstream(opt_.out_dir / "FAILED") << message << '\n';
      WriteManifest("failed", message);
    } catch (...) {
      // The original error is more useful than one about the marker.
    }
  }

 private:
  void WriteManifest(const std::string& status, const std::string& error) {
    Json m;
    m["config_hash"] = opt_.config_hash;
    m["seed"] = seed_;
    m["version"] = VersionString();
    m["algorithm"] = opt_.algorithm;
    m["env"] = opt_.env_name;
    m["total_steps"] = cfg_.total_steps;
    m["status"] = status;
    if (!error.empty()) m["error"] = error;
    std::ofstream(opt_.out_dir / "manifest.json") << m.dump(2) << '\n';
  }

  const RunOptions& opt_;
  std::uint64_t seed_;
  const TrainerConfig& cfg_;
  std::ofstream metrics_;
};

struct LossAccumulator {
  double q = 0.0, qh = 0.0, actor = 0.0;
  int n = 0, n_actor = 0;

  void Add(const UpdateStats& st) {
    q += st.q_loss;
    qh += st.qh_loss;
    ++n;
    if (st.actor_updated) {
      actor += st.actor_loss;
      ++n_actor;
    }
  }
  static double Mean(double sum, int n) {
    return n > 0 ? sum / n : std::numeric_limits<double>::quiet_NaN();
  }
};

double MeanOrZero(const Eigen::VectorXd& v) { return v.size() > 0 ? v.mean() : 0.0; }

void RunLoop(const EnvPtr& env, const TrainerConfig& cfg, CounterRng& root, RunArtifacts& art,
             ArtifactWriter& writer) {
  Learner& learner = *art.learner;
  const EnvSpec& sp = env->spec();
  ReplayBuffer buffer(static_cast<std::size_t>(cfg.buffer_capacity));
  CounterRng replay_rng = root.Split("replay");
  Rollout rollout(env, cfg, learner.actor, root.Split("rollout"));
  SnapshotStore snapshots;
  snapshots.Publish(0, learner.actor.params());

  LossAccumulator acc;
  auto evaluate = [&](std::int64_t step) {
    const oracle::Policy policy = [&](const StateVec& s) { return learner.Act(s); };
    const EvalSummary ev = Evaluate(*env, policy, art.eval_starts);
    MetricsRow row;
    row.step = step;
    row.avg_return = ev.avg_return;
    row.violation_rate = ev.violation_rate;
    row.q_loss = LossAccumulator::Mean(acc.q, acc.n);
    row.qh_loss = LossAccumulator::Mean(acc.qh, acc.n);
    row.actor_loss = LossAccumulator::Mean(acc.actor, acc.n_actor);
    if (art.probes.feasible.cols() > 0) row.mean_lambda_feasible = MeanOrZero(learner.Lambda(art.probes.feasible));
    if (art.probes.infeasible.cols() > 0) {
      row.mean_lambda_infeasible = MeanOrZero(learner.Lambda(art.probes.infeasible));
    }
    art.metrics.push_back(row);
    writer.Row(row);
    acc = LossAccumulator{};
  };

  // Learner side of step k, given transition k.
  auto learn = [&](std::int64_t k, Transition tr) {
    buffer.Add(std::move(tr));
    if (k >= cfg.update_after) {
      const auto idx = buffer.SampleIndices(static_cast<std::size_t>(cfg.batch_size), replay_rng);
      acc.Add(learner.Update(MakeBatch(buffer, idx, cfg.constraint, sp.dt), k));
    }
    snapshots.Publish(k + 1, learner.actor.params());
    snapshots.DropBefore(k + 1 - cfg.policy_lag);
    const std::int64_t done = k + 1;
    if (done % cfg.eval_interval == 0 || done == cfg.total_steps) evaluate(done);
    if (cfg.checkpoint_interval > 0 && done % cfg.checkpoint_interval == 0 && done != cfg.total_steps) {
      if (auto p = writer.Checkpoint(learner, "step_" + std::to_string(done), done); !p.empty()) {
        art.checkpoints.push_back(p);
      }
    }
  };

  auto version_for = [&](std::int64_t k) { return std::max<std::int64_t>(0, k - cfg.policy_lag); };

  if (!cfg.threaded_rollout) {
    Eigen::VectorXd params;
    for (std::int64_t k = 0; k < cfg.total_steps; ++k) {
      snapshots.Get(version_for(k), params);
      learn(k, rollout.Next(k, params));
    }
    return;
  }

  BoundedQueue<Transition> queue(static_cast<std::size_t>(cfg.queue_capacity));
  std::exception_ptr producer_error;
  std::thread producer([&] {
    try {
      Eigen::VectorXd params;
      for (std::int64_t k = 0; k < cfg.total_steps; ++k) {
        if (!snapshots.Get(version_for(k), params)) break;
        if (!queue.Push(rollout.Next(k, params))) break;
      }
    } catch (...) {
      producer_error = std::current_exception();
    }
    queue.Close();
  });
  try {
    for (std::int64_t k = 0; k < cfg.total_steps; ++k) {
      std::optional<Transition> tr = queue.Pop();
      if (!tr) break;
      learn(k, std::move(*tr));
    }
  } catch (...) {
    snapshots.Abort();
    queue.Close();
    producer.join();
    throw;
  }
  snapshots.Abort();
  queue.Close();
  producer.join();
  if (producer_error) std::rethrow_exception(producer_error);
}

}  // namespace

void TuneAllocator() {
#if defined(__GLIBC__)
  // Batch activations are a few hundred KB; above glibc's default mmap
  // threshold every temporary would be a fresh mapping with page faults.
  mallopt(M_MMAP_THRESHOLD, 64 << 20);
  mallopt(M_TRIM_THRESHOLD, 256 << 20);
#endif
}

std::string MetricsHeader() {
  return "step,avg_return,violation_rate,q_loss,qh_loss,actor_loss,mean_lambda_feasible,"
         "mean_lambda_infeasible";
}

std::string FormatMetricsRow(const MetricsRow& r) {
  return std::to_string(r.step) + "," + Num(r.avg_return) + "," + Num(r.violation_rate) + "," +
         Num(r.q_loss) + "," + Num(r.qh_loss) + "," + Num(r.actor_loss) + "," +
         Num(r.mean_lambda_feasible) + "," + Num(r.mean_lambda_infeasible);
}

RunArtifacts train(const EnvPtr& env, const TrainerConfig& config, std::uint64_t seed,
                   const RunOptions& options) {
  if (!env) throw std::invalid_argument("train needs an environment");
  config.Validate();
  TuneAllocator();
  RunArtifacts art;
  art.out_dir = options.out_dir;
  ArtifactWriter writer(options, seed, config);
  try {
    writer.Begin();
    CounterRng root(seed);
    art.learner.emplace(env->spec(), config, root.Split("init"));

    const int n = config.probe_grid;
    if (env->spec().state_dim == 2) {
      const oracle::GridSpec grid = DefaultGrid(env->spec(), n);
      art.kernel = oracle::SolveSbe(*env, grid, DefaultOracleConfig(n, config.gamma)).Kernel();
    }
    const oracle::KernelMask* kernel = art.kernel ? &*art.kernel : nullptr;
    art.probes = MakeProbeSet(*env, kernel, config.probe_count, config.probe_margin_cells,
                              root.Split("probes"));
    art.eval_starts = EvaluationStarts(*env, kernel, config.eval_episodes,
                                       config.probe_margin_cells, root.Split("eval"));

    if (auto p = writer.Checkpoint(*art.learner, "init", 0); !p.empty()) art.checkpoints.push_back(p);
    RunLoop(env, config, root, art, writer);
    if (auto p = writer.Checkpoint(*art.learner, "final", config.total_steps); !p.empty()) {
      art.checkpoints.push_back(p);
    }
    writer.Finish();
  } catch (const std::exception& e) {
    writer.Fail(e.what());
    throw;
  }
  return art;
}

}  // namespace rcrl::rac
