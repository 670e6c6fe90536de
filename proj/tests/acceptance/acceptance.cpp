// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// fails. Criteria 5-7 and 9 train the double-integrator desk preset for five
// seeds of two algorithms, which takes roughly half an hour on one core.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gradient_check.hpp"
#include "reference.hpp"
#include "rcrl/approx/checkpoint.hpp"
#include "rcrl/envs/double_integrator.hpp"
#include "rcrl/envs/quadrotor.hpp"
#include "rcrl/envs/registry.hpp"
#include "rcrl/oracle/grid_io.hpp"
#include "rcrl/oracle/sbe.hpp"
#include "rcrl/rac/evaluation.hpp"
#include "rcrl/rac/trainer.hpp"
#include "run_config.hpp"

namespace {

using namespace rcrl;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

int failures = 0;

void Report(int id, bool pass, const std::string& name, const std::string& detail) {
  std::printf("[%s] %d %s: %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

void Info(const std::string& line) {
  std::printf("       %s\n", line.c_str());
  std::fflush(stdout);
}

std::string Fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double Seconds(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Shared double-integrator oracle on the 201-node evaluation grid.
struct DiOracle {
  envs::DoubleIntegrator env;
  oracle::GridSpec grid = oracle::GridSpec::Uniform(2, -5.0, 5.0, 201);
  oracle::OracleConfig cfg;  // gamma 0.99, 21 actions, 1e-6, 40 pad cells
  oracle::SafetyValueSolution sol;
  oracle::KernelMask kernel;
  double seconds = 0.0;
};

void Criterion1(DiOracle& o) {
  const auto t0 = Clock::now();
  o.sol = oracle::SolveSbe(o.env, o.grid, o.cfg);
  o.seconds = Seconds(t0);
  o.kernel = o.sol.Kernel();
  const double agree = oracle::Agreement(o.kernel, oracle::AnalyticKernel(o.grid));
  Report(1, agree >= 0.98 && o.seconds < 60.0, "kernel agreement",
         Fmt("%.2f%% of cells (need >= 98%%), %.1f s (need < 60 s), %d sweeps", 100 * agree,
             o.seconds, o.sol.sweeps));

  // How much of the gap is the discount: the same solve closer to gamma = 1.
  oracle::OracleConfig slow = o.cfg;
  slow.gamma = 0.999;
  slow.max_sweeps = 200000;
  const oracle::SafetyValueSolution s999 = oracle::SolveSbe(o.env, o.grid, slow);
  Info(Fmt("gamma 0.999 for reference: %.2f%% agreement",
           100 * oracle::Agreement(s999.Kernel(), oracle::AnalyticKernel(o.grid))));
}

void Criterion2() {
  CounterRng rng(2);
  const oracle::OracleConfig cfg;
  const double ratio = oracle::ContractionCheck(cfg, 100, rng);
  Report(2, ratio <= cfg.gamma + 1e-12, "gamma contraction",
         Fmt("max ratio %.15f over 100 pairs (need <= %.2f + 1e-12)", ratio, cfg.gamma));
}

void Criterion3(const DiOracle& o) {
  const oracle::KernelMask band = o.kernel.Dilated(1);
  const oracle::Policy null = [](const StateVec&) { return ActionVec::Zero(1); };
  const oracle::KernelMask k_null = oracle::EvaluatePolicySafety(o.env, null, o.grid, o.cfg).Kernel();
  const oracle::GreedySafetyPolicy greedy(o.env, o.sol, o.cfg);
  const oracle::Policy g = [&](const StateVec& s) { return greedy(s); };
  const oracle::KernelMask k_greedy = oracle::EvaluatePolicySafety(o.env, g, o.grid, o.cfg).Kernel();
  const bool null_sub = oracle::IsSubset(k_null, band);
  const bool greedy_sub = oracle::IsSubset(k_greedy, band);
  const double match = oracle::Agreement(k_greedy, o.kernel);
  Report(3, null_sub && greedy_sub && match >= 0.99, "self-consistency nesting",
         Fmt("null subset %s, greedy subset %s, greedy matches %.2f%% (need >= 99%%)",
             null_sub ? "yes" : "no", greedy_sub ? "yes" : "no", 100 * match));
}

void Criterion4() {
  using testing::UpdateOp;
  bool pass = true;
  std::string detail;
  for (UpdateOp op : {UpdateOp::kCritic, UpdateOp::kSafetyCritic, UpdateOp::kActor,
                      UpdateOp::kMultiplier}) {
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      worst = std::max(worst, testing::RunGradientTrial(op, seed).relative_error);
    }
    pass = pass && worst <= 1e-4;
    detail += Fmt("%s %.1e  ", testing::ToString(op).c_str(), worst);
  }
  Report(4, pass, "gradient fidelity", detail + "(max relative error over 50 trials, need <= 1e-4)");
}

struct SeedResult {
  double iou = 0.0;
  double violating = 0.0;
  double lambda_ratio = 0.0;
  double learned_area = 0.0;
  double persistent_area = 0.0;
  double minutes = 0.0;
  fs::path dir;
};

SeedResult TrainAndScore(const DiOracle& o, const cli::RunConfig& cfg, const fs::path& dir) {
  const EnvPtr env = envs::MakeEnvironment(cfg.env_name, cfg.env_params);
  rac::RunOptions opt;
  opt.out_dir = dir;
  opt.config_hash = cli::ConfigHash(cfg);
  opt.config_json = cli::ToJson(cfg);
  opt.algorithm = cfg.algorithm();
  opt.env_name = cfg.env_name;
  const auto t0 = Clock::now();
  const rac::RunArtifacts art = rac::train(env, cfg.train, cfg.seed, opt);
  SeedResult r;
  r.minutes = Seconds(t0) / 60.0;
  r.dir = dir;
  const rac::Learner& l = *art.learner;
  const oracle::KernelMask learned = rac::LearnedFeasibleMask(l, *env, o.grid);
  r.iou = oracle::IoU(learned, o.kernel);
  r.learned_area = learned.Area();
  r.persistent_area = rac::PersistentFeasibleMask(l, *env, o.grid, o.cfg).Area();
  const auto starts = rac::EvaluationStarts(*env, &o.kernel, cfg.eval_starts,
                                            cfg.train.probe_margin_cells,
                                            CounterRng(cfg.seed).Split("eval"));
  const oracle::Policy pol = [&](const StateVec& s) { return l.Act(s); };
  r.violating = rac::Evaluate(*env, pol, starts).violating_episodes;
  const rac::MetricsRow& last = art.metrics.back();
  r.lambda_ratio = last.mean_lambda_infeasible / last.mean_lambda_feasible;
  return r;
}

void Criteria5to7(const DiOracle& o, const fs::path& work) {
  constexpr int kSeeds = 5;
  std::vector<SeedResult> rcrl, cbf;
  int pass5 = 0, pass6 = 0, fail7 = 0;
  double max_minutes = 0.0;
  for (int seed = 0; seed < kSeeds; ++seed) {
    const std::vector<std::string> ov = {"seed=" + std::to_string(seed)};
    const cli::RunConfig rc = cli::LoadRunConfig(fs::path(RCRL_CONFIG_DIR) / "di_rcrl.toml", ov);
    const cli::RunConfig cc = cli::LoadRunConfig(fs::path(RCRL_CONFIG_DIR) / "di_cbf.toml", ov);
    if (seed == 0) {
      Info(Fmt("desk preset: %lld steps, width %d, batch %d", static_cast<long long>(rc.train.total_steps),
               rc.train.hidden_width, rc.train.batch_size));
    }
    rcrl.push_back(TrainAndScore(o, rc, work / Fmt("rcrl_seed%d", seed)));
    cbf.push_back(TrainAndScore(o, cc, work / Fmt("cbf_seed%d", seed)));
    const SeedResult& r = rcrl.back();
    const SeedResult& c = cbf.back();
    const bool ok5 = r.iou >= 0.85 && r.violating <= 0.05;
    const bool ok6 = r.lambda_ratio >= 10.0;
    const bool ok7 = c.persistent_area <= r.persistent_area;
    pass5 += ok5;
    pass6 += ok6;
    fail7 += !ok7;
    max_minutes = std::max({max_minutes, r.minutes, c.minutes});
    Info(Fmt("seed %d  rcrl: IoU %.3f, violating %.0f%%, lambda ratio %.1f, area %.1f "
             "(persistent %.1f), %.1f min  [%s/%s]",
             seed, r.iou, 100 * r.violating, r.lambda_ratio, r.learned_area, r.persistent_area,
             r.minutes, ok5 ? "5 ok" : "5 no", ok6 ? "6 ok" : "6 no"));
    Info(Fmt("seed %d  cbf:  area %.1f (persistent %.1f), violating %.0f%%, %.1f min  [%s]", seed,
             c.learned_area, c.persistent_area, 100 * c.violating, c.minutes,
             ok7 ? "7 ok" : "7 no"));
  }
  Report(5, pass5 >= 3 && max_minutes < 30.0, "end-to-end double integrator",
         Fmt("%d/5 seeds with IoU >= 0.85 and <= 5%% violating episodes (need 3), "
             "slowest run %.1f min",
             pass5, max_minutes));
  Report(6, pass6 >= 3, "multiplier saturation",
         Fmt("%d/5 seeds with infeasible/feasible mean lambda >= 10 (need 3)", pass6));
  Report(7, fail7 <= 1, "baseline conservativeness",
         Fmt("CBF persistent feasible area <= RCRL on %d/5 seeds (at most 1 may fail)",
             kSeeds - fail7));

  // Criterion 9 reruns seed 0 and compares its metrics file byte for byte.
  const cli::RunConfig rc = cli::LoadRunConfig(fs::path(RCRL_CONFIG_DIR) / "di_rcrl.toml");
  const EnvPtr env = envs::MakeEnvironment(rc.env_name, rc.env_params);
  rac::RunOptions opt;
  opt.out_dir = work / "rcrl_seed0_again";
  opt.config_hash = cli::ConfigHash(rc);
  opt.config_json = cli::ToJson(rc);
  opt.algorithm = rc.algorithm();
  opt.env_name = rc.env_name;
  rac::train(env, rc.train, rc.seed, opt);
  const std::string a = testing::ReadFile(rcrl[0].dir / "metrics.csv");
  const std::string b = testing::ReadFile(opt.out_dir / "metrics.csv");
  const bool same = !a.empty() && a == b;
  Report(9, same, "determinism",
         Fmt("seed 0 metrics.csv %s across two runs (%zu bytes)",
             same ? "byte-identical" : "DIFFERS", a.size()));
}

void Criterion8(const fs::path& work) {
  CounterRng rng(8);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    Eigen::VectorXd x(6), ref(6), a(2), a_ref(2);
    for (int k = 0; k < 6; ++k) {
      x[k] = rng.Uniform(-3, 3);
      ref[k] = rng.Uniform(-3, 3);
    }
    for (int k = 0; k < 2; ++k) {
      a[k] = rng.Uniform(0, 1);
      a_ref[k] = rng.Uniform(0, 1);
    }
    const double want = testing::ReferenceQuadReward(x, a, ref, a_ref);
    worst = std::max(worst, std::abs(envs::QuadReward(x, a, ref, a_ref) - want) /
                                std::max(1.0, std::abs(want)));
  }
  const bool reward_ok = worst <= 1e-12;

  const EnvPtr env = envs::MakeEnvironment("quadrotor2d");
  const auto starts = rac::EvaluationStarts(*env, nullptr, 100, 2, CounterRng(0));
  const auto fixed = envs::Quadrotor2D::EvaluationStarts();
  const bool protocol_ok = starts.size() == 4 && fixed.size() == 4 &&
                           env->spec().max_episode_len == 360;

  // 5k-step smoke run through the same path the CLI uses.
  bool smoke_ok = false;
  std::string smoke;
  try {
    const cli::RunConfig qc = cli::LoadRunConfig(fs::path(RCRL_CONFIG_DIR) / "quad_smoke.toml");
    rac::RunOptions opt;
    opt.out_dir = work / "quad_smoke";
    opt.config_hash = cli::ConfigHash(qc);
    opt.config_json = cli::ToJson(qc);
    opt.algorithm = qc.algorithm();
    opt.env_name = qc.env_name;
    const auto t0 = Clock::now();
    const rac::RunArtifacts art = rac::train(env, qc.train, qc.seed, opt);
    bool finite = true;
    for (const rac::MetricsRow& r : art.metrics) {
      finite = finite && std::isfinite(r.avg_return) && std::isfinite(r.violation_rate) &&
               std::isfinite(r.q_loss) && std::isfinite(r.qh_loss);
    }
    const auto nets = approx::LoadCheckpoint(opt.out_dir / "checkpoints" / "final.ckpt");
    std::size_t slice_cells = 0;
    for (const rac::SliceSpec& s : rac::QuadrotorSlices(qc.slice.zdots, qc.slice.resolution)) {
      const fs::path p = opt.out_dir / "slice.csv";
      oracle::WriteGridCsv(p, rac::ExportSlice(*art.learner, *env, s));
      const oracle::ValueGrid g = oracle::ReadGridCsv(p);
      for (double v : g.values) finite = finite && std::isfinite(v);
      slice_cells += g.values.size();
    }
    const std::string metrics = testing::ReadFile(opt.out_dir / "metrics.csv");
    const auto lines = std::count(metrics.begin(), metrics.end(), '\n');
    smoke_ok = finite && nets.size() == 6 && lines == 1 + static_cast<long>(art.metrics.size()) &&
               art.metrics.size() == 2 && fs::exists(opt.out_dir / "manifest.json");
    smoke = Fmt("smoke run %.0f s, %zu metric rows, %zu slice cells", Seconds(t0),
                art.metrics.size(), slice_cells);
  } catch (const std::exception& e) {
    smoke = std::string("smoke run failed: ") + e.what();
  }
  Report(8, reward_ok && protocol_ok && smoke_ok, "quadrotor exactness",
         Fmt("reward max rel err %.1e over 1000 triples (need <= 1e-12), %zu starts, T=%d; ",
             worst, starts.size(), env->spec().max_episode_len) +
             smoke);
}

}  // namespace

int main() {
  const testing::TempDir work("acceptance");
  DiOracle o;
  Criterion1(o);
  Criterion2();
  Criterion3(o);
  Criterion4();
  Criterion8(work.path());
  Criteria5to7(o, work.path());
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
