#include "commands.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "rcrl/approx/checkpoint.hpp"
#include "rcrl/core/errors.hpp"
#include "rcrl/core/version.hpp"
#include "rcrl/envs/double_integrator.hpp"
#include "rcrl/envs/quadrotor.hpp"
#include "rcrl/oracle/grid_io.hpp"
#include "rcrl/rac/evaluation.hpp"
#include "rcrl/rac/trainer.hpp"
#include "run_config.hpp"

namespace rcrl::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

// Problems with the invocation itself (existing output, missing files).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

fs::path OutRoot(const CommonOptions& opt, const RunConfig& cfg) {
  if (!opt.out_root.empty()) return opt.out_root;
  if (!cfg.out_root.empty()) return cfg.out_root;
  if (const char* env = std::getenv("RCRL_OUT_ROOT"); env && *env) return env;
  return "out";
}

void PrepareDir(const fs::path& dir, bool force) {
  if (fs::exists(dir)) {
    if (!fs::is_directory(dir)) throw UsageError(dir.string() + " exists and is not a directory");
    if (!fs::is_empty(dir)) {
      if (!force) {
        throw UsageError(dir.string() + " is not empty; pass --force to overwrite");
      }
      fs::remove_all(dir);
    }
  }
  fs::create_directories(dir);
}

void PrepareFile(const fs::path& path, bool force) {
  if (fs::exists(path) && !force) {
    throw UsageError(path.string() + " exists; pass --force to overwrite");
  }
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

RunConfig Load(const CommonOptions& opt) {
  if (!fs::exists(opt.config)) throw UsageError("config file not found: " + opt.config.string());
  RunConfig cfg = LoadRunConfig(opt.config, opt.overrides);
  cfg.Validate();
  return cfg;
}

// Maps exceptions onto exit codes: bad input 2, anything else 1.
template <typename F>
int Guard(const char* command, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    std::cerr << command << ": invalid config: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DimensionMismatch& e) {
    std::cerr << command << ": mismatch: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << command << ": " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << command << ": failed: " << e.what() << "\n";
    return kExitFailure;
  }
}

// Rebuilds the learner from a checkpoint and checks that it was trained for
// the configured environment and algorithm.
rac::Learner RestoreLearner(const fs::path& checkpoint, const RunConfig& cfg,
                            const Environment& env) {
  if (!fs::exists(checkpoint)) throw UsageError("checkpoint not found: " + checkpoint.string());
  const std::vector<approx::NamedNetwork> nets = approx::LoadCheckpoint(checkpoint);
  if (fs::exists(checkpoint.string() + ".json")) {
    const Json side = Json::parse(approx::LoadSidecar(checkpoint));
    if (side.contains("env") && side["env"].get<std::string>() != cfg.env_name) {
      throw DimensionMismatch("checkpoint was trained on '" + side["env"].get<std::string>() +
                              "', config selects '" + cfg.env_name + "'");
    }
    if (side.contains("algorithm") && side["algorithm"].get<std::string>() != cfg.algorithm()) {
      throw DimensionMismatch("checkpoint was trained with '" +
                              side["algorithm"].get<std::string>() + "', config selects '" +
                              cfg.algorithm() + "'");
    }
  }
  rac::Learner learner(env.spec(), cfg.train, CounterRng(cfg.seed).Split("init"));
  learner.LoadNetworks(nets);
  return learner;
}

std::string FormatNumber(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

int CmdTrain(const CommonOptions& opt) {
  return Guard("train", [&] {
    const RunConfig cfg = Load(opt);
    const fs::path dir =
        OutRoot(opt, cfg) / (opt.config.stem().string() + "_seed" + std::to_string(cfg.seed));
    PrepareDir(dir, opt.force);
    WriteText(dir / "config.toml", SerializeRunConfig(cfg));

    rac::RunOptions run;
    run.out_dir = dir;
    run.config_hash = ConfigHash(cfg);
    run.config_json = ToJson(cfg);
    run.algorithm = cfg.algorithm();
    run.env_name = cfg.env_name;
    const EnvPtr env = envs::MakeEnvironment(cfg.env_name, cfg.env_params);
    try {
      rac::train(env, cfg.train, cfg.seed, run);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      std::cerr << "train: failed: " << e.what() << " (see " << (dir / "FAILED").string() << ")\n";
      return kExitFailure;
    }
    std::cout << dir.string() << "\n";
    return kExitOk;
  });
}

int CmdOracle(const CommonOptions& opt) {
  return Guard("oracle", [&] {
    const RunConfig cfg = Load(opt);
    const EnvPtr env = envs::MakeEnvironment(cfg.env_name, cfg.env_params);
    const oracle::GridSpec grid = rac::DefaultGrid(env->spec(), cfg.oracle.grid);
    const fs::path dir = OutRoot(opt, cfg) / (opt.config.stem().string() + "_oracle");
    PrepareDir(dir, opt.force);

    const auto t0 = std::chrono::steady_clock::now();
    const oracle::SafetyValueSolution sol =
        oracle::SolveSbe(*env, grid, cfg.oracle.ToOracleConfig());
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const oracle::KernelMask kernel = sol.Kernel();
    oracle::WriteGridCsv(dir / "value.csv", sol.value);
    oracle::WriteMaskCsv(dir / "kernel.csv", kernel);

    std::optional<oracle::KernelMask> analytic;
    if (const auto* di = dynamic_cast<const envs::DoubleIntegrator*>(env.get())) {
      analytic = oracle::AnalyticKernel(grid, di->params().a_max, di->params().bound);
    } else if (const auto* ch = dynamic_cast<const envs::ConstantConstraint*>(env.get())) {
      analytic = oracle::KernelMask::FromValues(oracle::ValueGrid(grid, ch->Constraint({})));
    }

    Json summary;
    summary["env"] = cfg.env_name;
    summary["grid"] = cfg.oracle.grid;
    summary["gamma"] = cfg.oracle.gamma;
    summary["action_samples"] = cfg.oracle.action_samples;
    summary["tolerance"] = cfg.oracle.tolerance;
    summary["sweeps"] = sol.sweeps;
    summary["residual"] = sol.residual;
    summary["seconds"] = seconds;
    summary["kernel_fraction"] = kernel.Fraction();
    if (analytic) {
      oracle::WriteMaskCsv(dir / "analytic_kernel.csv", *analytic);
      summary["analytic_fraction"] = analytic->Fraction();
      summary["agreement"] = oracle::Agreement(kernel, *analytic);
    } else {
      summary["analytic_fraction"] = nullptr;
      summary["agreement"] = nullptr;
    }
    WriteText(dir / "summary.json", summary.dump(2) + "\n");
    std::cout << summary.dump() << "\n";
    return kExitOk;
  });
}

int CmdEval(const CheckpointOptions& opt) {
  return Guard("eval", [&] {
    const RunConfig cfg = Load(opt.common);
    const EnvPtr env = envs::MakeEnvironment(cfg.env_name, cfg.env_params);
    const fs::path out = opt.out.empty() ? fs::path(opt.checkpoint.string() + ".eval.json")
                                         : fs::path(opt.out);
    PrepareFile(out, opt.common.force);
    const rac::Learner learner = RestoreLearner(opt.checkpoint, cfg, *env);

    std::optional<oracle::KernelMask> kernel;
    if (env->spec().state_dim == 2 && !dynamic_cast<const envs::Quadrotor2D*>(env.get())) {
      const int n = cfg.train.probe_grid;
      kernel = oracle::SolveSbe(*env, rac::DefaultGrid(env->spec(), n),
                                rac::DefaultOracleConfig(n, cfg.train.gamma))
                   .Kernel();
    }
    const std::vector<StateVec> starts =
        rac::EvaluationStarts(*env, kernel ? &*kernel : nullptr, cfg.eval_starts,
                              cfg.train.probe_margin_cells, CounterRng(cfg.seed).Split("eval"));
    const oracle::Policy policy = [&](const StateVec& s) { return learner.Act(s); };
    const rac::EvalSummary sum = rac::Evaluate(*env, policy, starts);

    Json j;
    j["checkpoint"] = opt.checkpoint.string();
    j["env"] = cfg.env_name;
    j["algorithm"] = cfg.algorithm();
    j["episodes"] = sum.episodes;
    j["episode_length"] = env->spec().max_episode_len;
    j["avg_return"] = sum.avg_return;
    j["violation_rate"] = sum.violation_rate;
    j["violating_episodes"] = sum.violating_episodes;
    WriteText(out, j.dump(2) + "\n");
    std::cout << j.dump() << "\n";
    return kExitOk;
  });
}

int CmdSlice(const CheckpointOptions& opt) {
  return Guard("slice", [&] {
    const RunConfig cfg = Load(opt.common);
    const EnvPtr env = envs::MakeEnvironment(cfg.env_name, cfg.env_params);
    const int sd = env->spec().state_dim;

    std::vector<std::pair<std::string, rac::SliceSpec>> slices;
    if (dynamic_cast<const envs::Quadrotor2D*>(env.get())) {
      if (cfg.slice.zdots.empty()) throw ConfigError("slice.zdots", "no slices requested");
      const auto specs = rac::QuadrotorSlices(cfg.slice.zdots, cfg.slice.resolution);
      for (std::size_t i = 0; i < specs.size(); ++i) {
        slices.emplace_back("slice_zdot_" + FormatNumber(cfg.slice.zdots[i]) + ".csv", specs[i]);
      }
    } else if (sd == 2) {
      slices.emplace_back("slice.csv",
                          rac::FullSlice(rac::DefaultGrid(env->spec(), cfg.slice.resolution), sd));
    } else {
      throw ConfigError("slice", "no slice definition for environment '" + cfg.env_name + "'");
    }

    const fs::path dir =
        opt.out.empty() ? opt.checkpoint.parent_path() / "slices" : fs::path(opt.out);
    const rac::Learner learner = RestoreLearner(opt.checkpoint, cfg, *env);
    PrepareDir(dir, opt.common.force);
    for (const auto& [name, spec] : slices) {
      oracle::WriteGridCsv(dir / name, rac::ExportSlice(learner, *env, spec));
      std::cout << (dir / name).string() << "\n";
    }
    return kExitOk;
  });
}

int RunCli(int argc, char** argv) {
  CLI::App app{"Reachability-constrained RL toolkit"};
  app.set_version_flag("--version", VersionString());
  app.require_subcommand(1);

  CommonOptions train_opt, oracle_opt;
  CheckpointOptions eval_opt, slice_opt;

  auto add_common = [](CLI::App* sub, CommonOptions& o) {
    sub->add_option("-c,--config", o.config, "TOML run config")->required();
    sub->add_option("-o,--override", o.overrides, "dotted.key=value (repeatable)");
    sub->add_option("--out-root", o.out_root, "output root (default $RCRL_OUT_ROOT or out)");
    sub->add_flag("-f,--force", o.force, "overwrite existing output");
  };

  CLI::App* train = app.add_subcommand("train", "train a policy");
  add_common(train, train_opt);
  CLI::App* orc = app.add_subcommand("oracle", "solve the safety value on a grid");
  add_common(orc, oracle_opt);
  CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint");
  add_common(eval, eval_opt.common);
  eval->add_option("--checkpoint", eval_opt.checkpoint)->required();
  eval->add_option("--out", eval_opt.out, "JSON output path");
  CLI::App* slice = app.add_subcommand("slice", "export learned constraint slices");
  add_common(slice, slice_opt.common);
  slice->add_option("--checkpoint", slice_opt.checkpoint)->required();
  slice->add_option("--out", slice_opt.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  if (train->parsed()) return CmdTrain(train_opt);
  if (orc->parsed()) return CmdOracle(oracle_opt);
  if (eval->parsed()) return CmdEval(eval_opt);
  return CmdSlice(slice_opt);
}

}  // namespace rcrl::cli
