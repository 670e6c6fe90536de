#include "rcrl/envs/registry.hpp"

#include <cmath>
#include <algorithm>

#include "rcrl/core/errors.hpp"
#include "rcrl/envs/double_integrator.hpp"
#include "rcrl/envs/quadrotor.hpp"

namespace rcrl::envs {
namespace {

// Assigns known keys and rejects the rest.
class ParamReader {
 public:
  ParamReader(const EnvParams& params, std::string env) : params_(params), env_(std::move(env)) {}

  void Read(const std::string& key, double* out) {
    seen_.push_back(key);
    if (auto it = params_.find(key); it != params_.end()) *out = it->second;
  }
  void Read(const std::string& key, int* out) {
    double v = *out;
    Read(key, &v);
    if (v != std::floor(v)) throw ConfigError("env." + key, "must be an integer");
    *out = static_cast<int>(v);
  }
  void Finish() const {
    for (const auto& [key, _] : params_) {
      if (std::find(seen_.begin(), seen_.end(), key) == seen_.end()) {
        throw ConfigError("env." + key, "unknown parameter for environment '" + env_ + "'");
      }
    }
  }

 private:
  const EnvParams& params_;
  std::string env_;
  std::vector<std::string> seen_;
};

}  // namespace

EnvPtr MakeEnvironment(const std::string& name, const EnvParams& params) {
  ParamReader reader(params, name);
  if (name == "double_integrator") {
    DoubleIntegratorParams p;
    reader.Read("a_max", &p.a_max);
    reader.Read("bound", &p.bound);
    reader.Read("dt", &p.dt);
    reader.Read("max_episode_len", &p.max_episode_len);
    reader.Read("exit_bound", &p.exit_bound);
    reader.Finish();
    return std::make_shared<DoubleIntegrator>(p);
  }
  if (name == "quadrotor2d") {
    Quadrotor2DParams p;
    reader.Read("mass", &p.mass);
    reader.Read("inertia", &p.inertia);
    reader.Read("arm", &p.arm);
    reader.Read("gravity", &p.gravity);
    reader.Read("dt", &p.dt);
    reader.Read("num_waypoints", &p.num_waypoints);
    reader.Read("max_episode_len", &p.max_episode_len);
    reader.Read("z_low", &p.z_low);
    reader.Read("z_high", &p.z_high);
    reader.Read("exit_x", &p.exit_x);
    reader.Read("exit_z", &p.exit_z);
    reader.Finish();
    return std::make_shared<Quadrotor2D>(p);
  }
  if (name == "constant_h") {
    ConstantConstraintParams p;
    reader.Read("h_value", &p.h_value);
    reader.Read("dt", &p.dt);
    reader.Read("max_episode_len", &p.max_episode_len);
    reader.Finish();
    return std::make_shared<ConstantConstraint>(p);
  }
  throw ConfigError("env.name", "unknown environment '" + name + "'");
}

std::vector<std::string> RegisteredEnvironments() {
  return {"double_integrator", "quadrotor2d", "constant_h"};
}

}  // namespace rcrl::envs
