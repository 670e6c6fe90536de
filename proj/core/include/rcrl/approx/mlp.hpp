#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "rcrl/core/rng.hpp"

namespace rcrl::approx {

enum class HiddenActivation { kElu, kIdentity };
enum class OutputActivation { kIdentity, kSoftplus, kTanhScaled };

std::string ToString(OutputActivation a);
OutputActivation ParseOutputActivation(const std::string& name);

/// Layer sizes plus activations. `sizes` = {input, hidden..., output}.
struct MlpShape {
  std::vector<int> sizes;
  HiddenActivation hidden = HiddenActivation::kElu;
  OutputActivation output = OutputActivation::kIdentity;
  /// Output range for kTanhScaled; ignored otherwise.
  Eigen::VectorXd out_low;
  Eigen::VectorXd out_high;

  int input_dim() const { return sizes.front(); }
  int output_dim() const { return sizes.back(); }
  int num_layers() const { return static_cast<int>(sizes.size()) - 1; }
  /// Sum over layers of (fan_in + 1) * fan_out.
  std::size_t num_params() const;
  void Validate() const;
  bool operator==(const MlpShape& o) const;
};

/// Cached activations of a batched forward pass.
struct MlpTape {
  std::vector<Eigen::MatrixXd> inputs;  // per layer, input to the affine map
  std::vector<Eigen::MatrixXd> pre;     // per layer, affine output
};

/// Feedforward network over a flat parameter vector. Layer l stores its
/// weight (fan_out x fan_in, column-major) followed by its bias.
/// Batched calls take one sample per column.
class Mlp {
 public:
  Mlp() = default;
  explicit Mlp(MlpShape shape);

  /// Uniform(-sqrt(6/fan_in), sqrt(6/fan_in)) weights, zero biases.
  void InitHeUniform(CounterRng& rng);

  const MlpShape& shape() const { return shape_; }
  const Eigen::VectorXd& params() const { return params_; }
  Eigen::VectorXd& params() { return params_; }
  void set_params(const Eigen::VectorXd& p);

  Eigen::VectorXd Forward(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd Forward(const Eigen::MatrixXd& x, MlpTape* tape = nullptr) const;

  /// Vector-Jacobian product for the pass recorded in `tape`: adds
  /// d<upstream, out>/dparams to `param_grad` (if non-null) and returns
  /// d<upstream, out>/dx.
  Eigen::MatrixXd Backward(const MlpTape& tape, const Eigen::MatrixXd& upstream,
                           Eigen::VectorXd* param_grad) const;

  /// Single-sample convenience wrapper: returns {param_grad, input_grad}.
  std::pair<Eigen::VectorXd, Eigen::VectorXd> Backward(const Eigen::VectorXd& x,
                                                       const Eigen::VectorXd& upstream) const;

 private:
  std::size_t offset(int layer) const { return offsets_[layer]; }

  MlpShape shape_;
  Eigen::VectorXd params_;
  std::vector<std::size_t> offsets_;
};

}  // namespace rcrl::approx
