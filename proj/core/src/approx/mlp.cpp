#include "rcrl/approx/mlp.hpp"

#include <cmath>

#include "rcrl/core/errors.hpp"

namespace rcrl::approx {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// max(z, 0) + (exp(min(z, 0)) - 1): branch-free so Eigen vectorises the exp.
// Exact for z > 0; near zero the absolute error is ~1e-16.
void EluInPlace(MatrixXd& z) { z = z.array().max(0.0) + (z.array().min(0.0).exp() - 1.0); }
double Softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }
double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

std::string ToString(OutputActivation a) {
  switch (a) {
    case OutputActivation::kIdentity: return "identity";
    case OutputActivation::kSoftplus: return "softplus";
    case OutputActivation::kTanhScaled: return "tanh_scaled";
  }
  return "identity";
}

OutputActivation ParseOutputActivation(const std::string& name) {
  if (name == "identity") return OutputActivation::kIdentity;
  if (name == "softplus") return OutputActivation::kSoftplus;
  if (name == "tanh_scaled") return OutputActivation::kTanhScaled;
  throw ConfigError("output_activation", "unknown activation '" + name + "'");
}

std::size_t MlpShape::num_params() const {
  std::size_t n = 0;
  for (int l = 0; l < num_layers(); ++l) {
    n += static_cast<std::size_t>(sizes[l] + 1) * static_cast<std::size_t>(sizes[l + 1]);
  }
  return n;
}

void MlpShape::Validate() const {
  if (sizes.size() < 2) throw ConfigError("network.sizes", "need input and output sizes");
  for (int s : sizes) {
    if (s < 1) throw ConfigError("network.sizes", "layer sizes must be >= 1");
  }
  if (output == OutputActivation::kTanhScaled) {
    if (out_low.size() != output_dim() || out_high.size() != output_dim()) {
      throw DimensionMismatch("tanh-scaled output bounds do not match output size");
    }
    if (!(out_low.array() < out_high.array()).all()) {
      throw ConfigError("network.out_bounds", "low must be < high");
    }
  }
}

bool MlpShape::operator==(const MlpShape& o) const {
  if (sizes != o.sizes || hidden != o.hidden || output != o.output) return false;
  if (output != OutputActivation::kTanhScaled) return true;
  return out_low == o.out_low && out_high == o.out_high;
}

Mlp::Mlp(MlpShape shape) : shape_(std::move(shape)) {
  shape_.Validate();
  offsets_.resize(shape_.num_layers() + 1, 0);
  for (int l = 0; l < shape_.num_layers(); ++l) {
    offsets_[l + 1] =
        offsets_[l] + static_cast<std::size_t>(shape_.sizes[l] + 1) * shape_.sizes[l + 1];
  }
  params_ = VectorXd::Zero(static_cast<Eigen::Index>(offsets_.back()));
}

void Mlp::InitHeUniform(CounterRng& rng) {
  for (int l = 0; l < shape_.num_layers(); ++l) {
    const int fan_in = shape_.sizes[l], fan_out = shape_.sizes[l + 1];
    const double limit = std::sqrt(6.0 / fan_in);
    const std::size_t o = offset(l);
    for (std::size_t i = 0; i < static_cast<std::size_t>(fan_in) * fan_out; ++i) {
      params_[o + i] = rng.Uniform(-limit, limit);
    }
    params_.segment(o + static_cast<std::size_t>(fan_in) * fan_out, fan_out).setZero();
  }
}

void Mlp::set_params(const VectorXd& p) {
  if (p.size() != params_.size()) throw DimensionMismatch("parameter vector has wrong length");
  params_ = p;
}

VectorXd Mlp::Forward(const VectorXd& x) const {
  MatrixXd m = x;
  return Forward(m).col(0);
}

MatrixXd Mlp::Forward(const MatrixXd& x, MlpTape* tape) const {
  if (x.rows() != shape_.input_dim()) {
    throw DimensionMismatch("network input has " + std::to_string(x.rows()) + " rows, expected " +
                            std::to_string(shape_.input_dim()));
  }
  if (tape) {
    tape->inputs.assign(shape_.num_layers(), MatrixXd());
    tape->pre.assign(shape_.num_layers(), MatrixXd());
  }
  MatrixXd a = x;
  for (int l = 0; l < shape_.num_layers(); ++l) {
    const int fan_in = shape_.sizes[l], fan_out = shape_.sizes[l + 1];
    const std::size_t o = offset(l);
    Eigen::Map<const MatrixXd> w(params_.data() + o, fan_out, fan_in);
    Eigen::Map<const VectorXd> b(params_.data() + o + static_cast<std::size_t>(fan_in) * fan_out,
                                 fan_out);
    MatrixXd z = w * a;
    z.colwise() += b;
    if (tape) {
      tape->inputs[l] = std::move(a);
      tape->pre[l] = z;
    }
    const bool last = l + 1 == shape_.num_layers();
    if (!last) {
      if (shape_.hidden == HiddenActivation::kElu) EluInPlace(z);
    } else if (shape_.output == OutputActivation::kSoftplus) {
      z = z.unaryExpr([](double v) { return Softplus(v); });
    } else if (shape_.output == OutputActivation::kTanhScaled) {
      const VectorXd mid = 0.5 * (shape_.out_high + shape_.out_low);
      const VectorXd half = 0.5 * (shape_.out_high - shape_.out_low);
      z = z.array().tanh();
      z = (z.array().colwise() * half.array()).colwise() + mid.array();
    }
    a = std::move(z);
  }
  return a;
}

MatrixXd Mlp::Backward(const MlpTape& tape, const MatrixXd& upstream, VectorXd* param_grad) const {
  const int layers = shape_.num_layers();
  if (static_cast<int>(tape.pre.size()) != layers) {
    throw DimensionMismatch("tape does not belong to this network");
  }
  if (upstream.rows() != shape_.output_dim() || upstream.cols() != tape.pre.back().cols()) {
    throw DimensionMismatch("upstream gradient does not match network output");
  }
  if (param_grad && param_grad->size() != params_.size()) {
    throw DimensionMismatch("parameter gradient has wrong length");
  }
  // delta = d<upstream, out>/d(pre-activation of current layer)
  MatrixXd delta;
  const MatrixXd& z_out = tape.pre.back();
  switch (shape_.output) {
    case OutputActivation::kIdentity:
      delta = upstream;
      break;
    case OutputActivation::kSoftplus:
      delta = upstream.array() * z_out.unaryExpr([](double v) { return Sigmoid(v); }).array();
      break;
    case OutputActivation::kTanhScaled: {
      const VectorXd half = 0.5 * (shape_.out_high - shape_.out_low);
      const Eigen::ArrayXXd t = z_out.array().tanh();
      delta = (upstream.array() * (1.0 - t.square())).colwise() * half.array();
      break;
    }
  }
  for (int l = layers - 1; l >= 0; --l) {
    const int fan_in = shape_.sizes[l], fan_out = shape_.sizes[l + 1];
    const std::size_t o = offset(l);
    Eigen::Map<const MatrixXd> w(params_.data() + o, fan_out, fan_in);
    if (param_grad) {
      Eigen::Map<MatrixXd> gw(param_grad->data() + o, fan_out, fan_in);
      Eigen::Map<VectorXd> gb(param_grad->data() + o + static_cast<std::size_t>(fan_in) * fan_out,
                              fan_out);
      gw.noalias() += delta * tape.inputs[l].transpose();
      gb += delta.rowwise().sum();
    }
    MatrixXd up = w.transpose() * delta;
    if (l > 0 && shape_.hidden == HiddenActivation::kElu) {
      // elu'(z) = min(elu(z) + 1, 1), and elu(z) is this layer's input.
      up.array() *= (tape.inputs[l].array() + 1.0).min(1.0);
    }
    delta = std::move(up);
  }
  return delta;
}

std::pair<VectorXd, VectorXd> Mlp::Backward(const VectorXd& x, const VectorXd& upstream) const {
  MlpTape tape;
  Forward(MatrixXd(x), &tape);
  VectorXd g = VectorXd::Zero(params_.size());
  MatrixXd up = upstream;
  MatrixXd gx = Backward(tape, up, &g);
  return {std::move(g), gx.col(0)};
}

}  // namespace rcrl::approx
