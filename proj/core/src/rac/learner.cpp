#include "rcrl/rac/learner.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "rcrl/core/errors.hpp"

namespace rcrl::rac {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using constraints::MultiplierShape;

approx::MlpShape Shape(int in, const TrainerConfig& cfg, int out, approx::OutputActivation act) {
  approx::MlpShape s;
  s.sizes.push_back(in);
  for (int l = 0; l < cfg.hidden_layers; ++l) s.sizes.push_back(cfg.hidden_width);
  s.sizes.push_back(out);
  s.output = act;
  return s;
}

approx::Mlp MakeNet(approx::MlpShape shape, CounterRng rng) {
  approx::Mlp net(std::move(shape));
  net.InitHeUniform(rng);
  return net;
}

void RequireFinite(double v, const char* what) {
  if (!std::isfinite(v)) throw NonFiniteValue(std::string(what) + " is not finite");
}

}  // namespace

Batch MakeBatch(const std::vector<Transition>& ts, const constraints::ConstraintKind& kind,
                double dt) {
  if (ts.empty()) throw std::invalid_argument("batch must be nonempty");
  const int n = static_cast<int>(ts.size());
  const int sd = static_cast<int>(ts[0].s.size()), ad = static_cast<int>(ts[0].a.size());
  Batch b;
  b.s.resize(sd, n);
  b.s_next.resize(sd, n);
  b.a.resize(ad, n);
  b.r.resize(n);
  b.h.resize(n);
  b.h_next.resize(n);
  b.c.resize(n);
  b.terminal.resize(n);
  b.cval.resize(n);
  const bool transition_level = std::holds_alternative<constraints::Cbf>(kind) ||
                                std::holds_alternative<constraints::SafetyIndex>(kind);
  for (int j = 0; j < n; ++j) {
    const Transition& t = ts[j];
    if (t.s.size() != sd || t.s_next.size() != sd || t.a.size() != ad) {
      throw DimensionMismatch("transitions in a batch differ in shape");
    }
    b.s.col(j) = t.s;
    b.s_next.col(j) = t.s_next;
    b.a.col(j) = t.a;
    b.r[j] = t.r;
    b.h[j] = t.h;
    b.h_next[j] = t.h_next;
    b.c[j] = t.c;
    b.terminal[j] = t.terminal() ? 1.0 : 0.0;
    b.cval[j] = transition_level ? constraints::constraint_value(kind, t, dt) : 0.0;
  }
  return b;
}

Batch MakeBatch(const ReplayBuffer& buffer, const std::vector<std::size_t>& indices,
                const constraints::ConstraintKind& kind, double dt) {
  std::vector<Transition> ts;
  ts.reserve(indices.size());
  for (std::size_t i : indices) ts.push_back(buffer[i]);
  return MakeBatch(ts, kind, dt);
}

Learner::Learner(const EnvSpec& spec, const TrainerConfig& config, CounterRng rng)
    : spec_(spec), config_(config), multiplier_shape_(constraints::multiplier_shape(config.constraint)) {
  spec_.Validate();
  config_.Validate();
  const int sd = spec_.state_dim, ad = spec_.action_dim;
  action_mid_ = 0.5 * (spec_.action_high + spec_.action_low);
  action_half_ = 0.5 * (spec_.action_high - spec_.action_low);

  approx::MlpShape actor_shape = Shape(sd, config_, ad, approx::OutputActivation::kTanhScaled);
  actor_shape.out_low = spec_.action_low;
  actor_shape.out_high = spec_.action_high;
  actor = MakeNet(actor_shape, rng.Split("actor"));
  q = MakeNet(Shape(sd + ad, config_, 1, approx::OutputActivation::kIdentity), rng.Split("q"));
  qh = MakeNet(Shape(sd + ad, config_, 1, approx::OutputActivation::kIdentity), rng.Split("qh"));
  if (multiplier_shape_ == MultiplierShape::kStatewise) {
    lambda = MakeNet(Shape(sd, config_, 1, approx::OutputActivation::kSoftplus),
                     rng.Split("lambda"));
  } else {
    // Scalar multiplier: a single softplus unit fed a constant input.
    approx::MlpShape s;
    s.sizes = {1, 1};
    s.output = approx::OutputActivation::kSoftplus;
    lambda = approx::Mlp(s);
  }
  // Inverse softplus of the requested initial value on the output bias.
  const double li = config_.lambda_init;
  lambda.params()[lambda.params().size() - 1] = li > 30.0 ? li : std::log(std::expm1(li));
  q_target = q;
  qh_target = qh;

  auto adam = [&](const approx::LinearSchedule& lr, const approx::Mlp& net) {
    approx::AdamConfig c;
    c.lr = config_.Resolved(lr);
    c.beta1 = config_.adam_beta1;
    c.beta2 = config_.adam_beta2;
    return approx::AdamState(c, net.params().size());
  };
  adam_q_ = adam(config_.critic_lr, q);
  adam_qh_ = adam(config_.critic_lr, qh);
  adam_actor_ = adam(config_.actor_lr, actor);
  adam_lambda_ = adam(config_.multiplier_lr, lambda);
  proj_.clip_norm = config_.clip_norm;
}

MatrixXd Learner::EncodeState(const MatrixXd& s) const {
  if (s.rows() != spec_.state_dim) throw DimensionMismatch("state has wrong dimension");
  return s.array().colwise() / spec_.state_scale.array();
}

MatrixXd Learner::EncodeAction(const MatrixXd& a) const {
  if (a.rows() != spec_.action_dim) throw DimensionMismatch("action has wrong dimension");
  return (a.colwise() - action_mid_).array().colwise() / action_half_.array();
}

MatrixXd Learner::CriticInput(const MatrixXd& s, const MatrixXd& a) const {
  if (s.cols() != a.cols()) throw DimensionMismatch("state and action batches differ in size");
  MatrixXd x(spec_.state_dim + spec_.action_dim, s.cols());
  x.topRows(spec_.state_dim) = EncodeState(s);
  x.bottomRows(spec_.action_dim) = EncodeAction(a);
  return x;
}

MatrixXd Learner::MultiplierInput(const MatrixXd& s) const {
  if (multiplier_shape_ == MultiplierShape::kStatewise) return EncodeState(s);
  return MatrixXd::Ones(1, s.cols());
}

MatrixXd Learner::Act(const MatrixXd& s) const { return actor.Forward(EncodeState(s)); }

ActionVec Learner::Act(const StateVec& s) const { return Act(MatrixXd(s)).col(0); }

VectorXd Learner::Lambda(const MatrixXd& s) const {
  if (multiplier_shape_ == MultiplierShape::kNone) return VectorXd::Zero(s.cols());
  const VectorXd raw = lambda.Forward(MultiplierInput(s)).row(0).transpose();
  return raw.cwiseMin(config_.lambda_max);
}

VectorXd Learner::ConstraintAtPolicy(const MatrixXd& s) const {
  VectorXd f = qh.Forward(CriticInput(s, Act(s))).row(0).transpose();
  if (const auto* cc = std::get_if<constraints::CumulativeCost>(&config_.constraint)) {
    f.array() -= cc->threshold;
  }
  return f;
}

double Learner::ConstraintAtPolicy(const StateVec& s) const {
  return ConstraintAtPolicy(MatrixXd(s))[0];
}

VectorXd Learner::ShapedReward(const Batch& b) const {
  if (const auto* rs = std::get_if<constraints::RewardShaping>(&config_.constraint)) {
    return config_.reward_scale * (b.r - rs->rho * b.h);
  }
  return config_.reward_scale * b.r;
}

VectorXd Learner::CriticTarget(const Batch& b, const MatrixXd& a_next) const {
  const VectorXd q_next = q_target.Forward(CriticInput(b.s_next, a_next)).row(0).transpose();
  return ShapedReward(b).array() + config_.gamma * (1.0 - b.terminal.array()) * q_next.array();
}

VectorXd Learner::SafetyCriticTarget(const Batch& b, const MatrixXd& a_next) const {
  const double g = config_.gamma;
  const auto& kind = config_.constraint;
  if (std::holds_alternative<constraints::Cbf>(kind) ||
      std::holds_alternative<constraints::SafetyIndex>(kind)) {
    return b.cval;
  }
  const VectorXd next = qh_target.Forward(CriticInput(b.s_next, a_next)).row(0).transpose();
  if (std::holds_alternative<constraints::CumulativeCost>(kind)) {
    return b.c.array() + g * (1.0 - b.terminal.array()) * next.array();
  }
  // Discounted safety target; past a boundary exit the successor is valued
  // at its own constraint value.
  const Eigen::ArrayXd succ =
      b.terminal.array() * b.h_next.array() + (1.0 - b.terminal.array()) * next.array();
  return (1.0 - g) * b.h.array() + g * b.h.array().max(succ);
}

VectorXd Learner::CriticTarget(const Batch& b) const { return CriticTarget(b, Act(b.s_next)); }

VectorXd Learner::SafetyCriticTarget(const Batch& b) const {
  return SafetyCriticTarget(b, Act(b.s_next));
}

GradResult Learner::RegressionGrad(const approx::Mlp& net, const Batch& b,
                                   const VectorXd& target) const {
  approx::MlpTape tape;
  const MatrixXd out = net.Forward(CriticInput(b.s, b.a), &tape);
  const VectorXd err = out.row(0).transpose() - target;
  GradResult res;
  res.loss = 0.5 * err.squaredNorm() / b.size();
  RequireFinite(res.loss, "critic loss");
  res.grad = VectorXd::Zero(net.params().size());
  net.Backward(tape, err.transpose() / b.size(), &res.grad);
  return res;
}

GradResult Learner::CriticGrad(const Batch& b) const { return RegressionGrad(q, b, CriticTarget(b)); }

GradResult Learner::SafetyCriticGrad(const Batch& b) const {
  return RegressionGrad(qh, b, SafetyCriticTarget(b));
}

GradResult Learner::ActorGrad(const Batch& b) const {
  const int n = b.size(), ad = spec_.action_dim;
  approx::MlpTape actor_tape, q_tape;
  const MatrixXd a = actor.Forward(EncodeState(b.s), &actor_tape);
  const MatrixXd x = CriticInput(b.s, a);
  const MatrixXd qv = q.Forward(x, &q_tape);
  GradResult res;
  res.loss = -qv.mean();
  MatrixXd d_enc = q.Backward(q_tape, MatrixXd::Constant(1, n, -1.0 / n), nullptr).bottomRows(ad);
  if (multiplier_shape_ != MultiplierShape::kNone) {
    const VectorXd lam = Lambda(b.s);
    approx::MlpTape h_tape;
    VectorXd f = qh.Forward(x, &h_tape).row(0).transpose();
    if (const auto* cc = std::get_if<constraints::CumulativeCost>(&config_.constraint)) {
      f.array() -= cc->threshold;
    }
    res.loss += lam.dot(f) / n;
    d_enc += qh.Backward(h_tape, lam.transpose() / n, nullptr).bottomRows(ad);
  }
  RequireFinite(res.loss, "actor objective");
  const MatrixXd d_a = d_enc.array().colwise() / action_half_.array();
  res.grad = VectorXd::Zero(actor.params().size());
  actor.Backward(actor_tape, d_a, &res.grad);
  if (!res.grad.allFinite()) throw NonFiniteValue("actor gradient is not finite");
  return res;
}

GradResult Learner::MultiplierGrad(const Batch& b) const {
  const int n = b.size();
  GradResult res;
  res.grad = VectorXd::Zero(lambda.params().size());
  if (multiplier_shape_ == MultiplierShape::kNone) return res;
  const VectorXd f = ConstraintAtPolicy(b.s);
  approx::MlpTape tape;
  const VectorXd raw = lambda.Forward(MultiplierInput(b.s), &tape).row(0).transpose();
  MatrixXd up(1, n);
  for (int j = 0; j < n; ++j) {
    const bool saturated = raw[j] >= config_.lambda_max && f[j] > 0.0;
    up(0, j) = saturated ? 0.0 : f[j] / n;
  }
  res.loss = raw.cwiseMin(config_.lambda_max).dot(f) / n;
  RequireFinite(res.loss, "multiplier objective");
  lambda.Backward(tape, up, &res.grad);
  if (!res.grad.allFinite()) throw NonFiniteValue("multiplier gradient is not finite");
  return res;
}

UpdateStats Learner::Update(const Batch& b, std::int64_t k) {
  const auto lr = config_.LearningRates(k);
  UpdateStats st;
  {
    const MatrixXd a_next = Act(b.s_next);
    const GradResult gq = RegressionGrad(q, b, CriticTarget(b, a_next));
    const GradResult gh = RegressionGrad(qh, b, SafetyCriticTarget(b, a_next));
    approx::AdamStep(q.params(), gq.grad, adam_q_, proj_, lr[0]);
    approx::AdamStep(qh.params(), gh.grad, adam_qh_, proj_, lr[0]);
    approx::PolyakUpdate(q_target.params(), q.params(), config_.tau);
    approx::PolyakUpdate(qh_target.params(), qh.params(), config_.tau);
    st.q_loss = gq.loss;
    st.qh_loss = gh.loss;
  }
  st.actor_loss = std::numeric_limits<double>::quiet_NaN();
  if (k % config_.actor_interval == 0) {
    const GradResult ga = ActorGrad(b);
    approx::AdamStep(actor.params(), ga.grad, adam_actor_, proj_, lr[1]);
    st.actor_loss = ga.loss;
    st.actor_updated = true;
  }
  if (multiplier_shape_ != MultiplierShape::kNone && k % config_.multiplier_interval == 0) {
    const GradResult gl = MultiplierGrad(b);
    approx::AdamStep(lambda.params(), -gl.grad, adam_lambda_, proj_, lr[2]);
    st.multiplier_updated = true;
  }
  return st;
}

std::vector<approx::NamedNetwork> Learner::Networks() const {
  return {{"actor", actor}, {"q", q},           {"q_target", q_target},
          {"qh", qh},       {"qh_target", qh_target}, {"lambda", lambda}};
}

void Learner::LoadNetworks(const std::vector<approx::NamedNetwork>& nets) {
  auto load = [&](approx::Mlp& dst, const char* name) {
    const approx::Mlp& src = approx::FindNetwork(nets, name);
    if (!(src.shape() == dst.shape())) {
      throw DimensionMismatch(std::string("checkpoint network '") + name +
                              "' does not match the configured architecture");
    }
    dst.set_params(src.params());
  };
  load(actor, "actor");
  load(q, "q");
  load(q_target, "q_target");
  load(qh, "qh");
  load(qh_target, "qh_target");
  load(lambda, "lambda");
}

}  // namespace rcrl::rac
