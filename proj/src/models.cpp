#include "hetprop/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hetprop {

namespace {

constexpr double kLeakySlope = 0.2;

using Vector = Eigen::VectorXd;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::r_mlp: return "r_mlp";
    case ModelKind::r_sgc: return "r_sgc";
    case ModelKind::r_sign: return "r_sign";
    case ModelKind::r_sagn: return "r_sagn";
    case ModelKind::r_gamlp: return "r_gamlp";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view s) {
  for (ModelKind k : kAllModelKinds) {
    if (s == to_string(k)) return k;
  }
  throw std::invalid_argument("unknown model kind '" + std::string(s) +
                              "' (r_mlp|r_sgc|r_sign|r_sagn|r_gamlp)");
}

void ModelSpec::validate() const {
  if (input_dim < 1 || hidden_dim < 1 || class_count < 1) {
    throw std::invalid_argument("ModelSpec: dimensions must be >= 1");
  }
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw std::invalid_argument("ModelSpec: dropout_rate must be in [0, 1)");
  }
  if (num_hops < 1 && kind != ModelKind::r_mlp) {
    throw std::invalid_argument("ModelSpec: num_hops must be >= 1");
  }
}

Parameter& ModelState::at(std::string_view name) {
  for (auto& p : params)
    if (p.name == name) return p;
  throw std::out_of_range("ModelState: no parameter '" + std::string(name) + "'");
}

const Parameter& ModelState::at(std::string_view name) const {
  for (const auto& p : params)
    if (p.name == name) return p;
  throw std::out_of_range("ModelState: no parameter '" + std::string(name) + "'");
}

void ModelState::zero_grad() {
  for (auto& p : params) p.grad.setZero();
}

bool ModelState::all_finite() const {
  return std::all_of(params.begin(), params.end(), [](const Parameter& p) { return p.value.allFinite(); });
}

std::vector<std::uint32_t> hops_used(const ModelSpec& spec) {
  switch (spec.kind) {
    case ModelKind::r_mlp: return {0};
    case ModelKind::r_sgc: return {spec.num_hops};
    default: {
      std::vector<std::uint32_t> all(spec.num_hops + 1);
      for (std::uint32_t k = 0; k <= spec.num_hops; ++k) all[k] = k;
      return all;
    }
  }
}

namespace {

std::string theta_name(std::uint32_t k) { return "theta_" + std::to_string(k); }
std::string bias_name(std::uint32_t k) { return "bias_" + std::to_string(k); }

std::size_t fused_width(const ModelSpec& spec) {
  return spec.kind == ModelKind::r_sign ? (spec.num_hops + 1) * spec.hidden_dim : spec.hidden_dim;
}

void add_param(ModelState& s, std::string name, Eigen::Index rows, Eigen::Index cols, double bound,
               std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  Parameter p;
  p.name = std::move(name);
  p.value.resize(rows, cols);
  for (Eigen::Index i = 0; i < p.value.size(); ++i) p.value.data()[i] = dist(rng);
  p.grad = Matrix::Zero(rows, cols);
  p.adam_m = Matrix::Zero(rows, cols);
  p.adam_v = Matrix::Zero(rows, cols);
  s.params.push_back(std::move(p));
}

}  // namespace

ModelState init_state(const ModelSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  ModelState s;
  const double in_bound = 1.0 / std::sqrt(double(spec.input_dim));
  const double hidden_bound = 1.0 / std::sqrt(double(spec.hidden_dim));
  const auto d = static_cast<Eigen::Index>(spec.input_dim);
  const auto h = static_cast<Eigen::Index>(spec.hidden_dim);
  for (std::uint32_t k : hops_used(spec)) {
    add_param(s, theta_name(k), d, h, in_bound, rng);
    add_param(s, bias_name(k), 1, h, in_bound, rng);
  }
  if (spec.kind == ModelKind::r_sagn) {
    add_param(s, "att_hop", h, 1, hidden_bound, rng);
    add_param(s, "att_self", h, 1, hidden_bound, rng);
  } else if (spec.kind == ModelKind::r_gamlp) {
    add_param(s, "gate_hop", h, 1, hidden_bound, rng);
    add_param(s, "gate_ctx", h, 1, hidden_bound, rng);
  }
  const auto fused = static_cast<Eigen::Index>(fused_width(spec));
  const double out_bound = 1.0 / std::sqrt(double(fused));
  add_param(s, "out_w", fused, spec.class_count, out_bound, rng);
  add_param(s, "out_b", 1, spec.class_count, out_bound, rng);
  return s;
}

namespace {

// Intermediate values kept for the backward pass. Vectors indexed by hop k
// hold entries only for the hops the model reads (position = index in
// hops_used).
struct Cache {
  std::vector<std::uint32_t> hops;
  std::vector<Matrix> inputs;  // C^k rows of the batch
  std::vector<Matrix> proj;    // P_k
  Matrix fused;                // Z
  Matrix hidden;               // relu(Z) (* dropout mask)
  Matrix dropout_mask;
  Matrix probs;
  // r_sagn
  Matrix att_pre;    // pre-leaky scores, batch x (K+1)
  Matrix att_alpha;  // softmax weights
  // r_gamlp
  std::vector<Matrix> running;  // R_0..R_K
  Matrix gates;                 // column k-1 holds g_k
};

void check_inputs(const ModelSpec& spec, const ModelState& state, const PropagationStack& stack,
                  std::span<const NodeId> batch) {
  spec.validate();
  if (stack.size() != spec.num_hops + 1 && spec.kind != ModelKind::r_mlp) {
    throw std::invalid_argument("forward: stack has " + std::to_string(stack.size()) +
                                " hops, model expects " + std::to_string(spec.num_hops + 1));
  }
  if (stack.size() == 0) throw std::invalid_argument("forward: empty propagation stack");
  if (stack.dim() != spec.input_dim) {
    throw std::invalid_argument("forward: stack dim " + std::to_string(stack.dim()) + " != input_dim " +
                                std::to_string(spec.input_dim));
  }
  for (NodeId v : batch) {
    if (v >= stack.rows()) throw std::invalid_argument("forward: node id " + std::to_string(v) + " out of range");
  }
  if (state.params.empty()) throw std::invalid_argument("forward: uninitialized model state");
}

Matrix gather_rows(FeatureView hop, std::span<const NodeId> batch) {
  Matrix out(static_cast<Eigen::Index>(batch.size()), static_cast<Eigen::Index>(hop.dim()));
  for (std::size_t i = 0; i < batch.size(); ++i) {
    auto row = hop.row(batch[i]);
    for (std::size_t j = 0; j < hop.dim(); ++j) out(Eigen::Index(i), Eigen::Index(j)) = row[j];
  }
  return out;
}

void run_forward(const ModelSpec& spec, const ModelState& state, const PropagationStack& stack,
                 std::span<const NodeId> batch, std::mt19937_64* rng, Cache& c) {
  check_inputs(spec, state, stack, batch);
  const auto B = static_cast<Eigen::Index>(batch.size());
  const auto h = static_cast<Eigen::Index>(spec.hidden_dim);

  c.hops = hops_used(spec);
  c.inputs.clear();
  c.proj.clear();
  for (std::uint32_t k : c.hops) {
    c.inputs.push_back(gather_rows(stack.hop(k), batch));
    Matrix p = c.inputs.back() * state.at(theta_name(k)).value;
    p.rowwise() += state.at(bias_name(k)).value.row(0);
    c.proj.push_back(std::move(p));
  }
  const std::size_t H = c.hops.size();

  switch (spec.kind) {
    case ModelKind::r_mlp:
    case ModelKind::r_sgc:
      c.fused = c.proj[0];
      break;
    case ModelKind::r_sign:
      c.fused.resize(B, h * Eigen::Index(H));
      for (std::size_t k = 0; k < H; ++k) c.fused.middleCols(Eigen::Index(k) * h, h) = c.proj[k];
      break;
    case ModelKind::r_sagn: {
      const Vector& a_hop = state.at("att_hop").value.col(0);
      const Vector self = c.proj[0] * state.at("att_self").value.col(0);
      c.att_pre.resize(B, Eigen::Index(H));
      for (std::size_t k = 0; k < H; ++k) c.att_pre.col(Eigen::Index(k)) = c.proj[k] * a_hop + self;
      c.att_alpha.resize(B, Eigen::Index(H));
      for (Eigen::Index i = 0; i < B; ++i) {
        double top = -std::numeric_limits<double>::infinity();
        for (Eigen::Index k = 0; k < Eigen::Index(H); ++k) {
          const double r = c.att_pre(i, k);
          c.att_alpha(i, k) = r > 0 ? r : kLeakySlope * r;
          top = std::max(top, c.att_alpha(i, k));
        }
        double total = 0.0;
        for (Eigen::Index k = 0; k < Eigen::Index(H); ++k) {
          c.att_alpha(i, k) = std::exp(c.att_alpha(i, k) - top);
          total += c.att_alpha(i, k);
        }
        c.att_alpha.row(i) /= total;
      }
      c.fused = Matrix::Zero(B, h);
      for (std::size_t k = 0; k < H; ++k) {
        c.fused += c.att_alpha.col(Eigen::Index(k)).asDiagonal() * c.proj[k];
      }
      break;
    }
    case ModelKind::r_gamlp: {
      const Vector& a_hop = state.at("gate_hop").value.col(0);
      const Vector& a_ctx = state.at("gate_ctx").value.col(0);
      c.running.assign(1, c.proj[0]);
      c.gates.resize(B, Eigen::Index(H) - 1);
      for (std::size_t k = 1; k < H; ++k) {
        const Matrix& prev = c.running.back();
        Vector g = c.proj[k] * a_hop + prev * a_ctx;
        for (Eigen::Index i = 0; i < B; ++i) g(i) = sigmoid(g(i));
        c.gates.col(Eigen::Index(k) - 1) = g;
        c.running.push_back(prev + g.asDiagonal() * (c.proj[k] - prev));
      }
      c.fused = c.running.back();
      break;
    }
  }

  c.hidden = c.fused.cwiseMax(0.0);
  if (rng && spec.dropout_rate > 0.0) {
    std::bernoulli_distribution keep(1.0 - spec.dropout_rate);
    c.dropout_mask.resize(c.hidden.rows(), c.hidden.cols());
    const double scale = 1.0 / (1.0 - spec.dropout_rate);
    for (Eigen::Index i = 0; i < c.dropout_mask.size(); ++i) {
      c.dropout_mask.data()[i] = keep(*rng) ? scale : 0.0;
    }
    c.hidden = c.hidden.cwiseProduct(c.dropout_mask);
  } else {
    c.dropout_mask.resize(0, 0);
  }

  Matrix logits = c.hidden * state.at("out_w").value;
  logits.rowwise() += state.at("out_b").value.row(0);
  c.probs = logits.unaryExpr([](double x) { return sigmoid(x); });
  if (!c.probs.allFinite()) throw std::runtime_error("forward: NaN in model output (training diverged?)");
}

// d_logits: gradient of the loss w.r.t. the pre-sigmoid outputs.
void run_backward(const ModelSpec& spec, ModelState& state, const Cache& c, const Matrix& d_logits) {
  const std::size_t H = c.hops.size();
  state.at("out_w").grad += c.hidden.transpose() * d_logits;
  state.at("out_b").grad += d_logits.colwise().sum();

  Matrix d_hidden = d_logits * state.at("out_w").value.transpose();
  if (c.dropout_mask.size() > 0) d_hidden = d_hidden.cwiseProduct(c.dropout_mask);
  const Matrix d_fused = d_hidden.cwiseProduct(
      c.fused.unaryExpr([](double z) { return z > 0.0 ? 1.0 : 0.0; }));

  std::vector<Matrix> d_proj(H);
  for (std::size_t k = 0; k < H; ++k) d_proj[k] = Matrix::Zero(c.proj[k].rows(), c.proj[k].cols());
  const Eigen::Index B = d_fused.rows();
  const Eigen::Index h = static_cast<Eigen::Index>(spec.hidden_dim);

  switch (spec.kind) {
    case ModelKind::r_mlp:
    case ModelKind::r_sgc:
      d_proj[0] = d_fused;
      break;
    case ModelKind::r_sign:
      for (std::size_t k = 0; k < H; ++k) d_proj[k] = d_fused.middleCols(Eigen::Index(k) * h, h);
      break;
    case ModelKind::r_sagn: {
      const Vector& a_hop = state.at("att_hop").value.col(0);
      const Vector& a_self = state.at("att_self").value.col(0);
      // d alpha_ik = dZ_i . P_k[i]
      Matrix d_alpha(B, Eigen::Index(H));
      for (std::size_t k = 0; k < H; ++k) {
        d_alpha.col(Eigen::Index(k)) = d_fused.cwiseProduct(c.proj[k]).rowwise().sum();
        d_proj[k] += c.att_alpha.col(Eigen::Index(k)).asDiagonal() * d_fused;
      }
      // softmax then leaky-relu backward
      Matrix d_pre(B, Eigen::Index(H));
      for (Eigen::Index i = 0; i < B; ++i) {
        const double dot = c.att_alpha.row(i).dot(d_alpha.row(i));
        for (Eigen::Index k = 0; k < Eigen::Index(H); ++k) {
          const double d_score = c.att_alpha(i, k) * (d_alpha(i, k) - dot);
          d_pre(i, k) = d_score * (c.att_pre(i, k) > 0 ? 1.0 : kLeakySlope);
        }
      }
      Vector d_a_hop = Vector::Zero(h);
      for (std::size_t k = 0; k < H; ++k) {
        const Vector col = d_pre.col(Eigen::Index(k));
        d_a_hop += c.proj[k].transpose() * col;
        d_proj[k] += col * a_hop.transpose();
      }
      const Vector d_self = d_pre.rowwise().sum();
      state.at("att_hop").grad.col(0) += d_a_hop;
      state.at("att_self").grad.col(0) += c.proj[0].transpose() * d_self;
      d_proj[0] += d_self * a_self.transpose();
      break;
    }
    case ModelKind::r_gamlp: {
      const Vector& a_hop = state.at("gate_hop").value.col(0);
      const Vector& a_ctx = state.at("gate_ctx").value.col(0);
      Matrix d_run = d_fused;  // gradient w.r.t. R_k, walking k downwards
      Vector d_a_hop = Vector::Zero(h);
      Vector d_a_ctx = Vector::Zero(h);
      for (std::size_t k = H - 1; k >= 1; --k) {
        const Matrix& prev = c.running[k - 1];
        const Vector g = c.gates.col(Eigen::Index(k) - 1);
        const Matrix diff = c.proj[k] - prev;
        const Vector d_gate = d_run.cwiseProduct(diff).rowwise().sum();
        const Vector d_pre = d_gate.cwiseProduct(g.cwiseProduct(Vector::Ones(B) - g));
        d_proj[k] += g.asDiagonal() * d_run + d_pre * a_hop.transpose();
        d_a_hop += c.proj[k].transpose() * d_pre;
        d_a_ctx += prev.transpose() * d_pre;
        d_run = (Vector::Ones(B) - g).asDiagonal() * d_run + d_pre * a_ctx.transpose();
      }
      d_proj[0] += d_run;
      state.at("gate_hop").grad.col(0) += d_a_hop;
      state.at("gate_ctx").grad.col(0) += d_a_ctx;
      break;
    }
  }

  for (std::size_t k = 0; k < H; ++k) {
    state.at(theta_name(c.hops[k])).grad += c.inputs[k].transpose() * d_proj[k];
    state.at(bias_name(c.hops[k])).grad += d_proj[k].colwise().sum();
  }
}

}  // namespace

Matrix forward(const ModelSpec& spec, const ModelState& state, const PropagationStack& stack,
               std::span<const NodeId> batch) {
  Cache c;
  run_forward(spec, state, stack, batch, nullptr, c);
  return std::move(c.probs);
}

BceResult bce_loss(const Matrix& pred, const Matrix& targets) {
  if (pred.rows() != targets.rows() || pred.cols() != targets.cols()) {
    throw std::invalid_argument("bce_loss: prediction/target shape mismatch");
  }
  BceResult r;
  r.grad.resize(pred.rows(), pred.cols());
  const double n = pred.rows() > 0 ? double(pred.rows()) : 1.0;
  double total = 0.0;
  for (Eigen::Index i = 0; i < pred.rows(); ++i) {
    for (Eigen::Index j = 0; j < pred.cols(); ++j) {
      const double y = targets(i, j);
      const double p = pred(i, j);
      double g = 0.0;
      // Each log argument is floored separately, so an exact prediction
      // costs exactly 0. A floored term has zero slope.
      if (y != 0.0) {
        total -= y * std::log(std::max(p, kBceClamp));
        if (p > kBceClamp) g -= y / p;
      }
      if (y != 1.0) {
        total -= (1.0 - y) * std::log(std::max(1.0 - p, kBceClamp));
        if (1.0 - p > kBceClamp) g += (1.0 - y) / (1.0 - p);
      }
      r.grad(i, j) = g / n;
    }
  }
  r.loss = total / n;
  return r;
}

Matrix label_targets(const std::vector<std::vector<ClassId>>& labels, std::uint32_t class_count) {
  Matrix t = Matrix::Zero(static_cast<Eigen::Index>(labels.size()), class_count);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (ClassId c : labels[i]) {
      if (c >= class_count) throw std::out_of_range("label_targets: class id out of range");
      t(Eigen::Index(i), c) = 1.0;
    }
  }
  return t;
}

double loss_and_gradients(const ModelSpec& spec, ModelState& state, const PropagationStack& stack,
                          std::span<const NodeId> batch, const Matrix& targets, std::mt19937_64* rng) {
  Cache c;
  run_forward(spec, state, stack, batch, rng, c);
  BceResult bce = bce_loss(c.probs, targets);
  // Through the sigmoid: dL/dlogit = (p - y) / n, which equals
  // dL/dp * p(1-p) wherever the floor is inactive and stays informative for
  // saturated outputs.
  const double n = batch.empty() ? 1.0 : double(batch.size());
  Matrix d_logits = (c.probs - targets) / n;
  run_backward(spec, state, c, d_logits);
  return bce.loss;
}

std::vector<std::vector<ClassId>> predict_labels(const Matrix& probs, double threshold) {
  std::vector<std::vector<ClassId>> out(static_cast<std::size_t>(probs.rows()));
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    for (Eigen::Index j = 0; j < probs.cols(); ++j) {
      if (probs(i, j) >= threshold) out[std::size_t(i)].push_back(static_cast<ClassId>(j));
    }
  }
  return out;
}

}  // namespace hetprop
