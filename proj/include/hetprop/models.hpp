#pragma once

// Post-classifiers over a precomputed propagation stack.
//
// Every model projects some subset of the hops with per-hop affine maps
// P_k = C^k Theta_k + b_k, fuses them into a hidden matrix Z, and predicts
// Y = sigmoid(relu(Z) W + c). The kinds differ only in the fusion:
//
//   r_mlp    Z = P_0                              (raw features only)
//   r_sgc    Z = P_K                              (last hop only)
//   r_sign   Z = [P_0 | P_1 | ... | P_K]          (concatenation)
//   r_sagn   Z_i = sum_k alpha_ik P_k[i],  alpha_i = softmax_k(s_ik),
//            s_ik = leaky_relu(a_hop . P_k[i] + a_self . P_0[i])
//   r_gamlp  R_0 = P_0,  R_k = R_{k-1} + g_k * (P_k - R_{k-1}),
//            g_k = sigmoid(a_hop . P_k + a_ctx . R_{k-1}),  Z = R_K
//
// All math is double precision; gradients are derived by hand.

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hetprop/apm.hpp"
#include "hetprop/feature_matrix.hpp"
#include "hetprop/label_matrix.hpp"

namespace hetprop {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class ModelKind { r_mlp, r_sgc, r_sign, r_sagn, r_gamlp };

std::string to_string(ModelKind k);
ModelKind parse_model_kind(std::string_view s);
inline constexpr ModelKind kAllModelKinds[] = {ModelKind::r_mlp, ModelKind::r_sgc, ModelKind::r_sign,
                                               ModelKind::r_sagn, ModelKind::r_gamlp};

struct ModelSpec {
  ModelKind kind = ModelKind::r_mlp;
  std::size_t input_dim = 128;
  std::size_t hidden_dim = 256;
  std::uint32_t class_count = 2;
  std::uint32_t num_hops = 3;
  double dropout_rate = 0.0;
  std::uint64_t seed = 0;

  // Throws std::invalid_argument on zero dims or dropout outside [0, 1).
  void validate() const;
};

struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;
  Matrix adam_m;
  Matrix adam_v;
};

struct ModelState {
  std::vector<Parameter> params;
  std::uint64_t epoch = 0;
  std::uint64_t step = 0;

  Parameter& at(std::string_view name);
  const Parameter& at(std::string_view name) const;
  void zero_grad();
  bool all_finite() const;
};

// Fan-in scaled uniform initialization, U(-1/sqrt(fan_in), 1/sqrt(fan_in)),
// driven by spec.seed.
ModelState init_state(const ModelSpec& spec);

// Indices of the hops a kind reads, e.g. r_sgc -> {K}.
std::vector<std::uint32_t> hops_used(const ModelSpec& spec);

// Eval-mode class probabilities (batch x class_count).
// Throws std::invalid_argument on shape mismatch, std::runtime_error on NaN.
Matrix forward(const ModelSpec& spec, const ModelState& state, const PropagationStack& stack,
               std::span<const NodeId> batch);

inline constexpr double kBceClamp = 1e-7;

struct BceResult {
  double loss = 0.0;  // mean over nodes of the per-node sum over classes
  Matrix grad;        // d loss / d pred
};

// Multi-label binary cross-entropy. The arguments of both logs are floored
// at kBceClamp; a prediction equal to its target contributes exactly 0.
BceResult bce_loss(const Matrix& pred, const Matrix& targets);

// 0/1 indicator matrix for the given label lists.
Matrix label_targets(const std::vector<std::vector<ClassId>>& labels, std::uint32_t class_count);

// Forward + backward on one batch. Accumulates gradients into state.params
// (callers zero them first) and returns the BCE loss. With `rng` non-null and
// a positive dropout rate, dropout is applied to the hidden layer.
double loss_and_gradients(const ModelSpec& spec, ModelState& state, const PropagationStack& stack,
                          std::span<const NodeId> batch, const Matrix& targets,
                          std::mt19937_64* rng = nullptr);

// Class c is predicted iff prob >= threshold.
std::vector<std::vector<ClassId>> predict_labels(const Matrix& probs, double threshold = 0.5);

}  // namespace hetprop
