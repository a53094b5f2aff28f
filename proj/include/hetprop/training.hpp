#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "hetprop/label_matrix.hpp"
#include "hetprop/metrics.hpp"
#include "hetprop/models.hpp"

namespace hetprop {

struct TrainConfig {
  std::uint32_t epochs = 300;
  double learning_rate = 0.01;
  std::size_t batch_size = 1024;
  std::uint64_t seed = 0;
  double threshold = 0.5;
  // Adam
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const;
};

struct NodeSplit {
  std::vector<NodeId> train;
  std::vector<NodeId> val;
  std::vector<NodeId> test;
};

struct EpochRecord {
  std::uint32_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  EvalReport val;
};

struct TrainResult {
  ModelState state;  // parameters of the best validation epoch
  std::vector<EpochRecord> log;
  std::uint32_t best_epoch = 0;
};

class TrainingDiverged : public std::runtime_error {
 public:
  TrainingDiverged(std::uint32_t epoch, double last_finite_loss);
  std::uint32_t epoch() const { return epoch_; }
  double last_finite_loss() const { return last_finite_loss_; }

 private:
  std::uint32_t epoch_;
  double last_finite_loss_;
};

// One Adam update over every parameter using the accumulated gradients.
void adam_step(ModelState& state, const TrainConfig& cfg);

// Mini-batch training on split.train. Validation micro-F1 is computed after
// every epoch and the best-scoring parameters are returned (earliest epoch on
// ties). Throws TrainingDiverged on a non-finite loss.
TrainResult train(const ModelSpec& spec, const TrainConfig& cfg, const PropagationStack& stack,
                  const LabelMatrix& labels, const NodeSplit& split);

// Predicts and scores the given nodes.
EvalReport evaluate_model(const ModelSpec& spec, const ModelState& state, const PropagationStack& stack,
                          const LabelMatrix& labels, std::span<const NodeId> nodes,
                          double threshold = 0.5);

std::string to_json_line(const EpochRecord& r);

// Checkpoint directory: checkpoint.json (spec, epoch, metrics, tensor list)
// plus one UKGF file per parameter tensor. Weights are stored as float32.
void save_checkpoint(const std::filesystem::path& dir, const ModelSpec& spec, const ModelState& state,
                     const std::string& metrics_json);
struct Checkpoint {
  ModelSpec spec;
  ModelState state;
};
Checkpoint load_checkpoint(const std::filesystem::path& dir);

// Rounds every parameter to float32, matching what a checkpoint stores.
void round_to_float(ModelState& state);

}  // namespace hetprop
