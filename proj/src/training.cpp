#include "hetprop/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "hetprop/io.hpp"

namespace hetprop {

namespace fs = std::filesystem;

void TrainConfig::validate() const {
  if (epochs < 1) throw std::invalid_argument("TrainConfig: epochs must be >= 1");
  if (!(learning_rate >= 0.0)) throw std::invalid_argument("TrainConfig: learning_rate must be >= 0");
  if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
  if (!(threshold > 0.0 && threshold < 1.0)) throw std::invalid_argument("TrainConfig: threshold must be in (0,1)");
}

TrainingDiverged::TrainingDiverged(std::uint32_t epoch, double last_finite_loss)
    : std::runtime_error("training diverged at epoch " + std::to_string(epoch) +
                         " (last finite loss " + std::to_string(last_finite_loss) + ")"),
      epoch_(epoch),
      last_finite_loss_(last_finite_loss) {}

void adam_step(ModelState& state, const TrainConfig& cfg) {
  ++state.step;
  const double t = double(state.step);
  const double c1 = 1.0 - std::pow(cfg.beta1, t);
  const double c2 = 1.0 - std::pow(cfg.beta2, t);
  for (auto& p : state.params) {
    p.adam_m = cfg.beta1 * p.adam_m + (1.0 - cfg.beta1) * p.grad;
    p.adam_v = cfg.beta2 * p.adam_v + (1.0 - cfg.beta2) * p.grad.cwiseAbs2();
    const double lr = cfg.learning_rate;
    const double eps = cfg.epsilon;
    p.value.array() -= lr * (p.adam_m.array() / c1) / ((p.adam_v.array() / c2).sqrt() + eps);
  }
}

EvalReport evaluate_model(const ModelSpec& spec, const ModelState& state, const PropagationStack& stack,
                          const LabelMatrix& labels, std::span<const NodeId> nodes, double threshold) {
  constexpr std::size_t kEvalBatch = 4096;
  std::vector<std::vector<ClassId>> predicted;
  predicted.reserve(nodes.size());
  for (std::size_t first = 0; first < nodes.size(); first += kEvalBatch) {
    auto batch = nodes.subspan(first, std::min(kEvalBatch, nodes.size() - first));
    for (auto& p : predict_labels(forward(spec, state, stack, batch), threshold)) {
      predicted.push_back(std::move(p));
    }
  }
  return evaluate(predicted, labels.slice(nodes));
}

TrainResult train(const ModelSpec& spec, const TrainConfig& cfg, const PropagationStack& stack,
                  const LabelMatrix& labels, const NodeSplit& split) {
  spec.validate();
  cfg.validate();
  if (labels.class_count() != spec.class_count) {
    throw std::invalid_argument("train: label class_count " + std::to_string(labels.class_count()) +
                                " != model class_count " + std::to_string(spec.class_count));
  }
  if (split.train.empty()) throw std::invalid_argument("train: empty training split");

  TrainResult result;
  result.state = init_state(spec);
  ModelState& state = result.state;
  ModelState best = state;
  double best_f1 = -1.0;
  double last_finite = std::numeric_limits<double>::quiet_NaN();

  std::mt19937_64 rng(cfg.seed);
  std::vector<NodeId> order = split.train;
  for (std::uint32_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double weighted_loss = 0.0;
    for (std::size_t first = 0; first < order.size(); first += cfg.batch_size) {
      std::span<const NodeId> batch(order.data() + first, std::min(cfg.batch_size, order.size() - first));
      const Matrix targets = label_targets(labels.slice(batch), spec.class_count);
      state.zero_grad();
      double loss = 0.0;
      try {
        loss = loss_and_gradients(spec, state, stack, batch, targets, &rng);
      } catch (const std::runtime_error&) {
        throw TrainingDiverged(epoch, last_finite);
      }
      if (!std::isfinite(loss)) throw TrainingDiverged(epoch, last_finite);
      adam_step(state, cfg);
      if (!state.all_finite()) throw TrainingDiverged(epoch, last_finite);
      last_finite = loss;
      weighted_loss += loss * double(batch.size());
    }
    state.epoch = epoch;

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = weighted_loss / double(order.size());
    const auto& monitor = split.val.empty() ? split.train : split.val;
    try {
      rec.val = evaluate_model(spec, state, stack, labels, monitor, cfg.threshold);
    } catch (const std::runtime_error&) {
      throw TrainingDiverged(epoch, last_finite);
    }
    if (rec.val.f1 > best_f1) {
      best_f1 = rec.val.f1;
      best = state;
      result.best_epoch = epoch;
    }
    result.log.push_back(rec);
  }
  result.state = std::move(best);
  return result;
}

std::string to_json_line(const EpochRecord& r) {
  nlohmann::ordered_json j;
  j["epoch"] = r.epoch;
  j["train_loss"] = r.train_loss;
  j["val"] = nlohmann::json::parse(to_json(r.val));
  return j.dump();
}

void round_to_float(ModelState& state) {
  for (auto& p : state.params) {
    p.value = p.value.unaryExpr([](double x) { return double(float(x)); });
  }
}

void save_checkpoint(const fs::path& dir, const ModelSpec& spec, const ModelState& state,
                     const std::string& metrics_json) {
  fs::create_directories(dir);
  nlohmann::ordered_json j;
  j["spec"] = {{"kind", to_string(spec.kind)},
               {"input_dim", spec.input_dim},
               {"hidden_dim", spec.hidden_dim},
               {"class_count", spec.class_count},
               {"num_hops", spec.num_hops},
               {"dropout_rate", spec.dropout_rate},
               {"seed", spec.seed}};
  j["epoch"] = state.epoch;
  j["metrics"] = metrics_json.empty() ? nlohmann::json::object() : nlohmann::json::parse(metrics_json);
  auto tensors = nlohmann::ordered_json::array();
  for (const auto& p : state.params) {
    const std::string file = "param_" + p.name + ".ukgf";
    std::vector<float> data(static_cast<std::size_t>(p.value.size()));
    for (Eigen::Index i = 0; i < p.value.size(); ++i) data[std::size_t(i)] = static_cast<float>(p.value.data()[i]);
    FeatureMatrix m(static_cast<std::size_t>(p.value.rows()), static_cast<std::size_t>(p.value.cols()), std::move(data));
    fs::path tmp = dir / (file + ".tmp");
    write_features(tmp, m);
    fs::rename(tmp, dir / file);
    tensors.push_back({{"name", p.name}, {"file", file}, {"rows", p.value.rows()}, {"cols", p.value.cols()}});
  }
  j["tensors"] = tensors;
  write_text_atomic(dir / "checkpoint.json", j.dump(2) + "\n");
}

Checkpoint load_checkpoint(const fs::path& dir) {
  std::ifstream in(dir / "checkpoint.json");
  if (!in) throw std::runtime_error("load_checkpoint: missing " + (dir / "checkpoint.json").string());
  auto j = nlohmann::json::parse(in);
  Checkpoint ck;
  const auto& s = j.at("spec");
  ck.spec.kind = parse_model_kind(s.at("kind").get<std::string>());
  ck.spec.input_dim = s.at("input_dim").get<std::size_t>();
  ck.spec.hidden_dim = s.at("hidden_dim").get<std::size_t>();
  ck.spec.class_count = s.at("class_count").get<std::uint32_t>();
  ck.spec.num_hops = s.at("num_hops").get<std::uint32_t>();
  ck.spec.dropout_rate = s.at("dropout_rate").get<double>();
  ck.spec.seed = s.at("seed").get<std::uint64_t>();
  ck.state = init_state(ck.spec);
  ck.state.epoch = j.at("epoch").get<std::uint64_t>();
  for (const auto& t : j.at("tensors")) {
    Parameter& p = ck.state.at(t.at("name").get<std::string>());
    FeatureMatrix m = read_features(dir / t.at("file").get<std::string>());
    if (Eigen::Index(m.rows()) != p.value.rows() || Eigen::Index(m.dim()) != p.value.cols()) {
      throw std::runtime_error("load_checkpoint: shape mismatch for " + p.name);
    }
    for (Eigen::Index i = 0; i < p.value.size(); ++i) p.value.data()[i] = m.data()[std::size_t(i)];
  }
  return ck;
}

}  // namespace hetprop
