#include "hetprop/kg/split.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "hetprop/io.hpp"

namespace hetprop::kg {

NodeSplit split_nodes(std::vector<NodeId> nodes, std::array<double, 3> ratios, std::uint64_t seed) {
  for (double r : ratios) {
    if (r < 0.0) throw std::invalid_argument("split_nodes: negative ratio");
  }
  if (std::abs(ratios[0] + ratios[1] + ratios[2] - 1.0) > 1e-9) {
    throw std::invalid_argument("split_nodes: ratios must sum to 1");
  }
  std::mt19937_64 rng(seed);
  std::shuffle(nodes.begin(), nodes.end(), rng);
  const double n = double(nodes.size());
  const auto n_train = std::min<std::size_t>(nodes.size(), static_cast<std::size_t>(std::llround(ratios[0] * n)));
  const auto n_val =
      std::min<std::size_t>(nodes.size() - n_train, static_cast<std::size_t>(std::llround(ratios[1] * n)));
  NodeSplit s;
  s.train.assign(nodes.begin(), nodes.begin() + std::ptrdiff_t(n_train));
  s.val.assign(nodes.begin() + std::ptrdiff_t(n_train), nodes.begin() + std::ptrdiff_t(n_train + n_val));
  s.test.assign(nodes.begin() + std::ptrdiff_t(n_train + n_val), nodes.end());
  return s;
}

void write_split_tsv(const std::filesystem::path& path, const NodeSplit& split) {
  std::ostringstream out;
  for (NodeId v : split.train) out << v << "\ttrain\n";
  for (NodeId v : split.val) out << v << "\tval\n";
  for (NodeId v : split.test) out << v << "\ttest\n";
  write_text_atomic(path, out.str());
}

NodeSplit read_split_tsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_split_tsv: cannot open " + path.string());
  NodeSplit s;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto fields = split_fields(line, '\t');
    if (fields.size() != 2) throw std::runtime_error("read_split_tsv: bad line '" + line + "'");
    const NodeId v = std::stoull(fields[0]);
    if (fields[1] == "train") s.train.push_back(v);
    else if (fields[1] == "val") s.val.push_back(v);
    else if (fields[1] == "test") s.test.push_back(v);
    else throw std::runtime_error("read_split_tsv: unknown part '" + fields[1] + "'");
  }
  return s;
}

}  // namespace hetprop::kg
