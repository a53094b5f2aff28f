#include "hetprop/kg/annotation.hpp"

#include <limits>
#include <random>
#include <stdexcept>
#include <unordered_set>

namespace hetprop::kg {

HarvestResult harvest_labels(const std::vector<EntityRecord>& records,
                             const std::string& instance_of_property) {
  HarvestResult out;
  out.per_entity.resize(records.size());
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < records.size(); ++i) {
    for (const Claim& c : records[i].claims) {
      if (c.property != instance_of_property || !c.is_entity) continue;
      out.per_entity[i].push_back(c.value);
      if (seen.insert(c.value).second) out.parents.push_back(c.value);
    }
  }
  return out;
}

namespace {

template <typename T>
double sq_dist(std::span<const float> a, std::span<const T> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double diff = double(a[j]) - double(b[j]);
    s += diff * diff;
  }
  return s;
}

// Returns k x dim centroids, row-major, in double.
std::vector<double> seed_plus_plus(FeatureView x, std::uint32_t k, std::mt19937_64& rng) {
  const std::size_t n = x.rows();
  const std::size_t d = x.dim();
  std::vector<double> centroids(std::size_t(k) * d);
  std::vector<char> chosen(n, 0);
  std::vector<double> best(n, std::numeric_limits<double>::infinity());

  auto take = [&](std::size_t row, std::uint32_t slot) {
    chosen[row] = 1;
    auto src = x.row(row);
    std::copy(src.begin(), src.end(), centroids.begin() + std::ptrdiff_t(slot * d));
    for (std::size_t i = 0; i < n; ++i) best[i] = std::min(best[i], sq_dist(x.row(i), src));
  };

  take(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng), 0);
  for (std::uint32_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (!chosen[i]) total += best[i];
    std::size_t pick = n;
    if (total > 0.0) {
      double r = std::uniform_real_distribution<double>(0.0, total)(rng);
      for (std::size_t i = 0; i < n; ++i) {
        if (chosen[i] || best[i] <= 0.0) continue;
        pick = i;
        r -= best[i];
        if (r <= 0.0) break;
      }
    }
    if (pick == n) {
      // Every remaining point coincides with a centroid: pick uniformly among
      // the unchosen rows.
      std::vector<std::size_t> rest;
      for (std::size_t i = 0; i < n; ++i)
        if (!chosen[i]) rest.push_back(i);
      pick = rest[std::uniform_int_distribution<std::size_t>(0, rest.size() - 1)(rng)];
    }
    take(pick, c);
  }
  return centroids;
}

}  // namespace

KMeansResult cluster_labels(FeatureView x, std::uint32_t k, std::uint64_t seed, std::uint32_t max_iters) {
  if (k == 0) throw std::invalid_argument("cluster_labels: k must be >= 1");
  if (x.rows() < k) {
    throw std::invalid_argument("cluster_labels: " + std::to_string(x.rows()) + " rows < k = " +
                                std::to_string(k));
  }
  const std::size_t n = x.rows();
  const std::size_t d = x.dim();
  KMeansResult r;
  r.assignment.assign(n, 0);

  if (k == n) {
    r.centroids = FeatureMatrix(n, d, std::vector<float>(x.data().begin(), x.data().end()));
    for (std::size_t i = 0; i < n; ++i) r.assignment[i] = static_cast<ClassId>(i);
    r.objective.push_back(0.0);
    r.converged = true;
    return r;
  }

  std::mt19937_64 rng(seed);
  std::vector<double> centroids = seed_plus_plus(x, k, rng);
  auto centroid = [&](std::uint32_t c) { return std::span<const double>(centroids).subspan(c * d, d); };

  auto assign = [&](bool& changed) {
    double objective = 0.0;
    changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      ClassId best_c = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::uint32_t c = 0; c < k; ++c) {
        const double dist = sq_dist(x.row(i), centroid(c));
        if (dist < best_d) {
          best_d = dist;
          best_c = c;
        }
      }
      if (best_c != r.assignment[i]) changed = true;
      r.assignment[i] = best_c;
      objective += best_d;
    }
    return objective;
  };

  bool changed = false;
  r.objective.push_back(assign(changed));
  for (r.iterations = 0; r.iterations < max_iters;) {
    std::vector<double> sums(std::size_t(k) * d, 0.0);
    std::vector<std::uint64_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const ClassId c = r.assignment[i];
      ++counts[c];
      auto row = x.row(i);
      for (std::size_t j = 0; j < d; ++j) sums[c * d + j] += row[j];
    }
    for (std::uint32_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      for (std::size_t j = 0; j < d; ++j) centroids[c * d + j] = sums[c * d + j] / double(counts[c]);
    }
    ++r.iterations;
    r.objective.push_back(assign(changed));
    if (!changed) {
      r.converged = true;
      break;
    }
  }
  r.centroids = FeatureMatrix(k, d);
  for (std::size_t i = 0; i < centroids.size(); ++i) r.centroids.data()[i] = static_cast<float>(centroids[i]);
  return r;
}

AnnotationMap make_annotation_map(const std::vector<std::string>& parents,
                                  const std::vector<ClassId>& assignment) {
  if (parents.size() != assignment.size()) {
    throw std::invalid_argument("make_annotation_map: parents/assignment size mismatch");
  }
  AnnotationMap map;
  for (std::size_t i = 0; i < parents.size(); ++i) map.emplace(parents[i], assignment[i]);
  return map;
}

LabelMatrix annotate(const std::vector<std::vector<std::string>>& per_entity, const AnnotationMap& map,
                     std::uint32_t class_count) {
  std::vector<std::vector<ClassId>> lists(per_entity.size());
  for (std::size_t i = 0; i < per_entity.size(); ++i) {
    for (const std::string& parent : per_entity[i]) {
      auto it = map.find(parent);
      if (it == map.end()) {
        throw std::out_of_range("annotate: parent '" + parent + "' has no class (harvest/cluster mismatch)");
      }
      lists[i].push_back(it->second);
    }
  }
  return LabelMatrix::from_lists(std::move(lists), class_count);
}

}  // namespace hetprop::kg
