#include "hetprop/kg/text.hpp"

#include <cmath>
#include <stdexcept>

namespace hetprop::kg {

namespace {

const std::string& name_or_id(const NameTable& names, const std::string& id) {
  auto it = names.find(id);
  return it == names.end() ? id : it->second;
}

bool is_token_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

}  // namespace

std::string reorganize_text(const EntityRecord& e, const NameTable& names) {
  std::string out;
  out.reserve(e.label.size() + e.description.size() + 32 * e.claims.size());
  out += e.label;
  out += " be ";
  out += e.description;
  out += '.';
  for (const Claim& c : e.claims) {
    out += ' ';
    out += name_or_id(names, c.property);
    out += ' ';
    out += c.is_entity ? name_or_id(names, c.value) : c.value;
    out += '.';
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_token_byte(c)) {
      current += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : ch;
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::uint64_t splitmix64(std::uint64_t x) {
  std::uint64_t z = x + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (char ch : bytes) {
    h ^= static_cast<unsigned char>(ch);
    h *= kFnvPrime;
  }
  return h;
}

std::vector<float> embed_text(std::string_view text, std::size_t dim, std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("embed_text: dim must be >= 1");
  const std::uint64_t basis = kFnvOffset ^ splitmix64(seed);
  std::vector<double> acc(dim, 0.0);
  for (const std::string& token : tokenize(text)) {
    const std::uint64_t h = fnv1a64(token, basis);
    const double sign = (splitmix64(h) >> 63) ? -1.0 : 1.0;
    acc[h % dim] += sign;
  }
  double sq = 0.0;
  for (double x : acc) sq += x * x;
  std::vector<float> out(dim, 0.0f);
  if (sq > 0.0) {
    const double inv = 1.0 / std::sqrt(sq);
    for (std::size_t j = 0; j < dim; ++j) out[j] = static_cast<float>(acc[j] * inv);
  }
  return out;
}

}  // namespace hetprop::kg
