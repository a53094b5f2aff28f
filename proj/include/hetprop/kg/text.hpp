#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hetprop/kg/dump.hpp"

namespace hetprop::kg {

// id -> English label, for entities and properties alike.
using NameTable = std::unordered_map<std::string, std::string>;

// "{label} be {description}." followed by " {property label} {target}." for
// each claim. Entity targets and properties are looked up in `names`; unknown
// ids are rendered raw. Literal targets are rendered verbatim.
std::string reorganize_text(const EntityRecord& e, const NameTable& names);

// Lowercased tokens; separators are ASCII characters other than letters and
// digits. Bytes >= 0x80 are kept as token characters.
std::vector<std::string> tokenize(std::string_view text);

// Signed feature hashing: token t adds sign(t) to bucket(t), then the vector
// is L2-normalized (a zero vector stays zero).
//
//   h(t)      = FNV-1a-64 of t's bytes, offset basis 0xcbf29ce484222325 ^ splitmix64(seed)
//   bucket(t) = h(t) mod dim
//   sign(t)   = -1 if the top bit of splitmix64(h(t)) is set, else +1
std::vector<float> embed_text(std::string_view text, std::size_t dim, std::uint64_t seed);

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis);

}  // namespace hetprop::kg
