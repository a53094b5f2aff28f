#pragma once

#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace hetprop::kg {

struct Claim {
  std::string property;  // e.g. "P361"
  std::string value;     // entity id when is_entity, rendered literal otherwise
  bool is_entity = false;

  friend bool operator==(const Claim&, const Claim&) = default;
};

struct EntityRecord {
  std::string id;  // e.g. "Q31"
  std::string label;
  std::string description;
  std::vector<Claim> claims;  // document order, screened claims removed

  friend bool operator==(const EntityRecord&, const EntityRecord&) = default;
};

// Claims to discard. An entry matches either a property id ("P214") or a
// snak datatype ("external-id").
class ScreenSet {
 public:
  ScreenSet() = default;
  ScreenSet(std::initializer_list<std::string> entries) : entries_(entries) {}

  // The minimal built-in screen: external identifiers.
  static ScreenSet defaults();
  // One entry per line; '#' starts a comment; blank lines ignored.
  static ScreenSet parse(std::istream& in);

  void add(std::string entry) { entries_.insert(std::move(entry)); }
  bool screens(std::string_view property, std::string_view datatype) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::set<std::string, std::less<>> entries_;
};

struct DumpStats {
  std::uint64_t lines = 0;          // non-blank, non-bracket lines
  std::uint64_t emitted = 0;
  std::uint64_t malformed = 0;      // JSON errors or non-object lines
  std::uint64_t incomplete = 0;     // missing English label/description or claims
  std::uint64_t screened_claims = 0;
  std::uint64_t valueless_claims = 0;  // somevalue / novalue snaks
};

struct ParsedLine {
  std::optional<EntityRecord> record;  // empty when the entity is incomplete
  bool is_entity_line = false;         // false for "[", "]" and blank lines
  std::string id;                      // set whenever the document has them,
  std::string label;                   // complete or not
  std::uint64_t screened_claims = 0;
  std::uint64_t valueless_claims = 0;
};

// Parses one dump line (trailing comma tolerated). Throws std::runtime_error
// (or a nlohmann::json exception) for malformed content.
ParsedLine parse_entity_line(std::string_view line, const ScreenSet& screen);

// Streams a Wikidata-style JSON dump (one entity per line, optional array
// wrapper). Complete entities are handed to `sink` in input order; malformed
// lines are counted and skipped. Holds at most one document in memory.
DumpStats parse_dump(std::istream& in, const ScreenSet& screen,
                     const std::function<void(EntityRecord&&)>& sink);

// Additionally reports the English label of every entity document, complete
// or not, so callers can resolve claim targets and property names.
DumpStats parse_dump(std::istream& in, const ScreenSet& screen,
                     const std::function<void(EntityRecord&&)>& sink,
                     const std::function<void(const std::string& id, const std::string& label)>& on_label);

std::string to_json(const EntityRecord& r);
EntityRecord entity_from_json(std::string_view line);

}  // namespace hetprop::kg
