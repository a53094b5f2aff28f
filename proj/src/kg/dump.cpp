#include "hetprop/kg/dump.hpp"

#include <iostream>
#include <stdexcept>

#include <json.hpp>

namespace hetprop::kg {

using ordered_json = nlohmann::ordered_json;

ScreenSet ScreenSet::defaults() { return ScreenSet{"external-id"}; }

ScreenSet ScreenSet::parse(std::istream& in) {
  ScreenSet s;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    s.add(line.substr(first, last - first + 1));
  }
  return s;
}

bool ScreenSet::screens(std::string_view property, std::string_view datatype) const {
  return entries_.contains(property) || (!datatype.empty() && entries_.contains(datatype));
}

namespace {

std::string_view trim_line(std::string_view line) {
  while (!line.empty() && (line.back() == '\n' || line.back() == '\r' || line.back() == ' ' ||
                           line.back() == '\t')) {
    line.remove_suffix(1);
  }
  while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
  if (!line.empty() && line.back() == ',') line.remove_suffix(1);
  return line;
}

// English value of a labels/descriptions map, or empty.
std::string english(const ordered_json& doc, const char* field) {
  auto it = doc.find(field);
  if (it == doc.end() || !it->is_object()) return {};
  auto en = it->find("en");
  if (en == it->end() || !en->is_object()) return {};
  auto value = en->find("value");
  if (value == en->end() || !value->is_string()) return {};
  return value->get<std::string>();
}

std::string strip_plus(std::string s) {
  if (!s.empty() && s.front() == '+') s.erase(0, 1);
  return s;
}

// Renders a mainsnak datavalue. Sets is_entity for entity references.
std::string render_value(const ordered_json& datavalue, bool& is_entity) {
  is_entity = false;
  const std::string type = datavalue.value("type", "");
  const ordered_json& v = datavalue.at("value");
  if (type == "wikibase-entityid") {
    is_entity = true;
    if (v.contains("id")) return v.at("id").get<std::string>();
    const std::string kind = v.value("entity-type", "item");
    const char prefix = kind == "property" ? 'P' : kind == "lexeme" ? 'L' : 'Q';
    return prefix + std::to_string(v.at("numeric-id").get<std::uint64_t>());
  }
  if (type == "string") return v.get<std::string>();
  if (type == "monolingualtext") return v.at("text").get<std::string>();
  if (type == "quantity") return strip_plus(v.at("amount").get<std::string>());
  if (type == "time") return strip_plus(v.at("time").get<std::string>());
  if (type == "globecoordinate") {
    return v.at("latitude").dump() + "," + v.at("longitude").dump();
  }
  return v.is_string() ? v.get<std::string>() : v.dump();
}

}  // namespace

ParsedLine parse_entity_line(std::string_view raw, const ScreenSet& screen) {
  ParsedLine out;
  const std::string_view line = trim_line(raw);
  if (line.empty() || line == "[" || line == "]") return out;
  out.is_entity_line = true;

  const ordered_json doc = ordered_json::parse(line);
  if (!doc.is_object()) throw std::runtime_error("dump line is not a JSON object");

  EntityRecord rec;
  if (auto id = doc.find("id"); id != doc.end() && id->is_string()) rec.id = id->get<std::string>();
  rec.label = english(doc, "labels");
  out.id = rec.id;
  out.label = rec.label;
  rec.description = english(doc, "descriptions");
  auto claims = doc.find("claims");
  const bool has_claims = claims != doc.end() && claims->is_object() && !claims->empty();
  if (rec.id.empty() || rec.label.empty() || rec.description.empty() || !has_claims) return out;

  for (const auto& [property, statements] : claims->items()) {
    if (!statements.is_array()) continue;
    for (const auto& statement : statements) {
      const auto& snak = statement.at("mainsnak");
      const std::string datatype = snak.value("datatype", "");
      if (screen.screens(property, datatype)) {
        ++out.screened_claims;
        continue;
      }
      if (snak.value("snaktype", "value") != "value" || !snak.contains("datavalue")) {
        ++out.valueless_claims;
        continue;
      }
      Claim c;
      c.property = property;
      c.value = render_value(snak.at("datavalue"), c.is_entity);
      rec.claims.push_back(std::move(c));
    }
  }
  out.record = std::move(rec);
  return out;
}

DumpStats parse_dump(std::istream& in, const ScreenSet& screen,
                     const std::function<void(EntityRecord&&)>& sink) {
  return parse_dump(in, screen, sink, nullptr);
}

DumpStats parse_dump(std::istream& in, const ScreenSet& screen,
                     const std::function<void(EntityRecord&&)>& sink,
                     const std::function<void(const std::string&, const std::string&)>& on_label) {
  DumpStats stats;
  std::string line;
  std::uint64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    ParsedLine parsed;
    try {
      parsed = parse_entity_line(line, screen);
    } catch (const std::exception& e) {
      ++stats.lines;
      ++stats.malformed;
      std::cerr << "warning: dump line " << line_no << " skipped: " << e.what() << "\n";
      continue;
    }
    if (!parsed.is_entity_line) continue;
    ++stats.lines;
    // Labels of incomplete documents are still useful for naming targets.
    if (on_label && !parsed.id.empty() && !parsed.label.empty()) on_label(parsed.id, parsed.label);
    if (!parsed.record) {
      ++stats.incomplete;
      continue;
    }
    stats.screened_claims += parsed.screened_claims;
    stats.valueless_claims += parsed.valueless_claims;
    ++stats.emitted;
    sink(std::move(*parsed.record));
  }
  return stats;
}

std::string to_json(const EntityRecord& r) {
  ordered_json j;
  j["id"] = r.id;
  j["label"] = r.label;
  j["description"] = r.description;
  auto claims = ordered_json::array();
  for (const auto& c : r.claims) {
    claims.push_back({{"property", c.property}, {"value", c.value}, {"entity", c.is_entity}});
  }
  j["claims"] = std::move(claims);
  return j.dump();
}

EntityRecord entity_from_json(std::string_view line) {
  const auto j = ordered_json::parse(line);
  EntityRecord r;
  r.id = j.at("id").get<std::string>();
  r.label = j.at("label").get<std::string>();
  r.description = j.at("description").get<std::string>();
  for (const auto& c : j.at("claims")) {
    r.claims.push_back({c.at("property").get<std::string>(), c.at("value").get<std::string>(),
                        c.at("entity").get<bool>()});
  }
  return r;
}

}  // namespace hetprop::kg
