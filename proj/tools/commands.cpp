#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_map>

#include "cli_internal.hpp"
#include "hetprop/apm.hpp"
#include "hetprop/io.hpp"
#include "hetprop/kg/annotation.hpp"
#include "hetprop/kg/dump.hpp"
#include "hetprop/kg/sampling.hpp"
#include "hetprop/kg/split.hpp"
#include "hetprop/kg/text.hpp"
#include "hetprop/metrics.hpp"
#include "hetprop/models.hpp"
#include "hetprop/training.hpp"

namespace hetprop::cli {

namespace {

void require(const fs::path& p, const char* flag) {
  if (p.empty()) throw UsageError(std::string("missing required ") + flag);
}

void require_file(const fs::path& p) {
  if (!fs::is_regular_file(p)) throw std::runtime_error("cannot read " + p.string());
}

// Tabs and line breaks would break the TSV outputs.
std::string one_line(std::string s) {
  std::replace_if(s.begin(), s.end(), [](char c) { return c == '\t' || c == '\n' || c == '\r'; }, ' ');
  return s;
}

ordered_json status(const std::string& stage, bool skipped) {
  return {{"stage", stage}, {"status", skipped ? "up to date" : "done"}};
}

kg::NameTable read_names(const fs::path& path) {
  require_file(path);
  std::ifstream in(path);
  kg::NameTable names;
  std::string line;
  while (std::getline(in, line)) {
    auto fields = split_fields(line, '\t');
    if (fields.size() == 2) names.emplace(fields[0], fields[1]);
  }
  return names;
}

std::vector<kg::EntityRecord> read_entities(const fs::path& path) {
  require_file(path);
  std::ifstream in(path);
  std::vector<kg::EntityRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(kg::entity_from_json(line));
  }
  return out;
}

std::vector<std::string> read_relation_ids(const fs::path& path) {
  require_file(path);
  std::ifstream in(path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    auto fields = split_fields(line, '\t');
    if (fields.size() >= 2) out.push_back(fields[1]);
  }
  return out;
}

struct GraphInputs {
  HeteroGraph graph;
  FeatureMatrix features;
  FeatureMatrix relations;
};

// A graph directory: n comes from features.ukgf, M from relations.ukgf.
GraphInputs load_graph_dir(const fs::path& dir) {
  for (const char* f : {"edges.tsv", "features.ukgf", "relations.ukgf"}) require_file(dir / f);
  GraphInputs in;
  in.features = read_features(dir / "features.ukgf");
  in.relations = read_features(dir / "relations.ukgf");
  if (in.relations.rows() > 0 && in.relations.dim() != in.features.dim()) {
    throw std::runtime_error("dimension mismatch: features.ukgf has dim " + std::to_string(in.features.dim()) +
                             ", relations.ukgf has dim " + std::to_string(in.relations.dim()));
  }
  in.graph = load_graph(dir / "edges.tsv", in.features.rows(), static_cast<std::uint32_t>(in.relations.rows()));
  return in;
}

ordered_json stats_of(const kg::DumpStats& s) {
  return {{"lines", s.lines},
          {"emitted", s.emitted},
          {"malformed", s.malformed},
          {"incomplete", s.incomplete},
          {"screened_claims", s.screened_claims},
          {"valueless_claims", s.valueless_claims}};
}

ApmConfig apm_config(const RunConfig& cfg) {
  ApmConfig a;
  a.num_hops = cfg.hops;
  a.isolated_policy = parse_isolated_policy(cfg.isolated);
  a.type_combine = parse_type_combine(cfg.combine);
  a.add_reverse = cfg.reverse;
  a.workers = cfg.threads;
  return a;
}

std::uint32_t stack_hops(const fs::path& stack_dir) {
  const fs::path manifest = manifest_path(stack_dir, "propagate");
  if (fs::exists(manifest)) return read_json_file(manifest).at("params").at("hops").get<std::uint32_t>();
  std::uint32_t k = 0;
  while (fs::exists(stack_dir / hop_file_name(k + 1))) ++k;
  return k;
}

PropagationStack load_stack(const fs::path& dir) {
  require_file(dir / hop_file_name(0));
  PropagationStack stack;
  const std::uint32_t hops = stack_hops(dir);
  for (std::uint32_t k = 0; k <= hops; ++k) {
    require_file(dir / hop_file_name(k));
    stack.push_back(MappedFeatures(dir / hop_file_name(k)));
  }
  return stack;
}

const std::vector<NodeId>& split_part(const NodeSplit& s, const std::string& part) {
  if (part == "train") return s.train;
  if (part == "val") return s.val;
  if (part == "test") return s.test;
  throw UsageError("unknown split part '" + part + "' (expected train, val or test)");
}

RunConfig child(const RunConfig& cfg) {
  RunConfig c = cfg;
  c.graph.clear();
  c.stack.clear();
  c.labels.clear();
  c.split.clear();
  c.checkpoint.clear();
  c.out.clear();
  return c;
}

}  // namespace

ordered_json cmd_build(const RunConfig& cfg) {
  require(cfg.dump, "--dump");
  require(cfg.out, "--out");
  require_file(cfg.dump);
  kg::ScreenSet screen = kg::ScreenSet::defaults();
  if (!cfg.screen.empty()) {
    require_file(cfg.screen);
    std::ifstream s(cfg.screen);
    screen = kg::ScreenSet::parse(s);
    screen.add("external-id");
  }

  StageManifest m{"build"};
  m.add_input("dump", cfg.dump);
  if (!cfg.screen.empty()) m.add_input("screen", cfg.screen);

  DirLock lock(cfg.out);
  const bool skip = !cfg.force && up_to_date(cfg.out, m);
  if (!skip) {
    std::ifstream in(cfg.dump, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + cfg.dump.string());
    Staging st(cfg.out, "build");

    std::vector<kg::EntityRecord> entities;
    kg::NameTable names;
    std::uint64_t property_documents = 0;
    const kg::DumpStats ds = kg::parse_dump(
        in, screen,
        [&](kg::EntityRecord&& r) {
          // Property documents only name relations; they are not graph nodes.
          if (!r.id.empty() && r.id.front() == 'P') {
            ++property_documents;
          } else {
            entities.push_back(std::move(r));
          }
        },
        [&](const std::string& id, const std::string& label) { names.emplace(id, label); });

    std::unordered_map<std::string, NodeId> node_of;
    for (NodeId i = 0; i < entities.size(); ++i) node_of.emplace(entities[i].id, i);
    std::vector<std::string> properties;
    std::unordered_map<std::string, TypeId> type_of;
    std::vector<EdgeRecord> edges;
    std::uint64_t literal_claims = 0, dangling_claims = 0;
    for (NodeId i = 0; i < entities.size(); ++i) {
      for (const kg::Claim& c : entities[i].claims) {
        if (!c.is_entity) {
          ++literal_claims;
          continue;
        }
        auto target = node_of.find(c.value);
        if (target == node_of.end()) {
          ++dangling_claims;
          continue;
        }
        auto [it, fresh] = type_of.emplace(c.property, static_cast<TypeId>(properties.size()));
        if (fresh) properties.push_back(c.property);
        edges.push_back({i, target->second, {it->second}});
      }
    }
    const HeteroGraph g = build_graph(edges, entities.size(), static_cast<std::uint32_t>(properties.size()));

    {
      std::ofstream out(st.path("entities.jsonl"), std::ios::binary);
      for (const auto& e : entities) out << kg::to_json(e) << '\n';
      if (!out) throw std::runtime_error("write failed: entities.jsonl");
    }
    std::ostringstream nodes, names_out, rels;
    for (NodeId i = 0; i < entities.size(); ++i) {
      nodes << i << '\t' << entities[i].id << '\t' << one_line(entities[i].label) << '\n';
    }
    std::vector<std::pair<std::string, std::string>> sorted_names(names.begin(), names.end());
    std::sort(sorted_names.begin(), sorted_names.end());
    for (const auto& [id, label] : sorted_names) names_out << id << '\t' << one_line(label) << '\n';
    for (TypeId t = 0; t < properties.size(); ++t) {
      auto name = names.find(properties[t]);
      rels << t << '\t' << properties[t] << '\t' << one_line(name == names.end() ? properties[t] : name->second)
           << '\n';
    }
    write_text_atomic(st.path("nodes.tsv"), nodes.str());
    write_text_atomic(st.path("names.tsv"), names_out.str());
    write_text_atomic(st.path("relations.tsv"), rels.str());
    write_edges_tsv(st.path("edges.tsv"), g);

    ordered_json stats = {{"nodes", g.node_count()},
                          {"edges", g.edge_count()},
                          {"edge_types", g.edge_type_count()},
                          {"entity_claims", edges.size()}};
    const ordered_json dump_stats = stats_of(ds);
    for (const auto& [k, v] : dump_stats.items()) stats[k] = v;
    stats["property_documents"] = property_documents;
    stats["literal_claims"] = literal_claims;
    stats["dangling_claims"] = dangling_claims;
    write_text_atomic(st.path("stats.json"), stats.dump(2) + "\n");
    st.commit();

    for (const char* f : {"entities.jsonl", "nodes.tsv", "names.tsv", "relations.tsv", "edges.tsv", "stats.json"}) {
      m.add_output(cfg.out, f);
    }
    write_manifest(cfg.out, m);
  }
  ordered_json result = status("build", skip);
  result["stats"] = read_json_file(cfg.out / "stats.json");
  return result;
}

ordered_json cmd_embed(const RunConfig& cfg) {
  require(cfg.graph, "--graph");
  if (cfg.dim == 0) throw UsageError("--dim must be positive");
  const fs::path& g = cfg.graph;
  StageManifest m{"embed"};
  m.params = {{"dim", cfg.dim}, {"seed", derive_seed(cfg.seed, SeedUse::embed)}};
  for (const char* f : {"entities.jsonl", "names.tsv", "relations.tsv"}) {
    require_file(g / f);
    m.add_input(f, g / f);
  }

  DirLock lock(g);
  const bool skip = !cfg.force && up_to_date(g, m);
  if (!skip) {
    Staging st(g, "embed");
    const kg::NameTable names = read_names(g / "names.tsv");
    const auto entities = read_entities(g / "entities.jsonl");
    const auto relation_ids = read_relation_ids(g / "relations.tsv");
    const std::uint64_t seed = derive_seed(cfg.seed, SeedUse::embed);

    std::ostringstream texts;
    FeatureMatrix features(entities.size(), cfg.dim);
    for (std::size_t i = 0; i < entities.size(); ++i) {
      const std::string text = kg::reorganize_text(entities[i], names);
      texts << i << '\t' << one_line(text) << '\n';
      const auto v = kg::embed_text(text, cfg.dim, seed);
      std::copy(v.begin(), v.end(), features.row(i).begin());
    }
    FeatureMatrix relations(relation_ids.size(), cfg.dim);
    for (std::size_t t = 0; t < relation_ids.size(); ++t) {
      auto name = names.find(relation_ids[t]);
      const auto v = kg::embed_text(name == names.end() ? relation_ids[t] : name->second, cfg.dim, seed);
      std::copy(v.begin(), v.end(), relations.row(t).begin());
    }
    write_text_atomic(st.path("texts.tsv"), texts.str());
    write_features(st.path("features.ukgf"), features);
    write_features(st.path("relations.ukgf"), relations);
    st.commit();
    for (const char* f : {"texts.tsv", "features.ukgf", "relations.ukgf"}) m.add_output(g, f);
    write_manifest(g, m);
  }
  ordered_json result = status("embed", skip);
  const auto fh = read_feature_header(g / "features.ukgf");
  const auto rh = read_feature_header(g / "relations.ukgf");
  result["nodes"] = fh.rows;
  result["relations"] = rh.rows;
  result["dim"] = fh.dim;
  return result;
}

ordered_json cmd_annotate(const RunConfig& cfg) {
  require(cfg.graph, "--graph");
  if (cfg.dim == 0) throw UsageError("--dim must be positive");
  const fs::path& g = cfg.graph;
  StageManifest m{"annotate"};
  m.params = {{"classes", cfg.classes},
              {"kmeans_iters", cfg.kmeans_iters},
              {"dim", cfg.dim},
              {"instance_of", kg::kInstanceOf},
              {"seed", derive_seed(cfg.seed, SeedUse::cluster)}};
  for (const char* f : {"entities.jsonl", "names.tsv"}) {
    require_file(g / f);
    m.add_input(f, g / f);
  }

  DirLock lock(g);
  const bool skip = !cfg.force && up_to_date(g, m);
  if (!skip) {
    Staging st(g, "annotate");
    const kg::NameTable names = read_names(g / "names.tsv");
    const auto entities = read_entities(g / "entities.jsonl");
    const kg::HarvestResult h = kg::harvest_labels(entities);

    // A parent is described by its own feature description when it is an
    // extracted entity, otherwise by its label (or raw id).
    std::unordered_map<std::string, std::size_t> entity_of;
    for (std::size_t i = 0; i < entities.size(); ++i) entity_of.emplace(entities[i].id, i);
    const std::uint64_t embed_seed = derive_seed(cfg.seed, SeedUse::embed);
    FeatureMatrix parent_x(h.parents.size(), cfg.dim);
    for (std::size_t p = 0; p < h.parents.size(); ++p) {
      std::string text;
      if (auto e = entity_of.find(h.parents[p]); e != entity_of.end()) {
        text = kg::reorganize_text(entities[e->second], names);
      } else if (auto n = names.find(h.parents[p]); n != names.end()) {
        text = n->second;
      } else {
        text = h.parents[p];
      }
      const auto v = kg::embed_text(text, cfg.dim, embed_seed);
      std::copy(v.begin(), v.end(), parent_x.row(p).begin());
    }

    const auto q = static_cast<std::uint32_t>(std::min<std::size_t>(cfg.classes, h.parents.size()));
    kg::AnnotationMap map;
    ordered_json info = {{"parents", h.parents.size()}, {"classes", q}, {"classes_requested", cfg.classes}};
    if (q > 0) {
      const kg::KMeansResult km =
          kg::cluster_labels(parent_x, q, derive_seed(cfg.seed, SeedUse::cluster), cfg.kmeans_iters);
      map = kg::make_annotation_map(h.parents, km.assignment);
      info["kmeans_iterations"] = km.iterations;
      info["kmeans_converged"] = km.converged;
      info["objective"] = km.objective.back();
    }
    const LabelMatrix labels = kg::annotate(h.per_entity, map, q);
    info["labeled_nodes"] = labels.labeled_nodes().size();

    std::ostringstream amap;
    for (const std::string& p : h.parents) amap << p << '\t' << map.at(p) << '\n';
    write_text_atomic(st.path("annotation_map.tsv"), amap.str());
    write_labels_tsv(st.path("labels.tsv"), labels);
    write_text_atomic(st.path("annotate.json"), info.dump(2) + "\n");
    st.commit();
    for (const char* f : {"annotation_map.tsv", "labels.tsv", "annotate.json"}) m.add_output(g, f);
    write_manifest(g, m);
  }
  ordered_json result = status("annotate", skip);
  result["annotation"] = read_json_file(g / "annotate.json");
  return result;
}

ordered_json cmd_sample(const RunConfig& cfg) {
  require(cfg.graph, "--graph");
  require(cfg.out, "--out");
  if (cfg.sample_target == 0) throw UsageError("--target must be positive");
  const fs::path& g = cfg.graph;
  StageManifest m{"sample"};
  m.params = {{"target", cfg.sample_target}, {"seed", derive_seed(cfg.seed, SeedUse::sample)}};
  for (const char* f : {"edges.tsv", "features.ukgf", "relations.ukgf"}) {
    require_file(g / f);
    m.add_input(f, g / f);
  }
  const bool has_labels = fs::exists(g / "labels.tsv");
  if (has_labels) m.add_input("labels.tsv", g / "labels.tsv");

  DirLock lock(cfg.out);
  const bool skip = !cfg.force && up_to_date(cfg.out, m);
  if (!skip) {
    Staging st(cfg.out, "sample");
    const GraphInputs in = load_graph_dir(g);
    kg::SnowballParams p;
    p.target = cfg.sample_target;
    p.seed = derive_seed(cfg.seed, SeedUse::sample);
    const kg::SnowballSample s = kg::snowball_sample(in.graph, p);

    FeatureMatrix features(s.nodes.size(), in.features.dim());
    std::ostringstream remap;
    for (std::size_t i = 0; i < s.nodes.size(); ++i) {
      auto src = in.features.row(s.nodes[i]);
      std::copy(src.begin(), src.end(), features.row(i).begin());
      remap << i << '\t' << s.nodes[i] << '\n';
    }
    write_edges_tsv(st.path("edges.tsv"), s.subgraph);
    write_features(st.path("features.ukgf"), features);
    write_features(st.path("relations.ukgf"), in.relations);
    write_text_atomic(st.path("remap.tsv"), remap.str());
    if (has_labels) {
      const LabelMatrix all = read_labels_tsv(g / "labels.tsv", in.graph.node_count());
      LabelMatrix sub(s.nodes.size(), all.class_count());
      for (std::size_t i = 0; i < s.nodes.size(); ++i) {
        auto l = all.labels(s.nodes[i]);
        sub.set_labels(i, std::vector<ClassId>(l.begin(), l.end()));
      }
      write_labels_tsv(st.path("labels.tsv"), sub);
    }
    const ordered_json stats = {{"nodes", s.subgraph.node_count()},
                                {"edges", s.subgraph.edge_count()},
                                {"edge_types", s.subgraph.edge_type_count()},
                                {"source_nodes", in.graph.node_count()},
                                {"filled", s.filled}};
    write_text_atomic(st.path("stats.json"), stats.dump(2) + "\n");
    st.commit();
    for (const char* f : {"edges.tsv", "features.ukgf", "relations.ukgf", "remap.tsv", "stats.json"}) {
      m.add_output(cfg.out, f);
    }
    if (has_labels) m.add_output(cfg.out, "labels.tsv");
    write_manifest(cfg.out, m);
  }
  ordered_json result = status("sample", skip);
  result["stats"] = read_json_file(cfg.out / "stats.json");
  return result;
}

ordered_json cmd_propagate(const RunConfig& cfg) {
  require(cfg.graph, "--graph");
  require(cfg.out, "--out");
  const ApmConfig apm = apm_config(cfg);
  const fs::path& g = cfg.graph;
  for (const char* f : {"edges.tsv", "features.ukgf", "relations.ukgf"}) require_file(g / f);
  const auto fh = read_feature_header(g / "features.ukgf");
  const auto rh = read_feature_header(g / "relations.ukgf");
  if (rh.rows > 0 && rh.dim != fh.dim) {
    throw std::runtime_error("dimension mismatch: features dim " + std::to_string(fh.dim) + ", relations dim " +
                             std::to_string(rh.dim));
  }

  StageManifest m{"propagate"};
  m.params = {{"nodes", fh.rows},
              {"dim", fh.dim},
              {"hops", apm.num_hops},
              {"isolated", to_string(apm.isolated_policy)},
              {"combine", to_string(apm.type_combine)},
              {"reverse", apm.add_reverse}};
  for (const char* f : {"edges.tsv", "features.ukgf", "relations.ukgf"}) m.add_input(f, g / f);

  DirLock lock(cfg.out);
  const bool skip = !cfg.force && up_to_date(cfg.out, m);
  if (!skip) {
    const GraphInputs in = load_graph_dir(g);
    if (cfg.chunk > 0) {
      // The spill directory survives failures so an interrupted run resumes.
      const fs::path spill = cfg.out / ".spill";
      {
        const PropagationStack stack =
            propagate_chunked(in.graph, in.relations, in.features, apm, cfg.chunk, spill);
      }
      for (std::uint32_t k = 0; k <= apm.num_hops; ++k) {
        fs::rename(spill / hop_file_name(k), cfg.out / hop_file_name(k));
      }
      fs::remove_all(spill);
    } else {
      Staging st(cfg.out, "propagate");
      const PropagationStack stack = propagate(in.graph, in.relations, in.features, apm);
      for (std::uint32_t k = 0; k <= apm.num_hops; ++k) write_features(st.path(hop_file_name(k)), stack.hop(k));
      st.commit();
    }
    for (std::uint32_t k = apm.num_hops + 1; fs::exists(cfg.out / hop_file_name(k)); ++k) {
      fs::remove(cfg.out / hop_file_name(k));
    }
    for (std::uint32_t k = 0; k <= apm.num_hops; ++k) m.add_output(cfg.out, hop_file_name(k));
    write_manifest(cfg.out, m);
  }
  ordered_json result = status("propagate", skip);
  const ordered_json stored = read_json_file(manifest_path(cfg.out, "propagate"));
  result["nodes"] = fh.rows;
  result["dim"] = fh.dim;
  result["hops"] = apm.num_hops;
  result["hop_sha256"] = stored.at("outputs");
  return result;
}

ordered_json cmd_train(const RunConfig& cfg) {
  require(cfg.stack, "--stack");
  require(cfg.labels, "--labels");
  require(cfg.out, "--out");
  require_file(cfg.labels);
  const ModelKind kind = parse_model_kind(cfg.model);

  StageManifest m{"train"};
  m.params = {{"model", to_string(kind)},
              {"hidden", cfg.hidden},
              {"epochs", cfg.epochs},
              {"lr", cfg.lr},
              {"dropout", cfg.dropout},
              {"batch_size", cfg.batch_size},
              {"threshold", cfg.threshold},
              {"seed", cfg.seed}};
  const std::uint32_t hops = stack_hops(cfg.stack);
  for (std::uint32_t k = 0; k <= hops; ++k) {
    require_file(cfg.stack / hop_file_name(k));
    m.add_input(hop_file_name(k), cfg.stack / hop_file_name(k));
  }
  m.add_input("labels", cfg.labels);
  if (!cfg.split.empty()) {
    require_file(cfg.split);
    m.add_input("split", cfg.split);
  }

  DirLock lock(cfg.out);
  const bool skip = !cfg.force && up_to_date(cfg.out, m);
  if (!skip) {
    Staging st(cfg.out, "train");
    const PropagationStack stack = load_stack(cfg.stack);
    const LabelMatrix labels = read_labels_tsv(cfg.labels, stack.rows());
    if (labels.class_count() == 0) throw std::runtime_error(cfg.labels.string() + " defines no classes");

    NodeSplit split;
    if (!cfg.split.empty()) {
      split = kg::read_split_tsv(cfg.split);
    } else {
      split = kg::split_nodes(labels.labeled_nodes(), {0.8, 0.1, 0.1}, derive_seed(cfg.seed, SeedUse::split));
    }
    kg::write_split_tsv(st.path("split.tsv"), split);

    ModelSpec spec;
    spec.kind = kind;
    spec.input_dim = stack.dim();
    spec.hidden_dim = cfg.hidden;
    spec.class_count = labels.class_count();
    spec.num_hops = stack.num_hops();
    spec.dropout_rate = cfg.dropout;
    spec.seed = derive_seed(cfg.seed, SeedUse::model);
    TrainConfig tc;
    tc.epochs = cfg.epochs;
    tc.learning_rate = cfg.lr;
    tc.batch_size = cfg.batch_size;
    tc.seed = derive_seed(cfg.seed, SeedUse::shuffle);
    tc.threshold = cfg.threshold;

    TrainResult tr = train(spec, tc, stack, labels, split);
    // Evaluate the weights exactly as the checkpoint stores them.
    round_to_float(tr.state);
    const EvalReport val = evaluate_model(spec, tr.state, stack, labels, split.val, cfg.threshold);
    const EvalReport test = evaluate_model(spec, tr.state, stack, labels, split.test, cfg.threshold);
    ordered_json report = {{"model", to_string(kind)},
                           {"best_epoch", tr.best_epoch},
                           {"val", ordered_json::parse(to_json(val))},
                           {"test", ordered_json::parse(to_json(test))}};

    std::ostringstream log;
    for (const auto& r : tr.log) log << to_json_line(r) << '\n';
    write_text_atomic(st.path("loss_log.jsonl"), log.str());
    save_checkpoint(st.path("checkpoint"), spec, tr.state, report.dump());
    write_text_atomic(st.path("report.json"), report.dump(2) + "\n");
    st.commit();
    for (const char* f : {"split.tsv", "loss_log.jsonl", "checkpoint", "report.json"}) m.add_output(cfg.out, f);
    write_manifest(cfg.out, m);
  }
  ordered_json result = status("train", skip);
  result["report"] = read_json_file(cfg.out / "report.json");
  return result;
}

ordered_json cmd_eval(const RunConfig& cfg) {
  require(cfg.stack, "--stack");
  require(cfg.labels, "--labels");
  require(cfg.checkpoint, "--checkpoint");
  const fs::path split_path = cfg.split.empty() ? cfg.checkpoint.parent_path() / "split.tsv" : cfg.split;
  require_file(split_path);
  const Checkpoint ck = load_checkpoint(cfg.checkpoint);
  const PropagationStack stack = load_stack(cfg.stack);
  if (stack.dim() != ck.spec.input_dim || stack.num_hops() < ck.spec.num_hops) {
    throw std::runtime_error("checkpoint does not match the propagation stack shape");
  }
  const LabelMatrix labels = read_labels_tsv(cfg.labels, stack.rows(), ck.spec.class_count);
  const NodeSplit split = kg::read_split_tsv(split_path);
  const EvalReport r = evaluate_model(ck.spec, ck.state, stack, labels, split_part(split, cfg.part), cfg.threshold);
  ordered_json result = status("eval", false);
  result["report"] = {{"model", to_string(ck.spec.kind)}, {cfg.part, ordered_json::parse(to_json(r))}};
  return result;
}

ordered_json cmd_pipeline(const RunConfig& cfg) {
  require(cfg.dump, "--dump");
  require(cfg.work, "--work");
  const fs::path graph = cfg.work / "graph";
  ordered_json result = {{"stage", "pipeline"}};

  RunConfig c = child(cfg);
  c.out = graph;
  result["build"] = cmd_build(c);
  c = child(cfg);
  c.graph = graph;
  result["embed"] = cmd_embed(c);
  result["annotate"] = cmd_annotate(c);

  fs::path source = graph;
  if (cfg.sample_target > 0) {
    source = cfg.work / "sample";
    c = child(cfg);
    c.graph = graph;
    c.out = source;
    result["sample"] = cmd_sample(c);
  }

  c = child(cfg);
  c.graph = source;
  c.out = cfg.work / "stack";
  result["propagate"] = cmd_propagate(c);

  c = child(cfg);
  c.stack = cfg.work / "stack";
  c.labels = source / "labels.tsv";
  c.out = cfg.work / "run";
  result["train"] = cmd_train(c);

  bool all_skipped = true;
  for (const auto& [k, v] : result.items()) {
    if (v.is_object() && v.value("status", "") == "done") all_skipped = false;
  }
  result["status"] = all_skipped ? "up to date" : "done";
  return result;
}

namespace {

void print_value(std::ostream& out, const std::string& key, const ordered_json& v, int indent) {
  const std::string pad(std::size_t(indent), ' ');
  if (v.is_object()) {
    out << pad << key << ":\n";
    for (const auto& [k, x] : v.items()) print_value(out, k, x, indent + 2);
  } else if (v.is_string()) {
    out << pad << key << ": " << v.get<std::string>() << '\n';
  } else {
    out << pad << key << ": " << v.dump() << '\n';
  }
}

void print_report(std::ostream& out, const ordered_json& report) {
  const std::string model = report.value("model", "");
  for (const char* part : {"train", "val", "test"}) {
    if (!report.contains(part)) continue;
    out << part << ":\n" << to_table(eval_report_from_json(report.at(part).dump()), model);
  }
}

}  // namespace

void print_summary(std::ostream& out, const ordered_json& summary) {
  out << summary.value("stage", "?") << ": " << summary.value("status", "?") << '\n';
  for (const auto& [k, v] : summary.items()) {
    if (k == "stage" || k == "status") continue;
    if (k == "report") {
      print_report(out, v);
    } else if (v.is_object() && v.contains("stage")) {
      print_summary(out, v);
    } else {
      print_value(out, k, v, 2);
    }
  }
}

}  // namespace hetprop::cli
