#include "hetprop/cli.hpp"

#include <CLI11.hpp>

#include "cli_internal.hpp"
#include "hetprop/training.hpp"

namespace hetprop {

namespace {

using cli::RunConfig;

// --config must be applied before the flags that override it.
std::optional<std::string> find_config(int argc, const char* const* argv) {
  std::optional<std::string> found;
  for (int i = 1; i < argc; ++i) {
    std::string_view a = argv[i];
    if (a == "--config" && i + 1 < argc) {
      found = argv[++i];
    } else if (a.starts_with("--config=")) {
      found = std::string(a.substr(9));
    }
  }
  return found;
}

void add_run_options(CLI::App& sub, RunConfig& c, std::initializer_list<std::string_view> which) {
  for (std::string_view w : which) {
    if (w == "dump") sub.add_option("--dump", c.dump, "Wikidata-style JSON dump");
    else if (w == "screen") sub.add_option("--screen", c.screen, "Screen-set file (one property id or datatype per line)");
    else if (w == "graph") sub.add_option("--graph", c.graph, "Graph directory");
    else if (w == "stack") sub.add_option("--stack", c.stack, "Propagation stack directory");
    else if (w == "labels") sub.add_option("--labels", c.labels, "labels.tsv");
    else if (w == "split") sub.add_option("--split", c.split, "split.tsv (default: seeded 8:1:1 split)");
    else if (w == "checkpoint") sub.add_option("--checkpoint", c.checkpoint, "Checkpoint directory");
    else if (w == "out") sub.add_option("--out", c.out, "Output directory");
    else if (w == "work") sub.add_option("--work", c.work, "Work directory for all stages");
    else if (w == "dim") sub.add_option("--dim", c.dim, "Embedding dimension")->capture_default_str();
    else if (w == "hidden") sub.add_option("--hidden", c.hidden, "Hidden dimension")->capture_default_str();
    else if (w == "hops") sub.add_option("-K,--hops", c.hops, "Propagation hops")->capture_default_str();
    else if (w == "epochs") sub.add_option("--epochs", c.epochs)->capture_default_str();
    else if (w == "lr") sub.add_option("--lr", c.lr, "Learning rate")->capture_default_str();
    else if (w == "dropout") sub.add_option("--dropout", c.dropout)->capture_default_str();
    else if (w == "batch_size") sub.add_option("--batch-size", c.batch_size)->capture_default_str();
    else if (w == "threshold") sub.add_option("--threshold", c.threshold)->capture_default_str();
    else if (w == "classes") sub.add_option("--classes", c.classes, "Number of high-level classes")->capture_default_str();
    else if (w == "kmeans_iters") sub.add_option("--kmeans-iters", c.kmeans_iters)->capture_default_str();
    else if (w == "target") sub.add_option("--target,--sample-target", c.sample_target, "Nodes to sample");
    else if (w == "chunk") sub.add_option("--chunk", c.chunk, "Destination block size (0: in memory)")->capture_default_str();
    else if (w == "isolated") {
      sub.add_option("--isolated", c.isolated, "Isolated-node policy")
          ->check(CLI::IsMember({"zero", "carry"}))
          ->capture_default_str();
    } else if (w == "combine") {
      sub.add_option("--combine", c.combine, "Multi-type edge combination")
          ->check(CLI::IsMember({"mean", "sum"}))
          ->capture_default_str();
    } else if (w == "reverse") sub.add_flag("--reverse", c.reverse, "Add reverse edges before propagating");
    else if (w == "model") {
      sub.add_option("--model", c.model)
          ->check(CLI::IsMember({"r_mlp", "r_sgc", "r_sign", "r_sagn", "r_gamlp"}))
          ->capture_default_str();
    } else if (w == "part") {
      sub.add_option("--part", c.part)->check(CLI::IsMember({"train", "val", "test"}))->capture_default_str();
    } else if (w == "seed") sub.add_option("--seed", c.seed)->capture_default_str();
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    if (auto path = find_config(argc, argv)) cli::load_config_file(*path, cfg);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  CLI::App app{"Heterogeneous knowledge-graph dataset builder and decoupled propagation trainer", "hetprop"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "key=value config file; flags override it");
  app.add_option("--threads", cfg.threads, "Propagation workers (0: all cores)");
  app.add_flag("--json", cfg.json, "Print the summary as JSON");
  app.add_flag("--force", cfg.force, "Recompute even when outputs are up to date");

  struct Command {
    const char* name;
    const char* help;
    std::initializer_list<std::string_view> options;
    cli::ordered_json (*run)(const RunConfig&);
  };
  const Command commands[] = {
      {"build", "Extract entities and typed edges from a dump", {"dump", "screen", "out"}, cli::cmd_build},
      {"embed", "Write feature descriptions and hashed embeddings", {"graph", "dim", "seed"}, cli::cmd_embed},
      {"annotate", "Cluster instance-of parents into classes and label nodes",
       {"graph", "classes", "kmeans_iters", "dim", "seed"}, cli::cmd_annotate},
      {"sample", "Snowball-sample an induced subgraph", {"graph", "out", "target", "seed"}, cli::cmd_sample},
      {"propagate", "Precompute the propagation stack",
       {"graph", "out", "hops", "isolated", "combine", "reverse", "chunk"}, cli::cmd_propagate},
      {"train", "Train a post-classifier and report test metrics",
       {"stack", "labels", "split", "out", "model", "hidden", "epochs", "lr", "dropout", "batch_size", "threshold",
        "seed"},
       cli::cmd_train},
      {"eval", "Evaluate a checkpoint", {"stack", "labels", "split", "checkpoint", "part", "threshold"},
       cli::cmd_eval},
      {"pipeline", "Run build, embed, annotate, [sample,] propagate and train",
       {"dump", "screen", "work", "dim", "classes", "kmeans_iters", "target", "hops", "isolated", "combine",
        "reverse", "chunk", "model", "hidden", "epochs", "lr", "dropout", "batch_size", "threshold", "seed"},
       cli::cmd_pipeline},
  };
  std::vector<std::pair<CLI::App*, const Command*>> subs;
  for (const Command& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->fallthrough();
    add_run_options(*sub, cfg, c.options);
    subs.emplace_back(sub, &c);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    cli::resolve_paths(cfg);
    for (auto [sub, c] : subs) {
      if (!sub->parsed()) continue;
      const cli::ordered_json summary = c->run(cfg);
      if (cfg.json) {
        out << summary.dump(2) << '\n';
      } else {
        cli::print_summary(out, summary);
      }
    }
  } catch (const cli::UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const TrainingDiverged& e) {
    err << "error: " << e.what() << " (last finite loss " << e.last_finite_loss() << ")\n";
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace hetprop
