#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli_internal.hpp"
#include "hetprop/apm.hpp"
#include "hetprop/cli.hpp"
#include "hetprop/io.hpp"
#include "support.hpp"

using namespace hetprop;
using hetprop::testing::TempDir;
namespace fs = std::filesystem;

namespace {

const fs::path kData = HETPROP_TEST_DATA;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "hetprop");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(int(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::size_t line_count(const fs::path& p) {
  const std::string s = slurp(p);
  return std::size_t(std::count(s.begin(), s.end(), '\n'));
}

nlohmann::json json_of(const Run& r) { return nlohmann::json::parse(r.out); }

// A stack directory holding only hop_0 and matching labels: class c is set
// iff feature c is positive; features stay 0.2 away from zero.
void separable_fixture(const fs::path& dir, std::size_t n = 500) {
  fs::create_directories(dir);
  std::mt19937_64 rng(31);
  auto x = hetprop::testing::random_matrix(rng, n, 6);
  for (float& f : x.data()) f = f < 0 ? f * 0.8f - 0.2f : f * 0.8f + 0.2f;
  std::vector<std::vector<ClassId>> lists(n);
  for (NodeId v = 0; v < n; ++v)
    for (ClassId c = 0; c < 2; ++c)
      if (x(v, c) > 0.0f) lists[v].push_back(c);
  write_features(dir / "hop_0.ukgf", x);
  write_labels_tsv(dir / "labels.tsv", LabelMatrix::from_lists(lists, 2));
}

}  // namespace

TEST(Cli, BuildHundredEntityFixture) {
  TempDir dir("cli");
  auto r = run({"build", "--dump", (kData / "dump100.jsonl").string(), "--out", (dir / "g").string(), "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = json_of(r);
  EXPECT_EQ(j["stats"]["nodes"], 83);
  EXPECT_EQ(j["stats"]["incomplete"], 17);
  EXPECT_EQ(line_count(dir / "g" / "entities.jsonl"), 83u);
  EXPECT_EQ(nlohmann::json::parse(slurp(dir / "g" / "stats.json"))["nodes"], 83);
}

TEST(Cli, BuildBelgiumEdgesPerEntityClaim) {
  TempDir dir("cli");
  auto r = run({"build", "--dump", (kData / "belgium.jsonl").string(), "--out", (dir / "g").string(), "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto stats = json_of(r)["stats"];
  EXPECT_EQ(line_count(dir / "g" / "edges.tsv"), stats["entity_claims"].get<std::size_t>());
  EXPECT_EQ(stats["entity_claims"], 5);
  EXPECT_EQ(stats["nodes"], 4);
  const std::string rels = slurp(dir / "g" / "relations.tsv");
  EXPECT_EQ(rels.substr(0, rels.find('\n')), "0\tP361\tpart of");
  const std::string nodes = slurp(dir / "g" / "nodes.tsv");
  EXPECT_EQ(nodes.substr(0, nodes.find('\n')), "0\tQ31\tBelgium");
}

TEST(Cli, BuildEmptyAndUnreadableDumps) {
  TempDir dir("cli");
  { std::ofstream(dir / "empty.jsonl"); }
  auto r = run({"build", "--dump", (dir / "empty.jsonl").string(), "--out", (dir / "g").string(), "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json_of(r)["stats"]["nodes"], 0);
  EXPECT_EQ(line_count(dir / "g" / "edges.tsv"), 0u);

  auto bad = run({"build", "--dump", (dir / "missing.jsonl").string(), "--out", (dir / "h").string()});
  EXPECT_NE(bad.code, 0);
  EXPECT_FALSE(fs::exists(dir / "h"));
}

TEST(Cli, PropagateDelegatesToLibraryAndSkipsReruns) {
  TempDir dir("cli");
  const fs::path g = dir / "g";
  ASSERT_EQ(run({"build", "--dump", (kData / "belgium.jsonl").string(), "--out", g.string()}).code, 0);
  ASSERT_EQ(run({"embed", "--graph", g.string(), "--dim", "8"}).code, 0);
  auto r = run({"propagate", "--graph", g.string(), "--out", (dir / "s").string(), "-K", "1"});
  ASSERT_EQ(r.code, 0) << r.err;

  const auto x = read_features(g / "features.ukgf");
  const auto rel = read_features(g / "relations.ukgf");
  const auto graph = load_graph(g / "edges.tsv", x.rows(), std::uint32_t(rel.rows()));
  ApmConfig cfg;
  cfg.num_hops = 1;
  auto expected = propagate(graph, rel, x, cfg);
  EXPECT_TRUE(bitwise_equal(read_features(dir / "s" / "hop_1.ukgf"), expected.hop(1)));

  auto again = run({"propagate", "--graph", g.string(), "--out", (dir / "s").string(), "-K", "1"});
  EXPECT_EQ(again.code, 0);
  EXPECT_NE(again.out.find("up to date"), std::string::npos);
  auto forced = run({"propagate", "--graph", g.string(), "--out", (dir / "s").string(), "-K", "1", "--force"});
  EXPECT_EQ(forced.out.find("up to date"), std::string::npos);
}

TEST(Cli, ChunkedAndInMemoryFilesAreIdentical) {
  TempDir dir("cli");
  const fs::path g = dir / "g";
  ASSERT_EQ(run({"build", "--dump", (kData / "dump100.jsonl").string(), "--out", g.string()}).code, 0);
  ASSERT_EQ(run({"embed", "--graph", g.string(), "--dim", "16"}).code, 0);
  ASSERT_EQ(run({"propagate", "--graph", g.string(), "--out", (dir / "mem").string(), "-K", "3"}).code, 0);
  auto r = run({"propagate", "--graph", g.string(), "--out", (dir / "disk").string(), "-K", "3", "--chunk", "7"});
  ASSERT_EQ(r.code, 0) << r.err;
  for (std::uint32_t k = 0; k <= 3; ++k) {
    EXPECT_EQ(slurp(dir / "mem" / hop_file_name(k)), slurp(dir / "disk" / hop_file_name(k))) << k;
  }
}

TEST(Cli, PropagateRejectsDimensionMismatch) {
  TempDir dir("cli");
  const fs::path g = dir / "g";
  fs::create_directories(g);
  write_features(g / "features.ukgf", FeatureMatrix(3, 4));
  write_features(g / "relations.ukgf", FeatureMatrix(1, 5));
  { std::ofstream(g / "edges.tsv") << "0\t1\t0\n"; }
  auto r = run({"propagate", "--graph", g.string(), "--out", (dir / "s").string()});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("dimension mismatch"), std::string::npos);
}

TEST(Cli, TrainSeparableFixture) {
  TempDir dir("cli");
  separable_fixture(dir / "s");
  auto r = run({"train", "--stack", (dir / "s").string(), "--labels", (dir / "s" / "labels.tsv").string(), "--out",
                (dir / "r").string(), "--model", "r_mlp", "--hidden", "32", "--epochs", "120", "--batch-size", "64",
                "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto report = json_of(r)["report"];
  EXPECT_GE(report["test"]["subset_accuracy"].get<double>(), 0.95);
  for (const char* f : {"report.json", "loss_log.jsonl", "split.tsv", "checkpoint/checkpoint.json"}) {
    EXPECT_TRUE(fs::exists(dir / "r" / f)) << f;
  }
  EXPECT_EQ(line_count(dir / "r" / "loss_log.jsonl"), 120u);

  auto e = run({"eval", "--stack", (dir / "s").string(), "--labels", (dir / "s" / "labels.tsv").string(),
                "--checkpoint", (dir / "r" / "checkpoint").string(), "--json"});
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_EQ(json_of(e)["report"]["test"], report["test"]);

  auto table = run({"eval", "--stack", (dir / "s").string(), "--labels", (dir / "s" / "labels.tsv").string(),
                    "--checkpoint", (dir / "r" / "checkpoint").string()});
  EXPECT_LT(table.out.find("Acc."), table.out.find("Prec."));
  EXPECT_LT(table.out.find("Rec."), table.out.find("F1."));
}

TEST(Cli, TrainIsReproducibleAndAcceptsAllKinds) {
  TempDir dir("cli");
  const fs::path g = dir / "g";
  ASSERT_EQ(run({"build", "--dump", (kData / "dump100.jsonl").string(), "--out", g.string()}).code, 0);
  ASSERT_EQ(run({"embed", "--graph", g.string(), "--dim", "16"}).code, 0);
  ASSERT_EQ(run({"annotate", "--graph", g.string(), "--classes", "3", "--dim", "16"}).code, 0);
  ASSERT_EQ(run({"propagate", "--graph", g.string(), "--out", (dir / "s").string(), "-K", "2"}).code, 0);
  for (const char* kind : {"r_mlp", "r_sgc", "r_sign", "r_sagn", "r_gamlp"}) {
    std::vector<std::string> args{"train", "--stack", (dir / "s").string(), "--labels", (g / "labels.tsv").string(),
                                  "--model", kind, "--hidden", "8", "--epochs", "4", "--seed", "3"};
    auto a = args, b = args;
    a.insert(a.end(), {"--out", (dir / (std::string(kind) + "_a")).string()});
    b.insert(b.end(), {"--out", (dir / (std::string(kind) + "_b")).string()});
    auto ra = run(a), rb = run(b);
    ASSERT_EQ(ra.code, 0) << ra.err;
    ASSERT_EQ(rb.code, 0) << rb.err;
    EXPECT_EQ(slurp(dir / (std::string(kind) + "_a") / "report.json"),
              slurp(dir / (std::string(kind) + "_b") / "report.json"))
        << kind;
  }
  EXPECT_NE(run({"train", "--stack", (dir / "s").string(), "--labels", (g / "labels.tsv").string(), "--model",
                 "r_gcn", "--out", (dir / "x").string()})
                .code,
            0);
}

TEST(Cli, DivergenceExitsNonzero) {
  TempDir dir("cli");
  separable_fixture(dir / "s", 40);
  auto r = run({"train", "--stack", (dir / "s").string(), "--labels", (dir / "s" / "labels.tsv").string(),
                "--model", "r_mlp", "--epochs", "5", "--lr", "1e308", "--out", (dir / "r").string()});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("last finite loss"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / "r" / "report.json"));
}

TEST(Cli, ConfigFileAndOverrides) {
  TempDir dir("cli");
  {
    std::ofstream cfg(dir / "run.cfg");
    cfg << "# relative paths resolve against this file\n"
        << "dump = " << (kData / "belgium.jsonl").string() << "\n"
        << "out = g\n";
  }
  auto r = run({"--config", (dir / "run.cfg").string(), "build"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "g" / "edges.tsv"));

  auto over = run({"build", "--config", (dir / "run.cfg").string(), "--out", (dir / "h").string()});
  ASSERT_EQ(over.code, 0) << over.err;
  EXPECT_TRUE(fs::exists(dir / "h" / "edges.tsv"));

  { std::ofstream(dir / "bad.cfg") << "dump = x\nlearning_rate = 3\n"; }
  auto bad = run({"--config", (dir / "bad.cfg").string(), "build"});
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("unknown key 'learning_rate'"), std::string::npos);
}

TEST(Cli, LockedDirectoryIsRefused) {
  TempDir dir("cli");
  cli::DirLock held(dir / "g");
  auto r = run({"build", "--dump", (kData / "belgium.jsonl").string(), "--out", (dir / "g").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("in use"), std::string::npos);
}

TEST(Cli, SampleWritesRemappedSubgraph) {
  TempDir dir("cli");
  const fs::path g = dir / "g";
  ASSERT_EQ(run({"build", "--dump", (kData / "dump100.jsonl").string(), "--out", g.string()}).code, 0);
  ASSERT_EQ(run({"embed", "--graph", g.string(), "--dim", "8"}).code, 0);
  ASSERT_EQ(run({"annotate", "--graph", g.string(), "--classes", "2", "--dim", "8"}).code, 0);
  auto r = run({"sample", "--graph", g.string(), "--out", (dir / "s").string(), "--target", "20", "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json_of(r)["stats"]["nodes"], 20);
  EXPECT_EQ(line_count(dir / "s" / "remap.tsv"), 20u);
  EXPECT_EQ(read_feature_header(dir / "s" / "features.ukgf").rows, 20u);
  EXPECT_TRUE(fs::exists(dir / "s" / "labels.tsv"));
}

TEST(Cli, PipelineRunsEndToEnd) {
  TempDir dir("cli");
  auto r = run({"pipeline", "--dump", (kData / "dump100.jsonl").string(), "--work", (dir / "w").string(), "--dim",
                "16", "--classes", "3", "-K", "2", "--hidden", "8", "--epochs", "3", "--target", "60", "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = json_of(r);
  EXPECT_EQ(j["build"]["stats"]["nodes"], 83);
  EXPECT_EQ(j["sample"]["stats"]["nodes"], 60);
  EXPECT_EQ(j["propagate"]["hop_sha256"].size(), 3u);
  EXPECT_TRUE(j["train"]["report"].contains("test"));
  auto again = run({"pipeline", "--dump", (kData / "dump100.jsonl").string(), "--work", (dir / "w").string(),
                    "--dim", "16", "--classes", "3", "-K", "2", "--hidden", "8", "--epochs", "3", "--target", "60",
                    "--json"});
  ASSERT_EQ(again.code, 0) << again.err;
  EXPECT_EQ(json_of(again)["status"], "up to date");
}
