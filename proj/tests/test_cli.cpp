#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "helpers.hpp"

namespace {

std::string g_cli;  // path to the claimcheck binary, from --cli=

struct CmdResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CmdResult run_cli(const std::string& args) {
  static int counter = 0;
  testing::TempDir streams;
  const std::string out_path = streams.file("out" + std::to_string(counter));
  const std::string err_path = streams.file("err" + std::to_string(counter));
  ++counter;
  const std::string cmd =
      g_cli + " " + args + " >" + out_path + " 2>" + err_path;
  int raw = std::system(cmd.c_str());
  CmdResult result;
  result.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  result.out = slurp(out_path);
  result.err = slurp(err_path);
  return result;
}

bool exists(const std::string& path) { return std::filesystem::exists(path); }

}  // namespace

TEST_CASE("bad invocations exit 1, bad data exits 2") {
  CHECK(run_cli("").code == 1);                 // subcommand required
  CHECK(run_cli("frobnicate").code == 1);       // unknown subcommand
  CHECK(run_cli("synth").code == 1);            // missing required --out
  CHECK(run_cli("--help").code == 0);
  CHECK(run_cli("retrieve --corpus /nope.jsonl --claims /nope2.jsonl --out /tmp/x")
            .code == 2);  // missing inputs are a data error

  testing::TempDir dir;
  testing::write_file(dir.file("claims.jsonl"), "this is not json\n");
  CHECK(run_cli("evaluate --claims " + dir.file("claims.jsonl") +
                " --predictions " + dir.file("claims.jsonl"))
            .code == 2);
}

TEST_CASE("synth writes a corpus and refuses to clobber it") {
  testing::TempDir dir;
  const std::string out = dir.file("synth");
  CmdResult first = run_cli("synth --out " + out + " --seed 5");
  CHECK(first.code == 0);
  CHECK(exists(out + "/corpus.jsonl"));
  CHECK(exists(out + "/claims.jsonl"));
  CHECK(exists(out + "/embeddings.txt"));

  CmdResult second = run_cli("synth --out " + out + " --seed 5");
  CHECK(second.code == 1);
  CHECK(second.err.find("--force") != std::string::npos);
  CHECK(run_cli("synth --out " + out + " --seed 5 --force").code == 0);

  CHECK(run_cli("synth --out " + dir.file("x") + " --kind bogus").code == 1);
}

TEST_CASE("kfold splits a claims file into fold pairs") {
  testing::TempDir dir;
  REQUIRE(run_cli("synth --out " + dir.file("s") + " --seed 3").code == 0);
  CmdResult r = run_cli("kfold --claims " + dir.file("s/claims.jsonl") +
                        " --k 3 --out " + dir.file("folds"));
  CHECK(r.code == 0);
  std::size_t total = 0;
  for (int i = 0; i < 3; ++i) {
    CHECK(exists(dir.file("folds/fold" + std::to_string(i) + "_train.jsonl")));
    const std::string test_path =
        dir.file("folds/fold" + std::to_string(i) + "_test.jsonl");
    REQUIRE(exists(test_path));
    std::ifstream in(test_path);
    std::string line;
    while (std::getline(in, line))
      if (!line.empty()) ++total;
  }
  CHECK(total == 300);

  CHECK(run_cli("kfold --claims " + dir.file("s/claims.jsonl") +
                " --k 1 --out " + dir.file("folds2"))
            .code == 1);
}

namespace {

// One shared end-to-end run; later cases reuse its artifacts.
struct Pipeline {
  testing::TempDir dir;
  std::string corpus, claims, embeddings, pools, checkpoint, predictions;

  Pipeline() {
    REQUIRE(run_cli("synth --out " + dir.file("data") + " --seed 11").code == 0);
    corpus = dir.file("data/corpus.jsonl");
    claims = dir.file("data/claims.jsonl");
    embeddings = dir.file("data/embeddings.txt");
    pools = dir.file("pools.jsonl");
    checkpoint = dir.file("model.json");
    predictions = dir.file("preds.jsonl");
  }

  std::string inputs() const {
    return " --corpus " + corpus + " --claims " + claims;
  }
};

}  // namespace

TEST_CASE("the staged pipeline runs end to end") {
  Pipeline p;
  CmdResult retrieved =
      run_cli("retrieve" + p.inputs() + " --K 3 --M 1 --out " + p.pools);
  CHECK(retrieved.code == 0);
  CHECK(retrieved.err.find("pools") != std::string::npos);
  REQUIRE(exists(p.pools));

  CmdResult trained = run_cli(
      "train" + p.inputs() + " --embeddings " + p.embeddings +
      " --dim 16 --pools " + p.pools +
      " --variant mt --hidden 8 --epochs 2 --out " + p.checkpoint +
      " --loss-csv " + p.dir.file("loss.csv"));
  CHECK(trained.code == 0);
  REQUIRE(exists(p.checkpoint));
  std::string csv = slurp(p.dir.file("loss.csv"));
  CHECK(csv.rfind("epoch,claim_loss,utility_loss", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);  // header + 2 epochs

  CmdResult predicted = run_cli(
      "predict" + p.inputs() + " --embeddings " + p.embeddings +
      " --pools " + p.pools + " --checkpoint " + p.checkpoint +
      " --utility-filter --out " + p.predictions);
  CHECK(predicted.code == 0);
  REQUIRE(exists(p.predictions));

  CmdResult evaluated =
      run_cli("evaluate --claims " + p.claims + " --predictions " +
              p.predictions + " --out " + p.dir.file("report.json"));
  CHECK(evaluated.code == 0);
  CHECK(evaluated.out.find("fever") != std::string::npos);
  std::ifstream in(p.dir.file("report.json"));
  nlohmann::json report = nlohmann::json::parse(in);
  CHECK(report.at("n_claims") == 300);

  // a fresh v1 checkpoint cannot serve --utility-filter
  const std::string v1 = p.dir.file("v1.json");
  REQUIRE(run_cli("train" + p.inputs() + " --embeddings " + p.embeddings +
                  " --dim 16 --pools " + p.pools +
                  " --variant v1 --hidden 8 --epochs 1 --out " + v1)
              .code == 0);
  CHECK(run_cli("predict" + p.inputs() + " --embeddings " + p.embeddings +
                " --pools " + p.pools + " --checkpoint " + v1 +
                " --utility-filter --out " + p.dir.file("no.jsonl"))
            .code == 1);

  CHECK(run_cli("train" + p.inputs() + " --embeddings " + p.embeddings +
                " --dim 16 --pools " + p.pools + " --variant v3 --out " +
                p.dir.file("no.json"))
            .code == 1);
}

TEST_CASE("config files feed defaults that flags override") {
  Pipeline p;
  REQUIRE(run_cli("retrieve" + p.inputs() + " --K 2 --M 1 --out " + p.pools)
              .code == 0);
  nlohmann::json config{
      {"paths",
       {{"corpus", p.corpus}, {"claims", p.claims}, {"embeddings", p.embeddings}}},
      {"model", {{"variant", "v1"}, {"embedding_dim", 16}, {"hidden_dim", 8}}},
      {"train", {{"epochs", 1}}}};
  const std::string config_path = p.dir.file("config.json");
  testing::write_file(config_path, config.dump());

  CHECK(run_cli("train --config " + config_path + " --pools " + p.pools +
                " --out " + p.checkpoint + " --loss-csv " + p.dir.file("l1.csv"))
            .code == 0);
  // epochs came from the file
  const std::string l1 = slurp(p.dir.file("l1.csv"));
  CHECK(std::count(l1.begin(), l1.end(), '\n') == 2);

  // flag overrides the file value
  CHECK(run_cli("train --config " + config_path + " --pools " + p.pools +
                " --epochs 3 --force --out " + p.checkpoint + " --loss-csv " +
                p.dir.file("l2.csv"))
            .code == 0);
  const std::string l2 = slurp(p.dir.file("l2.csv"));
  CHECK(std::count(l2.begin(), l2.end(), '\n') == 4);

  testing::write_file(config_path, "{broken");
  CHECK(run_cli("train --config " + config_path + " --pools " + p.pools +
                " --out " + p.dir.file("no.json"))
            .code == 2);
}

TEST_CASE("evaluate handles an empty predictions file as all-missing") {
  Pipeline p;
  testing::write_file(p.predictions, "");
  CmdResult r = run_cli("evaluate --claims " + p.claims + " --predictions " +
                        p.predictions + " --out " + p.dir.file("report.json"));
  CHECK(r.code == 0);
  std::ifstream in(p.dir.file("report.json"));
  nlohmann::json report = nlohmann::json::parse(in);
  CHECK(report.at("fever_score").get<double>() == 0.0);
  CHECK(report.at("missing_predictions") == 300);
}

TEST_CASE("ablate writes the grid csv") {
  Pipeline p;
  // the ablation corpus is the natural fixture here
  REQUIRE(run_cli("synth --out " + p.dir.file("abl") +
                  " --kind ablation --seed 2")
              .code == 0);
  CmdResult r = run_cli(
      "ablate --corpus " + p.dir.file("abl/corpus.jsonl") + " --claims " +
      p.dir.file("abl/claims.jsonl") + " --embeddings " +
      p.dir.file("abl/embeddings.txt") + " --dim 16 --hidden 8 --epochs 1" +
      " --k-values 1,2 --m-values 0 --out " + p.dir.file("grid.csv"));
  CHECK(r.code == 0);
  std::string csv = slurp(p.dir.file("grid.csv"));
  CHECK(csv.rfind("K,M,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}

int run_doctest(int argc, char** argv) {
  doctest::Context context;
  context.applyCommandLine(argc, argv);
  return context.run();
}

int main(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg.rfind("--cli=", 0) == 0) g_cli = arg.substr(6);
  }
  if (g_cli.empty()) {
    // fall back to the build-tree layout relative to this binary
    std::filesystem::path self(argv[0]);
    g_cli = (self.parent_path().parent_path() / "tools" / "claimcheck").string();
  }
  if (!std::filesystem::exists(g_cli)) {
    std::fprintf(stderr, "cli binary not found: %s\n", g_cli.c_str());
    return 1;
  }
  return run_doctest(argc, argv);
}
