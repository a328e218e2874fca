// Acceptance suite: eight end-to-end checks, one [PASS]/[FAIL] line each.
// Exits nonzero when any check fails. Expects the CLI binary path as argv[1]
// (falls back to the build-tree location next to this binary).

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "claimcheck/models.hpp"
#include "claimcheck/pipeline.hpp"
#include "claimcheck/retrieval.hpp"
#include "claimcheck/rng.hpp"
#include "claimcheck/scoring.hpp"
#include "claimcheck/synth.hpp"

using namespace claimcheck;

namespace {

std::string g_cli;

// ---------------------------------------------------------------- utilities

struct Failure {
  std::string detail;
};

void expect(bool ok, const std::string& detail) {
  if (!ok) throw Failure{detail};
}

std::string fmt(const char* pattern, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, value);
  return buf;
}

double brute_force_cost(const Eigen::MatrixXd& cost) {
  int n = static_cast<int>(std::max(cost.rows(), cost.cols()));
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (int r = 0; r < n; ++r)
      if (r < cost.rows() && perm[r] < cost.cols()) total += cost(r, perm[r]);
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// ------------------------------------------------------------ the criteria

// 1. Assignment costs agree with exhaustive permutation search.
std::string check_hungarian() {
  Rng rng(101);
  for (int trial = 0; trial < 1000; ++trial) {
    int rows = 1 + static_cast<int>(rng.below(6));
    int cols = 1 + static_cast<int>(rng.below(6));
    Eigen::MatrixXd cost(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c)
        cost(r, c) = rng.below(3) == 0 ? static_cast<double>(rng.below(5))
                                       : rng.uniform(-10.0, 10.0);
    auto pairs = hungarian_assign(cost);
    double total = 0.0;
    for (auto [r, c] : pairs) total += cost(r, c);
    double want = brute_force_cost(cost);
    expect(std::abs(total - want) < 1e-9,
           "trial " + std::to_string(trial) + ": cost " + fmt("%.12g", total) +
               " vs brute force " + fmt("%.12g", want));
  }
  return "1000 matrices up to 6x6";
}

// 2. Finite-difference gradient checks across all architectures.
std::string check_gradients() {
  double worst = 0.0;
  for (Variant variant :
       {Variant::V1, Variant::V2, Variant::MT, Variant::MT_GUMBEL}) {
    Rng rng(202);
    VerifierParams params = make_verifier(variant, 6, 8, rng);
    ModelInput input;
    input.claim_vec = Eigen::VectorXd(6);
    input.claim_vec << 0.3, -0.8, 0.5, 0.1, -0.2, 0.7;
    for (int i = 0; i < 3; ++i) {
      Eigen::VectorXd e(6);
      for (int k = 0; k < 6; ++k) e(k) = rng.uniform(-1.0, 1.0);
      input.evidence_vecs.push_back(e);
    }
    std::vector<int> targets{1, 0, 0};
    TrainConfig config;
    config.dropout = 0.5;
    config.tau = 0.5;
    config.lambda_utility = 0.7;
    StepNoise noise = draw_step_noise(params, config, 3, rng, true);
    auto loss = [&] {
      return loss_and_grads(params, input, Label::Refuted, targets, config, noise)
          .total;
    };
    double err = grad_check(loss, params.layers(), 1e-4);
    worst = std::max(worst, err);
    expect(err < 1e-4, to_string(variant) + " max relative error " +
                           fmt("%.3g", err));
  }
  return "max relative error " + fmt("%.3g", worst);
}

// 3. Sampling statistics of the Gumbel-Softmax relaxation.
std::string check_gumbel_stats() {
  Rng rng(303);
  for (int vec = 0; vec < 3; ++vec) {
    Eigen::Vector3d logits;
    for (int i = 0; i < 3; ++i) logits(i) = rng.uniform(-2.0, 2.0);
    Eigen::VectorXd target = softmax(logits);
    Eigen::Vector3d counts = Eigen::Vector3d::Zero();
    const int n = 100000;
    for (int s = 0; s < n; ++s) {
      GumbelSample sample = gumbel_softmax(logits, 1.0, rng);
      int argmax = 0;
      sample.probs.maxCoeff(&argmax);
      counts(argmax) += 1.0;
    }
    for (int i = 0; i < 3; ++i) {
      double freq = counts(i) / n;
      expect(std::abs(freq - target(i)) <= 0.02,
             "vector " + std::to_string(vec) + " class " + std::to_string(i) +
                 ": frequency " + fmt("%.4f", freq) + " vs softmax " +
                 fmt("%.4f", target(i)));
    }
  }

  Eigen::Vector2d sharp_logits(5.0, 0.0);
  int near_onehot = 0;
  const int draws = 10000;
  for (int s = 0; s < draws; ++s) {
    GumbelSample sample = gumbel_softmax(sharp_logits, 0.05, rng);
    if (sample.probs.maxCoeff() > 0.95) ++near_onehot;
  }
  double rate = static_cast<double>(near_onehot) / draws;
  expect(rate >= 0.99, "tau=0.05 near-one-hot rate " + fmt("%.4f", rate));
  return "argmax within 0.02 of softmax; tau=0.05 one-hot rate " +
         fmt("%.4f", rate);
}

// 4. Scorer truth table plus a brute-force oracle over random claims.
std::string check_scorer() {
  auto pred_with = [](Label label, std::vector<SentenceRef> evidence) {
    Prediction p;
    p.claim_id = "c";
    p.label = label;
    p.selected_evidence = std::move(evidence);
    return p;
  };
  using P = std::pair<bool, bool>;
  expect(score_claim(pred_with(Label::Unsure, {}), Label::Unsure, {}) ==
             P{true, true},
         "relaxed UNSURE row");
  expect(score_claim(pred_with(Label::Supported, {{"D", 2}}), Label::Supported,
                     {{{"D", 1}}}) == P{true, false},
         "wrong-sentence row");
  expect(score_claim(pred_with(Label::Supported, {{"E", 3}}), Label::Supported,
                     {{{"D", 1}}, {{"E", 3}}}) == P{true, true},
         "alternative-group row");
  expect(score_claim(pred_with(Label::Refuted, {{"D", 1}}), Label::Supported,
                     {{{"D", 1}}}) == P{false, false},
         "wrong-label row");
  expect(score_claim(pred_with(Label::Refuted, {{"D", 1}}), Label::Refuted,
                     {{{"D", 1}, {"D", 2}}}) == P{true, false},
         "partial-group row");

  Rng rng(404);
  auto random_ref = [&] {
    return SentenceRef{"d" + std::to_string(rng.below(4)),
                       static_cast<int>(rng.below(4))};
  };
  for (int trial = 0; trial < 500; ++trial) {
    Label gold = static_cast<Label>(rng.below(3));
    std::vector<EvidenceGroup> groups;
    if (gold != Label::Unsure) {
      for (std::uint64_t g = 1 + rng.below(3); g > 0; --g) {
        EvidenceGroup group;
        std::uint64_t size = 1 + rng.below(3);
        while (group.size() < size) group.insert(random_ref());
        groups.push_back(group);
      }
    }
    Prediction pred = pred_with(static_cast<Label>(rng.below(3)), {});
    for (std::uint64_t k = rng.below(5); k > 0; --k)
      pred.selected_evidence.push_back(random_ref());

    bool label_ok = pred.label == gold;
    bool evidence_ok = gold == Label::Unsure;
    for (const auto& group : groups) {
      bool covered = true;
      for (const auto& ref : group)
        if (std::count(pred.selected_evidence.begin(),
                       pred.selected_evidence.end(), ref) == 0)
          covered = false;
      if (covered) evidence_ok = true;
    }
    auto got = score_claim(pred, gold, groups);
    expect(got.first == label_ok && got.second == (label_ok && evidence_ok),
           "oracle mismatch at trial " + std::to_string(trial));
  }
  return "truth table and 500-claim oracle";
}

// 5. Every variant learns the synthetic task under the reference recipe.
std::string check_learnability() {
  SynthData data = make_learnable(7);
  Gazetteer gazetteer = build_gazetteer(data.corpus);
  RetrievalOptions ropts;
  ropts.K = 5;
  ropts.M = 2;
  RetrievalRun run = retrieve_all(data.claims, data.corpus, gazetteer, ropts, 2);
  auto examples = join_examples(data.claims, run.pools);

  std::string summary;
  for (Variant variant :
       {Variant::V1, Variant::V2, Variant::MT, Variant::MT_GUMBEL}) {
    TrainConfig config;  // reference defaults: lr .01, momentum .9, l2 .1, 50 epochs
    config.K = ropts.K;
    config.M = ropts.M;
    TrainResult result = train(examples, data.table, config, variant, 32);
    PredictOptions popts;
    auto preds =
        predict_all(result.params, data.claims, run.pools, data.table, popts, 2);

    std::size_t label_hits = 0;
    for (std::size_t i = 0; i < preds.size(); ++i)
      if (preds[i].label == *data.claims[i].gold_label) ++label_hits;
    double label_acc = static_cast<double>(label_hits) / preds.size();

    ScoreReport report = aggregate(preds, data.claims);

    expect(label_acc >= 0.90, to_string(variant) + " label accuracy " +
                                  fmt("%.3f", label_acc));
    expect(report.fever_score >= 0.75,
           to_string(variant) + " fever score " + fmt("%.3f", report.fever_score));

    if (result.params.is_multitask()) {
      std::size_t slots = 0, hits = 0;
      for (std::size_t i = 0; i < preds.size(); ++i) {
        const EvidencePool& pool = run.pools[i];
        for (std::size_t j = 0; j < pool.candidates.size(); ++j) {
          if (pool.candidates[j].is_pad()) continue;
          ++slots;
          bool predicted_useful = preds[i].utilities[j] > 0.5;
          if (predicted_useful == (*pool.candidates[j].utility_target == 1))
            ++hits;
        }
      }
      double utility_acc = static_cast<double>(hits) / slots;
      expect(utility_acc >= 0.90, to_string(variant) + " utility accuracy " +
                                      fmt("%.3f", utility_acc));
      summary += to_string(variant) + " acc " + fmt("%.2f", label_acc) +
                 " util " + fmt("%.2f", utility_acc) + "; ";
    } else {
      summary += to_string(variant) + " acc " + fmt("%.2f", label_acc) + "; ";
    }
  }
  summary.resize(summary.size() - 2);
  return summary;
}

// 6. Frame-sentence retrieval equals a direct scan of the candidate docs.
std::string check_retrieval_exactness() {
  SynthData data = make_learnable(7);
  for (const auto& claim : data.claims) {
    auto docs = retrieve_documents(claim, data.corpus);
    auto got = retrieve_sentences(claim, data.corpus, docs);

    std::vector<EvidenceCandidate> want;
    for (const auto& id : docs)
      for (const auto& s : data.corpus.find(id)->sentences) {
        double sim = jaccard(claim.frames, s.frames);
        if (sim > 0.0) {
          EvidenceCandidate c;
          c.doc_id = s.doc_id;
          c.sentence_index = s.index;
          c.similarity = sim;
          want.push_back(c);
        }
      }
    std::stable_sort(want.begin(), want.end(),
                     [](const EvidenceCandidate& a, const EvidenceCandidate& b) {
                       if (a.similarity != b.similarity)
                         return a.similarity > b.similarity;
                       return a.ref() < b.ref();
                     });
    expect(got.size() == want.size(),
           claim.claim_id + ": " + std::to_string(got.size()) + " vs " +
               std::to_string(want.size()) + " sentences");
    for (std::size_t i = 0; i < got.size(); ++i)
      expect(got[i].ref() == want[i].ref() &&
                 std::abs(got[i].similarity - want[i].similarity) < 1e-12,
             claim.claim_id + ": rank " + std::to_string(i) + " differs");
  }
  return std::to_string(data.claims.size()) + " claims, full-scan identical";
}

// 7. Byte-identical artifacts across two identically-configured CLI runs.
std::string check_determinism() {
  namespace fs = std::filesystem;
  std::string base = (fs::temp_directory_path() / "claimcheck_accept").string();
  fs::remove_all(base);
  fs::create_directories(base);

  auto shell = [](const std::string& cmd) {
    int raw = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  for (const char* run : {"a", "b"}) {
    std::string dir = base + "/" + run;
    fs::create_directories(dir);
    const std::string data = dir + "/data";
    expect(shell(g_cli + " synth --out " + data + " --seed 11") == 0,
           std::string("synth failed in run ") + run);
    const std::string in = " --corpus " + data + "/corpus.jsonl --claims " +
                           data + "/claims.jsonl";
    expect(shell(g_cli + " retrieve" + in + " --K 4 --M 2 --jobs 3 --out " + dir +
                 "/pools.jsonl") == 0,
           std::string("retrieve failed in run ") + run);
    expect(shell(g_cli + " train" + in + " --embeddings " + data +
                 "/embeddings.txt --dim 16 --pools " + dir +
                 "/pools.jsonl --variant mt-gumbel --hidden 8 --epochs 3" +
                 " --out " + dir + "/ckpt.json") == 0,
           std::string("train failed in run ") + run);
    expect(shell(g_cli + " predict" + in + " --embeddings " + data +
                 "/embeddings.txt --pools " + dir + "/pools.jsonl --checkpoint " +
                 dir + "/ckpt.json --jobs 2 --out " + dir + "/preds.jsonl") == 0,
           std::string("predict failed in run ") + run);
    expect(shell(g_cli + " evaluate --claims " + data + "/claims.jsonl" +
                 " --predictions " + dir + "/preds.jsonl --out " + dir +
                 "/report.json") == 0,
           std::string("evaluate failed in run ") + run);
  }

  auto slurp = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  for (const char* artifact :
       {"pools.jsonl", "ckpt.json", "preds.jsonl", "report.json"}) {
    std::string a = slurp(base + "/a/" + artifact);
    std::string b = slurp(base + "/b/" + artifact);
    expect(!a.empty(), std::string(artifact) + " is empty");
    expect(a == b, std::string(artifact) + " differs between runs");
  }
  fs::remove_all(base);
  return "pools, checkpoint, predictions, report byte-identical";
}

// 8. Evidence metrics move the documented way across the K grid.
std::string check_ablation_direction() {
  SynthData data = make_ablation(2);
  AblationOptions options;
  options.train.epochs = 5;
  options.hidden_dim = 8;
  auto cells = run_ablation(data.claims, data.corpus, data.table,
                            {1, 2, 3, 4, 5}, {0}, options);
  expect(cells.size() == 5, "expected 5 grid cells");

  const double expect_p[] = {1.0, 5.0 / 6, 2.0 / 3, 1.0 / 2, 2.0 / 5};
  const double expect_r[] = {1.0 / 3, 2.0 / 3, 1.0, 1.0, 1.0};
  for (int i = 0; i < 5; ++i) {
    expect(std::abs(cells[i].evidence_precision - expect_p[i]) < 1e-9,
           "K=" + std::to_string(i + 1) + " precision " +
               fmt("%.4f", cells[i].evidence_precision));
    expect(std::abs(cells[i].evidence_recall - expect_r[i]) < 1e-9,
           "K=" + std::to_string(i + 1) + " recall " +
               fmt("%.4f", cells[i].evidence_recall));
  }
  for (int i = 1; i < 3; ++i)
    expect(cells[i].evidence_f1 >= cells[i - 1].evidence_f1 - 1e-12,
           "f1 decreased between K=" + std::to_string(i) + " and K=" +
               std::to_string(i + 1));
  for (int i = 3; i < 5; ++i)
    expect(cells[i].evidence_precision <= cells[i - 1].evidence_precision + 1e-12,
           "precision increased between K=" + std::to_string(i) + " and K=" +
               std::to_string(i + 1));
  return "f1 " + fmt("%.3f", cells[0].evidence_f1) + " -> " +
         fmt("%.3f", cells[2].evidence_f1) + " rising; precision " +
         fmt("%.3f", cells[2].evidence_precision) + " -> " +
         fmt("%.3f", cells[4].evidence_precision) + " falling";
}

struct Criterion {
  const char* name;
  double budget_seconds;
  std::function<std::string()> run;
};

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) {
    g_cli = argv[1];
  } else {
    std::filesystem::path self(argv[0]);
    g_cli = (self.parent_path().parent_path() / "tools" / "claimcheck").string();
  }
  if (!std::filesystem::exists(g_cli)) {
    std::fprintf(stderr, "cli binary not found: %s\n", g_cli.c_str());
    return 64;
  }

  const std::vector<Criterion> criteria{
      {"hungarian matches brute force", 10.0, check_hungarian},
      {"gradient checks pass for every variant", 30.0, check_gradients},
      {"gumbel-softmax sampling statistics", 10.0, check_gumbel_stats},
      {"scorer truth table and oracle", 0.0, check_scorer},
      {"every variant learns the synthetic task", 300.0, check_learnability},
      {"sentence retrieval equals full scan", 0.0, check_retrieval_exactness},
      {"pipeline runs are byte-identical", 0.0, check_determinism},
      {"ablation grid moves the right way", 0.0, check_ablation_direction},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& criterion = criteria[i];
    auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = true;
    try {
      detail = criterion.run();
    } catch (const Failure& f) {
      ok = false;
      detail = f.detail;
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("exception: ") + e.what();
    }
    double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (ok && criterion.budget_seconds > 0.0 &&
        elapsed > criterion.budget_seconds) {
      ok = false;
      detail = "exceeded " + fmt("%.0f", criterion.budget_seconds) +
               "s budget: " + detail;
    }
    std::printf("[%s] %zu. %s (%.1fs) — %s\n", ok ? "PASS" : "FAIL", i + 1,
                criterion.name, elapsed, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  return failures;
}
