#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "claimcheck/corpus.hpp"
#include "claimcheck/embed.hpp"
#include "claimcheck/neural.hpp"
#include "claimcheck/retrieval.hpp"
#include "claimcheck/rng.hpp"

namespace claimcheck {

/// V1/V2: plain verifier with one/two hidden layers over
/// concat(claim, avg evidence, cosine). MT adds the shared evidence encoder
/// and the binary utility head; MT_GUMBEL further reshapes each evidence
/// slot by the outer product with its Gumbel-Softmax utility sample.
enum class Variant { V1, V2, MT, MT_GUMBEL };

std::string to_string(Variant v);
Variant parse_variant(const std::string& s);  // "v1" | "v2" | "mt" | "mt-gumbel"

struct VerifierParams {
  Variant variant = Variant::V1;
  int embed_dim = 0;
  int hidden_dim = 0;

  std::vector<DenseLayer> plain_stack;       // V1/V2: hidden layer(s) + 3-way head
  std::vector<DenseLayer> claim_encoder;     // MT variants: 2 layers
  std::vector<DenseLayer> evidence_encoder;  // MT variants: 2 layers, shared by all slots
  DenseLayer claim_head;                     // MT variants
  DenseLayer utility_head;                   // MT variants
  DenseLayer gumbel_layer;                   // MT_GUMBEL only

  bool is_multitask() const { return variant == Variant::MT || variant == Variant::MT_GUMBEL; }

  /// Trainable layers in a fixed, serialization-stable order.
  std::vector<DenseLayer*> layers();
  std::vector<const DenseLayer*> layers() const;
  std::size_t parameter_count() const;
};

VerifierParams make_verifier(Variant variant, int embed_dim, int hidden_dim, Rng& rng);

struct Prediction {
  std::string claim_id;
  Label label = Label::Unsure;
  Eigen::Vector3d label_probs = Eigen::Vector3d::Zero();
  std::vector<double> utilities;  // P(useful) per slot; empty for V1/V2
  std::vector<SentenceRef> selected_evidence;
};

/// Label <-> class index: SUPPORTED=0, REFUTED=1, UNSURE=2.
inline int label_index(Label l) { return static_cast<int>(l); }

/// Claim and per-slot evidence embeddings. V1/V2 inputs carry only the
/// non-pad sentences; MT inputs carry all K+M slots (pads embed to zero).
struct ModelInput {
  Eigen::VectorXd claim_vec;
  std::vector<Eigen::VectorXd> evidence_vecs;
};

ModelInput build_input(const AnnotatedClaim& claim, const EvidencePool& pool,
                       const EmbeddingTable& table, Variant variant,
                       OovPolicy oov = OovPolicy::Zero);

/// Plain verifier forward pass (evaluation mode, no dropout).
Prediction forward_verifier(const VerifierParams& params,
                            const Eigen::VectorXd& claim_vec,
                            const std::vector<Eigen::VectorXd>& evidence_vecs);

/// Multi-task forward pass (evaluation mode).
Prediction forward_mt(const VerifierParams& params, const Eigen::VectorXd& c0,
                      const std::vector<Eigen::VectorXd>& evidence_vecs);

/// Gumbel multi-task forward pass with caller-supplied noise, one row of
/// Gumbel draws per slot. Passing a zero matrix gives the deterministic
/// noise-free evaluation used at prediction time.
Prediction forward_mt_gumbel(const VerifierParams& params,
                             const Eigen::VectorXd& c0,
                             const std::vector<Eigen::VectorXd>& evidence_vecs,
                             double tau, const Eigen::MatrixXd& noise);
Prediction forward_mt_gumbel(const VerifierParams& params,
                             const Eigen::VectorXd& c0,
                             const std::vector<Eigen::VectorXd>& evidence_vecs,
                             double tau, Rng& rng);

/// CE(label) + lambda * mean_i CE(utility_i). Multi-task predictions only.
double multitask_loss(const Prediction& pred, Label gold,
                      const std::vector<int>& utility_targets, double lambda);

/// Per-step stochastic state, drawn up front so a step can be replayed
/// exactly (frozen noise) by the gradient checker.
struct StepNoise {
  bool use_dropout = false;
  std::vector<Eigen::VectorXd> dropout_masks;  // one per hidden layer (V1/V2)
  Eigen::MatrixXd gumbel_noise;                // slots x 2 (MT_GUMBEL)
};

StepNoise draw_step_noise(const VerifierParams& params, const TrainConfig& config,
                          std::size_t n_slots, Rng& rng, bool train_mode);

struct LossParts {
  double total = 0.0;
  double claim = 0.0;
  double utility = 0.0;
};

/// Forward + backward for one example; accumulates parameter gradients.
/// utility_targets must hold one {0,1} entry per slot for MT variants and is
/// ignored for V1/V2.
LossParts loss_and_grads(VerifierParams& params, const ModelInput& input,
                         Label gold, const std::vector<int>& utility_targets,
                         const TrainConfig& config, const StepNoise& noise);

/// Forward-only loss in evaluation mode (no dropout, noise-free Gumbel).
LossParts eval_loss(const VerifierParams& params, const ModelInput& input,
                    Label gold, const std::vector<int>& utility_targets,
                    const TrainConfig& config);

struct TrainExample {
  const AnnotatedClaim* claim = nullptr;
  const EvidencePool* pool = nullptr;
};

struct TrainResult {
  VerifierParams params;
  std::vector<double> loss_history;          // end-of-epoch eval-mode means
  std::vector<double> claim_loss_history;
  std::vector<double> utility_loss_history;
};

/// Per-claim momentum-SGD training, deterministic under config.seed. Claims
/// are reshuffled every epoch; dropout applies to V1/V2 only. on_epoch, when
/// set, observes each end-of-epoch evaluation-mode loss.
using EpochCallback = std::function<void(int epoch, const LossParts& mean_loss)>;
TrainResult train(const std::vector<TrainExample>& examples,
                  const EmbeddingTable& table, const TrainConfig& config,
                  Variant variant, int hidden_dim,
                  const EpochCallback& on_epoch = nullptr);

enum class PredictMode { Raw, UtilityFiltered };

struct PredictOptions {
  PredictMode mode = PredictMode::Raw;
  double tau = 0.5;
  OovPolicy oov = OovPolicy::Zero;
};

/// Evaluation-mode prediction for one claim. Raw mode selects the whole
/// (non-pad) pool; UtilityFiltered keeps candidates with P(useful) > 0.5 and
/// is an error for V1/V2, which have no utility head.
Prediction predict(const VerifierParams& params, const AnnotatedClaim& claim,
                   const EvidencePool& pool, const EmbeddingTable& table,
                   const PredictOptions& options = {});

/// Versioned JSON checkpoint of named layer tensors plus the TrainConfig.
/// Loading rejects dimension mismatches.
void save_checkpoint(const std::string& path, const VerifierParams& params,
                     const TrainConfig& config);
std::pair<VerifierParams, TrainConfig> load_checkpoint(const std::string& path);

/// Prediction JSONL: {claim_id, predicted_label, predicted_evidence}.
void save_predictions(const std::string& path, const std::vector<Prediction>& preds);
std::vector<Prediction> load_predictions(const std::string& path);

}  // namespace claimcheck
