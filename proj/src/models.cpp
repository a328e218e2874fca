#include "claimcheck/models.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <utility>

#include <json.hpp>

#include "claimcheck/errors.hpp"
#include "claimcheck/jsonl.hpp"

namespace claimcheck {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string to_string(Variant v) {
  switch (v) {
    case Variant::V1: return "v1";
    case Variant::V2: return "v2";
    case Variant::MT: return "mt";
    case Variant::MT_GUMBEL: return "mt-gumbel";
  }
  throw std::logic_error("unknown variant");
}

Variant parse_variant(const std::string& s) {
  if (s == "v1") return Variant::V1;
  if (s == "v2") return Variant::V2;
  if (s == "mt") return Variant::MT;
  if (s == "mt-gumbel" || s == "mt_gumbel") return Variant::MT_GUMBEL;
  throw ParseError("unknown model variant: '" + s + "' (expected v1, v2, mt, or mt-gumbel)");
}

std::vector<DenseLayer*> VerifierParams::layers() {
  std::vector<DenseLayer*> out;
  if (variant == Variant::V1 || variant == Variant::V2) {
    for (auto& l : plain_stack) out.push_back(&l);
    return out;
  }
  for (auto& l : claim_encoder) out.push_back(&l);
  for (auto& l : evidence_encoder) out.push_back(&l);
  out.push_back(&claim_head);
  out.push_back(&utility_head);
  if (variant == Variant::MT_GUMBEL) out.push_back(&gumbel_layer);
  return out;
}

std::vector<const DenseLayer*> VerifierParams::layers() const {
  auto mut = const_cast<VerifierParams*>(this)->layers();
  return {mut.begin(), mut.end()};
}

std::size_t VerifierParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto* l : layers()) n += static_cast<std::size_t>(l->W.size() + l->b.size());
  return n;
}

VerifierParams make_verifier(Variant variant, int embed_dim, int hidden_dim, Rng& rng) {
  if (embed_dim < 1) throw std::invalid_argument("make_verifier: embed_dim must be >= 1");
  if (hidden_dim < 1) throw std::invalid_argument("make_verifier: hidden_dim must be >= 1");
  VerifierParams p;
  p.variant = variant;
  p.embed_dim = embed_dim;
  p.hidden_dim = hidden_dim;
  const int d = embed_dim;
  const int h = hidden_dim;
  if (variant == Variant::V1 || variant == Variant::V2) {
    p.plain_stack.emplace_back(h, 2 * d + 1);
    if (variant == Variant::V2) p.plain_stack.emplace_back(h, h);
    p.plain_stack.emplace_back(3, h);
  } else {
    p.claim_encoder.emplace_back(h, d);
    p.claim_encoder.emplace_back(h, h);
    p.evidence_encoder.emplace_back(h, d + 1);
    p.evidence_encoder.emplace_back(h, h);
    if (variant == Variant::MT) {
      p.claim_head = DenseLayer(3, 2 * h);
      p.utility_head = DenseLayer(2, h);
    } else {
      p.gumbel_layer = DenseLayer(2, h);
      p.claim_head = DenseLayer(3, 3 * h);
      p.utility_head = DenseLayer(2, 2 * h);
    }
  }
  for (auto* l : p.layers()) l->glorot_init(rng);
  return p;
}

ModelInput build_input(const AnnotatedClaim& claim, const EvidencePool& pool,
                       const EmbeddingTable& table, Variant variant, OovPolicy oov) {
  ModelInput in;
  in.claim_vec = embed_text(claim.tokens, table, oov);
  const bool multitask = variant == Variant::MT || variant == Variant::MT_GUMBEL;
  for (const auto& cand : pool.candidates) {
    if (cand.is_pad()) {
      if (multitask) in.evidence_vecs.push_back(Eigen::VectorXd::Zero(table.dim()));
      continue;
    }
    in.evidence_vecs.push_back(embed_text(cand.tokens, table, oov));
  }
  return in;
}

namespace {

Eigen::Vector3d onehot3(Label gold) {
  Eigen::Vector3d t = Eigen::Vector3d::Zero();
  t[label_index(gold)] = 1.0;
  return t;
}

Eigen::Vector2d onehot2(int target) {
  Eigen::Vector2d t = Eigen::Vector2d::Zero();
  t[target] = 1.0;
  return t;
}

double ce_from_probs(const Eigen::VectorXd& probs, int target) {
  return -std::log(std::max(probs[target], 1e-12));
}

void check_input(const VerifierParams& params, const Eigen::VectorXd& claim_vec,
                 const std::vector<Eigen::VectorXd>& evidence_vecs, bool require_slots) {
  if (claim_vec.size() != params.embed_dim)
    throw std::invalid_argument("model input: claim vector has wrong dimension");
  for (const auto& e : evidence_vecs)
    if (e.size() != params.embed_dim)
      throw std::invalid_argument("model input: evidence vector has wrong dimension");
  if (require_slots && evidence_vecs.empty())
    throw std::invalid_argument("model input: multi-task forward needs at least one evidence slot");
}

/// V1/V2 input layer: concat(claim, mean evidence, cosine).  2d+1 wide.
Eigen::VectorXd plain_input(const VerifierParams& params, const Eigen::VectorXd& claim_vec,
                            const std::vector<Eigen::VectorXd>& evidence_vecs) {
  const int d = params.embed_dim;
  Eigen::VectorXd e_avg = Eigen::VectorXd::Zero(d);
  for (const auto& e : evidence_vecs) e_avg += e;
  if (!evidence_vecs.empty()) e_avg /= static_cast<double>(evidence_vecs.size());
  Eigen::VectorXd x(2 * d + 1);
  x.head(d) = claim_vec;
  x.segment(d, d) = e_avg;
  const double cn = claim_vec.norm();
  const double en = e_avg.norm();
  x[2 * d] = (cn == 0.0 || en == 0.0) ? 0.0 : claim_vec.dot(e_avg) / (cn * en);
  return x;
}

struct PlainTrace {
  Eigen::VectorXd x;
  std::vector<Eigen::VectorXd> pre;      // pre-activation per hidden layer
  std::vector<Eigen::VectorXd> post;     // after relu (and dropout when active)
  Eigen::Vector3d probs;
};

PlainTrace run_plain(const VerifierParams& params, const Eigen::VectorXd& x,
                     const StepNoise& noise) {
  PlainTrace t;
  t.x = x;
  Eigen::VectorXd cur = x;
  const std::size_t hidden = params.plain_stack.size() - 1;
  for (std::size_t i = 0; i < hidden; ++i) {
    Eigen::VectorXd a = params.plain_stack[i].forward(cur);
    Eigen::VectorXd r = relu(a);
    if (noise.use_dropout) r = r.cwiseProduct(noise.dropout_masks.at(i));
    t.pre.push_back(std::move(a));
    t.post.push_back(r);
    cur = std::move(r);
  }
  t.probs = softmax(params.plain_stack.back().forward(cur));
  return t;
}

struct SlotTrace {
  Eigen::VectorXd e0;       // concat(embedding, cosine with claim)
  Eigen::VectorXd ea1, er1; // first encoder layer pre/post relu
  Eigen::VectorXd ea2, e2;  // second encoder layer pre/post relu
  Eigen::Vector2d u;        // utility distribution
  // MT_GUMBEL extras
  Eigen::Vector2d glogits;
  Eigen::Vector2d z;
  Eigen::VectorXd o;        // flattened outer product e2 * z^T, row-major
};

struct MtTrace {
  Eigen::VectorXd ca1, cr1, ca2, c2;  // claim encoder
  std::vector<SlotTrace> slots;
  Eigen::VectorXd pooled;             // e_avg (MT) or R (MT_GUMBEL)
  Eigen::VectorXd cat;                // claim-head input
  Eigen::Vector3d probs;
};

MtTrace run_mt(const VerifierParams& params, const Eigen::VectorXd& c0,
               const std::vector<Eigen::VectorXd>& evidence_vecs, double tau,
               const Eigen::MatrixXd* noise) {
  // noise == nullptr selects the plain MT path; otherwise MT_GUMBEL with the
  // given per-slot Gumbel draws.
  MtTrace t;
  const int h = params.hidden_dim;
  t.ca1 = params.claim_encoder[0].forward(c0);
  t.cr1 = relu(t.ca1);
  t.ca2 = params.claim_encoder[1].forward(t.cr1);
  t.c2 = relu(t.ca2);

  const double cn = c0.norm();
  const std::size_t n = evidence_vecs.size();
  const bool gumbel = noise != nullptr;
  t.pooled = Eigen::VectorXd::Zero(gumbel ? 2 * h : h);
  t.slots.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    SlotTrace& s = t.slots[i];
    const Eigen::VectorXd& ev = evidence_vecs[i];
    s.e0.resize(params.embed_dim + 1);
    s.e0.head(params.embed_dim) = ev;
    const double en = ev.norm();
    s.e0[params.embed_dim] = (cn == 0.0 || en == 0.0) ? 0.0 : c0.dot(ev) / (cn * en);
    s.ea1 = params.evidence_encoder[0].forward(s.e0);
    s.er1 = relu(s.ea1);
    s.ea2 = params.evidence_encoder[1].forward(s.er1);
    s.e2 = relu(s.ea2);
    if (gumbel) {
      s.glogits = params.gumbel_layer.forward(s.e2);
      Eigen::Vector2d g = noise->row(static_cast<Eigen::Index>(i)).transpose();
      s.z = gumbel_softmax_with_noise(s.glogits, tau, g);
      s.o.resize(2 * h);
      for (int r = 0; r < h; ++r) {
        s.o[2 * r] = s.e2[r] * s.z[0];
        s.o[2 * r + 1] = s.e2[r] * s.z[1];
      }
      s.u = softmax(params.utility_head.forward(s.o));
      t.pooled += s.o;
    } else {
      s.u = softmax(params.utility_head.forward(s.e2));
      t.pooled += s.e2;
    }
  }
  t.pooled /= static_cast<double>(n);

  t.cat.resize(t.c2.size() + t.pooled.size());
  t.cat.head(t.c2.size()) = t.c2;
  t.cat.tail(t.pooled.size()) = t.pooled;
  t.probs = softmax(params.claim_head.forward(t.cat));
  return t;
}

Prediction prediction_from_mt(const MtTrace& t) {
  Prediction p;
  p.label_probs = t.probs;
  Eigen::Index best;
  t.probs.maxCoeff(&best);
  p.label = static_cast<Label>(best);
  p.utilities.reserve(t.slots.size());
  for (const auto& s : t.slots) p.utilities.push_back(s.u[1]);
  return p;
}

void check_targets(const std::vector<int>& targets, std::size_t n_slots) {
  if (targets.size() != n_slots)
    throw std::invalid_argument("multi-task loss: need one utility target per evidence slot");
  for (int t : targets)
    if (t != 0 && t != 1)
      throw std::invalid_argument("multi-task loss: utility targets must be 0 or 1");
}

}  // namespace

Prediction forward_verifier(const VerifierParams& params, const Eigen::VectorXd& claim_vec,
                            const std::vector<Eigen::VectorXd>& evidence_vecs) {
  if (params.variant != Variant::V1 && params.variant != Variant::V2)
    throw std::invalid_argument("forward_verifier: params are not a plain verifier");
  check_input(params, claim_vec, evidence_vecs, false);
  PlainTrace t = run_plain(params, plain_input(params, claim_vec, evidence_vecs), StepNoise{});
  Prediction p;
  p.label_probs = t.probs;
  Eigen::Index best;
  t.probs.maxCoeff(&best);
  p.label = static_cast<Label>(best);
  return p;
}

Prediction forward_mt(const VerifierParams& params, const Eigen::VectorXd& c0,
                      const std::vector<Eigen::VectorXd>& evidence_vecs) {
  if (params.variant != Variant::MT)
    throw std::invalid_argument("forward_mt: params are not an MT verifier");
  check_input(params, c0, evidence_vecs, true);
  return prediction_from_mt(run_mt(params, c0, evidence_vecs, 0.0, nullptr));
}

Prediction forward_mt_gumbel(const VerifierParams& params, const Eigen::VectorXd& c0,
                             const std::vector<Eigen::VectorXd>& evidence_vecs,
                             double tau, const Eigen::MatrixXd& noise) {
  if (params.variant != Variant::MT_GUMBEL)
    throw std::invalid_argument("forward_mt_gumbel: params are not an MT_GUMBEL verifier");
  check_input(params, c0, evidence_vecs, true);
  if (tau <= 0.0) throw std::invalid_argument("forward_mt_gumbel: tau must be positive");
  if (noise.rows() != static_cast<Eigen::Index>(evidence_vecs.size()) || noise.cols() != 2)
    throw std::invalid_argument("forward_mt_gumbel: noise must be one row of 2 per slot");
  return prediction_from_mt(run_mt(params, c0, evidence_vecs, tau, &noise));
}

Prediction forward_mt_gumbel(const VerifierParams& params, const Eigen::VectorXd& c0,
                             const std::vector<Eigen::VectorXd>& evidence_vecs,
                             double tau, Rng& rng) {
  Eigen::MatrixXd noise(evidence_vecs.size(), 2);
  for (Eigen::Index i = 0; i < noise.rows(); ++i)
    for (Eigen::Index j = 0; j < 2; ++j) noise(i, j) = rng.gumbel();
  return forward_mt_gumbel(params, c0, evidence_vecs, tau, noise);
}

double multitask_loss(const Prediction& pred, Label gold,
                      const std::vector<int>& utility_targets, double lambda) {
  if (pred.utilities.empty())
    throw std::invalid_argument("multitask_loss: prediction has no utilities (MT variants only)");
  if (lambda < 0.0) throw std::invalid_argument("multitask_loss: lambda must be >= 0");
  check_targets(utility_targets, pred.utilities.size());
  double loss = ce_from_probs(pred.label_probs, label_index(gold));
  double usum = 0.0;
  for (std::size_t i = 0; i < pred.utilities.size(); ++i) {
    const double p_useful = pred.utilities[i];
    const double p = utility_targets[i] == 1 ? p_useful : 1.0 - p_useful;
    usum += -std::log(std::max(p, 1e-12));
  }
  return loss + lambda * usum / static_cast<double>(pred.utilities.size());
}

StepNoise draw_step_noise(const VerifierParams& params, const TrainConfig& config,
                          std::size_t n_slots, Rng& rng, bool train_mode) {
  StepNoise noise;
  if (params.variant == Variant::V1 || params.variant == Variant::V2) {
    if (train_mode && config.dropout > 0.0) {
      noise.use_dropout = true;
      const std::size_t hidden = params.plain_stack.size() - 1;
      for (std::size_t i = 0; i < hidden; ++i)
        noise.dropout_masks.push_back(
            dropout_mask(params.hidden_dim, config.dropout, rng));
    }
    return noise;
  }
  if (params.variant == Variant::MT_GUMBEL) {
    noise.gumbel_noise = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_slots), 2);
    if (train_mode)
      for (Eigen::Index i = 0; i < noise.gumbel_noise.rows(); ++i)
        for (Eigen::Index j = 0; j < 2; ++j) noise.gumbel_noise(i, j) = rng.gumbel();
  }
  return noise;
}

namespace {

LossParts plain_loss_and_grads(VerifierParams& params, const ModelInput& input,
                               Label gold, const StepNoise& noise) {
  check_input(params, input.claim_vec, input.evidence_vecs, false);
  Eigen::VectorXd x = plain_input(params, input.claim_vec, input.evidence_vecs);
  PlainTrace t = run_plain(params, x, noise);
  LossParts parts;
  parts.claim = ce_from_probs(t.probs, label_index(gold));
  parts.total = parts.claim;

  Eigen::Vector3d dlogits = t.probs - onehot3(gold);
  const std::size_t hidden = params.plain_stack.size() - 1;
  Eigen::VectorXd d = params.plain_stack[hidden].backward(t.post.back(), dlogits);
  for (std::size_t i = hidden; i-- > 0;) {
    if (noise.use_dropout) d = d.cwiseProduct(noise.dropout_masks.at(i));
    d = relu_backward(t.pre[i], d);
    d = params.plain_stack[i].backward(i == 0 ? t.x : t.post[i - 1], d);
  }
  return parts;
}

LossParts mt_loss_and_grads(VerifierParams& params, const ModelInput& input,
                            Label gold, const std::vector<int>& targets,
                            const TrainConfig& config, const StepNoise& noise) {
  const bool gumbel = params.variant == Variant::MT_GUMBEL;
  check_input(params, input.claim_vec, input.evidence_vecs, true);
  check_targets(targets, input.evidence_vecs.size());
  MtTrace t = run_mt(params, input.claim_vec, input.evidence_vecs,
                     config.tau, gumbel ? &noise.gumbel_noise : nullptr);

  const int h = params.hidden_dim;
  const std::size_t n = t.slots.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  const double lam = config.lambda_utility;

  LossParts parts;
  parts.claim = ce_from_probs(t.probs, label_index(gold));
  for (std::size_t i = 0; i < n; ++i)
    parts.utility += ce_from_probs(t.slots[i].u, targets[i]);
  parts.utility *= lam * inv_n;
  parts.total = parts.claim + parts.utility;

  // Claim head, then split into the claim-encoder path and the pooled path.
  Eigen::Vector3d dlogits = t.probs - onehot3(gold);
  Eigen::VectorXd dcat = params.claim_head.backward(t.cat, dlogits);
  Eigen::VectorXd dc2 = dcat.head(t.c2.size());
  Eigen::VectorXd dpooled = dcat.tail(t.pooled.size());

  for (std::size_t i = 0; i < n; ++i) {
    SlotTrace& s = t.slots[i];
    Eigen::Vector2d dulogits = lam * inv_n * (s.u - onehot2(targets[i]));
    Eigen::VectorXd de2;
    if (gumbel) {
      Eigen::VectorXd d_o = dpooled * inv_n;
      d_o += params.utility_head.backward(s.o, dulogits);
      de2 = Eigen::VectorXd::Zero(h);
      Eigen::Vector2d dz = Eigen::Vector2d::Zero();
      for (int r = 0; r < h; ++r) {
        de2[r] = d_o[2 * r] * s.z[0] + d_o[2 * r + 1] * s.z[1];
        dz[0] += d_o[2 * r] * s.e2[r];
        dz[1] += d_o[2 * r + 1] * s.e2[r];
      }
      Eigen::Vector2d dglogits = softmax_backward(s.z, dz) / config.tau;
      de2 += params.gumbel_layer.backward(s.e2, dglogits);
    } else {
      de2 = dpooled * inv_n;
      de2 += params.utility_head.backward(s.e2, dulogits);
    }
    Eigen::VectorXd dea2 = relu_backward(s.ea2, de2);
    Eigen::VectorXd der1 = params.evidence_encoder[1].backward(s.er1, dea2);
    Eigen::VectorXd dea1 = relu_backward(s.ea1, der1);
    params.evidence_encoder[0].backward(s.e0, dea1);
  }

  Eigen::VectorXd dca2 = relu_backward(t.ca2, dc2);
  Eigen::VectorXd dcr1 = params.claim_encoder[1].backward(t.cr1, dca2);
  Eigen::VectorXd dca1 = relu_backward(t.ca1, dcr1);
  params.claim_encoder[0].backward(input.claim_vec, dca1);
  return parts;
}

}  // namespace

LossParts loss_and_grads(VerifierParams& params, const ModelInput& input,
                         Label gold, const std::vector<int>& utility_targets,
                         const TrainConfig& config, const StepNoise& noise) {
  if (params.variant == Variant::V1 || params.variant == Variant::V2)
    return plain_loss_and_grads(params, input, gold, noise);
  return mt_loss_and_grads(params, input, gold, utility_targets, config, noise);
}

LossParts eval_loss(const VerifierParams& params, const ModelInput& input,
                    Label gold, const std::vector<int>& utility_targets,
                    const TrainConfig& config) {
  LossParts parts;
  if (params.variant == Variant::V1 || params.variant == Variant::V2) {
    Prediction p = forward_verifier(params, input.claim_vec, input.evidence_vecs);
    parts.claim = ce_from_probs(p.label_probs, label_index(gold));
    parts.total = parts.claim;
    return parts;
  }
  check_targets(utility_targets, input.evidence_vecs.size());
  Prediction p;
  if (params.variant == Variant::MT) {
    p = forward_mt(params, input.claim_vec, input.evidence_vecs);
  } else {
    Eigen::MatrixXd zero =
        Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(input.evidence_vecs.size()), 2);
    p = forward_mt_gumbel(params, input.claim_vec, input.evidence_vecs, config.tau, zero);
  }
  parts.claim = ce_from_probs(p.label_probs, label_index(gold));
  double usum = 0.0;
  for (std::size_t i = 0; i < p.utilities.size(); ++i) {
    const double prob = utility_targets[i] == 1 ? p.utilities[i] : 1.0 - p.utilities[i];
    usum += -std::log(std::max(prob, 1e-12));
  }
  parts.utility = config.lambda_utility * usum / static_cast<double>(p.utilities.size());
  parts.total = parts.claim + parts.utility;
  return parts;
}

TrainResult train(const std::vector<TrainExample>& examples, const EmbeddingTable& table,
                  const TrainConfig& config, Variant variant, int hidden_dim,
                  const EpochCallback& on_epoch) {
  config.validate();
  if (examples.empty()) throw std::invalid_argument("train: no examples");
  const bool multitask = variant == Variant::MT || variant == Variant::MT_GUMBEL;

  std::vector<ModelInput> inputs;
  std::vector<Label> golds;
  std::vector<std::vector<int>> targets;
  inputs.reserve(examples.size());
  golds.reserve(examples.size());
  targets.reserve(examples.size());
  std::optional<std::pair<int, int>> arity;
  for (const auto& ex : examples) {
    if (ex.claim == nullptr || ex.pool == nullptr)
      throw std::invalid_argument("train: null example");
    if (!ex.claim->gold_label)
      throw std::invalid_argument("train: claim '" + ex.claim->claim_id + "' has no gold label");
    if (multitask) {
      if (!arity) arity = {ex.pool->K, ex.pool->M};
      else if (*arity != std::make_pair(ex.pool->K, ex.pool->M))
        throw std::invalid_argument("train: pools mix different K/M arities");
      std::vector<int> t;
      for (const auto& cand : ex.pool->candidates) {
        if (!cand.utility_target)
          throw std::invalid_argument("train: pool for claim '" + ex.claim->claim_id +
                                      "' is missing utility targets");
        t.push_back(*cand.utility_target);
      }
      targets.push_back(std::move(t));
    } else {
      targets.emplace_back();
    }
    inputs.push_back(build_input(*ex.claim, *ex.pool, table, variant));
    golds.push_back(*ex.claim->gold_label);
  }

  Rng rng(config.seed);
  TrainResult result;
  result.params = make_verifier(variant, table.dim(), hidden_dim, rng);
  auto layer_ptrs = result.params.layers();

  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t step = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t i : order) {
      StepNoise noise = draw_step_noise(result.params, config,
                                       inputs[i].evidence_vecs.size(), rng, true);
      loss_and_grads(result.params, inputs[i], golds[i], targets[i], config, noise);
      sgd_step(layer_ptrs, config, step++);
    }
    // Deterministic end-of-epoch snapshot: evaluation mode, so the recorded
    // history is free of dropout/Gumbel sampling noise.
    LossParts sum;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      LossParts p = eval_loss(result.params, inputs[i], golds[i], targets[i], config);
      sum.total += p.total;
      sum.claim += p.claim;
      sum.utility += p.utility;
    }
    const double inv = 1.0 / static_cast<double>(inputs.size());
    LossParts mean{sum.total * inv, sum.claim * inv, sum.utility * inv};
    result.loss_history.push_back(mean.total);
    result.claim_loss_history.push_back(mean.claim);
    result.utility_loss_history.push_back(mean.utility);
    if (on_epoch) on_epoch(epoch, mean);
  }
  return result;
}

Prediction predict(const VerifierParams& params, const AnnotatedClaim& claim,
                   const EvidencePool& pool, const EmbeddingTable& table,
                   const PredictOptions& options) {
  const bool multitask = params.is_multitask();
  if (!multitask && options.mode == PredictMode::UtilityFiltered)
    throw std::invalid_argument(
        "predict: utility filtering needs a multi-task model (mt or mt-gumbel)");
  ModelInput input = build_input(claim, pool, table, params.variant, options.oov);

  Prediction pred;
  if (params.variant == Variant::V1 || params.variant == Variant::V2) {
    pred = forward_verifier(params, input.claim_vec, input.evidence_vecs);
    for (const auto& cand : pool.candidates)
      if (!cand.is_pad()) pred.selected_evidence.push_back(cand.ref());
  } else {
    if (params.variant == Variant::MT) {
      pred = forward_mt(params, input.claim_vec, input.evidence_vecs);
    } else {
      Eigen::MatrixXd zero =
          Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(input.evidence_vecs.size()), 2);
      pred = forward_mt_gumbel(params, input.claim_vec, input.evidence_vecs, options.tau, zero);
    }
    for (std::size_t i = 0; i < pool.candidates.size(); ++i) {
      const auto& cand = pool.candidates[i];
      if (cand.is_pad()) continue;
      if (options.mode == PredictMode::UtilityFiltered && pred.utilities[i] <= 0.5) continue;
      pred.selected_evidence.push_back(cand.ref());
    }
  }
  pred.claim_id = claim.claim_id;
  return pred;
}

namespace {

constexpr int kCheckpointVersion = 1;

std::vector<std::pair<std::string, DenseLayer*>> named_layers(VerifierParams& p) {
  std::vector<std::pair<std::string, DenseLayer*>> out;
  if (p.variant == Variant::V1 || p.variant == Variant::V2) {
    for (std::size_t i = 0; i < p.plain_stack.size(); ++i)
      out.emplace_back("plain." + std::to_string(i), &p.plain_stack[i]);
    return out;
  }
  for (std::size_t i = 0; i < p.claim_encoder.size(); ++i)
    out.emplace_back("claim_encoder." + std::to_string(i), &p.claim_encoder[i]);
  for (std::size_t i = 0; i < p.evidence_encoder.size(); ++i)
    out.emplace_back("evidence_encoder." + std::to_string(i), &p.evidence_encoder[i]);
  out.emplace_back("claim_head", &p.claim_head);
  out.emplace_back("utility_head", &p.utility_head);
  if (p.variant == Variant::MT_GUMBEL) out.emplace_back("gumbel_layer", &p.gumbel_layer);
  return out;
}

}  // namespace

void save_checkpoint(const std::string& path, const VerifierParams& params,
                     const TrainConfig& config) {
  ordered_json doc;
  doc["format_version"] = kCheckpointVersion;
  doc["variant"] = to_string(params.variant);
  doc["embed_dim"] = params.embed_dim;
  doc["hidden_dim"] = params.hidden_dim;
  if (params.variant == Variant::MT_GUMBEL) doc["outer_flatten"] = "row_major";
  doc["config"] = config.to_json();
  ordered_json layers = ordered_json::object();
  auto named = named_layers(const_cast<VerifierParams&>(params));
  for (auto& [name, layer] : named) layers[name] = layer_to_json(*layer);
  doc["layers"] = std::move(layers);

  std::ofstream out(path);
  if (!out) throw IoError("cannot write checkpoint: " + path);
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("failed writing checkpoint: " + path);
}

std::pair<VerifierParams, TrainConfig> load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read checkpoint: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ParseError("checkpoint " + path + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("format_version"))
    throw ValidationError("checkpoint " + path + ": missing format_version");
  if (doc["format_version"].get<int>() != kCheckpointVersion)
    throw ValidationError("checkpoint " + path + ": unsupported format_version");

  TrainConfig config = TrainConfig::from_json(doc.at("config"));
  const Variant variant = parse_variant(doc.at("variant").get<std::string>());
  const int embed_dim = doc.at("embed_dim").get<int>();
  const int hidden_dim = doc.at("hidden_dim").get<int>();
  Rng rng(0);
  VerifierParams params = make_verifier(variant, embed_dim, hidden_dim, rng);

  const auto& layers = doc.at("layers");
  auto named = named_layers(params);
  for (auto& [name, layer] : named) {
    if (!layers.contains(name))
      throw ValidationError("checkpoint " + path + ": missing layer '" + name + "'");
    DenseLayer loaded = layer_from_json(layers.at(name));
    if (loaded.W.rows() != layer->W.rows() || loaded.W.cols() != layer->W.cols())
      throw ValidationError("checkpoint " + path + ": layer '" + name +
                            "' has the wrong shape for embed_dim/hidden_dim");
    *layer = std::move(loaded);
  }
  return {std::move(params), config};
}

void save_predictions(const std::string& path, const std::vector<Prediction>& preds) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write predictions: " + path);
  for (const auto& p : preds) {
    ordered_json line;
    line["claim_id"] = p.claim_id;
    line["predicted_label"] = to_string(p.label);
    ordered_json ev = ordered_json::array();
    for (const auto& ref : p.selected_evidence)
      ev.push_back(ordered_json::array({ref.doc_id, ref.index}));
    line["predicted_evidence"] = std::move(ev);
    out << line.dump() << '\n';
  }
  if (!out) throw IoError("failed writing predictions: " + path);
}

std::vector<Prediction> load_predictions(const std::string& path) {
  std::vector<Prediction> preds;
  for_each_jsonl(path, [&](std::size_t line_no, const json& line) {
    Prediction p;
    try {
      p.claim_id = line.at("claim_id").get<std::string>();
      p.label = parse_label(line.at("predicted_label").get<std::string>());
      for (const auto& pair : line.at("predicted_evidence")) {
        if (!pair.is_array() || pair.size() != 2)
          throw ValidationError("predicted_evidence entries must be [doc_id, index] pairs");
        p.selected_evidence.push_back(
            {pair[0].get<std::string>(), pair[1].get<int>()});
      }
    } catch (const json::exception& e) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    preds.push_back(std::move(p));
  });
  return preds;
}

}  // namespace claimcheck
