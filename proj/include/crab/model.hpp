#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crab/corpus.hpp"
#include "crab/graph.hpp"
#include "crab/rng.hpp"
#include "crab/tensor.hpp"

namespace crab {

struct ModelConfig {
    std::int64_t d_in = 0;  // |text vocab|
    std::int64_t t_in = 0;  // |target vocab|
    std::int64_t c_in = 0;  // 2*|text vocab| + |target vocab|
    std::int64_t hidden = 64;
    double dropout_p = 0.5;
    double lambda_grl = 1.0;
};

// Three-branch stance model: MLP encoders (affine -> tanh -> dropout ->
// affine) for text, target, and pair features; affine heads to 3 stance
// logits per branch; a learnable scalar `a` standing in for both void
// branches; and two adversarial heads (target-mentioned, stance-expressed)
// fed through a gradient reversal layer.
struct CausalStanceModel {
    ModelConfig config;

    Tensor enc_d_w1, enc_d_b1, enc_d_w2, enc_d_b2;
    Tensor enc_t_w1, enc_t_b1, enc_t_w2, enc_t_b2;
    Tensor enc_c_w1, enc_c_b1, enc_c_w2, enc_c_b2;
    Tensor head_d_w, head_d_b;
    Tensor head_t_w, head_t_b;
    Tensor head_c_w, head_c_b;
    Tensor a;  // shape [1]
    Tensor head_tmt_w, head_tmt_b;
    Tensor head_stt_w, head_stt_b;

    VocabPair vocabs;
    std::array<std::string, 3> label_order = {"FAVOR", "AGAINST", "NONE"};

    static CausalStanceModel init(const ModelConfig& config, const VocabPair& vocabs, Rng& rng);

    struct NamedParam {
        std::string name;
        Tensor* tensor;
    };
    // Fixed-order view of every learnable tensor.
    std::vector<NamedParam> parameters();
    std::vector<std::pair<std::string, const Tensor*>> parameters() const;

    std::uint64_t param_checksum() const;
};

struct BranchScores {
    std::array<double, 3> j_d{}, j_t{}, j_c{};
};

struct BranchForward {
    BranchScores scores;
    std::vector<double> h_d;  // text-branch hidden vector, for adversarial heads
};

// Factual, counterfactual, and void outcomes plus their differences.
// te is assembled as nde + tie so the decomposition identities hold exactly
// in floating point; tie is y_fact - y_cf, the score used at inference.
struct EffectDecomposition {
    std::array<double, 3> y_fact{}, y_cf{}, y_null{};
    std::array<double, 3> te{}, nde{}, tie{};
};

struct AdversarialLogits {
    std::array<double, 3> stance_logits_d{};
    std::array<double, 2> tmt_logits{}, stt_logits{};
};

// ---------------------------------------------------------------------------
// Inference-path operations (plain math, no graph)
// ---------------------------------------------------------------------------

BranchForward branch_scores(const CausalStanceModel& model, const EncodedExample& encoded,
                            bool train_flag = false, Rng* dropout_rng = nullptr);

// Per class: log(sigmoid(j_d + j_t + j_c)), computed as -softplus(-z).
std::array<double, 3> fuse(const std::array<double, 3>& j_d, const std::array<double, 3>& j_t,
                           const std::array<double, 3>& j_c);

// fuse(j_d, a*1, a*1): the text-only counterfactual outcome.
std::array<double, 3> counterfactual_fuse(const CausalStanceModel& model,
                                          const std::array<double, 3>& j_d);

// fuse(a*1, a*1, a*1): class-uniform no-treatment outcome.
std::array<double, 3> null_fuse(const CausalStanceModel& model);

EffectDecomposition decompose_effects(const CausalStanceModel& model,
                                      const EncodedExample& encoded);

// Head values on h_d; forward values are identical with or without the
// gradient reversal layer interposed.
AdversarialLogits adversarial_forward(const CausalStanceModel& model,
                                      const std::vector<double>& h_d);

// ---------------------------------------------------------------------------
// Graph-path operations (training)
// ---------------------------------------------------------------------------

// Column-stacked feature matrices for a batch of encoded examples.
struct Batch {
    Tensor d, t, c;  // [n, d_in], [n, t_in], [n, c_in]
    std::vector<Stance> stance;
    std::vector<std::optional<bool>> tmt, stt;
    std::int64_t size = 0;
};

Batch make_batch(const std::vector<EncodedExample>& encoded, const std::vector<int>& indices);
Batch make_batch(const std::vector<EncodedExample>& encoded);

struct GraphForward {
    Tensor j_d, j_t, j_c;  // [n, 3]
    Tensor h_d;            // [n, hidden]
    Tensor a_leaf;         // [1]
    std::map<std::string, int> param_nodes;  // parameter name -> leaf node id
};

// Binds every parameter as a graph leaf and runs the three encoders + heads.
GraphForward forward_branches(Graph& graph, CausalStanceModel& model, const Batch& batch,
                              bool train_flag);

// z = j_d + j_t + j_c per class; returns -softplus(-z).
Tensor fuse_in_graph(Graph& graph, const Tensor& j_d, const Tensor& j_t, const Tensor& j_c);
// z = j_d + 2a broadcast; returns -softplus(-z).
Tensor counterfactual_fuse_in_graph(Graph& graph, const Tensor& j_d, const Tensor& a_leaf);

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

struct ModelLoadResult {
    CausalStanceModel model;
    std::vector<std::string> warnings;
};

// Versioned binary parameter dump embedding the vocabularies, label order,
// and config echo. Round-trips all parameters bitwise.
void save_model(const CausalStanceModel& model, const std::string& path);
ModelLoadResult load_model(const std::string& path,
                           std::optional<std::uint64_t> expected_fingerprint = std::nullopt);

}  // namespace crab
