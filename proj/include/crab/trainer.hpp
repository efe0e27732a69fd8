#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "crab/adam.hpp"
#include "crab/corpus.hpp"
#include "crab/model.hpp"

namespace crab {

struct TrainConfig {
    double lambda1 = 0.1;  // TMT loss weight
    double lambda2 = 0.2;  // STT loss weight
    // From-scratch MLP default; the published fine-tuning recipe uses 5e-5.
    double learning_rate = 1e-3;
    int batch_size = 8;
    int epochs = 20;
    std::uint64_t seed = 0;
    double lambda_grl = 1.0;
    bool grl_warmup = false;  // linear ramp of lambda_grl over the first epoch
    double val_fraction = 0.15;
    bool use_grl = true;
    bool use_tmt = true;
    bool use_stt = true;
    int patience = 10;  // epochs without val improvement before stopping; 0 disables
    std::int64_t hidden = 64;
    double dropout_p = 0.5;
    int min_freq = 1;
    // Product-of-experts training variant: the fused loss is replaced by
    // cross-entropy over softmax(log p_text_only + log p_fused) with the
    // text-only distribution detached.
    bool poe_training = false;
};

struct EpochRecord {
    int epoch = 0;
    double l_c = 0, l_d = 0, l_tmt = 0, l_stt = 0, l_kl = 0;
    double val_f1 = 0;
    double a = 0;
};

struct TrainHistory {
    std::vector<EpochRecord> epochs;
};

// CSV columns: epoch,l_c,l_d,l_tmt,l_stt,l_kl,val_f1,a
void write_history_csv(const TrainHistory& history, const std::string& path);

struct LossBreakdown {
    double total = 0;
    double l_c = 0, l_d = 0, l_tmt = 0, l_stt = 0;
};

// Classification loss over a batch: cross-entropy of the fused factual
// scores (L_C) and of the text-only counterfactual scores (L_D), plus the
// weighted adversarial sub-task losses. Evaluation mode (no dropout).
LossBreakdown compute_cls_loss(const CausalStanceModel& model,
                               const std::vector<EncodedExample>& batch,
                               const TrainConfig& config);

// Mean over classes and examples of -p(.|d,t,c) log p(.|d,t*,c*); the
// factual distribution is a constant.
double compute_kl_loss(const CausalStanceModel& model, const std::vector<EncodedExample>& batch,
                       const TrainConfig& config);

// One optimizer step on the KL loss. Touches only the parameter `a`.
double kl_step(CausalStanceModel& model, const Batch& batch, AdamState& state_a);

struct TrainResult {
    CausalStanceModel model;
    TrainHistory history;
};

// Builds the vocabulary from the train split only, then runs the per-batch
// schedule: one Adam step on the classification loss over all trainable
// parameters, then one Adam step on the KL loss over `a` alone. Returns the
// parameters with the best validation macro-F1 under TIE inference.
TrainResult train(const TrainConfig& config, const std::vector<Example>& train_set,
                  const std::vector<Example>& val_set);

// Seeded split helper (shuffle stream of `seed`).
std::pair<std::vector<Example>, std::vector<Example>> split_train_val(
    const std::vector<Example>& examples, double val_fraction, std::uint64_t seed);

}  // namespace crab
