#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crab/corpus.hpp"
#include "crab/model.hpp"

namespace crab {

// Inference modes reported by the harness.
enum class PredictMode { Tie, Factual, TextOnly, Poe, Majority };
const char* predict_mode_name(PredictMode mode);
PredictMode predict_mode_from_string(std::string_view name);

struct Prediction {
    std::string id;
    Stance label = Stance::None;
    std::array<double, 3> scores{};
    PredictMode mode = PredictMode::Tie;
};

// argmax with ties broken toward the earlier class index.
Stance argmax_stance(const std::array<double, 3>& scores);

Prediction predict_tie(const CausalStanceModel& model, const EncodedExample& encoded);
Prediction predict_factual(const CausalStanceModel& model, const EncodedExample& encoded);
Prediction predict_text_only(const CausalStanceModel& model, const EncodedExample& encoded);

// Scores proportional to the elementwise product of the two distributions,
// renormalized. Inputs must each sum to 1 within 1e-6.
Prediction poe_baseline(const std::array<double, 3>& text_only_probs,
                        const std::array<double, 3>& full_probs);

// Per-target most frequent training stance; global majority for unseen
// targets.
struct MajorityVote {
    std::map<std::string, Stance> per_target;
    Stance global = Stance::None;
};
MajorityVote majority_vote_baseline(const std::vector<Example>& train_set);
Stance predict_majority(const MajorityVote& mv, const std::string& target);

struct F1Scores {
    double f_favor = 0, f_against = 0, f_macro = 0;
};

// Pooled per-class precision/recall over all examples, F = 2PR/(P+R) with
// F = 0 when P+R = 0; F_macro averages FAVOR and AGAINST only.
F1Scores macro_f1(const std::vector<Stance>& predictions, const std::vector<Stance>& golds);

struct PerTargetScore {
    double f_macro = 0;
    int support = 0;
};

struct SliceRow {
    std::string slice;
    std::string mode;
    int support = 0;
    std::optional<F1Scores> scores;        // absent for empty slices
    double f_macro_target_avg = 0;         // secondary metric: mean per-target F_macro
    std::map<std::string, PerTargetScore> per_target;
};

struct EvalReport {
    std::vector<SliceRow> rows;
    std::map<std::string, std::string> metadata;  // config echo, seeds, fingerprints
};

struct EvalOptions {
    int jobs = 1;
    const MajorityVote* majority = nullptr;  // required for PredictMode::Majority
    std::optional<std::uint64_t> data_fingerprint;  // compared against the model's
};

using NamedSlice = std::pair<std::string, std::vector<Example>>;

EvalReport evaluate_slices(const CausalStanceModel& model, const std::vector<NamedSlice>& slices,
                           const std::vector<PredictMode>& modes, const EvalOptions& options = {});

std::string report_to_json(const EvalReport& report);
std::string report_to_text(const EvalReport& report);
std::string report_to_csv(const EvalReport& report);

}  // namespace crab
