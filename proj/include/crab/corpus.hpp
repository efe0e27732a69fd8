#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crab/rng.hpp"

namespace crab {

// Fixed class order used everywhere: FAVOR, AGAINST, NONE.
enum class Stance : int { Favor = 0, Against = 1, None = 2 };

constexpr int kNumStances = 3;
constexpr std::array<const char*, 3> kStanceNames = {"FAVOR", "AGAINST", "NONE"};

Stance stance_from_string(std::string_view s);  // throws ParseError
const char* stance_to_string(Stance s);

enum class Origin : int { Ingested = 0, Synthetic = 1, Replaced = 2, Negated = 3 };
Origin origin_from_string(std::string_view s);
const char* origin_to_string(Origin o);

// One (target, text, stance) record plus derived sub-task labels.
struct Example {
    std::string id;
    std::string target;
    std::string text;
    Stance stance = Stance::None;
    std::optional<bool> tmt_label;  // target mentioned in text
    std::optional<bool> stt_label;  // any stance expressed (stance != NONE)
    Origin origin = Origin::Ingested;
};

// ---------------------------------------------------------------------------
// Ingestion and serialization
// ---------------------------------------------------------------------------

// Reads a UTF-8 TSV with header columns ID, Target, Tweet, Stance (matched
// case-insensitively; an optional Origin column is honored).
std::vector<Example> load_semeval(const std::string& path);

// Serializes in the same schema; with_origin appends the Origin column.
// Field values must be tab- and newline-free.
void save_tsv(const std::vector<Example>& examples, const std::string& path, bool with_origin);

std::map<std::string, int> target_counts(const std::vector<Example>& examples);
std::vector<std::string> target_inventory(const std::vector<Example>& examples);

// One line per target: "Target<TAB>alias1,alias2,...". Aliases are lowercase.
using AliasTable = std::map<std::string, std::vector<std::string>>;
AliasTable load_alias_table(const std::string& path);
void save_alias_table(const AliasTable& table, const std::string& path);

// ---------------------------------------------------------------------------
// Tokenization and sub-task labels
// ---------------------------------------------------------------------------

// Lowercases, splits on whitespace, strips leading/trailing ASCII punctuation
// except a leading '#' or '@'. "#SemST"-style tags stay single tokens.
std::vector<std::string> tokenize(std::string_view text);

// True iff any alias of the example's target occurs as a token of the text or
// as a substring of a '#'-initial token. Missing target -> ConfigError.
bool derive_tmt_label(const Example& example, const AliasTable& aliases);

// True iff stance != NONE.
bool derive_stt_label(const Example& example);

// Fills tmt/stt in place for a whole set.
void derive_labels(std::vector<Example>& examples, const AliasTable& aliases);

// ---------------------------------------------------------------------------
// Vocabulary and feature encoding
// ---------------------------------------------------------------------------

// Token index map with index 0 reserved for UNK.
struct Vocab {
    std::map<std::string, int> index;
    int min_freq = 1;
    std::uint64_t built_from = 0;  // dataset fingerprint

    std::size_t size() const { return index.size() + 1; }  // +1 for UNK
    int lookup(const std::string& token) const;            // 0 when OOV
};

struct VocabPair {
    Vocab text;
    Vocab target;
    std::uint64_t fingerprint = 0;
};

std::uint64_t dataset_fingerprint(const std::vector<Example>& examples);

// Text vocabulary from tweet tokens at min_freq, target vocabulary from
// target tokens (min_freq 1: target strings repeat across a dataset).
VocabPair build_vocab(const std::vector<Example>& examples, int min_freq);

struct EncodedExample {
    std::string id;
    std::vector<double> d_feat;     // text bag-of-words, L1-normalized
    std::vector<double> t_feat;     // target bag-of-words
    std::vector<double> pair_feat;  // [d_feat, t_feat, d_feat * proj(target)]
    Stance stance = Stance::None;
    std::optional<bool> tmt_label;
    std::optional<bool> stt_label;
};

EncodedExample encode(const Example& example, const VocabPair& vocabs);
std::vector<EncodedExample> encode_all(const std::vector<Example>& examples,
                                       const VocabPair& vocabs);

// ---------------------------------------------------------------------------
// Synthetic biased corpora
// ---------------------------------------------------------------------------

// Desk-scale surrogate for a text-side shortcut: the true label depends only
// on the (target, opinion-pattern) pair, while bias_token co-occurs with
// FAVOR at rate rho in train/test_iid and at 1-rho in test_anti when
// flip_in_test is set.
struct SyntheticSpec {
    int n_targets = 6;
    int n_train = 2000;
    int n_test = 600;
    std::string bias_token = "swag";
    double bias_strength = 0.9;  // rho in [0.5, 1]
    bool flip_in_test = true;
    std::array<double, 3> label_prior = {0.25, 0.25, 0.5};
    std::string template_set = "v1";
    std::uint64_t seed = 0;
};

struct SyntheticCorpus {
    std::vector<Example> train;
    std::vector<Example> test_iid;
    std::vector<Example> test_anti;
    AliasTable aliases;  // each synthetic target aliased by its own token
};

SyntheticCorpus gen_synthetic(const SyntheticSpec& spec);

// ---------------------------------------------------------------------------
// Hard test sets
// ---------------------------------------------------------------------------

// For each test example, one copy per pool target that differs from the
// original and is not mentioned in the text; stance relabeled NONE.
std::vector<Example> make_target_replaced(const std::vector<Example>& test_set,
                                          const std::vector<std::string>& target_pool,
                                          const AliasTable& aliases);

// 1:1 rewrite: target becomes "opposition to {target}", FAVOR and AGAINST
// swap, NONE stays.
std::vector<Example> make_target_negated(const std::vector<Example>& test_set);

// Add-1 smoothed pointwise mutual information between token presence and
// label over a training set.
class PmiTable {
  public:
    PmiTable() = default;
    static PmiTable build(const std::vector<Example>& train_set);

    // log [ P(token present, label) / (P(token present) P(label)) ]; tokens
    // unseen in training get the smoothed zero-count value.
    double pmi(const std::string& token, Stance label) const;
    double max_abs_pmi(const std::string& token) const;

    const std::map<std::string, std::array<std::int64_t, 3>>& counts() const { return counts_; }

  private:
    std::map<std::string, std::array<std::int64_t, 3>> counts_;  // presence per label
    std::array<std::int64_t, 3> label_counts_ = {0, 0, 0};
    std::int64_t total_ = 0;
};

struct PmiSelection {
    std::vector<Example> subset;
    PmiTable table;
};

// Keeps examples whose strongest token-label association is below threshold.
PmiSelection select_pmi_tail(const std::vector<Example>& test_set,
                             const std::vector<Example>& train_set, double threshold);

// Keeps examples misclassified by all supplied predictors (>= 3 required).
// predictions[k][i] is predictor k's label for test_set[i].
std::vector<Example> select_tof(const std::vector<Example>& test_set,
                                const std::vector<std::vector<Stance>>& predictions);

// Reference sizes of the published SemEval-2016 hard test sets, used for
// side-by-side display next to locally built counts.
struct HardSetReferenceCounts {
    int tof = 319;
    int pmi = 403;
    int replaced = 3978;
    int negated = 1249;
};

}  // namespace crab
