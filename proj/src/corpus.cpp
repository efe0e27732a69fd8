#include "crab/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "crab/errors.hpp"

namespace crab {

namespace {

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool is_punct(char c) {
    return std::ispunct(static_cast<unsigned char>(c)) != 0;
}

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, '\t')) out.push_back(field);
    if (!line.empty() && line.back() == '\t') out.emplace_back();
    return out;
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

std::uint64_t fnv1a_append(std::uint64_t h, std::string_view s) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string strip_spaces(std::string_view s) {
    std::string out;
    for (char c : s)
        if (c != ' ') out.push_back(c);
    return out;
}

}  // namespace

Stance stance_from_string(std::string_view s) {
    const std::string up = [&] {
        std::string u(s);
        std::transform(u.begin(), u.end(), u.begin(),
                       [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
        return u;
    }();
    if (up == "FAVOR") return Stance::Favor;
    if (up == "AGAINST") return Stance::Against;
    if (up == "NONE") return Stance::None;
    throw ParseError("unknown stance label '" + std::string(s) + "'");
}

const char* stance_to_string(Stance s) {
    return kStanceNames[static_cast<std::size_t>(s)];
}

Origin origin_from_string(std::string_view s) {
    const std::string lo = to_lower(s);
    if (lo == "ingested") return Origin::Ingested;
    if (lo == "synthetic") return Origin::Synthetic;
    if (lo == "replaced") return Origin::Replaced;
    if (lo == "negated") return Origin::Negated;
    throw ParseError("unknown origin '" + std::string(s) + "'");
}

const char* origin_to_string(Origin o) {
    switch (o) {
        case Origin::Ingested: return "ingested";
        case Origin::Synthetic: return "synthetic";
        case Origin::Replaced: return "replaced";
        case Origin::Negated: return "negated";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Ingestion
// ---------------------------------------------------------------------------

std::vector<Example> load_semeval(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw SchemaError("'" + path + "' is empty (no header)");
    line = strip_cr(line);
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
        static_cast<unsigned char>(line[1]) == 0xBB && static_cast<unsigned char>(line[2]) == 0xBF) {
        line.erase(0, 3);  // UTF-8 BOM
    }

    const auto header = split_tabs(line);
    int idx_id = -1, idx_target = -1, idx_tweet = -1, idx_stance = -1, idx_origin = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const std::string h = to_lower(header[i]);
        if (h == "id") idx_id = static_cast<int>(i);
        else if (h == "target") idx_target = static_cast<int>(i);
        else if (h == "tweet") idx_tweet = static_cast<int>(i);
        else if (h == "stance") idx_stance = static_cast<int>(i);
        else if (h == "origin") idx_origin = static_cast<int>(i);
    }
    for (auto [idx, name] : {std::pair{idx_id, "ID"}, {idx_target, "Target"}, {idx_tweet, "Tweet"},
                             {idx_stance, "Stance"}}) {
        if (idx < 0) throw SchemaError("'" + path + "': missing column '" + name + "'");
    }

    std::vector<Example> out;
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto fields = split_tabs(line);
        const int needed = std::max({idx_id, idx_target, idx_tweet, idx_stance, idx_origin});
        if (static_cast<int>(fields.size()) <= needed) {
            throw ParseError("row has " + std::to_string(fields.size()) + " fields, expected >= " +
                                 std::to_string(needed + 1),
                             line_no);
        }
        Example e;
        e.id = fields[static_cast<std::size_t>(idx_id)];
        e.target = fields[static_cast<std::size_t>(idx_target)];
        e.text = fields[static_cast<std::size_t>(idx_tweet)];
        try {
            e.stance = stance_from_string(fields[static_cast<std::size_t>(idx_stance)]);
        } catch (const ParseError& p) {
            throw ParseError(p.what(), line_no);
        }
        if (idx_origin >= 0) {
            try {
                e.origin = origin_from_string(fields[static_cast<std::size_t>(idx_origin)]);
            } catch (const ParseError& p) {
                throw ParseError(p.what(), line_no);
            }
        }
        out.push_back(std::move(e));
    }
    return out;
}

void save_tsv(const std::vector<Example>& examples, const std::string& path, bool with_origin) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << "ID\tTarget\tTweet\tStance";
    if (with_origin) out << "\tOrigin";
    out << "\n";
    for (const auto& e : examples) {
        for (const std::string* f : {&e.id, &e.target, &e.text}) {
            if (f->find('\t') != std::string::npos || f->find('\n') != std::string::npos) {
                throw ContractError("save_tsv: field of example '" + e.id +
                                    "' contains a tab or newline");
            }
        }
        out << e.id << '\t' << e.target << '\t' << e.text << '\t' << stance_to_string(e.stance);
        if (with_origin) out << '\t' << origin_to_string(e.origin);
        out << "\n";
    }
    if (!out) throw IoError("failed writing '" + path + "'");
}

std::map<std::string, int> target_counts(const std::vector<Example>& examples) {
    std::map<std::string, int> counts;
    for (const auto& e : examples) counts[e.target] += 1;
    return counts;
}

std::vector<std::string> target_inventory(const std::vector<Example>& examples) {
    std::set<std::string> seen;
    std::vector<std::string> out;
    for (const auto& e : examples) {
        if (seen.insert(e.target).second) out.push_back(e.target);
    }
    return out;
}

AliasTable load_alias_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open alias table '" + path + "'");
    AliasTable table;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty() || line[0] == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw ParseError("alias line has no tab separator", line_no);
        }
        const std::string target = line.substr(0, tab);
        std::vector<std::string> aliases;
        std::string alias;
        std::stringstream ss(line.substr(tab + 1));
        while (std::getline(ss, alias, ',')) {
            // trim surrounding blanks
            const auto b = alias.find_first_not_of(" \t");
            const auto e = alias.find_last_not_of(" \t");
            if (b == std::string::npos) continue;
            aliases.push_back(to_lower(alias.substr(b, e - b + 1)));
        }
        if (aliases.empty()) {
            throw ParseError("alias list for target '" + target + "' is empty", line_no);
        }
        table[target] = std::move(aliases);
    }
    return table;
}

void save_alias_table(const AliasTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write alias table '" + path + "'");
    for (const auto& [target, aliases] : table) {
        out << target << '\t';
        for (std::size_t i = 0; i < aliases.size(); ++i) {
            if (i) out << ',';
            out << aliases[i];
        }
        out << "\n";
    }
}

// ---------------------------------------------------------------------------
// Tokenization and labels
// ---------------------------------------------------------------------------

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::string raw;
    auto flush = [&] {
        if (raw.empty()) return;
        std::size_t b = 0, e = raw.size();
        while (e > b && is_punct(raw[e - 1])) --e;
        while (b < e && is_punct(raw[b]) && raw[b] != '#' && raw[b] != '@') ++b;
        if (e > b) out.push_back(raw.substr(b, e - b));
        raw.clear();
    };
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            flush();
        } else {
            raw.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    flush();
    return out;
}

bool derive_tmt_label(const Example& example, const AliasTable& aliases) {
    const auto it = aliases.find(example.target);
    if (it == aliases.end()) {
        throw ConfigError("no alias entry for target '" + example.target + "'");
    }
    const auto tokens = tokenize(example.text);
    for (const std::string& alias : it->second) {
        const std::string packed = strip_spaces(alias);
        for (const std::string& tok : tokens) {
            if (tok == alias) return true;
            if (tok[0] == '#' && tok.find(packed) != std::string::npos) return true;
        }
    }
    return false;
}

bool derive_stt_label(const Example& example) {
    return example.stance != Stance::None;
}

void derive_labels(std::vector<Example>& examples, const AliasTable& aliases) {
    for (auto& e : examples) {
        e.tmt_label = derive_tmt_label(e, aliases);
        e.stt_label = derive_stt_label(e);
    }
}

// ---------------------------------------------------------------------------
// Vocabulary and encoding
// ---------------------------------------------------------------------------

int Vocab::lookup(const std::string& token) const {
    const auto it = index.find(token);
    return it == index.end() ? 0 : it->second;
}

std::uint64_t dataset_fingerprint(const std::vector<Example>& examples) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& e : examples) {
        h = fnv1a_append(h, e.id);
        h = fnv1a_append(h, "\x1f");
        h = fnv1a_append(h, e.target);
        h = fnv1a_append(h, "\x1f");
        h = fnv1a_append(h, e.text);
        h = fnv1a_append(h, "\x1f");
        h = fnv1a_append(h, stance_to_string(e.stance));
        h = fnv1a_append(h, "\x1e");
    }
    return h;
}

VocabPair build_vocab(const std::vector<Example>& examples, int min_freq) {
    if (min_freq < 1) throw ContractError("build_vocab: min_freq must be >= 1");
    std::map<std::string, int> text_counts, target_counts_;
    for (const auto& e : examples) {
        for (const auto& t : tokenize(e.text)) text_counts[t] += 1;
        for (const auto& t : tokenize(e.target)) target_counts_[t] += 1;
    }
    VocabPair vp;
    vp.fingerprint = dataset_fingerprint(examples);
    vp.text.min_freq = min_freq;
    vp.text.built_from = vp.fingerprint;
    int next = 1;  // 0 reserved for UNK
    for (const auto& [tok, count] : text_counts) {
        if (count >= min_freq) vp.text.index[tok] = next++;
    }
    vp.target.min_freq = 1;
    vp.target.built_from = vp.fingerprint;
    next = 1;
    for (const auto& [tok, count] : target_counts_) {
        (void)count;
        vp.target.index[tok] = next++;
    }
    return vp;
}

namespace {

std::vector<double> bag_of_words(const std::vector<std::string>& tokens, const Vocab& vocab) {
    std::vector<double> feat(vocab.size(), 0.0);
    for (const auto& t : tokens) feat[static_cast<std::size_t>(vocab.lookup(t))] += 1.0;
    double mass = 0.0;
    for (double v : feat) mass += v;
    if (mass > 0.0) {
        for (double& v : feat) v /= mass;
    }
    return feat;
}

}  // namespace

EncodedExample encode(const Example& example, const VocabPair& vocabs) {
    EncodedExample enc;
    enc.id = example.id;
    enc.stance = example.stance;
    enc.tmt_label = example.tmt_label;
    enc.stt_label = example.stt_label;

    const auto text_tokens = tokenize(example.text);
    const auto target_tokens = tokenize(example.target);
    enc.d_feat = bag_of_words(text_tokens, vocabs.text);
    enc.t_feat = bag_of_words(target_tokens, vocabs.target);

    // Target tokens projected onto the text vocabulary; the product with
    // d_feat flags token overlap between text and target.
    const auto t_proj = bag_of_words(target_tokens, vocabs.text);
    enc.pair_feat.reserve(2 * enc.d_feat.size() + enc.t_feat.size());
    enc.pair_feat.insert(enc.pair_feat.end(), enc.d_feat.begin(), enc.d_feat.end());
    enc.pair_feat.insert(enc.pair_feat.end(), enc.t_feat.begin(), enc.t_feat.end());
    for (std::size_t i = 0; i < enc.d_feat.size(); ++i) {
        enc.pair_feat.push_back(enc.d_feat[i] * t_proj[i]);
    }
    return enc;
}

std::vector<EncodedExample> encode_all(const std::vector<Example>& examples,
                                       const VocabPair& vocabs) {
    std::vector<EncodedExample> out;
    out.reserve(examples.size());
    for (const auto& e : examples) out.push_back(encode(e, vocabs));
    return out;
}

// ---------------------------------------------------------------------------
// Synthetic corpora
// ---------------------------------------------------------------------------

namespace {

const std::vector<std::string> kTopicPool = {
    "cats",    "tea",     "robots",  "winter",  "jazz",      "soccer",  "chess",
    "gardens", "pizza",   "cinema",  "cycling", "astronomy", "poetry",  "sailing",
    "coffee",  "painting", "hockey", "origami", "trains",    "deserts"};

const std::vector<std::string> kFavorTemplates = {
    "i truly support %",
    "% deserves every bit of praise",
    "count me in as a fan of %",
    "we should all celebrate %",
};
const std::vector<std::string> kAgainstTemplates = {
    "i firmly oppose %",
    "% deserves none of the hype",
    "count me in as a critic of %",
    "we should all question %",
};
const std::vector<std::string> kNeutralTemplates = {
    "% came up in conversation today",
    "saw a long article about % this morning",
    "people keep discussing % lately",
    "there was a show about % on tv",
};
const std::vector<std::string> kFillers = {
    "to be honest",
    "all things considered",
    "no doubt about it",
    "for what it is worth",
};

// Share of NONE examples that voice an opinion about a different topic
// (the rest mention the target neutrally). Part of template set v1.
constexpr double kNoneOtherTopicFrac = 0.75;

std::string instantiate(const std::string& tmpl, const std::string& topic) {
    std::string out = tmpl;
    const auto pos = out.find('%');
    out.replace(pos, 1, topic);
    return out;
}

std::set<std::string> template_token_set() {
    std::set<std::string> toks;
    auto absorb = [&](const std::vector<std::string>& list) {
        for (const auto& t : list)
            for (const auto& tok : tokenize(t))
                if (tok != "%") toks.insert(tok);
    };
    absorb(kFavorTemplates);
    absorb(kAgainstTemplates);
    absorb(kNeutralTemplates);
    absorb(kFillers);
    return toks;
}

void validate_spec(const SyntheticSpec& spec, const std::vector<std::string>& topics) {
    if (spec.bias_strength < 0.5 || spec.bias_strength > 1.0) {
        throw ContractError("gen_synthetic: bias_strength must lie in [0.5, 1], got " +
                            std::to_string(spec.bias_strength));
    }
    if (spec.n_targets < 2) throw ContractError("gen_synthetic: n_targets must be >= 2");
    if (spec.n_train < 0 || spec.n_test < 0) {
        throw ContractError("gen_synthetic: negative corpus size");
    }
    double prior_sum = 0.0;
    for (double p : spec.label_prior) {
        if (p < 0.0) throw ContractError("gen_synthetic: label_prior entries must be >= 0");
        prior_sum += p;
    }
    if (std::fabs(prior_sum - 1.0) > 1e-9) {
        throw ContractError("gen_synthetic: label_prior must sum to 1");
    }
    if (spec.template_set != "v1") {
        throw ContractError("gen_synthetic: unknown template_set '" + spec.template_set + "'");
    }
    const auto reserved = template_token_set();
    if (reserved.count(spec.bias_token) ||
        std::find(topics.begin(), topics.end(), spec.bias_token) != topics.end()) {
        throw ContractError("gen_synthetic: bias_token '" + spec.bias_token +
                            "' collides with template or topic vocabulary");
    }
}

Stance sample_stance(Rng& rng, const std::array<double, 3>& prior) {
    const double u = rng.uniform();
    if (u < prior[0]) return Stance::Favor;
    if (u < prior[0] + prior[1]) return Stance::Against;
    return Stance::None;
}

std::vector<Example> gen_split(const SyntheticSpec& spec, const std::vector<std::string>& topics,
                               int count, double rho_favor, const std::string& id_prefix,
                               Rng rng) {
    std::vector<Example> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const Stance stance = sample_stance(rng, spec.label_prior);
        const std::size_t target_ix = static_cast<std::size_t>(rng.uniform_int(topics.size()));
        const std::string& target = topics[target_ix];

        std::string body;
        bool mentioned = false;
        if (stance == Stance::Favor) {
            body = instantiate(kFavorTemplates[rng.uniform_int(kFavorTemplates.size())], target);
            mentioned = true;
        } else if (stance == Stance::Against) {
            body =
                instantiate(kAgainstTemplates[rng.uniform_int(kAgainstTemplates.size())], target);
            mentioned = true;
        } else if (rng.bernoulli(kNoneOtherTopicFrac)) {
            // Opinion about a different topic: no stance toward the target.
            std::size_t other = static_cast<std::size_t>(rng.uniform_int(topics.size() - 1));
            if (other >= target_ix) ++other;
            const auto& bank = rng.bernoulli(0.5) ? kFavorTemplates : kAgainstTemplates;
            body = instantiate(bank[rng.uniform_int(bank.size())], topics[other]);
            mentioned = false;
        } else {
            body = instantiate(kNeutralTemplates[rng.uniform_int(kNeutralTemplates.size())],
                               target);
            mentioned = true;
        }
        if (rng.bernoulli(0.5)) {
            body += " " + kFillers[rng.uniform_int(kFillers.size())];
        }

        const double p_token = stance == Stance::Favor ? rho_favor : 1.0 - rho_favor;
        if (rng.bernoulli(p_token)) {
            auto toks = tokenize(body);
            const auto pos = static_cast<std::size_t>(rng.uniform_int(toks.size() + 1));
            toks.insert(toks.begin() + static_cast<std::ptrdiff_t>(pos), spec.bias_token);
            std::string rebuilt;
            for (std::size_t k = 0; k < toks.size(); ++k) {
                if (k) rebuilt += ' ';
                rebuilt += toks[k];
            }
            body = rebuilt;
        }

        Example e;
        char id_buf[32];
        std::snprintf(id_buf, sizeof(id_buf), "-%05d", i);
        e.id = id_prefix + id_buf;
        e.target = target;
        e.text = body;
        e.stance = stance;
        e.tmt_label = mentioned;
        e.stt_label = stance != Stance::None;
        e.origin = Origin::Synthetic;
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace

SyntheticCorpus gen_synthetic(const SyntheticSpec& spec) {
    std::vector<std::string> topics;
    for (int i = 0; i < spec.n_targets; ++i) {
        if (i < static_cast<int>(kTopicPool.size())) {
            topics.push_back(kTopicPool[static_cast<std::size_t>(i)]);
        } else {
            topics.push_back("topic" + std::to_string(i));
        }
    }
    validate_spec(spec, topics);

    const double rho = spec.bias_strength;
    const double rho_anti = spec.flip_in_test ? 1.0 - rho : rho;

    SyntheticCorpus corpus;
    corpus.train = gen_split(spec, topics, spec.n_train, rho, "syn-train",
                             Rng::substream(spec.seed, "data-gen-train"));
    corpus.test_iid = gen_split(spec, topics, spec.n_test, rho, "syn-iid",
                                Rng::substream(spec.seed, "data-gen-test-iid"));
    corpus.test_anti = gen_split(spec, topics, spec.n_test, rho_anti, "syn-anti",
                                 Rng::substream(spec.seed, "data-gen-test-anti"));
    for (const auto& t : topics) corpus.aliases[t] = {t};
    return corpus;
}

// ---------------------------------------------------------------------------
// Hard test sets
// ---------------------------------------------------------------------------

std::vector<Example> make_target_replaced(const std::vector<Example>& test_set,
                                          const std::vector<std::string>& target_pool,
                                          const AliasTable& aliases) {
    std::vector<Example> out;
    for (const auto& e : test_set) {
        int emitted = 0;
        for (const auto& candidate : target_pool) {
            if (candidate == e.target) continue;
            Example probe;
            probe.target = candidate;
            probe.text = e.text;
            if (derive_tmt_label(probe, aliases)) continue;
            Example r = e;
            r.id = e.id + "-rep" + std::to_string(emitted++);
            r.target = candidate;
            r.stance = Stance::None;
            r.tmt_label = false;
            r.stt_label = false;
            r.origin = Origin::Replaced;
            out.push_back(std::move(r));
        }
    }
    return out;
}

std::vector<Example> make_target_negated(const std::vector<Example>& test_set) {
    std::vector<Example> out;
    out.reserve(test_set.size());
    for (const auto& e : test_set) {
        Example n = e;
        n.id = e.id + "-neg";
        n.target = "opposition to " + e.target;
        if (e.stance == Stance::Favor) n.stance = Stance::Against;
        else if (e.stance == Stance::Against) n.stance = Stance::Favor;
        n.stt_label = n.stance != Stance::None;
        n.tmt_label.reset();  // mention status of the rewritten target is undefined
        n.origin = Origin::Negated;
        out.push_back(std::move(n));
    }
    return out;
}

PmiTable PmiTable::build(const std::vector<Example>& train_set) {
    if (train_set.empty()) throw ContractError("PmiTable: train set is empty");
    PmiTable t;
    for (const auto& e : train_set) {
        const auto label_ix = static_cast<std::size_t>(e.stance);
        t.label_counts_[label_ix] += 1;
        t.total_ += 1;
        std::set<std::string> seen;
        for (const auto& tok : tokenize(e.text)) {
            if (!seen.insert(tok).second) continue;
            auto& row = t.counts_[tok];
            row[label_ix] += 1;
        }
    }
    return t;
}

double PmiTable::pmi(const std::string& token, Stance label) const {
    const auto it = counts_.find(token);
    const auto label_ix = static_cast<std::size_t>(label);
    std::int64_t c_wl = 0, c_w = 0;
    if (it != counts_.end()) {
        c_wl = it->second[label_ix];
        for (auto c : it->second) c_w += c;
    }
    // Add-1 over the 2x3 presence-by-label table.
    const double n = static_cast<double>(total_ + 6);
    const double p_joint = static_cast<double>(c_wl + 1) / n;
    const double p_token = static_cast<double>(c_w + 3) / n;
    const double p_label = static_cast<double>(label_counts_[label_ix] + 2) / n;
    return std::log(p_joint / (p_token * p_label));
}

double PmiTable::max_abs_pmi(const std::string& token) const {
    double best = 0.0;
    for (int k = 0; k < kNumStances; ++k) {
        best = std::max(best, std::fabs(pmi(token, static_cast<Stance>(k))));
    }
    return best;
}

PmiSelection select_pmi_tail(const std::vector<Example>& test_set,
                             const std::vector<Example>& train_set, double threshold) {
    PmiSelection sel;
    sel.table = PmiTable::build(train_set);
    for (const auto& e : test_set) {
        double score = 0.0;
        for (const auto& tok : tokenize(e.text)) {
            score = std::max(score, sel.table.max_abs_pmi(tok));
        }
        if (score < threshold) sel.subset.push_back(e);
    }
    return sel;
}

std::vector<Example> select_tof(const std::vector<Example>& test_set,
                                const std::vector<std::vector<Stance>>& predictions) {
    if (predictions.size() < 3) {
        throw ContractError("select_tof: need at least 3 predictors, got " +
                            std::to_string(predictions.size()));
    }
    for (const auto& p : predictions) {
        if (p.size() != test_set.size()) {
            throw ContractError("select_tof: prediction length mismatch");
        }
    }
    std::vector<Example> out;
    for (std::size_t i = 0; i < test_set.size(); ++i) {
        bool all_wrong = true;
        for (const auto& p : predictions) {
            if (p[i] == test_set[i].stance) {
                all_wrong = false;
                break;
            }
        }
        if (all_wrong) out.push_back(test_set[i]);
    }
    return out;
}

}  // namespace crab
