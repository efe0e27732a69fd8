#include "crab/evaluator.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "crab/errors.hpp"

namespace crab {

namespace {

std::array<double, 3> softmax3(const std::array<double, 3>& z) {
    const double mx = std::max({z[0], z[1], z[2]});
    std::array<double, 3> p{};
    double sum = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
        p[k] = std::exp(z[k] - mx);
        sum += p[k];
    }
    for (double& v : p) v /= sum;
    return p;
}

std::string fmt_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string fmt_fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

}  // namespace

const char* predict_mode_name(PredictMode mode) {
    switch (mode) {
        case PredictMode::Tie: return "tie";
        case PredictMode::Factual: return "factual";
        case PredictMode::TextOnly: return "text_only";
        case PredictMode::Poe: return "poe";
        case PredictMode::Majority: return "majority";
    }
    return "?";
}

PredictMode predict_mode_from_string(std::string_view name) {
    if (name == "tie") return PredictMode::Tie;
    if (name == "factual") return PredictMode::Factual;
    if (name == "text_only") return PredictMode::TextOnly;
    if (name == "poe") return PredictMode::Poe;
    if (name == "majority") return PredictMode::Majority;
    throw ConfigError("unknown prediction mode '" + std::string(name) + "'");
}

Stance argmax_stance(const std::array<double, 3>& scores) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < 3; ++k) {
        if (scores[k] > scores[best]) best = k;
    }
    return static_cast<Stance>(best);
}

Prediction predict_tie(const CausalStanceModel& model, const EncodedExample& encoded) {
    const EffectDecomposition eff = decompose_effects(model, encoded);
    Prediction p;
    p.id = encoded.id;
    p.scores = eff.tie;
    p.label = argmax_stance(p.scores);
    p.mode = PredictMode::Tie;
    return p;
}

Prediction predict_factual(const CausalStanceModel& model, const EncodedExample& encoded) {
    const EffectDecomposition eff = decompose_effects(model, encoded);
    Prediction p;
    p.id = encoded.id;
    p.scores = eff.y_fact;
    p.label = argmax_stance(p.scores);
    p.mode = PredictMode::Factual;
    return p;
}

Prediction predict_text_only(const CausalStanceModel& model, const EncodedExample& encoded) {
    const EffectDecomposition eff = decompose_effects(model, encoded);
    Prediction p;
    p.id = encoded.id;
    p.scores = eff.y_cf;
    p.label = argmax_stance(p.scores);
    p.mode = PredictMode::TextOnly;
    return p;
}

Prediction poe_baseline(const std::array<double, 3>& text_only_probs,
                        const std::array<double, 3>& full_probs) {
    for (const auto& probs : {text_only_probs, full_probs}) {
        double sum = 0.0;
        for (double v : probs) {
            if (v < 0.0) throw ContractError("poe_baseline: negative probability");
            sum += v;
        }
        if (std::fabs(sum - 1.0) > 1e-6) {
            throw ContractError("poe_baseline: probabilities sum to " + fmt_double(sum) +
                                ", expected 1");
        }
    }
    Prediction p;
    p.mode = PredictMode::Poe;
    double sum = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
        p.scores[k] = text_only_probs[k] * full_probs[k];
        sum += p.scores[k];
    }
    if (sum > 0.0) {
        for (double& v : p.scores) v /= sum;
    }
    p.label = argmax_stance(p.scores);
    return p;
}

MajorityVote majority_vote_baseline(const std::vector<Example>& train_set) {
    if (train_set.empty()) throw ContractError("majority_vote_baseline: empty train set");
    std::map<std::string, std::array<int, 3>> per_target;
    std::array<int, 3> global{};
    for (const auto& e : train_set) {
        per_target[e.target][static_cast<std::size_t>(e.stance)] += 1;
        global[static_cast<std::size_t>(e.stance)] += 1;
    }
    auto pick = [](const std::array<int, 3>& counts) {
        std::size_t best = 0;
        for (std::size_t k = 1; k < 3; ++k) {
            if (counts[k] > counts[best]) best = k;
        }
        return static_cast<Stance>(best);
    };
    MajorityVote mv;
    for (const auto& [target, counts] : per_target) mv.per_target[target] = pick(counts);
    mv.global = pick(global);
    return mv;
}

Stance predict_majority(const MajorityVote& mv, const std::string& target) {
    const auto it = mv.per_target.find(target);
    return it == mv.per_target.end() ? mv.global : it->second;
}

F1Scores macro_f1(const std::vector<Stance>& predictions, const std::vector<Stance>& golds) {
    if (predictions.size() != golds.size()) {
        throw ContractError("macro_f1: " + std::to_string(predictions.size()) +
                            " predictions vs " + std::to_string(golds.size()) + " golds");
    }
    auto f1_for = [&](Stance cls) {
        std::int64_t tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < golds.size(); ++i) {
            const bool pred_is = predictions[i] == cls;
            const bool gold_is = golds[i] == cls;
            if (pred_is && gold_is) ++tp;
            else if (pred_is) ++fp;
            else if (gold_is) ++fn;
        }
        const double precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
        const double recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
        return precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    };
    F1Scores f;
    f.f_favor = f1_for(Stance::Favor);
    f.f_against = f1_for(Stance::Against);
    f.f_macro = (f.f_favor + f.f_against) / 2.0;
    return f;
}

namespace {

struct SlicePredictions {
    std::vector<Stance> labels;
    std::vector<Stance> golds;
    std::vector<std::string> targets;
};

SlicePredictions predict_slice(const CausalStanceModel& model, const std::vector<Example>& slice,
                               PredictMode mode, const EvalOptions& options) {
    SlicePredictions out;
    const auto n = slice.size();
    out.labels.resize(n);
    out.golds.resize(n);
    out.targets.resize(n);

    auto predict_one = [&](std::size_t i) {
        const Example& e = slice[i];
        out.golds[i] = e.stance;
        out.targets[i] = e.target;
        if (mode == PredictMode::Majority) {
            out.labels[i] = predict_majority(*options.majority, e.target);
            return;
        }
        const EncodedExample enc = encode(e, model.vocabs);
        switch (mode) {
            case PredictMode::Tie:
                out.labels[i] = predict_tie(model, enc).label;
                break;
            case PredictMode::Factual:
                out.labels[i] = predict_factual(model, enc).label;
                break;
            case PredictMode::TextOnly:
                out.labels[i] = predict_text_only(model, enc).label;
                break;
            case PredictMode::Poe: {
                const EffectDecomposition eff = decompose_effects(model, enc);
                out.labels[i] =
                    poe_baseline(softmax3(eff.y_cf), softmax3(eff.y_fact)).label;
                break;
            }
            case PredictMode::Majority:
                break;
        }
    };

    const int jobs = std::max(1, options.jobs);
    if (jobs == 1 || n < 64) {
        for (std::size_t i = 0; i < n; ++i) predict_one(i);
    } else {
        std::vector<std::thread> workers;
        std::size_t chunk = (n + static_cast<std::size_t>(jobs) - 1) / static_cast<std::size_t>(jobs);
        for (int w = 0; w < jobs; ++w) {
            const std::size_t lo = static_cast<std::size_t>(w) * chunk;
            const std::size_t hi = std::min(n, lo + chunk);
            if (lo >= hi) break;
            workers.emplace_back([&, lo, hi] {
                for (std::size_t i = lo; i < hi; ++i) predict_one(i);
            });
        }
        for (auto& t : workers) t.join();
    }
    return out;
}

}  // namespace

EvalReport evaluate_slices(const CausalStanceModel& model, const std::vector<NamedSlice>& slices,
                           const std::vector<PredictMode>& modes, const EvalOptions& options) {
    for (PredictMode m : modes) {
        if (m == PredictMode::Majority && options.majority == nullptr) {
            throw ContractError("evaluate_slices: majority mode requires a train-set predictor");
        }
    }
    EvalReport report;
    report.metadata["model_fingerprint"] = fmt_double(0);  // replaced below
    report.metadata["model_fingerprint"] = std::to_string(model.param_checksum());
    report.metadata["vocab_fingerprint"] = std::to_string(model.vocabs.fingerprint);
    if (options.data_fingerprint.has_value() &&
        *options.data_fingerprint != model.vocabs.fingerprint) {
        report.metadata["warning"] =
            "vocab fingerprint mismatch: model was built from a different dataset";
    }

    for (const auto& [name, slice] : slices) {
        for (PredictMode mode : modes) {
            SliceRow row;
            row.slice = name;
            row.mode = predict_mode_name(mode);
            row.support = static_cast<int>(slice.size());
            if (slice.empty()) {
                report.rows.push_back(std::move(row));
                continue;
            }
            const SlicePredictions sp = predict_slice(model, slice, mode, options);
            row.scores = macro_f1(sp.labels, sp.golds);

            std::map<std::string, std::vector<std::size_t>> by_target;
            for (std::size_t i = 0; i < sp.targets.size(); ++i) {
                by_target[sp.targets[i]].push_back(i);
            }
            double sum_target_f1 = 0.0;
            for (const auto& [target, idx] : by_target) {
                std::vector<Stance> preds, golds;
                preds.reserve(idx.size());
                golds.reserve(idx.size());
                for (auto i : idx) {
                    preds.push_back(sp.labels[i]);
                    golds.push_back(sp.golds[i]);
                }
                const F1Scores f = macro_f1(preds, golds);
                row.per_target[target] = {f.f_macro, static_cast<int>(idx.size())};
                sum_target_f1 += f.f_macro;
            }
            row.f_macro_target_avg = sum_target_f1 / static_cast<double>(by_target.size());
            report.rows.push_back(std::move(row));
        }
    }
    return report;
}

std::string report_to_json(const EvalReport& report) {
    nlohmann::json j;
    j["metadata"] = report.metadata;
    j["rows"] = nlohmann::json::array();
    for (const auto& row : report.rows) {
        nlohmann::json r;
        r["slice"] = row.slice;
        r["mode"] = row.mode;
        r["support"] = row.support;
        if (row.scores.has_value()) {
            r["f_favor"] = row.scores->f_favor;
            r["f_against"] = row.scores->f_against;
            r["f_macro"] = row.scores->f_macro;
            r["f_macro_target_avg"] = row.f_macro_target_avg;
        } else {
            r["f_favor"] = nullptr;
            r["f_against"] = nullptr;
            r["f_macro"] = nullptr;
            r["f_macro_target_avg"] = nullptr;
        }
        nlohmann::json pt = nlohmann::json::object();
        for (const auto& [target, score] : row.per_target) {
            pt[target] = {{"f_macro", score.f_macro}, {"support", score.support}};
        }
        r["per_target"] = pt;
        j["rows"].push_back(std::move(r));
    }
    return j.dump(2);
}

std::string report_to_text(const EvalReport& report) {
    std::ostringstream out;
    out << "slice                 mode        support  F_favor  F_against  F_macro  F_tgt_avg\n";
    out << "-------------------------------------------------------------------------------\n";
    for (const auto& row : report.rows) {
        char line[256];
        if (row.scores.has_value()) {
            std::snprintf(line, sizeof(line), "%-21s %-10s %7d  %7s  %9s  %7s  %9s\n",
                          row.slice.c_str(), row.mode.c_str(), row.support,
                          fmt_fixed(row.scores->f_favor, 4).c_str(),
                          fmt_fixed(row.scores->f_against, 4).c_str(),
                          fmt_fixed(row.scores->f_macro, 4).c_str(),
                          fmt_fixed(row.f_macro_target_avg, 4).c_str());
        } else {
            std::snprintf(line, sizeof(line), "%-21s %-10s %7d  %7s  %9s  %7s  %9s\n",
                          row.slice.c_str(), row.mode.c_str(), row.support, "-", "-", "-", "-");
        }
        out << line;
    }
    for (const auto& [key, value] : report.metadata) {
        out << "# " << key << ": " << value << "\n";
    }
    return out.str();
}

std::string report_to_csv(const EvalReport& report) {
    std::ostringstream out;
    out << "slice,mode,support,f_favor,f_against,f_macro,f_macro_target_avg\n";
    for (const auto& row : report.rows) {
        out << row.slice << ',' << row.mode << ',' << row.support << ',';
        if (row.scores.has_value()) {
            out << fmt_double(row.scores->f_favor) << ',' << fmt_double(row.scores->f_against)
                << ',' << fmt_double(row.scores->f_macro) << ','
                << fmt_double(row.f_macro_target_avg);
        } else {
            out << ",,,";
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace crab
