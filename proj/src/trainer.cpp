#include "crab/trainer.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "crab/errors.hpp"
#include "crab/evaluator.hpp"

namespace crab {

namespace {

Tensor stance_onehot(const Batch& batch) {
    Tensor t = Tensor::zeros({batch.size, 3});
    for (std::int64_t i = 0; i < batch.size; ++i) {
        t.at(i, static_cast<std::int64_t>(batch.stance[static_cast<std::size_t>(i)])) = 1.0;
    }
    return t;
}

Tensor binary_onehot(const std::vector<std::optional<bool>>& labels, const char* term) {
    const auto n = static_cast<std::int64_t>(labels.size());
    Tensor t = Tensor::zeros({n, 2});
    for (std::int64_t i = 0; i < n; ++i) {
        const auto& label = labels[static_cast<std::size_t>(i)];
        if (!label.has_value()) {
            throw ContractError(std::string("batch example ") + std::to_string(i) +
                                " has no " + term + " label but the " + term +
                                " loss term is enabled");
        }
        t.at(i, *label ? 1 : 0) = 1.0;
    }
    return t;
}

// -sum(onehot * log_softmax(scores)) / n
Tensor mean_ce(Graph& g, const Tensor& scores, const Tensor& onehot_leaf, std::int64_t n) {
    Tensor logp = g.log_softmax_rows(scores);
    Tensor picked = g.mul(logp, onehot_leaf);
    return g.scale(g.sum(picked), -1.0 / static_cast<double>(n));
}

std::vector<double> row_log_softmax(const Tensor& scores) {
    std::vector<double> out(scores.data.size());
    const auto n = scores.shape[0], m = scores.shape[1];
    for (std::int64_t i = 0; i < n; ++i) {
        double mx = scores.at(i, 0);
        for (std::int64_t j = 1; j < m; ++j) mx = std::max(mx, scores.at(i, j));
        double z = 0.0;
        for (std::int64_t j = 0; j < m; ++j) z += std::exp(scores.at(i, j) - mx);
        const double lse = mx + std::log(z);
        for (std::int64_t j = 0; j < m; ++j)
            out[static_cast<std::size_t>(i * m + j)] = scores.at(i, j) - lse;
    }
    return out;
}

struct ClsGraph {
    Graph graph;
    Tensor total;
    LossBreakdown values;
    std::map<std::string, int> param_nodes;
};

ClsGraph build_cls_graph(CausalStanceModel& model, const Batch& batch, const TrainConfig& config,
                         bool train_flag, double lambda_grl_eff, Rng* dropout_rng) {
    ClsGraph out{Graph(dropout_rng), {}, {}, {}};
    Graph& g = out.graph;
    const GraphForward fw = forward_branches(g, model, batch, train_flag);
    out.param_nodes = fw.param_nodes;
    const std::int64_t n = batch.size;

    Tensor y_onehot = g.leaf(stance_onehot(batch));
    Tensor y_fact = fuse_in_graph(g, fw.j_d, fw.j_t, fw.j_c);

    Tensor l_c;
    if (config.poe_training) {
        // log of the expert product: detached text-only log-probs plus the
        // fused log-probs, renormalized by the outer log-softmax.
        Tensor logp_bias = g.leaf(Tensor(fw.j_d.shape, row_log_softmax(fw.j_d)));
        Tensor logp_full = g.log_softmax_rows(y_fact);
        l_c = mean_ce(g, g.add(logp_full, logp_bias), y_onehot, n);
    } else {
        l_c = mean_ce(g, y_fact, y_onehot, n);
    }

    Tensor y_cf = counterfactual_fuse_in_graph(g, fw.j_d, fw.a_leaf);
    Tensor l_d = mean_ce(g, y_cf, y_onehot, n);

    Tensor total = g.add(l_c, l_d);
    out.values.l_c = l_c.data[0];
    out.values.l_d = l_d.data[0];

    if (config.use_tmt) {
        Tensor h_in = config.use_grl ? g.grl(fw.h_d, lambda_grl_eff) : fw.h_d;
        Tensor logits = g.add(g.matmul(h_in, g.value(fw.param_nodes.at("head_tmt_w"))),
                              g.value(fw.param_nodes.at("head_tmt_b")));
        Tensor l_tmt = mean_ce(g, logits, g.leaf(binary_onehot(batch.tmt, "TMT")), n);
        out.values.l_tmt = l_tmt.data[0];
        total = g.add(total, g.scale(l_tmt, config.lambda1));
    }
    if (config.use_stt) {
        Tensor h_in = config.use_grl ? g.grl(fw.h_d, lambda_grl_eff) : fw.h_d;
        Tensor logits = g.add(g.matmul(h_in, g.value(fw.param_nodes.at("head_stt_w"))),
                              g.value(fw.param_nodes.at("head_stt_b")));
        Tensor l_stt = mean_ce(g, logits, g.leaf(binary_onehot(batch.stt, "STT")), n);
        out.values.l_stt = l_stt.data[0];
        total = g.add(total, g.scale(l_stt, config.lambda2));
    }

    out.total = total;
    out.values.total = total.data[0];
    return out;
}

// Softmax of the factual fusion per row, used as the constant side of the
// KL objective.
std::vector<double> factual_probs(CausalStanceModel& model, const Batch& batch, Tensor* j_d_out) {
    Graph g;
    const GraphForward fw = forward_branches(g, model, batch, /*train_flag=*/false);
    Tensor y_fact = fuse_in_graph(g, fw.j_d, fw.j_t, fw.j_c);
    *j_d_out = fw.j_d;
    std::vector<double> probs = row_log_softmax(y_fact);
    for (double& v : probs) v = std::exp(v);
    return probs;
}

struct KlGraph {
    Graph graph;
    Tensor loss;
    Tensor a_leaf;
};

KlGraph build_kl_graph(CausalStanceModel& model, const Batch& batch) {
    Tensor j_d_values;
    std::vector<double> p_fact = factual_probs(model, batch, &j_d_values);

    KlGraph out{Graph(), {}, {}};
    Graph& g = out.graph;
    out.a_leaf = g.leaf(model.a, true);
    Tensor j_d = g.leaf(Tensor(j_d_values.shape, j_d_values.data));
    Tensor y_cf = counterfactual_fuse_in_graph(g, j_d, out.a_leaf);
    Tensor logq = g.log_softmax_rows(y_cf);
    Tensor p_leaf = g.leaf(Tensor(j_d_values.shape, std::move(p_fact)));
    const double denom = static_cast<double>(batch.size) * 3.0;
    out.loss = g.scale(g.sum(g.mul(logq, p_leaf)), -1.0 / denom);
    return out;
}

std::vector<CausalStanceModel::NamedParam> trainable_params(CausalStanceModel& model,
                                                            const TrainConfig& config) {
    std::vector<CausalStanceModel::NamedParam> out;
    for (auto& p : model.parameters()) {
        if (!config.use_tmt && p.name.rfind("head_tmt", 0) == 0) continue;
        if (!config.use_stt && p.name.rfind("head_stt", 0) == 0) continue;
        out.push_back(p);
    }
    return out;
}

double to_chars_double(char* buf, std::size_t cap, double v) {
    const auto res = std::to_chars(buf, buf + cap, v);
    return static_cast<double>(res.ptr - buf);
}

}  // namespace

LossBreakdown compute_cls_loss(const CausalStanceModel& model,
                               const std::vector<EncodedExample>& batch,
                               const TrainConfig& config) {
    if (batch.empty()) throw ContractError("compute_cls_loss: empty batch");
    auto& m = const_cast<CausalStanceModel&>(model);
    const Batch b = make_batch(batch);
    ClsGraph cg = build_cls_graph(m, b, config, /*train_flag=*/false, config.lambda_grl, nullptr);
    return cg.values;
}

double compute_kl_loss(const CausalStanceModel& model, const std::vector<EncodedExample>& batch,
                       const TrainConfig& config) {
    (void)config;
    if (batch.empty()) throw ContractError("compute_kl_loss: empty batch");
    auto& m = const_cast<CausalStanceModel&>(model);
    const Batch b = make_batch(batch);
    KlGraph kg = build_kl_graph(m, b);
    return kg.loss.data[0];
}

double kl_step(CausalStanceModel& model, const Batch& batch, AdamState& state_a) {
    KlGraph kg = build_kl_graph(model, batch);
    kg.graph.backward(kg.loss);
    std::vector<Tensor*> params = {&model.a};
    std::vector<Tensor> grads = {kg.graph.gradient(kg.a_leaf.node_id)};
    std::vector<std::string> names = {"a"};
    adam_step(params, grads, state_a, names);
    return kg.loss.data[0];
}

void write_history_csv(const TrainHistory& history, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write history '" + path + "'");
    out << "epoch,l_c,l_d,l_tmt,l_stt,l_kl,val_f1,a\n";
    char buf[64];
    for (const auto& r : history.epochs) {
        out << r.epoch;
        for (double v : {r.l_c, r.l_d, r.l_tmt, r.l_stt, r.l_kl, r.val_f1, r.a}) {
            const auto len = static_cast<std::size_t>(to_chars_double(buf, sizeof(buf), v));
            out << ',';
            out.write(buf, static_cast<std::streamsize>(len));
        }
        out << "\n";
    }
}

std::pair<std::vector<Example>, std::vector<Example>> split_train_val(
    const std::vector<Example>& examples, double val_fraction, std::uint64_t seed) {
    if (val_fraction < 0.0 || val_fraction >= 1.0) {
        throw ContractError("split_train_val: val_fraction must lie in [0, 1)");
    }
    std::vector<std::size_t> order(examples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng = Rng::substream(seed, "shuffle-split");
    rng.shuffle(order);
    const auto n_val = static_cast<std::size_t>(std::llround(
        val_fraction * static_cast<double>(examples.size())));
    std::pair<std::vector<Example>, std::vector<Example>> out;
    for (std::size_t i = 0; i < order.size(); ++i) {
        (i < n_val ? out.second : out.first).push_back(examples[order[i]]);
    }
    return out;
}

TrainResult train(const TrainConfig& config, const std::vector<Example>& train_set,
                  const std::vector<Example>& val_set) {
    if (train_set.empty()) throw ContractError("train: empty train set");

    const VocabPair vocabs = build_vocab(train_set, config.min_freq);
    const auto enc_train = encode_all(train_set, vocabs);
    const auto enc_val = encode_all(val_set, vocabs);

    ModelConfig mc;
    mc.d_in = static_cast<std::int64_t>(enc_train[0].d_feat.size());
    mc.t_in = static_cast<std::int64_t>(enc_train[0].t_feat.size());
    mc.c_in = static_cast<std::int64_t>(enc_train[0].pair_feat.size());
    mc.hidden = config.hidden;
    mc.dropout_p = config.dropout_p;
    mc.lambda_grl = config.lambda_grl;

    Rng init_rng = Rng::substream(config.seed, "init");
    Rng dropout_rng = Rng::substream(config.seed, "dropout");
    Rng shuffle_rng = Rng::substream(config.seed, "shuffle");

    TrainResult result{CausalStanceModel::init(mc, vocabs, init_rng), {}};
    CausalStanceModel& model = result.model;

    auto trainable = trainable_params(model, config);
    std::vector<const Tensor*> trainable_view;
    std::vector<std::string> trainable_names;
    for (const auto& p : trainable) {
        trainable_view.push_back(p.tensor);
        trainable_names.push_back(p.name);
    }
    AdamState cls_state = AdamState::init(trainable_view, {config.learning_rate});
    AdamState kl_state = AdamState::init({&model.a}, {config.learning_rate});

    std::vector<int> order(enc_train.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);

    const auto n_batches =
        (order.size() + static_cast<std::size_t>(config.batch_size) - 1) /
        static_cast<std::size_t>(config.batch_size);

    double best_f1 = -1.0;
    std::vector<Tensor> best_snapshot;
    int epochs_since_best = 0;

    auto snapshot_params = [&] {
        std::vector<Tensor> snap;
        for (auto& p : model.parameters()) snap.push_back(*p.tensor);
        return snap;
    };

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double sum_c = 0, sum_d = 0, sum_tmt = 0, sum_stt = 0, sum_kl = 0;
        std::size_t seen = 0;
        for (std::size_t b = 0; b < n_batches; ++b) {
            const std::size_t lo = b * static_cast<std::size_t>(config.batch_size);
            const std::size_t hi = std::min(order.size(), lo + static_cast<std::size_t>(config.batch_size));
            std::vector<int> idx(order.begin() + static_cast<std::ptrdiff_t>(lo),
                                 order.begin() + static_cast<std::ptrdiff_t>(hi));
            const Batch batch = make_batch(enc_train, idx);

            double lambda_eff = config.lambda_grl;
            if (config.grl_warmup && epoch == 0) {
                lambda_eff *= static_cast<double>(b + 1) / static_cast<double>(n_batches);
            }

            ClsGraph cg = build_cls_graph(model, batch, config, /*train_flag=*/true, lambda_eff,
                                          &dropout_rng);
            cg.graph.backward(cg.total);
            std::vector<Tensor*> params;
            std::vector<Tensor> grads;
            for (const auto& p : trainable) {
                params.push_back(p.tensor);
                const int node = cg.param_nodes.at(p.name);
                if (cg.graph.has_gradient(node)) {
                    grads.push_back(cg.graph.gradient(node));
                } else {
                    grads.push_back(Tensor::zeros(p.tensor->shape));
                }
            }
            adam_step(params, grads, cls_state, trainable_names);

            const double kl = kl_step(model, batch, kl_state);
            if (!(std::fabs(model.a.data[0]) < 100.0)) {
                throw NumericError("train: constant a diverged (|a| >= 100)");
            }

            const auto nb = static_cast<double>(batch.size);
            sum_c += cg.values.l_c * nb;
            sum_d += cg.values.l_d * nb;
            sum_tmt += cg.values.l_tmt * nb;
            sum_stt += cg.values.l_stt * nb;
            sum_kl += kl * nb;
            seen += static_cast<std::size_t>(batch.size);
        }

        EpochRecord rec;
        rec.epoch = epoch;
        const auto denom = static_cast<double>(seen);
        rec.l_c = sum_c / denom;
        rec.l_d = sum_d / denom;
        rec.l_tmt = sum_tmt / denom;
        rec.l_stt = sum_stt / denom;
        rec.l_kl = sum_kl / denom;
        rec.a = model.a.data[0];

        if (!enc_val.empty()) {
            std::vector<Stance> preds, golds;
            preds.reserve(enc_val.size());
            for (const auto& enc : enc_val) {
                preds.push_back(predict_tie(model, enc).label);
                golds.push_back(enc.stance);
            }
            rec.val_f1 = macro_f1(preds, golds).f_macro;
        }
        result.history.epochs.push_back(rec);

        if (!enc_val.empty() && rec.val_f1 > best_f1) {
            best_f1 = rec.val_f1;
            best_snapshot = snapshot_params();
            epochs_since_best = 0;
        } else {
            ++epochs_since_best;
            if (config.patience > 0 && epochs_since_best >= config.patience) break;
        }
    }

    if (!best_snapshot.empty()) {
        auto params = model.parameters();
        for (std::size_t i = 0; i < params.size(); ++i) *params[i].tensor = best_snapshot[i];
    }
    return result;
}

}  // namespace crab
