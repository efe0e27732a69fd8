#include "crab/model.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "crab/errors.hpp"

namespace crab {

namespace {

double softplus_stable(double x) {
    if (x > 35.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

Tensor glorot(std::int64_t fan_in, std::int64_t fan_out, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    Tensor t = Tensor::zeros({fan_in, fan_out});
    for (double& v : t.data) v = rng.uniform(-limit, limit);
    return t;
}

}  // namespace

CausalStanceModel CausalStanceModel::init(const ModelConfig& config, const VocabPair& vocabs,
                                          Rng& rng) {
    if (config.d_in <= 0 || config.t_in <= 0 || config.c_in <= 0 || config.hidden <= 0) {
        throw ContractError("model init: widths must be positive");
    }
    CausalStanceModel m;
    m.config = config;
    m.vocabs = vocabs;
    const auto h = config.hidden;

    m.enc_d_w1 = glorot(config.d_in, h, rng);
    m.enc_d_b1 = Tensor::zeros({1, h});
    m.enc_d_w2 = glorot(h, h, rng);
    m.enc_d_b2 = Tensor::zeros({1, h});
    m.enc_t_w1 = glorot(config.t_in, h, rng);
    m.enc_t_b1 = Tensor::zeros({1, h});
    m.enc_t_w2 = glorot(h, h, rng);
    m.enc_t_b2 = Tensor::zeros({1, h});
    m.enc_c_w1 = glorot(config.c_in, h, rng);
    m.enc_c_b1 = Tensor::zeros({1, h});
    m.enc_c_w2 = glorot(h, h, rng);
    m.enc_c_b2 = Tensor::zeros({1, h});

    m.head_d_w = glorot(h, 3, rng);
    m.head_d_b = Tensor::zeros({1, 3});
    m.head_t_w = glorot(h, 3, rng);
    m.head_t_b = Tensor::zeros({1, 3});
    m.head_c_w = glorot(h, 3, rng);
    m.head_c_b = Tensor::zeros({1, 3});

    m.a = Tensor::scalar(0.0);

    m.head_tmt_w = glorot(h, 2, rng);
    m.head_tmt_b = Tensor::zeros({1, 2});
    m.head_stt_w = glorot(h, 2, rng);
    m.head_stt_b = Tensor::zeros({1, 2});
    return m;
}

std::vector<CausalStanceModel::NamedParam> CausalStanceModel::parameters() {
    return {
        {"enc_d_w1", &enc_d_w1}, {"enc_d_b1", &enc_d_b1}, {"enc_d_w2", &enc_d_w2},
        {"enc_d_b2", &enc_d_b2}, {"enc_t_w1", &enc_t_w1}, {"enc_t_b1", &enc_t_b1},
        {"enc_t_w2", &enc_t_w2}, {"enc_t_b2", &enc_t_b2}, {"enc_c_w1", &enc_c_w1},
        {"enc_c_b1", &enc_c_b1}, {"enc_c_w2", &enc_c_w2}, {"enc_c_b2", &enc_c_b2},
        {"head_d_w", &head_d_w}, {"head_d_b", &head_d_b}, {"head_t_w", &head_t_w},
        {"head_t_b", &head_t_b}, {"head_c_w", &head_c_w}, {"head_c_b", &head_c_b},
        {"a", &a},               {"head_tmt_w", &head_tmt_w}, {"head_tmt_b", &head_tmt_b},
        {"head_stt_w", &head_stt_w}, {"head_stt_b", &head_stt_b},
    };
}

std::vector<std::pair<std::string, const Tensor*>> CausalStanceModel::parameters() const {
    std::vector<std::pair<std::string, const Tensor*>> out;
    auto& self = const_cast<CausalStanceModel&>(*this);
    for (auto& p : self.parameters()) out.emplace_back(p.name, p.tensor);
    return out;
}

std::uint64_t CausalStanceModel::param_checksum() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& [name, tensor] : parameters()) {
        for (unsigned char c : name) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        for (double v : tensor->data) {
            std::uint64_t bits;
            std::memcpy(&bits, &v, sizeof(bits));
            for (int k = 0; k < 8; ++k) {
                h ^= (bits >> (8 * k)) & 0xFF;
                h *= 0x100000001b3ULL;
            }
        }
    }
    return h;
}

// ---------------------------------------------------------------------------
// Graph forward
// ---------------------------------------------------------------------------

Batch make_batch(const std::vector<EncodedExample>& encoded, const std::vector<int>& indices) {
    if (indices.empty()) throw ContractError("make_batch: empty batch");
    const auto& first = encoded[static_cast<std::size_t>(indices[0])];
    const auto n = static_cast<std::int64_t>(indices.size());
    Batch b;
    b.size = n;
    b.d = Tensor::zeros({n, static_cast<std::int64_t>(first.d_feat.size())});
    b.t = Tensor::zeros({n, static_cast<std::int64_t>(first.t_feat.size())});
    b.c = Tensor::zeros({n, static_cast<std::int64_t>(first.pair_feat.size())});
    for (std::int64_t r = 0; r < n; ++r) {
        const auto& e = encoded[static_cast<std::size_t>(indices[static_cast<std::size_t>(r)])];
        std::copy(e.d_feat.begin(), e.d_feat.end(), b.d.data.begin() + r * b.d.shape[1]);
        std::copy(e.t_feat.begin(), e.t_feat.end(), b.t.data.begin() + r * b.t.shape[1]);
        std::copy(e.pair_feat.begin(), e.pair_feat.end(), b.c.data.begin() + r * b.c.shape[1]);
        b.stance.push_back(e.stance);
        b.tmt.push_back(e.tmt_label);
        b.stt.push_back(e.stt_label);
    }
    return b;
}

Batch make_batch(const std::vector<EncodedExample>& encoded) {
    std::vector<int> all(encoded.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    return make_batch(encoded, all);
}

namespace {

Tensor encoder_forward(Graph& g, const Tensor& x, const Tensor& w1, const Tensor& b1,
                       const Tensor& w2, const Tensor& b2, double dropout_p, bool train) {
    Tensor h = g.add(g.matmul(x, w1), b1);
    h = g.tanh(h);
    h = g.dropout(h, dropout_p, train);
    return g.add(g.matmul(h, w2), b2);
}

}  // namespace

GraphForward forward_branches(Graph& graph, CausalStanceModel& model, const Batch& batch,
                              bool train_flag) {
    if (batch.d.shape[1] != model.config.d_in || batch.t.shape[1] != model.config.t_in ||
        batch.c.shape[1] != model.config.c_in) {
        throw DimensionError("forward_branches: feature widths " + batch.d.shape_str() + "/" +
                             batch.t.shape_str() + "/" + batch.c.shape_str() +
                             " do not match encoder widths");
    }
    GraphForward fw;
    std::map<std::string, Tensor> bound;
    for (auto& p : model.parameters()) {
        Tensor leafed = graph.leaf(*p.tensor, true);
        fw.param_nodes[p.name] = leafed.node_id;
        bound.emplace(p.name, std::move(leafed));
    }
    Tensor d_in = graph.leaf(batch.d);
    Tensor t_in = graph.leaf(batch.t);
    Tensor c_in = graph.leaf(batch.c);

    const double p = model.config.dropout_p;
    fw.h_d = encoder_forward(graph, d_in, bound.at("enc_d_w1"), bound.at("enc_d_b1"),
                             bound.at("enc_d_w2"), bound.at("enc_d_b2"), p, train_flag);
    Tensor h_t = encoder_forward(graph, t_in, bound.at("enc_t_w1"), bound.at("enc_t_b1"),
                                 bound.at("enc_t_w2"), bound.at("enc_t_b2"), p, train_flag);
    Tensor h_c = encoder_forward(graph, c_in, bound.at("enc_c_w1"), bound.at("enc_c_b1"),
                                 bound.at("enc_c_w2"), bound.at("enc_c_b2"), p, train_flag);

    fw.j_d = graph.add(graph.matmul(fw.h_d, bound.at("head_d_w")), bound.at("head_d_b"));
    fw.j_t = graph.add(graph.matmul(h_t, bound.at("head_t_w")), bound.at("head_t_b"));
    fw.j_c = graph.add(graph.matmul(h_c, bound.at("head_c_w")), bound.at("head_c_b"));
    fw.a_leaf = bound.at("a");
    return fw;
}

Tensor fuse_in_graph(Graph& graph, const Tensor& j_d, const Tensor& j_t, const Tensor& j_c) {
    Tensor z = graph.add(graph.add(j_d, j_t), j_c);
    return graph.scale(graph.softplus(graph.scale(z, -1.0)), -1.0);
}

Tensor counterfactual_fuse_in_graph(Graph& graph, const Tensor& j_d, const Tensor& a_leaf) {
    Tensor z = graph.add(j_d, graph.scale(a_leaf, 2.0));
    return graph.scale(graph.softplus(graph.scale(z, -1.0)), -1.0);
}

// ---------------------------------------------------------------------------
// Inference path
// ---------------------------------------------------------------------------

BranchForward branch_scores(const CausalStanceModel& model, const EncodedExample& encoded,
                            bool train_flag, Rng* dropout_rng) {
    auto& mutable_model = const_cast<CausalStanceModel&>(model);
    Graph graph(dropout_rng);
    std::vector<EncodedExample> one = {encoded};
    const Batch batch = make_batch(one);
    const GraphForward fw = forward_branches(graph, mutable_model, batch, train_flag);
    BranchForward out;
    for (int k = 0; k < 3; ++k) {
        out.scores.j_d[static_cast<std::size_t>(k)] = fw.j_d.at(0, k);
        out.scores.j_t[static_cast<std::size_t>(k)] = fw.j_t.at(0, k);
        out.scores.j_c[static_cast<std::size_t>(k)] = fw.j_c.at(0, k);
    }
    out.h_d.assign(fw.h_d.data.begin(), fw.h_d.data.end());
    return out;
}

std::array<double, 3> fuse(const std::array<double, 3>& j_d, const std::array<double, 3>& j_t,
                           const std::array<double, 3>& j_c) {
    std::array<double, 3> y{};
    for (std::size_t k = 0; k < 3; ++k) {
        const double z = j_d[k] + j_t[k] + j_c[k];
        if (!std::isfinite(z)) throw NumericError("fuse: non-finite branch sum");
        y[k] = -softplus_stable(-z);
    }
    return y;
}

std::array<double, 3> counterfactual_fuse(const CausalStanceModel& model,
                                          const std::array<double, 3>& j_d) {
    const double a = model.a.data[0];
    return fuse(j_d, {a, a, a}, {a, a, a});
}

std::array<double, 3> null_fuse(const CausalStanceModel& model) {
    const double a = model.a.data[0];
    const double y = -softplus_stable(-3.0 * a);
    return {y, y, y};
}

EffectDecomposition decompose_effects(const CausalStanceModel& model,
                                      const EncodedExample& encoded) {
    const BranchForward fw = branch_scores(model, encoded, /*train_flag=*/false);
    EffectDecomposition eff;
    eff.y_fact = fuse(fw.scores.j_d, fw.scores.j_t, fw.scores.j_c);
    eff.y_cf = counterfactual_fuse(model, fw.scores.j_d);
    eff.y_null = null_fuse(model);
    for (std::size_t k = 0; k < 3; ++k) {
        eff.tie[k] = eff.y_fact[k] - eff.y_cf[k];
        eff.nde[k] = eff.y_cf[k] - eff.y_null[k];
        eff.te[k] = eff.nde[k] + eff.tie[k];
    }
    return eff;
}

AdversarialLogits adversarial_forward(const CausalStanceModel& model,
                                      const std::vector<double>& h_d) {
    if (static_cast<std::int64_t>(h_d.size()) != model.config.hidden) {
        throw DimensionError("adversarial_forward: h_d width " + std::to_string(h_d.size()) +
                             " != hidden " + std::to_string(model.config.hidden));
    }
    AdversarialLogits out;
    auto affine = [&](const Tensor& w, const Tensor& b, double* dst, std::int64_t width) {
        for (std::int64_t j = 0; j < width; ++j) {
            double acc = b.data[static_cast<std::size_t>(j)];
            for (std::int64_t i = 0; i < model.config.hidden; ++i) {
                acc += h_d[static_cast<std::size_t>(i)] * w.at(i, j);
            }
            dst[j] = acc;
        }
    };
    affine(model.head_d_w, model.head_d_b, out.stance_logits_d.data(), 3);
    affine(model.head_tmt_w, model.head_tmt_b, out.tmt_logits.data(), 2);
    affine(model.head_stt_w, model.head_stt_b, out.stt_logits.data(), 2);
    return out;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'C', 'R', 'A', 'B', 'M', 'D', '0', '1'};
constexpr std::uint32_t kFormatVersion = 1;

template <typename T>
void write_pod(std::ofstream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <typename T>
T read_pod(std::ifstream& in, const char* what) {
    T v;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!in) throw IoError(std::string("model file truncated while reading ") + what);
    return v;
}

std::vector<std::string> vocab_tokens_in_order(const Vocab& v) {
    std::vector<std::string> tokens(v.index.size());
    for (const auto& [tok, ix] : v.index) tokens[static_cast<std::size_t>(ix - 1)] = tok;
    return tokens;
}

Vocab vocab_from_tokens(const std::vector<std::string>& tokens, int min_freq,
                        std::uint64_t built_from) {
    Vocab v;
    v.min_freq = min_freq;
    v.built_from = built_from;
    int next = 1;
    for (const auto& tok : tokens) v.index[tok] = next++;
    return v;
}

}  // namespace

void save_model(const CausalStanceModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write model file '" + path + "'");
    out.write(kMagic, sizeof(kMagic));
    write_pod(out, kFormatVersion);

    nlohmann::json meta;
    meta["label_order"] = model.label_order;
    meta["config"] = {{"d_in", model.config.d_in},     {"t_in", model.config.t_in},
                      {"c_in", model.config.c_in},     {"hidden", model.config.hidden},
                      {"dropout_p", model.config.dropout_p},
                      {"lambda_grl", model.config.lambda_grl}};
    meta["vocab_fingerprint"] = model.vocabs.fingerprint;
    meta["text_vocab"] = vocab_tokens_in_order(model.vocabs.text);
    meta["text_min_freq"] = model.vocabs.text.min_freq;
    meta["target_vocab"] = vocab_tokens_in_order(model.vocabs.target);
    const std::string meta_str = meta.dump();
    write_pod(out, static_cast<std::uint64_t>(meta_str.size()));
    out.write(meta_str.data(), static_cast<std::streamsize>(meta_str.size()));

    const auto params = model.parameters();
    write_pod(out, static_cast<std::uint32_t>(params.size()));
    for (const auto& [name, tensor] : params) {
        write_pod(out, static_cast<std::uint32_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
        write_pod(out, static_cast<std::uint32_t>(tensor->shape.size()));
        for (auto d : tensor->shape) write_pod(out, d);
        out.write(reinterpret_cast<const char*>(tensor->data.data()),
                  static_cast<std::streamsize>(tensor->data.size() * sizeof(double)));
    }
    if (!out) throw IoError("failed writing model file '" + path + "'");
}

ModelLoadResult load_model(const std::string& path,
                           std::optional<std::uint64_t> expected_fingerprint) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model file '" + path + "'");
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw IoError("'" + path + "' is not a model file (bad magic)");
    }
    const auto version = read_pod<std::uint32_t>(in, "version");
    if (version != kFormatVersion) {
        throw IoError("model format version " + std::to_string(version) + " unsupported (want " +
                      std::to_string(kFormatVersion) + ")");
    }
    const auto meta_len = read_pod<std::uint64_t>(in, "metadata length");
    std::string meta_str(meta_len, '\0');
    in.read(meta_str.data(), static_cast<std::streamsize>(meta_len));
    if (!in) throw IoError("model file truncated while reading metadata");
    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(meta_str);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("model metadata is not valid JSON: ") + e.what());
    }

    ModelLoadResult result;
    CausalStanceModel& m = result.model;
    m.config.d_in = meta.at("config").at("d_in").get<std::int64_t>();
    m.config.t_in = meta.at("config").at("t_in").get<std::int64_t>();
    m.config.c_in = meta.at("config").at("c_in").get<std::int64_t>();
    m.config.hidden = meta.at("config").at("hidden").get<std::int64_t>();
    m.config.dropout_p = meta.at("config").at("dropout_p").get<double>();
    m.config.lambda_grl = meta.at("config").at("lambda_grl").get<double>();
    const auto labels = meta.at("label_order").get<std::vector<std::string>>();
    if (labels.size() != 3) throw IoError("model label order must have 3 entries");
    std::copy(labels.begin(), labels.end(), m.label_order.begin());
    m.vocabs.fingerprint = meta.at("vocab_fingerprint").get<std::uint64_t>();
    m.vocabs.text = vocab_from_tokens(meta.at("text_vocab").get<std::vector<std::string>>(),
                                      meta.at("text_min_freq").get<int>(), m.vocabs.fingerprint);
    m.vocabs.target = vocab_from_tokens(meta.at("target_vocab").get<std::vector<std::string>>(), 1,
                                        m.vocabs.fingerprint);

    const auto count = read_pod<std::uint32_t>(in, "parameter count");
    std::map<std::string, Tensor> loaded;
    for (std::uint32_t i = 0; i < count; ++i) {
        const auto name_len = read_pod<std::uint32_t>(in, "parameter name length");
        std::string name(name_len, '\0');
        in.read(name.data(), name_len);
        if (!in) throw IoError("model file truncated while reading parameter name");
        const auto ndim = read_pod<std::uint32_t>(in, "parameter rank");
        std::vector<std::int64_t> shape;
        std::int64_t numel = 1;
        for (std::uint32_t k = 0; k < ndim; ++k) {
            shape.push_back(read_pod<std::int64_t>(in, "parameter shape"));
            numel *= shape.back();
        }
        std::vector<double> data(static_cast<std::size_t>(numel));
        in.read(reinterpret_cast<char*>(data.data()),
                static_cast<std::streamsize>(data.size() * sizeof(double)));
        if (!in) throw IoError("model file truncated while reading parameter '" + name + "'");
        loaded.emplace(name, Tensor(std::move(shape), std::move(data)));
    }
    for (auto& p : m.parameters()) {
        const auto it = loaded.find(p.name);
        if (it == loaded.end()) throw IoError("model file missing parameter '" + p.name + "'");
        *p.tensor = it->second;
    }

    if (expected_fingerprint.has_value() && *expected_fingerprint != m.vocabs.fingerprint) {
        result.warnings.push_back(
            "vocab fingerprint mismatch: model was built from a different dataset");
    }
    return result;
}

}  // namespace crab
