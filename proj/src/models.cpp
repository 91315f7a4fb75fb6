// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cebed authors

#include "cebed/models.hpp"

#include <stdexcept>
#include <unordered_map>

#include "cebed/rng.hpp"

namespace cebed::zoo {

using nn::Tensor;

const char* model_name_str(ModelName m) {
    switch (m) {
        case ModelName::ChannelNet: return "ChannelNet";
        case ModelName::ReEsNet: return "ReEsNet";
        case ModelName::InReEsNet: return "InReEsNet";
        case ModelName::MReEsNet: return "MReEsNet";
        case ModelName::DDAE: return "DDAE";
        case ModelName::MTRE: return "MTRE";
        case ModelName::HA02: return "HA02";
    }
    return "?";
}

ModelName model_name_from(std::string_view s) {
    for (ModelName m : {ModelName::ChannelNet, ModelName::ReEsNet, ModelName::InReEsNet,
                        ModelName::MReEsNet, ModelName::DDAE, ModelName::MTRE, ModelName::HA02})
        if (s == model_name_str(m)) return m;
    throw std::invalid_argument("unknown model name: " + std::string(s));
}

InputKind input_kind_of(ModelName m) {
    switch (m) {
        case ModelName::ChannelNet:
        case ModelName::ReEsNet:
        case ModelName::InReEsNet: return InputKind::LowRes;
        default: return InputKind::Masked;
    }
}

ModelSpec ModelSpec::defaults(ModelName name, const ScenarioSpec& sc) {
    sc.validate();
    ModelSpec spec;
    spec.name = name;
    spec.n_fp = sc.n_fp;
    spec.n_sp = sc.n_sp;
    spec.n_r = sc.n_r;
    if (name == ModelName::HA02) spec.encoder_blocks = 1;
    spec.validate();
    return spec;
}

void ModelSpec::validate() const {
    if (n_f < 1 || n_s < 1 || n_fp < 1 || n_sp < 1 || n_r < 1)
        throw std::invalid_argument("ModelSpec: bad dimensions");
    if (n_f % n_fp != 0 || n_s % n_sp != 0)
        throw std::invalid_argument("ModelSpec: pilot counts must divide grid dims");
    if (embed_dim % heads != 0)
        throw std::invalid_argument("ModelSpec: heads must divide embed_dim");
}

namespace {

// Parameter construction with deterministic init: He-uniform for
// conv/dense, Xavier-uniform for attention projections, ones/zeros for
// layer norms, small uniform for positional embeddings.
struct Builder {
    std::vector<std::pair<std::string, Tensor>>& out;
    Rng& rng;

    void fill_uniform(Tensor& t, double limit) {
        for (float& x : t.v) x = static_cast<float>(rng.uniform(-limit, limit));
    }
    void conv(const std::string& name, int kh, int kw, int ci, int co) {
        Tensor w({kh, kw, ci, co});
        fill_uniform(w, std::sqrt(6.0 / (static_cast<double>(kh) * kw * ci)));
        out.emplace_back(name + ".w", std::move(w));
        out.emplace_back(name + ".b", Tensor({co}));
    }
    void dense(const std::string& name, int in, int o, bool xavier = false) {
        Tensor w({in, o});
        const double limit = xavier ? std::sqrt(6.0 / (in + o)) : std::sqrt(6.0 / in);
        fill_uniform(w, limit);
        out.emplace_back(name + ".w", std::move(w));
        out.emplace_back(name + ".b", Tensor({o}));
    }
    void layer_norm(const std::string& name, int d) {
        Tensor g({d});
        for (float& x : g.v) x = 1.0f;
        out.emplace_back(name + ".g", std::move(g));
        out.emplace_back(name + ".beta", Tensor({d}));
    }
    void positional(const std::string& name, int s, int d) {
        Tensor p({s, d});
        fill_uniform(p, 0.02);
        out.emplace_back(name, std::move(p));
    }
};

void build_res_trunk_params(Builder& b, const std::string& prefix, int ci, int ch, int blocks) {
    b.conv(prefix + "head", 3, 3, ci, ch);
    for (int i = 0; i < blocks; ++i) {
        b.conv(prefix + "block" + std::to_string(i) + ".conv1", 3, 3, ch, ch);
        b.conv(prefix + "block" + std::to_string(i) + ".conv2", 3, 3, ch, ch);
    }
    b.conv(prefix + "tail", 3, 3, ch, ch);
}

void build_encoder_params(Builder& b, const std::string& prefix, int d, int ffn) {
    b.dense(prefix + "q", d, d, true);
    b.dense(prefix + "k", d, d, true);
    b.dense(prefix + "v", d, d, true);
    b.dense(prefix + "proj", d, d, true);
    b.layer_norm(prefix + "ln1", d);
    b.dense(prefix + "ffn1", d, ffn);
    b.dense(prefix + "ffn2", ffn, d);
    b.layer_norm(prefix + "ln2", d);
}

// Forward-side handle: parameter name -> tape node id.
struct Graph {
    nn::Tape& tape;
    std::unordered_map<std::string, int> ids;

    int p(const std::string& name) const {
        auto it = ids.find(name);
        if (it == ids.end()) throw std::logic_error("model: missing parameter " + name);
        return it->second;
    }
    int conv(int x, const std::string& name) {
        return tape.conv2d(x, p(name + ".w"), p(name + ".b"));
    }
    int dense2d(int x, const std::string& name) {
        return tape.dense(x, p(name + ".w"), p(name + ".b"));
    }
    int norm(int x, const std::string& name) {
        return tape.layer_norm(x, p(name + ".g"), p(name + ".beta"));
    }
};

int res_trunk(Graph& g, const std::string& prefix, int x, int blocks) {
    const int head = g.conv(x, prefix + "head");
    int t = head;
    for (int i = 0; i < blocks; ++i) {
        const std::string base = prefix + "block" + std::to_string(i);
        int a = g.tape.relu(g.conv(t, base + ".conv1"));
        a = g.conv(a, base + ".conv2");
        t = g.tape.residual_add(t, a);
    }
    t = g.conv(t, prefix + "tail");
    return g.tape.residual_add(head, t);
}

int encoder_block(Graph& g, const std::string& prefix, int x, int bsz, int slen, int d, int heads) {
    const int x2 = g.tape.reshape(x, {bsz * slen, d});
    const int q = g.tape.reshape(g.dense2d(x2, prefix + "q"), {bsz, slen, d});
    const int k = g.tape.reshape(g.dense2d(x2, prefix + "k"), {bsz, slen, d});
    const int v = g.tape.reshape(g.dense2d(x2, prefix + "v"), {bsz, slen, d});
    const int att = g.tape.scaled_dot_attention(q, k, v, heads);
    const int att2 = g.tape.reshape(
        g.dense2d(g.tape.reshape(att, {bsz * slen, d}), prefix + "proj"), {bsz, slen, d});
    const int n1 = g.norm(g.tape.residual_add(x, att2), prefix + "ln1");
    int f = g.tape.relu(g.dense2d(g.tape.reshape(n1, {bsz * slen, d}), prefix + "ffn1"));
    f = g.dense2d(f, prefix + "ffn2");
    const int f3 = g.tape.reshape(f, {bsz, slen, d});
    return g.norm(g.tape.residual_add(n1, f3), prefix + "ln2");
}

// Conv1d embedding over the subcarrier sequence plus learned positions.
int embed_sequence(Graph& g, const ModelSpec& spec, int x, int bsz) {
    const int feat = spec.n_s * spec.planes();
    int t = g.tape.reshape(x, {bsz, spec.n_f, 1, feat});
    t = g.conv(t, "embed");  // kernel (3,1)
    t = g.tape.reshape(t, {bsz, spec.n_f, spec.embed_dim});
    return g.tape.broadcast_add(t, g.p("pos"));
}

}  // namespace

Model::Model(ModelSpec spec, std::uint64_t seed) : spec_(std::move(spec)) {
    spec_.validate();
    Rng rng(seed);
    Builder b{params_, rng};
    const int c = spec_.planes();
    const int feat = spec_.n_s * c;

    switch (spec_.name) {
        case ModelName::ChannelNet:
            b.conv("sr.conv1", 9, 9, c, spec_.srcnn_c1);
            b.conv("sr.conv2", 5, 5, spec_.srcnn_c1, spec_.srcnn_c2);
            b.conv("sr.conv3", 5, 5, spec_.srcnn_c2, c);
            b.conv("dn.conv1", 3, 3, c, spec_.denoise_channels);
            b.conv("dn.conv2", 3, 3, spec_.denoise_channels, spec_.denoise_channels);
            b.conv("dn.conv3", 3, 3, spec_.denoise_channels, spec_.denoise_channels);
            b.conv("dn.conv4", 3, 3, spec_.denoise_channels, spec_.denoise_channels);
            b.conv("dn.conv5", 3, 3, spec_.denoise_channels, c);
            break;
        case ModelName::ReEsNet: {
            build_res_trunk_params(b, "", c, spec_.res_channels, spec_.res_blocks);
            // kernel ~ 2x stride so every output phase overlaps several taps
            const int sf = spec_.n_f / spec_.n_fp, ss = spec_.n_s / spec_.n_sp;
            b.conv("up", 2 * sf + 2 - sf % 2, 2 * ss + 2 - ss % 2, spec_.res_channels,
                   spec_.res_channels);
            b.conv("out", 3, 3, spec_.res_channels, c);
            break;
        }
        case ModelName::InReEsNet:
        case ModelName::MReEsNet:
            build_res_trunk_params(b, "", c, spec_.res_channels, spec_.res_blocks);
            b.conv("out", 3, 3, spec_.res_channels, c);
            break;
        case ModelName::DDAE: {
            const int d = spec_.n_f * feat;
            b.dense("enc1", d, spec_.dense_hidden1);
            b.dense("enc2", spec_.dense_hidden1, spec_.dense_hidden2);
            b.dense("dec1", spec_.dense_hidden2, spec_.dense_hidden1);
            b.dense("dec2", spec_.dense_hidden1, d);
            break;
        }
        case ModelName::MTRE:
            b.conv("embed", 3, 1, feat, spec_.embed_dim);
            b.positional("pos", spec_.n_f, spec_.embed_dim);
            for (int i = 0; i < spec_.encoder_blocks; ++i)
                build_encoder_params(b, "enc" + std::to_string(i) + ".", spec_.embed_dim,
                                     spec_.ffn_dim);
            b.dense("head", spec_.embed_dim, feat);
            break;
        case ModelName::HA02:
            b.conv("embed", 3, 1, feat, spec_.embed_dim);
            b.positional("pos", spec_.n_f, spec_.embed_dim);
            for (int i = 0; i < spec_.encoder_blocks; ++i)
                build_encoder_params(b, "enc" + std::to_string(i) + ".", spec_.embed_dim,
                                     spec_.ffn_dim);
            b.dense("expand", spec_.embed_dim, spec_.n_s * spec_.res_channels);
            for (int i = 0; i < spec_.decoder_blocks; ++i) {
                b.conv("dec.block" + std::to_string(i) + ".conv1", 3, 3, spec_.res_channels,
                       spec_.res_channels);
                b.conv("dec.block" + std::to_string(i) + ".conv2", 3, 3, spec_.res_channels,
                       spec_.res_channels);
            }
            b.conv("out", 3, 3, spec_.res_channels, c);
            break;
    }
}

std::size_t Model::param_count() const {
    std::size_t n = 0;
    for (const auto& [name, t] : params_) n += t.numel();
    return n;
}

int Model::forward(nn::Tape& tape, int input, bool trainable) const {
    const auto& in_shape = tape.value(input).shape;
    const int c = spec_.planes();
    const bool lowres = spec_.input_kind() == InputKind::LowRes;
    const std::vector<int> want = lowres ? std::vector<int>{spec_.n_fp, spec_.n_sp, c}
                                         : std::vector<int>{spec_.n_f, spec_.n_s, c};
    if (in_shape.size() != 4 || std::vector<int>(in_shape.begin() + 1, in_shape.end()) != want)
        throw std::invalid_argument("model forward: input shape does not match spec");
    const int bsz = in_shape[0];

    Graph g{tape, {}};
    for (const auto& [name, t] : params_)
        g.ids.emplace(name, trainable ? tape.param(name, t) : tape.input(t));

    switch (spec_.name) {
        case ModelName::ChannelNet: {
            int x = tape.bilinear_upsample(input, spec_.n_f, spec_.n_s);
            x = tape.relu(g.conv(x, "sr.conv1"));
            x = tape.relu(g.conv(x, "sr.conv2"));
            x = g.conv(x, "sr.conv3");
            x = tape.relu(g.conv(x, "dn.conv1"));
            x = tape.relu(g.conv(x, "dn.conv2"));
            x = tape.relu(g.conv(x, "dn.conv3"));
            x = tape.relu(g.conv(x, "dn.conv4"));
            return g.conv(x, "dn.conv5");
        }
        case ModelName::ReEsNet: {
            int t = res_trunk(g, "", input, spec_.res_blocks);
            const int sf = spec_.n_f / spec_.n_fp, ss = spec_.n_s / spec_.n_sp;
            t = tape.conv2d_transpose(t, g.p("up.w"), g.p("up.b"), sf, ss);
            return g.conv(t, "out");
        }
        case ModelName::InReEsNet: {
            int t = res_trunk(g, "", input, spec_.res_blocks);
            t = tape.bilinear_upsample(t, spec_.n_f, spec_.n_s);
            return g.conv(t, "out");
        }
        case ModelName::MReEsNet: {
            const int t = res_trunk(g, "", input, spec_.res_blocks);
            return g.conv(t, "out");
        }
        case ModelName::DDAE: {
            const int d = spec_.n_f * spec_.n_s * c;
            int x = tape.reshape(input, {bsz, d});
            x = tape.relu(g.dense2d(x, "enc1"));
            x = tape.relu(g.dense2d(x, "enc2"));
            x = tape.relu(g.dense2d(x, "dec1"));
            x = g.dense2d(x, "dec2");
            return tape.reshape(x, {bsz, spec_.n_f, spec_.n_s, c});
        }
        case ModelName::MTRE: {
            int x = embed_sequence(g, spec_, input, bsz);
            for (int i = 0; i < spec_.encoder_blocks; ++i)
                x = encoder_block(g, "enc" + std::to_string(i) + ".", x, bsz, spec_.n_f,
                                  spec_.embed_dim, spec_.heads);
            x = g.dense2d(tape.reshape(x, {bsz * spec_.n_f, spec_.embed_dim}), "head");
            return tape.reshape(x, {bsz, spec_.n_f, spec_.n_s, c});
        }
        case ModelName::HA02: {
            int x = embed_sequence(g, spec_, input, bsz);
            for (int i = 0; i < spec_.encoder_blocks; ++i)
                x = encoder_block(g, "enc" + std::to_string(i) + ".", x, bsz, spec_.n_f,
                                  spec_.embed_dim, spec_.heads);
            x = g.dense2d(tape.reshape(x, {bsz * spec_.n_f, spec_.embed_dim}), "expand");
            x = tape.reshape(x, {bsz, spec_.n_f, spec_.n_s, spec_.res_channels});
            for (int i = 0; i < spec_.decoder_blocks; ++i) {
                const std::string base = "dec.block" + std::to_string(i);
                int a = tape.relu(g.conv(x, base + ".conv1"));
                a = g.conv(a, base + ".conv2");
                x = tape.residual_add(x, a);
            }
            return g.conv(x, "out");
        }
    }
    throw std::logic_error("model forward: unhandled architecture");
}

std::vector<nn::ParamEntry> Model::to_entries() const {
    std::vector<nn::ParamEntry> entries;
    entries.reserve(params_.size());
    for (const auto& [name, t] : params_) entries.push_back({name, t.shape, t.v});
    return entries;
}

void Model::from_entries(const std::vector<nn::ParamEntry>& entries) {
    if (entries.size() != params_.size())
        throw std::invalid_argument("model: checkpoint parameter count mismatch");
    for (std::size_t i = 0; i < entries.size(); ++i) {
        auto& [name, t] = params_[i];
        if (entries[i].name != name || entries[i].shape != t.shape)
            throw std::invalid_argument("model: checkpoint manifest mismatch at " + entries[i].name);
        t.v = entries[i].values;
    }
}

nn::Tensor input_adapter(const est::PilotObservation& obs, InputKind kind) {
    const ComplexGrid ls = est::ls_pilot(obs);
    const int n_r = ls.antennas();
    if (kind == InputKind::LowRes) {
        Tensor t({obs.pattern.n_fp, obs.pattern.n_sp, 2 * n_r});
        for (int pf = 0; pf < obs.pattern.n_fp; ++pf)
            for (int ps = 0; ps < obs.pattern.n_sp; ++ps)
                for (int a = 0; a < n_r; ++a) {
                    const cd v = ls.at(a, pf, ps);
                    const std::size_t base =
                        (static_cast<std::size_t>(pf) * obs.pattern.n_sp + ps) * 2 * n_r;
                    t.v[base + 2 * a] = static_cast<float>(v.real());
                    t.v[base + 2 * a + 1] = static_cast<float>(v.imag());
                }
        return t;
    }
    const GridDims dims = obs.pattern.dims;
    Tensor t({dims.n_f, dims.n_s, 2 * n_r});
    for (int pf = 0; pf < obs.pattern.n_fp; ++pf)
        for (int ps = 0; ps < obs.pattern.n_sp; ++ps) {
            const int f = obs.pattern.subcarrier_positions[pf];
            const int s = obs.pattern.symbol_positions[ps];
            for (int a = 0; a < n_r; ++a) {
                const cd v = ls.at(a, pf, ps);
                const std::size_t base = (static_cast<std::size_t>(f) * dims.n_s + s) * 2 * n_r;
                t.v[base + 2 * a] = static_cast<float>(v.real());
                t.v[base + 2 * a + 1] = static_cast<float>(v.imag());
            }
        }
    return t;
}

nn::Tensor grid_to_planes(const ComplexGrid& g) {
    const int n_r = g.antennas();
    Tensor t({g.dims().n_f, g.dims().n_s, 2 * n_r});
    for (int f = 0; f < g.dims().n_f; ++f)
        for (int s = 0; s < g.dims().n_s; ++s)
            for (int a = 0; a < n_r; ++a) {
                const cd v = g.at(a, f, s);
                const std::size_t base =
                    (static_cast<std::size_t>(f) * g.dims().n_s + s) * 2 * n_r;
                t.v[base + 2 * a] = static_cast<float>(v.real());
                t.v[base + 2 * a + 1] = static_cast<float>(v.imag());
            }
    return t;
}

ComplexGrid planes_to_grid(const nn::Tensor& t) {
    if (t.rank() != 3 || t.dim(2) % 2 != 0)
        throw std::invalid_argument("planes_to_grid: expects [n_f, n_s, 2*n_r]");
    const int n_f = t.dim(0), n_s = t.dim(1), n_r = t.dim(2) / 2;
    ComplexGrid g(GridDims{n_f, n_s}, n_r);
    for (int f = 0; f < n_f; ++f)
        for (int s = 0; s < n_s; ++s)
            for (int a = 0; a < n_r; ++a) {
                const std::size_t base = (static_cast<std::size_t>(f) * n_s + s) * 2 * n_r;
                g.at(a, f, s) = cd{static_cast<double>(t.v[base + 2 * a]),
                                   static_cast<double>(t.v[base + 2 * a + 1])};
            }
    return g;
}

nn::Tensor stack(const std::vector<nn::Tensor>& items) {
    if (items.empty()) throw std::invalid_argument("stack: empty batch");
    std::vector<int> shape{static_cast<int>(items.size())};
    shape.insert(shape.end(), items[0].shape.begin(), items[0].shape.end());
    Tensor out(shape);
    const std::size_t stride = items[0].numel();
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (items[i].shape != items[0].shape) throw std::invalid_argument("stack: ragged shapes");
        std::copy(items[i].v.begin(), items[i].v.end(), out.v.begin() + i * stride);
    }
    return out;
}

ComplexGrid estimate(const Model& model, const est::PilotObservation& obs) {
    if (obs.pattern.n_fp != model.spec().n_fp || obs.pattern.n_sp != model.spec().n_sp ||
        obs.y_p.antennas() != model.spec().n_r)
        throw std::invalid_argument("estimate: observation does not match model dims");
    nn::Tape tape;
    const int in = tape.input(stack({input_adapter(obs, model.spec().input_kind())}));
    const int out = model.forward(tape, in, /*trainable=*/false);
    const Tensor& y = tape.value(out);
    Tensor one({model.spec().n_f, model.spec().n_s, model.spec().planes()},
               std::vector<float>(y.v.begin(), y.v.end()));
    return planes_to_grid(one);
}

std::vector<nn::Tensor> estimate_batch(const Model& model, const std::vector<nn::Tensor>& inputs,
                                       int batch_size) {
    std::vector<Tensor> outputs;
    outputs.reserve(inputs.size());
    for (std::size_t start = 0; start < inputs.size(); start += batch_size) {
        const std::size_t stop = std::min(inputs.size(), start + batch_size);
        std::vector<Tensor> chunk(inputs.begin() + start, inputs.begin() + stop);
        nn::Tape tape;
        const int out = model.forward(tape, tape.input(stack(chunk)), /*trainable=*/false);
        const Tensor& y = tape.value(out);
        const std::size_t stride = y.numel() / chunk.size();
        std::vector<int> shape(y.shape.begin() + 1, y.shape.end());
        for (std::size_t i = 0; i < chunk.size(); ++i)
            outputs.emplace_back(shape, std::vector<float>(y.v.begin() + i * stride,
                                                           y.v.begin() + (i + 1) * stride));
    }
    return outputs;
}

}  // namespace cebed::zoo
