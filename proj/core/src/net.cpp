#include "symr/net.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "json.hpp"

namespace symr::net {

Matrix matmul(const Matrix& a, const Matrix& b) {
    Matrix c(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i)
        for (int k = 0; k < a.cols; ++k) {
            const double av = a(i, k);
            if (av == 0.0) continue;
            for (int j = 0; j < b.cols; ++j) c(i, j) += av * b(k, j);
        }
    return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    Matrix c(a.rows, b.rows);
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < b.rows; ++j) {
            double s = 0.0;
            for (int k = 0; k < a.cols; ++k) s += a(i, k) * b(j, k);
            c(i, j) = s;
        }
    return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    Matrix c(a.cols, b.cols);
    for (int k = 0; k < a.rows; ++k)
        for (int i = 0; i < a.cols; ++i) {
            const double av = a(k, i);
            if (av == 0.0) continue;
            for (int j = 0; j < b.cols; ++j) c(i, j) += av * b(k, j);
        }
    return c;
}

namespace {

void glorot(Matrix& m, std::mt19937_64& rng) {
    const double bound = std::sqrt(6.0 / (m.rows + m.cols));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (auto& v : m.data) v = dist(rng);
}

}  // namespace

Parameters Parameters::zeros(const ModelConfig& cfg) {
    Parameters p;
    for (int l = 0; l < cfg.num_layers; ++l) {
        const int d_in = l == 0 ? cfg.input_dim : cfg.hidden_dim;
        SageLayerParams layer;
        layer.w_self = Matrix(cfg.hidden_dim, d_in);
        for (int t = 0; t < cfg.num_edge_types; ++t)
            layer.w_nbr.push_back(Matrix(cfg.hidden_dim, d_in));
        layer.bias.assign(cfg.hidden_dim, 0.0);
        p.layers.push_back(std::move(layer));
    }
    p.w_embed = Matrix(cfg.embedding_dim, cfg.hidden_dim);
    p.b_embed.assign(cfg.embedding_dim, 0.0);
    p.wq = Matrix(cfg.embedding_dim, cfg.embedding_dim);
    p.wk = Matrix(cfg.embedding_dim, cfg.embedding_dim);
    p.wv = Matrix(cfg.embedding_dim, cfg.embedding_dim);
    p.wo = Matrix(cfg.embedding_dim, cfg.embedding_dim);
    p.w_cls = Matrix(cfg.num_classes, cfg.embedding_dim);
    p.b_cls.assign(cfg.num_classes, 0.0);
    return p;
}

Parameters Parameters::init(const ModelConfig& cfg, uint64_t seed) {
    Parameters p = zeros(cfg);
    std::mt19937_64 rng(seed);
    for (auto& layer : p.layers) {
        glorot(layer.w_self, rng);
        for (auto& w : layer.w_nbr) glorot(w, rng);
    }
    glorot(p.w_embed, rng);
    glorot(p.wq, rng);
    glorot(p.wk, rng);
    glorot(p.wv, rng);
    glorot(p.wo, rng);
    glorot(p.w_cls, rng);
    return p;
}

std::size_t Parameters::count() const {
    std::size_t n = 0;
    for (const auto& l : layers) {
        n += l.w_self.data.size() + l.bias.size();
        for (const auto& w : l.w_nbr) n += w.data.size();
    }
    n += w_embed.data.size() + b_embed.size();
    n += wq.data.size() + wk.data.size() + wv.data.size() + wo.data.size();
    n += w_cls.data.size() + b_cls.size();
    return n;
}

std::vector<double*> Parameters::flatten() {
    std::vector<double*> out;
    out.reserve(count());
    auto push = [&](std::vector<double>& v) {
        for (auto& x : v) out.push_back(&x);
    };
    for (auto& l : layers) {
        push(l.w_self.data);
        for (auto& w : l.w_nbr) push(w.data);
        push(l.bias);
    }
    push(w_embed.data);
    push(b_embed);
    push(wq.data);
    push(wk.data);
    push(wv.data);
    push(wo.data);
    push(w_cls.data);
    push(b_cls);
    return out;
}

std::vector<const double*> Parameters::flatten() const {
    auto* self = const_cast<Parameters*>(this);
    auto ptrs = self->flatten();
    return {ptrs.begin(), ptrs.end()};
}

std::string Parameters::to_json() const {
    using nlohmann::json;
    auto mat = [](const Matrix& m) {
        return json{{"rows", m.rows}, {"cols", m.cols}, {"data", m.data}};
    };
    json j;
    j["layers"] = json::array();
    for (const auto& l : layers) {
        json jl;
        jl["w_self"] = mat(l.w_self);
        jl["w_nbr"] = json::array();
        for (const auto& w : l.w_nbr) jl["w_nbr"].push_back(mat(w));
        jl["bias"] = l.bias;
        j["layers"].push_back(std::move(jl));
    }
    j["w_embed"] = mat(w_embed);
    j["b_embed"] = b_embed;
    j["wq"] = mat(wq);
    j["wk"] = mat(wk);
    j["wv"] = mat(wv);
    j["wo"] = mat(wo);
    j["w_cls"] = mat(w_cls);
    j["b_cls"] = b_cls;
    return j.dump();
}

Parameters Parameters::from_json(const std::string& text) {
    using nlohmann::json;
    auto j = json::parse(text);
    auto mat = [](const json& jm) {
        Matrix m(jm.at("rows").get<int>(), jm.at("cols").get<int>());
        m.data = jm.at("data").get<std::vector<double>>();
        return m;
    };
    Parameters p;
    for (const auto& jl : j.at("layers")) {
        SageLayerParams l;
        l.w_self = mat(jl.at("w_self"));
        for (const auto& jw : jl.at("w_nbr")) l.w_nbr.push_back(mat(jw));
        l.bias = jl.at("bias").get<std::vector<double>>();
        p.layers.push_back(std::move(l));
    }
    p.w_embed = mat(j.at("w_embed"));
    p.b_embed = j.at("b_embed").get<std::vector<double>>();
    p.wq = mat(j.at("wq"));
    p.wk = mat(j.at("wk"));
    p.wv = mat(j.at("wv"));
    p.wo = mat(j.at("wo"));
    p.w_cls = mat(j.at("w_cls"));
    p.b_cls = j.at("b_cls").get<std::vector<double>>();
    return p;
}

GraphInput graph_input(const NoteGraph& graph, bool heterogeneous) {
    GraphInput in;
    in.num_nodes = graph.node_count;
    in.features = Matrix(graph.node_count, graph.feature_dim);
    in.features.data = graph.features;
    if (heterogeneous) {
        // One slot per type, empty or not, so every window agrees with a
        // fixed num_edge_types.
        for (EdgeType t : kAllEdgeTypes) {
            auto it = graph.edges.find(t);
            in.edge_sets.push_back(it != graph.edges.end() ? it->second
                                                          : EdgeList{});
        }
    } else {
        in.edge_sets.push_back(to_homogeneous(graph).hom_edges);
    }
    return in;
}

// ---------------------------------------------------------------------------
// forward

namespace {

// In-neighbor mean per node: m_v = mean over edges (u, v) of x_u.
Matrix neighbor_mean(const Matrix& x, const EdgeList& edges) {
    Matrix m(x.rows, x.cols);
    std::vector<int> indeg(x.rows, 0);
    for (auto [u, v] : edges) {
        for (int c = 0; c < x.cols; ++c) m(v, c) += x(u, c);
        ++indeg[v];
    }
    for (int v = 0; v < x.rows; ++v)
        if (indeg[v] > 0)
            for (int c = 0; c < x.cols; ++c) m(v, c) /= indeg[v];
    return m;
}

struct SageCache {
    Matrix x;
    std::vector<Matrix> m;
    Matrix pre;
};

Matrix sage_forward(const Matrix& x, const std::vector<EdgeList>& edge_sets,
                    const SageLayerParams& params, SageCache* cache) {
    if (edge_sets.size() != params.w_nbr.size())
        throw Error("edge set count does not match layer parameters");
    if (x.cols != params.w_self.cols) throw Error("feature dim mismatch");

    Matrix pre = matmul_nt(x, params.w_self);
    std::vector<Matrix> means;
    for (std::size_t t = 0; t < edge_sets.size(); ++t) {
        Matrix m = neighbor_mean(x, edge_sets[t]);
        Matrix contrib = matmul_nt(m, params.w_nbr[t]);
        for (std::size_t i = 0; i < pre.data.size(); ++i)
            pre.data[i] += contrib.data[i];
        means.push_back(std::move(m));
    }
    for (int v = 0; v < pre.rows; ++v)
        for (int c = 0; c < pre.cols; ++c) pre(v, c) += params.bias[c];

    Matrix out = pre;
    for (auto& v : out.data) v = std::max(v, 0.0);
    if (cache) {
        cache->x = x;
        cache->m = std::move(means);
        cache->pre = std::move(pre);
    }
    return out;
}

struct WindowCache {
    std::vector<SageCache> layers;
    std::vector<double> pooled;  // hidden_dim
    int num_nodes = 0;
};

std::vector<double> encode_forward(const GraphInput& graph,
                                   const Parameters& params,
                                   const ModelConfig& cfg, WindowCache* cache) {
    std::vector<double> embedding(cfg.embedding_dim, 0.0);
    if (graph.num_nodes == 0) return embedding;  // zero-vector convention

    Matrix h = graph.features;
    std::vector<SageCache> caches(cache ? params.layers.size() : 0);
    for (std::size_t l = 0; l < params.layers.size(); ++l)
        h = sage_forward(h, graph.edge_sets, params.layers[l],
                         cache ? &caches[l] : nullptr);

    std::vector<double> pooled(h.cols, 0.0);
    for (int v = 0; v < h.rows; ++v)
        for (int c = 0; c < h.cols; ++c) pooled[c] += h(v, c);
    for (auto& p : pooled) p /= h.rows;

    for (int i = 0; i < cfg.embedding_dim; ++i) {
        double s = params.b_embed[i];
        for (int c = 0; c < static_cast<int>(pooled.size()); ++c)
            s += params.w_embed(i, c) * pooled[c];
        embedding[i] = s;
    }
    if (cache) {
        cache->layers = std::move(caches);
        cache->pooled = std::move(pooled);
        cache->num_nodes = graph.num_nodes;
    }
    return embedding;
}

void softmax_rows(Matrix& m) {
    for (int i = 0; i < m.rows; ++i) {
        double mx = m(i, 0);
        for (int j = 1; j < m.cols; ++j) mx = std::max(mx, m(i, j));
        double sum = 0.0;
        for (int j = 0; j < m.cols; ++j) {
            m(i, j) = std::exp(m(i, j) - mx);
            sum += m(i, j);
        }
        for (int j = 0; j < m.cols; ++j) m(i, j) /= sum;
    }
}

struct AttnCache {
    Matrix e, q, k, v, o;        // all M x D
    std::vector<Matrix> attn;    // per head, M x M
    std::vector<double> pooled;  // D
};

std::vector<double> classify_forward(const Matrix& e, const Parameters& params,
                                     const ModelConfig& cfg, AttnCache* cache,
                                     Matrix* attention_out) {
    const int m_rows = e.rows;
    if (m_rows == 0) throw Error("classify_piece needs at least one window");
    const int dim = cfg.embedding_dim;
    const int heads = cfg.attention_heads;
    const int dh = dim / heads;
    if (dh * heads != dim) throw Error("embedding dim not divisible by heads");

    Matrix q = matmul_nt(e, params.wq);
    Matrix k = matmul_nt(e, params.wk);
    Matrix v = matmul_nt(e, params.wv);
    Matrix o(m_rows, dim);
    std::vector<Matrix> attn;

    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
    for (int h = 0; h < heads; ++h) {
        const int c0 = h * dh;
        Matrix scores(m_rows, m_rows);
        for (int i = 0; i < m_rows; ++i)
            for (int j = 0; j < m_rows; ++j) {
                double s = 0.0;
                for (int c = 0; c < dh; ++c) s += q(i, c0 + c) * k(j, c0 + c);
                scores(i, j) = s * scale;
            }
        softmax_rows(scores);
        for (int i = 0; i < m_rows; ++i)
            for (int c = 0; c < dh; ++c) {
                double s = 0.0;
                for (int j = 0; j < m_rows; ++j) s += scores(i, j) * v(j, c0 + c);
                o(i, c0 + c) = s;
            }
        attn.push_back(std::move(scores));
    }

    if (attention_out) {
        *attention_out = Matrix(m_rows, m_rows);
        for (const auto& a : attn)
            for (std::size_t i = 0; i < a.data.size(); ++i)
                attention_out->data[i] += a.data[i] / heads;
    }

    // z = o * Wo^T, same orientation as the other projections
    Matrix z = matmul_nt(o, params.wo);

    std::vector<double> pooled(dim, 0.0);
    for (int i = 0; i < m_rows; ++i)
        for (int c = 0; c < dim; ++c) pooled[c] += z(i, c);
    for (auto& p : pooled) p /= m_rows;

    std::vector<double> logits(cfg.num_classes, 0.0);
    for (int i = 0; i < cfg.num_classes; ++i) {
        double s = params.b_cls[i];
        for (int c = 0; c < dim; ++c) s += params.w_cls(i, c) * pooled[c];
        logits[i] = s;
    }
    if (cache) {
        cache->e = e;
        cache->q = std::move(q);
        cache->k = std::move(k);
        cache->v = std::move(v);
        cache->o = std::move(o);
        cache->attn = std::move(attn);
        cache->pooled = std::move(pooled);
    }
    return logits;
}

}  // namespace

Matrix sage_layer(const Matrix& features, const std::vector<EdgeList>& edge_sets,
                  const SageLayerParams& params) {
    return sage_forward(features, edge_sets, params, nullptr);
}

std::vector<double> encode_window(const GraphInput& graph, const Parameters& params,
                                  const ModelConfig& cfg) {
    return encode_forward(graph, params, cfg, nullptr);
}

std::vector<double> classify_piece(const Matrix& window_embeddings,
                                   const Parameters& params,
                                   const ModelConfig& cfg, Matrix* attention_out) {
    return classify_forward(window_embeddings, params, cfg, nullptr, attention_out);
}

std::vector<double> softmax(const std::vector<double>& logits) {
    std::vector<double> p = logits;
    double mx = *std::max_element(p.begin(), p.end());
    double sum = 0.0;
    for (auto& v : p) {
        v = std::exp(v - mx);
        sum += v;
    }
    for (auto& v : p) v /= sum;
    return p;
}

LossGrads loss_and_gradients(const std::vector<GraphInput>& windows, int label,
                             const Parameters& params, const ModelConfig& cfg) {
    if (windows.empty()) throw Error("no windows");
    if (label < 0 || label >= cfg.num_classes) throw Error("label out of range");

    const int m_rows = static_cast<int>(windows.size());
    const int dim = cfg.embedding_dim;

    std::vector<WindowCache> wcaches(m_rows);
    Matrix e(m_rows, dim);
    for (int i = 0; i < m_rows; ++i) {
        auto emb = encode_forward(windows[i], params, cfg, &wcaches[i]);
        for (int c = 0; c < dim; ++c) e(i, c) = emb[c];
    }

    AttnCache ac;
    auto logits = classify_forward(e, params, cfg, &ac, nullptr);
    auto probs = softmax(logits);
    if (!std::isfinite(probs[label]) || probs[label] <= 0.0)
        throw Error("non-finite loss");

    LossGrads out;
    out.loss = -std::log(probs[label]);
    out.grads = Parameters::zeros(cfg);
    Parameters& g = out.grads;

    // classifier
    std::vector<double> dlogits = probs;
    dlogits[label] -= 1.0;
    std::vector<double> dpooled(dim, 0.0);
    for (int i = 0; i < cfg.num_classes; ++i) {
        g.b_cls[i] += dlogits[i];
        for (int c = 0; c < dim; ++c) {
            g.w_cls(i, c) += dlogits[i] * ac.pooled[c];
            dpooled[c] += params.w_cls(i, c) * dlogits[i];
        }
    }

    // mean over attended rows
    Matrix dz(m_rows, dim);
    for (int i = 0; i < m_rows; ++i)
        for (int c = 0; c < dim; ++c) dz(i, c) = dpooled[c] / m_rows;

    // z = o * Wo^T
    {
        Matrix dwo = matmul_tn(dz, ac.o);  // dim x dim
        for (std::size_t i = 0; i < dwo.data.size(); ++i)
            g.wo.data[i] += dwo.data[i];
    }
    Matrix d_o = matmul(dz, params.wo);

    // attention heads
    const int heads = cfg.attention_heads;
    const int dh = dim / heads;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
    Matrix dq(m_rows, dim), dk(m_rows, dim), dv(m_rows, dim);
    for (int h = 0; h < heads; ++h) {
        const int c0 = h * dh;
        const Matrix& a = ac.attn[h];
        // dA = dO_h V_h^T ; dV_h = A^T dO_h
        Matrix da(m_rows, m_rows);
        for (int i = 0; i < m_rows; ++i)
            for (int j = 0; j < m_rows; ++j) {
                double s = 0.0;
                for (int c = 0; c < dh; ++c) s += d_o(i, c0 + c) * ac.v(j, c0 + c);
                da(i, j) = s;
            }
        for (int j = 0; j < m_rows; ++j)
            for (int c = 0; c < dh; ++c) {
                double s = 0.0;
                for (int i = 0; i < m_rows; ++i) s += a(i, j) * d_o(i, c0 + c);
                dv(j, c0 + c) += s;
            }
        // softmax rows backward, then the 1/sqrt(dh) scale
        Matrix ds(m_rows, m_rows);
        for (int i = 0; i < m_rows; ++i) {
            double dot = 0.0;
            for (int j = 0; j < m_rows; ++j) dot += da(i, j) * a(i, j);
            for (int j = 0; j < m_rows; ++j)
                ds(i, j) = a(i, j) * (da(i, j) - dot) * scale;
        }
        // dQ_h = dS K_h ; dK_h = dS^T Q_h
        for (int i = 0; i < m_rows; ++i)
            for (int c = 0; c < dh; ++c) {
                double s = 0.0;
                for (int j = 0; j < m_rows; ++j) s += ds(i, j) * ac.k(j, c0 + c);
                dq(i, c0 + c) += s;
            }
        for (int j = 0; j < m_rows; ++j)
            for (int c = 0; c < dh; ++c) {
                double s = 0.0;
                for (int i = 0; i < m_rows; ++i) s += ds(i, j) * ac.q(i, c0 + c);
                dk(j, c0 + c) += s;
            }
    }

    // q = e * Wq^T etc.
    Matrix de(m_rows, dim);
    auto proj_back = [&](const Matrix& dproj, const Matrix& w, Matrix& gw) {
        Matrix dw = matmul_tn(dproj, ac.e);
        for (std::size_t i = 0; i < dw.data.size(); ++i) gw.data[i] += dw.data[i];
        Matrix dx = matmul(dproj, w);
        for (std::size_t i = 0; i < dx.data.size(); ++i) de.data[i] += dx.data[i];
    };
    proj_back(dq, params.wq, g.wq);
    proj_back(dk, params.wk, g.wk);
    proj_back(dv, params.wv, g.wv);

    // back through each window's front end
    for (int wi = 0; wi < m_rows; ++wi) {
        const auto& wc = wcaches[wi];
        if (wc.num_nodes == 0) continue;  // zero embedding has no gradient
        const int hidden = static_cast<int>(wc.pooled.size());

        std::vector<double> dpool(hidden, 0.0);
        for (int i = 0; i < dim; ++i) {
            const double dei = de(wi, i);
            g.b_embed[i] += dei;
            for (int c = 0; c < hidden; ++c) {
                g.w_embed(i, c) += dei * wc.pooled[c];
                dpool[c] += params.w_embed(i, c) * dei;
            }
        }

        Matrix dh_mat(wc.num_nodes, hidden);
        for (int v = 0; v < wc.num_nodes; ++v)
            for (int c = 0; c < hidden; ++c) dh_mat(v, c) = dpool[c] / wc.num_nodes;

        for (int l = static_cast<int>(params.layers.size()) - 1; l >= 0; --l) {
            const auto& cache = wc.layers[l];
            const auto& lp = params.layers[l];
            auto& lg = g.layers[l];

            Matrix dpre = dh_mat;
            for (std::size_t i = 0; i < dpre.data.size(); ++i)
                if (cache.pre.data[i] <= 0.0) dpre.data[i] = 0.0;

            {
                Matrix dw = matmul_tn(dpre, cache.x);
                for (std::size_t i = 0; i < dw.data.size(); ++i)
                    lg.w_self.data[i] += dw.data[i];
            }
            for (int v = 0; v < dpre.rows; ++v)
                for (int c = 0; c < dpre.cols; ++c) lg.bias[c] += dpre(v, c);

            Matrix dx = matmul(dpre, lp.w_self);
            for (std::size_t t = 0; t < windows[wi].edge_sets.size(); ++t) {
                Matrix dw = matmul_tn(dpre, cache.m[t]);
                for (std::size_t i = 0; i < dw.data.size(); ++i)
                    lg.w_nbr[t].data[i] += dw.data[i];
                Matrix dm = matmul(dpre, lp.w_nbr[t]);
                std::vector<int> indeg(wc.num_nodes, 0);
                for (auto [u, v] : windows[wi].edge_sets[t]) ++indeg[v];
                for (auto [u, v] : windows[wi].edge_sets[t])
                    for (int c = 0; c < dx.cols; ++c)
                        dx(u, c) += dm(v, c) / indeg[v];
            }
            dh_mat = std::move(dx);
        }
    }
    return out;
}

GradCheckReport grad_check(const std::vector<GraphInput>& windows, int label,
                           Parameters& params, const ModelConfig& cfg,
                           double eps, std::size_t sample, uint64_t seed,
                           long fault_entry) {
    auto analytic = loss_and_gradients(windows, label, params, cfg);
    auto grad_ptrs = analytic.grads.flatten();
    auto param_ptrs = params.flatten();

    std::vector<std::size_t> indices(param_ptrs.size());
    for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
    std::mt19937_64 rng(seed);
    std::shuffle(indices.begin(), indices.end(), rng);
    const std::size_t n = std::min(sample, indices.size());

    // Fault injection targets the largest-magnitude sampled analytic
    // entry so a +10% corruption is always visible in the report.
    std::size_t fault_idx = param_ptrs.size();
    if (fault_entry >= 0) {
        double best = -1.0;
        for (std::size_t s = 0; s < n; ++s) {
            const double mag = std::fabs(*grad_ptrs[indices[s]]);
            if (mag > best) {
                best = mag;
                fault_idx = indices[s];
            }
        }
    }

    GradCheckReport report;
    report.seed = seed;
    report.entries_checked = n;
    for (std::size_t s = 0; s < n; ++s) {
        const std::size_t idx = indices[s];
        double* theta = param_ptrs[idx];
        const double saved = *theta;
        *theta = saved + eps;
        const double lp = loss_and_gradients(windows, label, params, cfg).loss;
        *theta = saved - eps;
        const double lm = loss_and_gradients(windows, label, params, cfg).loss;
        *theta = saved;
        if (!std::isfinite(lp) || !std::isfinite(lm)) throw Error("non-finite loss");

        const double numeric = (lp - lm) / (2.0 * eps);
        double a = *grad_ptrs[idx];
        if (idx == fault_idx) a *= 1.10;
        // The floor absorbs central-difference roundoff (~1e-10 at
        // eps=1e-5) on near-zero gradient entries.
        const double denom = std::max({std::fabs(a), std::fabs(numeric), 1e-6});
        report.max_rel_err =
            std::max(report.max_rel_err, std::fabs(a - numeric) / denom);
    }
    return report;
}

double attention_adjacency_correlation(const Matrix& attn, const Matrix& adj) {
    if (attn.rows != adj.rows || attn.cols != adj.cols || attn.rows != attn.cols)
        throw Error("matrices must be square and equally shaped");
    std::vector<double> a, b;
    for (int i = 0; i < attn.rows; ++i)
        for (int j = 0; j < attn.cols; ++j) {
            if (i == j) continue;
            a.push_back(attn(i, j));
            b.push_back(adj(i, j));
        }
    if (a.empty()) throw Error("no off-diagonal entries");

    // A constant vector has undefined correlation; test for constancy
    // directly since the summed variance of one can round to nonzero.
    auto constant = [](const std::vector<double>& v) {
        for (double x : v)
            if (x != v.front()) return false;
        return true;
    };
    if (constant(a) || constant(b)) throw ZeroVariance();

    const std::size_t n = a.size();
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double saa = 0.0, sbb = 0.0, sab = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
        sab += (a[i] - ma) * (b[i] - mb);
    }
    if (saa == 0.0 || sbb == 0.0) throw ZeroVariance();
    return sab / std::sqrt(saa * sbb);
}

}  // namespace symr::net
