#ifndef SYMR_NET_HPP
#define SYMR_NET_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "symr/graph.hpp"

namespace symr::net {

/// Dense row-major matrix of doubles. Small and dependency-free on
/// purpose; everything here runs at desk scale.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0) {}

    double& operator()(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
    double operator()(int r, int c) const {
        return data[static_cast<size_t>(r) * cols + c];
    }
};

// C = A * B
Matrix matmul(const Matrix& a, const Matrix& b);
// C = A * B^T
Matrix matmul_nt(const Matrix& a, const Matrix& b);
// C = A^T * B
Matrix matmul_tn(const Matrix& a, const Matrix& b);

struct ModelConfig {
    int input_dim = 23;
    int num_layers = 5;
    int hidden_dim = 64;
    int embedding_dim = 64;  // fixed by the pipeline contract
    int attention_heads = 16;
    int num_classes = 2;
    int num_edge_types = 1;  // 1 = homogeneous convolution
};

struct SageLayerParams {
    Matrix w_self;                // d_out x d_in
    std::vector<Matrix> w_nbr;    // one per edge type
    std::vector<double> bias;     // d_out
};

struct Parameters {
    std::vector<SageLayerParams> layers;
    Matrix w_embed;               // embedding_dim x hidden_dim
    std::vector<double> b_embed;
    Matrix wq, wk, wv, wo;        // embedding_dim x embedding_dim
    Matrix w_cls;                 // num_classes x embedding_dim
    std::vector<double> b_cls;

    /// Glorot-uniform init, deterministic for a fixed seed.
    static Parameters init(const ModelConfig& cfg, uint64_t seed);
    static Parameters zeros(const ModelConfig& cfg);

    std::size_t count() const;
    /// Pointers to every scalar, in a stable order.
    std::vector<double*> flatten();
    std::vector<const double*> flatten() const;

    std::string to_json() const;
    static Parameters from_json(const std::string& text);
};

/// One window's worth of graph data, ready for the front end. For a
/// homogeneous pass `edge_sets` holds the single union list; for a
/// heterogeneous pass one list per edge type (seven, possibly empty).
struct GraphInput {
    int num_nodes = 0;
    Matrix features;                 // num_nodes x input_dim
    std::vector<EdgeList> edge_sets;
};

GraphInput graph_input(const NoteGraph& graph, bool heterogeneous);

/// out_v = ReLU(W_self x_v + sum_t W_nbr_t mean_{(u,v) in E_t} x_u + b).
/// Isolated nodes aggregate a zero neighbor mean.
Matrix sage_layer(const Matrix& features, const std::vector<EdgeList>& edge_sets,
                  const SageLayerParams& params);

/// Stacked SAGE layers, global mean pooling, then a linear map into the
/// 64-dim embedding. A zero-node graph maps to the zero vector.
std::vector<double> encode_window(const GraphInput& graph, const Parameters& params,
                                  const ModelConfig& cfg);

/// Multi-head self-attention over the window embeddings, mean over the
/// attended outputs, linear projection to class logits. When
/// `attention_out` is given it receives the head-averaged M x M
/// attention matrix.
std::vector<double> classify_piece(const Matrix& window_embeddings,
                                   const Parameters& params,
                                   const ModelConfig& cfg,
                                   Matrix* attention_out = nullptr);

std::vector<double> softmax(const std::vector<double>& logits);

/// Cross-entropy loss of the full pipeline plus analytic gradients for
/// every parameter.
struct LossGrads {
    double loss = 0.0;
    Parameters grads;
};
LossGrads loss_and_gradients(const std::vector<GraphInput>& windows, int label,
                             const Parameters& params, const ModelConfig& cfg);

/// Central finite-difference check over a random parameter subsample.
/// `fault_entry >= 0` corrupts the largest-magnitude sampled analytic
/// entry by +10%, for harness self-tests.
struct GradCheckReport {
    double max_rel_err = 0.0;
    std::size_t entries_checked = 0;
    uint64_t seed = 0;
};
GradCheckReport grad_check(const std::vector<GraphInput>& windows, int label,
                           Parameters& params, const ModelConfig& cfg,
                           double eps = 1e-5, std::size_t sample = 200,
                           uint64_t seed = 0, long fault_entry = -1);

/// Pearson correlation of the flattened off-diagonal entries of two
/// equally shaped matrices. Throws ZeroVariance when either flattened
/// vector is constant.
double attention_adjacency_correlation(const Matrix& attn, const Matrix& adj);

}  // namespace symr::net

#endif
