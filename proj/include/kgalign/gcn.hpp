#pragma once
// Structural embeddings: a 2-layer graph convolutional encoder with
// weights shared between the two KGs, trained on seed pairs with a
// margin-based ranking loss over L1 distances. Exact analytic gradients
// are computed for W1, W2 and the input features of both graphs; training
// is one full-batch SGD step per epoch with negatives resampled each
// epoch. Everything is single-threaded with a fixed summation order, so a
// run is reproducible bit-for-bit from its seed.

#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "kg.hpp"
#include "matrix.hpp"
#include "rng.hpp"

namespace kgalign {

struct GcnParameters {
    Matrix w1; // d_s x d_s
    Matrix w2; // d_s x d_s
};

struct TrainingConfig {
    std::size_t dim = 300;
    double margin = 3.0;
    std::size_t epochs = 300;
    std::size_t negatives_per_positive = 5;
    double learning_rate = 1.0;
    std::uint64_t rng_seed = 42;
    bool train_features = true; // freeze X and learn only W1/W2 when false
};

using IndexPair = std::pair<std::int32_t, std::int32_t>;

namespace detail {

inline Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw DataError("matmul dimension mismatch");
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* arow = a.row(i);
        double* orow = out.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            double av = arow[k];
            if (av == 0.0) continue;
            const double* brow = b.row(k);
            for (std::size_t j = 0; j < b.cols(); ++j) orow[j] += av * brow[j];
        }
    }
    return out;
}

// A^T * B without materializing the transpose.
inline Matrix matmul_at_b(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) throw DataError("matmul dimension mismatch");
    Matrix out(a.cols(), b.cols());
    for (std::size_t k = 0; k < a.rows(); ++k) {
        const double* arow = a.row(k);
        const double* brow = b.row(k);
        for (std::size_t i = 0; i < a.cols(); ++i) {
            double av = arow[i];
            if (av == 0.0) continue;
            double* orow = out.row(i);
            for (std::size_t j = 0; j < b.cols(); ++j) orow[j] += av * brow[j];
        }
    }
    return out;
}

// A * B^T.
inline Matrix matmul_a_bt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) throw DataError("matmul dimension mismatch");
    Matrix out(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* arow = a.row(i);
        double* orow = out.row(i);
        for (std::size_t j = 0; j < b.rows(); ++j) {
            const double* brow = b.row(j);
            double s = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) s += arow[k] * brow[k];
            orow[j] = s;
        }
    }
    return out;
}

} // namespace detail

// Y = A_hat * X; entries are visited in (row, col) order.
inline Matrix adjacency_apply(const NormalizedAdjacency& adj, const Matrix& x) {
    if (adj.dimension != x.rows())
        throw DataError("adjacency dimension does not match feature rows");
    Matrix out(x.rows(), x.cols());
    for (const auto& e : adj.entries) {
        const double* src = x.row(e.col);
        double* dst = out.row(e.row);
        for (std::size_t j = 0; j < x.cols(); ++j) dst[j] += e.weight * src[j];
    }
    return out;
}

// Truncated-normal init, each row scaled to unit L2 norm.
inline Matrix init_features(std::size_t n, std::size_t dim, std::uint64_t rng_seed) {
    if (n < 1 || dim < 1) throw ConfigError("init_features requires n >= 1 and dim >= 1");
    Rng rng(rng_seed);
    Matrix x(n, dim);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < dim; ++j) x(i, j) = rng.truncated_normal();
    for (std::size_t i = 0; i < n; ++i) {
        double norm = 0.0;
        for (std::size_t j = 0; j < dim; ++j) norm += x(i, j) * x(i, j);
        norm = std::sqrt(norm);
        if (norm == 0.0) throw DataError("degenerate all-zero feature row");
        for (std::size_t j = 0; j < dim; ++j) x(i, j) /= norm;
    }
    return x;
}

struct GcnForwardCache {
    Matrix p1; // A_hat * X
    Matrix q1; // P1 * W1
    Matrix h1; // relu(Q1)
    Matrix p2; // A_hat * H1
    Matrix z;  // P2 * W2
};

inline GcnForwardCache gcn_forward_cached(const NormalizedAdjacency& adj,
                                          const Matrix& x,
                                          const GcnParameters& params) {
    if (params.w1.rows() != params.w1.cols() || params.w2.rows() != params.w2.cols() ||
        params.w1.rows() != params.w2.rows())
        throw DataError("GCN weight matrices must be square with equal dims");
    if (x.cols() != params.w1.rows())
        throw DataError("feature dim does not match GCN weight dim");
    GcnForwardCache c;
    c.p1 = adjacency_apply(adj, x);
    c.q1 = detail::matmul(c.p1, params.w1);
    c.h1 = c.q1;
    for (double& v : c.h1.data())
        if (v < 0.0) v = 0.0;
    c.p2 = adjacency_apply(adj, c.h1);
    c.z = detail::matmul(c.p2, params.w2);
    return c;
}

// Z = A_hat * relu(A_hat * X * W1) * W2
inline Matrix gcn_forward(const NormalizedAdjacency& adj, const Matrix& x,
                          const GcnParameters& params) {
    return gcn_forward_cached(adj, x, params).z;
}

// Corrupt one side of (u, v) with a uniformly sampled entity, redrawing
// while the corruption reproduces the positive pair. Requires at least 2
// entities in each KG, otherwise a chosen side would admit no corruption.
inline std::vector<IndexPair> sample_negatives(IndexPair pair, std::size_t kg1_size,
                                               std::size_t kg2_size, std::size_t count,
                                               Rng& rng) {
    if (count < 1) throw ConfigError("negative count must be >= 1");
    if (kg1_size < 2 || kg2_size < 2)
        throw DataError("cannot corrupt a pair against a KG with a single entity");
    std::vector<IndexPair> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        bool corrupt_source = rng.uniform_int(2) == 0;
        if (corrupt_source) {
            std::int32_t u;
            do {
                u = static_cast<std::int32_t>(rng.uniform_int(kg1_size));
            } while (u == pair.first);
            out.emplace_back(u, pair.second);
        } else {
            std::int32_t v;
            do {
                v = static_cast<std::int32_t>(rng.uniform_int(kg2_size));
            } while (v == pair.second);
            out.emplace_back(pair.first, v);
        }
    }
    return out;
}

namespace detail {

inline double l1_distance(const double* a, const double* b, std::size_t dim) {
    double s = 0.0;
    for (std::size_t j = 0; j < dim; ++j) s += std::abs(a[j] - b[j]);
    return s;
}

} // namespace detail

// L = sum over positives, sum over their negatives of
//     max(0, ||z_u - z_v||_1 - ||z_u' - z_v'||_1 + margin).
inline double margin_loss(const Matrix& z1, const Matrix& z2,
                          const std::vector<IndexPair>& positives,
                          const std::vector<std::vector<IndexPair>>& negatives,
                          double margin) {
    if (negatives.size() != positives.size())
        throw DataError("one negative list per positive pair is required");
    const std::size_t dim = z1.cols();
    double loss = 0.0;
    for (std::size_t p = 0; p < positives.size(); ++p) {
        auto [u, v] = positives[p];
        double pos_dist = detail::l1_distance(z1.row(u), z2.row(v), dim);
        for (auto [nu, nv] : negatives[p]) {
            double neg_dist = detail::l1_distance(z1.row(nu), z2.row(nv), dim);
            double hinge = pos_dist - neg_dist + margin;
            if (hinge > 0.0) loss += hinge;
        }
    }
    return loss;
}

struct LossGrad {
    double loss = 0.0;
    Matrix d_z1;
    Matrix d_z2;
};

// Gradient of the ranking loss with respect to the output embeddings.
// Subgradient 0 is used at L1 kinks and inactive hinges contribute
// nothing; summation order is positives then negatives.
inline LossGrad margin_loss_grad(const Matrix& z1, const Matrix& z2,
                                 const std::vector<IndexPair>& positives,
                                 const std::vector<std::vector<IndexPair>>& negatives,
                                 double margin) {
    if (negatives.size() != positives.size())
        throw DataError("one negative list per positive pair is required");
    const std::size_t dim = z1.cols();
    LossGrad g;
    g.d_z1 = Matrix(z1.rows(), dim);
    g.d_z2 = Matrix(z2.rows(), dim);
    auto sign = [](double d) { return d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0); };

    for (std::size_t p = 0; p < positives.size(); ++p) {
        auto [u, v] = positives[p];
        double pos_dist = detail::l1_distance(z1.row(u), z2.row(v), dim);
        for (auto [nu, nv] : negatives[p]) {
            double neg_dist = detail::l1_distance(z1.row(nu), z2.row(nv), dim);
            double hinge = pos_dist - neg_dist + margin;
            if (hinge <= 0.0) continue;
            g.loss += hinge;
            for (std::size_t j = 0; j < dim; ++j) {
                double s_pos = sign(z1(u, j) - z2(v, j));
                g.d_z1(u, j) += s_pos;
                g.d_z2(v, j) -= s_pos;
                double s_neg = sign(z1(nu, j) - z2(nv, j));
                g.d_z1(nu, j) -= s_neg;
                g.d_z2(nv, j) += s_neg;
            }
        }
    }
    return g;
}

struct GcnGradients {
    double loss = 0.0;
    Matrix d_w1;
    Matrix d_w2;
    Matrix d_x1;
    Matrix d_x2;
};

namespace detail {

// Backprop of dZ through one GCN; accumulates into the shared weight
// gradients and returns dX.
inline Matrix gcn_backward(const NormalizedAdjacency& adj, const GcnForwardCache& c,
                           const GcnParameters& params, const Matrix& d_z,
                           Matrix& d_w1, Matrix& d_w2) {
    Matrix d_w2_part = matmul_at_b(c.p2, d_z);
    for (std::size_t i = 0; i < d_w2.data().size(); ++i)
        d_w2.data()[i] += d_w2_part.data()[i];

    Matrix d_p2 = matmul_a_bt(d_z, params.w2);
    Matrix d_h1 = adjacency_apply(adj, d_p2); // A_hat is symmetric
    for (std::size_t i = 0; i < d_h1.data().size(); ++i)
        if (c.q1.data()[i] <= 0.0) d_h1.data()[i] = 0.0;

    Matrix d_w1_part = matmul_at_b(c.p1, d_h1);
    for (std::size_t i = 0; i < d_w1.data().size(); ++i)
        d_w1.data()[i] += d_w1_part.data()[i];

    Matrix d_p1 = matmul_a_bt(d_h1, params.w1);
    return adjacency_apply(adj, d_p1);
}

} // namespace detail

// Loss of Eq-style ranking objective and its exact gradient with respect
// to W1, W2 (shared by both graphs) and both feature matrices.
inline GcnGradients gcn_loss_gradients(const NormalizedAdjacency& adj1,
                                       const NormalizedAdjacency& adj2,
                                       const Matrix& x1, const Matrix& x2,
                                       const GcnParameters& params,
                                       const std::vector<IndexPair>& positives,
                                       const std::vector<std::vector<IndexPair>>& negatives,
                                       double margin) {
    GcnForwardCache c1 = gcn_forward_cached(adj1, x1, params);
    GcnForwardCache c2 = gcn_forward_cached(adj2, x2, params);
    LossGrad lg = margin_loss_grad(c1.z, c2.z, positives, negatives, margin);

    GcnGradients g;
    g.loss = lg.loss;
    const std::size_t dim = params.w1.rows();
    g.d_w1 = Matrix(dim, dim);
    g.d_w2 = Matrix(dim, dim);
    g.d_x1 = detail::gcn_backward(adj1, c1, params, lg.d_z1, g.d_w1, g.d_w2);
    g.d_x2 = detail::gcn_backward(adj2, c2, params, lg.d_z2, g.d_w1, g.d_w2);
    return g;
}

struct TrainResult {
    Matrix z1;
    Matrix z2;
    std::vector<double> epoch_loss; // mean ranking loss per positive pair
};

namespace detail {

inline std::vector<IndexPair> seeds_to_indices(const KnowledgeGraph& kg1,
                                               const KnowledgeGraph& kg2,
                                               const AlignmentSet& seeds) {
    std::unordered_map<std::string, std::int32_t> idx1, idx2;
    for (std::size_t i = 0; i < kg1.entities.size(); ++i)
        idx1.emplace(kg1.entities[i], static_cast<std::int32_t>(i));
    for (std::size_t i = 0; i < kg2.entities.size(); ++i)
        idx2.emplace(kg2.entities[i], static_cast<std::int32_t>(i));
    std::vector<IndexPair> out;
    out.reserve(seeds.size());
    for (const auto& [src, tgt] : seeds.pairs) {
        auto it1 = idx1.find(src);
        auto it2 = idx2.find(tgt);
        if (it1 == idx1.end()) throw DataError("seed entity not in source KG: " + src);
        if (it2 == idx2.end()) throw DataError("seed entity not in target KG: " + tgt);
        out.emplace_back(it1->second, it2->second);
    }
    return out;
}

inline Matrix init_weight(std::size_t dim, std::uint64_t rng_seed) {
    Rng rng(rng_seed);
    Matrix w(dim, dim);
    double scale = 1.0 / std::sqrt(static_cast<double>(dim));
    for (double& v : w.data()) v = rng.truncated_normal() * scale;
    return w;
}

} // namespace detail

// Full-batch SGD on the ranking loss; gradients averaged over positive
// pairs, negatives resampled every epoch.
inline TrainResult train(const KnowledgeGraph& kg1, const KnowledgeGraph& kg2,
                         const AlignmentSet& seeds, const TrainingConfig& config) {
    if (config.dim < 1) throw ConfigError("embedding dim must be >= 1");
    if (config.negatives_per_positive < 1)
        throw ConfigError("negatives_per_positive must be >= 1");
    if (!(config.learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
    if (!(config.margin >= 0.0)) throw ConfigError("margin must be nonnegative");
    if (seeds.empty()) throw DataError("training requires a nonempty seed alignment");

    std::vector<IndexPair> positives = detail::seeds_to_indices(kg1, kg2, seeds);

    NormalizedAdjacency adj1 = build_normalized_adjacency(kg1);
    NormalizedAdjacency adj2 = build_normalized_adjacency(kg2);

    Matrix x1 = init_features(kg1.num_entities(), config.dim,
                              derive_seed(config.rng_seed, 1));
    Matrix x2 = init_features(kg2.num_entities(), config.dim,
                              derive_seed(config.rng_seed, 2));
    GcnParameters params{detail::init_weight(config.dim, derive_seed(config.rng_seed, 3)),
                         detail::init_weight(config.dim, derive_seed(config.rng_seed, 4))};
    Rng neg_rng(derive_seed(config.rng_seed, 5));

    TrainResult result;
    result.epoch_loss.reserve(config.epochs);
    const double step = config.learning_rate / static_cast<double>(positives.size());

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::vector<std::vector<IndexPair>> negatives;
        negatives.reserve(positives.size());
        for (const IndexPair& pos : positives)
            negatives.push_back(sample_negatives(pos, kg1.num_entities(),
                                                 kg2.num_entities(),
                                                 config.negatives_per_positive, neg_rng));

        GcnGradients g = gcn_loss_gradients(adj1, adj2, x1, x2, params, positives,
                                            negatives, config.margin);
        result.epoch_loss.push_back(g.loss / static_cast<double>(positives.size()));

        for (std::size_t i = 0; i < params.w1.data().size(); ++i)
            params.w1.data()[i] -= step * g.d_w1.data()[i];
        for (std::size_t i = 0; i < params.w2.data().size(); ++i)
            params.w2.data()[i] -= step * g.d_w2.data()[i];
        if (config.train_features) {
            for (std::size_t i = 0; i < x1.data().size(); ++i)
                x1.data()[i] -= step * g.d_x1.data()[i];
            for (std::size_t i = 0; i < x2.data().size(); ++i)
                x2.data()[i] -= step * g.d_x2.data()[i];
        }
    }

    result.z1 = gcn_forward(adj1, x1, params);
    result.z2 = gcn_forward(adj2, x2, params);
    return result;
}

// Rows of a matrix selected by index, e.g. the test-split entities.
inline Matrix select_rows(const Matrix& m, const std::vector<std::int32_t>& rows) {
    Matrix out(rows.size(), m.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double* src = m.row(static_cast<std::size_t>(rows[i]));
        double* dst = out.row(i);
        for (std::size_t j = 0; j < m.cols(); ++j) dst[j] = src[j];
    }
    return out;
}

// M[i][j] = <a_i, b_j> / (||a_i|| ||b_j||), clamped to [-1, 1].
inline Matrix cosine_similarity_matrix(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols())
        throw DataError("cosine similarity requires equal embedding dims");
    auto norms = [](const Matrix& m, const char* side) {
        std::vector<double> out(m.rows());
        for (std::size_t i = 0; i < m.rows(); ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < m.cols(); ++j) s += m(i, j) * m(i, j);
            if (s == 0.0)
                throw DataError(std::string("zero row ") + std::to_string(i) + " in " +
                                side + " embeddings");
            out[i] = std::sqrt(s);
        }
        return out;
    };
    std::vector<double> na = norms(a, "source");
    std::vector<double> nb = norms(b, "target");

    Matrix m(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* arow = a.row(i);
        for (std::size_t j = 0; j < b.rows(); ++j) {
            const double* brow = b.row(j);
            double dot = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) dot += arow[k] * brow[k];
            double cos = dot / (na[i] * nb[j]);
            m(i, j) = cos > 1.0 ? 1.0 : (cos < -1.0 ? -1.0 : cos);
        }
    }
    return m;
}

} // namespace kgalign
