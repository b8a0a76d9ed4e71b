#pragma once

#include <span>
#include <utility>
#include <vector>

#include "plkt/context.hpp"
#include "plkt/mlp.hpp"
#include "plkt/tensor.hpp"

namespace plkt {

// A d-dimensional array of independent Beta distributions; both shape
// parameter vectors stay strictly positive (softplus + epsilon upstream).
struct BetaEmbedding {
    Tensor alpha;
    Tensor beta;

    int dim() const { return static_cast<int>(alpha.size()); }
};

enum class EmbedKind { question, concept };

// All learnable state feeding interaction construction: response-offset
// embedding tables (raw, pre-positivity), difficulty modulators, and the two
// conjunction MLP blocks.
struct EmbeddingTables {
    Tensor question_table; // [2|Q|, 2d]
    Tensor concept_table;  // [2|C|, 2d]
    Tensor w_alpha;        // [d]
    Tensor w_beta;         // [d]
    MlpParams interaction_mlp; // 2d -> 2d -> d
    MlpParams pattern_mlp;     // 2d -> 2d -> d
    double epsilon = 1e-4;
    int dim = 0;
    int num_questions = 0;
    int num_concepts = 0;
};

EmbeddingTables make_embedding_tables(int dim, int num_questions, int num_concepts,
                                      double epsilon, Rng& rng);

// Row lookup at response_offset_index(id, r); returns the raw
// (alpha_raw, beta_raw) halves with no positivity applied.
std::pair<Tensor, Tensor> embed(const EmbeddingTables& tables, EmbedKind kind, int id, int r);

// alpha = softplus(alpha_raw + W_alpha * d_q) + eps, same for beta.
BetaEmbedding modulate_difficulty(const EmbeddingTables& tables, const Tensor& alpha_raw,
                                  const Tensor& beta_raw, double d_q);

// Positivity without the difficulty term (concept-level embeddings).
BetaEmbedding apply_positivity(const EmbeddingTables& tables, const Tensor& alpha_raw,
                               const Tensor& beta_raw);

// Probabilistic conjunction: per-dimension attention weights from softmax
// over items of MLP([alpha_i; beta_i]), then weighted sums of both shape
// parameter stacks. Weights sum to 1 per dimension.
BetaEmbedding conjunction(std::span<const BetaEmbedding> items, const MlpParams& mlp,
                          const ForwardCtx& ctx);

// Variant with the per-item MLP outputs already computed (the logits depend
// only on the item, so they can be shared across overlapping windows).
BetaEmbedding conjunction_with_logits(std::span<const BetaEmbedding> items,
                                      std::span<const Tensor> logits);

// Sum over dimensions of KL(Beta(p_j) || Beta(q_j)), closed form.
Tensor beta_kl(const BetaEmbedding& p, const BetaEmbedding& q);

// Componentwise alpha / (alpha + beta).
Tensor expectation(const BetaEmbedding& p);

// Question embedding with difficulty modulation, concept embedding with bare
// positivity, conjoined (concept first) through the interaction MLP.
BetaEmbedding build_interaction(const EmbeddingTables& tables, int question_id,
                                int concept_id, int response, double d_q,
                                const ForwardCtx& ctx);

// The two outcome-conditioned target states for the next question.
std::pair<BetaEmbedding, BetaEmbedding> build_targets(const EmbeddingTables& tables,
                                                      int question_id, int concept_id,
                                                      double d_q, const ForwardCtx& ctx);

} // namespace plkt
