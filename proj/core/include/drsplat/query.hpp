#pragma once

#include "drsplat/pq.hpp"
#include "drsplat/registration.hpp"

#include <vector>

namespace drsplat {

struct QuerySpec {
    Eigen::VectorXf embedding;                 // unit D-vector
    std::vector<Eigen::VectorXf> canonicals;   // unit D-vectors
    double threshold = 0.5;

    void validate(bool relevancy_mode) const;
};

using ScoreVector = std::vector<double>;

/// Cosine score of every registered Gaussian against the query. PQ-coded
/// features go through one LUT build plus adc_score per Gaussian; full
/// features use the exact cosine.
ScoreVector score_scene(const RegisteredScene& rs, const PQCodebook* cb,
                        const Eigen::VectorXf& q,
                        AdcNorm norm = AdcNorm::kSumOfSubNorms);

/// min_i exp(fq) / (exp(fq) + exp(f_canon_i)) over the canonical dots.
double relevancy_score(double query_dot, const std::vector<double>& canonical_dots);

/// Relevancy re-ranking of a whole scene: per-Gaussian pairwise softmax
/// against each canonical embedding, minimum taken.
ScoreVector relevancy_scores(const RegisteredScene& rs, const PQCodebook* cb,
                             const QuerySpec& spec,
                             AdcNorm norm = AdcNorm::kSumOfSubNorms);

/// Indices with score >= tau, ascending.
std::vector<int> select_threshold(const ScoreVector& scores, double tau);

/// Per-Gaussian argmax over label queries (ties to the lowest label).
std::vector<int> segment_argmax(const RegisteredScene& rs, const PQCodebook* cb,
                                const std::vector<Eigen::VectorXf>& label_queries,
                                AdcNorm norm = AdcNorm::kSumOfSubNorms);

}  // namespace drsplat
