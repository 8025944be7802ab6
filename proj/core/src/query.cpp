#include "drsplat/query.hpp"

#include <cmath>
#include <limits>

namespace drsplat {

void QuerySpec::validate(bool relevancy_mode) const {
    if (std::abs(embedding.norm() - 1.0f) > 1e-5f)
        throw std::invalid_argument("QuerySpec: embedding must be unit-norm");
    if (relevancy_mode && canonicals.empty())
        throw std::invalid_argument("QuerySpec: relevancy mode needs canonicals");
    for (const auto& c : canonicals)
        if (std::abs(c.norm() - 1.0f) > 1e-5f)
            throw std::invalid_argument("QuerySpec: canonicals must be unit-norm");
}

ScoreVector score_scene(const RegisteredScene& rs, const PQCodebook* cb,
                        const Eigen::VectorXf& q, AdcNorm norm) {
    ScoreVector scores(rs.size(), 0.0);
    if (rs.has_codes()) {
        if (!cb)
            throw std::invalid_argument("score_scene: PQ features need a codebook");
        const QueryLUT lut = build_query_lut(q, *cb);
        for (std::size_t i = 0; i < rs.size(); ++i)
            scores[i] = adc_score(rs.codes[i], lut, norm);
        return scores;
    }
    if (rs.features.cols() != q.size())
        throw std::invalid_argument("score_scene: dimension mismatch");
    for (std::size_t i = 0; i < rs.size(); ++i) {
        const Eigen::RowVectorXd f =
            rs.features.row(static_cast<Eigen::Index>(i)).cast<double>();
        const double fn = f.norm();
        scores[i] = fn > 0.0 ? f.dot(q.transpose().cast<double>()) / fn : 0.0;
    }
    return scores;
}

double relevancy_score(double query_dot, const std::vector<double>& canonical_dots) {
    double best = 1.0;
    const double eq = std::exp(query_dot);
    for (double cd : canonical_dots) {
        const double r = eq / (eq + std::exp(cd));
        if (r < best)
            best = r;
    }
    return best;
}

ScoreVector relevancy_scores(const RegisteredScene& rs, const PQCodebook* cb,
                             const QuerySpec& spec, AdcNorm norm) {
    spec.validate(true);
    const ScoreVector qdots = score_scene(rs, cb, spec.embedding, norm);
    std::vector<ScoreVector> cdots;
    cdots.reserve(spec.canonicals.size());
    for (const auto& c : spec.canonicals)
        cdots.push_back(score_scene(rs, cb, c, norm));

    ScoreVector out(rs.size());
    std::vector<double> per_gaussian(spec.canonicals.size());
    for (std::size_t i = 0; i < rs.size(); ++i) {
        for (std::size_t c = 0; c < cdots.size(); ++c)
            per_gaussian[c] = cdots[c][i];
        out[i] = relevancy_score(qdots[i], per_gaussian);
    }
    return out;
}

std::vector<int> select_threshold(const ScoreVector& scores, double tau) {
    std::vector<int> out;
    for (std::size_t i = 0; i < scores.size(); ++i)
        if (scores[i] >= tau)
            out.push_back(static_cast<int>(i));
    return out;
}

std::vector<int> segment_argmax(const RegisteredScene& rs, const PQCodebook* cb,
                                const std::vector<Eigen::VectorXf>& label_queries,
                                AdcNorm norm) {
    if (label_queries.empty())
        throw std::invalid_argument("segment_argmax: need at least one label query");
    std::vector<int> labels(rs.size(), 0);
    std::vector<double> best(rs.size(), -std::numeric_limits<double>::infinity());
    for (std::size_t l = 0; l < label_queries.size(); ++l) {
        const ScoreVector s = score_scene(rs, cb, label_queries[l], norm);
        for (std::size_t i = 0; i < rs.size(); ++i) {
            if (s[i] > best[i]) {
                best[i] = s[i];
                labels[i] = static_cast<int>(l);
            }
        }
    }
    return labels;
}

}  // namespace drsplat
