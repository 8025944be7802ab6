#include "drsplat/pq.hpp"

#include "drsplat/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace drsplat {

namespace {

double sq_dist(const Eigen::Ref<const Eigen::RowVectorXf>& a,
               const Eigen::Ref<const Eigen::RowVectorXf>& b) {
    return (a.cast<double>() - b.cast<double>()).squaredNorm();
}

// Nearest centroid by squared distance, ties resolved to the lowest index.
uint32_t nearest_centroid(const Eigen::Ref<const Eigen::RowVectorXf>& v,
                          const MatrixRMf& centroids, double* dist_out = nullptr) {
    uint32_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < centroids.rows(); ++j) {
        const double d = sq_dist(v, centroids.row(j));
        if (d < best_d) {
            best_d = d;
            best = static_cast<uint32_t>(j);
        }
    }
    if (dist_out)
        *dist_out = best_d;
    return best;
}

MatrixRMf kmeanspp_init(const MatrixRMf& data, uint32_t k, std::mt19937_64& rng) {
    const Eigen::Index n = data.rows();
    MatrixRMf centroids(k, data.cols());
    std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
    centroids.row(0) = data.row(pick(rng));

    std::vector<double> d2(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i)
        d2[static_cast<std::size_t>(i)] = sq_dist(data.row(i), centroids.row(0));

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (uint32_t c = 1; c < k; ++c) {
        const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
        Eigen::Index chosen;
        if (total <= 0.0) {
            chosen = pick(rng);
        } else {
            double target = unit(rng) * total;
            chosen = n - 1;
            for (Eigen::Index i = 0; i < n; ++i) {
                target -= d2[static_cast<std::size_t>(i)];
                if (target <= 0.0) {
                    chosen = i;
                    break;
                }
            }
        }
        centroids.row(c) = data.row(chosen);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double d = sq_dist(data.row(i), centroids.row(c));
            auto& cur = d2[static_cast<std::size_t>(i)];
            if (d < cur)
                cur = d;
        }
    }
    return centroids;
}

}  // namespace

KMeansResult kmeans(const MatrixRMf& data, uint32_t k, uint64_t seed,
                    int max_iterations, double tol) {
    const Eigen::Index n = data.rows();
    const Eigen::Index d = data.cols();
    if (n < static_cast<Eigen::Index>(k))
        throw std::invalid_argument("kmeans: fewer points than clusters");

    std::mt19937_64 rng(seed);
    KMeansResult res;
    res.centroids = kmeanspp_init(data, k, rng);

    std::vector<uint32_t> assign(static_cast<std::size_t>(n), 0);
    std::vector<double> dist(static_cast<std::size_t>(n), 0.0);
    double prev_inertia = std::numeric_limits<double>::infinity();

    for (int it = 0; it < max_iterations; ++it) {
        double inertia = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            assign[static_cast<std::size_t>(i)] =
                nearest_centroid(data.row(i), res.centroids, &dist[static_cast<std::size_t>(i)]);
            inertia += dist[static_cast<std::size_t>(i)];
        }

        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, d);
        std::vector<std::size_t> counts(k, 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            const uint32_t c = assign[static_cast<std::size_t>(i)];
            sums.row(c) += data.row(i).cast<double>();
            ++counts[c];
        }
        for (uint32_t c = 0; c < k; ++c) {
            if (counts[c] > 0) {
                res.centroids.row(c) =
                    (sums.row(c) / static_cast<double>(counts[c])).cast<float>();
                continue;
            }
            // reseed empty cluster from the farthest point
            Eigen::Index far = 0;
            double far_d = -1.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (dist[static_cast<std::size_t>(i)] > far_d) {
                    far_d = dist[static_cast<std::size_t>(i)];
                    far = i;
                }
            }
            res.centroids.row(c) = data.row(far);
            dist[static_cast<std::size_t>(far)] = 0.0;
        }

        res.iterations = it + 1;
        res.inertia = inertia;
        if (prev_inertia < std::numeric_limits<double>::infinity() &&
            std::abs(prev_inertia - inertia) <= tol * prev_inertia)
            break;
        prev_inertia = inertia;
    }

    // final inertia against the updated centroids
    double inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double dd;
        nearest_centroid(data.row(i), res.centroids, &dd);
        inertia += dd;
    }
    res.inertia = inertia;
    return res;
}

PQCodebook train_codebook(const MatrixRMf& database, uint32_t subvectors,
                          uint32_t centroids, uint64_t seed, int threads) {
    const uint32_t dim = static_cast<uint32_t>(database.cols());
    if (subvectors == 0 || dim % subvectors != 0)
        throw std::invalid_argument("train_codebook: D must be divisible by L");
    if (centroids == 0 || centroids > 256)
        throw std::invalid_argument("train_codebook: K must be in [1,256]");
    if (database.rows() < static_cast<Eigen::Index>(centroids))
        throw std::invalid_argument("train_codebook: need at least K training vectors");

    PQCodebook cb;
    cb.dim = dim;
    cb.subvectors = subvectors;
    cb.centroids = centroids;
    cb.seed = seed;
    cb.codewords.resize(subvectors);

    const uint32_t sd = dim / subvectors;
    parallel_for(0, subvectors, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t l = lo; l < hi; ++l) {
            const MatrixRMf sub = database.middleCols(static_cast<Eigen::Index>(l * sd), sd);
            // per-sub-space seed keeps training independent of parallelism
            cb.codewords[l] = kmeans(sub, centroids, seed + l).centroids;
        }
    }, threads);
    return cb;
}

PQCode encode(const Eigen::VectorXf& v, const PQCodebook& cb) {
    if (v.size() != static_cast<Eigen::Index>(cb.dim))
        throw std::invalid_argument("encode: dimension mismatch");
    const uint32_t sd = cb.sub_dim();
    PQCode code(cb.subvectors);
    for (uint32_t l = 0; l < cb.subvectors; ++l) {
        const Eigen::RowVectorXf sub = v.segment(l * sd, sd).transpose();
        code[l] = static_cast<uint8_t>(nearest_centroid(sub, cb.block(l)));
    }
    return code;
}

Eigen::VectorXf decode(const PQCode& code, const PQCodebook& cb) {
    if (code.size() != cb.subvectors)
        throw std::invalid_argument("decode: code length mismatch");
    const uint32_t sd = cb.sub_dim();
    Eigen::VectorXf out(cb.dim);
    for (uint32_t l = 0; l < cb.subvectors; ++l) {
        if (code[l] >= cb.centroids)
            throw std::out_of_range("decode: corrupt code index");
        out.segment(l * sd, sd) = cb.block(l).row(code[l]).transpose();
    }
    return out;
}

QueryLUT build_query_lut(const Eigen::VectorXf& q, const PQCodebook& cb) {
    if (q.size() != static_cast<Eigen::Index>(cb.dim))
        throw std::invalid_argument("build_query_lut: dimension mismatch");
    const uint32_t sd = cb.sub_dim();
    QueryLUT lut;
    lut.table = MatrixRMf(cb.subvectors, cb.centroids);
    lut.norm_table = MatrixRMf(cb.subvectors, cb.centroids);
    for (uint32_t l = 0; l < cb.subvectors; ++l) {
        const Eigen::RowVectorXd ql = q.segment(l * sd, sd).transpose().cast<double>();
        for (uint32_t j = 0; j < cb.centroids; ++j) {
            const Eigen::RowVectorXd c = cb.block(l).row(j).cast<double>();
            lut.table(l, j) = static_cast<float>(ql.dot(c));
            lut.norm_table(l, j) = static_cast<float>(c.norm());
        }
    }
    return lut;
}

double adc_score(const PQCode& code, const QueryLUT& lut, AdcNorm norm) {
    if (static_cast<Eigen::Index>(code.size()) != lut.table.rows())
        throw std::invalid_argument("adc_score: code length mismatch");
    double raw = 0.0, denom = 0.0;
    for (std::size_t l = 0; l < code.size(); ++l) {
        const Eigen::Index li = static_cast<Eigen::Index>(l);
        raw += lut.table(li, code[l]);
        const double n = lut.norm_table(li, code[l]);
        denom += norm == AdcNorm::kSumOfSubNorms ? n : n * n;
    }
    if (norm == AdcNorm::kEuclidean)
        denom = std::sqrt(denom);
    if (denom == 0.0)
        throw std::runtime_error("adc_score: degenerate code (zero norm)");
    return raw / denom;
}

std::vector<MatrixRMf> build_symmetric_lut(const PQCodebook& cb) {
    std::vector<MatrixRMf> lut(cb.subvectors);
    for (uint32_t l = 0; l < cb.subvectors; ++l) {
        MatrixRMf& t = lut[l];
        t = MatrixRMf(cb.centroids, cb.centroids);
        for (uint32_t i = 0; i < cb.centroids; ++i)
            for (uint32_t j = 0; j < cb.centroids; ++j)
                t(i, j) = static_cast<float>(sq_dist(cb.block(l).row(i), cb.block(l).row(j)));
    }
    return lut;
}

double symmetric_distance(const PQCode& a, const PQCode& b,
                          const std::vector<MatrixRMf>& lut) {
    if (a.size() != b.size() || a.size() != lut.size())
        throw std::invalid_argument("symmetric_distance: length mismatch");
    double d = 0.0;
    for (std::size_t l = 0; l < a.size(); ++l)
        d += lut[l](a[l], b[l]);
    return d;
}

}  // namespace drsplat
