#include "drsplat/pq.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

using namespace drsplat;

namespace {

MatrixRMf random_rows(int n, int d, unsigned seed, float spread = 1.f) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<float> nd(0.f, spread);
    MatrixRMf m(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j)
            m(i, j) = nd(rng);
    return m;
}

double brute_inertia(const MatrixRMf& data, const MatrixRMf& centroids) {
    double total = 0.0;
    for (int i = 0; i < data.rows(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (int c = 0; c < centroids.rows(); ++c)
            best = std::min(best, (data.row(i) - centroids.row(c)).squaredNorm() * 1.0);
        total += best;
    }
    return total;
}

bool same_matrix(const MatrixRMf& a, const MatrixRMf& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        return false;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            if (a(i, j) != b(i, j))
                return false;
    return true;
}

}  // namespace

TEST_SUITE_BEGIN("pq");

TEST_CASE("k distinct points are their own optimum with zero inertia") {
    MatrixRMf data(4, 3);
    data << 0, 0, 0, 10, 0, 0, 0, 10, 0, 0, 0, 10;
    const auto res = kmeans(data, 4, 123);
    CHECK(res.inertia == doctest::Approx(0.0));
    // every input point must appear among the centroids
    for (int i = 0; i < data.rows(); ++i) {
        bool found = false;
        for (int c = 0; c < res.centroids.rows(); ++c)
            found = found || (data.row(i) - res.centroids.row(c)).norm() < 1e-6;
        CHECK(found);
    }
}

TEST_CASE("kmeans never exceeds the brute-force assignment inertia") {
    for (unsigned seed : {1u, 2u, 3u}) {
        const auto data = random_rows(200, 6, seed);
        const auto res = kmeans(data, 8, seed);
        CHECK(res.inertia == doctest::Approx(brute_inertia(data, res.centroids)).epsilon(1e-6));
        CHECK(res.iterations >= 1);
        CHECK(res.iterations <= 25);
    }
}

TEST_CASE("training is deterministic and parallelism does not change it") {
    const auto data = random_rows(300, 16, 77);
    const auto a = train_codebook(data, 4, 8, 42, 1);
    const auto b = train_codebook(data, 4, 8, 42, 1);
    const auto c = train_codebook(data, 4, 8, 42, 4);
    REQUIRE(a.codewords.size() == 4);
    for (uint32_t l = 0; l < 4; ++l) {
        CHECK(same_matrix(a.block(l), b.block(l)));
        CHECK(same_matrix(a.block(l), c.block(l)));
    }
    CHECK(a.dim == 16);
    CHECK(a.sub_dim() == 4);
    CHECK(a.seed == 42);
}

TEST_CASE("single sub-space training equals plain kmeans on slices") {
    const auto data = random_rows(150, 8, 51);
    const auto cb = train_codebook(data, 2, 6, 9, 1);
    for (uint32_t l = 0; l < 2; ++l) {
        const MatrixRMf slice = data.middleCols(l * 4, 4);
        const auto km = kmeans(slice, 6, 9 + l);
        CHECK(same_matrix(cb.block(l), km.centroids));
    }
}

TEST_CASE("encode picks the nearest centroid, ties to the lowest index") {
    PQCodebook cb;
    cb.dim = 2;
    cb.subvectors = 1;
    cb.centroids = 3;
    MatrixRMf block(3, 2);
    block << -1, 0, 1, 0, 1, 0;  // rows 1 and 2 coincide
    cb.codewords.push_back(block);

    Eigen::VectorXf v(2);
    v << 0.9f, 0.f;
    const auto code = encode(v, cb);
    REQUIRE(code.size() == 1);
    CHECK(code[0] == 1);

    v << 0.f, 5.f;  // equidistant from all three in x, ties resolve low
    CHECK(encode(v, cb)[0] == 0);
}

TEST_CASE("decode concatenates the selected codewords") {
    PQCodebook cb;
    cb.dim = 4;
    cb.subvectors = 2;
    cb.centroids = 2;
    MatrixRMf b0(2, 2), b1(2, 2);
    b0 << 1, 2, 3, 4;
    b1 << 5, 6, 7, 8;
    cb.codewords = {b0, b1};

    const Eigen::VectorXf v = decode({1, 0}, cb);
    REQUIRE(v.size() == 4);
    CHECK(v(0) == 3.f);
    CHECK(v(1) == 4.f);
    CHECK(v(2) == 5.f);
    CHECK(v(3) == 6.f);

    CHECK_THROWS_AS(decode({2, 0}, cb), std::out_of_range);
}

TEST_CASE("encode then decode is stable on codebook centroids") {
    const auto data = random_rows(120, 12, 13);
    const auto cb = train_codebook(data, 3, 5, 3, 1);
    // a vector built from centroids must round-trip to itself
    const PQCode code{4, 0, 2};
    const Eigen::VectorXf v = decode(code, cb);
    const auto again = encode(v, cb);
    const Eigen::VectorXf v2 = decode(again, cb);
    CHECK((v - v2).norm() == doctest::Approx(0.0));
}

TEST_CASE("query LUT entries match direct centroid dot products and norms") {
    const auto data = random_rows(100, 8, 31);
    const auto cb = train_codebook(data, 2, 4, 8, 1);
    Eigen::VectorXf q = random_rows(1, 8, 99).row(0).transpose();
    q.normalize();
    const auto lut = build_query_lut(q, cb);
    REQUIRE(lut.table.rows() == 2);
    REQUIRE(lut.table.cols() == 4);
    for (uint32_t l = 0; l < 2; ++l) {
        for (uint32_t j = 0; j < 4; ++j) {
            const Eigen::VectorXf c = cb.block(l).row(j).transpose();
            const Eigen::VectorXf ql = q.segment(l * 4, 4);
            CHECK(std::abs(lut.table(l, j) - ql.dot(c)) < 1e-6);
            CHECK(std::abs(lut.norm_table(l, j) - c.norm()) < 1e-6);
        }
    }
}

TEST_CASE("adc in euclidean mode equals cosine against the decoded vector") {
    const auto data = random_rows(200, 16, 61);
    const auto cb = train_codebook(data, 4, 8, 21, 1);
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> pick(0, 7);
    Eigen::VectorXf q = random_rows(1, 16, 71).row(0).transpose();
    q.normalize();
    const auto lut = build_query_lut(q, cb);
    for (int t = 0; t < 200; ++t) {
        PQCode code(4);
        for (auto& c : code)
            c = static_cast<uint8_t>(pick(rng));
        const Eigen::VectorXf v = decode(code, cb);
        const double expect = q.dot(v) / v.norm();
        CHECK(std::abs(adc_score(code, lut, AdcNorm::kEuclidean) - expect) < 1e-5);
    }
}

TEST_CASE("sum-of-sub-norms adc matches its hand evaluation") {
    PQCodebook cb;
    cb.dim = 4;
    cb.subvectors = 2;
    cb.centroids = 2;
    MatrixRMf b0(2, 2), b1(2, 2);
    b0 << 3, 0, 0, 1;
    b1 << 0, 4, 2, 0;
    cb.codewords = {b0, b1};
    Eigen::VectorXf q(4);
    q << 1, 0, 0, 1;
    const auto lut = build_query_lut(q, cb);
    // code {0, 0}: raw = 3 + 4, denom = 3 + 4
    CHECK(adc_score({0, 0}, lut) == doctest::Approx(1.0));
    // code {1, 1}: raw = 0 + 0, denom = 1 + 2
    CHECK(adc_score({1, 1}, lut) == doctest::Approx(0.0));
    // code {0, 1}: raw = 3 + 0, denom = 3 + 2
    CHECK(adc_score({0, 1}, lut) == doctest::Approx(0.6));
}

TEST_CASE("zero denominator is rejected") {
    PQCodebook cb;
    cb.dim = 2;
    cb.subvectors = 1;
    cb.centroids = 1;
    cb.codewords.push_back(MatrixRMf::Zero(1, 2));
    Eigen::VectorXf q(2);
    q << 1, 0;
    const auto lut = build_query_lut(q, cb);
    CHECK_THROWS_AS(adc_score({0}, lut), std::runtime_error);
}

TEST_CASE("symmetric tables hold exact centroid pair distances") {
    const auto data = random_rows(90, 8, 41);
    const auto cb = train_codebook(data, 2, 4, 17, 1);
    const auto lut = build_symmetric_lut(cb);
    REQUIRE(lut.size() == 2);
    for (uint32_t l = 0; l < 2; ++l) {
        CHECK(lut[l](0, 0) == doctest::Approx(0.0));
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                const double d = (cb.block(l).row(i) - cb.block(l).row(j)).squaredNorm();
                CHECK(lut[l](i, j) == doctest::Approx(d).epsilon(1e-5));
                CHECK(lut[l](i, j) == doctest::Approx(lut[l](j, i)));
            }
    }

    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> pick(0, 3);
    for (int t = 0; t < 50; ++t) {
        PQCode a{static_cast<uint8_t>(pick(rng)), static_cast<uint8_t>(pick(rng))};
        PQCode b{static_cast<uint8_t>(pick(rng)), static_cast<uint8_t>(pick(rng))};
        const double expect = (decode(a, cb) - decode(b, cb)).squaredNorm();
        CHECK(symmetric_distance(a, b, lut) == doctest::Approx(expect).epsilon(1e-4));
    }
}

TEST_CASE("more centroids do not hurt reconstruction, by median over seeds") {
    const auto data = random_rows(400, 16, 19);
    auto median_err = [&](uint32_t k) {
        std::vector<double> errs;
        for (uint64_t seed = 0; seed < 10; ++seed) {
            const auto cb = train_codebook(data, 4, k, seed, 1);
            double e = 0.0;
            for (int i = 0; i < data.rows(); ++i) {
                const Eigen::VectorXf v = data.row(i).transpose();
                e += (v - decode(encode(v, cb), cb)).squaredNorm();
            }
            errs.push_back(e);
        }
        std::sort(errs.begin(), errs.end());
        return 0.5 * (errs[4] + errs[5]);
    };
    const double e4 = median_err(4);
    const double e16 = median_err(16);
    const double e64 = median_err(64);
    CHECK(e16 < e4);
    CHECK(e64 < e16);
}

TEST_CASE("invalid training inputs are rejected") {
    const auto data = random_rows(10, 8, 1);
    CHECK_THROWS_AS(train_codebook(data, 3, 4, 0), std::invalid_argument);   // 8 % 3 != 0
    CHECK_THROWS_AS(train_codebook(data, 2, 300, 0), std::invalid_argument); // K > 256
    CHECK_THROWS_AS(train_codebook(data, 2, 16, 0), std::invalid_argument);  // n < K
}

TEST_SUITE_END();
