#include <cmath>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "genbench/metrics/alignment.hpp"
#include "genbench/metrics/feature_store.hpp"
#include "genbench/metrics/frechet.hpp"
#include "genbench/metrics/gaussian.hpp"
#include "genbench/metrics/inception.hpp"
#include "genbench/metrics/report.hpp"
#include "genbench/util/error.hpp"
#include "genbench/util/files.hpp"
#include "support.hpp"

namespace genbench::metrics {
namespace {

using testing::random_features;
using testing::TempDir;

GaussianStats diag_stats(std::vector<double> mean, std::vector<double> var) {
    GaussianStats s;
    s.mean = Eigen::Map<Eigen::VectorXd>(mean.data(), static_cast<Eigen::Index>(mean.size()));
    s.cov = Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(var.data(), static_cast<Eigen::Index>(var.size())))
                .asDiagonal();
    s.n = 100;
    return s;
}

Eigen::MatrixXd random_psd(std::size_t d, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Eigen::MatrixXd b(d, d);
    for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = g(rng);
    return b * b.transpose() / static_cast<double>(d);
}

// ---- FeatureMatrix / ProbabilityMatrix ------------------------------------------

TEST(FeatureMatrix, RejectsNonFiniteAndDuplicateIds) {
    EXPECT_THROW(FeatureMatrix(1, 2, {1.0, NAN}), InvalidInput);
    EXPECT_THROW(FeatureMatrix(2, 1, {1.0, 2.0}, {"a", "a"}), InvalidInput);
    EXPECT_THROW(FeatureMatrix(0, 1, {}), InvalidInput);
    EXPECT_THROW(FeatureMatrix(2, 2, {1.0, 2.0, 3.0}), InvalidInput);
    const FeatureMatrix m(2, 1, {1.0, 2.0});
    EXPECT_EQ(m.ids(), (std::vector<std::string>{"0", "1"}));
}

TEST(ProbabilityMatrix, RowsMustSumToOne) {
    EXPECT_NO_THROW(ProbabilityMatrix(1, 2, {0.5, 0.5}));
    EXPECT_THROW(ProbabilityMatrix(1, 2, {0.5, 0.6}), InvalidInput);
    EXPECT_THROW(ProbabilityMatrix(1, 2, {1.5, -0.5}), InvalidInput);
}

// ---- accumulate_stats --------------------------------------------------------------

TEST(AccumulateStats, TwoPointSample) {
    const auto s = accumulate_stats(FeatureMatrix::from_rows({{0, 0}, {2, 2}}));
    EXPECT_DOUBLE_EQ(s.mean(0), 1.0);
    EXPECT_DOUBLE_EQ(s.mean(1), 1.0);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) EXPECT_DOUBLE_EQ(s.cov(i, j), 2.0);
    EXPECT_EQ(s.n, 2u);
}

TEST(AccumulateStats, IdenticalRowsGiveZeroCovariance) {
    const auto s = accumulate_stats(FeatureMatrix::from_rows(std::vector<std::vector<double>>(5, {1.0, 1.0})));
    EXPECT_DOUBLE_EQ(s.mean(0), 1.0);
    EXPECT_EQ(s.cov.cwiseAbs().maxCoeff(), 0.0);
}

TEST(AccumulateStats, SingleRowIsInsufficient) {
    EXPECT_THROW(accumulate_stats(FeatureMatrix::from_rows({{1.0, 2.0}})), InsufficientSamples);
}

TEST(AccumulateStats, MatchesNaiveUnbiasedCovariance) {
    std::mt19937_64 rng(3);
    const auto m = random_features(37, 5, rng, 3.0);
    const auto s = accumulate_stats(m);
    std::vector<double> mean(5, 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < 5; ++j) mean[j] += m.row(i)[j] / 37.0;
    for (std::size_t a = 0; a < 5; ++a) {
        EXPECT_NEAR(s.mean(a), mean[a], 1e-12);
        for (std::size_t b = 0; b < 5; ++b) {
            double c = 0.0;
            for (std::size_t i = 0; i < m.rows(); ++i) c += (m.row(i)[a] - mean[a]) * (m.row(i)[b] - mean[b]);
            EXPECT_NEAR(s.cov(a, b), c / 36.0, 1e-10);
        }
    }
}

TEST(AccumulateStats, MergeOfSplitEqualsConcatenation) {
    std::mt19937_64 rng(11);
    const auto all = random_features(100, 8, rng, 2.0);
    const auto rows = [&](std::size_t first, std::size_t count) {
        std::vector<double> d(all.data().begin() + first * 8, all.data().begin() + (first + count) * 8);
        return FeatureMatrix(count, 8, std::move(d));
    };
    StatsAccumulator a(8), b(8);
    a.add(rows(0, 60));
    b.add(rows(60, 40));
    a.merge(b);
    const auto merged = a.finalize();
    const auto direct = accumulate_stats(all);
    EXPECT_EQ(merged.n, 100u);
    EXPECT_LE((merged.mean - direct.mean).norm(), 1e-8 * (1.0 + direct.mean.norm()));
    EXPECT_LE((merged.cov - direct.cov).norm(), 1e-8 * direct.cov.norm());
}

TEST(AccumulateStats, MergeIsOrderIndependent) {
    std::mt19937_64 rng(5);
    std::vector<StatsAccumulator> parts;
    for (int k = 0; k < 6; ++k) {
        StatsAccumulator acc(4);
        acc.add(random_features(3 + k * 7, 4, rng, 1.0 + k));
        parts.push_back(acc);
    }
    StatsAccumulator forward(4), backward(4), tree(4);
    for (const auto& p : parts) forward.merge(p);
    for (auto it = parts.rbegin(); it != parts.rend(); ++it) backward.merge(*it);
    StatsAccumulator left(4), right(4);
    for (int k = 0; k < 3; ++k) left.merge(parts[k]);
    for (int k = 3; k < 6; ++k) right.merge(parts[k]);
    tree.merge(right);
    tree.merge(left);
    const auto f = forward.finalize(), b = backward.finalize(), t = tree.finalize();
    EXPECT_LE((f.cov - b.cov).norm(), 1e-8 * f.cov.norm());
    EXPECT_LE((f.cov - t.cov).norm(), 1e-8 * f.cov.norm());
    EXPECT_LE((f.mean - t.mean).norm(), 1e-8 * (1.0 + f.mean.norm()));
}

TEST(GaussianStats, JsonRoundTripIsExact) {
    std::mt19937_64 rng(8);
    const auto s = accumulate_stats(random_features(20, 3, rng));
    const auto back = GaussianStats::from_json(s.to_json());
    EXPECT_EQ(back.n, s.n);
    EXPECT_EQ(back.mean, s.mean);
    EXPECT_EQ(back.cov, s.cov);
}

// ---- Fréchet distance --------------------------------------------------------------

TEST(Frechet, IdentityIsExactlyZero) {
    std::mt19937_64 rng(1);
    for (int k = 0; k < 20; ++k) {
        const auto s = accumulate_stats(random_features(30, 1 + k % 9, rng, 1.0 + k));
        EXPECT_EQ(frechet_distance(s, s), 0.0);
    }
}

TEST(Frechet, OneDimensionalClosedForm) {
    EXPECT_NEAR(frechet_distance(diag_stats({0}, {1}), diag_stats({1}, {4})), 2.0, 1e-12);
}

TEST(Frechet, DiagonalClosedForm) {
    EXPECT_NEAR(frechet_distance(diag_stats({0, 0}, {1, 1}), diag_stats({0, 0}, {4, 9})), 5.0, 1e-12);
}

TEST(Frechet, TwoByTwoTraceOracle) {
    // For 2x2 PSD products, Tr(M^1/2) = sqrt(Tr M + 2 sqrt(det M)).
    std::mt19937_64 rng(21);
    for (int k = 0; k < 50; ++k) {
        const Eigen::MatrixXd a = random_psd(2, rng), b = random_psd(2, rng);
        const Eigen::MatrixXd m = a * b;
        const double expected = std::sqrt(m.trace() + 2.0 * std::sqrt(std::max(0.0, m.determinant())));
        EXPECT_NEAR(trace_sqrt_product(a, b), expected, 1e-9);
    }
}

TEST(Frechet, DimensionMismatch) {
    EXPECT_THROW(frechet_distance(diag_stats({0}, {1}), diag_stats({0, 0}, {1, 1})), DimensionMismatch);
}

TEST(Frechet, RejectsClearlyIndefiniteCovariance) {
    auto bad = diag_stats({0, 0}, {1, 1});
    bad.cov(0, 1) = bad.cov(1, 0) = 3.0;  // eigenvalues 4 and -2
    EXPECT_THROW(frechet_distance(bad, diag_stats({0, 0}, {1, 1})), NotPsdError);
}

TEST(Frechet, ClampsRoundoffNegativeEigenvalues) {
    auto almost = diag_stats({0, 0}, {1, -1e-13});
    EXPECT_NO_THROW(frechet_distance(almost, almost));
}

TEST(Sqrtm, SquareOfPsdHasTraceOfOriginal) {
    std::mt19937_64 rng(4);
    for (int k = 0; k < 25; ++k) {
        const auto a = random_psd(1 + k % 16, rng);
        EXPECT_NEAR(sqrtm_psd(a * a).trace(), a.trace(), 1e-8);
    }
}

// ---- Inception score ----------------------------------------------------------------

TEST(InceptionScore, UniformRowsGiveOne) {
    const ProbabilityMatrix p(8, 4, std::vector<double>(32, 0.25));
    const auto is = inception_score(p, 1);
    EXPECT_NEAR(is.mean, 1.0, 1e-9);
    EXPECT_NEAR(is.std, 0.0, 1e-12);
}

TEST(InceptionScore, BalancedOneHotGivesClassCount) {
    std::vector<double> d(32, 0.0);
    for (int r = 0; r < 8; ++r) d[r * 4 + r % 4] = 1.0;
    EXPECT_NEAR(inception_score(ProbabilityMatrix(8, 4, d), 1).mean, 4.0, 1e-9);
}

TEST(InceptionScore, RepeatedRowGivesOneInEverySplit) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.01, 1.0);
    std::vector<double> row(6);
    double sum = 0;
    for (auto& v : row) sum += (v = u(rng));
    for (auto& v : row) v /= sum;
    std::vector<double> d;
    for (int r = 0; r < 20; ++r) d.insert(d.end(), row.begin(), row.end());
    const auto is = inception_score(ProbabilityMatrix(20, 6, d), 10);
    EXPECT_NEAR(is.mean, 1.0, 1e-9);
    EXPECT_NEAR(is.std, 0.0, 1e-9);
}

TEST(InceptionScore, FewerRowsThanSplitsUsesOneSplit) {
    std::vector<double> d(12, 0.0);
    for (int r = 0; r < 3; ++r) d[r * 4 + r] = 1.0;
    const ProbabilityMatrix p(3, 4, d);
    EXPECT_NEAR(inception_score(p, 10).mean, 3.0, 1e-9);
    EXPECT_EQ(inception_score(p, 10).std, 0.0);
}

TEST(InceptionScore, RemainderRowsGoToEarliestSplits) {
    // 5 rows, 2 splits -> rows {0,1,2} and {3,4}. First split covers 3 classes, second 2.
    std::vector<double> d(25, 0.0);
    for (int r = 0; r < 5; ++r) d[r * 5 + r] = 1.0;
    const auto is = inception_score(ProbabilityMatrix(5, 5, d), 2);
    EXPECT_NEAR(is.mean, 2.5, 1e-9);
    EXPECT_NEAR(is.std, 0.5, 1e-9);
}

TEST(InceptionScore, StaysWithinOneAndClassCount) {
    std::mt19937_64 rng(9);
    std::gamma_distribution<double> g(0.3, 1.0);
    for (int k = 0; k < 30; ++k) {
        const std::size_t rows = 10 + k * 3, cols = 2 + k % 7;
        std::vector<double> d(rows * cols);
        for (std::size_t r = 0; r < rows; ++r) {
            double s = 0;
            for (std::size_t c = 0; c < cols; ++c) s += (d[r * cols + c] = g(rng) + 1e-9);
            for (std::size_t c = 0; c < cols; ++c) d[r * cols + c] /= s;
        }
        const auto is = inception_score(ProbabilityMatrix(rows, cols, d), 1 + k % 10);
        EXPECT_GE(is.mean, 1.0 - 1e-9);
        EXPECT_LE(is.mean, static_cast<double>(cols) + 1e-9);
    }
}

// ---- CLIP / Pick ---------------------------------------------------------------------

// Unit rows at cosine `c` from (1, 0).
FeatureMatrix pairs_at_cosine(double c, std::size_t n) {
    std::vector<double> txt;
    for (std::size_t i = 0; i < n; ++i) {
        txt.insert(txt.end(), {c, std::sqrt(1.0 - c * c)});
    }
    return FeatureMatrix(n, 2, txt);
}

TEST(ClipScore, IdenticalOrthogonalAndFixedCosine) {
    const FeatureMatrix x(3, 2, {1, 0, 0, 1, 1, 0});
    const FeatureMatrix y(3, 2, {0, 1, 1, 0, 0, 1});
    EXPECT_NEAR(clip_score(x, x), 100.0, 1e-12);
    EXPECT_NEAR(clip_score(x, y), 0.0, 1e-12);
    const FeatureMatrix e(4, 2, {1, 0, 1, 0, 1, 0, 1, 0});
    EXPECT_NEAR(clip_score(e, pairs_at_cosine(0.30, 4)), 30.0, 1e-9);
}

TEST(ClipScore, NegativeCosinesAreClampedAndRescalingIsIgnored) {
    const FeatureMatrix a(2, 2, {1, 0, 3, 0});
    const FeatureMatrix b(2, 2, {-1, 0, 0.5, 0});
    EXPECT_NEAR(clip_score(a, b), 50.0, 1e-12);
    EXPECT_THROW(clip_score(a, FeatureMatrix(2, 2, {0, 0, 1, 0})), InvalidInput);
    EXPECT_THROW(clip_score(a, FeatureMatrix(1, 2, {1, 0})), DimensionMismatch);
}

TEST(PickScore, LogitScaleAndPassThrough) {
    const FeatureMatrix e(4, 2, {1, 0, 1, 0, 1, 0, 1, 0});
    EXPECT_NEAR(pick_score(e, e, 100.0), 100.0, 1e-12);
    EXPECT_NEAR(pick_score(e, pairs_at_cosine(0.20, 4), 100.0), 20.0, 1e-9);
    const std::vector<double> pre{18.0, 22.0};
    EXPECT_DOUBLE_EQ(pick_score_precomputed(pre), 20.0);
    // Unlike CLIP, Pick keeps negative cosines.
    const FeatureMatrix a(1, 2, {1, 0}), b(1, 2, {-1, 0});
    EXPECT_NEAR(pick_score(a, b, 100.0), -100.0, 1e-12);
}

// ---- report --------------------------------------------------------------------------

TEST(MetricReport, ValidatesAndRoundTrips) {
    MetricReport r{25.12, 346.19, 1.5, 31.51, 20.52};
    EXPECT_NO_THROW(r.validate());
    EXPECT_EQ(metric_report_from_json(to_json(r)), r);
    r.fid = -1.0;
    EXPECT_THROW(r.validate(), InvalidInput);
    r.fid = 1.0;
    r.clip_score = INFINITY;
    EXPECT_THROW(r.validate(), InvalidInput);
}

// ---- feature store -------------------------------------------------------------------

TEST(FeatureStore, BitLayout) {
    TempDir dir;
    write_feature_store(dir.path(), FeatureMatrix(2, 2, {1.0, -2.0, 0.5, 3.0}, {"a", "b"}));
    const auto manifest = util::read_json(dir / "manifest.json");
    EXPECT_EQ(manifest.at("dtype"), "f32le");
    EXPECT_EQ(manifest.at("order"), "row-major");
    EXPECT_EQ(manifest.at("rows"), 2);
    EXPECT_EQ(manifest.at("cols"), 2);
    EXPECT_EQ(manifest.at("ids"), (nlohmann::json{"a", "b"}));
    std::ifstream in(dir / "data.bin", std::ios::binary);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), {});
    ASSERT_EQ(bytes.size(), 16u);
    // 1.0f = 0x3f800000 little-endian
    EXPECT_EQ(bytes[0], 0x00);
    EXPECT_EQ(bytes[2], 0x80);
    EXPECT_EQ(bytes[3], 0x3f);
}

TEST(FeatureStore, BlockReaderStreamsAllRows) {
    TempDir dir;
    std::mt19937_64 rng(6);
    const auto m = random_features(103, 3, rng);
    write_feature_store(dir.path(), m);
    FeatureStoreReader reader(dir.path());
    std::size_t seen = 0;
    while (reader.remaining() > 0) {
        const auto block = reader.next_block(10);
        for (std::size_t i = 0; i < block.rows(); ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
                EXPECT_EQ(block.row(i)[j], static_cast<double>(static_cast<float>(m.row(seen + i)[j])));
            }
        }
        seen += block.rows();
    }
    EXPECT_EQ(seen, 103u);
    const auto again = reader.read_rows(100, 3);
    EXPECT_EQ(again.size(), 9u);
}

TEST(FeatureStore, ProbabilityStoreRenormalizesRows) {
    TempDir dir;
    std::vector<double> d(1000, 0.001);
    write_probability_store(dir.path(), ProbabilityMatrix(1, 1000, d));
    const auto p = load_probability_store(dir.path());
    double s = 0;
    for (double v : p.row(0)) s += v;
    EXPECT_NEAR(s, 1.0, 1e-12);
    EXPECT_EQ(read_store_manifest(dir.path()).kind, StoreKind::Probabilities);
}

TEST(FeatureStore, TruncatedDataIsRejected) {
    TempDir dir;
    write_feature_store(dir.path(), FeatureMatrix(2, 2, {1, 2, 3, 4}));
    std::filesystem::resize_file(dir / "data.bin", 12);
    EXPECT_ANY_THROW(load_feature_store(dir.path()));
}

}  // namespace
}  // namespace genbench::metrics
