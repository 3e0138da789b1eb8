#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "genbench/composite/bounds.hpp"
#include "genbench/composite/mmhm.hpp"
#include "genbench/report/table.hpp"
#include "genbench/util/error.hpp"
#include "genbench/util/files.hpp"
#include "support.hpp"

namespace genbench::composite {
namespace {

using metrics::MetricReport;

const BoundsRegistry& published() {
    static const auto reg = BoundsRegistry::published_imagenet();
    return reg;
}

// Written out longhand against the published constants.
double oracle_mmhm(double fid, double is, double clip, double pick) {
    const double u[4] = {std::max(0.0, (317.55 - fid) / (317.55 - 2.61)), std::max(0.0, (is - 1.53) / (382.36 - 1.53)),
                         std::max(0.0, (clip - 20.39) / (32.10 - 20.39)),
                         std::max(0.0, (pick - 16.89) / (22.13 - 16.89))};
    double inv = 0;
    for (double x : u) inv += 1.0 / (0.001 + x);
    return 4.0 / inv;
}

RunKey key(const std::string& model, double cfg = 7, int steps = 25) { return {model, cfg, Steps(steps), "imagenet", 42}; }

TEST(Bounds, PublishedRegistryMatchesFixtureFile) {
    const auto file = BoundsRegistry::from_json(util::read_json(testing::fixture("bounds_imagenet.json")));
    for (auto id : kAllMetrics) {
        EXPECT_EQ(file.at(id).min, published().at(id).min);
        EXPECT_EQ(file.at(id).max, published().at(id).max);
        EXPECT_EQ(file.at(id).orientation, published().at(id).orientation);
    }
    EXPECT_EQ(published().at(MetricId::Fid).orientation, Orientation::LowerIsBetter);
}

TEST(Bounds, JsonRoundTripAndValidation) {
    const auto j = published().to_json();
    EXPECT_EQ(j.at("metrics").at("FID").at("orientation"), "lower-is-better");
    EXPECT_EQ(j.at("metrics").at("IS").at("orientation"), "higher-is-better");
    const auto back = BoundsRegistry::from_json(j);
    EXPECT_EQ(back.to_json(), j);
    BoundsRegistry r;
    EXPECT_THROW(r.set(MetricId::Fid, {3.0, 3.0, Orientation::LowerIsBetter}), InvalidInput);
    EXPECT_THROW(r.set(MetricId::Fid, {1.0, 3.0, Orientation::HigherIsBetter}), InvalidInput);
    r.set(MetricId::Fid, {1.0, 3.0, Orientation::LowerIsBetter});
    EXPECT_THROW(r.require_complete(), ValidationError);
    EXPECT_THROW(r.at(MetricId::Is), UnknownMetric);
}

TEST(Normalize, BoundsMapToUtilityEnds) {
    EXPECT_DOUBLE_EQ(normalize(MetricId::Fid, 2.61, published()), 1.0);
    EXPECT_DOUBLE_EQ(normalize(MetricId::Fid, 317.55, published()), 0.0);
    EXPECT_DOUBLE_EQ(normalize(MetricId::Is, 382.36, published()), 1.0);
    EXPECT_DOUBLE_EQ(normalize("CLIP", 20.39, published()), 0.0);
}

TEST(Normalize, FloorsAtZeroButDoesNotCap) {
    EXPECT_EQ(normalize(MetricId::Fid, 400.0, published()), 0.0);
    EXPECT_GT(normalize(MetricId::Is, 466.54, published()), 1.0);
    EXPECT_THROW(normalize("LPIPS", 1.0, published()), UnknownMetric);
}

TEST(Mmhm, PublishedTableRows) {
    EXPECT_NEAR(mmhm({11.60, 382.36, 0, 31.33, 20.58}, published()).value, 0.886, 0.0005);
    EXPECT_NEAR(mmhm({25.12, 346.19, 0, 31.51, 20.52}, published()).value, 0.856, 0.0005);
    EXPECT_NEAR(mmhm({21.96, 90.40, 0, 30.03, 21.06}, published()).value, 0.513, 0.0005);
    EXPECT_NEAR(mmhm({39.47, 261.47, 0, 31.52, 20.53}, published()).value, 0.787, 0.0005);
    EXPECT_NEAR(mmhm({10.01, 150.48, 0, 29.36, 19.49}, published()).value, 0.581, 0.0005);
}

TEST(Mmhm, AllZeroUtilitiesGiveEpsilon) {
    EXPECT_NEAR(mmhm({317.55, 1.53, 0, 20.39, 16.89}, published()).value, 0.001, 1e-15);
    EXPECT_NEAR(mmhm({1000, 0.5, 0, 10, 10}, published()).value, 0.001, 1e-15);
}

TEST(Mmhm, EqualUtilitiesGiveUtilityPlusEpsilon) {
    for (double u : {0.0, 0.1, 0.37, 0.9, 1.0, 1.3}) {
        const std::array<double, 4> us{u, u, u, u};
        EXPECT_NEAR(harmonic_mmhm(us, 0.001), u + 0.001, 1e-15);
    }
}

TEST(Mmhm, AgreesWithLonghandOracle) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> fid(0, 350), is(0, 450), clip(18, 34), pick(15, 23);
    for (int k = 0; k < 500; ++k) {
        const MetricReport r{fid(rng), is(rng), 0, clip(rng), pick(rng)};
        EXPECT_NEAR(mmhm(r, published()).value, oracle_mmhm(r.fid, r.is_mean, r.clip_score, r.pick_score), 1e-12);
    }
}

TEST(Mmhm, MonotoneInEachUtility) {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0, 1.2), step(0, 0.3);
    for (int k = 0; k < 2000; ++k) {
        std::array<double, 4> a{u(rng), u(rng), u(rng), u(rng)};
        const double before = harmonic_mmhm(a, kDefaultEpsilon);
        a[k % 4] += step(rng);
        EXPECT_GE(harmonic_mmhm(a, kDefaultEpsilon), before);
    }
}

TEST(RankConfigs, FullPrecisionDecidesTwoDecimalTies) {
    // Nudge PICK until the two MMHMs share two decimals but differ at four.
    const MetricReport a{21.96, 90.40, 0, 30.03, 21.06};
    const MetricReport b{21.96, 90.40, 0, 30.03, 21.05};
    const auto sa = mmhm(a, published()), sb = mmhm(b, published());
    ASSERT_EQ(std::round(sa.value * 100), std::round(sb.value * 100));
    ASSERT_GT(sa.value, sb.value);
    const auto ranked = rank_configs({{key("B"), sb, b}, {key("A"), sa, a}});
    EXPECT_EQ(ranked.front().key.model, "A");
}

TEST(RankConfigs, ExactTieGoesToLowerFidThenKey) {
    MmhmScore s;
    s.value = 0.5;
    const auto ranked = rank_configs({{key("x"), s, {20, 1, 0, 1, 1}}, {key("y"), s, {10, 1, 0, 1, 1}}});
    EXPECT_EQ(ranked.front().key.model, "y");
    const auto by_key = rank_configs({{key("b"), s, {10, 1, 0, 1, 1}}, {key("a"), s, {10, 1, 0, 1, 1}}});
    EXPECT_EQ(by_key.front().key.model, "a");
    EXPECT_THROW(rank_configs({}), InvalidInput);
}

TEST(RankConfigs, InvariantUnderPermutation) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> fid(2, 300), is(2, 380), clip(21, 32), pick(17, 22);
    std::vector<ScoredRun> runs;
    for (int i = 0; i < 25; ++i) {
        const MetricReport r{fid(rng), is(rng), 0, clip(rng), pick(rng)};
        runs.push_back({key("m" + std::to_string(i)), mmhm(r, published()), r});
    }
    const auto reference = rank_configs(runs);
    for (int k = 0; k < 20; ++k) {
        std::shuffle(runs.begin(), runs.end(), rng);
        const auto again = rank_configs(runs);
        for (std::size_t i = 0; i < again.size(); ++i) EXPECT_EQ(again[i].key, reference[i].key);
    }
}

TEST(ComputeBounds, TableOneWithoutSitGivesPublishedBounds) {
    const auto rows = report::read_metrics_csv(testing::fixture("table1.csv"));
    std::vector<KeyedReport> reports;
    for (const auto& r : rows) reports.push_back({r.key, r.report});
    const auto reg = compute_bounds(reports, {}, "imagenet");
    for (auto id : kAllMetrics) {
        EXPECT_NEAR(reg.at(id).min, published().at(id).min, 1e-9) << metric_name(id);
        EXPECT_NEAR(reg.at(id).max, published().at(id).max, 1e-9) << metric_name(id);
    }
    EXPECT_EQ(reg.provenance.size(), rows.size());
}

TEST(ComputeBounds, ExclusionsAndDegenerateRanges) {
    const std::vector<KeyedReport> reports{{key("a"), {1, 2, 0, 3, 4}},
                                           {key("b"), {3, 5, 0, 6, 7}},
                                           {key("c"), {100, 500, 0, 60, 70}}};
    const std::vector<RunKey> excl{key("c")};
    const auto reg = compute_bounds(reports, excl, "toy");
    EXPECT_EQ(reg.at(MetricId::Fid).min, 1);
    EXPECT_EQ(reg.at(MetricId::Fid).max, 3);
    EXPECT_EQ(reg.dataset, "toy");
    const std::vector<KeyedReport> same{{key("a"), {1, 2, 0, 3, 4}}, {key("b"), {1, 2, 0, 3, 4}}};
    EXPECT_THROW(compute_bounds(same, {}, "toy"), ValidationError);
    const std::vector<RunKey> all{key("a"), key("b")};
    EXPECT_THROW(compute_bounds(reports, all, "toy"), InsufficientSamples);
}

}  // namespace
}  // namespace genbench::composite
