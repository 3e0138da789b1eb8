#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "genbench/harness/backends.hpp"
#include "genbench/harness/config.hpp"
#include "genbench/harness/evaluate.hpp"
#include "genbench/harness/run.hpp"
#include "genbench/metrics/alignment.hpp"
#include "genbench/metrics/feature_store.hpp"
#include "genbench/metrics/frechet.hpp"
#include "genbench/metrics/inception.hpp"
#include "genbench/util/error.hpp"
#include "genbench/util/files.hpp"
#include "genbench/util/json_schema.hpp"
#include "support.hpp"

namespace genbench::harness {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using testing::helper_binary;
using testing::TempDir;

json minimal_config() {
    return {{"schema_version", 1},
            {"models", {{{"id", "m"}, {"adapter", {"x"}}}}},
            {"datasets", {{{"id", "d"}, {"path", "d/dataset.json"}}}},
            {"backends",
             {{"feature", {{"type", "store"}, {"path", "f"}}},
              {"classifier", {{"type", "store"}, {"path", "p"}}},
              {"alignment", {{"type", "store"}, {"image_store", "i"}, {"text_store", "t"}}}}}};
}

std::string config_error(const json& j) {
    try {
        GenbenchConfig::from_json(j, "/base");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

/// `classes` x `per_class` examples (class-major) with a reference store of
/// `dim`-d Gaussian features.
ReferenceDataset make_dataset(const fs::path& dir, int classes, int per_class, std::size_t dim = 4) {
    std::vector<ReferenceExample> ex;
    for (int c = 0; c < classes; ++c)
        for (int k = 0; k < per_class; ++k) ex.push_back({"e" + std::to_string(ex.size()), c, "class" + std::to_string(c)});
    std::mt19937_64 rng(99);
    std::vector<std::string> ids;
    for (const auto& e : ex) ids.push_back(e.id);
    auto feats = testing::random_features(ex.size(), dim, rng);
    metrics::write_feature_store(dir / "reference",
                                 metrics::FeatureMatrix(ex.size(), dim, {feats.data().begin(), feats.data().end()}, ids));
    ReferenceDataset ds("d", ex, {{"*", dir / "reference"}});
    util::write_json(dir / "dataset.json", ds.to_json());
    return ReferenceDataset::load(dir / "dataset.json");
}

ModelSpec helper_model(std::vector<std::string> mode) {
    ModelSpec m;
    m.id = "fake";
    m.adapter = {helper_binary(), "adapter"};
    m.adapter.insert(m.adapter.end(), mode.begin(), mode.end());
    return m;
}

// ---- schema validator ----------------------------------------------------------

TEST(JsonSchema, ReportsPathsOfEveryViolation) {
    const json schema = {{"type", "object"},
                         {"required", {"a"}},
                         {"additionalProperties", false},
                         {"properties",
                          {{"a", {{"type", "array"}, {"items", {{"type", "integer"}, {"minimum", 1}}}}},
                           {"b", {{"type", "string"}, {"enum", {"x", "y"}}}}}}};
    EXPECT_TRUE(util::schema_violations(schema, {{"a", {1, 2}}}).empty());
    const auto v = util::schema_violations(schema, {{"a", {1, 0, 1.5}}, {"b", "z"}, {"c", 1}});
    std::vector<std::string> paths;
    for (const auto& x : v) paths.push_back(x.path);
    EXPECT_NE(std::find(paths.begin(), paths.end(), "a[1]"), paths.end());
    EXPECT_NE(std::find(paths.begin(), paths.end(), "a[2]"), paths.end());
    EXPECT_NE(std::find(paths.begin(), paths.end(), "b"), paths.end());
    EXPECT_NE(std::find(paths.begin(), paths.end(), "c"), paths.end());
    EXPECT_FALSE(util::schema_violations(schema, json::object()).empty());
}

// ---- config ----------------------------------------------------------------------

TEST(Config, DefaultsAndPathResolution) {
    const auto c = GenbenchConfig::from_json(minimal_config(), "/base");
    EXPECT_EQ(c.cfg_values, kDefaultCfgGrid);
    EXPECT_EQ(c.step_values.size(), 6u);
    EXPECT_EQ(c.seed, 42);
    EXPECT_EQ(c.datasets[0].path, fs::path("/base/d/dataset.json"));
    EXPECT_EQ(c.models[0].family, ModelFamily::Default);
}

TEST(Config, InvalidFieldsAreNamed) {
    auto j = minimal_config();
    j["models"][0].erase("adapter");
    EXPECT_NE(config_error(j).find("models[0]"), std::string::npos);
    j = minimal_config();
    j["cfg_values"] = {0.5};
    EXPECT_NE(config_error(j).find("cfg_values[0]"), std::string::npos);
    j = minimal_config();
    j["models"][0]["family"] = "chatty";
    EXPECT_NE(config_error(j).find("models[0].family"), std::string::npos);
    j = minimal_config();
    j["sed"] = 1;
    EXPECT_NE(config_error(j).find("sed"), std::string::npos);
    j = minimal_config();
    j["models"].push_back(j["models"][0]);
    EXPECT_NE(config_error(j).find("duplicate"), std::string::npos);
    EXPECT_THROW(GenbenchConfig::load("/nonexistent/genbench.json"), ConfigError);
}

TEST(Config, ShippedToyConfigIsValid) {
    const auto c = GenbenchConfig::load(testing::config_file("genbench.toy.json"));
    EXPECT_EQ(c.models.size(), 1u);
}

// ---- prompts and planning ------------------------------------------------------------

TEST(Prompt, FamilyTemplates) {
    EXPECT_EQ(render_prompt(ModelFamily::Default, "sports car"), "a photo of a sports car");
    EXPECT_EQ(render_prompt(ModelFamily::Conversational, "groom"), "Can you generate a photo of a groom?");
    EXPECT_EQ(render_prompt(ModelFamily::LabelId, "goldfish"), "a photo of a goldfish");
    EXPECT_THROW(render_prompt(ModelFamily::Default, ""), InvalidInput);
}

class PlanTest : public ::testing::Test {
protected:
    void SetUp() override {
        ds_.emplace("d", make_dataset(dir_.path(), 3, 2));
        config_ = GenbenchConfig::from_json(minimal_config(), dir_.path());
    }
    std::vector<RunSpec> plan() { return plan_sweep(config_, ds_, dir_ / "out"); }
    TempDir dir_;
    std::map<std::string, ReferenceDataset> ds_;
    GenbenchConfig config_;
};

TEST_F(PlanTest, CartesianProduct) {
    config_.cfg_values = {1, 7};
    config_.step_values = {Steps(1), Steps(25)};
    const auto runs = plan();
    ASSERT_EQ(runs.size(), 4u);
    EXPECT_EQ(runs[0].key.to_string(), "m|cfg=1|steps=1|d|seed=42");
    EXPECT_EQ(runs[3].key.to_string(), "m|cfg=7|steps=25|d|seed=42");
    EXPECT_EQ(runs[0].class_plan.size(), 6u);
    EXPECT_EQ(runs[0].class_plan[5].example_id, "e5");
    EXPECT_EQ(runs[0].class_plan[5].prompt, "a photo of a class2");
}

TEST_F(PlanTest, DefaultGridHas42RunsPerModelAndDataset) {
    EXPECT_EQ(plan().size(), 42u);
    config_.models.push_back(config_.models[0]);
    config_.models[1].id = "m2";
    EXPECT_EQ(plan().size(), 84u);
}

TEST_F(PlanTest, CapabilityFlags) {
    config_.cfg_values = {1, 3, 7};
    config_.step_values = {Steps(1), Steps(25)};
    config_.models[0].fixed_cfg = 7;
    auto runs = plan();
    ASSERT_EQ(runs.size(), 2u);
    EXPECT_TRUE(runs[0].fixed_cfg);
    config_.models[0].fixed_cfg.reset();
    config_.models[0].dynamic_steps = true;
    runs = plan();
    ASSERT_EQ(runs.size(), 3u);
    EXPECT_TRUE(runs[0].key.steps.is_dynamic());
}

TEST_F(PlanTest, UnknownDatasetIsAnError) {
    config_.datasets[0].id = "nope";
    EXPECT_THROW(plan(), ConfigError);
}

TEST_F(PlanTest, ImbalancedClassesAreFlagged) {
    TempDir other;
    auto ex = ds_.at("d").examples();
    ex.pop_back();
    const ReferenceDataset d("d", ex, {});
    EXPECT_TRUE(d.class_balance().imbalanced);
    EXPECT_FALSE(ds_.at("d").class_balance().imbalanced);
}

// ---- adapter runs ----------------------------------------------------------------------

class RunTest : public ::testing::Test {
protected:
    RunSpec spec(std::vector<std::string> mode, double cfg = 1.0, int steps = 1) {
        return make_run_spec(helper_model(std::move(mode)), cfg, Steps(steps), dataset_, 42, dir_ / "out");
    }
    TempDir dir_;
    ReferenceDataset dataset_ = make_dataset(dir_.path(), 10, 5);
};

TEST_F(RunTest, CompleteRunHasOneEntryPerExample) {
    const auto m = execute_run(spec({"ok"}));
    ASSERT_EQ(m.entries.size(), 50u);
    EXPECT_EQ(m.status, "complete");
    EXPECT_EQ(m.source, "adapter");
    EXPECT_EQ(m.entries[0].id, "g000000");
    EXPECT_EQ(m.entries[0].sha256.size(), 64u);
    EXPECT_FALSE(m.nfe_stats.has_value());
    const auto loaded = RunManifest::load(m.dir);
    EXPECT_EQ(loaded.to_json(), m.to_json());
}

TEST_F(RunTest, RerunIsANoOpUntilAnImageChanges) {
    const auto counter = dir_ / "count.txt";
    const auto s = spec({"count", counter.string()});
    bool reused = true;
    execute_run(s, &reused);
    EXPECT_FALSE(reused);
    execute_run(s, &reused);
    EXPECT_TRUE(reused);
    const auto lines = [&] {
        std::ifstream in(counter);
        return static_cast<int>(std::count(std::istreambuf_iterator<char>(in), {}, '\n'));
    };
    EXPECT_EQ(lines(), 1);
    std::ofstream(s.output_dir / "g000003.png") << "tampered";
    execute_run(s, &reused);
    EXPECT_FALSE(reused);
    EXPECT_EQ(lines(), 2);
}

TEST_F(RunTest, NfeStatsFromAdapter) {
    TempDir d;
    const auto ds = make_dataset(d.path(), 10, 10);
    const auto m = execute_run(make_run_spec(helper_model({"nfe"}), 1.0, Steps::dynamic(), ds, 42, d / "out"));
    ASSERT_TRUE(m.nfe_stats.has_value());
    EXPECT_NEAR(m.nfe_stats->mean, 155.95, 1e-9);
    EXPECT_EQ(m.nfe_stats->min, 92);
    EXPECT_EQ(m.nfe_stats->max, 284);
    EXPECT_EQ(m.nfe_stats->count, 100u);
}

TEST_F(RunTest, FixedCfgIsNotSentToAdapter) {
    auto model = helper_model({"ok"});
    model.fixed_cfg = 3.5;
    const auto m = execute_run(make_run_spec(model, 3.5, Steps(25), dataset_, 42, dir_ / "out"));
    EXPECT_EQ(util::read_json(m.dir / "job.json").at("cfg"), nullptr);
    EXPECT_NE(util::read_text(m.image_path(m.entries[0])).find("|none|25|42"), std::string::npos);
}

TEST_F(RunTest, AdapterFailuresAreClassified) {
    try {
        execute_run(spec({"fail"}));
        FAIL();
    } catch (const RunFailed& e) {
        EXPECT_NE(std::string(e.what()).find("simulated adapter crash"), std::string::npos);
    }
    EXPECT_THROW(execute_run(spec({"status"}, 3)), RunFailed);
    EXPECT_THROW(execute_run(spec({"noresult"}, 6)), IncompleteRun);
    try {
        execute_run(spec({"missing"}, 7));
        FAIL();
    } catch (const IncompleteRun& e) {
        EXPECT_NE(std::string(e.what()).find("g000049"), std::string::npos);
    }
    EXPECT_THROW(execute_run(spec({"extra"}, 9)), IncompleteRun);
}

TEST_F(RunTest, IngestCompleteMissingAndDuplicate) {
    const auto s = spec({"ok"});
    const auto images = dir_ / "images";
    fs::create_directories(images);
    for (const auto& e : s.class_plan) std::ofstream(images / (e.sample_id + ".png")) << e.sample_id;
    const auto m = ingest_directory(images, s);
    EXPECT_EQ(m.entries.size(), 50u);
    EXPECT_EQ(m.source, "ingest");

    fs::remove(images / "g000017.png");
    try {
        ingest_directory(images, s);
        FAIL();
    } catch (const InvalidInput& e) {
        EXPECT_NE(std::string(e.what()).find("g000017"), std::string::npos);
    }
    std::ofstream(images / "g000017.png") << "x";
    std::ofstream(images / "g000017.jpg") << "x";
    EXPECT_THROW(ingest_directory(images, s), InvalidInput);
}

// ---- evaluation ----------------------------------------------------------------------------

/// Stores keyed by sample id for a manifest, so store backends can serve it.
struct StoreFixture {
    fs::path root;
    BackendBinding binding;
};

StoreFixture write_stores(const fs::path& root, const RunManifest& m, const metrics::FeatureMatrix& feats,
                          const metrics::ProbabilityMatrix& probs, std::mt19937_64& rng) {
    std::vector<std::string> ids;
    for (const auto& e : m.entries) ids.push_back(e.id);
    const auto n = ids.size();
    metrics::write_feature_store(root / "features",
                                 metrics::FeatureMatrix(n, feats.cols(), {feats.data().begin(), feats.data().end()}, ids));
    metrics::write_probability_store(root / "probs",
                                     metrics::ProbabilityMatrix(n, probs.cols(), {probs.data().begin(), probs.data().end()}, ids));
    const auto img = testing::random_features(n, 6, rng), txt = testing::random_features(n, 6, rng);
    metrics::write_feature_store(root / "image", metrics::FeatureMatrix(n, 6, {img.data().begin(), img.data().end()}, ids));
    metrics::write_feature_store(root / "text", metrics::FeatureMatrix(n, 6, {txt.data().begin(), txt.data().end()}, ids));
    std::uniform_real_distribution<double> pick(15, 25);
    std::vector<double> pref(n);
    for (auto& p : pref) p = pick(rng);
    metrics::write_feature_store(root / "pref", metrics::FeatureMatrix(n, 1, pref, ids));
    const json spec = {{"feature", {{"type", "store"}, {"path", "features"}}},
                       {"classifier", {{"type", "store"}, {"path", "probs"}}},
                       {"alignment", {{"type", "store"}, {"image_store", "image"}, {"text_store", "text"}}},
                       {"preference", {{"type", "store"}, {"path", "pref"}}}};
    return {root, resolve_binding(spec, root, root / "work")};
}

metrics::ProbabilityMatrix uniform_probs(std::size_t n, std::size_t c) {
    return {n, c, std::vector<double>(n * c, 1.0 / static_cast<double>(c))};
}

class EvalTest : public RunTest {
protected:
    void SetUp() override { manifest_ = execute_run(spec({"ok"})); }
    RunManifest manifest_;
    std::mt19937_64 rng_{5};
};

TEST_F(EvalTest, GeneratedEqualsReferenceGivesZeroFid) {
    const auto ref_feats = metrics::load_feature_store(dataset_.reference_store("x"));
    const auto stores = write_stores(dir_ / "stores", manifest_, ref_feats, uniform_probs(50, 10), rng_);
    const auto ref = reference_stats(dataset_, "x", dir_ / "cache");
    const auto r = evaluate_run(manifest_, ref, stores.binding);
    EXPECT_NEAR(r.fid, 0.0, 1e-6);
    EXPECT_NEAR(r.is_mean, 1.0, 1e-9);
}

TEST_F(EvalTest, MatchesDirectMetricComputation) {
    const auto feats = testing::random_features(50, 4, rng_, 2.0);
    std::vector<double> p(50 * 10, 0.0);
    for (int r = 0; r < 50; ++r) p[r * 10 + r % 10] = 1.0;
    const metrics::ProbabilityMatrix probs(50, 10, p);
    const auto stores = write_stores(dir_ / "stores", manifest_, feats, probs, rng_);
    const auto ref = reference_stats(dataset_, "x", dir_ / "cache");
    EvalOptions opts;
    opts.batch_size = 7;
    opts.is_splits = 1;
    const auto r = evaluate_run(manifest_, ref, stores.binding, opts);

    const auto g = metrics::load_feature_store(stores.root / "features");
    EXPECT_NEAR(r.fid, metrics::frechet_distance(metrics::accumulate_stats(g), ref), 1e-8);
    EXPECT_NEAR(r.is_mean, 10.0, 1e-9);
    const auto img = metrics::load_feature_store(stores.root / "image");
    const auto txt = metrics::load_feature_store(stores.root / "text");
    EXPECT_NEAR(r.clip_score, metrics::clip_score(img, txt), 1e-9);
    const auto pref = metrics::load_feature_store(stores.root / "pref");
    EXPECT_NEAR(r.pick_score, metrics::pick_score_precomputed(pref.data()), 1e-9);
}

TEST_F(EvalTest, BatchOrderAndWorkersDoNotChangeResults) {
    const auto stores = write_stores(dir_ / "stores", manifest_, testing::random_features(50, 4, rng_, 3.0),
                                     uniform_probs(50, 10), rng_);
    const auto ref = reference_stats(dataset_, "x", dir_ / "cache");
    EvalOptions base;
    base.batch_size = 6;  // 9 batches
    const auto a = evaluate_run(manifest_, ref, stores.binding, base);
    auto shuffled = base;
    shuffled.merge_order = {8, 3, 0, 5, 1, 7, 2, 6, 4};
    shuffled.workers = 4;
    const auto b = evaluate_run(manifest_, ref, stores.binding, shuffled);
    EXPECT_NEAR(a.fid, b.fid, 1e-8 * (1 + a.fid));
    EXPECT_NEAR(a.is_mean, b.is_mean, 1e-12);
    EXPECT_NEAR(a.clip_score, b.clip_score, 1e-12);
    EXPECT_NEAR(a.pick_score, b.pick_score, 1e-12);
}

TEST_F(EvalTest, ProcessBackendsAgreeWithStoreBackends) {
    const auto stores = write_stores(dir_ / "stores", manifest_, testing::random_features(50, 4, rng_),
                                     uniform_probs(50, 10), rng_);
    const std::vector<std::string> cmd{helper_binary(), "backend", stores.root.string()};
    const json spec = {{"feature", {{"type", "process"}, {"command", cmd}}},
                       {"classifier", {{"type", "process"}, {"command", cmd}}},
                       {"alignment", {{"type", "process"}, {"command", cmd}}},
                       {"preference", {{"type", "process"}, {"command", cmd}}}};
    const auto process = resolve_binding(spec, dir_.path(), dir_ / "work");
    const auto ref = reference_stats(dataset_, "x", dir_ / "cache");
    EvalOptions opts;
    opts.batch_size = 16;
    const auto a = evaluate_run(manifest_, ref, stores.binding, opts);
    const auto b = evaluate_run(manifest_, ref, process, opts);
    EXPECT_EQ(a, b);
}

TEST_F(EvalTest, StoreCoverageGapListsIds) {
    TempDir other;
    auto small = manifest_;
    small.entries.resize(40);
    const auto stores = write_stores(other.path(), small, testing::random_features(40, 4, rng_),
                                     uniform_probs(40, 10), rng_);
    try {
        evaluate_run(manifest_, reference_stats(dataset_, "x", dir_ / "cache"), stores.binding);
        FAIL();
    } catch (const CoverageError& e) {
        EXPECT_NE(std::string(e.what()).find("g000045"), std::string::npos);
    }
}

TEST_F(EvalTest, EmbeddingPreferenceDefaultsToScaledCosine) {
    const auto stores = write_stores(dir_ / "stores", manifest_, testing::random_features(50, 4, rng_),
                                     uniform_probs(50, 10), rng_);
    const json spec = {{"feature", {{"type", "store"}, {"path", "features"}}},
                       {"classifier", {{"type", "store"}, {"path", "probs"}}},
                       {"alignment", {{"type", "store"}, {"image_store", "image"}, {"text_store", "text"}}},
                       {"logit_scale", 50}};
    const auto binding = resolve_binding(spec, stores.root, stores.root / "work");
    const auto r = evaluate_run(manifest_, reference_stats(dataset_, "x", dir_ / "cache"), binding);
    const auto img = metrics::load_feature_store(stores.root / "image");
    const auto txt = metrics::load_feature_store(stores.root / "text");
    EXPECT_NEAR(r.pick_score, metrics::pick_score(img, txt, 50.0), 1e-9);
}

TEST_F(EvalTest, ReportsRoundTripAndCollect) {
    const auto stores = write_stores(dir_ / "stores", manifest_, testing::random_features(50, 4, rng_),
                                     uniform_probs(50, 10), rng_);
    const auto r = evaluate_run(manifest_, reference_stats(dataset_, "x", dir_ / "cache"), stores.binding);
    write_run_report(manifest_.dir / kReportFile, manifest_, r, stores.binding);
    const auto back = read_run_report(manifest_.dir / kReportFile);
    EXPECT_EQ(back.key, manifest_.key);
    EXPECT_EQ(back.report, r);
    const auto all = collect_reports(dir_ / "out");
    ASSERT_EQ(all.size(), 1u);
}

TEST(ReferenceStats, LargeStoreCacheAndInvalidation) {
    TempDir dir;
    std::vector<ReferenceExample> ex;
    std::vector<std::string> ids;
    for (int i = 0; i < 50000; ++i) {
        ids.push_back("v" + std::to_string(i));
        ex.push_back({ids.back(), i % 1000, "c" + std::to_string(i % 1000)});
    }
    std::mt19937_64 rng(12);
    const auto f = testing::random_features(50000, 8, rng);
    metrics::write_feature_store(dir / "ref", metrics::FeatureMatrix(50000, 8, {f.data().begin(), f.data().end()}, ids));
    const ReferenceDataset ds("val", ex, {{"inception", dir / "ref"}});
    const auto first = reference_stats(ds, "inception", dir / "cache");
    EXPECT_EQ(first.n, 50000u);
    const auto cache_file = dir / "cache" / "refstats" / "val__inception__d8.json";
    ASSERT_TRUE(fs::exists(cache_file));
    const auto bytes = util::read_text(cache_file);
    const auto second = reference_stats(ds, "inception", dir / "cache");
    EXPECT_EQ(second.mean, first.mean);
    EXPECT_EQ(second.cov, first.cov);
    EXPECT_EQ(util::read_text(cache_file), bytes);
    EXPECT_THROW(reference_stats(ds, "clip", dir / "cache"), IoError);
}

TEST(ReferenceStats, OneRowStoreIsInsufficient) {
    TempDir dir;
    metrics::write_feature_store(dir / "ref", metrics::FeatureMatrix(1, 2, {1, 2}, {"a"}));
    const ReferenceDataset ds("one", {{"a", 0, "c"}}, {{"*", dir / "ref"}});
    EXPECT_THROW(reference_stats(ds, "f", dir / "cache"), InsufficientSamples);
}

TEST(ReferenceStats, StoreChangeRebuildsCache) {
    TempDir dir;
    metrics::write_feature_store(dir / "ref", metrics::FeatureMatrix(2, 1, {0, 2}, {"a", "b"}));
    const ReferenceDataset ds("r", {{"a", 0, "c"}, {"b", 0, "c"}}, {{"*", dir / "ref"}});
    EXPECT_DOUBLE_EQ(reference_stats(ds, "f", dir / "cache").mean(0), 1.0);
    metrics::write_feature_store(dir / "ref", metrics::FeatureMatrix(2, 1, {0, 4}, {"a", "b"}));
    EXPECT_DOUBLE_EQ(reference_stats(ds, "f", dir / "cache").mean(0), 2.0);
}

TEST(SamplingOracle, FidShrinksTowardZeroWithSampleSize) {
    // Draws from N(mu, Sigma) scored against the exact (mu, Sigma).
    std::mt19937_64 rng(77);
    const std::size_t d = 8, n = 10000;
    metrics::GaussianStats ref;
    ref.mean = Eigen::VectorXd::LinSpaced(d, -1, 1);
    Eigen::MatrixXd a = Eigen::MatrixXd::Random(d, d);
    ref.cov = a * a.transpose() + Eigen::MatrixXd::Identity(d, d);
    ref.n = n;
    const Eigen::MatrixXd l = ref.cov.llt().matrixL();
    std::normal_distribution<double> g;
    std::vector<double> data;
    for (std::size_t i = 0; i < n; ++i) {
        Eigen::VectorXd z(d);
        for (auto& v : z) v = g(rng);
        const Eigen::VectorXd x = ref.mean + l * z;
        data.insert(data.end(), x.data(), x.data() + d);
    }
    const auto fid = metrics::frechet_distance(metrics::accumulate_stats(metrics::FeatureMatrix(n, d, data)), ref);
    EXPECT_LE(fid, 0.5);
}

}  // namespace
}  // namespace genbench::harness
