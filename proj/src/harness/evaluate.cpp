#include "genbench/harness/evaluate.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "genbench/metrics/alignment.hpp"
#include "genbench/metrics/feature_store.hpp"
#include "genbench/metrics/frechet.hpp"
#include "genbench/util/error.hpp"
#include "genbench/util/files.hpp"
#include "genbench/util/hash.hpp"
#include "genbench/util/workers.hpp"

namespace genbench::harness {
namespace {

namespace fs = std::filesystem;

constexpr std::size_t kReferenceBlockRows = 4096;

struct BatchResult {
    metrics::StatsAccumulator moments;
    std::vector<double> probs;
    std::size_t prob_cols = 0;
    std::vector<double> cosines;
    std::vector<double> preference;
};

std::string store_digest(const fs::path& store) {
    util::Sha256 h;
    h.update(util::read_text(store / "manifest.json"));
    h.update(util::sha256_file(store / "data.bin"));
    return h.hex_digest();
}

}  // namespace

std::vector<ImageItem> manifest_items(const RunManifest& manifest) {
    std::vector<ImageItem> items;
    items.reserve(manifest.entries.size());
    for (const auto& e : manifest.entries) {
        items.push_back({e.id, manifest.image_path(e), e.class_id, e.class_name, e.prompt});
    }
    return items;
}

metrics::MetricReport evaluate_run(const RunManifest& manifest, const metrics::GaussianStats& reference,
                                   const BackendBinding& binding, const EvalOptions& options) {
    binding.require_resolved();
    if (manifest.entries.empty()) {
        throw InsufficientSamples(fmt::format("run {} has no images", manifest.key.to_string()));
    }
    if (options.batch_size == 0) {
        throw InvalidInput("batch_size must be positive");
    }
    const auto items = manifest_items(manifest);
    binding.check_coverage(items);

    const auto n_batches = (items.size() + options.batch_size - 1) / options.batch_size;
    std::vector<BatchResult> batches(n_batches);
    util::parallel_for(n_batches, std::max<std::size_t>(1, options.workers), [&](std::size_t b) {
        const auto first = b * options.batch_size;
        const auto count = std::min(options.batch_size, items.size() - first);
        const std::span<const ImageItem> slice(items.data() + first, count);
        auto& out = batches[b];

        const auto feats = binding.feature->features(slice);
        if (feats.cols() != reference.dim()) {
            throw DimensionMismatch(fmt::format("feature backend '{}' returned d={} but reference stats have d={}",
                                                binding.feature->id(), feats.cols(), reference.dim()));
        }
        out.moments = metrics::StatsAccumulator(feats.cols());
        out.moments.add(feats);

        const auto probs = binding.classifier->probabilities(slice);
        out.prob_cols = probs.cols();
        out.probs.assign(probs.data().begin(), probs.data().end());

        const auto pair = binding.alignment->embed(slice);
        out.cosines = metrics::paired_cosines(pair.image, pair.text);
        out.preference = binding.preference->scores(slice);
        if (out.preference.size() != count) {
            throw InvalidInput(fmt::format("preference backend '{}' returned {} scores for {} images",
                                           binding.preference->id(), out.preference.size(), count));
        }
    });

    std::vector<std::size_t> order(n_batches);
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (!options.merge_order.empty()) {
        auto sorted = options.merge_order;
        std::sort(sorted.begin(), sorted.end());
        if (sorted != order) {
            throw InvalidInput("merge_order must be a permutation of the batch indices");
        }
        order = options.merge_order;
    }
    metrics::StatsAccumulator total(reference.dim());
    for (auto b : order) {
        total.merge(batches[b].moments);
    }

    const auto cols = batches.front().prob_cols;
    std::vector<double> probs;
    std::vector<double> cosines;
    std::vector<double> preference;
    probs.reserve(items.size() * cols);
    cosines.reserve(items.size());
    preference.reserve(items.size());
    for (auto& b : batches) {
        if (b.prob_cols != cols) {
            throw DimensionMismatch("classifier backend changed its class count between batches");
        }
        probs.insert(probs.end(), b.probs.begin(), b.probs.end());
        cosines.insert(cosines.end(), b.cosines.begin(), b.cosines.end());
        preference.insert(preference.end(), b.preference.begin(), b.preference.end());
    }

    metrics::MetricReport report;
    report.fid = metrics::frechet_distance(total.finalize(), reference);
    const auto is = metrics::inception_score(metrics::ProbabilityMatrix(items.size(), cols, std::move(probs)),
                                             options.is_splits);
    report.is_mean = is.mean;
    report.is_std = is.std;
    report.clip_score = metrics::clip_score_from_cosines(cosines);
    report.pick_score = metrics::pick_score_precomputed(preference);
    report.validate();
    return report;
}

metrics::GaussianStats reference_stats(const ReferenceDataset& dataset, const std::string& feature_backend_id,
                                       const fs::path& cache_dir) {
    const auto store = dataset.reference_store(feature_backend_id);
    const auto store_manifest = metrics::read_store_manifest(store);
    const auto digest = store_digest(store);
    const auto cache_path = cache_dir / "refstats" /
                            fmt::format("{}__{}__d{}.json", dataset.id(), feature_backend_id, store_manifest.cols);
    if (fs::exists(cache_path)) {
        try {
            const auto cached = util::read_json(cache_path);
            if (cached.value("store_digest", std::string()) == digest) {
                auto stats = metrics::GaussianStats::from_json(cached.at("stats"));
                stats.validate();
                return stats;
            }
        } catch (const std::exception&) {
            // Unreadable cache entry: rebuild it below.
        }
    }
    metrics::FeatureStoreReader reader(store);
    metrics::StatsAccumulator acc(store_manifest.cols);
    while (reader.remaining() > 0) {
        acc.add(reader.next_block(kReferenceBlockRows));
    }
    auto stats = acc.finalize();
    util::write_json(cache_path, {{"schema_version", 1},
                                  {"dataset", dataset.id()},
                                  {"backend", feature_backend_id},
                                  {"dim", store_manifest.cols},
                                  {"store_digest", digest},
                                  {"stats", stats.to_json()}});
    // Serve the round-tripped copy so first and cached calls agree bit for bit.
    return metrics::GaussianStats::from_json(util::read_json(cache_path).at("stats"));
}

nlohmann::json run_report_json(const RunManifest& manifest, const metrics::MetricReport& report,
                               const BackendBinding& binding) {
    return {{"schema_version", 1},
            {"run_key", manifest.key.to_string()},
            {"key", manifest.key.to_json()},
            {"metrics", metrics::to_json(report)},
            {"images", manifest.entries.size()},
            {"backends",
             {{"feature", binding.feature->id()},
              {"classifier", binding.classifier->id()},
              {"alignment", binding.alignment->id()},
              {"preference", binding.preference->id()}}}};
}

void write_run_report(const fs::path& path, const RunManifest& manifest, const metrics::MetricReport& report,
                      const BackendBinding& binding) {
    util::write_json(path, run_report_json(manifest, report, binding));
}

StoredReport read_run_report(const fs::path& path) {
    const auto j = util::read_json(path);
    try {
        return {RunKey::from_json(j.at("key")), metrics::metric_report_from_json(j.at("metrics"))};
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(fmt::format("{}: {}", path.string(), e.what()));
    }
}

std::vector<StoredReport> collect_reports(const fs::path& out_root) {
    std::vector<StoredReport> out;
    const auto runs = out_root / "runs";
    if (!fs::is_directory(runs)) {
        return out;
    }
    for (const auto& entry : fs::directory_iterator(runs)) {
        const auto path = entry.path() / kReportFile;
        if (fs::is_regular_file(path)) {
            out.push_back(read_run_report(path));
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.key < b.key; });
    return out;
}

}  // namespace genbench::harness
