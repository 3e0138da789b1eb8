#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "genbench/harness/backends.hpp"
#include "genbench/harness/dataset.hpp"
#include "genbench/harness/run.hpp"
#include "genbench/metrics/gaussian.hpp"
#include "genbench/metrics/inception.hpp"
#include "genbench/metrics/report.hpp"

namespace genbench::harness {

struct EvalOptions {
    std::size_t batch_size = kDefaultBatchSize;
    std::size_t workers = 1;
    std::size_t is_splits = metrics::kDefaultSplits;
    /// Order in which per-batch feature moments are merged; identity when empty.
    /// Exists to check that results do not depend on batch order.
    std::vector<std::size_t> merge_order;
};

std::vector<ImageItem> manifest_items(const RunManifest& manifest);

/// FID against `reference`, IS over classifier posteriors, CLIP and Pick over
/// paired (image, prompt) embeddings. Batches run on up to `workers` threads;
/// IS rows and score sums are combined in manifest order.
metrics::MetricReport evaluate_run(const RunManifest& manifest, const metrics::GaussianStats& reference,
                                   const BackendBinding& binding, const EvalOptions& options = {});

/// Mean/covariance of the dataset's reference store for `feature_backend_id`,
/// cached at cache_dir/refstats/<dataset>__<backend>__d<dim>.json. The cache
/// records a digest of the store and is rebuilt when the store changes.
metrics::GaussianStats reference_stats(const ReferenceDataset& dataset, const std::string& feature_backend_id,
                                       const std::filesystem::path& cache_dir);

inline constexpr const char* kReportFile = "report.json";

/// report.json: {schema_version, run_key, key, metrics:{fid,is_mean,is_std,clip,pick}, images, backends}
nlohmann::json run_report_json(const RunManifest& manifest, const metrics::MetricReport& report,
                               const BackendBinding& binding);
void write_run_report(const std::filesystem::path& path, const RunManifest& manifest,
                      const metrics::MetricReport& report, const BackendBinding& binding);

struct StoredReport {
    RunKey key;
    metrics::MetricReport report;
};
StoredReport read_run_report(const std::filesystem::path& path);

/// Every runs/*/report.json under out_root, sorted by run key.
std::vector<StoredReport> collect_reports(const std::filesystem::path& out_root);

}  // namespace genbench::harness
