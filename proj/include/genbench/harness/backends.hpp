#pragma once

// Backend boundary: the neural networks behind FID/IS/CLIP/Pick live outside the
// engine. A backend either reads precomputed stores or shells out to an external
// process; the toy backends decode toy images directly.

#include <atomic>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "genbench/metrics/matrix.hpp"

namespace genbench::harness {

struct ImageItem {
    std::string id;
    std::filesystem::path path;
    int class_id = 0;
    std::string class_name;
    std::string prompt;
};

struct PairedEmbeddings {
    metrics::FeatureMatrix image;
    metrics::FeatureMatrix text;
};

class FeatureBackend {
public:
    virtual ~FeatureBackend() = default;
    virtual std::string id() const = 0;
    /// One row per item, in item order. Must be safe to call concurrently.
    virtual metrics::FeatureMatrix features(std::span<const ImageItem> items) const = 0;
    /// Throws CoverageError listing every item the backend cannot serve.
    virtual void check_coverage(std::span<const ImageItem> /*items*/) const {}
};

class ClassifierBackend {
public:
    virtual ~ClassifierBackend() = default;
    virtual std::string id() const = 0;
    virtual metrics::ProbabilityMatrix probabilities(std::span<const ImageItem> items) const = 0;
    virtual void check_coverage(std::span<const ImageItem> /*items*/) const {}
};

class AlignmentBackend {
public:
    virtual ~AlignmentBackend() = default;
    virtual std::string id() const = 0;
    /// Paired (image, prompt) embeddings, row i belonging to items[i].
    virtual PairedEmbeddings embed(std::span<const ImageItem> items) const = 0;
    virtual void check_coverage(std::span<const ImageItem> /*items*/) const {}
};

/// Per-image preference scores (Pick). Either logit_scale * cos over a paired
/// embedding backend, or precomputed scalars.
class PreferenceBackend {
public:
    virtual ~PreferenceBackend() = default;
    virtual std::string id() const = 0;
    virtual std::vector<double> scores(std::span<const ImageItem> items) const = 0;
    virtual void check_coverage(std::span<const ImageItem> /*items*/) const {}
};

/// Everything evaluate_run needs; all four must be set before evaluation.
struct BackendBinding {
    std::shared_ptr<const FeatureBackend> feature;
    std::shared_ptr<const ClassifierBackend> classifier;
    std::shared_ptr<const AlignmentBackend> alignment;
    std::shared_ptr<const PreferenceBackend> preference;

    void require_resolved() const;
    void check_coverage(std::span<const ImageItem> items) const;
};

// --- precomputed stores -----------------------------------------------------

/// In-memory copy of a feature store with an id -> row index.
class StoreTable {
public:
    explicit StoreTable(const std::filesystem::path& dir);

    std::size_t cols() const noexcept { return cols_; }
    std::vector<std::string> missing(std::span<const ImageItem> items) const;
    /// Row-major gather in item order; CoverageError for unknown ids.
    std::vector<double> gather(std::span<const ImageItem> items) const;

private:
    std::filesystem::path dir_;
    std::size_t cols_ = 0;
    std::vector<double> data_;
    std::unordered_map<std::string, std::size_t> index_;
};

class StoreFeatureBackend final : public FeatureBackend {
public:
    StoreFeatureBackend(std::string id, const std::filesystem::path& dir);
    std::string id() const override { return id_; }
    metrics::FeatureMatrix features(std::span<const ImageItem> items) const override;
    void check_coverage(std::span<const ImageItem> items) const override;

private:
    std::string id_;
    StoreTable table_;
};

class StoreClassifierBackend final : public ClassifierBackend {
public:
    StoreClassifierBackend(std::string id, const std::filesystem::path& dir);
    std::string id() const override { return id_; }
    metrics::ProbabilityMatrix probabilities(std::span<const ImageItem> items) const override;
    void check_coverage(std::span<const ImageItem> items) const override;

private:
    std::string id_;
    StoreTable table_;
};

class StoreAlignmentBackend final : public AlignmentBackend {
public:
    StoreAlignmentBackend(std::string id, const std::filesystem::path& image_dir, const std::filesystem::path& text_dir);
    std::string id() const override { return id_; }
    PairedEmbeddings embed(std::span<const ImageItem> items) const override;
    void check_coverage(std::span<const ImageItem> items) const override;

private:
    std::string id_;
    StoreTable image_;
    StoreTable text_;
};

/// Precomputed per-image preference scores: a store with one column.
class StorePreferenceBackend final : public PreferenceBackend {
public:
    StorePreferenceBackend(std::string id, const std::filesystem::path& dir);
    std::string id() const override { return id_; }
    std::vector<double> scores(std::span<const ImageItem> items) const override;
    void check_coverage(std::span<const ImageItem> items) const override;

private:
    std::string id_;
    StoreTable table_;
};

/// logit_scale * cos over the paired embeddings of another backend.
class EmbeddingPreferenceBackend final : public PreferenceBackend {
public:
    EmbeddingPreferenceBackend(std::shared_ptr<const AlignmentBackend> embeddings, double logit_scale);
    std::string id() const override;
    std::vector<double> scores(std::span<const ImageItem> items) const override;
    void check_coverage(std::span<const ImageItem> items) const override { embeddings_->check_coverage(items); }

private:
    std::shared_ptr<const AlignmentBackend> embeddings_;
    double logit_scale_;
};

// --- external process -------------------------------------------------------
//
// Request file (last argument to the command):
//   {schema_version:1, kind:"features"|"probabilities"|"alignment"|"preference",
//    items:[{id, path, class_id, class_name, prompt}], output_dir}
// The process writes a feature store into output_dir (alignment: output_dir/image
// and output_dir/text; preference: one column of scores).

class ProcessRunner {
public:
    ProcessRunner(std::vector<std::string> command, std::filesystem::path work_dir);
    /// Runs one request and returns its output directory.
    std::filesystem::path run(const std::string& kind, std::span<const ImageItem> items) const;
    const std::vector<std::string>& command() const noexcept { return command_; }

private:
    std::vector<std::string> command_;
    std::filesystem::path work_dir_;
    mutable std::atomic<unsigned long> counter_{0};
};

class ProcessFeatureBackend final : public FeatureBackend {
public:
    ProcessFeatureBackend(std::string id, std::vector<std::string> command, std::filesystem::path work_dir);
    std::string id() const override { return id_; }
    metrics::FeatureMatrix features(std::span<const ImageItem> items) const override;

private:
    std::string id_;
    ProcessRunner runner_;
};

class ProcessClassifierBackend final : public ClassifierBackend {
public:
    ProcessClassifierBackend(std::string id, std::vector<std::string> command, std::filesystem::path work_dir);
    std::string id() const override { return id_; }
    metrics::ProbabilityMatrix probabilities(std::span<const ImageItem> items) const override;

private:
    std::string id_;
    ProcessRunner runner_;
};

class ProcessAlignmentBackend final : public AlignmentBackend {
public:
    ProcessAlignmentBackend(std::string id, std::vector<std::string> command, std::filesystem::path work_dir);
    std::string id() const override { return id_; }
    PairedEmbeddings embed(std::span<const ImageItem> items) const override;

private:
    std::string id_;
    ProcessRunner runner_;
};

class ProcessPreferenceBackend final : public PreferenceBackend {
public:
    ProcessPreferenceBackend(std::string id, std::vector<std::string> command, std::filesystem::path work_dir);
    std::string id() const override { return id_; }
    std::vector<double> scores(std::span<const ImageItem> items) const override;

private:
    std::string id_;
    ProcessRunner runner_;
};

/// Builds a binding from the `backends` config object. Relative paths resolve
/// against `base_dir`; process backends keep scratch files under `work_dir`.
BackendBinding resolve_binding(const nlohmann::json& backends, const std::filesystem::path& base_dir,
                               const std::filesystem::path& work_dir);

}  // namespace genbench::harness
