#pragma once

// On-disk container shared by feature, embedding and probability matrices:
//
//   <dir>/manifest.json  {schema_version:1, dtype:"f32le", rows, cols, order:"row-major", ids:[...]}
//                        probability stores add kind:"probabilities"
//   <dir>/data.bin       rows*cols little-endian IEEE-754 binary32, row-major, no header

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "genbench/metrics/matrix.hpp"

namespace genbench::metrics {

enum class StoreKind { Features, Probabilities };

struct StoreManifest {
    std::size_t rows = 0;
    std::size_t cols = 0;
    StoreKind kind = StoreKind::Features;
    std::vector<std::string> ids;
};

StoreManifest read_store_manifest(const std::filesystem::path& dir);

/// Sequential block reader; memory use is bounded by the requested block size.
class FeatureStoreReader {
public:
    explicit FeatureStoreReader(const std::filesystem::path& dir);

    const StoreManifest& manifest() const noexcept { return manifest_; }
    std::size_t remaining() const noexcept { return manifest_.rows - next_row_; }

    /// Next up to `max_rows` rows as a FeatureMatrix (ids carried along).
    FeatureMatrix next_block(std::size_t max_rows);

    /// Raw doubles for `count` rows starting at `first` (random access).
    std::vector<double> read_rows(std::size_t first, std::size_t count);

private:
    std::filesystem::path dir_;
    StoreManifest manifest_;
    std::ifstream data_;
    std::size_t next_row_ = 0;
};

FeatureMatrix load_feature_store(const std::filesystem::path& dir);

/// Rows are renormalized in double precision after the binary32 round trip
/// (a 1000-way row of floats cannot sum to 1 within 1e-6); rows further from 1
/// than binary32 rounding can explain are rejected.
ProbabilityMatrix load_probability_store(const std::filesystem::path& dir);

void write_feature_store(const std::filesystem::path& dir, const FeatureMatrix& m);
void write_probability_store(const std::filesystem::path& dir, const ProbabilityMatrix& m);

}  // namespace genbench::metrics
