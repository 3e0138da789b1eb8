#pragma once

// Metadata shards are tab-separated text with a header row naming the columns.
// Required columns: caption, url, nsfw. Optional: clip_sim (caption-synset
// cosine), similarity (accepted as an alias). Fields escape '\\', '\t', '\n'
// and '\r' with a backslash. Rows are read one at a time.

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace genbench::relaionet {

struct ShardRow {
    std::string caption;
    std::string url;
    bool nsfw = false;
    std::optional<double> similarity;
    std::size_t row_id = 0;  ///< 0-based data row index
};

/// "NSFW", "true", "1", "yes" (any case) flag a row; "UNLIKELY", "UNSURE", "false",
/// "0", "no" and empty do not.
std::optional<bool> parse_nsfw(const std::string& value);

std::string escape_field(const std::string& s);
std::optional<std::string> unescape_field(const std::string& s);

class ShardReader {
public:
    /// IoError when the file cannot be opened or its header lacks a required column.
    explicit ShardReader(const std::filesystem::path& path);

    /// Next well-formed row; malformed rows are counted and skipped.
    bool next(ShardRow& row);

    bool has_similarity() const noexcept { return sim_col_.has_value(); }
    std::size_t rows_read() const noexcept { return rows_; }
    std::size_t malformed() const noexcept { return malformed_; }
    std::size_t empty_url() const noexcept { return empty_url_; }

private:
    std::ifstream in_;
    std::size_t ncols_ = 0;
    std::size_t caption_col_ = 0;
    std::size_t url_col_ = 0;
    std::size_t nsfw_col_ = 0;
    std::optional<std::size_t> sim_col_;
    std::size_t rows_ = 0;
    std::size_t malformed_ = 0;
    std::size_t empty_url_ = 0;
    std::string line_;
    std::vector<std::string> fields_;
};

/// Streaming writer used by fixtures and tools.
class ShardWriter {
public:
    ShardWriter(const std::filesystem::path& path, bool with_similarity);
    void write(const std::string& caption, const std::string& url, const std::string& nsfw,
               std::optional<double> similarity = std::nullopt);
    void close();

private:
    std::ofstream out_;
    bool with_similarity_;
};

}  // namespace genbench::relaionet
