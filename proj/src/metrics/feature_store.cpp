#include "genbench/metrics/feature_store.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>

#include <fmt/format.h>
#include <json.hpp>

#include "genbench/util/error.hpp"
#include "genbench/util/files.hpp"

namespace genbench::metrics {
namespace {

namespace fs = std::filesystem;

float decode_f32le(const unsigned char* p) {
    std::uint32_t bits = static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
                         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
    return std::bit_cast<float>(bits);
}

void encode_f32le(float v, unsigned char* p) {
    const auto bits = std::bit_cast<std::uint32_t>(v);
    p[0] = static_cast<unsigned char>(bits & 0xffu);
    p[1] = static_cast<unsigned char>((bits >> 8) & 0xffu);
    p[2] = static_cast<unsigned char>((bits >> 16) & 0xffu);
    p[3] = static_cast<unsigned char>((bits >> 24) & 0xffu);
}

void write_store(const fs::path& dir, std::size_t rows, std::size_t cols, std::span<const double> data,
                 const std::vector<std::string>& ids, StoreKind kind) {
    fs::create_directories(dir);
    std::string bytes(rows * cols * 4, '\0');
    auto* out = reinterpret_cast<unsigned char*>(bytes.data());
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double v = data[i];
        if (std::abs(v) > std::numeric_limits<float>::max()) {
            throw InvalidInput(fmt::format("feature store: value {} overflows binary32", v));
        }
        encode_f32le(static_cast<float>(v), out + 4 * i);
    }
    util::write_atomic(dir / "data.bin", bytes);

    nlohmann::json manifest{{"schema_version", 1}, {"dtype", "f32le"},   {"rows", rows},
                            {"cols", cols},        {"order", "row-major"}, {"ids", ids}};
    if (kind == StoreKind::Probabilities) {
        manifest["kind"] = "probabilities";
    }
    util::write_json(dir / "manifest.json", manifest);
}

}  // namespace

StoreManifest read_store_manifest(const fs::path& dir) {
    const auto path = dir / "manifest.json";
    if (!fs::exists(path)) {
        throw IoError(fmt::format("feature store missing: {}", path.string()));
    }
    const auto j = util::read_json(path);
    try {
        if (j.at("schema_version").get<int>() != 1) {
            throw InvalidInput(fmt::format("{}: unsupported schema_version", path.string()));
        }
        if (j.at("dtype").get<std::string>() != "f32le") {
            throw InvalidInput(fmt::format("{}: dtype must be f32le", path.string()));
        }
        if (j.at("order").get<std::string>() != "row-major") {
            throw InvalidInput(fmt::format("{}: order must be row-major", path.string()));
        }
        StoreManifest m;
        m.rows = j.at("rows").get<std::size_t>();
        m.cols = j.at("cols").get<std::size_t>();
        m.ids = j.at("ids").get<std::vector<std::string>>();
        const auto kind = j.value("kind", std::string("features"));
        if (kind == "probabilities") {
            m.kind = StoreKind::Probabilities;
        } else if (kind != "features") {
            throw InvalidInput(fmt::format("{}: unknown kind '{}'", path.string(), kind));
        }
        if (m.ids.size() != m.rows) {
            throw InvalidInput(fmt::format("{}: {} ids for {} rows", path.string(), m.ids.size(), m.rows));
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(fmt::format("{}: {}", path.string(), e.what()));
    }
}

FeatureStoreReader::FeatureStoreReader(const fs::path& dir)
    : dir_(dir), manifest_(read_store_manifest(dir)), data_(dir / "data.bin", std::ios::binary) {
    if (!data_) {
        throw IoError(fmt::format("feature store missing data.bin: {}", dir.string()));
    }
    const auto expected = manifest_.rows * manifest_.cols * 4;
    const auto actual = fs::file_size(dir / "data.bin");
    if (actual != expected) {
        throw InvalidInput(fmt::format("{}: data.bin has {} bytes, manifest implies {}", dir.string(), actual, expected));
    }
}

std::vector<double> FeatureStoreReader::read_rows(std::size_t first, std::size_t count) {
    if (first + count > manifest_.rows) {
        throw InvalidInput(fmt::format("{}: row range out of bounds", dir_.string()));
    }
    const auto n = count * manifest_.cols;
    std::vector<unsigned char> raw(n * 4);
    data_.clear();
    data_.seekg(static_cast<std::streamoff>(first * manifest_.cols * 4));
    data_.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(data_.gcount()) != raw.size()) {
        throw IoError(fmt::format("{}: short read", dir_.string()));
    }
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) {
        values[i] = decode_f32le(raw.data() + 4 * i);
    }
    return values;
}

FeatureMatrix FeatureStoreReader::next_block(std::size_t max_rows) {
    const auto count = std::min(max_rows, remaining());
    if (count == 0) {
        throw InvalidInput(fmt::format("{}: no rows left", dir_.string()));
    }
    auto values = read_rows(next_row_, count);
    std::vector<std::string> ids(manifest_.ids.begin() + static_cast<std::ptrdiff_t>(next_row_),
                                 manifest_.ids.begin() + static_cast<std::ptrdiff_t>(next_row_ + count));
    next_row_ += count;
    return FeatureMatrix(count, manifest_.cols, std::move(values), std::move(ids));
}

FeatureMatrix load_feature_store(const fs::path& dir) {
    FeatureStoreReader reader(dir);
    if (reader.manifest().rows == 0) {
        throw InvalidInput(fmt::format("{}: empty store", dir.string()));
    }
    return reader.next_block(reader.manifest().rows);
}

ProbabilityMatrix load_probability_store(const fs::path& dir) {
    FeatureStoreReader reader(dir);
    const auto& m = reader.manifest();
    if (m.kind != StoreKind::Probabilities) {
        throw InvalidInput(fmt::format("{}: not a probability store (kind)", dir.string()));
    }
    if (m.rows == 0) {
        throw InvalidInput(fmt::format("{}: empty store", dir.string()));
    }
    auto values = reader.read_rows(0, m.rows);
    const double slack = kProbabilityRowTolerance + static_cast<double>(m.cols) * std::numeric_limits<float>::epsilon();
    for (std::size_t r = 0; r < m.rows; ++r) {
        double sum = 0.0;
        for (std::size_t c = 0; c < m.cols; ++c) {
            sum += values[r * m.cols + c];
        }
        if (std::abs(sum - 1.0) > slack || sum <= 0.0) {
            throw InvalidInput(fmt::format("{}: row {} sums to {}", dir.string(), r, sum));
        }
        for (std::size_t c = 0; c < m.cols; ++c) {
            values[r * m.cols + c] = std::min(1.0, values[r * m.cols + c] / sum);
        }
    }
    return ProbabilityMatrix(m.rows, m.cols, std::move(values), m.ids);
}

void write_feature_store(const fs::path& dir, const FeatureMatrix& m) {
    write_store(dir, m.rows(), m.cols(), m.data(), m.ids(), StoreKind::Features);
}

void write_probability_store(const fs::path& dir, const ProbabilityMatrix& m) {
    write_store(dir, m.rows(), m.cols(), m.data(), m.ids(), StoreKind::Probabilities);
}

}  // namespace genbench::metrics
