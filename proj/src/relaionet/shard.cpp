#include "genbench/relaionet/shard.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <fmt/format.h>

#include "genbench/util/error.hpp"

namespace genbench::relaionet {
namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

void split_tabs(const std::string& line, std::vector<std::string>& out) {
    out.clear();
    std::size_t start = 0;
    for (;;) {
        const auto tab = line.find('\t', start);
        if (tab == std::string::npos) {
            out.emplace_back(line.substr(start));
            return;
        }
        out.emplace_back(line.substr(start, tab - start));
        start = tab + 1;
    }
}

std::optional<double> parse_real(const std::string& s) {
    if (s.empty()) {
        return std::nullopt;
    }
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size() || !std::isfinite(v)) {
            return std::nullopt;
        }
        return v;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

}  // namespace

std::optional<bool> parse_nsfw(const std::string& value) {
    const auto v = lower(value);
    if (v == "nsfw" || v == "true" || v == "1" || v == "yes") return true;
    if (v.empty() || v == "unlikely" || v == "unsure" || v == "false" || v == "0" || v == "no") return false;
    return std::nullopt;
}

std::string escape_field(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '\t': out += "\\t"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            default: out += c;
        }
    }
    return out;
}

std::optional<std::string> unescape_field(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '\\') {
            out += s[i];
            continue;
        }
        if (++i == s.size()) {
            return std::nullopt;
        }
        switch (s[i]) {
            case '\\': out += '\\'; break;
            case 't': out += '\t'; break;
            case 'n': out += '\n'; break;
            case 'r': out += '\r'; break;
            default: return std::nullopt;
        }
    }
    return out;
}

ShardReader::ShardReader(const std::filesystem::path& path) : in_(path, std::ios::binary) {
    if (!in_) {
        throw IoError(fmt::format("cannot open shard {}", path.string()));
    }
    std::string header;
    if (!std::getline(in_, header)) {
        throw IoError(fmt::format("shard {} is empty", path.string()));
    }
    if (!header.empty() && header.back() == '\r') header.pop_back();
    std::vector<std::string> names;
    split_tabs(header, names);
    ncols_ = names.size();
    std::optional<std::size_t> caption, url, nsfw;
    for (std::size_t i = 0; i < names.size(); ++i) {
        const auto name = lower(names[i]);
        if (name == "caption" || name == "text") caption = i;
        else if (name == "url") url = i;
        else if (name == "nsfw") nsfw = i;
        else if (name == "clip_sim" || (name == "similarity" && !sim_col_)) sim_col_ = i;
    }
    if (!caption || !url || !nsfw) {
        throw IoError(fmt::format("shard {}: header must name caption, url and nsfw columns", path.string()));
    }
    caption_col_ = *caption;
    url_col_ = *url;
    nsfw_col_ = *nsfw;
}

bool ShardReader::next(ShardRow& row) {
    while (std::getline(in_, line_)) {
        const auto id = rows_++;
        if (!line_.empty() && line_.back() == '\r') line_.pop_back();
        split_tabs(line_, fields_);
        if (fields_.size() != ncols_) {
            ++malformed_;
            continue;
        }
        auto caption = unescape_field(fields_[caption_col_]);
        auto url = unescape_field(fields_[url_col_]);
        const auto nsfw = parse_nsfw(fields_[nsfw_col_]);
        if (!caption || !url || !nsfw) {
            ++malformed_;
            continue;
        }
        if (url->empty()) {
            ++empty_url_;
            continue;
        }
        std::optional<double> sim;
        if (sim_col_) {
            sim = parse_real(fields_[*sim_col_]);
            if (!sim) {
                ++malformed_;
                continue;
            }
        }
        row.caption = std::move(*caption);
        row.url = std::move(*url);
        row.nsfw = *nsfw;
        row.similarity = sim;
        row.row_id = id;
        return true;
    }
    return false;
}

ShardWriter::ShardWriter(const std::filesystem::path& path, bool with_similarity)
    : out_(path, std::ios::binary | std::ios::trunc), with_similarity_(with_similarity) {
    if (!out_) {
        throw IoError(fmt::format("cannot write shard {}", path.string()));
    }
    out_ << "caption\turl\tnsfw" << (with_similarity_ ? "\tclip_sim" : "") << '\n';
}

void ShardWriter::write(const std::string& caption, const std::string& url, const std::string& nsfw,
                        std::optional<double> similarity) {
    out_ << escape_field(caption) << '\t' << escape_field(url) << '\t' << escape_field(nsfw);
    if (with_similarity_) {
        out_ << '\t';
        if (similarity) {
            out_ << fmt::format("{}", *similarity);
        }
    }
    out_ << '\n';
}

void ShardWriter::close() {
    out_.close();
    if (!out_) {
        throw IoError("shard write failed");
    }
}

}  // namespace genbench::relaionet
