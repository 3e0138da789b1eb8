#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace genbench::relaionet {

struct Synset {
    std::string wnid;  ///< n########
    std::string name;
    std::vector<std::string> lemmas;
    std::string definition;
    int class_index = 0;  ///< 0..999

    void validate() const;
};

bool is_valid_wnid(std::string_view wnid);

/// synsets.json: [{wnid, name, lemmas, definition, class_index}]. Rejects duplicate
/// wnids and duplicate class indices.
std::vector<Synset> synsets_from_json(const nlohmann::json& j);
std::vector<Synset> load_synsets(const std::filesystem::path& path);
nlohmann::json synsets_to_json(const std::vector<Synset>& synsets);

/// Lowercase, '_' to ' ', trim, collapse whitespace runs. Idempotent.
std::string normalize_lemma(std::string_view s);

/// "{name} which is {definition}"; InvalidInput on an empty field.
std::string synset_prompt(const Synset& s);

/// Normalized lemma -> wnid for lemmas owned by exactly one synset. Lemmas
/// shared by two or more synsets are listed in `excluded` and never match.
class LemmaIndex {
public:
    LemmaIndex() = default;

    const std::unordered_map<std::string, std::string>& mapped() const noexcept { return mapped_; }
    const std::set<std::string>& excluded() const noexcept { return excluded_; }
    std::size_t max_lemma_length() const noexcept { return max_length_; }

    const std::string* find(std::string_view normalized) const;

private:
    friend LemmaIndex build_lemma_index(const std::vector<Synset>& synsets);
    std::unordered_map<std::string, std::string> mapped_;
    std::set<std::string> excluded_;
    std::size_t max_length_ = 0;
};

LemmaIndex build_lemma_index(const std::vector<Synset>& synsets);

enum class MatchKind { None, Single, Multi };

struct MatchResult {
    MatchKind kind = MatchKind::None;
    std::string wnid;  ///< set for Single

    friend bool operator==(const MatchResult&, const MatchResult&) = default;
};

/// Normalizes the caption and finds every mapped lemma whose text occurs at word
/// boundaries (no letter or digit directly on either side). One distinct wnid
/// is a match; two or more is Multi.
MatchResult match_caption(std::string_view caption, const LemmaIndex& index);

}  // namespace genbench::relaionet
