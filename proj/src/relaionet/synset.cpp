#include "genbench/relaionet/synset.hpp"

#include <cctype>
#include <map>

#include <fmt/format.h>

#include "genbench/util/error.hpp"
#include "genbench/util/files.hpp"

namespace genbench::relaionet {
namespace {

bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

bool is_space(char c) {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
}

}  // namespace

bool is_valid_wnid(std::string_view wnid) {
    if (wnid.size() != 9 || wnid[0] != 'n') {
        return false;
    }
    for (std::size_t i = 1; i < 9; ++i) {
        if (wnid[i] < '0' || wnid[i] > '9') {
            return false;
        }
    }
    return true;
}

void Synset::validate() const {
    if (!is_valid_wnid(wnid)) {
        throw InvalidInput(fmt::format("synset: invalid wnid '{}'", wnid));
    }
    if (lemmas.empty()) {
        throw InvalidInput(fmt::format("synset {}: no lemmas", wnid));
    }
    if (class_index < 0 || class_index > 999) {
        throw InvalidInput(fmt::format("synset {}: class_index {} outside [0, 999]", wnid, class_index));
    }
}

std::vector<Synset> synsets_from_json(const nlohmann::json& j) {
    if (!j.is_array()) {
        throw InvalidInput("synsets: expected a JSON array");
    }
    std::vector<Synset> out;
    std::map<std::string, int> wnids;
    std::map<int, std::string> indices;
    for (const auto& item : j) {
        Synset s;
        try {
            s.wnid = item.at("wnid").get<std::string>();
            s.name = item.at("name").get<std::string>();
            s.lemmas = item.at("lemmas").get<std::vector<std::string>>();
            s.definition = item.value("definition", std::string());
            s.class_index = item.at("class_index").get<int>();
        } catch (const nlohmann::json::exception& e) {
            throw InvalidInput(fmt::format("synsets: {}", e.what()));
        }
        s.validate();
        if (!wnids.emplace(s.wnid, s.class_index).second) {
            throw InvalidInput(fmt::format("synsets: duplicate wnid {}", s.wnid));
        }
        if (!indices.emplace(s.class_index, s.wnid).second) {
            throw InvalidInput(fmt::format("synsets: class_index {} used by {} and {}", s.class_index,
                                           indices.at(s.class_index), s.wnid));
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<Synset> load_synsets(const std::filesystem::path& path) {
    return synsets_from_json(util::read_json(path));
}

nlohmann::json synsets_to_json(const std::vector<Synset>& synsets) {
    auto j = nlohmann::json::array();
    for (const auto& s : synsets) {
        j.push_back({{"wnid", s.wnid},
                     {"name", s.name},
                     {"lemmas", s.lemmas},
                     {"definition", s.definition},
                     {"class_index", s.class_index}});
    }
    return j;
}

std::string normalize_lemma(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (char c : s) {
        if (c == '_' || is_space(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out += ' ';
            pending_space = false;
        }
        out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

std::string synset_prompt(const Synset& s) {
    if (s.name.empty() || s.definition.empty()) {
        throw InvalidInput(fmt::format("synset {}: name and definition must be nonempty", s.wnid));
    }
    return s.name + " which is " + s.definition;
}

const std::string* LemmaIndex::find(std::string_view normalized) const {
    const auto it = mapped_.find(std::string(normalized));
    return it == mapped_.end() ? nullptr : &it->second;
}

LemmaIndex build_lemma_index(const std::vector<Synset>& synsets) {
    std::map<std::string, std::set<std::string>> owners;
    std::set<std::string> wnids;
    for (const auto& s : synsets) {
        if (!wnids.insert(s.wnid).second) {
            throw InvalidInput(fmt::format("lemma index: duplicate wnid {}", s.wnid));
        }
        for (const auto& lemma : s.lemmas) {
            auto norm = normalize_lemma(lemma);
            if (!norm.empty()) {
                owners[norm].insert(s.wnid);
            }
        }
    }
    LemmaIndex index;
    for (auto& [lemma, who] : owners) {
        if (who.size() == 1) {
            index.max_length_ = std::max(index.max_length_, lemma.size());
            index.mapped_.emplace(lemma, *who.begin());
        } else {
            index.excluded_.insert(lemma);
        }
    }
    return index;
}

MatchResult match_caption(std::string_view caption, const LemmaIndex& index) {
    const auto text = normalize_lemma(caption);
    const auto n = text.size();
    // Boundary positions: no word character on both sides.
    std::vector<std::size_t> bounds;
    for (std::size_t p = 0; p <= n; ++p) {
        if (p == 0 || p == n || !(is_word_char(text[p - 1]) && is_word_char(text[p]))) {
            bounds.push_back(p);
        }
    }
    MatchResult result;
    const auto limit = index.max_lemma_length();
    for (std::size_t a = 0; a < bounds.size(); ++a) {
        const auto begin = bounds[a];
        for (std::size_t b = a + 1; b < bounds.size() && bounds[b] - begin <= limit; ++b) {
            const auto* wnid = index.find(std::string_view(text).substr(begin, bounds[b] - begin));
            if (!wnid) {
                continue;
            }
            if (result.kind == MatchKind::None) {
                result = {MatchKind::Single, *wnid};
            } else if (result.wnid != *wnid) {
                return {MatchKind::Multi, {}};
            }
        }
    }
    return result;
}

}  // namespace genbench::relaionet
