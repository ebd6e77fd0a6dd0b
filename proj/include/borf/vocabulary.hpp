/*
 * Copyright 2026 The borf-cpp authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "borf/approximation.hpp"

namespace borf {

/// Canonical textual key of a word: "c<config>:s<signal>:" followed by the
/// symbol tokens "<mean>.<slope>" (or "NA"), joined by '-'. Injective over
/// (config, signal, symbols).
inline std::string word_key(std::uint32_t config_id, std::uint32_t signal_id,
                            const std::vector<SymbolPair>& symbols) {
    std::string key = "c" + std::to_string(config_id) + ":s" + std::to_string(signal_id) + ":";
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        if (i > 0) key += '-';
        if (symbols[i].is_na()) {
            key += "NA";
        } else {
            key += std::to_string(symbols[i].mean_sym);
            key += '.';
            key += std::to_string(symbols[i].slope_sym);
        }
    }
    return key;
}

inline std::string word_key(const Word& w) { return word_key(w.config_id, w.signal_id, w.symbols); }

namespace detail {

inline bool parse_u32(std::string_view text, std::uint32_t& out) {
    const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
    return res.ec == std::errc{} && res.ptr == text.data() + text.size();
}

inline bool parse_i16(std::string_view text, std::int16_t& out) {
    const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
    return res.ec == std::errc{} && res.ptr == text.data() + text.size();
}

}  // namespace detail

/// Parses a canonical word key back into a word. Throws on any malformed
/// key rather than skipping it.
inline Word parse_word_key(std::string_view key) {
    const auto fail = [&]() -> Word {
        throw std::invalid_argument("malformed word key: '" + std::string(key) + "'");
    };
    if (key.size() < 2 || key[0] != 'c') return fail();
    const std::size_t colon1 = key.find(':');
    if (colon1 == std::string_view::npos) return fail();
    const std::size_t colon2 = key.find(':', colon1 + 1);
    if (colon2 == std::string_view::npos || key[colon1 + 1] != 's') return fail();

    Word w;
    if (!detail::parse_u32(key.substr(1, colon1 - 1), w.config_id)) return fail();
    if (!detail::parse_u32(key.substr(colon1 + 2, colon2 - colon1 - 2), w.signal_id)) return fail();

    std::string_view rest = key.substr(colon2 + 1);
    if (rest.empty()) return fail();
    while (!rest.empty()) {
        const std::size_t dash = rest.find('-');
        const std::string_view token = rest.substr(0, dash);
        if (token == "NA") {
            w.symbols.push_back(SymbolPair::na());
        } else {
            const std::size_t dot = token.find('.');
            if (dot == std::string_view::npos) return fail();
            SymbolPair sym;
            if (!detail::parse_i16(token.substr(0, dot), sym.mean_sym)) return fail();
            if (!detail::parse_i16(token.substr(dot + 1), sym.slope_sym)) return fail();
            if (sym.mean_sym < 0 || sym.slope_sym < 0) return fail();
            w.symbols.push_back(sym);
        }
        if (dash == std::string_view::npos) break;
        rest = rest.substr(dash + 1);
        if (rest.empty()) return fail();  // trailing '-'
    }
    return w;
}

/// The frozen word -> column map of a fitted model. Columns are assigned in
/// the lexicographic order of (config id, signal id, symbol sequence), so
/// two fits on the same data produce identical maps and columns partition
/// into contiguous per-configuration ranges.
class Vocabulary {
public:
    Vocabulary() = default;

    /// Builds from the distinct words seen at fit time.
    static Vocabulary from_words(std::vector<Word> words) {
        std::sort(words.begin(), words.end());
        for (std::size_t i = 1; i < words.size(); ++i) {
            if (words[i] == words[i - 1]) {
                throw std::invalid_argument("vocabulary: duplicate word '" + word_key(words[i]) + "'");
            }
        }
        Vocabulary v;
        v.words_ = std::move(words);
        v.rebuild_index();
        return v;
    }

    /// Restores a persisted vocabulary; the stored order is the column order
    /// and must already be sorted and duplicate-free.
    static Vocabulary from_ordered_words(std::vector<Word> words) {
        for (std::size_t i = 1; i < words.size(); ++i) {
            if (!(words[i - 1] < words[i])) {
                throw std::invalid_argument("vocabulary: words out of order at column " +
                                            std::to_string(i));
            }
        }
        Vocabulary v;
        v.words_ = std::move(words);
        v.rebuild_index();
        return v;
    }

    std::uint32_t size() const { return static_cast<std::uint32_t>(words_.size()); }

    const Word& word(std::uint32_t col) const { return words_.at(col); }
    const std::vector<Word>& words() const { return words_; }

    std::optional<std::uint32_t> lookup(const Word& w) const {
        const auto it = index_.find(w);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    /// Half-open column range [first, last) of one configuration.
    std::pair<std::uint32_t, std::uint32_t> config_range(std::uint32_t config_id) const {
        const auto lo = std::lower_bound(words_.begin(), words_.end(), config_id,
                                         [](const Word& w, std::uint32_t id) { return w.config_id < id; });
        const auto hi = std::upper_bound(words_.begin(), words_.end(), config_id,
                                         [](std::uint32_t id, const Word& w) { return id < w.config_id; });
        return {static_cast<std::uint32_t>(lo - words_.begin()),
                static_cast<std::uint32_t>(hi - words_.begin())};
    }

    friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.words_ == b.words_; }

private:
    void rebuild_index() {
        index_.clear();
        index_.reserve(words_.size());
        for (std::uint32_t i = 0; i < words_.size(); ++i) index_.emplace(words_[i], i);
    }

    std::vector<Word> words_;
    std::unordered_map<Word, std::uint32_t, WordHash> index_;
};

}  // namespace borf
