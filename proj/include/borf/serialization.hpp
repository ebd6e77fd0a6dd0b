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

#include <charconv>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "borf/explain.hpp"
#include "borf/linear.hpp"
#include "borf/sparse.hpp"
#include "borf/transform.hpp"
#include "borf/ts_format.hpp"
#include "borf/vocabulary.hpp"

namespace borf {

/// Locale-independent rendering with 17 significant digits; round-trips
/// binary64 exactly.
inline std::string format_real(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

inline double parse_real(std::string_view text, const std::string& what) {
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw std::runtime_error(what + ": bad number '" + std::string(text) + "'");
    }
    return v;
}

enum class SparseFormat { coo_tsv, svmlight };

/// Writes a finalized bag. coo-tsv: a "n h nnz" header line followed by
/// sorted "row<TAB>col<TAB>count" lines. svmlight: one "label col:val ..."
/// line per row with 0-based columns; rows without a supplied label get 0.
/// Output is bit-stable.
inline void write_sparse(const SparseBag& bag, std::ostream& out, SparseFormat format,
                         const std::vector<std::string>& labels = {}) {
    if (format == SparseFormat::coo_tsv) {
        out << bag.rows() << ' ' << bag.cols() << ' ' << bag.nnz() << "\n";
        for (const auto& t : bag.triplets()) {
            out << t.row << '\t' << t.col << '\t' << t.count << "\n";
        }
        return;
    }
    std::size_t k = 0;
    const auto& triplets = bag.triplets();
    for (std::uint32_t r = 0; r < bag.rows(); ++r) {
        out << (r < labels.size() ? labels[r] : "0");
        while (k < triplets.size() && triplets[k].row == r) {
            out << ' ' << triplets[k].col << ':' << triplets[k].count;
            ++k;
        }
        out << "\n";
    }
}

/// Reads a coo-tsv document back into a finalized bag.
inline SparseBag read_sparse(std::istream& in) {
    std::uint32_t rows = 0, cols = 0;
    std::uint64_t nnz = 0;
    if (!(in >> rows >> cols >> nnz)) throw std::runtime_error("sparse file: bad header");
    std::vector<CountTriplet> triplets;
    triplets.reserve(nnz);
    for (std::uint64_t i = 0; i < nnz; ++i) {
        CountTriplet t;
        if (!(in >> t.row >> t.col >> t.count)) {
            throw std::runtime_error("sparse file: truncated at triplet " + std::to_string(i));
        }
        triplets.push_back(t);
    }
    return bag_finalize(rows, cols, std::move(triplets));
}

namespace detail {

inline constexpr std::string_view kModelMagic = "borf-model v1";

class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    std::string next(const std::string& what) {
        std::string line;
        if (!std::getline(in_, line)) {
            throw std::runtime_error("model file: truncated, expected " + what);
        }
        ++line_no_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
    }

    std::size_t line_no() const { return line_no_; }

private:
    std::istream& in_;
    std::size_t line_no_ = 0;
};

inline std::vector<std::string> fields(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

}  // namespace detail

/// Persists the fitted transform and, when present, the linear predictor as
/// one self-describing text document. The vocabulary is stored in column
/// order, so load(save(m)) reproduces transform output byte-for-byte.
inline void save_model(const BorfModel& model, const LinearModel* linear, std::ostream& out) {
    model.require_fitted();
    out << detail::kModelMagic << "\n";
    out << "task " << (model.task() == Task::classification ? "tsc" : "tser") << "\n";
    const BorfConfig& first = model.configs().at(0);
    out << "defaults " << first.alpha_mean << ' ' << first.alpha_slope << ' '
        << format_real(first.beta) << "\n";
    out << "normalization per-signal\n";
    out << "configs " << model.configs().size() << "\n";
    for (const auto& c : model.configs()) {
        out << "config " << c.config_id << ' ' << c.w << ' ' << c.d << ' ' << c.s << ' ' << c.l
            << ' ' << c.alpha_mean << ' ' << c.alpha_slope << ' ' << format_real(c.beta) << "\n";
    }
    out << "vocab " << model.vocabulary().size() << "\n";
    for (const Word& w : model.vocabulary().words()) out << word_key(w) << "\n";
    if (linear != nullptr) {
        out << "linear " << (linear->mode == ModelMode::classification ? "classification" : "regression")
            << ' ' << format_real(linear->lambda) << ' ' << linear->coefficients.size() << "\n";
        for (const auto& cls : linear->classes) out << "class " << cls << "\n";
        for (std::size_t o = 0; o < linear->coefficients.size(); ++o) {
            out << "output " << o << ' ' << format_real(linear->intercepts[o]);
            for (double c : linear->coefficients[o]) out << ' ' << format_real(c);
            out << "\n";
        }
    }
    out << "end\n";
}

struct LoadedModel {
    BorfModel model;
    std::optional<LinearModel> linear;
};

namespace detail {

inline LoadedModel load_model_impl(std::istream& in) {
    detail::LineReader reader(in);
    if (reader.next("version header") != detail::kModelMagic) {
        throw std::runtime_error("model file: unsupported format version");
    }

    const auto task_fields = detail::fields(reader.next("task line"));
    if (task_fields.size() != 2 || task_fields[0] != "task" ||
        (task_fields[1] != "tsc" && task_fields[1] != "tser")) {
        throw std::runtime_error("model file: bad task line");
    }
    const Task task = task_fields[1] == "tsc" ? Task::classification : Task::regression;

    const auto defaults_fields = detail::fields(reader.next("defaults line"));
    if (defaults_fields.size() != 4 || defaults_fields[0] != "defaults") {
        throw std::runtime_error("model file: bad defaults line");
    }
    if (reader.next("normalization line") != "normalization per-signal") {
        throw std::runtime_error("model file: unknown normalization policy");
    }

    const auto configs_fields = detail::fields(reader.next("configs line"));
    if (configs_fields.size() != 2 || configs_fields[0] != "configs") {
        throw std::runtime_error("model file: bad configs line");
    }
    const std::size_t config_count = std::stoul(configs_fields[1]);
    std::vector<BorfConfig> configs;
    configs.reserve(config_count);
    for (std::size_t i = 0; i < config_count; ++i) {
        const auto f = detail::fields(reader.next("config line"));
        if (f.size() != 9 || f[0] != "config") {
            throw std::runtime_error("model file: bad config at line " +
                                     std::to_string(reader.line_no()));
        }
        BorfConfig c;
        c.config_id = static_cast<std::uint32_t>(std::stoul(f[1]));
        c.w = std::stoi(f[2]);
        c.d = std::stoi(f[3]);
        c.s = std::stoi(f[4]);
        c.l = std::stoi(f[5]);
        c.alpha_mean = std::stoi(f[6]);
        c.alpha_slope = std::stoi(f[7]);
        c.beta = parse_real(f[8], "model file config beta");
        c.validate();
        configs.push_back(c);
    }

    const auto vocab_fields = detail::fields(reader.next("vocab line"));
    if (vocab_fields.size() != 2 || vocab_fields[0] != "vocab") {
        throw std::runtime_error("model file: bad vocab line");
    }
    const std::size_t vocab_count = std::stoul(vocab_fields[1]);
    std::vector<Word> words;
    words.reserve(vocab_count);
    for (std::size_t i = 0; i < vocab_count; ++i) {
        const std::string line = reader.next("vocabulary entry");
        try {
            words.push_back(parse_word_key(line));
        } catch (const std::invalid_argument& e) {
            throw std::runtime_error("model file: corrupt vocabulary entry at line " +
                                     std::to_string(reader.line_no()) + ": " + e.what());
        }
    }

    LoadedModel out;
    try {
        out.model = BorfModel(std::move(configs), Vocabulary::from_ordered_words(std::move(words)),
                              task);
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(std::string("model file: ") + e.what());
    }

    std::string line = reader.next("'linear' or 'end'");
    if (line.rfind("linear ", 0) == 0) {
        const auto f = detail::fields(line);
        if (f.size() != 4) throw std::runtime_error("model file: bad linear line");
        LinearModel lm;
        lm.mode = f[1] == "classification" ? ModelMode::classification : ModelMode::regression;
        if (f[1] != "classification" && f[1] != "regression") {
            throw std::runtime_error("model file: bad linear mode '" + f[1] + "'");
        }
        lm.lambda = parse_real(f[2], "model file lambda");
        const std::size_t outputs = std::stoul(f[3]);
        if (lm.mode == ModelMode::classification) {
            for (std::size_t c = 0; c < outputs; ++c) {
                const std::string cls_line = reader.next("class line");
                if (cls_line.rfind("class ", 0) != 0) {
                    throw std::runtime_error("model file: expected class line");
                }
                lm.classes.push_back(cls_line.substr(6));
            }
        }
        lm.coefficients.resize(outputs);
        lm.intercepts.resize(outputs);
        const std::uint32_t h = out.model.vocabulary().size();
        for (std::size_t o = 0; o < outputs; ++o) {
            const auto of = detail::fields(reader.next("output line"));
            if (of.size() != 3 + h || of[0] != "output" || std::stoul(of[1]) != o) {
                throw std::runtime_error("model file: bad output line for output " +
                                         std::to_string(o));
            }
            lm.intercepts[o] = parse_real(of[2], "model file intercept");
            lm.coefficients[o].resize(h);
            for (std::uint32_t j = 0; j < h; ++j) {
                lm.coefficients[o][j] = parse_real(of[3 + j], "model file coefficient");
            }
        }
        out.linear = std::move(lm);
        line = reader.next("'end'");
    }
    if (line != "end") throw std::runtime_error("model file: missing end marker");
    return out;
}

}  // namespace detail

inline LoadedModel load_model(std::istream& in) {
    try {
        return detail::load_model_impl(in);
    } catch (const std::logic_error& e) {
        // malformed numeric fields and config validation surface uniformly
        throw std::runtime_error(std::string("model file: ") + e.what());
    }
}

/// Writes the saliency document: per-signal score arrays aligned to
/// timesteps, the applied scale factor, the degenerate-mass flag and the
/// residual importances of not-contained words.
inline void write_saliency(const Explanation& explanation, const BorfModel& model,
                           std::ostream& out) {
    out << "borf-saliency v1\n";
    out << "signals " << explanation.saliency.scores.size() << "\n";
    out << "scale " << format_real(explanation.saliency.scale) << "\n";
    out << "degenerate " << (explanation.saliency.degenerate ? 1 : 0) << "\n";
    for (std::size_t k = 0; k < explanation.saliency.scores.size(); ++k) {
        const auto& sig = explanation.saliency.scores[k];
        out << "signal " << k << ' ' << sig.size();
        for (double v : sig) out << ' ' << format_real(v);
        out << "\n";
    }
    out << "residual " << explanation.residual.size() << "\n";
    for (const auto& [col, phi] : explanation.residual) {
        out << word_key(model.vocabulary().word(col)) << ' ' << format_real(phi) << "\n";
    }
    out << "end\n";
}

/// Reads an external importance vector keyed by word keys: one
/// "<word-key> <value>" pair per line. Absent words default to zero; keys
/// outside the vocabulary are an error.
inline Attribution read_attribution(std::istream& in, const BorfModel& model) {
    Attribution attr;
    attr.source = "external";
    attr.phi.assign(model.vocabulary().size(), 0.0);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const std::size_t space = line.find(' ');
        if (space == std::string::npos) {
            throw ParseError(line_no, "expected '<word-key> <value>'");
        }
        Word w;
        try {
            w = parse_word_key(std::string_view(line).substr(0, space));
        } catch (const std::invalid_argument& e) {
            throw ParseError(line_no, e.what());
        }
        const auto col = model.vocabulary().lookup(w);
        if (!col) throw ParseError(line_no, "word '" + line.substr(0, space) + "' not in vocabulary");
        attr.phi[*col] = parse_real(std::string_view(line).substr(space + 1), "importance value");
    }
    return attr;
}

}  // namespace borf
