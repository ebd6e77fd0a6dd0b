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
#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "borf/core.hpp"

namespace borf {

/// Parse failure with the 1-based line it was detected on.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Header of the community .ts interchange format.
struct TsHeader {
    std::string problem_name;
    std::optional<bool> univariate;
    std::optional<int> dimensions;
    std::optional<bool> equal_length;
    std::optional<int> series_length;
    std::optional<bool> missing;
    bool has_class_labels = false;
    std::vector<std::string> class_labels;
    bool has_target_label = false;

    bool labeled() const { return has_class_labels || has_target_label; }
};

struct TsFile {
    TsHeader header;
    TimeSeriesDataset dataset;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

inline std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

inline bool parse_bool(std::string_view token, std::size_t line) {
    const std::string t = lower(trim(token));
    if (t == "true") return true;
    if (t == "false") return false;
    throw ParseError(line, "expected true/false, got '" + std::string(token) + "'");
}

inline int parse_int(std::string_view token, std::size_t line) {
    const std::string_view t = trim(token);
    int v = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc{} || res.ptr != t.data() + t.size()) {
        throw ParseError(line, "expected an integer, got '" + std::string(token) + "'");
    }
    return v;
}

inline double parse_observation(std::string_view token, std::size_t line) {
    const std::string_view t = trim(token);
    if (t == "?") return missing_value();
    double v = 0.0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v, std::chars_format::general);
    if (res.ec != std::errc{} || res.ptr != t.data() + t.size() || !std::isfinite(v)) {
        throw ParseError(line, "bad observation '" + std::string(token) + "' (expected a number or '?')");
    }
    return v;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t begin = 0;
    while (true) {
        const std::size_t pos = s.find(sep, begin);
        if (pos == std::string_view::npos) {
            parts.push_back(s.substr(begin));
            return parts;
        }
        parts.push_back(s.substr(begin, pos - begin));
        begin = pos + 1;
    }
}

}  // namespace detail

/// Parses the .ts dataset text format: '@' header directives, '@data', then
/// one series per line with ':'-separated signals, ','-separated
/// observations, '?' for missing and the trailing token as label/target when
/// labels are declared. Errors carry the offending line number.
inline TsFile parse_ts(std::istream& in) {
    TsFile out;
    TsHeader& header = out.header;
    std::string raw;
    std::size_t line_no = 0;
    bool in_data = false;
    std::optional<std::size_t> expected_dims;
    std::set<std::string> declared_labels;

    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = detail::trim(raw);
        if (line.empty() || line.front() == '#') continue;

        if (!in_data && line.front() == '@') {
            const std::size_t space = line.find_first_of(" \t");
            const std::string key = detail::lower(line.substr(1, space == std::string_view::npos
                                                                     ? std::string_view::npos
                                                                     : space - 1));
            const std::string_view rest =
                space == std::string_view::npos ? std::string_view{} : detail::trim(line.substr(space + 1));

            if (key == "data") {
                if (!rest.empty()) throw ParseError(line_no, "@data takes no arguments");
                in_data = true;
                if (header.has_class_labels && header.has_target_label) {
                    throw ParseError(line_no, "@classLabel and @targetlabel are mutually exclusive");
                }
                continue;
            }
            if (key == "problemname") {
                header.problem_name = std::string(rest);
            } else if (key == "timestamps") {
                if (detail::parse_bool(rest, line_no)) {
                    throw ParseError(line_no, "timestamped series are not supported");
                }
            } else if (key == "missing") {
                header.missing = detail::parse_bool(rest, line_no);
            } else if (key == "univariate") {
                header.univariate = detail::parse_bool(rest, line_no);
            } else if (key == "dimension" || key == "dimensions") {
                header.dimensions = detail::parse_int(rest, line_no);
                if (*header.dimensions < 1) throw ParseError(line_no, "dimension count must be >= 1");
            } else if (key == "equallength") {
                header.equal_length = detail::parse_bool(rest, line_no);
            } else if (key == "serieslength") {
                header.series_length = detail::parse_int(rest, line_no);
                if (*header.series_length < 0) throw ParseError(line_no, "series length must be >= 0");
            } else if (key == "classlabel") {
                const auto tokens = detail::split(rest, ' ');
                if (tokens.empty() || detail::trim(tokens[0]).empty()) {
                    throw ParseError(line_no, "@classLabel needs true/false");
                }
                header.has_class_labels = detail::parse_bool(tokens[0], line_no);
                for (std::size_t i = 1; i < tokens.size(); ++i) {
                    const std::string_view t = detail::trim(tokens[i]);
                    if (t.empty()) continue;
                    header.class_labels.emplace_back(t);
                    declared_labels.emplace(t);
                }
                if (header.has_class_labels && header.class_labels.empty()) {
                    throw ParseError(line_no, "@classLabel true requires the label list");
                }
            } else if (key == "targetlabel") {
                header.has_target_label = detail::parse_bool(rest, line_no);
            } else {
                throw ParseError(line_no, "unknown header key '@" + key + "'");
            }
            continue;
        }

        if (!in_data) {
            throw ParseError(line_no, "data before @data directive");
        }

        // One series per line.
        auto segments = detail::split(line, ':');
        std::string label;
        if (header.labeled()) {
            if (segments.size() < 2) {
                throw ParseError(line_no, "expected ':' separated signals followed by the label");
            }
            label = std::string(detail::trim(segments.back()));
            if (label.empty()) throw ParseError(line_no, "empty label");
            segments.pop_back();
            if (header.has_class_labels && !declared_labels.contains(label)) {
                throw ParseError(line_no, "label '" + label + "' not declared in @classLabel");
            }
        }

        if (expected_dims && segments.size() != *expected_dims) {
            throw ParseError(line_no, "expected " + std::to_string(*expected_dims) +
                                          " signals, got " + std::to_string(segments.size()));
        }
        if (header.dimensions && segments.size() != static_cast<std::size_t>(*header.dimensions)) {
            throw ParseError(line_no, "expected " + std::to_string(*header.dimensions) +
                                          " signals per @dimensions, got " +
                                          std::to_string(segments.size()));
        }
        if (header.univariate && *header.univariate && segments.size() != 1) {
            throw ParseError(line_no, "dataset declared univariate but line has " +
                                          std::to_string(segments.size()) + " signals");
        }
        expected_dims = segments.size();

        TimeSeries ts;
        for (const std::string_view seg : segments) {
            Signal sig;
            if (!detail::trim(seg).empty()) {
                for (const std::string_view tok : detail::split(seg, ',')) {
                    sig.values.push_back(detail::parse_observation(tok, line_no));
                }
            }
            if (header.equal_length && *header.equal_length) {
                const std::size_t want = header.series_length
                                             ? static_cast<std::size_t>(*header.series_length)
                                             : sig.values.size();
                if (header.series_length && sig.values.size() != want) {
                    throw ParseError(line_no, "signal length " + std::to_string(sig.values.size()) +
                                                  " != declared @seriesLength " + std::to_string(want));
                }
            }
            ts.signals.push_back(std::move(sig));
        }
        out.dataset.series.push_back(std::move(ts));
        if (header.labeled()) out.dataset.labels.push_back(std::move(label));
    }

    if (!in_data) throw ParseError(line_no == 0 ? 1 : line_no, "missing @data directive");

    // Ragged data under a declared equal length is rejected even without
    // @seriesLength.
    if (header.equal_length && *header.equal_length) {
        std::optional<std::size_t> want;
        if (header.series_length) want = static_cast<std::size_t>(*header.series_length);
        for (const auto& ts : out.dataset.series) {
            for (const auto& sig : ts.signals) {
                if (!want) want = sig.length();
                if (sig.length() != *want) {
                    throw ParseError(line_no, "ragged signal lengths under @equalLength true");
                }
            }
        }
    }
    out.dataset.validate();
    return out;
}

/// Shortest-round-trip decimal rendering of one observation.
inline std::string format_observation(double v) {
    if (is_missing(v)) return "?";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

/// Serializes a dataset in the .ts format. All series must have the same
/// signal count. The written document parses back to an identical dataset.
inline void write_ts(const TimeSeriesDataset& dataset, const std::string& problem_name,
                     bool regression_targets, std::ostream& out) {
    dataset.validate();
    std::size_t dims = dataset.size() == 0 ? 1 : dataset.series[0].signal_count();
    bool any_missing = false;
    bool equal = true;
    std::optional<std::size_t> m;
    for (const auto& ts : dataset.series) {
        if (ts.signal_count() != dims) {
            throw std::invalid_argument("write_ts: all series must have the same signal count");
        }
        for (const auto& sig : ts.signals) {
            if (!m) m = sig.length();
            if (sig.length() != *m) equal = false;
            for (double v : sig.values) any_missing = any_missing || is_missing(v);
        }
    }

    out << "@problemName " << problem_name << "\n";
    out << "@timeStamps false\n";
    out << "@missing " << (any_missing ? "true" : "false") << "\n";
    out << "@univariate " << (dims == 1 ? "true" : "false") << "\n";
    out << "@dimensions " << dims << "\n";
    out << "@equalLength " << (equal ? "true" : "false") << "\n";
    if (equal && m) out << "@seriesLength " << *m << "\n";
    if (dataset.has_labels() && !regression_targets) {
        const std::set<std::string> distinct(dataset.labels.begin(), dataset.labels.end());
        out << "@classLabel true";
        for (const auto& c : distinct) out << ' ' << c;
        out << "\n";
    } else if (dataset.has_labels()) {
        out << "@targetlabel true\n";
    } else {
        out << "@classLabel false\n";
    }
    out << "@data\n";
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const TimeSeries& ts = dataset.series[i];
        for (std::size_t k = 0; k < ts.signal_count(); ++k) {
            if (k > 0) out << ':';
            const auto& vals = ts.signals[k].values;
            for (std::size_t j = 0; j < vals.size(); ++j) {
                if (j > 0) out << ',';
                out << format_observation(vals[j]);
            }
        }
        if (dataset.has_labels()) out << ':' << dataset.labels[i];
        out << "\n";
    }
}

}  // namespace borf
