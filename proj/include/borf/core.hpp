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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace borf {

/// Marker for a missing observation. IEEE NaN semantics: propagates in
/// arithmetic and never compares equal to itself.
inline double missing_value() { return std::numeric_limits<double>::quiet_NaN(); }

inline bool is_missing(double x) { return std::isnan(x); }

/// A signal is a sequence of real-or-missing observations sampled at equal
/// time intervals. The implicit timestep vector is [1..m].
struct Signal {
    std::vector<double> values;

    Signal() = default;
    explicit Signal(std::vector<double> v) : values(std::move(v)) {}

    std::size_t length() const { return values.size(); }
};

/// One time series: k >= 1 signals (channels), possibly of differing lengths.
struct TimeSeries {
    std::vector<Signal> signals;

    TimeSeries() = default;
    explicit TimeSeries(std::vector<Signal> s) : signals(std::move(s)) {}

    std::size_t signal_count() const { return signals.size(); }
};

/// A ragged panel of time series with optional per-series targets.
/// Labels are kept as raw text: classification keeps them verbatim,
/// regression parses them downstream.
struct TimeSeriesDataset {
    std::vector<TimeSeries> series;
    std::vector<std::string> labels;  // empty when the dataset is unlabeled

    std::size_t size() const { return series.size(); }
    bool has_labels() const { return !labels.empty(); }

    void validate() const {
        if (has_labels() && labels.size() != series.size()) {
            throw std::invalid_argument("dataset: expected one label per series, got " +
                                        std::to_string(labels.size()) + " labels for " +
                                        std::to_string(series.size()) + " series");
        }
        for (const auto& ts : series) {
            for (const auto& sig : ts.signals) {
                for (double v : sig.values) {
                    if (std::isinf(v)) {
                        throw std::invalid_argument("dataset: infinite observation");
                    }
                }
            }
        }
    }

    /// Longest signal length over the whole panel (0 when empty).
    std::size_t max_signal_length() const {
        std::size_t m = 0;
        for (const auto& ts : series) {
            for (const auto& sig : ts.signals) {
                m = std::max(m, sig.length());
            }
        }
        return m;
    }
};

/// Complete-case population statistics of a range of real-or-missing values.
/// mean/stddev are NaN when no valid observation exists.
struct CompleteCaseStats {
    double mean = std::numeric_limits<double>::quiet_NaN();
    double stddev = std::numeric_limits<double>::quiet_NaN();
    std::size_t valid_count = 0;
};

/// Two-pass mean/population-std over the non-missing entries, accumulated in
/// ascending index order so results are bit-stable.
inline CompleteCaseStats complete_case_stats(const std::vector<double>& values) {
    CompleteCaseStats st;
    double sum = 0.0;
    for (double v : values) {
        if (!is_missing(v)) {
            sum += v;
            ++st.valid_count;
        }
    }
    if (st.valid_count == 0) return st;
    st.mean = sum / static_cast<double>(st.valid_count);
    double ss = 0.0;
    for (double v : values) {
        if (!is_missing(v)) {
            const double dev = v - st.mean;
            ss += dev * dev;
        }
    }
    st.stddev = std::sqrt(ss / static_cast<double>(st.valid_count));
    return st;
}

}  // namespace borf
