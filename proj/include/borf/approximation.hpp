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
#include <cmath>
#include <compare>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "borf/core.hpp"
#include "borf/normal.hpp"
#include "borf/windowing.hpp"

namespace borf {

/// Inputs of the thresholded standardization: the std threshold beta and the
/// full-signal complete-case population std (NaN when the signal has no
/// valid observation).
struct NormalizationParams {
    double beta = 0.0;
    double sigma_x = 0.0;
};

/// Complete-case mean/slope of one segment. mean/slope are NaN iff the
/// segment has no valid observation; a single valid observation fixes the
/// slope to zero.
struct SegmentSummary {
    double mean = std::numeric_limits<double>::quiet_NaN();
    double slope = std::numeric_limits<double>::quiet_NaN();
    std::size_t valid_count = 0;
};

/// One entry of a symbolic word: a (mean, slope) symbol pair, or the
/// dedicated NaN symbol for segments without valid observations.
struct SymbolPair {
    std::int16_t mean_sym = -1;
    std::int16_t slope_sym = -1;

    bool is_na() const { return mean_sym < 0; }

    static SymbolPair na() { return SymbolPair{-1, -1}; }

    friend bool operator==(const SymbolPair&, const SymbolPair&) = default;

    // NaN entries order after all regular symbols.
    friend std::strong_ordering operator<=>(const SymbolPair& a, const SymbolPair& b) {
        if (a.is_na() != b.is_na()) return a.is_na() <=> b.is_na();
        if (a.mean_sym != b.mean_sym) return a.mean_sym <=> b.mean_sym;
        return a.slope_sym <=> b.slope_sym;
    }
};

/// A symbolic word: (configuration id, signal id) prefix plus l symbol
/// entries. Words from different configurations or signals are distinct
/// patterns even when their symbol sequences coincide.
struct Word {
    std::uint32_t config_id = 0;
    std::uint32_t signal_id = 0;
    std::vector<SymbolPair> symbols;

    friend bool operator==(const Word&, const Word&) = default;

    friend bool operator<(const Word& a, const Word& b) {
        if (a.config_id != b.config_id) return a.config_id < b.config_id;
        if (a.signal_id != b.signal_id) return a.signal_id < b.signal_id;
        return std::lexicographical_compare(a.symbols.begin(), a.symbols.end(),
                                            b.symbols.begin(), b.symbols.end());
    }
};

struct WordHash {
    std::size_t operator()(const Word& w) const {
        // FNV-1a over the prefix and symbol codes.
        std::uint64_t h = 1469598103934665603ull;
        auto mix = [&h](std::uint64_t v) {
            for (int i = 0; i < 8; ++i) {
                h ^= (v >> (8 * i)) & 0xff;
                h *= 1099511628211ull;
            }
        };
        mix(w.config_id);
        mix(w.signal_id);
        for (const auto& s : w.symbols) {
            mix((static_cast<std::uint64_t>(static_cast<std::uint16_t>(s.mean_sym)) << 16) |
                static_cast<std::uint16_t>(s.slope_sym));
        }
        return static_cast<std::size_t>(h);
    }
};

/// Quantile breakpoints of N(0, sigma^2): the k/alpha quantiles for
/// k = 1..alpha-1, symmetric about zero by construction. alpha = 1 yields an
/// empty list (a single unbounded bin).
inline std::vector<double> gaussian_breakpoints(int alpha, double sigma) {
    if (alpha < 1) throw std::invalid_argument("gaussian_breakpoints: alphabet size must be >= 1");
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_breakpoints: sigma must be > 0");
    std::vector<double> bp(static_cast<std::size_t>(alpha - 1));
    for (int k = 1; k < alpha; ++k) {
        if (2 * k < alpha) {
            bp[static_cast<std::size_t>(k - 1)] =
                sigma * inverse_normal_cdf(static_cast<double>(k) / alpha);
        } else if (2 * k == alpha) {
            bp[static_cast<std::size_t>(k - 1)] = 0.0;
        } else {
            bp[static_cast<std::size_t>(k - 1)] = -bp[static_cast<std::size_t>(alpha - k - 1)];
        }
    }
    return bp;
}

/// Mean and slope alphabets of one (w, d) configuration. Mean breakpoints
/// come from N(0,1); slope breakpoints from N(0, 0.03/(w*d)), the 1d-sax
/// slope scale over the dilation-adjusted time span.
struct AlphabetSpec {
    int alpha_mean = 2;
    int alpha_slope = 1;
    std::vector<double> mean_breakpoints;
    std::vector<double> slope_breakpoints;

    static AlphabetSpec make(int alpha_mean, int alpha_slope, int w, int d) {
        if (alpha_mean < 2) throw std::invalid_argument("alphabet: mean alphabet size must be >= 2");
        if (alpha_slope < 1) throw std::invalid_argument("alphabet: slope alphabet size must be >= 1");
        AlphabetSpec spec;
        spec.alpha_mean = alpha_mean;
        spec.alpha_slope = alpha_slope;
        spec.mean_breakpoints = gaussian_breakpoints(alpha_mean, 1.0);
        const double sigma = std::sqrt(0.03 / (static_cast<double>(w) * d));
        spec.slope_breakpoints = gaussian_breakpoints(alpha_slope, sigma);
        return spec;
    }

    /// Total alphabet size including the NaN symbol.
    int total_symbols() const { return alpha_mean * alpha_slope + 1; }
};

/// Thresholded standardization of one receptive field.
///
/// Complete-case population mean/std are computed over the valid values. A
/// field standardizes only when sigma_x > 0, sigma_a > 0 and
/// sigma_a / sigma_x >= beta; otherwise the field is treated as constant and
/// all valid values become exactly zero. Missing values stay missing; an
/// all-missing field is returned unchanged.
inline ReceptiveField normalize(const ReceptiveField& field, const NormalizationParams& params) {
    ReceptiveField out = field;
    const CompleteCaseStats st = complete_case_stats(field.values);
    if (st.valid_count == 0) return out;

    const bool standardize = !is_missing(params.sigma_x) && params.sigma_x > 0.0 &&
                             st.stddev > 0.0 && st.stddev / params.sigma_x >= params.beta;
    for (double& v : out.values) {
        if (is_missing(v)) continue;
        v = standardize ? (v - st.mean) / st.stddev : 0.0;
    }
    return out;
}

/// 0-based segment boundaries b_k = floor(k*w / l) for k = 0..l. Segment k
/// covers [b_k, b_{k+1}); the segments partition [0, w) with sizes differing
/// by at most one.
inline std::vector<int> segment_edges(int w, int l) {
    if (l < 1 || l > w) {
        throw std::invalid_argument("segment_edges: word length " + std::to_string(l) +
                                    " invalid for window length " + std::to_string(w));
    }
    std::vector<int> edges(static_cast<std::size_t>(l) + 1);
    for (int k = 0; k <= l; ++k) {
        edges[static_cast<std::size_t>(k)] =
            static_cast<int>((static_cast<std::int64_t>(k) * w) / l);
    }
    return edges;
}

/// Complete-case PLA of one segment: mean over valid values and the
/// least-squares slope over the valid (timestep, value) pairs. With exactly
/// one valid pair the slope is zero; with none, mean and slope are NaN.
inline SegmentSummary pla_segment(std::span<const double> values,
                                  std::span<const double> timesteps) {
    if (values.size() != timesteps.size() || values.empty()) {
        throw std::invalid_argument("pla_segment: values and timesteps must have equal length >= 1");
    }
    SegmentSummary out;
    double vsum = 0.0, tsum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (is_missing(values[i])) continue;
        vsum += values[i];
        tsum += timesteps[i];
        ++out.valid_count;
    }
    if (out.valid_count == 0) return out;
    out.mean = vsum / static_cast<double>(out.valid_count);
    if (out.valid_count == 1) {
        out.slope = 0.0;
        return out;
    }
    const double tmean = tsum / static_cast<double>(out.valid_count);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (is_missing(values[i])) continue;
        const double dt = timesteps[i] - tmean;
        num += dt * (values[i] - out.mean);
        den += dt * dt;
    }
    if (den == 0.0) {
        throw std::logic_error("pla_segment: degenerate timesteps (all valid timesteps identical)");
    }
    out.slope = num / den;
    return out;
}

/// Symbol index of a value against sorted breakpoints: the count of
/// breakpoints <= value, so ties land in the upper bin. Missing values map
/// to the NaN symbol (-1).
inline int quantize(double value, std::span<const double> breakpoints) {
    if (is_missing(value)) return -1;
    const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), value);
    return static_cast<int>(it - breakpoints.begin());
}

/// Discretizes a normalized receptive field into a symbolic word via
/// NaN-tolerant 1d-sax: l segments, complete-case (mean, slope) per segment
/// against the covered (dilated) timesteps, both quantized. A segment with
/// no valid observation becomes the NaN symbol. With a slope alphabet of
/// size one and dilation one this reduces to plain sax.
inline Word approximate(const ReceptiveField& field, int l, const AlphabetSpec& alphabet,
                        std::uint32_t config_id, std::uint32_t signal_id) {
    const int w = field.width();
    const std::vector<int> edges = segment_edges(w, l);
    const std::vector<double> timesteps = field.covered_timesteps();

    Word word;
    word.config_id = config_id;
    word.signal_id = signal_id;
    word.symbols.reserve(static_cast<std::size_t>(l));
    for (int k = 0; k < l; ++k) {
        const std::size_t b = static_cast<std::size_t>(edges[static_cast<std::size_t>(k)]);
        const std::size_t e = static_cast<std::size_t>(edges[static_cast<std::size_t>(k) + 1]);
        const SegmentSummary seg =
            pla_segment(std::span<const double>(field.values).subspan(b, e - b),
                        std::span<const double>(timesteps).subspan(b, e - b));
        if (seg.valid_count == 0) {
            word.symbols.push_back(SymbolPair::na());
            continue;
        }
        SymbolPair sym;
        sym.mean_sym = static_cast<std::int16_t>(quantize(seg.mean, alphabet.mean_breakpoints));
        sym.slope_sym = static_cast<std::int16_t>(quantize(seg.slope, alphabet.slope_breakpoints));
        word.symbols.push_back(sym);
    }
    return word;
}

}  // namespace borf
