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
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "borf/linear.hpp"
#include "borf/transform.hpp"

namespace borf {

/// Importance score per vocabulary column for one instance, e.g. from an
/// external explainer or the bundled linear attribution.
struct Attribution {
    std::vector<double> phi;
    std::string source;

    void validate(std::uint32_t h) const {
        if (phi.size() != h) {
            throw std::invalid_argument("attribution: expected " + std::to_string(h) +
                                        " scores, got " + std::to_string(phi.size()));
        }
        for (double v : phi) {
            if (!std::isfinite(v)) throw std::invalid_argument("attribution: non-finite score");
        }
    }
};

/// Per-word multiset of covered (signal, timestep) pairs of one instance.
/// The total multiplicity of a word equals its occurrence count times its
/// window length.
struct AlignmentMultiset {
    // col -> (signal, 1-based timestep) -> multiplicity
    std::map<std::uint32_t, std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t>> by_word;

    std::uint64_t total_multiplicity(std::uint32_t col) const {
        const auto it = by_word.find(col);
        if (it == by_word.end()) return 0;
        std::uint64_t total = 0;
        for (const auto& [pos, mult] : it->second) total += mult;
        return total;
    }
};

/// Per-observation saliency scores of one instance, shaped like the series
/// (one array per signal). Scores exist for missing-value positions too.
struct SaliencyMap {
    std::vector<std::vector<double>> scores;
    double scale = 0.0;
    bool degenerate = false;  // set when the pre-scale mass was zero

    double total() const {
        double acc = 0.0;
        for (const auto& sig : scores) {
            for (double v : sig) acc += v;
        }
        return acc;
    }
};

/// Saliency plus the importances of vocabulary words not contained in the
/// instance, which cannot be mapped to timesteps.
struct Explanation {
    SaliencyMap saliency;
    std::vector<std::pair<std::uint32_t, double>> residual;  // (col, phi), phi != 0
};

/// Re-runs the transform pipeline on one series, recording for every emitted
/// in-vocabulary word the covered (signal, timestep) pairs of its receptive
/// field. Multiplicities accumulate across occurrences and configurations.
inline AlignmentMultiset alignments(const BorfModel& model, const TimeSeries& series) {
    model.require_fitted();
    AlignmentMultiset out;
    detail::for_each_word(series, model.configs(), model.alphabets(),
                          [&](Word&& word, const ReceptiveField& field, const BorfConfig&) {
                              const auto col = model.vocabulary().lookup(word);
                              if (!col) return;
                              auto& positions = out.by_word[*col];
                              for (int i = 0; i < field.width(); ++i) {
                                  const auto key = std::make_pair(
                                      word.signal_id, static_cast<std::uint32_t>(field.covered(i)));
                                  ++positions[key];
                              }
                          });
    return out;
}

/// Builds the saliency map of one instance from column importances.
///
/// The raw map accumulates phi_i times the coverage multiplicity of every
/// contained word, then is rescaled so its total equals the summed
/// importances of contained words. A zero pre-scale mass yields the zero map
/// with the degenerate flag set. Importances of not-contained words are
/// returned as the residual, in ascending column order.
inline Explanation saliency(const BorfModel& model, const TimeSeries& series,
                            const Attribution& attribution) {
    model.require_fitted();
    attribution.validate(model.vocabulary().size());

    const AlignmentMultiset aligned = alignments(model, series);

    Explanation out;
    out.saliency.scores.resize(series.signal_count());
    for (std::size_t k = 0; k < series.signal_count(); ++k) {
        out.saliency.scores[k].assign(series.signals[k].length(), 0.0);
    }

    double contained_phi = 0.0;
    for (const auto& [col, positions] : aligned.by_word) {
        contained_phi += attribution.phi[col];
        for (const auto& [pos, mult] : positions) {
            out.saliency.scores[pos.first][pos.second - 1] +=
                attribution.phi[col] * static_cast<double>(mult);
        }
    }

    const double mass = out.saliency.total();
    if (mass == 0.0) {
        out.saliency.degenerate = true;
        out.saliency.scale = 0.0;
        for (auto& sig : out.saliency.scores) sig.assign(sig.size(), 0.0);
    } else {
        out.saliency.scale = contained_phi / mass;
        for (auto& sig : out.saliency.scores) {
            for (double& v : sig) v *= out.saliency.scale;
        }
    }

    for (std::uint32_t col = 0; col < model.vocabulary().size(); ++col) {
        if (attribution.phi[col] != 0.0 && !aligned.by_word.contains(col)) {
            out.residual.emplace_back(col, attribution.phi[col]);
        }
    }
    return out;
}

/// Average shape of one vocabulary word: the pointwise complete-case mean
/// over all normalized training receptive fields that discretize to it.
/// Positions with no valid observation across the support are missing.
struct WordPrototype {
    std::vector<double> shape;
    std::uint64_t support = 0;
};

inline WordPrototype word_prototype(const BorfModel& model, const TimeSeriesDataset& dataset,
                                    const Word& target) {
    model.require_fitted();
    if (!model.vocabulary().lookup(target)) {
        throw std::invalid_argument("word_prototype: word '" + word_key(target) +
                                    "' is not in the vocabulary");
    }
    const int w = model.configs()[target.config_id].w;
    std::vector<double> sums(static_cast<std::size_t>(w), 0.0);
    std::vector<std::uint64_t> valid(static_cast<std::size_t>(w), 0);
    WordPrototype proto;
    for (const TimeSeries& series : dataset.series) {
        detail::for_each_word(series, model.configs(), model.alphabets(),
                              [&](Word&& word, const ReceptiveField& field, const BorfConfig&) {
                                  if (word != target) return;
                                  ++proto.support;
                                  for (int i = 0; i < field.width(); ++i) {
                                      const double v = field.values[static_cast<std::size_t>(i)];
                                      if (is_missing(v)) continue;
                                      sums[static_cast<std::size_t>(i)] += v;
                                      ++valid[static_cast<std::size_t>(i)];
                                  }
                              });
    }
    if (proto.support == 0) return proto;  // empty shape, support 0
    proto.shape.resize(static_cast<std::size_t>(w));
    for (int i = 0; i < w; ++i) {
        const std::size_t idx = static_cast<std::size_t>(i);
        proto.shape[idx] = valid[idx] == 0 ? missing_value()
                                           : sums[idx] / static_cast<double>(valid[idx]);
    }
    return proto;
}

/// Contribution decomposition of a linear score: phi_i = coefficient_i *
/// feature_i, intercept excluded, so sum(phi) + intercept equals the score.
/// For classification the output selects the one-vs-rest class.
inline Attribution linear_attribution(const LinearModel& linear, const SparseMatrix& features,
                                      std::uint32_t row, std::size_t output = 0) {
    if (features.cols() != linear.feature_count()) {
        throw std::invalid_argument("linear_attribution: feature count mismatch");
    }
    if (row >= features.rows()) throw std::invalid_argument("linear_attribution: row out of range");
    if (output >= linear.coefficients.size()) {
        throw std::invalid_argument("linear_attribution: output index out of range");
    }
    Attribution attr;
    attr.source = "linear";
    attr.phi.assign(features.cols(), 0.0);
    const auto& coef = linear.coefficients[output];
    for (std::size_t k = features.row_ptr()[row]; k < features.row_ptr()[row + 1]; ++k) {
        attr.phi[features.col_idx()[k]] = coef[features.col_idx()[k]] * features.values()[k];
    }
    return attr;
}

}  // namespace borf
