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
#include <cstdint>
#include <cstdio>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "borf/approximation.hpp"
#include "borf/core.hpp"
#include "borf/parallel.hpp"
#include "borf/sparse.hpp"
#include "borf/vocabulary.hpp"
#include "borf/windowing.hpp"

namespace borf {

enum class Task { classification, regression };

/// Alphabet and threshold presets tuned once per task.
struct TaskDefaults {
    int alpha_mean = 2;
    int alpha_slope = 3;
    double beta = 0.15;
};

inline TaskDefaults tsc_defaults() { return TaskDefaults{2, 3, 0.15}; }
inline TaskDefaults tser_defaults() { return TaskDefaults{3, 1, 0.05}; }

inline TaskDefaults defaults_for(Task task) {
    return task == Task::classification ? tsc_defaults() : tser_defaults();
}

/// One pattern-extraction configuration.
struct BorfConfig {
    std::uint32_t config_id = 0;
    int w = 2;
    int d = 1;
    int s = 1;
    int l = 1;
    int alpha_mean = 2;
    int alpha_slope = 1;
    double beta = 0.0;

    WindowConfig window() const { return WindowConfig{w, d, s}; }

    void validate() const {
        window().validate();
        if (l < 1 || l > w) {
            throw std::invalid_argument("config " + std::to_string(config_id) +
                                        ": word length must satisfy 1 <= l <= w");
        }
        if (alpha_mean < 2) throw std::invalid_argument("config: mean alphabet size must be >= 2");
        if (alpha_slope < 1) throw std::invalid_argument("config: slope alphabet size must be >= 1");
        if (!(beta >= 0.0 && beta <= 1.0)) {
            throw std::invalid_argument("config: std threshold must lie in [0, 1]");
        }
    }

    friend bool operator==(const BorfConfig&, const BorfConfig&) = default;
};

namespace detail {

// Highest power-of-two exponent with 2^k <= v.
inline int floor_log2(std::size_t v) {
    int k = -1;
    while (v > 0) {
        v >>= 1;
        ++k;
    }
    return k;
}

}  // namespace detail

/// The multi-resolution configuration grid: window sizes 2^2..2^floor(log2 m),
/// dilations 2^0..2^floor(log2 log2 m), word lengths {1, 2, 4, 8}, stride 1.
/// Combinations with l > w or an effective span longer than the longest
/// training signal are dropped; config ids follow sorted (w, d, l) order.
inline std::vector<BorfConfig> config_grid(std::size_t m_max, const TaskDefaults& defaults) {
    if (m_max < 4) {
        throw std::invalid_argument("config_grid: longest signal must have at least 4 observations");
    }
    const int max_w_exp = detail::floor_log2(m_max);
    const int max_d_exp = detail::floor_log2(static_cast<std::size_t>(max_w_exp));
    std::vector<BorfConfig> grid;
    std::uint32_t id = 0;
    for (int we = 2; we <= max_w_exp; ++we) {
        const int w = 1 << we;
        for (int de = 0; de <= max_d_exp; ++de) {
            const int d = 1 << de;
            if (static_cast<std::size_t>(d) * (w - 1) + 1 > m_max) continue;
            for (int l : {1, 2, 4, 8}) {
                if (l > w) continue;
                BorfConfig cfg;
                cfg.config_id = id++;
                cfg.w = w;
                cfg.d = d;
                cfg.s = 1;
                cfg.l = l;
                cfg.alpha_mean = defaults.alpha_mean;
                cfg.alpha_slope = defaults.alpha_slope;
                cfg.beta = defaults.beta;
                cfg.validate();
                grid.push_back(cfg);
            }
        }
    }
    return grid;
}

/// Explicit grid from user-provided axis values, validity-filtered the same
/// way as the heuristic grid.
inline std::vector<BorfConfig> config_grid_explicit(std::size_t m_max,
                                                    std::vector<int> window_sizes,
                                                    std::vector<int> dilations,
                                                    std::vector<int> word_lengths, int stride,
                                                    const TaskDefaults& defaults) {
    std::sort(window_sizes.begin(), window_sizes.end());
    std::sort(dilations.begin(), dilations.end());
    std::sort(word_lengths.begin(), word_lengths.end());
    std::vector<BorfConfig> grid;
    std::uint32_t id = 0;
    for (int w : window_sizes) {
        for (int d : dilations) {
            if (static_cast<std::size_t>(d) * (w - 1) + 1 > m_max) continue;
            for (int l : word_lengths) {
                if (l > w) continue;
                BorfConfig cfg{id, w, d, stride, l, defaults.alpha_mean, defaults.alpha_slope,
                               defaults.beta};
                cfg.validate();
                grid.push_back(cfg);
                ++id;
            }
        }
    }
    if (grid.empty()) {
        throw std::invalid_argument("config grid: no valid (w, d, l) combination for signal length " +
                                    std::to_string(m_max));
    }
    return grid;
}

namespace detail {

inline bool debug_log_enabled() {
    static const bool enabled = std::getenv("BORF_DEBUG") != nullptr;
    return enabled;
}

/// Runs the windowize -> normalize -> approximate pipeline over one time
/// series and hands every produced word to the sink, together with the
/// normalized field it came from. Signals shorter than a configuration's
/// span contribute nothing for that configuration.
template <class Sink>
void for_each_word(const TimeSeries& ts, std::span<const BorfConfig> configs,
                   std::span<const AlphabetSpec> alphabets, Sink&& sink) {
    for (std::uint32_t sig = 0; sig < ts.signals.size(); ++sig) {
        const Signal& signal = ts.signals[sig];
        const CompleteCaseStats sig_stats = complete_case_stats(signal.values);
        for (std::size_t c = 0; c < configs.size(); ++c) {
            const BorfConfig& cfg = configs[c];
            if (static_cast<std::int64_t>(signal.length()) < cfg.window().span()) {
                if (debug_log_enabled()) {
                    std::fprintf(stderr, "borf: signal %u (m=%zu) shorter than span of config %u; skipped\n",
                                 sig, signal.length(), cfg.config_id);
                }
                continue;
            }
            const NormalizationParams norm{cfg.beta, sig_stats.stddev};
            for (const ReceptiveField& raw : windowize(signal, cfg.window())) {
                ReceptiveField field = normalize(raw, norm);
                Word word = approximate(field, cfg.l, alphabets[c], cfg.config_id, sig);
                sink(std::move(word), field, cfg);
            }
        }
    }
}

}  // namespace detail

/// A fitted bag-of-receptive-fields transform: the configuration list and
/// the frozen, lexicographically ordered vocabulary. Immutable after fit;
/// inference never adds words.
class BorfModel {
public:
    BorfModel() = default;

    BorfModel(std::vector<BorfConfig> configs, Vocabulary vocabulary, Task task)
        : configs_(std::move(configs)), vocabulary_(std::move(vocabulary)), task_(task), fitted_(true) {
        for (const auto& cfg : configs_) {
            cfg.validate();
            if (cfg.config_id != alphabets_.size()) {
                throw std::invalid_argument("model: config ids must be contiguous from 0");
            }
            alphabets_.push_back(AlphabetSpec::make(cfg.alpha_mean, cfg.alpha_slope, cfg.w, cfg.d));
        }
        for (const Word& w : vocabulary_.words()) {
            if (w.config_id >= configs_.size()) {
                throw std::invalid_argument("model: vocabulary word '" + word_key(w) +
                                            "' references unknown config");
            }
            const BorfConfig& cfg = configs_[w.config_id];
            if (static_cast<int>(w.symbols.size()) != cfg.l) {
                throw std::invalid_argument("model: word '" + word_key(w) +
                                            "' has wrong symbol count for its config");
            }
            for (const SymbolPair& s : w.symbols) {
                if (s.is_na()) continue;
                if (s.mean_sym >= cfg.alpha_mean || s.slope_sym >= cfg.alpha_slope) {
                    throw std::invalid_argument("model: word '" + word_key(w) +
                                                "' has symbols outside its alphabet");
                }
            }
        }
    }

    bool fitted() const { return fitted_; }
    Task task() const { return task_; }
    const std::vector<BorfConfig>& configs() const { return configs_; }
    const Vocabulary& vocabulary() const { return vocabulary_; }
    const std::vector<AlphabetSpec>& alphabets() const { return alphabets_; }

    void require_fitted() const {
        if (!fitted_) throw std::logic_error("model is not fitted");
    }

private:
    std::vector<BorfConfig> configs_;
    Vocabulary vocabulary_;
    std::vector<AlphabetSpec> alphabets_;
    Task task_ = Task::classification;
    bool fitted_ = false;
};

/// Hard cap on vocabulary size; growth past this aborts instead of
/// exhausting memory on adversarial inputs.
inline constexpr std::uint64_t kMaxVocabularyColumns = 1ull << 26;

namespace detail {

inline std::vector<AlphabetSpec> build_alphabets(std::span<const BorfConfig> configs) {
    std::vector<AlphabetSpec> alphabets;
    alphabets.reserve(configs.size());
    for (const auto& cfg : configs) {
        cfg.validate();
        alphabets.push_back(AlphabetSpec::make(cfg.alpha_mean, cfg.alpha_slope, cfg.w, cfg.d));
    }
    return alphabets;
}

using WordCounts = std::unordered_map<Word, std::uint32_t, WordHash>;

inline std::vector<WordCounts> count_words(const TimeSeriesDataset& dataset,
                                           std::span<const BorfConfig> configs,
                                           std::span<const AlphabetSpec> alphabets,
                                           unsigned workers) {
    std::vector<WordCounts> per_series(dataset.size());
    parallel_for(dataset.size(), workers, [&](std::size_t i) {
        WordCounts& counts = per_series[i];
        for_each_word(dataset.series[i], configs, alphabets,
                      [&counts](Word&& word, const ReceptiveField&, const BorfConfig&) {
                          auto [it, inserted] = counts.emplace(std::move(word), 1u);
                          if (!inserted) ++it->second;
                      });
    });
    return per_series;
}

}  // namespace detail

/// Trains the transform: runs the pipeline over every series, signal and
/// configuration, counting every produced word (new words create vocabulary
/// entries). The vocabulary is frozen and sorted afterwards, so the result
/// does not depend on the worker schedule. Returns the model together with
/// the training bag. Vocabulary growth past max_vocabulary aborts instead
/// of exhausting memory.
inline std::pair<BorfModel, SparseBag> fit(const TimeSeriesDataset& dataset,
                                           std::vector<BorfConfig> configs, Task task,
                                           unsigned workers = 1,
                                           std::uint64_t max_vocabulary = kMaxVocabularyColumns) {
    dataset.validate();
    if (dataset.size() == 0) throw std::invalid_argument("fit: dataset is empty");
    const std::vector<AlphabetSpec> alphabets = detail::build_alphabets(configs);
    const std::vector<detail::WordCounts> per_series =
        detail::count_words(dataset, configs, alphabets, workers);

    std::unordered_set<Word, WordHash> distinct;
    for (const auto& counts : per_series) {
        for (const auto& [word, count] : counts) {
            distinct.insert(word);
            if (distinct.size() > max_vocabulary) {
                throw std::runtime_error("fit: vocabulary exceeded " +
                                         std::to_string(max_vocabulary) + " columns");
            }
        }
    }
    Vocabulary vocab =
        Vocabulary::from_words(std::vector<Word>(distinct.begin(), distinct.end()));

    std::vector<CountTriplet> triplets;
    for (std::uint32_t i = 0; i < per_series.size(); ++i) {
        for (const auto& [word, count] : per_series[i]) {
            triplets.push_back(CountTriplet{i, *vocab.lookup(word), count});
        }
    }
    SparseBag bag = bag_finalize(static_cast<std::uint32_t>(dataset.size()), vocab.size(),
                                 std::move(triplets));
    return {BorfModel(std::move(configs), std::move(vocab), task), std::move(bag)};
}

/// Convenience: heuristic grid + task defaults from the training panel.
inline std::pair<BorfModel, SparseBag> fit(const TimeSeriesDataset& dataset, Task task,
                                           unsigned workers = 1) {
    const TaskDefaults defaults = defaults_for(task);
    return fit(dataset, config_grid(dataset.max_signal_length(), defaults), task, workers);
}

/// Inference-time transform: counts only words present in the fitted
/// vocabulary; unseen words are dropped and the vocabulary is never touched.
/// On the training panel this reproduces the bag returned by fit exactly.
inline SparseBag transform(const BorfModel& model, const TimeSeriesDataset& dataset,
                           unsigned workers = 1) {
    model.require_fitted();
    dataset.validate();
    const std::vector<detail::WordCounts> per_series =
        detail::count_words(dataset, model.configs(), model.alphabets(), workers);

    std::vector<CountTriplet> triplets;
    for (std::uint32_t i = 0; i < per_series.size(); ++i) {
        for (const auto& [word, count] : per_series[i]) {
            if (const auto col = model.vocabulary().lookup(word)) {
                triplets.push_back(CountTriplet{i, *col, count});
            }
        }
    }
    return bag_finalize(static_cast<std::uint32_t>(dataset.size()), model.vocabulary().size(),
                        std::move(triplets));
}

}  // namespace borf
