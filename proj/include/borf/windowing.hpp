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

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "borf/core.hpp"

namespace borf {

/// Window geometry: length w, dilation d (gap between sampled points) and
/// stride s (displacement between consecutive start positions).
struct WindowConfig {
    int w = 2;
    int d = 1;
    int s = 1;

    /// Number of raw timesteps spanned by one receptive field.
    std::int64_t span() const {
        return static_cast<std::int64_t>(d) * (w - 1) + 1;
    }

    void validate() const {
        // w = 1 is rejected: normalizing a single point is degenerate.
        if (w < 2) throw std::invalid_argument("window config: w must be >= 2, got " + std::to_string(w));
        if (d < 1) throw std::invalid_argument("window config: d must be >= 1, got " + std::to_string(d));
        if (s < 1) throw std::invalid_argument("window config: s must be >= 1, got " + std::to_string(s));
    }
};

/// A dilated window of w values copied out of a signal. `start` is the
/// 1-based origin j; the field covers timesteps j, j+d, ..., j+d(w-1).
struct ReceptiveField {
    std::vector<double> values;
    int start = 1;
    int dilation = 1;

    int width() const { return static_cast<int>(values.size()); }

    /// Covered 1-based timestep of the i-th value (0-based offset).
    std::int64_t covered(int i) const {
        return start + static_cast<std::int64_t>(dilation) * i;
    }

    std::vector<double> covered_timesteps() const {
        std::vector<double> t(values.size());
        for (int i = 0; i < width(); ++i) t[static_cast<std::size_t>(i)] = static_cast<double>(covered(i));
        return t;
    }
};

/// Number of receptive fields extractable from a signal of length m:
/// floor((m - d(w-1) - 1) / s) + 1 when the span fits, else 0.
inline std::size_t receptive_field_count(std::size_t m, int w, int d, int s) {
    WindowConfig{w, d, s}.validate();
    const std::int64_t span = static_cast<std::int64_t>(d) * (w - 1) + 1;
    if (static_cast<std::int64_t>(m) < span) return 0;
    return static_cast<std::size_t>((static_cast<std::int64_t>(m) - span) / s) + 1;
}

/// Extracts all receptive fields of a signal in ascending start order.
/// Start positions are j = 1 + i*s while the span stays inside [1, m].
/// Values are copied; missing observations are preserved.
inline std::vector<ReceptiveField> windowize(const Signal& signal, const WindowConfig& cfg) {
    cfg.validate();
    const std::int64_t m = static_cast<std::int64_t>(signal.length());
    const std::int64_t span = cfg.span();
    std::vector<ReceptiveField> fields;
    for (std::int64_t j = 1; j + span - 1 <= m; j += cfg.s) {
        ReceptiveField f;
        f.start = static_cast<int>(j);
        f.dilation = cfg.d;
        f.values.resize(static_cast<std::size_t>(cfg.w));
        for (int i = 0; i < cfg.w; ++i) {
            const std::int64_t idx = j - 1 + static_cast<std::int64_t>(cfg.d) * i;
            f.values[static_cast<std::size_t>(i)] = signal.values[static_cast<std::size_t>(idx)];
        }
        fields.push_back(std::move(f));
    }
    return fields;
}

}  // namespace borf
