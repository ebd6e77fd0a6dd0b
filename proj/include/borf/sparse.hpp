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
#include <stdexcept>
#include <string>
#include <vector>

namespace borf {

/// One COO entry of a count matrix.
struct CountTriplet {
    std::uint32_t row = 0;
    std::uint32_t col = 0;
    std::uint32_t count = 0;

    friend bool operator==(const CountTriplet&, const CountTriplet&) = default;
};

struct BagStats {
    std::uint64_t nnz = 0;
    double density = 0.0;
    std::uint64_t distinct_words = 0;
};

/// Sparse count matrix in coordinate form. After finalization the triplets
/// are sorted by (row, col) with no duplicates and all counts >= 1.
class SparseBag {
public:
    SparseBag() = default;
    SparseBag(std::uint32_t rows, std::uint32_t cols) : rows_(rows), cols_(cols) {}

    std::uint32_t rows() const { return rows_; }
    std::uint32_t cols() const { return cols_; }
    const std::vector<CountTriplet>& triplets() const { return triplets_; }
    std::uint64_t nnz() const { return triplets_.size(); }

    friend bool operator==(const SparseBag&, const SparseBag&) = default;

    /// Merges unordered count triplets into a finalized bag: duplicates are
    /// summed, triplets sorted by (row, col). The result is independent of
    /// the input order, so per-worker partial counts can be folded in any
    /// partition.
    static SparseBag finalize(std::uint32_t rows, std::uint32_t cols,
                              std::vector<CountTriplet> triplets) {
        for (const auto& t : triplets) {
            if (t.col >= cols) {
                throw std::invalid_argument("bag_finalize: column index " +
                                            std::to_string(t.col) + " >= column count " +
                                            std::to_string(cols));
            }
            if (t.row >= rows) {
                throw std::invalid_argument("bag_finalize: row index " + std::to_string(t.row) +
                                            " >= row count " + std::to_string(rows));
            }
            if (t.count == 0) {
                throw std::invalid_argument("bag_finalize: zero count triplet");
            }
        }
        std::sort(triplets.begin(), triplets.end(),
                  [](const CountTriplet& a, const CountTriplet& b) {
                      return a.row != b.row ? a.row < b.row : a.col < b.col;
                  });
        std::vector<CountTriplet> merged;
        merged.reserve(triplets.size());
        for (const auto& t : triplets) {
            if (!merged.empty() && merged.back().row == t.row && merged.back().col == t.col) {
                const std::uint64_t sum =
                    static_cast<std::uint64_t>(merged.back().count) + t.count;
                if (sum > UINT32_MAX) {
                    throw std::overflow_error("bag_finalize: count overflow at (" +
                                              std::to_string(t.row) + ", " +
                                              std::to_string(t.col) + ")");
                }
                merged.back().count = static_cast<std::uint32_t>(sum);
            } else {
                merged.push_back(t);
            }
        }
        SparseBag bag(rows, cols);
        bag.triplets_ = std::move(merged);
        return bag;
    }

private:
    std::uint32_t rows_ = 0;
    std::uint32_t cols_ = 0;
    std::vector<CountTriplet> triplets_;
};

inline SparseBag bag_finalize(std::uint32_t rows, std::uint32_t cols,
                              std::vector<CountTriplet> triplets) {
    return SparseBag::finalize(rows, cols, std::move(triplets));
}

/// nnz, density rho = nnz / (n*h), and the number of columns that carry at
/// least one nonzero. An empty shape yields density 0.
inline BagStats bag_stats(const SparseBag& bag) {
    BagStats st;
    st.nnz = bag.nnz();
    const std::uint64_t cells =
        static_cast<std::uint64_t>(bag.rows()) * static_cast<std::uint64_t>(bag.cols());
    st.density = cells == 0 ? 0.0 : static_cast<double>(st.nnz) / static_cast<double>(cells);
    std::vector<std::uint32_t> cols;
    cols.reserve(bag.triplets().size());
    for (const auto& t : bag.triplets()) cols.push_back(t.col);
    std::sort(cols.begin(), cols.end());
    st.distinct_words =
        static_cast<std::uint64_t>(std::unique(cols.begin(), cols.end()) - cols.begin());
    return st;
}

}  // namespace borf
