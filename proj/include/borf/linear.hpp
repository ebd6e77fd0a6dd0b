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
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "borf/parallel.hpp"
#include "borf/sparse.hpp"

namespace borf {

/// Real-valued sparse matrix in CSR form.
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(std::uint32_t rows, std::uint32_t cols) : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

    /// Builds from sorted, duplicate-free COO triplets (as a finalized bag
    /// provides).
    static SparseMatrix from_bag(const SparseBag& bag) {
        SparseMatrix m(bag.rows(), bag.cols());
        m.col_idx_.reserve(bag.nnz());
        m.values_.reserve(bag.nnz());
        for (const auto& t : bag.triplets()) {
            ++m.row_ptr_[t.row + 1];
            m.col_idx_.push_back(t.col);
            m.values_.push_back(static_cast<double>(t.count));
        }
        for (std::size_t r = 0; r < m.rows_; ++r) m.row_ptr_[r + 1] += m.row_ptr_[r];
        return m;
    }

    std::uint32_t rows() const { return rows_; }
    std::uint32_t cols() const { return cols_; }
    std::size_t nnz() const { return values_.size(); }

    const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }
    const std::vector<std::uint32_t>& col_idx() const { return col_idx_; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    /// y = A x
    std::vector<double> multiply(const std::vector<double>& x) const {
        if (x.size() != cols_) throw std::invalid_argument("sparse multiply: shape mismatch");
        std::vector<double> y(rows_, 0.0);
        for (std::size_t r = 0; r < rows_; ++r) {
            double acc = 0.0;
            for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
                acc += values_[k] * x[col_idx_[k]];
            }
            y[r] = acc;
        }
        return y;
    }

    /// y = A^T x
    std::vector<double> multiply_transposed(const std::vector<double>& x) const {
        if (x.size() != rows_) throw std::invalid_argument("sparse multiply: shape mismatch");
        std::vector<double> y(cols_, 0.0);
        for (std::size_t r = 0; r < rows_; ++r) {
            const double xr = x[r];
            if (xr == 0.0) continue;
            for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
                y[col_idx_[k]] += values_[k] * xr;
            }
        }
        return y;
    }

    /// Dense copy of one row.
    std::vector<double> row_dense(std::uint32_t r) const {
        std::vector<double> out(cols_, 0.0);
        for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) out[col_idx_[k]] = values_[k];
        return out;
    }

private:
    std::uint32_t rows_ = 0;
    std::uint32_t cols_ = 0;
    std::vector<std::size_t> row_ptr_{0};
    std::vector<std::uint32_t> col_idx_;
    std::vector<double> values_;
};

/// Element-wise arcsinh feature map over the stored counts. arcsinh(0) = 0,
/// so the sparsity pattern is preserved and zero cells stay implicit.
inline SparseMatrix arcsinh_map(const SparseBag& bag) {
    SparseMatrix m = SparseMatrix::from_bag(bag);
    for (double& v : m.values()) v = std::asinh(v);
    return m;
}

enum class ModelMode { classification, regression };

/// Ridge-regularized linear predictor. Classification is one-vs-rest with
/// +-1 targets and argmax prediction; ties break toward the lowest class
/// index. Deterministic given data and lambda.
struct LinearModel {
    ModelMode mode = ModelMode::regression;
    double lambda = 1.0;
    std::vector<std::string> classes;           // classification only, sorted
    std::vector<std::vector<double>> coefficients;  // one vector per output
    std::vector<double> intercepts;

    std::uint32_t feature_count() const {
        return coefficients.empty() ? 0 : static_cast<std::uint32_t>(coefficients[0].size());
    }
};

namespace detail {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

/// Conjugate gradient for an SPD operator, run serially so iterates are
/// bit-reproducible. Converges to |r| <= tol * max(1, |rhs|).
template <class MatVec>
std::vector<double> conjugate_gradient(const MatVec& apply, const std::vector<double>& rhs,
                                       double tol, std::size_t max_iter) {
    std::vector<double> x(rhs.size(), 0.0);
    std::vector<double> r = rhs;
    std::vector<double> p = rhs;
    double rr = dot(r, r);
    const double target = tol * std::max(1.0, std::sqrt(rr));
    const double target2 = target * target;
    for (std::size_t it = 0; it < max_iter && rr > target2; ++it) {
        const std::vector<double> ap = apply(p);
        const double pap = dot(p, ap);
        if (pap <= 0.0) break;  // numerically exhausted
        const double alpha = rr / pap;
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += alpha * p[i];
        for (std::size_t i = 0; i < r.size(); ++i) r[i] -= alpha * ap[i];
        const double rr_new = dot(r, r);
        const double beta = rr_new / rr;
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = r[i] + beta * p[i];
        rr = rr_new;
    }
    return x;
}

/// Ridge least squares with unpenalized intercept, via the normal equations
/// on centered data. Solves the primal (h x h) system when h <= n and the
/// equivalent dual (n x n) system otherwise; both sides agree through the
/// push-through identity.
inline std::pair<std::vector<double>, double> solve_ridge(const SparseMatrix& X,
                                                          const std::vector<double>& y,
                                                          double lambda) {
    const std::size_t n = X.rows();
    const std::size_t h = X.cols();
    std::vector<double> ones(n, 1.0);
    std::vector<double> col_mean = X.multiply_transposed(ones);
    for (double& v : col_mean) v /= static_cast<double>(n);
    double y_mean = 0.0;
    for (double v : y) y_mean += v;
    y_mean /= static_cast<double>(n);
    std::vector<double> yc(n);
    for (std::size_t i = 0; i < n; ++i) yc[i] = y[i] - y_mean;

    constexpr double tol = 1e-10;
    std::vector<double> w;
    if (h <= n) {
        // (Xc^T Xc + lambda I) w = Xc^T yc
        const auto apply = [&](const std::vector<double>& v) {
            std::vector<double> z = X.multiply(v);
            const double shift = dot(col_mean, v);
            for (double& zi : z) zi -= shift;
            double zsum = 0.0;
            for (double zi : z) zsum += zi;
            std::vector<double> u = X.multiply_transposed(z);
            for (std::size_t j = 0; j < h; ++j) u[j] += lambda * v[j] - col_mean[j] * zsum;
            return u;
        };
        std::vector<double> rhs = X.multiply_transposed(yc);
        double ycsum = 0.0;
        for (double v : yc) ycsum += v;
        for (std::size_t j = 0; j < h; ++j) rhs[j] -= col_mean[j] * ycsum;
        w = conjugate_gradient(apply, rhs, tol, 20 * h + 200);
    } else {
        // (Xc Xc^T + lambda I) a = yc, then w = Xc^T a
        const auto apply = [&](const std::vector<double>& v) {
            std::vector<double> u = X.multiply_transposed(v);
            double vsum = 0.0;
            for (double vi : v) vsum += vi;
            for (std::size_t j = 0; j < h; ++j) u[j] -= col_mean[j] * vsum;
            std::vector<double> z = X.multiply(u);
            const double shift = dot(col_mean, u);
            for (std::size_t i = 0; i < n; ++i) z[i] += lambda * v[i] - shift;
            return z;
        };
        const std::vector<double> a = conjugate_gradient(apply, yc, tol, 20 * n + 200);
        w = X.multiply_transposed(a);
        double asum = 0.0;
        for (double v : a) asum += v;
        for (std::size_t j = 0; j < h; ++j) w[j] -= col_mean[j] * asum;
    }
    const double intercept = y_mean - dot(col_mean, w);
    return {std::move(w), intercept};
}

}  // namespace detail

/// Fits the bundled linear predictor on (arcsinh-mapped) features. For
/// classification, targets are the raw labels; classes are their sorted
/// distinct values and each gets a one-vs-rest ridge fit (parallelizable
/// over classes, schedule-independent). For regression, targets must parse
/// as decimal numbers.
inline LinearModel fit_linear(const SparseMatrix& features, const std::vector<std::string>& targets,
                              double lambda, ModelMode mode, unsigned workers = 1) {
    if (features.rows() == 0) throw std::invalid_argument("fit_linear: no training rows");
    if (features.rows() != targets.size()) {
        throw std::invalid_argument("fit_linear: feature rows and target count differ");
    }
    if (!(lambda > 0.0)) throw std::invalid_argument("fit_linear: lambda must be > 0");

    LinearModel model;
    model.mode = mode;
    model.lambda = lambda;
    if (mode == ModelMode::regression) {
        std::vector<double> y(targets.size());
        for (std::size_t i = 0; i < targets.size(); ++i) {
            try {
                std::size_t pos = 0;
                y[i] = std::stod(targets[i], &pos);
                if (pos != targets[i].size()) throw std::invalid_argument("trailing characters");
            } catch (const std::exception&) {
                throw std::invalid_argument("fit_linear: target '" + targets[i] +
                                            "' is not a number");
            }
        }
        auto [w, b] = detail::solve_ridge(features, y, lambda);
        model.coefficients.push_back(std::move(w));
        model.intercepts.push_back(b);
        return model;
    }

    const std::set<std::string> distinct(targets.begin(), targets.end());
    model.classes.assign(distinct.begin(), distinct.end());
    model.coefficients.resize(model.classes.size());
    model.intercepts.resize(model.classes.size());
    parallel_for(model.classes.size(), workers, [&](std::size_t c) {
        std::vector<double> y(targets.size());
        for (std::size_t i = 0; i < targets.size(); ++i) {
            y[i] = targets[i] == model.classes[c] ? 1.0 : -1.0;
        }
        auto [w, b] = detail::solve_ridge(features, y, lambda);
        model.coefficients[c] = std::move(w);
        model.intercepts[c] = b;
    });
    return model;
}

/// Per-output affine scores, one row per feature row.
inline std::vector<std::vector<double>> decision_scores(const LinearModel& model,
                                                        const SparseMatrix& features) {
    if (features.cols() != model.feature_count()) {
        throw std::invalid_argument("predict: feature count mismatch (" +
                                    std::to_string(features.cols()) + " vs " +
                                    std::to_string(model.feature_count()) + ")");
    }
    std::vector<std::vector<double>> scores(features.rows(),
                                            std::vector<double>(model.coefficients.size(), 0.0));
    for (std::size_t o = 0; o < model.coefficients.size(); ++o) {
        const std::vector<double> s = features.multiply(model.coefficients[o]);
        for (std::size_t r = 0; r < features.rows(); ++r) scores[r][o] = s[r] + model.intercepts[o];
    }
    return scores;
}

/// Predicted targets: class labels (argmax score, ties to the lowest class
/// index) or the regression value, formatted upstream.
inline std::vector<std::string> predict(const LinearModel& model, const SparseMatrix& features) {
    const auto scores = decision_scores(model, features);
    std::vector<std::string> out;
    out.reserve(features.rows());
    for (const auto& row : scores) {
        if (model.mode == ModelMode::classification) {
            std::size_t best = 0;
            for (std::size_t c = 1; c < row.size(); ++c) {
                if (row[c] > row[best]) best = c;
            }
            out.push_back(model.classes[best]);
        } else {
            out.push_back(std::to_string(row[0]));
        }
    }
    return out;
}

inline std::vector<double> predict_values(const LinearModel& model, const SparseMatrix& features) {
    if (model.mode != ModelMode::regression) {
        throw std::invalid_argument("predict_values: model is not a regressor");
    }
    const auto scores = decision_scores(model, features);
    std::vector<double> out(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) out[i] = scores[i][0];
    return out;
}

inline std::vector<std::string> predict_labels(const LinearModel& model,
                                               const SparseMatrix& features) {
    if (model.mode != ModelMode::classification) {
        throw std::invalid_argument("predict_labels: model is not a classifier");
    }
    return predict(model, features);
}

/// Balanced accuracy: the mean of per-class recalls over classes present in
/// the ground truth.
inline double metric_bacc(const std::vector<std::string>& y_true,
                          const std::vector<std::string>& y_pred) {
    if (y_true.empty() || y_true.size() != y_pred.size()) {
        throw std::invalid_argument("metric_bacc: label vectors must have equal length >= 1");
    }
    std::map<std::string, std::pair<std::size_t, std::size_t>> per_class;  // hits, total
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        auto& [hits, total] = per_class[y_true[i]];
        ++total;
        if (y_pred[i] == y_true[i]) ++hits;
    }
    double recall_sum = 0.0;
    for (const auto& [cls, counts] : per_class) {
        recall_sum += static_cast<double>(counts.first) / static_cast<double>(counts.second);
    }
    return recall_sum / static_cast<double>(per_class.size());
}

/// Mean absolute percentage error; undefined (error) for zero true values.
inline double metric_mape(const std::vector<double>& y_true, const std::vector<double>& y_pred) {
    if (y_true.empty() || y_true.size() != y_pred.size()) {
        throw std::invalid_argument("metric_mape: vectors must have equal length >= 1");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if (y_true[i] == 0.0) throw std::invalid_argument("metric_mape: zero true value");
        acc += std::abs(y_pred[i] - y_true[i]) / std::abs(y_true[i]);
    }
    return acc / static_cast<double>(y_true.size());
}

/// Coefficient of determination; undefined (error) for a constant truth.
inline double metric_r2(const std::vector<double>& y_true, const std::vector<double>& y_pred) {
    if (y_true.empty() || y_true.size() != y_pred.size()) {
        throw std::invalid_argument("metric_r2: vectors must have equal length >= 1");
    }
    double mean = 0.0;
    for (double v : y_true) mean += v;
    mean /= static_cast<double>(y_true.size());
    double sse = 0.0, sst = 0.0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        sse += (y_pred[i] - y_true[i]) * (y_pred[i] - y_true[i]);
        sst += (y_true[i] - mean) * (y_true[i] - mean);
    }
    if (sst == 0.0) throw std::invalid_argument("metric_r2: constant ground truth");
    return 1.0 - sse / sst;
}

}  // namespace borf
