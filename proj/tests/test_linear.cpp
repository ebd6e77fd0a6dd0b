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

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>
#include <random>

#include "borf/linear.hpp"

using namespace borf;

namespace {

SparseBag dense_bag(const std::vector<std::vector<std::uint32_t>>& rows) {
    std::vector<CountTriplet> triplets;
    const std::uint32_t cols = rows.empty() ? 0 : static_cast<std::uint32_t>(rows[0].size());
    for (std::uint32_t r = 0; r < rows.size(); ++r) {
        for (std::uint32_t c = 0; c < cols; ++c) {
            if (rows[r][c] > 0) triplets.push_back({r, c, rows[r][c]});
        }
    }
    return bag_finalize(static_cast<std::uint32_t>(rows.size()), cols, triplets);
}

std::vector<std::string> to_strings(const std::vector<double>& v) {
    std::vector<std::string> out;
    for (double x : v) out.push_back(std::to_string(x));
    return out;
}

}  // namespace

TEST_CASE("arcsinh map preserves the sparsity pattern", "[linear]") {
    const SparseBag bag = dense_bag({{1, 0, 4}, {0, 2, 0}});
    const SparseMatrix mapped = arcsinh_map(bag);
    CHECK(mapped.nnz() == bag.nnz());
    CHECK(mapped.rows() == 2);
    CHECK(mapped.cols() == 3);

    // arcsinh(1) = ln(1 + sqrt 2)
    CHECK(mapped.values()[0] == Catch::Approx(0.881373587019543).epsilon(1e-12));
    CHECK(mapped.values()[1] == Catch::Approx(std::log(4.0 + std::sqrt(17.0))).epsilon(1e-12));
    CHECK(std::asinh(0.0) == 0.0);
}

TEST_CASE("arcsinh is monotone and odd on stored values", "[linear]") {
    double prev = 0.0;
    for (std::uint32_t c = 1; c < 100; ++c) {
        const double v = std::asinh(static_cast<double>(c));
        CHECK(v > prev);
        CHECK(std::asinh(-static_cast<double>(c)) == -v);
        prev = v;
    }
}

TEST_CASE("ridge recovers exactly linear targets", "[linear]") {
    // y = 2*x0 - 1*x1 + 3
    const SparseBag bag = dense_bag({{1, 2}, {2, 1}, {3, 5}, {4, 2}, {1, 1}, {5, 3}});
    const SparseMatrix X = SparseMatrix::from_bag(bag);
    std::vector<double> y;
    for (std::uint32_t r = 0; r < X.rows(); ++r) {
        const auto row = X.row_dense(r);
        y.push_back(2.0 * row[0] - 1.0 * row[1] + 3.0);
    }
    const LinearModel model = fit_linear(X, to_strings(y), 1e-8, ModelMode::regression);
    REQUIRE(model.coefficients.size() == 1);
    CHECK(model.coefficients[0][0] == Catch::Approx(2.0).margin(1e-4));
    CHECK(model.coefficients[0][1] == Catch::Approx(-1.0).margin(1e-4));
    CHECK(model.intercepts[0] == Catch::Approx(3.0).margin(1e-4));
}

TEST_CASE("duplicate feature columns get equal coefficients", "[linear]") {
    // duplicated column vs the closed-form single-feature ridge
    const SparseBag bag = dense_bag({{1, 1}, {2, 2}, {3, 3}, {4, 4}});
    const SparseMatrix X = SparseMatrix::from_bag(bag);
    const std::vector<double> y{2, 4, 6, 8};
    const double lambda = 0.5;
    const LinearModel model = fit_linear(X, to_strings(y), lambda, ModelMode::regression);
    const auto& w = model.coefficients[0];
    CHECK(w[0] == w[1]);

    // closed form for duplicated centered column xc: the two-feature ridge
    // solution is symmetric with w = xc'yc / (2 xc'xc + lambda)
    double xx = 0.0, xy = 0.0;
    const double xmean = 2.5, ymean = 5.0;
    for (int i = 0; i < 4; ++i) {
        xx += (i + 1 - xmean) * (i + 1 - xmean);
        xy += (i + 1 - xmean) * (y[static_cast<std::size_t>(i)] - ymean);
    }
    const double expected = xy / (2.0 * xx + lambda);
    CHECK(w[0] == Catch::Approx(expected).epsilon(1e-8));
    CHECK(model.intercepts[0] == Catch::Approx(ymean - 2.0 * expected * xmean).epsilon(1e-8));
}

TEST_CASE("all-zero features fall back to the target mean", "[linear]") {
    const SparseBag bag(3, 4);
    const SparseMatrix X = SparseMatrix::from_bag(bag);
    const LinearModel model = fit_linear(X, {"1.0", "2.0", "6.0"}, 1.0, ModelMode::regression);
    for (double c : model.coefficients[0]) CHECK(c == 0.0);
    CHECK(model.intercepts[0] == Catch::Approx(3.0));
}

TEST_CASE("fit_linear input validation", "[linear]") {
    const SparseMatrix empty = SparseMatrix::from_bag(SparseBag(0, 2));
    CHECK_THROWS_AS(fit_linear(empty, {}, 1.0, ModelMode::regression), std::invalid_argument);

    const SparseMatrix X = SparseMatrix::from_bag(dense_bag({{1, 0}}));
    CHECK_THROWS_AS(fit_linear(X, {"1", "2"}, 1.0, ModelMode::regression), std::invalid_argument);
    CHECK_THROWS_AS(fit_linear(X, {"abc"}, 1.0, ModelMode::regression), std::invalid_argument);
    CHECK_THROWS_AS(fit_linear(X, {"1"}, 0.0, ModelMode::regression), std::invalid_argument);
}

TEST_CASE("zero-coefficient model predicts the intercept", "[linear]") {
    LinearModel model;
    model.mode = ModelMode::regression;
    model.coefficients = {{0.0, 0.0}};
    model.intercepts = {4.5};
    const SparseMatrix X = SparseMatrix::from_bag(dense_bag({{3, 1}, {0, 7}}));
    const auto pred = predict_values(model, X);
    CHECK(pred == std::vector<double>{4.5, 4.5});
}

TEST_CASE("separable two-class toy problem reaches bACC 1", "[linear]") {
    // class A lights up column 0, class B column 1
    std::vector<std::vector<std::uint32_t>> rows;
    std::vector<std::string> labels;
    for (int i = 0; i < 10; ++i) {
        const bool a = i % 2 == 0;
        rows.push_back({a ? 3u + (i % 3) : 0u, a ? 0u : 4u + (i % 2)});
        labels.push_back(a ? "A" : "B");
    }
    const SparseMatrix X = arcsinh_map(dense_bag(rows));
    const LinearModel model = fit_linear(X, labels, 1.0, ModelMode::classification);
    REQUIRE(model.classes == std::vector<std::string>{"A", "B"});
    const auto pred = predict_labels(model, X);
    CHECK(metric_bacc(labels, pred) == 1.0);
}

TEST_CASE("single-class training always predicts that class", "[linear]") {
    const SparseMatrix X = SparseMatrix::from_bag(dense_bag({{1, 2}, {0, 1}}));
    const LinearModel model = fit_linear(X, {"only", "only"}, 1.0, ModelMode::classification);
    const auto pred = predict_labels(model, X);
    CHECK(pred == std::vector<std::string>{"only", "only"});
}

TEST_CASE("prediction ties break toward the lowest class index", "[linear]") {
    LinearModel model;
    model.mode = ModelMode::classification;
    model.classes = {"x", "y"};
    model.coefficients = {{0.0}, {0.0}};
    model.intercepts = {1.0, 1.0};
    const SparseMatrix X = SparseMatrix::from_bag(dense_bag({{5}}));
    CHECK(predict_labels(model, X) == std::vector<std::string>{"x"});
}

TEST_CASE("argmax is invariant to positive score scaling", "[linear]") {
    std::mt19937 rng(77);
    std::normal_distribution<double> coef(0.0, 1.0);
    std::uniform_int_distribution<std::uint32_t> cnt(0, 5);
    for (int trial = 0; trial < 20; ++trial) {
        LinearModel model;
        model.mode = ModelMode::classification;
        model.classes = {"a", "b", "c"};
        for (int c = 0; c < 3; ++c) {
            model.coefficients.push_back({coef(rng), coef(rng), coef(rng)});
            model.intercepts.push_back(coef(rng));
        }
        LinearModel scaled = model;
        for (auto& w : scaled.coefficients) {
            for (double& v : w) v *= 7.25;
        }
        for (double& b : scaled.intercepts) b *= 7.25;

        const SparseMatrix X = SparseMatrix::from_bag(
            dense_bag({{cnt(rng), cnt(rng), cnt(rng)}, {cnt(rng), cnt(rng), cnt(rng)}}));
        CHECK(predict_labels(model, X) == predict_labels(scaled, X));
    }
}

TEST_CASE("fit_linear is permutation equivariant", "[linear]") {
    std::mt19937 rng(79);
    std::uniform_int_distribution<std::uint32_t> cnt(0, 6);
    std::vector<std::vector<std::uint32_t>> rows;
    std::vector<std::string> targets;
    for (int i = 0; i < 12; ++i) {
        rows.push_back({cnt(rng), cnt(rng), cnt(rng), cnt(rng)});
        targets.push_back(std::to_string(static_cast<double>(i % 5)));
    }
    std::vector<std::size_t> perm(rows.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::vector<std::uint32_t>> shuffled_rows;
    std::vector<std::string> shuffled_targets;
    for (std::size_t p : perm) {
        shuffled_rows.push_back(rows[p]);
        shuffled_targets.push_back(targets[p]);
    }
    const LinearModel a = fit_linear(SparseMatrix::from_bag(dense_bag(rows)), targets, 0.1,
                                     ModelMode::regression);
    const LinearModel b = fit_linear(SparseMatrix::from_bag(dense_bag(shuffled_rows)),
                                     shuffled_targets, 0.1, ModelMode::regression);
    for (std::size_t j = 0; j < a.coefficients[0].size(); ++j) {
        CHECK(a.coefficients[0][j] == Catch::Approx(b.coefficients[0][j]).margin(1e-9));
    }
    CHECK(a.intercepts[0] == Catch::Approx(b.intercepts[0]).margin(1e-9));
}

TEST_CASE("classification fits are schedule independent", "[linear]") {
    std::mt19937 rng(83);
    std::uniform_int_distribution<std::uint32_t> cnt(0, 6);
    std::vector<std::vector<std::uint32_t>> rows;
    std::vector<std::string> labels;
    for (int i = 0; i < 15; ++i) {
        rows.push_back({cnt(rng), cnt(rng), cnt(rng)});
        labels.push_back(std::string(1, static_cast<char>('a' + i % 3)));
    }
    const SparseMatrix X = arcsinh_map(dense_bag(rows));
    const LinearModel serial = fit_linear(X, labels, 1.0, ModelMode::classification, 1);
    const LinearModel parallel = fit_linear(X, labels, 1.0, ModelMode::classification, 4);
    CHECK(serial.coefficients == parallel.coefficients);
    CHECK(serial.intercepts == parallel.intercepts);
}

TEST_CASE("metrics", "[linear]") {
    SECTION("perfect predictions") {
        CHECK(metric_bacc({"a", "b", "a"}, {"a", "b", "a"}) == 1.0);
        CHECK(metric_mape({1, 2, 4}, {1, 2, 4}) == 0.0);
        CHECK(metric_r2({1, 2, 4}, {1, 2, 4}) == 1.0);
    }
    SECTION("constant predictor on balanced two-class data") {
        CHECK(metric_bacc({"a", "a", "b", "b"}, {"a", "a", "a", "a"}) == Catch::Approx(0.5));
    }
    SECTION("mape of a 10 percent overshoot") {
        CHECK(metric_mape({1, 2, 4}, {1.1, 2.2, 4.4}) == Catch::Approx(0.1));
    }
    SECTION("errors") {
        CHECK_THROWS_AS(metric_mape({0.0}, {1.0}), std::invalid_argument);
        CHECK_THROWS_AS(metric_r2({2.0, 2.0}, {1.0, 3.0}), std::invalid_argument);
        CHECK_THROWS_AS(metric_bacc({}, {}), std::invalid_argument);
        CHECK_THROWS_AS(metric_bacc({"a"}, {}), std::invalid_argument);
    }
}
