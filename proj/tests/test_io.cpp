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

#include <random>
#include <sstream>

#include "borf/serialization.hpp"
#include "borf/ts_format.hpp"
#include "oracles.hpp"

using namespace borf;

namespace {

TsFile parse(const std::string& text) {
    std::istringstream in(text);
    return parse_ts(in);
}

std::size_t parse_error_line(const std::string& text) {
    std::istringstream in(text);
    try {
        parse_ts(in);
    } catch (const ParseError& e) {
        return e.line();
    }
    return 0;  // no error raised
}

}  // namespace

TEST_CASE("parse a multivariate classification line", "[io]") {
    const auto file = parse(
        "@problemName toy\n"
        "@univariate false\n"
        "@dimensions 2\n"
        "@equalLength true\n"
        "@seriesLength 3\n"
        "@classLabel true classA classB\n"
        "@data\n"
        "1,2,3:4,5,6:classA\n");
    CHECK(file.header.problem_name == "toy");
    REQUIRE(file.dataset.size() == 1);
    const TimeSeries& ts = file.dataset.series[0];
    REQUIRE(ts.signal_count() == 2);
    CHECK(ts.signals[0].values == std::vector<double>{1, 2, 3});
    CHECK(ts.signals[1].values == std::vector<double>{4, 5, 6});
    CHECK(file.dataset.labels == std::vector<std::string>{"classA"});
}

TEST_CASE("parse a univariate regression line with a missing value", "[io]") {
    const auto file = parse(
        "@problemName toy\n"
        "@targetlabel true\n"
        "@data\n"
        "1,?,3:0.5\n");
    REQUIRE(file.dataset.size() == 1);
    const auto& values = file.dataset.series[0].signals[0].values;
    REQUIRE(values.size() == 3);
    CHECK(values[0] == 1.0);
    CHECK(is_missing(values[1]));
    CHECK(values[2] == 3.0);
    CHECK(file.dataset.labels == std::vector<std::string>{"0.5"});
}

TEST_CASE("parser accepts comments, blank lines and ragged panels", "[io]") {
    const auto file = parse(
        "# comment\n"
        "@problemName ragged\n"
        "@equalLength false\n"
        "@classLabel false\n"
        "\n"
        "@data\n"
        "1,2,3,4\n"
        "5,6\n");
    REQUIRE(file.dataset.size() == 2);
    CHECK(file.dataset.series[0].signals[0].length() == 4);
    CHECK(file.dataset.series[1].signals[0].length() == 2);
    CHECK_FALSE(file.dataset.has_labels());
}

TEST_CASE("parser rejects malformed documents with line numbers", "[io]") {
    SECTION("unknown header key") {
        CHECK(parse_error_line("@problemName x\n@bogus 1\n@data\n1,2\n") == 2);
    }
    SECTION("missing @data") {
        CHECK(parse_error_line("@problemName x\n@classLabel false\n") == 2);
        CHECK(parse_error_line("") == 1);
    }
    SECTION("non-numeric observation") {
        CHECK(parse_error_line("@data\n1,2,zap\n") == 2);
    }
    SECTION("infinity is rejected") {
        CHECK(parse_error_line("@data\n1,inf,3\n") == 2);
    }
    SECTION("dimension mismatch against @dimensions") {
        CHECK(parse_error_line("@dimensions 2\n@data\n1,2,3\n") == 3);
    }
    SECTION("dimension drift between lines") {
        CHECK(parse_error_line("@data\n1,2:3,4\n1,2\n") == 3);
    }
    SECTION("univariate flag against multivariate data") {
        CHECK(parse_error_line("@univariate true\n@data\n1,2:3,4\n") == 3);
    }
    SECTION("ragged data under equalLength true") {
        CHECK(parse_error_line("@equalLength true\n@data\n1,2,3\n1,2\n") != 0);
    }
    SECTION("declared seriesLength enforced") {
        CHECK(parse_error_line("@equalLength true\n@seriesLength 4\n@data\n1,2,3\n") == 4);
    }
    SECTION("class and target labels are mutually exclusive") {
        CHECK(parse_error_line("@classLabel true a b\n@targetlabel true\n@data\n1,2:a\n") == 3);
    }
    SECTION("undeclared class label") {
        CHECK(parse_error_line("@classLabel true a b\n@data\n1,2:c\n") == 3);
    }
    SECTION("timestamps unsupported") {
        CHECK(parse_error_line("@timeStamps true\n@data\n1,2\n") == 1);
    }
    SECTION("label missing when declared") {
        CHECK(parse_error_line("@classLabel true a\n@data\n1,2\n") == 3);
    }
    SECTION("data before @data") {
        CHECK(parse_error_line("1,2,3\n") == 1);
    }
}

TEST_CASE("ts writer round-trips a random ragged panel", "[io]") {
    std::mt19937 rng(101);
    std::uniform_int_distribution<int> label_dist(0, 2);
    for (const bool regression : {false, true}) {
        TimeSeriesDataset data = testing::random_panel(rng, 7, 2, 3, 20, 0.2);
        for (std::size_t i = 0; i < data.size(); ++i) {
            data.labels.push_back(regression ? std::to_string(0.5 * label_dist(rng))
                                             : "c" + std::to_string(label_dist(rng)));
        }
        std::ostringstream out;
        write_ts(data, "roundtrip", regression, out);
        const TsFile back = parse(out.str());

        REQUIRE(back.dataset.size() == data.size());
        CHECK(back.dataset.labels == data.labels);
        for (std::size_t i = 0; i < data.size(); ++i) {
            REQUIRE(back.dataset.series[i].signal_count() == data.series[i].signal_count());
            for (std::size_t k = 0; k < data.series[i].signal_count(); ++k) {
                const auto& a = data.series[i].signals[k].values;
                const auto& b = back.dataset.series[i].signals[k].values;
                REQUIRE(a.size() == b.size());
                for (std::size_t j = 0; j < a.size(); ++j) {
                    if (is_missing(a[j])) {
                        CHECK(is_missing(b[j]));
                    } else {
                        CHECK(a[j] == b[j]);
                    }
                }
            }
        }
    }
}

TEST_CASE("coo-tsv fixtures", "[io]") {
    SECTION("single triplet") {
        const SparseBag bag = bag_finalize(1, 3, {{0, 1, 4}});
        std::ostringstream out;
        write_sparse(bag, out, SparseFormat::coo_tsv);
        CHECK(out.str() == "1 3 1\n0\t1\t4\n");
    }
    SECTION("empty bag") {
        std::ostringstream out;
        write_sparse(SparseBag(2, 5), out, SparseFormat::coo_tsv);
        CHECK(out.str() == "2 5 0\n");
    }
    SECTION("write-read-write produces identical bytes") {
        std::mt19937 rng(103);
        std::uniform_int_distribution<std::uint32_t> row(0, 9), col(0, 19), cnt(1, 7);
        std::vector<CountTriplet> triplets;
        for (int i = 0; i < 40; ++i) triplets.push_back({row(rng), col(rng), cnt(rng)});
        const SparseBag bag = bag_finalize(10, 20, triplets);
        std::ostringstream first;
        write_sparse(bag, first, SparseFormat::coo_tsv);
        std::istringstream in(first.str());
        std::ostringstream second;
        write_sparse(read_sparse(in), second, SparseFormat::coo_tsv);
        CHECK(first.str() == second.str());
    }
}

TEST_CASE("svmlight rows carry labels and 0-based columns", "[io]") {
    const SparseBag bag = bag_finalize(3, 4, {{0, 0, 2}, {0, 3, 1}, {2, 1, 5}});
    std::ostringstream out;
    write_sparse(bag, out, SparseFormat::svmlight, {"1", "-1", "1"});
    CHECK(out.str() == "1 0:2 3:1\n-1\n1 1:5\n");

    std::ostringstream unlabeled;
    write_sparse(bag, unlabeled, SparseFormat::svmlight);
    CHECK(unlabeled.str() == "0 0:2 3:1\n0\n0 1:5\n");
}

TEST_CASE("model save/load round-trips transform output", "[io]") {
    std::mt19937 rng(107);
    const auto train = testing::random_panel(rng, 6, 2, 10, 30, 0.1);
    const auto grid = config_grid(train.max_signal_length(), tsc_defaults());
    const auto [model, bag] = fit(train, grid, Task::classification);

    std::ostringstream out;
    save_model(model, nullptr, out);
    std::istringstream in(out.str());
    const LoadedModel loaded = load_model(in);
    CHECK_FALSE(loaded.linear.has_value());
    CHECK(loaded.model.vocabulary() == model.vocabulary());
    CHECK(loaded.model.configs() == model.configs());
    CHECK(loaded.model.task() == model.task());

    const auto probe = testing::random_panel(rng, 4, 2, 10, 30, 0.1);
    const SparseBag a = transform(model, probe);
    const SparseBag b = transform(loaded.model, probe);
    CHECK(a == b);

    std::ostringstream a_doc, b_doc;
    write_sparse(a, a_doc, SparseFormat::coo_tsv);
    write_sparse(b, b_doc, SparseFormat::coo_tsv);
    CHECK(a_doc.str() == b_doc.str());

    // saving the loaded model reproduces the document byte-for-byte
    std::ostringstream resaved;
    save_model(loaded.model, nullptr, resaved);
    CHECK(resaved.str() == out.str());
}

TEST_CASE("model with a linear head round-trips", "[io]") {
    std::mt19937 rng(109);
    auto train = testing::random_panel(rng, 8, 1, 12, 24, 0.0);
    for (std::size_t i = 0; i < train.size(); ++i) {
        train.labels.push_back(i % 2 == 0 ? "up" : "down");
    }
    const auto grid = config_grid(train.max_signal_length(), tsc_defaults());
    const auto [model, bag] = fit(train, grid, Task::classification);
    const LinearModel lm = fit_linear(arcsinh_map(bag), train.labels, 1.0, ModelMode::classification);

    std::ostringstream out;
    save_model(model, &lm, out);
    std::istringstream in(out.str());
    const LoadedModel loaded = load_model(in);
    REQUIRE(loaded.linear.has_value());
    CHECK(loaded.linear->mode == ModelMode::classification);
    CHECK(loaded.linear->classes == lm.classes);
    CHECK(loaded.linear->lambda == lm.lambda);
    CHECK(loaded.linear->coefficients == lm.coefficients);
    CHECK(loaded.linear->intercepts == lm.intercepts);
}

TEST_CASE("empty-vocabulary model round-trips", "[io]") {
    // a signal shorter than every window span produces no words
    TimeSeriesDataset train;
    train.series.push_back(TimeSeries({Signal({1.0})}));
    BorfConfig cfg{0, 4, 1, 1, 2, 2, 1, 0.1};
    const auto [model, bag] = fit(train, {cfg}, Task::classification);
    CHECK(model.vocabulary().size() == 0);
    CHECK(bag.nnz() == 0);

    std::ostringstream out;
    save_model(model, nullptr, out);
    std::istringstream in(out.str());
    const LoadedModel loaded = load_model(in);
    CHECK(loaded.model.vocabulary().size() == 0);
}

TEST_CASE("model loader rejects corrupted documents", "[io]") {
    std::mt19937 rng(113);
    const auto train = testing::random_panel(rng, 3, 1, 10, 16, 0.0);
    BorfConfig cfg{0, 4, 1, 1, 2, 2, 2, 0.1};
    const auto [model, bag] = fit(train, {cfg}, Task::classification);
    std::ostringstream out;
    save_model(model, nullptr, out);
    const std::string good = out.str();

    SECTION("version mismatch") {
        std::istringstream in("borf-model v99\n" + good.substr(good.find('\n') + 1));
        CHECK_THROWS_WITH(load_model(in), Catch::Matchers::ContainsSubstring("version"));
    }
    SECTION("truncated file") {
        std::istringstream in(good.substr(0, good.size() / 2));
        CHECK_THROWS_AS(load_model(in), std::runtime_error);
    }
    SECTION("missing end marker") {
        std::istringstream in(good.substr(0, good.rfind("end\n")));
        CHECK_THROWS_AS(load_model(in), std::runtime_error);
    }
    SECTION("corrupted vocabulary entry") {
        // replace the first vocabulary word with junk of the same line count
        std::string bad = good;
        const std::size_t vocab_pos = bad.find("\nc0:");
        REQUIRE(vocab_pos != std::string::npos);
        const std::size_t line_end = bad.find('\n', vocab_pos + 1);
        bad.replace(vocab_pos + 1, line_end - vocab_pos - 1, "c0~junk");
        std::istringstream in(bad);
        CHECK_THROWS_WITH(load_model(in), Catch::Matchers::ContainsSubstring("vocabulary"));
    }
    SECTION("out-of-order vocabulary") {
        // swap two vocabulary lines
        std::istringstream scan(good);
        std::vector<std::string> lines;
        std::string l;
        while (std::getline(scan, l)) lines.push_back(l);
        std::size_t first = 0;
        for (std::size_t i = 0; i < lines.size(); ++i) {
            if (lines[i].rfind("vocab ", 0) == 0) first = i + 1;
        }
        if (model.vocabulary().size() >= 2) {
            std::swap(lines[first], lines[first + 1]);
            std::string swapped;
            for (const auto& ln : lines) swapped += ln + "\n";
            std::istringstream in(swapped);
            CHECK_THROWS_AS(load_model(in), std::runtime_error);
        }
    }
}

TEST_CASE("saliency document layout", "[io]") {
    TimeSeriesDataset data;
    data.series.push_back(TimeSeries({Signal({1, 2, 3, 4})}));
    BorfConfig cfg{0, 4, 1, 1, 1, 2, 1, 0.0};
    const auto [model, bag] = fit(data, {cfg}, Task::classification);
    Attribution attr{{1.0}, "external"};
    const Explanation ex = saliency(model, data.series[0], attr);

    std::ostringstream out;
    write_saliency(ex, model, out);
    const std::string doc = out.str();
    CHECK(doc.rfind("borf-saliency v1\n", 0) == 0);
    CHECK(doc.find("signals 1\n") != std::string::npos);
    CHECK(doc.find("degenerate 0\n") != std::string::npos);
    CHECK(doc.find("signal 0 4 0.25 0.25 0.25 0.25\n") != std::string::npos);
    CHECK(doc.find("residual 0\n") != std::string::npos);
    CHECK(doc.find("end\n") != std::string::npos);
}

TEST_CASE("external importance vectors are keyed by word keys", "[io]") {
    const auto data = [] {
        TimeSeriesDataset d;
        d.series.push_back(TimeSeries({Signal({1, 2, 3, 4, 5})}));
        return d;
    }();
    BorfConfig cfg{0, 2, 1, 1, 1, 2, 2, 0.0};
    const auto [model, bag] = fit(data, {cfg}, Task::classification);
    REQUIRE(model.vocabulary().size() == 1);
    const std::string key = word_key(model.vocabulary().word(0));

    std::istringstream in(key + " 0.75\n");
    const Attribution attr = read_attribution(in, model);
    CHECK(attr.phi == std::vector<double>{0.75});

    std::istringstream bad_key("c9:s9:NA 1.0\n");
    CHECK_THROWS_AS(read_attribution(bad_key, model), ParseError);
    std::istringstream bad_value(key + " xyz\n");
    CHECK_THROWS_AS(read_attribution(bad_value, model), std::runtime_error);
}
