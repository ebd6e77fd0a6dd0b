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

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "borf/borf.hpp"

namespace {

using namespace borf;

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open input file '" + path + "'");
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
    return out;
}

Task parse_task(const std::string& name) {
    return name == "tsc" ? Task::classification : Task::regression;
}

SparseFormat parse_format(const std::string& name) {
    return name == "svmlight" ? SparseFormat::svmlight : SparseFormat::coo_tsv;
}

TsFile load_dataset(const std::string& path) {
    std::ifstream in = open_input(path);
    return parse_ts(in);
}

LoadedModel load_model_file(const std::string& path) {
    std::ifstream in = open_input(path);
    return load_model(in);
}

struct GridFlags {
    std::vector<int> window_sizes;
    std::vector<int> dilations;
    std::vector<int> word_lengths;
    int stride = 1;
    std::optional<int> alpha_mean;
    std::optional<int> alpha_slope;
    std::optional<double> std_threshold;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--window-sizes", window_sizes, "explicit window sizes (default: heuristic)")
            ->delimiter(',');
        cmd->add_option("--dilations", dilations, "explicit dilations (default: heuristic)")
            ->delimiter(',');
        cmd->add_option("--word-lengths", word_lengths, "explicit word lengths (default: heuristic)")
            ->delimiter(',');
        cmd->add_option("--stride", stride, "window stride")->check(CLI::PositiveNumber);
        cmd->add_option_function<int>(
               "--alpha-mean", [this](const int& v) { alpha_mean = v; }, "mean alphabet size")
            ->check(CLI::PositiveNumber);
        cmd->add_option_function<int>(
               "--alpha-slope", [this](const int& v) { alpha_slope = v; }, "slope alphabet size")
            ->check(CLI::PositiveNumber);
        cmd->add_option_function<double>(
               "--std-threshold", [this](const double& v) { std_threshold = v; },
               "standardization threshold in [0, 1]")
            ->check(CLI::Range(0.0, 1.0));
    }

    std::vector<BorfConfig> build(std::size_t m_max, Task task) const {
        TaskDefaults defaults = defaults_for(task);
        if (alpha_mean) defaults.alpha_mean = *alpha_mean;
        if (alpha_slope) defaults.alpha_slope = *alpha_slope;
        if (std_threshold) defaults.beta = *std_threshold;

        const bool explicit_grid =
            !window_sizes.empty() || !dilations.empty() || !word_lengths.empty() || stride != 1;
        if (!explicit_grid) return config_grid(m_max, defaults);

        // axes not given explicitly fall back to the heuristic values
        const std::vector<BorfConfig> heuristic = config_grid(m_max, defaults);
        auto axis = [&heuristic](auto getter) {
            std::vector<int> vals;
            for (const auto& c : heuristic) {
                const int v = getter(c);
                if (std::find(vals.begin(), vals.end(), v) == vals.end()) vals.push_back(v);
            }
            return vals;
        };
        return config_grid_explicit(
            m_max,
            window_sizes.empty() ? axis([](const BorfConfig& c) { return c.w; }) : window_sizes,
            dilations.empty() ? axis([](const BorfConfig& c) { return c.d; }) : dilations,
            word_lengths.empty() ? axis([](const BorfConfig& c) { return c.l; }) : word_lengths,
            stride, defaults);
    }
};

int cmd_fit(const std::string& input, const std::string& task_name, const GridFlags& grid,
            const std::string& model_path, const std::string& bag_path) {
    const Task task = parse_task(task_name);
    const TsFile file = load_dataset(input);
    const unsigned workers = worker_count_from_env();
    const auto configs = grid.build(file.dataset.max_signal_length(), task);
    const auto [model, bag] = fit(file.dataset, configs, task, workers);

    std::ofstream out = open_output(model_path);
    save_model(model, nullptr, out);
    if (!bag_path.empty()) {
        std::ofstream bag_out = open_output(bag_path);
        write_sparse(bag, bag_out, SparseFormat::coo_tsv);
    }
    std::cerr << "fitted " << model.configs().size() << " configs, vocabulary "
              << model.vocabulary().size() << " words, " << bag.nnz() << " nonzeros\n";
    return 0;
}

int cmd_transform(const std::string& model_path, const std::string& input,
                  const std::string& output, const std::string& format) {
    const LoadedModel loaded = load_model_file(model_path);
    const TsFile file = load_dataset(input);
    const SparseBag bag = transform(loaded.model, file.dataset, worker_count_from_env());
    std::ofstream out = open_output(output);
    write_sparse(bag, out, parse_format(format), file.dataset.labels);
    return 0;
}

int cmd_train(const std::string& input, const std::string& task_name, const GridFlags& grid,
              const std::string& model_path, std::optional<double> lambda) {
    const Task task = parse_task(task_name);
    const TsFile file = load_dataset(input);
    if (!file.dataset.has_labels()) {
        throw std::runtime_error("train: dataset '" + input + "' has no labels");
    }
    const unsigned workers = worker_count_from_env();
    const auto configs = grid.build(file.dataset.max_signal_length(), task);
    const auto [model, bag] = fit(file.dataset, configs, task, workers);

    const ModelMode mode =
        task == Task::classification ? ModelMode::classification : ModelMode::regression;
    const double lam = lambda ? *lambda : (task == Task::classification ? 1.0 : 1e-2);
    const LinearModel lm = fit_linear(arcsinh_map(bag), file.dataset.labels, lam, mode, workers);

    std::ofstream out = open_output(model_path);
    save_model(model, &lm, out);
    std::cerr << "trained on " << file.dataset.size() << " series, vocabulary "
              << model.vocabulary().size() << " words\n";
    return 0;
}

int cmd_predict(const std::string& model_path, const std::string& input,
                const std::string& output, bool metrics) {
    const LoadedModel loaded = load_model_file(model_path);
    if (!loaded.linear) {
        throw std::runtime_error("model has no trained predictor; use the train command");
    }
    const TsFile file = load_dataset(input);
    const SparseBag bag = transform(loaded.model, file.dataset, worker_count_from_env());
    const SparseMatrix features = arcsinh_map(bag);

    std::ofstream out = open_output(output);
    std::vector<std::string> pred_labels;
    std::vector<double> pred_values;
    if (loaded.linear->mode == ModelMode::classification) {
        pred_labels = predict_labels(*loaded.linear, features);
        for (std::size_t i = 0; i < pred_labels.size(); ++i) {
            out << i << '\t' << pred_labels[i] << "\n";
        }
    } else {
        pred_values = predict_values(*loaded.linear, features);
        for (std::size_t i = 0; i < pred_values.size(); ++i) {
            out << i << '\t' << format_real(pred_values[i]) << "\n";
        }
    }

    if (metrics) {
        if (!file.dataset.has_labels()) {
            throw std::runtime_error("--metrics requires a labeled dataset");
        }
        if (loaded.linear->mode == ModelMode::classification) {
            std::cout << "bACC " << format_real(metric_bacc(file.dataset.labels, pred_labels))
                      << "\n";
        } else {
            std::vector<double> truth;
            for (const auto& t : file.dataset.labels) truth.push_back(std::stod(t));
            std::cout << "R2 " << format_real(metric_r2(truth, pred_values)) << "\n";
            try {
                std::cout << "MAPE " << format_real(metric_mape(truth, pred_values)) << "\n";
            } catch (const std::invalid_argument&) {
                std::cout << "MAPE undefined (zero target value)\n";
            }
        }
    }
    return 0;
}

int cmd_explain(const std::string& model_path, const std::string& input, std::size_t index,
                const std::string& importances, const std::string& target_class,
                const std::string& output) {
    const LoadedModel loaded = load_model_file(model_path);
    const TsFile file = load_dataset(input);
    if (index >= file.dataset.size()) {
        throw std::runtime_error("--index " + std::to_string(index) + " out of range (dataset has " +
                                 std::to_string(file.dataset.size()) + " series)");
    }
    const TimeSeries& instance = file.dataset.series[index];

    Attribution attr;
    if (!importances.empty()) {
        std::ifstream in = open_input(importances);
        attr = read_attribution(in, loaded.model);
    } else {
        if (!loaded.linear) {
            throw std::runtime_error(
                "no --importances file and the model has no trained predictor");
        }
        TimeSeriesDataset single;
        single.series.push_back(instance);
        const SparseMatrix features = arcsinh_map(transform(loaded.model, single, 1));
        std::size_t out_idx = 0;
        if (loaded.linear->mode == ModelMode::classification) {
            std::string cls = target_class;
            if (cls.empty()) cls = predict_labels(*loaded.linear, features)[0];
            const auto& classes = loaded.linear->classes;
            const auto it = std::find(classes.begin(), classes.end(), cls);
            if (it == classes.end()) {
                throw std::runtime_error("unknown class '" + cls + "'");
            }
            out_idx = static_cast<std::size_t>(it - classes.begin());
        }
        attr = linear_attribution(*loaded.linear, features, 0, out_idx);
    }

    const Explanation ex = saliency(loaded.model, instance, attr);
    std::ofstream out = open_output(output);
    write_saliency(ex, loaded.model, out);
    if (ex.saliency.degenerate) {
        std::cerr << "note: zero pre-scale mass; saliency map is all zeros\n";
    }
    return 0;
}

int cmd_vocab(const std::string& model_path, std::optional<int> config) {
    const LoadedModel loaded = load_model_file(model_path);
    const Vocabulary& vocab = loaded.model.vocabulary();
    std::uint32_t lo = 0, hi = vocab.size();
    if (config) {
        if (*config < 0 || static_cast<std::size_t>(*config) >= loaded.model.configs().size()) {
            throw std::runtime_error("--config out of range");
        }
        std::tie(lo, hi) = vocab.config_range(static_cast<std::uint32_t>(*config));
    }
    for (std::uint32_t col = lo; col < hi; ++col) {
        std::cout << col << '\t' << word_key(vocab.word(col)) << "\n";
    }
    std::cerr << (hi - lo) << " words" << (config ? " in config " + std::to_string(*config) : "")
              << " (vocabulary total " << vocab.size() << ")\n";
    return 0;
}

int cmd_stats(const std::string& bag_path) {
    std::ifstream in = open_input(bag_path);
    const SparseBag bag = read_sparse(in);
    const BagStats st = bag_stats(bag);
    std::cout << "rows " << bag.rows() << "\n";
    std::cout << "cols " << bag.cols() << "\n";
    std::cout << "nnz " << st.nnz << "\n";
    std::cout << "density " << format_real(st.density) << "\n";
    std::cout << "distinct-words " << st.distinct_words << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bag-of-receptive-fields transform for time series prediction"};
    app.require_subcommand(1);

    std::string input, model_path, output, bag_path, task_name, format = "coo-tsv";
    std::string importances, target_class;
    GridFlags grid;
    std::optional<double> lambda;
    std::size_t index = 0;
    std::optional<int> vocab_config;
    bool metrics = false;

    auto* fit_cmd = app.add_subcommand("fit", "fit the transform on a .ts dataset");
    fit_cmd->add_option("--input", input, ".ts training file")->required();
    fit_cmd->add_option("--task", task_name, "tsc or tser")
        ->required()
        ->check(CLI::IsMember({"tsc", "tser"}));
    grid.add_to(fit_cmd);
    fit_cmd->add_option("--model", model_path, "output model file")->required();
    fit_cmd->add_option("--bag", bag_path, "optional output bag (coo-tsv)");

    auto* transform_cmd = app.add_subcommand("transform", "apply a fitted model to a dataset");
    transform_cmd->add_option("--model", model_path, "model file")->required();
    transform_cmd->add_option("--input", input, ".ts input file")->required();
    transform_cmd->add_option("--output", output, "output sparse matrix")->required();
    transform_cmd->add_option("--format", format, "coo-tsv or svmlight")
        ->check(CLI::IsMember({"coo-tsv", "svmlight"}));

    auto* train_cmd = app.add_subcommand("train", "fit the transform plus the linear predictor");
    train_cmd->add_option("--input", input, ".ts training file")->required();
    train_cmd->add_option("--task", task_name, "tsc or tser")
        ->required()
        ->check(CLI::IsMember({"tsc", "tser"}));
    grid.add_to(train_cmd);
    train_cmd->add_option_function<double>(
            "--lambda", [&lambda](const double& v) { lambda = v; }, "ridge penalty")
        ->check(CLI::PositiveNumber);
    train_cmd->add_option("--model", model_path, "output model file")->required();

    auto* predict_cmd = app.add_subcommand("predict", "predict targets for a dataset");
    predict_cmd->add_option("--model", model_path, "model file")->required();
    predict_cmd->add_option("--input", input, ".ts input file")->required();
    predict_cmd->add_option("--output", output, "output predictions (tsv)")->required();
    predict_cmd->add_flag("--metrics", metrics, "print metrics against the dataset labels");

    auto* explain_cmd = app.add_subcommand("explain", "saliency map for one series");
    explain_cmd->add_option("--model", model_path, "model file")->required();
    explain_cmd->add_option("--input", input, ".ts input file")->required();
    explain_cmd->add_option("--index", index, "0-based series index")->required();
    explain_cmd->add_option("--importances", importances,
                            "importance file ('<word-key> <value>' lines); "
                            "default: built-in linear attribution");
    explain_cmd->add_option("--class", target_class,
                            "target class for the built-in attribution (default: predicted)");
    explain_cmd->add_option("--output", output, "output saliency document")->required();

    auto* vocab_cmd = app.add_subcommand("vocab", "list vocabulary words");
    vocab_cmd->add_option("--model", model_path, "model file")->required();
    vocab_cmd->add_option_function<int>(
        "--config", [&vocab_config](const int& v) { vocab_config = v; }, "restrict to one config");

    auto* stats_cmd = app.add_subcommand("stats", "statistics of a coo-tsv bag file");
    stats_cmd->add_option("--bag", bag_path, "bag file (coo-tsv)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(fit_cmd)) return cmd_fit(input, task_name, grid, model_path, bag_path);
        if (app.got_subcommand(transform_cmd)) return cmd_transform(model_path, input, output, format);
        if (app.got_subcommand(train_cmd)) return cmd_train(input, task_name, grid, model_path, lambda);
        if (app.got_subcommand(predict_cmd)) return cmd_predict(model_path, input, output, metrics);
        if (app.got_subcommand(explain_cmd)) {
            return cmd_explain(model_path, input, index, importances, target_class, output);
        }
        if (app.got_subcommand(vocab_cmd)) return cmd_vocab(model_path, vocab_config);
        if (app.got_subcommand(stats_cmd)) return cmd_stats(bag_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
