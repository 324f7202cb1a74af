#include <CLI11.hpp>
#include <Eigen/Dense>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "genrbf/bench.hpp"
#include "genrbf/dataset.hpp"
#include "genrbf/density.hpp"
#include "genrbf/error.hpp"
#include "genrbf/kernel.hpp"
#include "genrbf/missingness.hpp"
#include "genrbf/parallel.hpp"
#include "genrbf/representation.hpp"
#include "genrbf/stats.hpp"
#include "genrbf/subspace.hpp"
#include "genrbf/svm.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw genrbf::Error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw genrbf::Error("cannot open file for writing: " + path);
    out << content;
}

fs::path default_out_dir() {
    if (const char* env = std::getenv("GENRBF_OUT")) return env;
    return ".";
}

void write_manifest(const fs::path& dir, const std::string& command, const json& resolved) {
    json manifest;
    manifest["command"] = command;
    manifest["config"] = resolved;
    write_file((dir / (command + "_manifest.json")).string(), manifest.dump(2));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"genRBF: Gaussian RBF kernel generalized to incomplete data"};
    app.require_subcommand(1);

    std::string out_dir_flag = default_out_dir().string();
    int threads = 0;
    app.add_option("--out", out_dir_flag, "output directory (env GENRBF_OUT)");
    app.add_option("--threads", threads, "worker thread bound, 0 = all cores");

    // ---- inject ----
    auto* inject_cmd = app.add_subcommand("inject", "inject missing entries into a complete CSV");
    std::string inject_input, inject_mech = "mcar", inject_output;
    double inject_p = 0.3;
    std::uint64_t inject_seed = 0;
    inject_cmd->add_option("input", inject_input, "complete dataset CSV")->required();
    inject_cmd->add_option("--mech", inject_mech, "mcar | mar | nmar");
    inject_cmd->add_option("--p", inject_p, "target missing fraction in (0,1)");
    inject_cmd->add_option("--seed", inject_seed, "random seed");
    inject_cmd->add_option("--output", inject_output, "output CSV (default <out>/injected.csv)");

    // ---- estimate ----
    auto* estimate_cmd = app.add_subcommand("estimate", "fit the Gaussian density by EM");
    std::string est_input, est_output;
    int est_max_iters = 200;
    double est_tol = 1e-6, est_ridge = -1.0;
    estimate_cmd->add_option("input", est_input, "dataset CSV (may contain NA cells)")->required();
    estimate_cmd->add_option("--max-iters", est_max_iters, "EM iteration cap");
    estimate_cmd->add_option("--tol", est_tol, "log-likelihood tolerance");
    estimate_cmd->add_option("--ridge", est_ridge, "covariance ridge (<0 = automatic)");
    estimate_cmd->add_option("--output", est_output, "model JSON (default <out>/model.json)");

    // ---- gram ----
    auto* gram_cmd = app.add_subcommand("gram", "compute the genRBF Gram matrix of a dataset");
    std::string gram_input, gram_output, gram_format = "csv";
    double gram_gamma = 1.0;
    bool gram_whiten = false;
    gram_cmd->add_option("input", gram_input, "dataset CSV")->required();
    gram_cmd->add_option("--gamma", gram_gamma, "kernel parameter gamma > 0");
    gram_cmd->add_option("--format", gram_format, "csv | binary");
    gram_cmd->add_flag("--whiten", gram_whiten, "whiten subspaces by the estimated Gaussian first");
    gram_cmd->add_option("--output", gram_output, "output path (default <out>/gram.<ext>)");

    // ---- train ----
    auto* train_cmd = app.add_subcommand("train", "train an SVM on a dataset with genRBF");
    std::string train_input, train_output;
    double train_c = 1.0, train_gamma = 1.0, train_tol = 1e-3;
    train_cmd->add_option("input", train_input, "training dataset CSV")->required();
    train_cmd->add_option("--C", train_c, "margin parameter");
    train_cmd->add_option("--gamma", train_gamma, "kernel parameter");
    train_cmd->add_option("--tol", train_tol, "KKT tolerance");
    train_cmd->add_option("--output", train_output, "model JSON (default <out>/svm.json)");

    // ---- predict ----
    auto* predict_cmd = app.add_subcommand("predict", "predict labels with a trained SVM");
    std::string pred_model, pred_input, pred_output;
    predict_cmd->add_option("model", pred_model, "SVM model JSON from `train`")->required();
    predict_cmd->add_option("input", pred_input, "dataset CSV to classify")->required();
    predict_cmd->add_option("--output", pred_output, "predictions CSV (default <out>/predictions.csv)");

    // ---- benchmark ----
    auto* bench_cmd = app.add_subcommand("benchmark", "run the cross-validation benchmark");
    std::string bench_config;
    std::vector<std::string> bench_datasets;
    std::vector<std::string> bench_mechs{"mcar"};
    std::vector<double> bench_fractions{0.3};
    bench_cmd->add_option("--config", bench_config, "ExperimentConfig JSON")->required();
    bench_cmd->add_option("--data", bench_datasets, "dataset CSVs (name taken from filename)")
        ->required();
    bench_cmd->add_option("--mech", bench_mechs, "mechanisms to run");
    bench_cmd->add_option("--p", bench_fractions, "missing fractions");

    // ---- rank ----
    auto* rank_cmd = app.add_subcommand("rank", "rank methods from a benchmark summary");
    std::string rank_summary;
    double rank_alpha = 0.05;
    rank_cmd->add_option("summary", rank_summary, "summary JSON from `benchmark`")->required();
    rank_cmd->add_option("--alpha", rank_alpha, "significance level (0.05 or 0.10)");

    CLI11_PARSE(app, argc, argv);
    genrbf::set_thread_count(threads);

    fs::path out_dir(out_dir_flag);
    std::error_code ec;
    fs::create_directories(out_dir, ec);

    try {
        if (*inject_cmd) {
            genrbf::Dataset data = genrbf::load_csv(inject_input);
            genrbf::InjectionReport report;
            genrbf::Dataset corrupted = genrbf::inject(
                data, genrbf::mechanism_from_string(inject_mech), inject_p, inject_seed, &report);
            std::string out_path =
                inject_output.empty() ? (out_dir / "injected.csv").string() : inject_output;
            genrbf::save_csv(corrupted, out_path);
            write_file(out_path + ".mask.json", report.to_json());
            write_manifest(out_dir, "inject",
                           json{{"input", inject_input},
                                {"mechanism", inject_mech},
                                {"p", inject_p},
                                {"seed", inject_seed},
                                {"output", out_path}});
            std::cout << "wrote " << out_path << " (realized fraction "
                      << report.realized_fraction << ")\n";
        } else if (*estimate_cmd) {
            genrbf::Dataset data = genrbf::load_csv(est_input);
            genrbf::EmOptions opts{est_max_iters, est_tol, est_ridge};
            genrbf::GaussianModel model = genrbf::estimate_em(data, opts);
            std::string out_path =
                est_output.empty() ? (out_dir / "model.json").string() : est_output;
            write_file(out_path, model.to_json());
            write_manifest(out_dir, "estimate",
                           json{{"input", est_input},
                                {"max_iters", est_max_iters},
                                {"tol", est_tol},
                                {"ridge", est_ridge},
                                {"output", out_path}});
            std::cout << "wrote " << out_path << "\n";
        } else if (*gram_cmd) {
            genrbf::Dataset data = genrbf::load_csv(gram_input);
            genrbf::GaussianModel model = genrbf::estimate_em(data);
            auto subspaces = genrbf::from_dataset(data);
            if (gram_whiten) {
                for (auto& s : subspaces) s = genrbf::whiten(s, model.covariance, model.mean);
                genrbf::GaussianModel whitened = model;
                whitened.mean = Eigen::VectorXd::Zero(model.dim());
                whitened.covariance = Eigen::MatrixXd::Identity(model.dim(), model.dim());
                model = whitened;
            }
            auto reps = genrbf::condition_all(model, subspaces);
            genrbf::GramMatrix g = genrbf::gram(reps, genrbf::KernelParams{gram_gamma});
            std::string out_path = gram_output;
            if (out_path.empty())
                out_path =
                    (out_dir / (gram_format == "binary" ? "gram.bin" : "gram.csv")).string();
            if (gram_format == "binary")
                genrbf::save_gram_binary(g, out_path);
            else
                genrbf::save_gram_csv(g, out_path);
            write_manifest(out_dir, "gram",
                           json{{"input", gram_input},
                                {"gamma", gram_gamma},
                                {"whiten", gram_whiten},
                                {"format", gram_format},
                                {"output", out_path}});
            std::cout << "wrote " << out_path << "\n";
        } else if (*train_cmd) {
            genrbf::Dataset raw = genrbf::load_csv(train_input);
            genrbf::StandardizationParams std_params = genrbf::fit_standardization(raw);
            genrbf::Dataset data = genrbf::apply_standardization(raw, std_params);
            genrbf::GaussianModel model = genrbf::estimate_em(data);
            auto reps = genrbf::condition_all(model, genrbf::from_dataset(data));
            genrbf::KernelParams params{train_gamma};
            genrbf::GramMatrix g = genrbf::gram(reps, params);
            genrbf::SvmOptions svm_opts;
            svm_opts.tol = train_tol;
            genrbf::SvmModel svm = genrbf::train(g, data.labels, train_c, svm_opts);
            svm.params = params;
            for (int s : svm.support_indices) svm.support_reps.push_back(reps[s]);
            std::string out_path =
                train_output.empty() ? (out_dir / "svm.json").string() : train_output;
            write_file(out_path, svm.to_json());
            // prediction needs the same preprocessing chain
            json side;
            side["standardization_mean"] =
                std::vector<double>(std_params.mean.data(),
                                    std_params.mean.data() + std_params.mean.size());
            side["standardization_sd"] =
                std::vector<double>(std_params.stddev.data(),
                                    std_params.stddev.data() + std_params.stddev.size());
            side["gaussian_model"] = json::parse(model.to_json());
            write_file(out_path + ".pipeline.json", side.dump(2));
            write_manifest(out_dir, "train",
                           json{{"input", train_input},
                                {"C", train_c},
                                {"gamma", train_gamma},
                                {"tol", train_tol},
                                {"output", out_path}});
            std::cout << "wrote " << out_path << " (" << svm.support_indices.size()
                      << " support vectors)\n";
        } else if (*predict_cmd) {
            genrbf::SvmModel svm = genrbf::SvmModel::from_json(read_file(pred_model));
            json side = json::parse(read_file(pred_model + ".pipeline.json"));
            genrbf::StandardizationParams std_params;
            auto mv = side.at("standardization_mean").get<std::vector<double>>();
            auto sv = side.at("standardization_sd").get<std::vector<double>>();
            std_params.mean = Eigen::Map<Eigen::VectorXd>(mv.data(), mv.size());
            std_params.stddev = Eigen::Map<Eigen::VectorXd>(sv.data(), sv.size());
            genrbf::GaussianModel model =
                genrbf::GaussianModel::from_json(side.at("gaussian_model").dump());
            genrbf::Dataset data = genrbf::apply_standardization(
                genrbf::load_csv(pred_input), std_params);
            auto reps = genrbf::condition_all(model, genrbf::from_dataset(data));
            Eigen::MatrixXd cross = genrbf::gram_cross(reps, svm.support_reps, svm.params);
            std::vector<int> labels = genrbf::predict(svm, cross);
            std::string out_path =
                pred_output.empty() ? (out_dir / "predictions.csv").string() : pred_output;
            std::ofstream out(out_path);
            out << "prediction\n";
            for (int y : labels) out << y << '\n';
            write_manifest(out_dir, "predict",
                           json{{"model", pred_model}, {"input", pred_input}, {"output", out_path}});
            std::cout << "wrote " << out_path << "\n";
        } else if (*bench_cmd) {
            genrbf::ExperimentConfig config =
                genrbf::ExperimentConfig::from_json(read_file(bench_config));
            std::vector<std::pair<std::string, genrbf::Dataset>> datasets;
            for (const auto& path : bench_datasets)
                datasets.emplace_back(fs::path(path).stem().string(), genrbf::load_csv(path));
            std::vector<genrbf::Mechanism> mechs;
            for (const auto& m : bench_mechs) mechs.push_back(genrbf::mechanism_from_string(m));
            genrbf::BenchmarkResult result =
                genrbf::run_benchmark(datasets, mechs, bench_fractions, config);
            result.write_csv((out_dir / "results.csv").string());
            write_file((out_dir / "summary.json").string(), result.summary_json());

            // rank table over (dataset, mechanism, p) rows
            std::vector<std::vector<double>> acc;
            json rank_rows = json::array();
            bool complete_table = true;
            for (const auto& [name, data] : datasets)
                for (auto mech : mechs)
                    for (double p : bench_fractions) {
                        std::vector<double> row;
                        for (const auto& method : config.methods) {
                            auto it = result.summary.find(genrbf::BenchmarkResult::key(
                                name, genrbf::to_string(mech), p, method));
                            if (it == result.summary.end() || !it->second.error.empty()) {
                                complete_table = false;
                                break;
                            }
                            row.push_back(it->second.mean_accuracy);
                        }
                        if (row.size() == config.methods.size()) {
                            acc.push_back(row);
                            rank_rows.push_back(json{{"dataset", name},
                                                     {"mechanism", genrbf::to_string(mech)},
                                                     {"p", p}});
                        }
                    }
            if (acc.size() >= 2 && config.methods.size() >= 2) {
                genrbf::RankTable table = genrbf::rank_methods(config.methods, acc);
                genrbf::FriedmanResult fr = genrbf::friedman_test(table);
                double cd = config.methods.size() <= 10
                                ? genrbf::nemenyi_cd(static_cast<int>(config.methods.size()),
                                                     table.rows(), 0.05)
                                : 0.0;
                json j;
                j["methods"] = table.methods;
                j["mean_ranks"] = table.mean_ranks;
                j["rows"] = rank_rows;
                j["friedman"] = {{"statistic", fr.statistic},
                                 {"df", fr.degrees_of_freedom},
                                 {"p_value", fr.p_value}};
                j["nemenyi_cd"] = cd;
                json groups = json::array();
                for (const auto& g : genrbf::nemenyi_groups(table.mean_ranks, cd))
                    groups.push_back(g);
                j["groups"] = groups;
                j["rank_mode"] = "per (dataset, mechanism, p) row";
                write_file((out_dir / "ranks.json").string(), j.dump(2));
            }
            write_manifest(out_dir, "benchmark",
                           json{{"config", json::parse(config.to_json())},
                                {"datasets", bench_datasets},
                                {"mechanisms", bench_mechs},
                                {"fractions", bench_fractions}});
            std::cout << "wrote " << (out_dir / "results.csv").string() << ", summary.json"
                      << (acc.size() >= 2 ? ", ranks.json" : "") << "\n";
            if (result.any_errors() || !complete_table) {
                std::cerr << "some cells failed; see summary.json\n";
                return 2;
            }
        } else if (*rank_cmd) {
            json summary = json::parse(read_file(rank_summary));
            // rows keyed dataset|mechanism|p, columns = methods
            std::map<std::string, std::map<std::string, double>> table;
            std::set<std::string> methods;
            for (auto it = summary.begin(); it != summary.end(); ++it) {
                const std::string& key = it.key();
                auto pos = key.rfind('|');
                if (pos == std::string::npos) continue;
                std::string cfg_key = key.substr(0, pos);
                std::string method = key.substr(pos + 1);
                if (it.value().contains("error")) continue;
                table[cfg_key][method] = it.value().at("mean_accuracy").get<double>();
                methods.insert(method);
            }
            std::vector<std::string> method_list(methods.begin(), methods.end());
            std::vector<std::vector<double>> acc;
            for (const auto& [cfg_key, row] : table) {
                std::vector<double> r;
                for (const auto& m : method_list) {
                    auto it = row.find(m);
                    if (it == row.end())
                        throw genrbf::Error("configuration " + cfg_key +
                                            " is missing method " + m);
                    r.push_back(it->second);
                }
                acc.push_back(r);
            }
            genrbf::RankTable rt = genrbf::rank_methods(method_list, acc);
            genrbf::FriedmanResult fr = genrbf::friedman_test(rt);
            double cd = genrbf::nemenyi_cd(static_cast<int>(method_list.size()), rt.rows(),
                                           rank_alpha);
            json j;
            j["methods"] = rt.methods;
            j["mean_ranks"] = rt.mean_ranks;
            j["friedman"] = {{"statistic", fr.statistic},
                             {"df", fr.degrees_of_freedom},
                             {"p_value", fr.p_value}};
            j["nemenyi_cd"] = cd;
            json groups = json::array();
            for (const auto& g : genrbf::nemenyi_groups(rt.mean_ranks, cd)) groups.push_back(g);
            j["groups"] = groups;
            write_file((out_dir / "ranks.json").string(), j.dump(2));
            std::cout << "wrote " << (out_dir / "ranks.json").string() << "\n";
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
