// Command-line front end: identification, simulation, validation and a small
// benchmark table over the built-in decaying-exponential system.

#include "vttn/datagen.hpp"
#include "vttn/metrics.hpp"
#include "vttn/model_io.hpp"
#include "vttn/oracle.hpp"
#include "vttn/regressor.hpp"
#include "vttn/solvers.hpp"
#include "vttn/tn_model.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace vttn;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct IdentifyArgs {
    std::string data_path;
    std::string out_path;
    std::string report_path;
    Index p = 1, l = 1, M = 1, d = 1;
    std::string algo = "mals";
    std::vector<Index> ranks;
    double tol = 1e-4;
    int max_sweeps = 50;
    Index max_rank = 50;
    std::uint64_t seed = 0;
    Index train_n = 0;  // 0: auto (700 when N == 5000, else all samples)
};

int run_identify(const IdentifyArgs& args) {
    const TimeSeriesDataset full = io::load_csv(args.data_path);
    if (full.num_inputs() != args.p || full.num_outputs() != args.l) {
        throw std::invalid_argument("data file has " + std::to_string(full.num_inputs()) + " inputs / " +
                                    std::to_string(full.num_outputs()) + " outputs, flags say " +
                                    std::to_string(args.p) + " / " + std::to_string(args.l));
    }
    Index train_n = args.train_n;
    if (train_n == 0) train_n = full.num_samples() == 5000 ? 700 : full.num_samples();
    if (train_n < 1 || train_n > full.num_samples()) {
        throw std::invalid_argument("--train-n out of range");
    }
    const TimeSeriesDataset train = full.head(train_n);

    SolverConfig config;
    config.algorithm = args.algo == "als" ? Algorithm::kAls : Algorithm::kMals;
    config.ranks = args.ranks;
    config.residual_tol = args.tol;
    config.max_sweeps = args.max_sweeps;
    config.max_rank = args.max_rank;
    config.seed = args.seed;

    const auto start = Clock::now();
    const auto [model, report] = identify(train, args.p, args.l, args.M, args.d, config);
    const double elapsed = seconds_since(start);

    io::save_model(args.out_path, model);
    const std::string text = io::report_text(model, report, config);
    const std::string report_path =
        args.report_path.empty() ? args.out_path + ".report" : args.report_path;
    std::ofstream(report_path) << text;

    std::cout << text;
    std::cout << "train_n=" << train_n << "\n";
    std::cout << "model_file=" << args.out_path << "\n";
    std::printf("elapsed_s=%.3f\n", elapsed);  // informational, not in the report file
    return report.converged ? 0 : 2;
}

void check_model_data(const VolterraModel& model, const TimeSeriesDataset& data, bool need_outputs) {
    if (data.num_inputs() != model.p) {
        throw std::invalid_argument("model expects " + std::to_string(model.p) +
                                    " input channels, data file has " + std::to_string(data.num_inputs()));
    }
    if (need_outputs && data.num_outputs() != model.l) {
        throw std::invalid_argument("model expects " + std::to_string(model.l) +
                                    " output channels, data file has " + std::to_string(data.num_outputs()));
    }
}

int run_simulate(const std::string& model_path, const std::string& data_path,
                 const std::string& out_path, Index skip) {
    const VolterraModel model = io::load_model(model_path);
    const TimeSeriesDataset data = io::load_csv(data_path);
    check_model_data(model, data, false);
    if (skip < 0 || skip >= data.num_samples()) throw std::invalid_argument("--skip out of range");

    const Eigen::MatrixXd yhat = simulate_series(model, data);
    io::save_outputs_csv(out_path, yhat.bottomRows(yhat.rows() - skip));
    std::cout << "samples=" << yhat.rows() - skip << "\n";
    std::cout << "output_file=" << out_path << "\n";
    return 0;
}

int run_validate(const std::string& model_path, const std::string& data_path,
                 const std::string& ref_path, Index skip) {
    const VolterraModel model = io::load_model(model_path);
    const TimeSeriesDataset data = io::load_csv(data_path);
    check_model_data(model, data, true);
    if (skip < 0 || skip >= data.num_samples()) throw std::invalid_argument("--skip out of range");

    const Eigen::MatrixXd yhat = simulate_series(model, data);
    const Index n_eval = data.num_samples() - skip;
    const double residual =
        relative_residual(data.outputs.bottomRows(n_eval), yhat.bottomRows(n_eval));
    std::cout << "n_eval=" << n_eval << "\n";
    std::printf("residual=%.17g\n", residual);

    if (!ref_path.empty()) {
        const Eigen::MatrixXd ref = io::load_outputs_csv(ref_path);
        if (ref.rows() != data.num_samples() || ref.cols() != model.l) {
            throw std::invalid_argument("reference output shape does not match the data file");
        }
        const double sim_snr = snr_db(ref.bottomRows(n_eval), yhat.bottomRows(n_eval));
        std::printf("sim_snr_db=%.17g\n", sim_snr);
    }
    return 0;
}

struct BenchArgs {
    std::vector<Index> degrees;
    std::vector<std::string> methods{"direct", "als", "mals"};
    std::uint64_t seed = 42;
    Index memory = 7;
    Index n_samples = 5000;
    Index train_n = 700;
    double tol = 1e-4;
};

int run_bench(const BenchArgs& args) {
    if (args.degrees.empty()) throw std::invalid_argument("--degrees must list at least one degree");

    std::printf("%-7s %-7s %-12s %-9s %-12s %-9s\n", "degree", "method", "residual", "max_rank",
                "full_count", "time_s");
    for (Index d : args.degrees) {
        TimeSeriesDataset full;
        full.inputs = datagen::uniform_inputs(args.n_samples, args.seed);
        full.outputs = datagen::simulate_truth_exp(d, full.inputs.col(0), args.memory);
        const TimeSeriesDataset train = full.head(std::min(args.train_n, args.n_samples));
        const Index n_valid = full.num_samples() - train.num_samples();

        const auto validate = [&](const Eigen::MatrixXd& yhat) {
            if (n_valid == 0) return relative_residual(full.outputs, yhat);
            return relative_residual(full.outputs.bottomRows(n_valid), yhat.bottomRows(n_valid));
        };
        const FullCount count = full_count(1, args.memory, d);
        const std::string count_text = count.overflow ? "overflow" : std::to_string(count.value);

        std::vector<Index> mals_ranks;
        for (const std::string& method : args.methods) {
            const auto start = Clock::now();
            try {
                if (method == "direct") {
                    const auto sol = oracle::solve_direct(train, 1, 1, args.memory, d);
                    Eigen::MatrixXd yhat(full.num_samples(), 1);
                    for (Index t = 0; t < full.num_samples(); ++t) {
                        yhat(t, 0) = sol.v1.row(0).dot(
                            kron_power(build_ut(full, t, args.memory), d));
                    }
                    std::printf("%-7lld %-7s %-12.3e %-9s %-12s %-9.2f\n", (long long)d, "direct",
                                validate(yhat), "-", count_text.c_str(), seconds_since(start));
                } else {
                    SolverConfig config;
                    config.residual_tol = args.tol;
                    config.seed = args.seed;
                    if (method == "als") {
                        if (mals_ranks.empty()) {
                            SolverConfig probe;
                            probe.residual_tol = args.tol;
                            probe.seed = args.seed;
                            const auto [m, r] = identify(train, 1, 1, args.memory, d, probe);
                            mals_ranks.assign(r.final_ranks.begin() + 1, r.final_ranks.end() - 1);
                        }
                        config.algorithm = Algorithm::kAls;
                        config.ranks = mals_ranks;
                    }
                    const auto [model, report] = identify(train, 1, 1, args.memory, d, config);
                    if (method == "mals") {
                        mals_ranks.assign(report.final_ranks.begin() + 1, report.final_ranks.end() - 1);
                    }
                    const Eigen::MatrixXd yhat = simulate_series(model, full);
                    std::printf("%-7lld %-7s %-12.3e %-9lld %-12s %-9.2f\n", (long long)d,
                                method.c_str(), validate(yhat), (long long)model.max_rank(),
                                count_text.c_str(), seconds_since(start));
                }
            } catch (const std::exception& e) {
                std::printf("%-7lld %-7s %-12s %-9s %-12s %-9.2f\n", (long long)d, method.c_str(),
                            "NA", "-", count_text.c_str(), seconds_since(start));
                std::fprintf(stderr, "note: d=%lld %s: %s\n", (long long)d, method.c_str(), e.what());
            }
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MIMO Volterra system identification in tensor-network form"};
    app.require_subcommand(1);

    IdentifyArgs id_args;
    CLI::App* identify_cmd = app.add_subcommand("identify", "Fit a Volterra model to input/output data");
    identify_cmd->add_option("--data", id_args.data_path, "dataset CSV (u1..up, y1..yl)")->required();
    identify_cmd->add_option("--p", id_args.p, "input channel count")->required();
    identify_cmd->add_option("--l", id_args.l, "output channel count")->required();
    identify_cmd->add_option("--M", id_args.M, "memory length in samples")->required();
    identify_cmd->add_option("--d", id_args.d, "polynomial degree")->required();
    identify_cmd->add_option("--algo", id_args.algo, "als or mals")
        ->check(CLI::IsMember({"als", "mals"}))
        ->default_val("mals");
    identify_cmd->add_option("--ranks", id_args.ranks, "ALS ranks r1,..,r_{d-1}")->delimiter(',');
    identify_cmd->add_option("--tol", id_args.tol, "relative residual tolerance")->default_val(1e-4);
    identify_cmd->add_option("--max-sweeps", id_args.max_sweeps)->default_val(50);
    identify_cmd->add_option("--max-rank", id_args.max_rank, "MALS rank cap")->default_val(50);
    identify_cmd->add_option("--seed", id_args.seed)->default_val(0);
    identify_cmd->add_option("--train-n", id_args.train_n,
                             "training samples (default: 700 when N is 5000, else all)");
    identify_cmd->add_option("--out", id_args.out_path, "model file to write")->required();
    identify_cmd->add_option("--report", id_args.report_path, "report file (default: <out>.report)");

    std::string sim_model, sim_data, sim_out;
    Index sim_skip = 0;
    CLI::App* simulate_cmd = app.add_subcommand("simulate", "Simulate model outputs over a dataset");
    simulate_cmd->add_option("--model", sim_model)->required();
    simulate_cmd->add_option("--data", sim_data)->required();
    simulate_cmd->add_option("--out", sim_out, "predictions CSV")->required();
    simulate_cmd->add_option("--skip", sim_skip, "drop the first N samples from the output");

    std::string val_model, val_data, val_ref;
    Index val_skip = 0;
    CLI::App* validate_cmd = app.add_subcommand("validate", "Report the relative residual on a dataset");
    validate_cmd->add_option("--model", val_model)->required();
    validate_cmd->add_option("--data", val_data)->required();
    validate_cmd->add_option("--ref", val_ref, "clean reference outputs; adds simulated-output SNR");
    validate_cmd->add_option("--skip", val_skip, "evaluate samples t >= skip only");

    BenchArgs bench_args;
    CLI::App* bench_cmd = app.add_subcommand("bench", "Identification benchmark on the decaying-exponential system");
    bench_cmd->add_option("--degrees", bench_args.degrees, "degrees to run")->delimiter(',')->required();
    bench_cmd->add_option("--methods", bench_args.methods, "subset of direct,als,mals")->delimiter(',');
    bench_cmd->add_option("--seed", bench_args.seed)->default_val(42);
    bench_cmd->add_option("--M", bench_args.memory)->default_val(7);
    bench_cmd->add_option("--N", bench_args.n_samples)->default_val(5000);
    bench_cmd->add_option("--train-n", bench_args.train_n)->default_val(700);
    bench_cmd->add_option("--tol", bench_args.tol)->default_val(1e-4);

    CLI11_PARSE(app, argc, argv);

    try {
        if (identify_cmd->parsed()) return run_identify(id_args);
        if (simulate_cmd->parsed()) return run_simulate(sim_model, sim_data, sim_out, sim_skip);
        if (validate_cmd->parsed()) return run_validate(val_model, val_data, val_ref, val_skip);
        if (bench_cmd->parsed()) return run_bench(bench_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
