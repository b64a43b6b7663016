#include "vttn/datagen.hpp"

#include "vttn/regressor.hpp"
#include "vttn/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace vttn {
namespace datagen {

DenseTensor decaying_exp_kernel(Index i, Index M) {
    if (i < 1 || M < 1) throw std::invalid_argument("decaying_exp_kernel: degree and memory must be >= 1");
    DenseTensor kernel(std::vector<Index>(static_cast<std::size_t>(i), M));

    std::unordered_map<Index, double> orbit_values;
    std::vector<Index> idx(static_cast<std::size_t>(i), 0);
    std::vector<Index> sorted(static_cast<std::size_t>(i));
    for (Index flat = 0; flat < kernel.size(); ++flat) {
        sorted = idx;
        std::sort(sorted.begin(), sorted.end());
        Index key = 0;
        for (Index k = i - 1; k >= 0; --k) key = key * M + sorted[static_cast<std::size_t>(k)];
        auto it = orbit_values.find(key);
        if (it == orbit_values.end()) {
            double exponent = 0.0;
            for (Index lag : sorted) {
                const double v = 0.1 * static_cast<double>(lag);
                exponent -= v * v;
            }
            it = orbit_values.emplace(key, std::exp(exponent)).first;
        }
        kernel[flat] = it->second;
        for (Index k = 0; k < i; ++k) {
            if (++idx[static_cast<std::size_t>(k)] < M) break;
            idx[static_cast<std::size_t>(k)] = 0;
        }
    }
    return kernel;
}

Eigen::VectorXd simulate_truth_exp(Index d, const Eigen::Ref<const Eigen::VectorXd>& input,
                                   Index M) {
    if (d < 1) throw std::invalid_argument("simulate_truth_exp: degree must be >= 1");
    const FullCount largest = full_count(1, M - 1, d);  // M^d
    if (largest.overflow) throw BudgetError("simulate_truth_exp: M^d overflows");
    check_element_budget(largest.value, "simulate_truth_exp");

    std::vector<DenseTensor> kernels;
    kernels.reserve(static_cast<std::size_t>(d));
    for (Index i = 1; i <= d; ++i) kernels.push_back(decaying_exp_kernel(i, M));

    const Index N = input.size();
    Eigen::VectorXd y = Eigen::VectorXd::Zero(N);
    Eigen::VectorXd lags(M);
    for (Index t = 0; t < N; ++t) {
        for (Index k = 0; k < M; ++k) lags(k) = t - k >= 0 ? input(t - k) : 0.0;
        double acc = 0.0;  // constant term h0 is zero
        for (const DenseTensor& kernel : kernels) acc += contract(kernel, lags);
        y(t) = acc;
    }
    return y;
}

Eigen::VectorXd uniform_inputs(Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    Eigen::VectorXd u(n);
    for (Index t = 0; t < n; ++t) u(t) = uniform(rng);
    return u;
}

TimeSeriesDataset decaying_exp_dataset(Index d, Index n_samples, std::uint64_t seed, Index M) {
    TimeSeriesDataset data;
    data.inputs = uniform_inputs(n_samples, seed);
    data.outputs = simulate_truth_exp(d, data.inputs.col(0), M);
    return data;
}

TimeSeriesDataset mixer_signals(double fs, double duration) {
    if (fs <= 0.0 || duration <= 0.0) throw std::invalid_argument("mixer_signals: fs and duration must be positive");
    const Index n = static_cast<Index>(std::llround(fs * duration));
    constexpr double lo_hz = 100.0;
    constexpr double if_hz = 300.0;
    constexpr double phase = std::numbers::pi / 8.0;

    TimeSeriesDataset data;
    data.inputs.resize(n, 2);
    data.outputs.resize(n, 1);
    data.sample_rate_hz = fs;
    for (Index t = 0; t < n; ++t) {
        const double time = static_cast<double>(t) / fs;
        const double lo = std::sin(2.0 * std::numbers::pi * lo_hz * time);
        const double raw = std::sin(2.0 * std::numbers::pi * if_hz * time + phase);
        const double sq = raw < 0.0 ? -1.0 : 1.0;  // sign(0) := +1
        data.inputs(t, 0) = lo;
        data.inputs(t, 1) = sq;
        data.outputs(t, 0) = lo * sq;
    }
    return data;
}

Eigen::MatrixXd add_noise(const Eigen::Ref<const Eigen::MatrixXd>& y, const NoiseSpec& spec) {
    if (std::isinf(spec.snr_db) && spec.snr_db > 0.0) return y;
    const double norm_y = y.norm();
    if (norm_y == 0.0) throw std::invalid_argument("add_noise: zero signal with finite SNR");

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd noise(y.rows(), y.cols());
    for (Index j = 0; j < y.cols(); ++j) {
        for (Index i = 0; i < y.rows(); ++i) noise(i, j) = normal(rng);
    }
    const double scale = norm_y / noise.norm() * std::pow(10.0, -spec.snr_db / 20.0);
    return y + scale * noise;
}

VolterraModel planted_tn_model(Index p, Index l, Index M, Index d, std::span<const Index> ranks,
                               std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    std::vector<Index> bonds;
    bonds.push_back(l);
    bonds.insert(bonds.end(), ranks.begin(), ranks.end());
    bonds.push_back(1);
    if (static_cast<Index>(ranks.size()) != d - 1) {
        throw std::invalid_argument("planted_tn_model: need d-1 ranks");
    }

    VolterraModel model;
    model.p = p;
    model.l = l;
    model.M = M;
    const Index n = p * M + 1;
    for (Index k = 0; k < d; ++k) {
        TnCore core(bonds[static_cast<std::size_t>(k)], n, bonds[static_cast<std::size_t>(k) + 1]);
        for (double& v : core.tensor().values()) v = normal(rng);
        model.cores.push_back(std::move(core));
    }
    model.validate();

    // Scale the first core so probe outputs have unit RMS.
    constexpr Index probe_samples = 256;
    TimeSeriesDataset probe;
    probe.inputs.resize(probe_samples, p);
    std::mt19937_64 probe_rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    for (Index j = 0; j < p; ++j) {
        for (Index t = 0; t < probe_samples; ++t) probe.inputs(t, j) = uniform(probe_rng);
    }
    probe.outputs.resize(probe_samples, 0);
    const Eigen::MatrixXd y = simulate_series(model, probe);
    const double rms = std::sqrt(y.squaredNorm() / static_cast<double>(y.size()));
    if (!(rms > 0.0)) throw std::runtime_error("planted_tn_model: degenerate probe output");
    for (double& v : model.cores.front().tensor().values()) v /= rms;
    return model;
}

}  // namespace datagen
}  // namespace vttn
