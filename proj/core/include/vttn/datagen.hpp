#pragma once

#include "vttn/dataset.hpp"
#include "vttn/dense_tensor.hpp"
#include "vttn/tn_model.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <span>

namespace vttn {
namespace datagen {

/// Additive Gaussian output noise calibrated to an exact signal-to-noise
/// ratio in dB; +infinity means no noise.
struct NoiseSpec {
    double snr_db = std::numeric_limits<double>::infinity();
    std::uint64_t seed = 0;
};

/// Degree-i symmetric kernel with entries exp(-(0.1 k_1)^2 - ... - (0.1 k_i)^2)
/// over lags k_j in 0..M-1. Each orbit value is evaluated once from the
/// sorted lag tuple and broadcast, so symmetry is exact.
DenseTensor decaying_exp_kernel(Index i, Index M = 7);

/// Output of the SISO truth system with the decaying-exponential kernels of
/// degrees 1..d and zero constant term, evaluated by direct kernel
/// contraction with the lag vector (zero initial conditions). Budget-gated
/// at M^d kernel elements.
Eigen::VectorXd simulate_truth_exp(Index d, const Eigen::Ref<const Eigen::VectorXd>& input,
                                   Index M = 7);

/// Uniform-[0,1] input samples, seeded.
Eigen::VectorXd uniform_inputs(Index n, std::uint64_t seed);

/// Full decaying-exponential experiment dataset: seeded uniform input and
/// the degree-d truth output. p = l = 1.
TimeSeriesDataset decaying_exp_dataset(Index d, Index n_samples, std::uint64_t seed, Index M = 7);

/// Ideal double-balanced upconversion mixer surrogate: a 100 Hz sine LO and
/// a 300 Hz square-wave IF leading by pi/8, multiplied together, sampled at
/// `fs` for `duration` seconds. p = 2 (LO, IF), l = 1.
TimeSeriesDataset mixer_signals(double fs = 5000.0, double duration = 1.0);

/// y plus seeded Gaussian noise scaled so 20 log10(||y|| / ||noise||) equals
/// spec.snr_db exactly. Throws on a zero signal with finite SNR.
Eigen::MatrixXd add_noise(const Eigen::Ref<const Eigen::MatrixXd>& y, const NoiseSpec& spec);

/// Seeded random model with the given rank chain, scaled so simulated
/// outputs on unit-uniform inputs have RMS 1.
VolterraModel planted_tn_model(Index p, Index l, Index M, Index d, std::span<const Index> ranks,
                               std::uint64_t seed);

}  // namespace datagen
}  // namespace vttn
