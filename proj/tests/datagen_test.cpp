#include "vttn/datagen.hpp"

#include "test_oracles.hpp"
#include "vttn/metrics.hpp"
#include "vttn/oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace vttn {
namespace {

TEST(DecayingKernelTest, FormulaValues) {
    const DenseTensor h1 = datagen::decaying_exp_kernel(1);
    EXPECT_EQ(h1.dims(), (std::vector<Index>{7}));
    EXPECT_EQ(h1[0], 1.0);  // exp(0)

    const DenseTensor h2 = datagen::decaying_exp_kernel(2);
    // Lags (1, 2) carry grid values (0.1, 0.2): exp(-0.01 - 0.04) = exp(-0.05).
    EXPECT_DOUBLE_EQ(h2.at({1, 2}), std::exp(-0.05));
}

TEST(DecayingKernelTest, SymmetryIsExact) {
    const DenseTensor h3 = datagen::decaying_exp_kernel(3);
    for (Index a = 0; a < 7; ++a) {
        for (Index b = 0; b < 7; ++b) {
            for (Index c = 0; c < 7; ++c) {
                const double v = h3.at({a, b, c});
                EXPECT_EQ(v, h3.at({a, c, b}));
                EXPECT_EQ(v, h3.at({b, a, c}));
                EXPECT_EQ(v, h3.at({b, c, a}));
                EXPECT_EQ(v, h3.at({c, a, b}));
                EXPECT_EQ(v, h3.at({c, b, a}));
            }
        }
    }
}

TEST(SimulateTruthTest, ZeroInputGivesZeroOutput) {
    const Eigen::VectorXd y = datagen::simulate_truth_exp(3, Eigen::VectorXd::Zero(10));
    EXPECT_EQ(y.cwiseAbs().maxCoeff(), 0.0);  // h0 = 0
}

TEST(SimulateTruthTest, DegreeOneIsFirFilter) {
    std::mt19937_64 rng(1);
    const Eigen::VectorXd u = testing::random_vector(20, rng);
    const Eigen::VectorXd y = datagen::simulate_truth_exp(1, u);
    const DenseTensor h1 = datagen::decaying_exp_kernel(1);
    for (Index t = 0; t < 20; ++t) {
        double expected = 0.0;
        for (Index k = 0; k < 7; ++k) {
            if (t - k >= 0) expected += h1[k] * u(t - k);
        }
        EXPECT_NEAR(y(t), expected, 1e-13);
    }
}

TEST(SimulateTruthTest, DegreeTwoMatchesDoubleLoopConvolution) {
    std::mt19937_64 rng(2);
    const Eigen::VectorXd u = testing::random_vector(20, rng);
    const Eigen::VectorXd y = datagen::simulate_truth_exp(2, u);
    const DenseTensor h1 = datagen::decaying_exp_kernel(1);
    const DenseTensor h2 = datagen::decaying_exp_kernel(2);
    for (Index t = 0; t < 20; ++t) {
        double expected = 0.0;
        for (Index k = 0; k < 7; ++k) {
            if (t - k >= 0) expected += h1[k] * u(t - k);
        }
        for (Index k1 = 0; k1 < 7; ++k1) {
            for (Index k2 = 0; k2 < 7; ++k2) {
                if (t - k1 >= 0 && t - k2 >= 0) {
                    expected += h2.at({k1, k2}) * u(t - k1) * u(t - k2);
                }
            }
        }
        EXPECT_NEAR(y(t), expected, 1e-12);
    }
}

TEST(SimulateTruthTest, BudgetGateOnHighDegree) {
    set_element_budget(100000);
    EXPECT_THROW(datagen::simulate_truth_exp(10, Eigen::VectorXd::Ones(5)), BudgetError);
    set_element_budget(0);
}

TEST(SimulateTruthTest, SelfIdentificationRoundTrip) {
    // Degree-2 truth data is fit by the direct oracle well below the
    // identification residual target at N = 700.
    const TimeSeriesDataset data = datagen::decaying_exp_dataset(2, 700, 42);
    const auto sol = oracle::solve_direct(data, 1, 1, 7, 2);
    EXPECT_LT(sol.residual, 1e-4);
}

TEST(MixerTest, SignalShapes) {
    const TimeSeriesDataset data = datagen::mixer_signals();
    EXPECT_EQ(data.num_samples(), 5000);
    EXPECT_EQ(data.num_inputs(), 2);
    EXPECT_EQ(data.num_outputs(), 1);
    ASSERT_TRUE(data.sample_rate_hz.has_value());
    EXPECT_EQ(*data.sample_rate_hz, 5000.0);

    for (Index t = 0; t < data.num_samples(); ++t) {
        const double sq = data.inputs(t, 1);
        EXPECT_TRUE(sq == 1.0 || sq == -1.0);
        EXPECT_LE(std::abs(data.outputs(t, 0)), 1.0);
        EXPECT_EQ(data.outputs(t, 0), data.inputs(t, 0) * sq);
    }
}

TEST(MixerTest, CarrierFrequencies) {
    const TimeSeriesDataset data = datagen::mixer_signals();
    // 100 Hz sine at 5 kHz has period 50 samples.
    for (Index t = 0; t + 50 < 200; ++t) {
        EXPECT_NEAR(data.inputs(t, 0), data.inputs(t + 50, 0), 1e-9);
    }
    // 300 Hz square wave: 3 full periods every 50 samples.
    for (Index t = 0; t + 50 < 200; ++t) {
        EXPECT_EQ(data.inputs(t, 1), data.inputs(t + 50, 1));
    }
}

TEST(AddNoiseTest, CalibrationIsExact) {
    std::mt19937_64 rng(3);
    const Eigen::MatrixXd y = testing::random_matrix(500, 1, rng);

    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const double snr = static_cast<double>(seed % 26);
        const Eigen::MatrixXd noisy = datagen::add_noise(y, {snr, seed});
        const double achieved = 20.0 * std::log10(y.norm() / (noisy - y).norm());
        EXPECT_NEAR(achieved, snr, 0.1);
    }

    const Eigen::MatrixXd clean = datagen::add_noise(y, {});
    EXPECT_EQ((clean - y).norm(), 0.0);

    EXPECT_THROW(datagen::add_noise(Eigen::MatrixXd::Zero(5, 1), {10.0, 0}), std::invalid_argument);

    const Eigen::MatrixXd a = datagen::add_noise(y, {15.0, 5});
    const Eigen::MatrixXd b = datagen::add_noise(y, {15.0, 5});
    EXPECT_EQ((a - b).norm(), 0.0);
}

TEST(PlantedModelTest, DeterministicAndNormalized) {
    const std::vector<Index> ranks{2, 2};
    const VolterraModel a = datagen::planted_tn_model(1, 1, 2, 3, ranks, 13);
    const VolterraModel b = datagen::planted_tn_model(1, 1, 2, 3, ranks, 13);
    for (std::size_t k = 0; k < a.cores.size(); ++k) {
        EXPECT_EQ(a.cores[k].tensor().values(), b.cores[k].tensor().values());
    }

    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    TimeSeriesDataset probe;
    probe.inputs.resize(400, 1);
    for (Index t = 0; t < 400; ++t) probe.inputs(t, 0) = uniform(rng);
    probe.outputs.resize(400, 0);
    const Eigen::MatrixXd y = simulate_series(a, probe);
    const double rms = std::sqrt(y.squaredNorm() / static_cast<double>(y.size()));
    EXPECT_GT(rms, 0.1);
    EXPECT_LT(rms, 10.0);
}

TEST(PlantedModelTest, RankOneChainIsSeparable) {
    const std::vector<Index> ranks{1, 1};
    const VolterraModel m = datagen::planted_tn_model(1, 1, 1, 3, ranks, 5);
    EXPECT_EQ(m.max_rank(), 1);
    m.validate();
}

}  // namespace
}  // namespace vttn
