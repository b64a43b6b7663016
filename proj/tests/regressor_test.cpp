#include "vttn/regressor.hpp"

#include "test_oracles.hpp"
#include "vttn/solvers.hpp"

#include <gtest/gtest.h>

#include <Eigen/SVD>

#include <random>

namespace vttn {
namespace {

using testing::random_model;

TimeSeriesDataset uniform_dataset(Index n, Index p, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    TimeSeriesDataset data;
    data.inputs.resize(n, p);
    for (Index j = 0; j < p; ++j) {
        for (Index t = 0; t < n; ++t) data.inputs(t, j) = uniform(rng);
    }
    data.outputs.resize(n, 0);
    return data;
}

Eigen::VectorXd stacked_outputs(const Eigen::MatrixXd& y) {
    Eigen::VectorXd out(y.size());
    for (Index t = 0; t < y.rows(); ++t) out.segment(t * y.cols(), y.cols()) = y.row(t).transpose();
    return out;
}

TEST(RegressorTest, BuildUtOrderingAndZeroPrehistory) {
    TimeSeriesDataset data;
    data.inputs.resize(2, 2);
    data.inputs << 0.1, 0.3, 0.2, 0.4;  // u1 = (0.1, 0.2), u2 = (0.3, 0.4)
    data.outputs.resize(2, 0);

    const Eigen::VectorXd u1 = build_ut(data, 1, 2);
    Eigen::VectorXd expected(5);
    expected << 1.0, 0.2, 0.4, 0.1, 0.3;
    EXPECT_TRUE(u1.isApprox(expected, 0.0));

    const Eigen::VectorXd u0 = build_ut(data, 0, 2);
    Eigen::VectorXd expected0(5);
    expected0 << 1.0, 0.1, 0.3, 0.0, 0.0;
    EXPECT_TRUE(u0.isApprox(expected0, 0.0));

    TimeSeriesDataset siso;
    siso.inputs.resize(3, 1);
    siso.inputs << 5.0, 6.0, 7.0;
    siso.outputs.resize(3, 0);
    const Eigen::VectorXd u = build_ut(siso, 2, 1);
    ASSERT_EQ(u.size(), 2);
    EXPECT_EQ(u(0), 1.0);
    EXPECT_EQ(u(1), 7.0);

    EXPECT_THROW(build_ut(data, 2, 2), std::out_of_range);
    EXPECT_THROW(build_ut(data, -1, 2), std::out_of_range);
}

TEST(RegressorTest, BuildFullUDegreeOneAndSingleRow) {
    std::mt19937_64 rng(1);
    TimeSeriesDataset data = uniform_dataset(4, 1, rng);

    const Eigen::MatrixXd u1 = build_full_U(data, 2, 1);
    for (Index t = 0; t < 4; ++t) {
        EXPECT_TRUE(u1.row(t).transpose().isApprox(build_ut(data, t, 2), 0.0));
    }

    TimeSeriesDataset one = data.head(1);
    const Eigen::MatrixXd single = build_full_U(one, 2, 3);
    EXPECT_TRUE(single.row(0).transpose().isApprox(kron_power(build_ut(one, 0, 2), 3), 0.0));
}

TEST(RegressorTest, FullURankEqualsExcitationBound) {
    std::mt19937_64 rng(2);
    TimeSeriesDataset data = uniform_dataset(20, 1, rng);
    const Eigen::MatrixXd u = build_full_U(data, 2, 2);
    EXPECT_EQ(numerical_rank(u), 6);
    EXPECT_EQ(excitation_bound(1, 2, 2), 6ULL);
    EXPECT_TRUE(is_persistently_exciting(data, 2, 2));
}

TEST(RegressorTest, ExcitationBoundValues) {
    EXPECT_EQ(excitation_bound(1, 2, 2), 6ULL);
    EXPECT_EQ(excitation_bound(2, 3, 1), 7ULL);  // d=1: pM+1
    EXPECT_EQ(excitation_bound(2, 2, 3), 35ULL);  // C(7,4)
}

TEST(RegressorTest, BuildFullUBudgetGate) {
    std::mt19937_64 rng(3);
    TimeSeriesDataset data = uniform_dataset(100, 1, rng);
    set_element_budget(1000);
    EXPECT_THROW(build_full_U(data, 7, 3), BudgetError);
    set_element_budget(0);
}

TEST(RegressorTest, ReducedSystemShapes) {
    std::mt19937_64 rng(4);
    const VolterraModel model = random_model(1, 1, 2, 3, {2, 2}, rng);
    TimeSeriesDataset data = uniform_dataset(10, 1, rng);

    // 1-based core k=2 is index 1: lN x r_1 (pM+1) r_2 = 10 x 12.
    const Eigen::MatrixXd uk = build_Uk(data, model, 1);
    EXPECT_EQ(uk.rows(), 10);
    EXPECT_EQ(uk.cols(), 12);

    // Pair (1,2) is index 0: lN x r_0 (pM+1)^2 r_2 = 10 x 18.
    const Eigen::MatrixXd pair = build_Uk_pair(data, model, 0);
    EXPECT_EQ(pair.rows(), 10);
    EXPECT_EQ(pair.cols(), 18);

    EXPECT_THROW(build_Uk(data, model, 3), std::invalid_argument);
    EXPECT_THROW(build_Uk_pair(data, model, 2), std::invalid_argument);
}

TEST(RegressorTest, ReducedSystemConsistencyIdentity) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 25; ++trial) {
        const Index p = 1 + static_cast<Index>(rng() % 2);
        const Index l = 1 + static_cast<Index>(rng() % 2);
        const Index d = 2 + static_cast<Index>(rng() % 3);
        std::vector<Index> ranks(static_cast<std::size_t>(d - 1));
        for (auto& r : ranks) r = 1 + static_cast<Index>(rng() % 2);
        const VolterraModel model = random_model(p, l, 2, d, ranks, rng);
        TimeSeriesDataset data = uniform_dataset(12, p, rng);

        const Eigen::VectorXd y = stacked_outputs(simulate_series(model, data));
        for (Index k = 0; k < d; ++k) {
            const Eigen::VectorXd via_uk =
                build_Uk(data, model, k) * model.cores[static_cast<std::size_t>(k)].tensor().as_vector();
            EXPECT_LT((via_uk - y).norm(), 1e-10 * (1.0 + y.norm()));
        }
        for (Index k = 0; k + 1 < d; ++k) {
            const TnCore merged = supercore(model.cores[static_cast<std::size_t>(k)],
                                            model.cores[static_cast<std::size_t>(k) + 1]);
            const Eigen::VectorXd via_pair =
                build_Uk_pair(data, model, k) * merged.tensor().as_vector();
            EXPECT_LT((via_pair - y).norm(), 1e-10 * (1.0 + y.norm()));
        }
    }
}

TEST(RegressorTest, DegreeOneReducedSystemIsLinearRegression) {
    std::mt19937_64 rng(6);
    const VolterraModel model = random_model(1, 1, 2, 1, {}, rng);
    TimeSeriesDataset data = uniform_dataset(8, 1, rng);
    const Eigen::MatrixXd uk = build_Uk(data, model, 0);
    for (Index t = 0; t < 8; ++t) {
        EXPECT_TRUE(uk.row(t).transpose().isApprox(build_ut(data, t, 2), 1e-15));
    }
}

TEST(RegressorTest, RankOnePairRowsAreScaledKronSquares) {
    std::mt19937_64 rng(7);
    const VolterraModel model = random_model(1, 1, 1, 3, {1, 1}, rng);
    TimeSeriesDataset data = uniform_dataset(6, 1, rng);
    const Eigen::MatrixXd pair = build_Uk_pair(data, model, 0);
    for (Index t = 0; t < 6; ++t) {
        const Eigen::VectorXd u = build_ut(data, t, 1);
        const double v3 = (model.cores[2].contract_input(u))(0, 0);
        EXPECT_TRUE(pair.row(t).transpose().isApprox(Eigen::VectorXd(v3 * kron_power(u, 2)), 1e-12));
    }
}

TEST(RegressorTest, OrthogonalCoresBoundConditionNumber) {
    std::mt19937_64 rng(8);
    std::vector<Index> ranks{2, 2};
    TimeSeriesDataset data = uniform_dataset(60, 1, rng);
    const VolterraModel truth = random_model(1, 1, 2, 3, {2, 2}, rng);
    data.outputs = simulate_series(truth, data);

    const auto effective_cond = [](const Eigen::MatrixXd& a) {
        Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
        const Eigen::VectorXd& s = svd.singularValues();
        const double tau = kMachineEpsilon * s(0) * static_cast<double>(std::max(a.rows(), a.cols()));
        Index r = 0;
        while (r < s.size() && s(r) >= tau) ++r;
        return s(0) / s(r - 1);
    };

    // The orthogonality bound concerns the systems the sweep actually
    // solves: once the frames have adapted (one full sweep), the reduced
    // system is no worse conditioned than the full regression matrix. A
    // freshly random frame can violate this when U is rank deficient.
    VolterraModel model = init_right_orthogonal(1, 1, 2, 3, ranks, 42);
    SolverConfig config;
    config.algorithm = Algorithm::kAls;
    config.ranks = ranks;
    als_half_sweep(model, data, SweepDirection::kLeftToRight, config, nullptr);
    als_half_sweep(model, data, SweepDirection::kRightToLeft, config, nullptr);

    const double cond_full = effective_cond(build_full_U(data, 2, 3));
    const double cond_reduced = effective_cond(build_Uk(data, model, 0));
    EXPECT_LE(cond_reduced, cond_full * (1.0 + 1e-8));
}

TEST(RegressorTest, TrimPrehistoryDropsPartialWindows) {
    TimeSeriesDataset data;
    data.inputs.resize(5, 1);
    data.inputs << 1, 2, 3, 4, 5;
    data.outputs = Eigen::MatrixXd::Zero(5, 1);
    const TimeSeriesDataset trimmed = trim_prehistory(data, 3);
    EXPECT_EQ(trimmed.num_samples(), 3);
    EXPECT_EQ(trimmed.inputs(0, 0), 3.0);
    EXPECT_THROW(trim_prehistory(data, 6), std::invalid_argument);
}

TEST(RegressorTest, DatasetHeadAndValidate) {
    TimeSeriesDataset data;
    data.inputs = Eigen::MatrixXd::Random(10, 2);
    data.outputs = Eigen::MatrixXd::Random(9, 1);
    EXPECT_THROW(data.validate(), std::invalid_argument);

    data.outputs = Eigen::MatrixXd::Random(10, 1);
    EXPECT_NO_THROW(data.validate());
    const TimeSeriesDataset first = data.head(4);
    EXPECT_EQ(first.num_samples(), 4);
    EXPECT_EQ(first.outputs.rows(), 4);
}

}  // namespace
}  // namespace vttn
