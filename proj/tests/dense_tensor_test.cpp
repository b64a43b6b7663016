#include "vttn/dense_tensor.hpp"

#include "test_oracles.hpp"

#include <gtest/gtest.h>

#include <numeric>
#include <random>

namespace vttn {
namespace {

using testing::loop_contract;
using testing::loop_kron_power;
using testing::loop_kronecker;
using testing::loop_mode_product;
using testing::loop_symmetrize;
using testing::random_matrix;
using testing::random_tensor;
using testing::random_vector;

DenseTensor iota_tensor(std::vector<Index> dims) {
    DenseTensor t(std::move(dims));
    std::iota(t.values().begin(), t.values().end(), 1.0);
    return t;
}

TEST(DenseTensorTest, ReshapeWorkedExample) {
    // 4x3x2 with entries 1..24 reshaped to 4x6: first row 1,5,9,13,17,21.
    const DenseTensor t = iota_tensor({4, 3, 2});
    const DenseTensor m = reshape(t, {4, 6});
    const Eigen::MatrixXd view = m.as_matrix();
    const double expected_first_row[6] = {1, 5, 9, 13, 17, 21};
    for (Index j = 0; j < 6; ++j) EXPECT_EQ(view(0, j), expected_first_row[j]);
    EXPECT_EQ(view(3, 5), 24.0);
    EXPECT_EQ(view(1, 2), 10.0);
}

TEST(DenseTensorTest, ReshapeIdentityAndColumn) {
    const DenseTensor t = iota_tensor({4, 3, 2});
    const DenseTensor same = reshape(t, {4, 3, 2});
    EXPECT_EQ(same.values(), t.values());

    const DenseTensor sq = iota_tensor({2, 2});
    const DenseTensor col = reshape(sq, {4, 1});
    EXPECT_EQ(col.values(), sq.values());
}

TEST(DenseTensorTest, ReshapeSizeMismatchThrows) {
    const DenseTensor t = iota_tensor({4, 3, 2});
    EXPECT_THROW(reshape(t, {5, 5}), std::invalid_argument);
}

TEST(DenseTensorTest, VectorizeMatchesWorkedExample) {
    const DenseTensor t = iota_tensor({4, 3, 2});
    const DenseTensor v = vectorize(t);
    EXPECT_EQ(v.order(), 1);
    for (Index i = 0; i < 24; ++i) EXPECT_EQ(v[i], static_cast<double>(i + 1));

    const DenseTensor s = DenseTensor::scalar(3.5);
    EXPECT_EQ(vectorize(s).values(), s.values());

    const DenseTensor already = iota_tensor({5});
    EXPECT_EQ(vectorize(already).values(), already.values());
}

TEST(DenseTensorTest, ModeProductIsMatrixMultiplication) {
    std::mt19937_64 rng(7);
    const Eigen::MatrixXd a = random_matrix(3, 4, rng);
    const Eigen::MatrixXd b = random_matrix(5, 3, rng);
    const Eigen::MatrixXd c = random_matrix(6, 4, rng);

    const DenseTensor at = DenseTensor::from_matrix(a);
    const DenseTensor result = mode_product(mode_product(at, b, 0), c, 1);
    const Eigen::MatrixXd expected = b * a * c.transpose();
    EXPECT_LT((result.as_matrix() - expected).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(DenseTensorTest, ModeProductIdentityLeavesTensor) {
    std::mt19937_64 rng(8);
    const DenseTensor t = random_tensor({2, 3, 2}, rng);
    for (Index mode = 0; mode < 3; ++mode) {
        const DenseTensor r = mode_product(t, Eigen::MatrixXd::Identity(t.dim(mode), t.dim(mode)), mode);
        EXPECT_EQ(r.values(), t.values());
    }
}

TEST(DenseTensorTest, ModeProductMatchesLoopOracle) {
    std::mt19937_64 rng(9);
    const DenseTensor t = random_tensor({2, 3, 2}, rng);
    const Eigen::MatrixXd m = random_matrix(4, 3, rng);
    const DenseTensor fast = mode_product(t, m, 1);
    const DenseTensor slow = loop_mode_product(t, m, 1);
    ASSERT_EQ(fast.dims(), slow.dims());
    for (Index i = 0; i < fast.size(); ++i) EXPECT_NEAR(fast[i], slow[i], 1e-13);
}

TEST(DenseTensorTest, ModeProductErrors) {
    std::mt19937_64 rng(10);
    const DenseTensor t = random_tensor({2, 3, 2}, rng);
    EXPECT_THROW(mode_product(t, Eigen::MatrixXd::Identity(3, 3), 3), std::invalid_argument);
    EXPECT_THROW(mode_product(t, Eigen::MatrixXd::Identity(4, 4), 1), std::invalid_argument);
}

TEST(DenseTensorTest, KroneckerSpecialCases) {
    std::mt19937_64 rng(11);
    const Eigen::MatrixXd c = random_matrix(3, 2, rng);
    const Eigen::MatrixXd one = Eigen::MatrixXd::Ones(1, 1);
    EXPECT_TRUE(kronecker(one, c).isApprox(c));

    const Eigen::MatrixXd i6 = kronecker(Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(3, 3));
    EXPECT_TRUE(i6.isApprox(Eigen::MatrixXd::Identity(6, 6)));
}

TEST(DenseTensorTest, KroneckerMatchesBlockOracle) {
    Eigen::MatrixXd b(2, 2), c(2, 2);
    b << 1, 2, 3, 4;
    c << 0, 1, 1, 0;
    const Eigen::MatrixXd got = kronecker(b, c);
    const Eigen::MatrixXd expected = loop_kronecker(b, c);
    EXPECT_TRUE(got.isApprox(expected, 0.0));

    const DenseTensor bt = DenseTensor::from_matrix(b);
    const DenseTensor ct = DenseTensor::from_matrix(c);
    EXPECT_TRUE(kronecker(bt, ct).as_matrix().isApprox(expected, 0.0));
    EXPECT_THROW(kronecker(iota_tensor({2, 2, 2}), ct), std::invalid_argument);
}

TEST(DenseTensorTest, KronPowerCases) {
    std::mt19937_64 rng(12);
    const Eigen::VectorXd x = random_vector(3, rng);
    EXPECT_TRUE(kron_power(x, 1).isApprox(x, 0.0));

    Eigen::VectorXd e(2);
    e << 1, 0;
    const Eigen::VectorXd cube = kron_power(e, 3);
    ASSERT_EQ(cube.size(), 8);
    EXPECT_EQ(cube(0), 1.0);
    EXPECT_EQ(cube.tail(7).cwiseAbs().maxCoeff(), 0.0);

    const Eigen::VectorXd sq = kron_power(x, 2);
    const Eigen::VectorXd oracle = loop_kron_power(x, 2);
    EXPECT_LT((sq - oracle).cwiseAbs().maxCoeff(), 1e-14);

    const Eigen::VectorXd zeroth = kron_power(x, 0);
    ASSERT_EQ(zeroth.size(), 1);
    EXPECT_EQ(zeroth(0), 1.0);
}

TEST(DenseTensorTest, ContractCases) {
    std::mt19937_64 rng(13);
    const Eigen::VectorXd x3 = random_vector(3, rng);
    const DenseTensor a = random_tensor({3}, rng);
    EXPECT_NEAR(contract(a, x3), a.as_vector().dot(x3), 1e-14);

    Eigen::VectorXd ones2 = Eigen::VectorXd::Ones(2);
    EXPECT_NEAR(contract(DenseTensor::from_matrix(Eigen::MatrixXd::Identity(2, 2)), ones2), 2.0, 1e-15);

    const DenseTensor t = random_tensor({3, 3, 3}, rng);
    EXPECT_NEAR(contract(t, x3), loop_contract(t, x3), 1e-12);
    EXPECT_THROW(contract(t, random_vector(4, rng)), std::invalid_argument);
}

TEST(DenseTensorTest, ContractMimoLeavesOutputMode) {
    std::mt19937_64 rng(14);
    const DenseTensor t = random_tensor({2, 3, 3}, rng);
    const Eigen::VectorXd x = random_vector(3, rng);
    const Eigen::VectorXd y = contract_mimo(t, x);
    ASSERT_EQ(y.size(), 2);
    // Per-output slice agreement with the scalar contraction.
    for (Index i = 0; i < 2; ++i) {
        DenseTensor slice({3, 3});
        for (Index a = 0; a < 3; ++a) {
            for (Index b = 0; b < 3; ++b) slice.at({a, b}) = t.at({i, a, b});
        }
        EXPECT_NEAR(y(i), contract(slice, x), 1e-13);
    }
}

TEST(DenseTensorTest, SymmetrizeCases) {
    std::mt19937_64 rng(15);
    Eigen::MatrixXd m = random_matrix(3, 3, rng);
    const DenseTensor sym2 = symmetrize(DenseTensor::from_matrix(m));
    EXPECT_TRUE(sym2.as_matrix().isApprox(0.5 * (m + m.transpose()), 1e-15));

    const DenseTensor already = symmetrize(sym2);
    EXPECT_EQ(already.values(), sym2.values());

    const DenseTensor t = random_tensor({2, 2, 2}, rng);
    const DenseTensor fast = symmetrize(t);
    const DenseTensor slow = loop_symmetrize(t);
    for (Index i = 0; i < fast.size(); ++i) EXPECT_NEAR(fast[i], slow[i], 1e-14);

    EXPECT_THROW(symmetrize(random_tensor({2, 3}, rng)), std::invalid_argument);
}

TEST(DenseTensorTest, SymmetrizePreservesContraction) {
    std::mt19937_64 rng(16);
    for (int trial = 0; trial < 25; ++trial) {
        const DenseTensor t = random_tensor({3, 3, 3}, rng);
        const Eigen::VectorXd x = random_vector(3, rng);
        const double direct = contract(t, x);
        const double sym = contract(symmetrize(t), x);
        EXPECT_NEAR(direct, sym, 1e-12 * std::max(1.0, std::abs(direct)));
    }
}

TEST(DenseTensorTest, ReshapeRoundTripIsBitExact) {
    std::mt19937_64 rng(17);
    const DenseTensor t = random_tensor({4, 3, 2, 2}, rng);
    const DenseTensor back = reshape(reshape(reshape(t, {12, 4}), {2, 24}), {4, 3, 2, 2});
    EXPECT_EQ(back.values(), t.values());
}

TEST(DenseTensorTest, MixedProductProperty) {
    std::mt19937_64 rng(18);
    for (int trial = 0; trial < 25; ++trial) {
        const Eigen::MatrixXd a = random_matrix(3, 2, rng), c = random_matrix(2, 4, rng);
        const Eigen::MatrixXd b = random_matrix(2, 3, rng), d = random_matrix(3, 2, rng);
        const Eigen::MatrixXd lhs = kronecker(a, b) * kronecker(c, d);
        const Eigen::MatrixXd rhs = kronecker(Eigen::MatrixXd(a * c), Eigen::MatrixXd(b * d));
        EXPECT_LT((lhs - rhs).norm() / rhs.norm(), 1e-12);
    }
}

TEST(DenseTensorTest, VecOfModeProductChainIsReversedKronecker) {
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 25; ++trial) {
        const DenseTensor t = random_tensor({2, 3, 2}, rng);
        const Eigen::MatrixXd u1 = random_matrix(3, 2, rng);
        const Eigen::MatrixXd u2 = random_matrix(2, 3, rng);
        const Eigen::MatrixXd u3 = random_matrix(4, 2, rng);
        const DenseTensor chained = mode_product(mode_product(mode_product(t, u1, 0), u2, 1), u3, 2);
        const Eigen::VectorXd lhs = vectorize(chained).as_vector();
        const Eigen::VectorXd rhs =
            kronecker(u3, kronecker(u2, u1)) * vectorize(t).as_vector();
        EXPECT_LT((lhs - rhs).norm() / rhs.norm(), 1e-12);
    }
}

TEST(DenseTensorTest, VecOfMatrixProduct) {
    std::mt19937_64 rng(20);
    const Eigen::MatrixXd a = random_matrix(3, 4, rng);
    const Eigen::MatrixXd u1 = random_matrix(2, 3, rng);
    const Eigen::MatrixXd u2 = random_matrix(5, 4, rng);
    const Eigen::MatrixXd product = u1 * a * u2.transpose();
    const Eigen::VectorXd lhs = Eigen::Map<const Eigen::VectorXd>(product.data(), product.size());
    const Eigen::VectorXd rhs =
        kronecker(u2, u1) * Eigen::Map<const Eigen::VectorXd>(a.data(), a.size());
    EXPECT_LT((lhs - rhs).norm() / rhs.norm(), 1e-12);
}

TEST(DenseTensorTest, ContractEqualsVecTimesKronPower) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 25; ++trial) {
        const DenseTensor t = random_tensor({4, 4, 4}, rng);
        const Eigen::VectorXd x = random_vector(4, rng);
        const double lhs = contract(t, x);
        const double rhs = vectorize(t).as_vector().dot(kron_power(x, 3));
        EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, std::abs(rhs)));
    }
}

TEST(DenseTensorTest, ElementBudgetIsEnforced) {
    set_element_budget(1000);
    EXPECT_THROW(DenseTensor({11, 10, 10}), BudgetError);
    EXPECT_NO_THROW(DenseTensor({10, 10, 10}));
    set_element_budget(0);  // restore default
}

}  // namespace
}  // namespace vttn
