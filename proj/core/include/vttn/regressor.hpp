#pragma once

#include "vttn/dataset.hpp"
#include "vttn/tn_model.hpp"

#include <Eigen/Core>

#include <cstdint>

namespace vttn {

/// Extended input vector at sample t: entries
/// (1, u_1(t), ..., u_p(t), u_1(t-1), ..., u_p(t-M+1)), with u == 0 before
/// the first sample (zero initial conditions).
Eigen::VectorXd build_ut(const TimeSeriesDataset& data, Index t, Index M);

/// Alternative to zero initial conditions: drops the first M-1 samples so
/// every remaining lag window is fully observed.
TimeSeriesDataset trim_prehistory(const TimeSeriesDataset& data, Index M);

/// Full regression matrix: N rows, row t = kron_power(u_t, d)^T. Budget-gated;
/// oracle scale only.
Eigen::MatrixXd build_full_U(const TimeSeriesDataset& data, Index M, Index d);

/// Maximal achievable rank of the full regression matrix, C(pM+d, pM).
std::uint64_t excitation_bound(Index p, Index M, Index d);

/// Rank cutoff sigma_i >= eps * s1 * max(rows, cols).
Index numerical_rank(const Eigen::Ref<const Eigen::MatrixXd>& a);

/// True when the numerical rank of the full regression matrix attains
/// C(pM+d, pM). Builds the dense matrix, so oracle scale only.
bool is_persistently_exciting(const TimeSeriesDataset& data, Index M, Index d);

/// Reduced regression matrix for core k (0-based): lN x r_k (pM+1) r_{k+1},
/// with all cores but k fixed. The l rows contributed by sample t are
/// (v_right^T kron u_t^T kron v_left); row blocks are ordered by t with the
/// output index fastest, matching vec(Y^T).
Eigen::MatrixXd build_Uk(const TimeSeriesDataset& data, const VolterraModel& model, Index k);

/// Reduced regression matrix for the super-core (k, k+1) (0-based k):
/// lN x r_k (pM+1)^2 r_{k+2}, rows (v_right^T kron (u_t^T)^{kron 2} kron v_left).
Eigen::MatrixXd build_Uk_pair(const TimeSeriesDataset& data, const VolterraModel& model, Index k);

/// Contraction of two adjacent cores over their shared rank: the
/// r_{k} x (pM+1)^2 x r_{k+2} super-core whose middle multi-index pairs the
/// two physical modes with the left core's mode fastest.
TnCore supercore(const TnCore& left, const TnCore& right);

namespace detail {

/// Writes the l x (rl * mid * rr) block with entries
/// block(i, a + rl*(m + mid_len*b)) = v_right(b) * u_mid(m) * v_left(i, a).
void fill_row_block(Eigen::Ref<Eigen::MatrixXd> block, const Eigen::MatrixXd& v_left,
                    const Eigen::Ref<const Eigen::VectorXd>& u_mid,
                    const Eigen::Ref<const Eigen::VectorXd>& v_right);

}  // namespace detail

}  // namespace vttn
