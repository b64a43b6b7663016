#pragma once

#include "vttn/dataset.hpp"
#include "vttn/dense_tensor.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace vttn {

/// One 3-way tensor-network core with dimensions
/// (left_rank, dim, right_rank), stored first-index-fastest.
class TnCore {
public:
    TnCore() = default;
    /// Wraps an order-3 tensor; throws std::invalid_argument otherwise.
    explicit TnCore(DenseTensor data);
    TnCore(Index left_rank, Index dim, Index right_rank);

    Index left_rank() const { return data_.dim(0); }
    Index dim() const { return data_.dim(1); }
    Index right_rank() const { return data_.dim(2); }

    const DenseTensor& tensor() const { return data_; }
    DenseTensor& tensor() { return data_; }

    /// (left_rank * dim) x right_rank matricization; no copy.
    Eigen::Map<const Eigen::MatrixXd> left_unfold() const;
    /// left_rank x (dim * right_rank) matricization; no copy.
    Eigen::Map<const Eigen::MatrixXd> right_unfold() const;

    /// Core contracted with a vector along the middle mode: the
    /// left_rank x right_rank matrix with entries sum_j u(j) * core(a, j, b).
    Eigen::MatrixXd contract_input(const Eigen::Ref<const Eigen::VectorXd>& u) const;

private:
    DenseTensor data_;
};

/// Max-abs deviation of A^T A from the identity, A the left unfolding.
double left_orthogonality_defect(const TnCore& core);
/// Max-abs deviation of A A^T from the identity, A the right unfolding.
double right_orthogonality_defect(const TnCore& core);
bool is_left_orthogonal(const TnCore& core, double tol = 1e-12);
bool is_right_orthogonal(const TnCore& core, double tol = 1e-12);

/// A MIMO Volterra system of degree d in tensor-network form: d cores whose
/// middle dimension is p*M+1. The first core's left rank carries the output
/// count l; the last core's right rank is 1.
struct VolterraModel {
    Index p = 0;  // input channels
    Index l = 0;  // output channels
    Index M = 0;  // memory length in samples
    std::vector<TnCore> cores;

    Index degree() const { return static_cast<Index>(cores.size()); }
    Index input_dim() const { return p * M + 1; }

    /// Rank chain r_0..r_d with r_0 = l and r_d = 1.
    std::vector<Index> ranks() const;
    Index max_rank() const;

    /// Checks the structural invariants (core dims, rank chaining, boundary
    /// ranks); throws std::invalid_argument on violation.
    void validate() const;
};

/// Output sample for one extended input vector u_t of length p*M+1 whose
/// first entry is the constant 1: the product of the input-contracted cores.
Eigen::VectorXd simulate_sample(const VolterraModel& m, const Eigen::Ref<const Eigen::VectorXd>& u_t);

/// N x l output matrix; row t simulates the extended input at time t built
/// from `data` with zero initial conditions.
Eigen::MatrixXd simulate_series(const VolterraModel& m, const TimeSeriesDataset& data);

/// Dense l x (pM+1)^d matricization of the full Volterra tensor.
/// Budget-gated; intended for oracle-scale checks only.
DenseTensor reconstruct_full(const VolterraModel& m);

/// Number of scalars stored across all cores.
std::uint64_t parameter_count(const VolterraModel& m);

struct FullCount {
    std::uint64_t value = 0;  // saturated at UINT64_MAX on overflow
    bool overflow = false;
};

/// (pM+1)^d, the per-output dense kernel element count.
FullCount full_count(Index p, Index M, Index d);

}  // namespace vttn
