#pragma once

#include "vttn/dataset.hpp"
#include "vttn/dense_tensor.hpp"

#include <Eigen/Core>

#include <cstdint>

namespace vttn {
namespace oracle {

/// Direct full-matrix identification result: the l x (pM+1)^d reshaped
/// Volterra tensor, one row per output.
struct DirectSolution {
    Eigen::MatrixXd v1;
    double residual = 0.0;  // ||Y - U v1^T||_F / ||Y||_F
    double norm = 0.0;      // ||v1||_F
};

/// Minimal-norm least-squares solve of the full system Y = U v1^T, one
/// output column at a time. Refuses (pM+1)^d > max_full_elements; this is a
/// brute-force reference, not a practical solver.
DirectSolution solve_direct(const TimeSeriesDataset& data, Index p, Index l, Index M, Index d,
                            std::uint64_t max_full_elements = 1'000'000);

/// Reshapes each output's row of v1 to a d-way cubical tensor of dimension n,
/// symmetrizes it, and re-vectorizes. Simulated outputs are unchanged and
/// the Frobenius norm cannot grow.
Eigen::MatrixXd minimal_norm_symmetrize(const Eigen::Ref<const Eigen::MatrixXd>& v1, Index n,
                                        Index d);

/// Largest relative symmetry defect over the per-output tensors of v1.
double max_symmetry_defect(const Eigen::Ref<const Eigen::MatrixXd>& v1, Index n, Index d);

}  // namespace oracle
}  // namespace vttn
