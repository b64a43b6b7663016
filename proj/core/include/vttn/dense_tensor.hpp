#pragma once

#include "vttn/common.hpp"

#include <Eigen/Core>

#include <span>
#include <vector>

namespace vttn {

/// Dense d-way array with explicit dimensions over a flat double buffer.
///
/// Entries are linearized first-index-fastest (the column-major
/// generalization), so an order-2 tensor aliases an Eigen column-major
/// matrix and vectorization is a pure reinterpretation of the buffer.
/// An order-0 tensor is a scalar (size 1).
class DenseTensor {
public:
    DenseTensor() = default;

    /// Zero-filled tensor. Throws BudgetError when the element count exceeds
    /// the dense budget, std::invalid_argument on non-positive dimensions.
    explicit DenseTensor(std::vector<Index> dims);

    /// Takes ownership of `data`; its length must equal the dimension product.
    DenseTensor(std::vector<Index> dims, std::vector<double> data);

    static DenseTensor scalar(double value);
    static DenseTensor from_matrix(const Eigen::Ref<const Eigen::MatrixXd>& m);

    Index order() const { return static_cast<Index>(dims_.size()); }
    const std::vector<Index>& dims() const { return dims_; }
    Index dim(Index k) const { return dims_.at(static_cast<std::size_t>(k)); }
    Index size() const { return static_cast<Index>(data_.size()); }
    bool is_cubical() const;

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::vector<double>& values() { return data_; }
    const std::vector<double>& values() const { return data_; }

    double operator[](Index flat) const { return data_[static_cast<std::size_t>(flat)]; }
    double& operator[](Index flat) { return data_[static_cast<std::size_t>(flat)]; }

    /// Multi-index access; `idx` has one entry per mode.
    double at(std::span<const Index> idx) const;
    double& at(std::span<const Index> idx);
    double at(std::initializer_list<Index> idx) const {
        return at(std::span<const Index>(idx.begin(), idx.size()));
    }
    double& at(std::initializer_list<Index> idx) {
        return at(std::span<const Index>(idx.begin(), idx.size()));
    }

    /// Flat offset of a multi-index under the first-index-fastest layout.
    Index offset(std::span<const Index> idx) const;

    /// Reinterpret the buffer as a rows x cols column-major matrix
    /// (rows*cols must equal size). No copy.
    Eigen::Map<const Eigen::MatrixXd> as_matrix(Index rows, Index cols) const;
    Eigen::Map<Eigen::MatrixXd> as_matrix(Index rows, Index cols);
    /// Matrix view of an order-<=2 tensor with its natural dimensions.
    Eigen::Map<const Eigen::MatrixXd> as_matrix() const;
    Eigen::Map<const Eigen::VectorXd> as_vector() const;

private:
    std::vector<Index> dims_;
    std::vector<double> data_;
};

/// Reinterprets dimensions without touching data.
/// Throws std::invalid_argument when the dimension products differ.
DenseTensor reshape(const DenseTensor& t, std::vector<Index> new_dims);

/// reshape(t, [size]) as an order-1 tensor.
DenseTensor vectorize(const DenseTensor& t);

/// k-mode product t x_mode m of a tensor with a matrix m (p x n_mode),
/// replacing dimension `mode` (0-based) by p.
DenseTensor mode_product(const DenseTensor& t, const Eigen::Ref<const Eigen::MatrixXd>& m,
                         Index mode);

/// Kronecker product of two matrices: block (i,j) of the result is
/// b(i,j) * c.
Eigen::MatrixXd kronecker(const Eigen::Ref<const Eigen::MatrixXd>& b,
                          const Eigen::Ref<const Eigen::MatrixXd>& c);

/// Kronecker product of two order-2 tensors.
DenseTensor kronecker(const DenseTensor& b, const DenseTensor& c);

/// d-times repeated Kronecker power of a vector; the first factor's index is
/// the slowest-varying one. d = 0 yields the length-1 vector (1).
Eigen::VectorXd kron_power(const Eigen::Ref<const Eigen::VectorXd>& x, Index d);

/// Multidimensional contraction of a cubical tensor with a vector along every
/// mode; equals vectorize(t)^T kron_power(x, order).
double contract(const DenseTensor& t, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Contraction along modes 1..d of an (l, n, ..., n) tensor, leaving the
/// length-l first mode.
Eigen::VectorXd contract_mimo(const DenseTensor& t, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Average of a cubical tensor over all index permutations. The result is
/// exactly symmetric: each orbit mean is computed once and broadcast.
DenseTensor symmetrize(const DenseTensor& t);

/// ||t - symmetrize(t)||_F / max(||t||_F, tiny) for a cubical tensor.
double symmetry_defect(const DenseTensor& t);

}  // namespace vttn
