#include "vttn/dense_tensor.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace vttn {
namespace {

std::uint64_t checked_product(const std::vector<Index>& dims, const char* context) {
    std::uint64_t n = 1;
    for (Index d : dims) {
        if (d <= 0) throw std::invalid_argument(std::string(context) + ": dimensions must be positive");
        if (n > element_budget() * 2 + 1) break;  // avoid overflow; budget check rejects anyway
        n *= static_cast<std::uint64_t>(d);
    }
    return n;
}

}  // namespace

DenseTensor::DenseTensor(std::vector<Index> dims) {
    const std::uint64_t n = checked_product(dims, "DenseTensor");
    check_element_budget(n, "DenseTensor");
    dims_ = std::move(dims);
    data_.assign(static_cast<std::size_t>(n), 0.0);
}

DenseTensor::DenseTensor(std::vector<Index> dims, std::vector<double> data) {
    const std::uint64_t n = checked_product(dims, "DenseTensor");
    check_element_budget(n, "DenseTensor");
    if (n != data.size()) {
        throw std::invalid_argument("DenseTensor: data length " + std::to_string(data.size()) +
                                    " does not match dimension product " + std::to_string(n));
    }
    dims_ = std::move(dims);
    data_ = std::move(data);
}

DenseTensor DenseTensor::scalar(double value) { return DenseTensor({}, {value}); }

DenseTensor DenseTensor::from_matrix(const Eigen::Ref<const Eigen::MatrixXd>& m) {
    std::vector<double> data(static_cast<std::size_t>(m.size()));
    Eigen::Map<Eigen::MatrixXd>(data.data(), m.rows(), m.cols()) = m;
    return DenseTensor({m.rows(), m.cols()}, std::move(data));
}

bool DenseTensor::is_cubical() const {
    return std::all_of(dims_.begin(), dims_.end(), [&](Index d) { return d == dims_.front(); });
}

Index DenseTensor::offset(std::span<const Index> idx) const {
    if (idx.size() != dims_.size()) throw std::invalid_argument("DenseTensor: index arity mismatch");
    Index off = 0;
    Index stride = 1;
    for (std::size_t k = 0; k < dims_.size(); ++k) {
        if (idx[k] < 0 || idx[k] >= dims_[k]) throw std::out_of_range("DenseTensor: index out of range");
        off += idx[k] * stride;
        stride *= dims_[k];
    }
    return off;
}

double DenseTensor::at(std::span<const Index> idx) const { return data_[static_cast<std::size_t>(offset(idx))]; }
double& DenseTensor::at(std::span<const Index> idx) { return data_[static_cast<std::size_t>(offset(idx))]; }

Eigen::Map<const Eigen::MatrixXd> DenseTensor::as_matrix(Index rows, Index cols) const {
    if (rows * cols != size()) throw std::invalid_argument("DenseTensor: matrix view size mismatch");
    return {data_.data(), rows, cols};
}

Eigen::Map<Eigen::MatrixXd> DenseTensor::as_matrix(Index rows, Index cols) {
    if (rows * cols != size()) throw std::invalid_argument("DenseTensor: matrix view size mismatch");
    return {data_.data(), rows, cols};
}

Eigen::Map<const Eigen::MatrixXd> DenseTensor::as_matrix() const {
    switch (order()) {
        case 0: return {data_.data(), 1, 1};
        case 1: return {data_.data(), dims_[0], 1};
        case 2: return {data_.data(), dims_[0], dims_[1]};
        default: throw std::invalid_argument("DenseTensor: as_matrix() requires order <= 2");
    }
}

Eigen::Map<const Eigen::VectorXd> DenseTensor::as_vector() const { return {data_.data(), size()}; }

DenseTensor reshape(const DenseTensor& t, std::vector<Index> new_dims) {
    std::uint64_t n = 1;
    for (Index d : new_dims) {
        if (d <= 0) throw std::invalid_argument("reshape: dimensions must be positive");
        n *= static_cast<std::uint64_t>(d);
    }
    if (n != static_cast<std::uint64_t>(t.size())) {
        throw std::invalid_argument("reshape: dimension product " + std::to_string(n) +
                                    " does not match tensor size " + std::to_string(t.size()));
    }
    return DenseTensor(std::move(new_dims), t.values());
}

DenseTensor vectorize(const DenseTensor& t) { return reshape(t, {t.size()}); }

DenseTensor mode_product(const DenseTensor& t, const Eigen::Ref<const Eigen::MatrixXd>& m,
                         Index mode) {
    if (mode < 0 || mode >= t.order()) throw std::invalid_argument("mode_product: mode out of range");
    const Index nk = t.dim(mode);
    if (m.cols() != nk) {
        throw std::invalid_argument("mode_product: matrix has " + std::to_string(m.cols()) +
                                    " columns, mode dimension is " + std::to_string(nk));
    }
    const Index pk = m.rows();

    Index left = 1, right = 1;
    for (Index k = 0; k < mode; ++k) left *= t.dim(k);
    for (Index k = mode + 1; k < t.order(); ++k) right *= t.dim(k);

    std::vector<Index> out_dims = t.dims();
    out_dims[static_cast<std::size_t>(mode)] = pk;
    DenseTensor out(std::move(out_dims));

    // For every trailing slab, the leading block is a contiguous left x nk
    // column-major matrix; the mode product is one GEMM against m^T.
    for (Index b = 0; b < right; ++b) {
        Eigen::Map<const Eigen::MatrixXd> src(t.data() + b * left * nk, left, nk);
        Eigen::Map<Eigen::MatrixXd> dst(out.data() + b * left * pk, left, pk);
        dst.noalias() = src * m.transpose();
    }
    return out;
}

Eigen::MatrixXd kronecker(const Eigen::Ref<const Eigen::MatrixXd>& b,
                          const Eigen::Ref<const Eigen::MatrixXd>& c) {
    return Eigen::kroneckerProduct(b, c);
}

DenseTensor kronecker(const DenseTensor& b, const DenseTensor& c) {
    if (b.order() != 2 || c.order() != 2) {
        throw std::invalid_argument("kronecker: both operands must be order-2 tensors");
    }
    return DenseTensor::from_matrix(kronecker(b.as_matrix(), c.as_matrix()));
}

Eigen::VectorXd kron_power(const Eigen::Ref<const Eigen::VectorXd>& x, Index d) {
    if (d < 0) throw std::invalid_argument("kron_power: degree must be non-negative");
    Eigen::VectorXd result = Eigen::VectorXd::Ones(1);
    for (Index k = 0; k < d; ++k) {
        Eigen::VectorXd next(x.size() * result.size());
        for (Index i = 0; i < x.size(); ++i) {
            next.segment(i * result.size(), result.size()) = x(i) * result;
        }
        result = std::move(next);
    }
    return result;
}

namespace {

// Folds away trailing modes against x until `stop_order` modes remain.
Eigen::VectorXd fold_contract(const DenseTensor& t, const Eigen::Ref<const Eigen::VectorXd>& x,
                              Index stop_order) {
    Eigen::VectorXd buf = t.as_vector();
    for (Index k = t.order() - 1; k >= stop_order; --k) {
        const Index n = t.dim(k);
        const Index rows = buf.size() / n;
        Eigen::VectorXd next(rows);
        next.noalias() = Eigen::Map<const Eigen::MatrixXd>(buf.data(), rows, n) * x;
        buf = std::move(next);
    }
    return buf;
}

}  // namespace

double contract(const DenseTensor& t, const Eigen::Ref<const Eigen::VectorXd>& x) {
    if (t.order() < 1) throw std::invalid_argument("contract: tensor order must be >= 1");
    for (Index k = 0; k < t.order(); ++k) {
        if (t.dim(k) != x.size()) throw std::invalid_argument("contract: dimension/vector length mismatch");
    }
    return fold_contract(t, x, 0)(0);
}

Eigen::VectorXd contract_mimo(const DenseTensor& t, const Eigen::Ref<const Eigen::VectorXd>& x) {
    if (t.order() < 1) throw std::invalid_argument("contract_mimo: tensor order must be >= 1");
    for (Index k = 1; k < t.order(); ++k) {
        if (t.dim(k) != x.size()) throw std::invalid_argument("contract_mimo: dimension/vector length mismatch");
    }
    return fold_contract(t, x, 1);
}

DenseTensor symmetrize(const DenseTensor& t) {
    if (t.order() < 1 || !t.is_cubical()) {
        throw std::invalid_argument("symmetrize: tensor must be cubical of order >= 1");
    }
    const Index d = t.order();
    const Index n = t.dim(0);
    const Index total = t.size();

    // Orbit sums keyed by the offset of the sorted index tuple; the orbit
    // mean equals the permutation average and is assigned to every member,
    // so the output is symmetric to the last bit.
    std::unordered_map<Index, std::pair<double, Index>> orbits;
    std::vector<Index> idx(static_cast<std::size_t>(d), 0);
    std::vector<Index> sorted(static_cast<std::size_t>(d));
    const auto key_of = [&](const std::vector<Index>& ix) {
        sorted = ix;
        std::sort(sorted.begin(), sorted.end());
        Index key = 0;
        for (Index k = d - 1; k >= 0; --k) key = key * n + sorted[static_cast<std::size_t>(k)];
        return key;
    };

    for (Index flat = 0; flat < total; ++flat) {
        auto& acc = orbits[key_of(idx)];
        acc.first += t[flat];
        acc.second += 1;
        for (Index k = 0; k < d; ++k) {
            if (++idx[static_cast<std::size_t>(k)] < n) break;
            idx[static_cast<std::size_t>(k)] = 0;
        }
    }

    DenseTensor out(t.dims());
    std::fill(idx.begin(), idx.end(), 0);
    for (Index flat = 0; flat < total; ++flat) {
        const auto& acc = orbits.at(key_of(idx));
        out[flat] = acc.first / static_cast<double>(acc.second);
        for (Index k = 0; k < d; ++k) {
            if (++idx[static_cast<std::size_t>(k)] < n) break;
            idx[static_cast<std::size_t>(k)] = 0;
        }
    }
    return out;
}

double symmetry_defect(const DenseTensor& t) {
    const DenseTensor sym = symmetrize(t);
    double diff2 = 0.0, norm2 = 0.0;
    for (Index i = 0; i < t.size(); ++i) {
        const double d = t[i] - sym[i];
        diff2 += d * d;
        norm2 += t[i] * t[i];
    }
    return std::sqrt(diff2) / std::max(std::sqrt(norm2), 1e-300);
}

}  // namespace vttn
