#include "vttn/tn_model.hpp"

#include "vttn/regressor.hpp"

#include <limits>
#include <stdexcept>
#include <string>

namespace vttn {

TnCore::TnCore(DenseTensor data) : data_(std::move(data)) {
    if (data_.order() != 3) throw std::invalid_argument("TnCore: data must be a 3-way tensor");
}

TnCore::TnCore(Index left_rank, Index dim, Index right_rank)
    : data_(DenseTensor({left_rank, dim, right_rank})) {}

Eigen::Map<const Eigen::MatrixXd> TnCore::left_unfold() const {
    return data_.as_matrix(left_rank() * dim(), right_rank());
}

Eigen::Map<const Eigen::MatrixXd> TnCore::right_unfold() const {
    return data_.as_matrix(left_rank(), dim() * right_rank());
}

Eigen::MatrixXd TnCore::contract_input(const Eigen::Ref<const Eigen::VectorXd>& u) const {
    if (u.size() != dim()) throw std::invalid_argument("TnCore: input length does not match core dimension");
    const Index rl = left_rank(), n = dim(), rr = right_rank();
    Eigen::MatrixXd out(rl, rr);
    for (Index b = 0; b < rr; ++b) {
        Eigen::Map<const Eigen::MatrixXd> slab(data_.data() + b * rl * n, rl, n);
        out.col(b).noalias() = slab * u;
    }
    return out;
}

double left_orthogonality_defect(const TnCore& core) {
    const auto a = core.left_unfold();
    const Eigen::MatrixXd gram = a.transpose() * a;
    return (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

double right_orthogonality_defect(const TnCore& core) {
    const auto a = core.right_unfold();
    const Eigen::MatrixXd gram = a * a.transpose();
    return (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

bool is_left_orthogonal(const TnCore& core, double tol) {
    return left_orthogonality_defect(core) <= tol;
}

bool is_right_orthogonal(const TnCore& core, double tol) {
    return right_orthogonality_defect(core) <= tol;
}

std::vector<Index> VolterraModel::ranks() const {
    std::vector<Index> r;
    r.reserve(cores.size() + 1);
    r.push_back(cores.empty() ? l : cores.front().left_rank());
    for (const TnCore& c : cores) r.push_back(c.right_rank());
    return r;
}

Index VolterraModel::max_rank() const {
    Index m = 0;
    for (std::size_t k = 0; k + 1 < cores.size(); ++k) m = std::max(m, cores[k].right_rank());
    return m;
}

void VolterraModel::validate() const {
    if (p < 1 || l < 1 || M < 1) throw std::invalid_argument("VolterraModel: p, l, M must be positive");
    if (cores.empty()) throw std::invalid_argument("VolterraModel: degree must be >= 1");
    const Index n = input_dim();
    if (cores.front().left_rank() != l) {
        throw std::invalid_argument("VolterraModel: first core left rank must equal output count");
    }
    if (cores.back().right_rank() != 1) {
        throw std::invalid_argument("VolterraModel: last core right rank must be 1");
    }
    for (std::size_t k = 0; k < cores.size(); ++k) {
        if (cores[k].dim() != n) {
            throw std::invalid_argument("VolterraModel: core " + std::to_string(k) +
                                        " dimension must be pM+1 = " + std::to_string(n));
        }
        if (k + 1 < cores.size() && cores[k].right_rank() != cores[k + 1].left_rank()) {
            throw std::invalid_argument("VolterraModel: rank chain broken between cores " +
                                        std::to_string(k) + " and " + std::to_string(k + 1));
        }
    }
}

Eigen::VectorXd simulate_sample(const VolterraModel& m, const Eigen::Ref<const Eigen::VectorXd>& u_t) {
    if (u_t.size() != m.input_dim()) {
        throw std::invalid_argument("simulate_sample: extended input must have length pM+1 = " +
                                    std::to_string(m.input_dim()));
    }
    Eigen::MatrixXd acc = m.cores.front().contract_input(u_t);
    for (std::size_t k = 1; k < m.cores.size(); ++k) {
        acc = acc * m.cores[k].contract_input(u_t);
    }
    return acc.col(0);
}

Eigen::MatrixXd simulate_series(const VolterraModel& m, const TimeSeriesDataset& data) {
    data.validate();
    if (data.num_inputs() != m.p) {
        throw std::invalid_argument("simulate_series: dataset has " + std::to_string(data.num_inputs()) +
                                    " input channels, model expects " + std::to_string(m.p));
    }
    const Index N = data.num_samples();
    Eigen::MatrixXd y(N, m.l);
    for (Index t = 0; t < N; ++t) {
        y.row(t) = simulate_sample(m, build_ut(data, t, m.M)).transpose();
    }
    return y;
}

DenseTensor reconstruct_full(const VolterraModel& m) {
    m.validate();
    const Index n = m.input_dim();
    const FullCount per_output = full_count(m.p, m.M, m.degree());
    if (per_output.overflow) throw BudgetError("reconstruct_full: (pM+1)^d overflows");
    check_element_budget(per_output.value * static_cast<std::uint64_t>(m.l), "reconstruct_full");

    // Grow the chain left to right: after absorbing core k the accumulator is
    // an (l * n^k) x r_k column-major matrix whose row index runs over
    // (output, i_1..i_k) first-index-fastest, so each GEMM against the next
    // right unfolding extends the row multi-index by one mode.
    Eigen::MatrixXd acc = Eigen::Map<const Eigen::MatrixXd>(
        m.cores.front().tensor().data(), m.l * n, m.cores.front().right_rank());
    for (std::size_t k = 1; k < m.cores.size(); ++k) {
        const Eigen::MatrixXd grown = acc * m.cores[k].right_unfold();
        acc = Eigen::Map<const Eigen::MatrixXd>(grown.data(), grown.rows() * m.cores[k].dim(),
                                                m.cores[k].right_rank());
    }

    std::vector<double> data(static_cast<std::size_t>(acc.rows()));
    Eigen::Map<Eigen::VectorXd>(data.data(), acc.rows()) = acc.col(0);
    return DenseTensor({m.l, acc.rows() / m.l}, std::move(data));
}

std::uint64_t parameter_count(const VolterraModel& m) {
    std::uint64_t total = 0;
    for (const TnCore& c : m.cores) total += static_cast<std::uint64_t>(c.tensor().size());
    return total;
}

FullCount full_count(Index p, Index M, Index d) {
    const std::uint64_t n = static_cast<std::uint64_t>(p) * static_cast<std::uint64_t>(M) + 1;
    FullCount fc{1, false};
    for (Index k = 0; k < d; ++k) {
        if (fc.value > std::numeric_limits<std::uint64_t>::max() / n) {
            return {std::numeric_limits<std::uint64_t>::max(), true};
        }
        fc.value *= n;
    }
    return fc;
}

}  // namespace vttn
