#include "vttn/regressor.hpp"

#include <Eigen/SVD>

#include <stdexcept>
#include <string>

namespace vttn {

void TimeSeriesDataset::validate() const {
    if (inputs.rows() < 1) throw std::invalid_argument("TimeSeriesDataset: need at least one sample");
    if (outputs.size() > 0 && outputs.rows() != inputs.rows()) {
        throw std::invalid_argument("TimeSeriesDataset: input/output sample counts differ");
    }
}

TimeSeriesDataset TimeSeriesDataset::head(Index n) const {
    if (n < 1 || n > num_samples()) throw std::invalid_argument("TimeSeriesDataset: bad head length");
    TimeSeriesDataset out;
    out.inputs = inputs.topRows(n);
    out.outputs = outputs.size() > 0 ? outputs.topRows(n) : outputs;
    out.sample_rate_hz = sample_rate_hz;
    return out;
}

Eigen::VectorXd build_ut(const TimeSeriesDataset& data, Index t, Index M) {
    data.validate();
    if (t < 0 || t >= data.num_samples()) throw std::out_of_range("build_ut: sample index out of range");
    const Index p = data.num_inputs();
    Eigen::VectorXd u = Eigen::VectorXd::Zero(p * M + 1);
    u(0) = 1.0;
    for (Index lag = 0; lag < M; ++lag) {
        if (t - lag < 0) break;
        for (Index j = 0; j < p; ++j) u(1 + lag * p + j) = data.inputs(t - lag, j);
    }
    return u;
}

TimeSeriesDataset trim_prehistory(const TimeSeriesDataset& data, Index M) {
    data.validate();
    const Index drop = M - 1;
    if (drop >= data.num_samples()) {
        throw std::invalid_argument("trim_prehistory: fewer than M samples");
    }
    TimeSeriesDataset out;
    out.inputs = data.inputs.bottomRows(data.num_samples() - drop);
    out.outputs = data.outputs.size() > 0
                      ? Eigen::MatrixXd(data.outputs.bottomRows(data.num_samples() - drop))
                      : data.outputs;
    out.sample_rate_hz = data.sample_rate_hz;
    return out;
}

Eigen::MatrixXd build_full_U(const TimeSeriesDataset& data, Index M, Index d) {
    data.validate();
    const Index N = data.num_samples();
    const FullCount cols = full_count(data.num_inputs(), M, d);
    if (cols.overflow) throw BudgetError("build_full_U: (pM+1)^d overflows");
    check_element_budget(cols.value * static_cast<std::uint64_t>(N), "build_full_U");

    Eigen::MatrixXd u_matrix(N, static_cast<Index>(cols.value));
    for (Index t = 0; t < N; ++t) {
        u_matrix.row(t) = kron_power(build_ut(data, t, M), d).transpose();
    }
    return u_matrix;
}

std::uint64_t excitation_bound(Index p, Index M, Index d) {
    // C(pM+d, pM) computed incrementally; each partial product is integral.
    const std::uint64_t m = static_cast<std::uint64_t>(p) * static_cast<std::uint64_t>(M);
    std::uint64_t result = 1;
    for (std::uint64_t i = 1; i <= static_cast<std::uint64_t>(d); ++i) {
        result = result * (m + i) / i;
    }
    return result;
}

Index numerical_rank(const Eigen::Ref<const Eigen::MatrixXd>& a) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
    const Eigen::VectorXd& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0) return 0;
    const double tau = kMachineEpsilon * s(0) * static_cast<double>(std::max(a.rows(), a.cols()));
    Index rank = 0;
    while (rank < s.size() && s(rank) >= tau) ++rank;
    return rank;
}

bool is_persistently_exciting(const TimeSeriesDataset& data, Index M, Index d) {
    const Eigen::MatrixXd u_matrix = build_full_U(data, M, d);
    const std::uint64_t bound = excitation_bound(data.num_inputs(), M, d);
    return static_cast<std::uint64_t>(numerical_rank(u_matrix)) == bound;
}

namespace detail {

void fill_row_block(Eigen::Ref<Eigen::MatrixXd> block, const Eigen::MatrixXd& v_left,
                    const Eigen::Ref<const Eigen::VectorXd>& u_mid,
                    const Eigen::Ref<const Eigen::VectorXd>& v_right) {
    const Index rl = v_left.cols();
    const Index mid = u_mid.size();
    for (Index b = 0; b < v_right.size(); ++b) {
        for (Index m = 0; m < mid; ++m) {
            block.middleCols((b * mid + m) * rl, rl) = (v_right(b) * u_mid(m)) * v_left;
        }
    }
}

}  // namespace detail

namespace {

// Shared assembly for the ALS (one physical mode) and MALS (two physical
// modes) reduced systems. `pair_mode` widens the middle index to u kron u and
// skips one extra core on the right.
Eigen::MatrixXd build_reduced(const TimeSeriesDataset& data, const VolterraModel& model, Index k,
                              bool pair_mode) {
    data.validate();
    model.validate();
    const Index d = model.degree();
    const Index last_solved = pair_mode ? d - 2 : d - 1;
    if (k < 0 || k > last_solved) {
        throw std::invalid_argument(std::string(pair_mode ? "build_Uk_pair" : "build_Uk") +
                                    ": core index out of range");
    }
    if (data.num_inputs() != model.p) {
        throw std::invalid_argument("reduced system: dataset input channel count does not match model");
    }

    const Index N = data.num_samples();
    const Index l = model.l;
    const Index rl = model.cores[static_cast<std::size_t>(k)].left_rank();
    const Index right_core = pair_mode ? k + 2 : k + 1;
    const Index rr = right_core < d ? model.cores[static_cast<std::size_t>(right_core)].left_rank() : 1;
    const Index n = model.input_dim();
    const Index mid = pair_mode ? n * n : n;

    Eigen::MatrixXd reduced(l * N, rl * mid * rr);
    for (Index t = 0; t < N; ++t) {
        const Eigen::VectorXd u = build_ut(data, t, model.M);

        Eigen::MatrixXd v_left = Eigen::MatrixXd::Identity(l, l);
        for (Index j = 0; j < k; ++j) {
            v_left = v_left * model.cores[static_cast<std::size_t>(j)].contract_input(u);
        }
        Eigen::VectorXd v_right = Eigen::VectorXd::Ones(1);
        for (Index j = d - 1; j >= right_core; --j) {
            v_right = model.cores[static_cast<std::size_t>(j)].contract_input(u) * v_right;
        }

        const Eigen::VectorXd u_mid = pair_mode ? Eigen::VectorXd(kron_power(u, 2)) : u;
        detail::fill_row_block(reduced.middleRows(t * l, l), v_left, u_mid, v_right);
    }
    return reduced;
}

}  // namespace

Eigen::MatrixXd build_Uk(const TimeSeriesDataset& data, const VolterraModel& model, Index k) {
    return build_reduced(data, model, k, false);
}

Eigen::MatrixXd build_Uk_pair(const TimeSeriesDataset& data, const VolterraModel& model, Index k) {
    if (model.degree() < 2) throw std::invalid_argument("build_Uk_pair: model degree must be >= 2");
    return build_reduced(data, model, k, true);
}

TnCore supercore(const TnCore& left, const TnCore& right) {
    if (left.right_rank() != right.left_rank()) {
        throw std::invalid_argument("supercore: adjacent ranks do not match");
    }
    const Eigen::MatrixXd merged = left.left_unfold() * right.right_unfold();
    std::vector<double> data(static_cast<std::size_t>(merged.size()));
    Eigen::Map<Eigen::MatrixXd>(data.data(), merged.rows(), merged.cols()) = merged;
    return TnCore(DenseTensor({left.left_rank(), left.dim() * right.dim(), right.right_rank()},
                              std::move(data)));
}

}  // namespace vttn
