#include "vttn/oracle.hpp"

#include "vttn/regressor.hpp"
#include "vttn/tn_model.hpp"

#include <Eigen/SVD>

#include <stdexcept>
#include <string>

namespace vttn {
namespace oracle {

DirectSolution solve_direct(const TimeSeriesDataset& data, Index p, Index l, Index M, Index d,
                            std::uint64_t max_full_elements) {
    data.validate();
    if (data.num_inputs() != p || data.num_outputs() != l) {
        throw std::invalid_argument("solve_direct: dataset channel counts do not match p, l");
    }
    const FullCount per_output = full_count(p, M, d);
    if (per_output.overflow || per_output.value > max_full_elements) {
        throw BudgetError("solve_direct: (pM+1)^d exceeds the oracle gate of " +
                          std::to_string(max_full_elements) + " elements");
    }

    const Eigen::MatrixXd u = build_full_U(data, M, d);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(u, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(kMachineEpsilon * static_cast<double>(std::max(u.rows(), u.cols())));

    DirectSolution sol;
    sol.v1.resize(l, u.cols());
    for (Index i = 0; i < l; ++i) {
        sol.v1.row(i) = svd.solve(data.outputs.col(i)).transpose();
    }
    const double norm_y = data.outputs.norm();
    const double err = (data.outputs - u * sol.v1.transpose()).norm();
    sol.residual = norm_y == 0.0 ? (err == 0.0 ? 0.0 : 1.0) : err / norm_y;
    sol.norm = sol.v1.norm();
    return sol;
}

Eigen::MatrixXd minimal_norm_symmetrize(const Eigen::Ref<const Eigen::MatrixXd>& v1, Index n,
                                        Index d) {
    const FullCount expected = full_count((n - 1), 1, d);  // (pM+1)^d with pM = n-1
    if (expected.overflow || v1.cols() != static_cast<Index>(expected.value)) {
        throw std::invalid_argument("minimal_norm_symmetrize: column count is not n^d");
    }
    const std::vector<Index> dims(static_cast<std::size_t>(d), n);
    Eigen::MatrixXd out(v1.rows(), v1.cols());
    for (Index i = 0; i < v1.rows(); ++i) {
        std::vector<double> entries(v1.cols());
        Eigen::Map<Eigen::VectorXd>(entries.data(), v1.cols()) = v1.row(i).transpose();
        const DenseTensor sym = symmetrize(DenseTensor(dims, std::move(entries)));
        out.row(i) = sym.as_vector().transpose();
    }
    return out;
}

double max_symmetry_defect(const Eigen::Ref<const Eigen::MatrixXd>& v1, Index n, Index d) {
    const std::vector<Index> dims(static_cast<std::size_t>(d), n);
    double worst = 0.0;
    for (Index i = 0; i < v1.rows(); ++i) {
        std::vector<double> entries(v1.cols());
        Eigen::Map<Eigen::VectorXd>(entries.data(), v1.cols()) = v1.row(i).transpose();
        worst = std::max(worst, symmetry_defect(DenseTensor(dims, std::move(entries))));
    }
    return worst;
}

}  // namespace oracle
}  // namespace vttn
