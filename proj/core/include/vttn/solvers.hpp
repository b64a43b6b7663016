#pragma once

#include "vttn/dataset.hpp"
#include "vttn/tn_model.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace vttn {

enum class Algorithm { kAls, kMals };
enum class SweepDirection { kLeftToRight, kRightToLeft };

/// Thrown when a reduced ALS system has fewer rows than unknowns.
class UnderdeterminedError : public std::runtime_error {
public:
    UnderdeterminedError(Index core, Index rows, Index cols);
    Index core_index() const { return core_; }

private:
    Index core_;
};

/// Singular-value truncation rule for super-core splits.
struct SvdTolerance {
    enum class Policy { kMachineDefault, kAbsolute, kRelative };

    Policy policy = Policy::kMachineDefault;
    double value = 0.0;

    static SvdTolerance machine_default() { return {}; }
    static SvdTolerance absolute(double tau) { return {Policy::kAbsolute, tau}; }
    static SvdTolerance relative(double fraction) { return {Policy::kRelative, fraction}; }

    /// Cutoff below which singular values are discarded. The machine default
    /// is eps * s1 * max(rows, cols) of the matrix being split.
    double threshold(double s1, Index rows, Index cols) const;
};

struct SolverConfig {
    Algorithm algorithm = Algorithm::kMals;
    std::vector<Index> ranks;  // ALS only: r_1..r_{d-1}
    double residual_tol = 1e-4;
    int max_sweeps = 50;
    SvdTolerance svd_tol{};
    Index max_rank = 50;  // MALS rank cap
    double ls_cutoff = 0.0;  // relative LS cutoff; <= 0 selects eps * max(rows, cols)
    std::uint64_t seed = 0;

    void validate(Index degree) const;
};

struct SolverReport {
    /// Training relative residual after every half-sweep.
    std::vector<double> residual_trace;
    /// Relative residual of each reduced-system solve, in sweep order.
    std::vector<double> solve_residuals;
    /// Residual increase allowed by the following truncation, per solve
    /// (s1 of the reduced matrix times the discarded singular-value energy,
    /// normalized by ||Y||; zero for ALS).
    std::vector<double> truncation_allowance;
    /// Max orthogonality defect of the cores each half-sweep must leave
    /// orthogonal.
    std::vector<double> orthogonality_audit;
    std::vector<Index> final_ranks;
    int sweeps_used = 0;
    bool converged = false;
    double final_residual = 0.0;
};

/// Minimal-norm least-squares solution of a x = b via SVD: singular values
/// below cutoff * s1 are treated as zero. cutoff <= 0 selects
/// eps * max(rows, cols).
struct CoreSolution {
    Eigen::VectorXd x;
    double residual = 0.0;      // ||a x - b||_2
    Index rank = 0;             // numerical rank used by the solve
    double max_singular = 0.0;  // s1 of a
};
CoreSolution solve_core(const Eigen::Ref<const Eigen::MatrixXd>& a,
                        const Eigen::Ref<const Eigen::VectorXd>& b, double cutoff = 0.0);

/// Seeded standard-normal cores, then a right-to-left orthogonalization pass
/// so cores 2..d are right orthogonal. `ranks` lists r_1..r_{d-1} and must
/// satisfy r_k <= min(r_{k-1} (pM+1), (pM+1) r_{k+1}) with r_0 = l, r_d = 1.
VolterraModel init_right_orthogonal(Index p, Index l, Index M, Index d,
                                    std::span<const Index> ranks, std::uint64_t seed);

struct SplitResult {
    TnCore left;
    TnCore right;
    Index rank = 0;
    double discarded_energy = 0.0;  // sqrt of the discarded sigma^2 sum
};

/// SVD split of an r_{k-1} x (pM+1)^2 x r_{k+1} super-core into two cores.
/// Left-to-right keeps the orthonormal factor on the left (left-orthogonal
/// first core); right-to-left mirrors. The new rank is the count of singular
/// values >= the tolerance threshold, clamped to [1, max_rank] and to the
/// matricization size.
SplitResult split_supercore(const DenseTensor& w, Index n, SweepDirection direction,
                            const SvdTolerance& tol, Index max_rank);

/// Per-solve diagnostics appended by the half-sweep routines.
struct SweepTrace {
    std::vector<double> solve_residuals;
    std::vector<double> truncation_allowance;
};

/// One ALS half-sweep over the solvable cores (1..d-1 left-to-right,
/// d..2 right-to-left, 1-based), each solve followed by the QR step that
/// keeps the sweep orthogonal. Ranks are unchanged.
void als_half_sweep(VolterraModel& model, const TimeSeriesDataset& data, SweepDirection direction,
                    const SolverConfig& config, SweepTrace* trace = nullptr);

/// One MALS half-sweep over adjacent core pairs, each pair solved jointly as
/// a super-core and re-split by SVD; ranks adapt.
void mals_half_sweep(VolterraModel& model, const TimeSeriesDataset& data, SweepDirection direction,
                     const SolverConfig& config, SweepTrace* trace = nullptr);

/// Full identification: seeded init, alternating half-sweeps until the
/// training relative residual drops below config.residual_tol (checked at
/// sweep boundaries) or max_sweeps is reached.
std::pair<VolterraModel, SolverReport> identify(const TimeSeriesDataset& data, Index p, Index l,
                                                Index M, Index d, const SolverConfig& config);

}  // namespace vttn
