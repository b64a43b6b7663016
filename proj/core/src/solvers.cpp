#include "vttn/solvers.hpp"

#include "vttn/regressor.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace vttn {
namespace {

double relative(double num, double den) {
    if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return num / den;
}

DenseTensor tensor_from(const Eigen::Ref<const Eigen::MatrixXd>& m, std::vector<Index> dims) {
    std::vector<double> data(static_cast<std::size_t>(m.size()));
    Eigen::Map<Eigen::MatrixXd>(data.data(), m.rows(), m.cols()) = m;
    return DenseTensor(std::move(dims), std::move(data));
}

// Thin QR of the left unfolding of core k; Q becomes the (left orthogonal)
// core, R is multiplied into core k+1.
void left_orthogonalize_step(VolterraModel& model, Index k) {
    TnCore& core = model.cores[static_cast<std::size_t>(k)];
    TnCore& next = model.cores[static_cast<std::size_t>(k) + 1];
    const Index rl = core.left_rank(), n = core.dim(), rr = core.right_rank();

    Eigen::HouseholderQR<Eigen::MatrixXd> qr(core.left_unfold());
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(rl * n, rr);
    const Eigen::MatrixXd r =
        qr.matrixQR().topRows(rr).triangularView<Eigen::Upper>() * Eigen::MatrixXd::Identity(rr, rr);

    core = TnCore(tensor_from(q, {rl, n, rr}));
    next = TnCore(tensor_from(r * next.right_unfold(), {rr, next.dim(), next.right_rank()}));
}

// Mirror image: LQ of the right unfolding of core k (computed as QR of its
// transpose); the orthonormal-row factor becomes the (right orthogonal)
// core, L is multiplied into core k-1.
void right_orthogonalize_step(VolterraModel& model, Index k) {
    TnCore& core = model.cores[static_cast<std::size_t>(k)];
    TnCore& prev = model.cores[static_cast<std::size_t>(k) - 1];
    const Index rl = core.left_rank(), n = core.dim(), rr = core.right_rank();

    Eigen::HouseholderQR<Eigen::MatrixXd> qr(core.right_unfold().transpose());
    const Eigen::MatrixXd q =
        (qr.householderQ() * Eigen::MatrixXd::Identity(n * rr, rl)).transpose();
    const Eigen::MatrixXd lfac =
        (qr.matrixQR().topRows(rl).triangularView<Eigen::Upper>() * Eigen::MatrixXd::Identity(rl, rl))
            .transpose();

    core = TnCore(tensor_from(q, {rl, n, rr}));
    prev = TnCore(tensor_from(prev.left_unfold() * lfac, {prev.left_rank(), prev.dim(), rl}));
}

// Per-half-sweep working set: extended inputs, stacked outputs and caches of
// the partial core products around the active position.
struct SweepContext {
    Eigen::MatrixXd u_all;  // (pM+1) x N, column t = u_t
    Eigen::VectorXd b;      // vec(Y^T), output index fastest
    double norm_y = 0.0;

    SweepContext(const VolterraModel& model, const TimeSeriesDataset& data) {
        const Index N = data.num_samples();
        const Index l = model.l;
        u_all.resize(model.input_dim(), N);
        for (Index t = 0; t < N; ++t) u_all.col(t) = build_ut(data, t, model.M);
        b.resize(l * N);
        for (Index t = 0; t < N; ++t) b.segment(t * l, l) = data.outputs.row(t).transpose();
        norm_y = b.norm();
    }
};

// suffixes[j - 2] holds, per sample, the product of cores j..d-1 contracted
// with u_t (a left_rank(core j) column). Entry j = d is the scalar 1.
std::vector<Eigen::MatrixXd> build_suffixes(const VolterraModel& model, const Eigen::MatrixXd& u_all) {
    const Index d = model.degree();
    const Index N = u_all.cols();
    std::vector<Eigen::MatrixXd> suffixes(static_cast<std::size_t>(d - 1));
    suffixes.back() = Eigen::MatrixXd::Ones(1, N);
    for (Index j = d - 1; j >= 2; --j) {
        const TnCore& core = model.cores[static_cast<std::size_t>(j)];
        Eigen::MatrixXd current(core.left_rank(), N);
        const Eigen::MatrixXd& next = suffixes[static_cast<std::size_t>(j - 1)];
        for (Index t = 0; t < N; ++t) {
            current.col(t).noalias() = core.contract_input(u_all.col(t)) * next.col(t);
        }
        suffixes[static_cast<std::size_t>(j - 2)] = std::move(current);
    }
    return suffixes;
}

// prefixes[j][t] = product of cores 0..j-1 contracted with u_t (l x b_j);
// prefixes[0][t] = I_l.
std::vector<std::vector<Eigen::MatrixXd>> build_prefixes(const VolterraModel& model,
                                                         const Eigen::MatrixXd& u_all) {
    const Index d = model.degree();
    const Index N = u_all.cols();
    std::vector<std::vector<Eigen::MatrixXd>> prefixes(static_cast<std::size_t>(d));
    prefixes[0].assign(static_cast<std::size_t>(N), Eigen::MatrixXd::Identity(model.l, model.l));
    for (Index j = 1; j < d; ++j) {
        const TnCore& core = model.cores[static_cast<std::size_t>(j - 1)];
        auto& level = prefixes[static_cast<std::size_t>(j)];
        level.resize(static_cast<std::size_t>(N));
        for (Index t = 0; t < N; ++t) {
            level[static_cast<std::size_t>(t)] =
                prefixes[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(t)] *
                core.contract_input(u_all.col(t));
        }
    }
    return prefixes;
}

}  // namespace

UnderdeterminedError::UnderdeterminedError(Index core, Index rows, Index cols)
    : std::runtime_error("reduced system for core " + std::to_string(core + 1) + " has " +
                         std::to_string(rows) + " rows but " + std::to_string(cols) +
                         " unknowns; increase N or reduce ranks"),
      core_(core) {}

double SvdTolerance::threshold(double s1, Index rows, Index cols) const {
    switch (policy) {
        case Policy::kMachineDefault:
            return kMachineEpsilon * s1 * static_cast<double>(std::max(rows, cols));
        case Policy::kAbsolute:
            return value;
        case Policy::kRelative:
            return value * s1;
    }
    return 0.0;
}

void SolverConfig::validate(Index degree) const {
    if (residual_tol <= 0.0) throw std::invalid_argument("SolverConfig: residual_tol must be positive");
    if (max_sweeps < 1) throw std::invalid_argument("SolverConfig: max_sweeps must be >= 1");
    if (max_rank < 1) throw std::invalid_argument("SolverConfig: max_rank must be >= 1");
    if (algorithm == Algorithm::kAls) {
        if (static_cast<Index>(ranks.size()) != degree - 1) {
            throw std::invalid_argument("SolverConfig: ALS needs d-1 ranks, got " +
                                        std::to_string(ranks.size()));
        }
        for (Index r : ranks) {
            if (r < 1) throw std::invalid_argument("SolverConfig: ranks must be >= 1");
        }
    }
}

CoreSolution solve_core(const Eigen::Ref<const Eigen::MatrixXd>& a,
                        const Eigen::Ref<const Eigen::VectorXd>& b, double cutoff) {
    const Index rows = a.rows(), cols = a.cols();
    if (b.size() != rows) throw std::invalid_argument("solve_core: rhs length does not match rows");
    const double rcond =
        cutoff > 0.0 ? cutoff : kMachineEpsilon * static_cast<double>(std::max(rows, cols));

    Eigen::MatrixXd work = a;  // dgelsd overwrites its inputs
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(std::max(rows, cols));
    rhs.head(rows) = b;
    Eigen::VectorXd singular(std::min(rows, cols));
    lapack_int rank = 0;
    const lapack_int info = LAPACKE_dgelsd(
        LAPACK_COL_MAJOR, static_cast<lapack_int>(rows), static_cast<lapack_int>(cols), 1,
        work.data(), static_cast<lapack_int>(rows), rhs.data(),
        static_cast<lapack_int>(std::max(rows, cols)), singular.data(), rcond, &rank);
    if (info != 0) {
        throw std::runtime_error("solve_core: dgelsd failed with info " + std::to_string(info));
    }

    CoreSolution sol;
    sol.x = rhs.head(cols);
    sol.residual = (a * sol.x - b).norm();
    sol.rank = static_cast<Index>(rank);
    sol.max_singular = singular.size() > 0 ? singular(0) : 0.0;
    return sol;
}

VolterraModel init_right_orthogonal(Index p, Index l, Index M, Index d,
                                    std::span<const Index> ranks, std::uint64_t seed) {
    if (p < 1 || l < 1 || M < 1 || d < 1) {
        throw std::invalid_argument("init_right_orthogonal: p, l, M, d must be positive");
    }
    if (static_cast<Index>(ranks.size()) != d - 1) {
        throw std::invalid_argument("init_right_orthogonal: need d-1 ranks");
    }
    const Index n = p * M + 1;
    std::vector<Index> bonds;
    bonds.reserve(static_cast<std::size_t>(d) + 1);
    bonds.push_back(l);
    bonds.insert(bonds.end(), ranks.begin(), ranks.end());
    bonds.push_back(1);
    for (Index k = 1; k < d; ++k) {
        const Index r = bonds[static_cast<std::size_t>(k)];
        const Index cap = std::min(bonds[static_cast<std::size_t>(k - 1)] * n,
                                   n * bonds[static_cast<std::size_t>(k + 1)]);
        if (r < 1 || r > cap) {
            throw std::invalid_argument("init_right_orthogonal: rank r_" + std::to_string(k) + " = " +
                                        std::to_string(r) + " violates the structural bound " +
                                        std::to_string(cap));
        }
    }

    // Entries are drawn around 1 rather than 0: the extended input vector
    // carries a constant first entry, and a mean-one fiber keeps the initial
    // reduced systems anchored to that direction. A zero-mean start makes the
    // first sweep fit the data through sign-alternating random fibers, which
    // stalls it well above the residual tolerance.
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    constexpr double kInitNoiseScale = 0.1;
    VolterraModel model;
    model.p = p;
    model.l = l;
    model.M = M;
    model.cores.reserve(static_cast<std::size_t>(d));
    for (Index k = 0; k < d; ++k) {
        TnCore core(bonds[static_cast<std::size_t>(k)], n, bonds[static_cast<std::size_t>(k) + 1]);
        for (double& v : core.tensor().values()) v = 1.0 + kInitNoiseScale * normal(rng);
        model.cores.push_back(std::move(core));
    }
    for (Index k = d - 1; k >= 1; --k) right_orthogonalize_step(model, k);
    model.validate();
    return model;
}

SplitResult split_supercore(const DenseTensor& w, Index n, SweepDirection direction,
                            const SvdTolerance& tol, Index max_rank) {
    if (w.order() != 3 || w.dim(1) != n * n) {
        throw std::invalid_argument("split_supercore: expected an r x n^2 x r' tensor");
    }
    const Index rl = w.dim(0), rr = w.dim(2);
    const auto mat = w.as_matrix(rl * n, n * rr);

    Eigen::BDCSVD<Eigen::MatrixXd> svd(mat, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& s = svd.singularValues();
    const Index q = s.size();
    const double s1 = q > 0 ? s(0) : 0.0;
    const double tau = tol.threshold(s1, rl * n, n * rr);

    Index rank = 0;
    while (rank < q && s(rank) >= tau) ++rank;
    rank = std::clamp<Index>(rank, 1, std::min(max_rank, q));

    double discarded2 = 0.0;
    for (Index i = rank; i < q; ++i) discarded2 += s(i) * s(i);

    const Eigen::MatrixXd u = svd.matrixU().leftCols(rank);
    const Eigen::MatrixXd v = svd.matrixV().leftCols(rank);
    const Eigen::VectorXd sv = s.head(rank);

    SplitResult result;
    result.rank = rank;
    result.discarded_energy = std::sqrt(discarded2);
    if (direction == SweepDirection::kLeftToRight) {
        result.left = TnCore(tensor_from(u, {rl, n, rank}));
        result.right = TnCore(tensor_from(sv.asDiagonal() * v.transpose(), {rank, n, rr}));
    } else {
        result.left = TnCore(tensor_from(u * sv.asDiagonal(), {rl, n, rank}));
        result.right = TnCore(tensor_from(v.transpose(), {rank, n, rr}));
    }
    return result;
}

void als_half_sweep(VolterraModel& model, const TimeSeriesDataset& data, SweepDirection direction,
                    const SolverConfig& config, SweepTrace* trace) {
    model.validate();
    data.validate();
    const Index d = model.degree();
    const Index l = model.l;
    const Index n = model.input_dim();
    const Index N = data.num_samples();
    if (d < 2) return;  // a single core has no sweep; identify() solves it directly

    SweepContext ctx(model, data);
    const auto solve_at = [&](Index k, const std::vector<Eigen::MatrixXd>& v_left,
                              const std::vector<Eigen::VectorXd>& v_right) {
        const Index rl = model.cores[static_cast<std::size_t>(k)].left_rank();
        const Index rr = model.cores[static_cast<std::size_t>(k)].right_rank();
        const Index cols = rl * n * rr;
        if (l * N < cols) throw UnderdeterminedError(k, l * N, cols);

        Eigen::MatrixXd a(l * N, cols);
        for (Index t = 0; t < N; ++t) {
            detail::fill_row_block(a.middleRows(t * l, l), v_left[static_cast<std::size_t>(t)],
                                   ctx.u_all.col(t), v_right[static_cast<std::size_t>(t)]);
        }
        const CoreSolution sol = solve_core(a, ctx.b, config.ls_cutoff);
        model.cores[static_cast<std::size_t>(k)] =
            TnCore(tensor_from(Eigen::Map<const Eigen::MatrixXd>(sol.x.data(), rl * n, rr), {rl, n, rr}));
        if (trace) {
            trace->solve_residuals.push_back(relative(sol.residual, ctx.norm_y));
            trace->truncation_allowance.push_back(0.0);
        }
    };

    if (direction == SweepDirection::kLeftToRight) {
        const std::vector<Eigen::MatrixXd> suffixes = build_suffixes(model, ctx.u_all);
        std::vector<Eigen::MatrixXd> v_left(static_cast<std::size_t>(N),
                                            Eigen::MatrixXd::Identity(l, l));
        std::vector<Eigen::VectorXd> v_right(static_cast<std::size_t>(N));
        for (Index k = 0; k <= d - 2; ++k) {
            // Core k+1 may have absorbed an R factor, so recombine it with the
            // untouched suffix at k+2 instead of using the stale suffix at k+1.
            const TnCore& next = model.cores[static_cast<std::size_t>(k) + 1];
            const Eigen::MatrixXd& tail = suffixes[static_cast<std::size_t>(k)];
            for (Index t = 0; t < N; ++t) {
                v_right[static_cast<std::size_t>(t)].noalias() =
                    next.contract_input(ctx.u_all.col(t)) * tail.col(t);
            }
            solve_at(k, v_left, v_right);
            left_orthogonalize_step(model, k);
            const TnCore& updated = model.cores[static_cast<std::size_t>(k)];
            for (Index t = 0; t < N; ++t) {
                v_left[static_cast<std::size_t>(t)] =
                    v_left[static_cast<std::size_t>(t)] * updated.contract_input(ctx.u_all.col(t));
            }
        }
    } else {
        const std::vector<std::vector<Eigen::MatrixXd>> prefixes = build_prefixes(model, ctx.u_all);
        std::vector<Eigen::VectorXd> v_right(static_cast<std::size_t>(N),
                                             Eigen::VectorXd::Ones(1));
        for (Index k = d - 1; k >= 1; --k) {
            solve_at(k, prefixes[static_cast<std::size_t>(k)], v_right);
            right_orthogonalize_step(model, k);
            const TnCore& updated = model.cores[static_cast<std::size_t>(k)];
            for (Index t = 0; t < N; ++t) {
                v_right[static_cast<std::size_t>(t)] =
                    updated.contract_input(ctx.u_all.col(t)) * v_right[static_cast<std::size_t>(t)];
            }
        }
    }
}

void mals_half_sweep(VolterraModel& model, const TimeSeriesDataset& data, SweepDirection direction,
                     const SolverConfig& config, SweepTrace* trace) {
    model.validate();
    data.validate();
    const Index d = model.degree();
    if (d < 2) throw std::invalid_argument("mals_half_sweep: degree must be >= 2");
    const Index l = model.l;
    const Index n = model.input_dim();
    const Index N = data.num_samples();

    SweepContext ctx(model, data);
    Eigen::MatrixXd u2_all(n * n, N);
    for (Index t = 0; t < N; ++t) u2_all.col(t) = kron_power(ctx.u_all.col(t), 2);

    // Solves the super-core at (k, k+1) and splits it. The reduced system may
    // be underdetermined while ranks are still growing; the minimal-norm
    // solve handles that case, so no row-count check here.
    const auto solve_pair = [&](Index k, const std::vector<Eigen::MatrixXd>& v_left,
                                const std::vector<Eigen::VectorXd>& v_right) {
        const Index rl = model.cores[static_cast<std::size_t>(k)].left_rank();
        const Index rr = model.cores[static_cast<std::size_t>(k) + 1].right_rank();
        const Index cols = rl * n * n * rr;

        Eigen::MatrixXd a(l * N, cols);
        for (Index t = 0; t < N; ++t) {
            detail::fill_row_block(a.middleRows(t * l, l), v_left[static_cast<std::size_t>(t)],
                                   u2_all.col(t), v_right[static_cast<std::size_t>(t)]);
        }
        const CoreSolution sol = solve_core(a, ctx.b, config.ls_cutoff);

        const SplitResult split =
            split_supercore(DenseTensor({rl, n * n, rr}, {sol.x.data(), sol.x.data() + sol.x.size()}),
                            n, direction, config.svd_tol, config.max_rank);
        model.cores[static_cast<std::size_t>(k)] = split.left;
        model.cores[static_cast<std::size_t>(k) + 1] = split.right;
        if (trace) {
            trace->solve_residuals.push_back(relative(sol.residual, ctx.norm_y));
            trace->truncation_allowance.push_back(
                relative(sol.max_singular * split.discarded_energy, ctx.norm_y));
        }
    };

    if (direction == SweepDirection::kLeftToRight) {
        const std::vector<Eigen::MatrixXd> suffixes = build_suffixes(model, ctx.u_all);
        std::vector<Eigen::MatrixXd> v_left(static_cast<std::size_t>(N),
                                            Eigen::MatrixXd::Identity(l, l));
        std::vector<Eigen::VectorXd> v_right(static_cast<std::size_t>(N));
        for (Index k = 0; k <= d - 2; ++k) {
            const Eigen::MatrixXd& tail = suffixes[static_cast<std::size_t>(k)];
            for (Index t = 0; t < N; ++t) v_right[static_cast<std::size_t>(t)] = tail.col(t);
            solve_pair(k, v_left, v_right);
            const TnCore& updated = model.cores[static_cast<std::size_t>(k)];
            for (Index t = 0; t < N; ++t) {
                v_left[static_cast<std::size_t>(t)] =
                    v_left[static_cast<std::size_t>(t)] * updated.contract_input(ctx.u_all.col(t));
            }
        }
    } else {
        const std::vector<std::vector<Eigen::MatrixXd>> prefixes = build_prefixes(model, ctx.u_all);
        std::vector<Eigen::VectorXd> v_right(static_cast<std::size_t>(N),
                                             Eigen::VectorXd::Ones(1));
        for (Index k = d - 2; k >= 0; --k) {
            solve_pair(k, prefixes[static_cast<std::size_t>(k)], v_right);
            const TnCore& updated = model.cores[static_cast<std::size_t>(k) + 1];
            for (Index t = 0; t < N; ++t) {
                v_right[static_cast<std::size_t>(t)] =
                    updated.contract_input(ctx.u_all.col(t)) * v_right[static_cast<std::size_t>(t)];
            }
        }
    }
}

std::pair<VolterraModel, SolverReport> identify(const TimeSeriesDataset& data, Index p, Index l,
                                                Index M, Index d, const SolverConfig& config) {
    data.validate();
    if (data.num_inputs() != p) throw std::invalid_argument("identify: dataset has wrong input channel count");
    if (data.num_outputs() != l) throw std::invalid_argument("identify: dataset has wrong output channel count");
    config.validate(d);

    const std::vector<Index> init_ranks = config.algorithm == Algorithm::kAls
                                              ? config.ranks
                                              : std::vector<Index>(static_cast<std::size_t>(d - 1), 1);
    VolterraModel model = init_right_orthogonal(p, l, M, d, init_ranks, config.seed);

    SolverReport report;
    SweepTrace trace;
    const double norm_y = data.outputs.norm();

    const auto record_half_sweep = [&](SweepDirection direction) {
        const double residual =
            relative((data.outputs - simulate_series(model, data)).norm(), norm_y);
        report.residual_trace.push_back(residual);
        double defect = 0.0;
        if (direction == SweepDirection::kLeftToRight) {
            for (Index k = 0; k <= d - 2; ++k) {
                defect = std::max(defect, left_orthogonality_defect(model.cores[static_cast<std::size_t>(k)]));
            }
        } else {
            for (Index k = 1; k <= d - 1; ++k) {
                defect = std::max(defect, right_orthogonality_defect(model.cores[static_cast<std::size_t>(k)]));
            }
        }
        report.orthogonality_audit.push_back(defect);
        return residual;
    };

    if (d == 1) {
        // Degenerate degree: the model is one core and the identification is a
        // single linear least-squares problem.
        const Eigen::MatrixXd a = build_Uk(data, model, 0);
        if (config.algorithm == Algorithm::kAls && l * data.num_samples() < a.cols()) {
            throw UnderdeterminedError(0, l * data.num_samples(), a.cols());
        }
        Eigen::VectorXd b(l * data.num_samples());
        for (Index t = 0; t < data.num_samples(); ++t) b.segment(t * l, l) = data.outputs.row(t).transpose();
        const CoreSolution sol = solve_core(a, b, config.ls_cutoff);
        const Index n = model.input_dim();
        model.cores[0] = TnCore(DenseTensor({l, n, 1}, {sol.x.data(), sol.x.data() + sol.x.size()}));
        const double residual = relative(sol.residual, norm_y);
        report.residual_trace.push_back(residual);
        report.solve_residuals.push_back(residual);
        report.truncation_allowance.push_back(0.0);
        report.orthogonality_audit.push_back(0.0);
        report.sweeps_used = 1;
        report.converged = residual < config.residual_tol;
        report.final_residual = residual;
        report.final_ranks = model.ranks();
        return {std::move(model), std::move(report)};
    }

    // Termination is checked after every half-sweep. Stopping mid-sweep
    // matters for MALS: once the residual is below tolerance, a further
    // backward pass would only let the minimal-norm pair solves push the
    // interior ranks up without improving the fit.
    const auto do_half_sweep = [&](SweepDirection direction) {
        if (config.algorithm == Algorithm::kAls) {
            als_half_sweep(model, data, direction, config, &trace);
        } else {
            mals_half_sweep(model, data, direction, config, &trace);
        }
        return record_half_sweep(direction);
    };

    for (int sweep = 1; sweep <= config.max_sweeps; ++sweep) {
        report.sweeps_used = sweep;
        if (do_half_sweep(SweepDirection::kLeftToRight) < config.residual_tol) {
            report.converged = true;
            break;
        }
        if (do_half_sweep(SweepDirection::kRightToLeft) < config.residual_tol) {
            report.converged = true;
            break;
        }
    }

    report.solve_residuals = std::move(trace.solve_residuals);
    report.truncation_allowance = std::move(trace.truncation_allowance);
    report.final_residual = report.residual_trace.back();
    report.final_ranks = model.ranks();
    return {std::move(model), std::move(report)};
}

}  // namespace vttn
