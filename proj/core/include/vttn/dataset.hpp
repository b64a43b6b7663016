#pragma once

#include "vttn/common.hpp"

#include <Eigen/Core>

#include <optional>

namespace vttn {

/// Aligned multi-channel input/output time series. Row t of each matrix is
/// sample t; columns are channels.
struct TimeSeriesDataset {
    Eigen::MatrixXd inputs;   // N x p
    Eigen::MatrixXd outputs;  // N x l
    std::optional<double> sample_rate_hz;

    Index num_samples() const { return inputs.rows(); }
    Index num_inputs() const { return inputs.cols(); }
    Index num_outputs() const { return outputs.cols(); }

    /// Throws std::invalid_argument unless inputs/outputs share N >= 1.
    void validate() const;

    /// First n samples of every channel.
    TimeSeriesDataset head(Index n) const;
};

}  // namespace vttn
