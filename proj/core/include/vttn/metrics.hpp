#pragma once

#include "vttn/common.hpp"

#include <Eigen/Core>

#include <cmath>
#include <limits>

namespace vttn {

/// ||y - yhat||_F / ||y||_F; zero signal and zero error count as 0.
inline double relative_residual(const Eigen::Ref<const Eigen::MatrixXd>& y,
                                const Eigen::Ref<const Eigen::MatrixXd>& yhat) {
    const double err = (y - yhat).norm();
    const double norm = y.norm();
    if (norm == 0.0) return err == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return err / norm;
}

/// 20 log10(||clean|| / ||clean - estimate||), in dB.
inline double snr_db(const Eigen::Ref<const Eigen::MatrixXd>& clean,
                     const Eigen::Ref<const Eigen::MatrixXd>& estimate) {
    const double err = (clean - estimate).norm();
    if (err == 0.0) return std::numeric_limits<double>::infinity();
    return 20.0 * std::log10(clean.norm() / err);
}

}  // namespace vttn
