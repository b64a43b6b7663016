#pragma once

#include "vttn/dataset.hpp"
#include "vttn/solvers.hpp"
#include "vttn/tn_model.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>

namespace vttn {
namespace io {

/// Raised on malformed model files or CSV input.
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

/// Binary model format "VTTN1": magic, little-endian u32 header
/// (p, l, M, d), a scalar-width byte (8), the rank chain r_0..r_d as u32,
/// the cores as consecutive first-index-fastest little-endian doubles, and
/// a trailing CRC32 of the payload. Round trips are bit exact.
void save_model(const std::filesystem::path& path, const VolterraModel& model);
VolterraModel load_model(const std::filesystem::path& path);

/// CSV with a header row naming channels u1..up and y1..yl (an optional t
/// column is ignored). Values are written with 17 significant digits.
void save_csv(const std::filesystem::path& path, const TimeSeriesDataset& data);
TimeSeriesDataset load_csv(const std::filesystem::path& path);

/// Writes predicted outputs as CSV columns yhat1..yhatl.
void save_outputs_csv(const std::filesystem::path& path, const Eigen::MatrixXd& outputs);
/// Reads the y1..yl (or yhat1..yhatl) columns of a CSV.
Eigen::MatrixXd load_outputs_csv(const std::filesystem::path& path);

/// Line-oriented key=value identification report plus a residual-trace
/// block; deterministic for a fixed seed (no timings).
std::string report_text(const VolterraModel& model, const SolverReport& report,
                        const SolverConfig& config);

}  // namespace io
}  // namespace vttn
