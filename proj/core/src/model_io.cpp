#include "vttn/model_io.hpp"

#include <zlib.h>

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace vttn {
namespace io {
namespace {

constexpr char kMagic[5] = {'V', 'T', 'T', 'N', '1'};
constexpr std::uint8_t kScalarWidth = 8;

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) {
    const std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

class Reader {
public:
    Reader(const unsigned char* data, std::size_t size) : data_(data), size_(size) {}

    std::uint32_t u32() {
        require(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data_[pos_ + i]) << (8 * i);
        pos_ += 4;
        return v;
    }

    std::uint8_t u8() {
        require(1);
        return data_[pos_++];
    }

    double f64() {
        require(8);
        std::uint64_t bits = 0;
        for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
        pos_ += 8;
        return std::bit_cast<double>(bits);
    }

    const unsigned char* cursor() const { return data_ + pos_; }
    std::size_t remaining() const { return size_ - pos_; }
    void require(std::size_t n) const {
        if (pos_ + n > size_) throw FormatError("model file truncated");
    }

private:
    const unsigned char* data_;
    std::size_t size_;
    std::size_t pos_ = 0;
};

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

}  // namespace

void save_model(const std::filesystem::path& path, const VolterraModel& model) {
    model.validate();
    std::string payload;
    for (const TnCore& core : model.cores) {
        for (double v : core.tensor().values()) put_f64(payload, v);
    }
    const auto crc = static_cast<std::uint32_t>(
        crc32(0L, reinterpret_cast<const Bytef*>(payload.data()), static_cast<uInt>(payload.size())));

    std::string blob(kMagic, sizeof(kMagic));
    put_u32(blob, static_cast<std::uint32_t>(model.p));
    put_u32(blob, static_cast<std::uint32_t>(model.l));
    put_u32(blob, static_cast<std::uint32_t>(model.M));
    put_u32(blob, static_cast<std::uint32_t>(model.degree()));
    blob.push_back(static_cast<char>(kScalarWidth));
    for (Index r : model.ranks()) put_u32(blob, static_cast<std::uint32_t>(r));
    blob += payload;
    put_u32(blob, crc);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write " + path.string());
    out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
    if (!out) throw FormatError("short write to " + path.string());
}

VolterraModel load_model(const std::filesystem::path& path) {
    const std::string blob = slurp(path);
    Reader r(reinterpret_cast<const unsigned char*>(blob.data()), blob.size());

    r.require(sizeof(kMagic));
    if (std::memcmp(blob.data(), kMagic, sizeof(kMagic)) != 0) {
        throw FormatError("unknown magic in " + path.string());
    }
    for (std::size_t i = 0; i < sizeof(kMagic); ++i) r.u8();

    VolterraModel model;
    model.p = r.u32();
    model.l = r.u32();
    model.M = r.u32();
    const std::uint32_t d = r.u32();
    if (r.u8() != kScalarWidth) throw FormatError("unsupported scalar width");
    if (d == 0 || model.p < 1 || model.l < 1 || model.M < 1) throw FormatError("bad model header");

    std::vector<Index> bonds(d + 1);
    for (auto& b : bonds) b = static_cast<Index>(r.u32());

    const Index n = model.p * model.M + 1;
    std::uint64_t payload_scalars = 0;
    for (std::uint32_t k = 0; k < d; ++k) {
        payload_scalars += static_cast<std::uint64_t>(bonds[k]) * n * bonds[k + 1];
    }
    r.require(payload_scalars * 8 + 4);
    const auto crc = static_cast<std::uint32_t>(
        crc32(0L, reinterpret_cast<const Bytef*>(r.cursor()), static_cast<uInt>(payload_scalars * 8)));

    for (std::uint32_t k = 0; k < d; ++k) {
        TnCore core(bonds[k], n, bonds[k + 1]);
        for (double& v : core.tensor().values()) v = r.f64();
        model.cores.push_back(std::move(core));
    }
    if (r.u32() != crc) throw FormatError("checksum mismatch in " + path.string());
    if (r.remaining() != 0) throw FormatError("trailing bytes in " + path.string());
    model.validate();
    return model;
}

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

Csv parse_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw FormatError(path.string() + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    Csv csv;
    std::stringstream header(line);
    std::string cell;
    while (std::getline(header, cell, ',')) {
        while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.erase(cell.begin());
        while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t')) cell.pop_back();
        csv.header.push_back(cell);
    }
    if (csv.header.empty()) throw FormatError(path.string() + ": missing header row");

    std::size_t row_number = 1;
    while (std::getline(in, line)) {
        ++row_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream row(line);
        std::vector<double> values;
        std::size_t col = 0;
        while (std::getline(row, cell, ',')) {
            ++col;
            try {
                std::size_t used = 0;
                values.push_back(std::stod(cell, &used));
                while (used < cell.size() && (cell[used] == ' ' || cell[used] == '\t')) ++used;
                if (used != cell.size()) throw std::invalid_argument("trailing characters");
            } catch (const std::exception&) {
                throw FormatError(path.string() + ": non-numeric cell at row " +
                                  std::to_string(row_number) + ", column " + std::to_string(col));
            }
        }
        if (values.size() != csv.header.size()) {
            throw FormatError(path.string() + ": row " + std::to_string(row_number) + " has " +
                              std::to_string(values.size()) + " cells, header has " +
                              std::to_string(csv.header.size()));
        }
        csv.rows.push_back(std::move(values));
    }
    return csv;
}

// Maps names like "u1".."up" to 0-based channel slots; returns the column
// order or throws when indices are missing or duplicated.
std::vector<Index> channel_columns(const Csv& csv, const std::string& prefix,
                                   const std::filesystem::path& path) {
    std::vector<std::pair<Index, Index>> found;  // (channel, column)
    for (std::size_t c = 0; c < csv.header.size(); ++c) {
        const std::string& name = csv.header[c];
        if (name.size() <= prefix.size() || name.compare(0, prefix.size(), prefix) != 0) continue;
        const std::string tail = name.substr(prefix.size());
        if (tail.find_first_not_of("0123456789") != std::string::npos) continue;
        found.emplace_back(static_cast<Index>(std::stoul(tail)) - 1, static_cast<Index>(c));
    }
    std::sort(found.begin(), found.end());
    std::vector<Index> columns;
    for (std::size_t i = 0; i < found.size(); ++i) {
        if (found[i].first != static_cast<Index>(i)) {
            throw FormatError(path.string() + ": expected contiguous " + prefix + "1.." + prefix +
                              "<k> columns");
        }
        columns.push_back(found[i].second);
    }
    return columns;
}

}  // namespace

void save_csv(const std::filesystem::path& path, const TimeSeriesDataset& data) {
    data.validate();
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FormatError("cannot write " + path.string());
    for (Index j = 0; j < data.num_inputs(); ++j) out << (j ? "," : "") << "u" << (j + 1);
    for (Index j = 0; j < data.num_outputs(); ++j) out << ",y" << (j + 1);
    out << "\n";
    for (Index t = 0; t < data.num_samples(); ++t) {
        for (Index j = 0; j < data.num_inputs(); ++j) {
            out << (j ? "," : "") << format_double(data.inputs(t, j));
        }
        for (Index j = 0; j < data.num_outputs(); ++j) out << "," << format_double(data.outputs(t, j));
        out << "\n";
    }
    if (!out) throw FormatError("short write to " + path.string());
}

TimeSeriesDataset load_csv(const std::filesystem::path& path) {
    const Csv csv = parse_csv(path);
    const std::vector<Index> u_cols = channel_columns(csv, "u", path);
    const std::vector<Index> y_cols = channel_columns(csv, "y", path);
    if (u_cols.empty()) throw FormatError(path.string() + ": no input columns u1..up");
    if (y_cols.empty()) throw FormatError(path.string() + ": no output columns y1..yl");
    if (csv.rows.empty()) throw FormatError(path.string() + ": no data rows");

    TimeSeriesDataset data;
    const Index n = static_cast<Index>(csv.rows.size());
    data.inputs.resize(n, static_cast<Index>(u_cols.size()));
    data.outputs.resize(n, static_cast<Index>(y_cols.size()));
    for (Index t = 0; t < n; ++t) {
        const auto& row = csv.rows[static_cast<std::size_t>(t)];
        for (std::size_t j = 0; j < u_cols.size(); ++j) {
            data.inputs(t, static_cast<Index>(j)) = row[static_cast<std::size_t>(u_cols[j])];
        }
        for (std::size_t j = 0; j < y_cols.size(); ++j) {
            data.outputs(t, static_cast<Index>(j)) = row[static_cast<std::size_t>(y_cols[j])];
        }
    }
    return data;
}

void save_outputs_csv(const std::filesystem::path& path, const Eigen::MatrixXd& outputs) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FormatError("cannot write " + path.string());
    for (Index j = 0; j < outputs.cols(); ++j) out << (j ? "," : "") << "yhat" << (j + 1);
    out << "\n";
    for (Index t = 0; t < outputs.rows(); ++t) {
        for (Index j = 0; j < outputs.cols(); ++j) {
            out << (j ? "," : "") << format_double(outputs(t, j));
        }
        out << "\n";
    }
    if (!out) throw FormatError("short write to " + path.string());
}

Eigen::MatrixXd load_outputs_csv(const std::filesystem::path& path) {
    const Csv csv = parse_csv(path);
    std::vector<Index> cols = channel_columns(csv, "yhat", path);
    if (cols.empty()) cols = channel_columns(csv, "y", path);
    if (cols.empty()) throw FormatError(path.string() + ": no output columns");
    Eigen::MatrixXd out(static_cast<Index>(csv.rows.size()), static_cast<Index>(cols.size()));
    for (Index t = 0; t < out.rows(); ++t) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            out(t, static_cast<Index>(j)) = csv.rows[static_cast<std::size_t>(t)][static_cast<std::size_t>(cols[j])];
        }
    }
    return out;
}

std::string report_text(const VolterraModel& model, const SolverReport& report,
                        const SolverConfig& config) {
    std::ostringstream out;
    out << "algorithm=" << (config.algorithm == Algorithm::kAls ? "als" : "mals") << "\n";
    out << "p=" << model.p << "\n";
    out << "l=" << model.l << "\n";
    out << "M=" << model.M << "\n";
    out << "d=" << model.degree() << "\n";
    out << "seed=" << config.seed << "\n";
    out << "residual_tol=" << format_double(config.residual_tol) << "\n";
    out << "converged=" << (report.converged ? "true" : "false") << "\n";
    out << "sweeps_used=" << report.sweeps_used << "\n";
    out << "final_residual=" << format_double(report.final_residual) << "\n";
    out << "ranks=";
    for (std::size_t i = 0; i < report.final_ranks.size(); ++i) {
        out << (i ? "," : "") << report.final_ranks[i];
    }
    out << "\n";
    out << "max_rank=" << model.max_rank() << "\n";
    out << "parameter_count=" << parameter_count(model) << "\n";
    const FullCount fc = full_count(model.p, model.M, model.degree());
    out << "full_count=" << (fc.overflow ? std::string("overflow") : std::to_string(fc.value)) << "\n";
    out << "residual_trace:\n";
    for (std::size_t i = 0; i < report.residual_trace.size(); ++i) {
        out << (i + 1) << " " << format_double(report.residual_trace[i]) << "\n";
    }
    return std::move(out).str();
}

}  // namespace io
}  // namespace vttn
