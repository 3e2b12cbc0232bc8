#include "ovna/io.hpp"

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "ovna/errors.hpp"

namespace ovna {

namespace {

constexpr std::array<char, 4> kMagic{'O', 'V', 'N', 'A'};
constexpr std::uint32_t kWaveformVersion = 1;

void append_raw(std::string& out, const void* p, std::size_t n) {
    out.append(static_cast<const char*>(p), n);
}

template <typename T>
void append_value(std::string& out, T v) {
    append_raw(out, &v, sizeof(T));
}

template <typename T>
T read_value(std::istream& in, const char* what) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw InvalidInputError(std::string("read_waveform: truncated ") + what);
    return v;
}

std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
    std::filesystem::path p = path;
    p += ".meta";
    return p;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    return fields;
}

double parse_double(const std::string& s, const char* what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw InvalidInputError(std::string("malformed numeric field in ") + what + ": '" + s +
                                "'");
    }
}

std::ifstream open_text(const std::filesystem::path& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw InvalidInputError(std::string("cannot open ") + what + ": " + path.string());
    return in;
}

/// Reads the versioned "# format: name vN" comment and returns the data lines.
std::vector<std::string> read_csv_body(std::istream& in, const std::string& expect_format,
                                       const char* what) {
    std::string line;
    bool format_seen = false;
    std::vector<std::string> body;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.front() == '#') {
            if (line.rfind("# format: ", 0) == 0) {
                if (line.substr(10) != expect_format)
                    throw InvalidInputError(std::string(what) + ": unexpected format line '" +
                                            line + "'");
                format_seen = true;
            }
            continue;
        }
        body.push_back(line);
    }
    if (!format_seen)
        throw InvalidInputError(std::string(what) + ": missing '# format: " + expect_format +
                                "' header");
    if (body.empty()) throw InvalidInputError(std::string(what) + ": no data rows");
    return body;
}

}  // namespace

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InvalidInputError("atomic_write: cannot open " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw InvalidInputError("atomic_write: write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

void write_waveform(const std::filesystem::path& path, const WaveformRecord& record) {
    const std::size_t n = record.size();
    if (record.y.size() != n || record.aux.size() != n || record.trk.size() != n)
        throw InvalidInputError("write_waveform: channel length mismatch");

    std::string buf;
    buf.reserve(64 + 4 * n * sizeof(float));
    append_raw(buf, kMagic.data(), kMagic.size());
    append_value<std::uint32_t>(buf, kWaveformVersion);
    append_value<std::uint32_t>(buf, 4);
    append_value<double>(buf, record.sample_rate);
    append_value<std::uint64_t>(buf, static_cast<std::uint64_t>(n));
    for (double fs : record.full_scale) append_value<double>(buf, fs);
    for (const auto* ch : {&record.x, &record.y, &record.aux, &record.trk})
        append_raw(buf, ch->data(), n * sizeof(float));
    atomic_write(path, buf);

    std::ostringstream meta;
    meta << "format ovna-sweep-meta v1\n"
         << "lambda_start " << format_double(record.sweep.lambda_start) << "\n"
         << "lambda_stop " << format_double(record.sweep.lambda_stop) << "\n"
         << "sweep_rate " << format_double(record.sweep.sweep_rate) << "\n"
         << "nonlinearity_amplitude_hz " << format_double(record.sweep.nonlinearity.amplitude_hz)
         << "\n"
         << "nonlinearity_period_s " << format_double(record.sweep.nonlinearity.period_s) << "\n"
         << "aux_delay " << format_double(record.aux_delay) << "\n"
         << "power_envelope_points " << record.sweep.power_envelope.size() << "\n";
    for (const auto& p : record.sweep.power_envelope)
        meta << "power_envelope " << format_double(p.lambda) << " "
             << format_double(p.relative) << "\n";
    atomic_write(sidecar_path(path), meta.str());
}

WaveformRecord read_waveform(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInputError("read_waveform: cannot open " + path.string());

    std::array<char, 4> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != kMagic)
        throw InvalidInputError("read_waveform: bad magic in " + path.string());
    const auto version = read_value<std::uint32_t>(in, "version");
    if (version != kWaveformVersion)
        throw InvalidInputError("read_waveform: unsupported container version " +
                                std::to_string(version));
    const auto n_channels = read_value<std::uint32_t>(in, "channel count");
    if (n_channels != 4)
        throw InvalidInputError("read_waveform: expected 4 channels, found " +
                                std::to_string(n_channels));

    WaveformRecord record;
    record.sample_rate = read_value<double>(in, "sample rate");
    const auto n = static_cast<std::size_t>(read_value<std::uint64_t>(in, "sample count"));
    for (auto& fs : record.full_scale) fs = read_value<double>(in, "full scale");
    for (auto* ch : {&record.x, &record.y, &record.aux, &record.trk}) {
        ch->resize(n);
        in.read(reinterpret_cast<char*>(ch->data()),
                static_cast<std::streamsize>(n * sizeof(float)));
        if (!in) throw InvalidInputError("read_waveform: truncated channel data");
    }

    auto meta = open_text(sidecar_path(path), "waveform sidecar");
    std::string line;
    std::size_t envelope_points = 0;
    bool header_ok = false;
    while (std::getline(meta, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "format") {
            std::string rest;
            std::getline(ls, rest);
            header_ok = (rest == " ovna-sweep-meta v1");
        } else if (key == "lambda_start") {
            ls >> record.sweep.lambda_start;
        } else if (key == "lambda_stop") {
            ls >> record.sweep.lambda_stop;
        } else if (key == "sweep_rate") {
            ls >> record.sweep.sweep_rate;
        } else if (key == "nonlinearity_amplitude_hz") {
            ls >> record.sweep.nonlinearity.amplitude_hz;
        } else if (key == "nonlinearity_period_s") {
            ls >> record.sweep.nonlinearity.period_s;
        } else if (key == "aux_delay") {
            ls >> record.aux_delay;
        } else if (key == "power_envelope_points") {
            ls >> envelope_points;
        } else if (key == "power_envelope") {
            PowerEnvelopePoint p;
            ls >> p.lambda >> p.relative;
            record.sweep.power_envelope.push_back(p);
        } else {
            throw InvalidInputError("read_waveform: unknown sidecar key '" + key + "'");
        }
        if (!ls && key != "format")
            throw InvalidInputError("read_waveform: malformed sidecar line '" + line + "'");
    }
    if (!header_ok) throw InvalidInputError("read_waveform: sidecar missing format header");
    if (record.sweep.power_envelope.size() != envelope_points)
        throw InvalidInputError("read_waveform: sidecar envelope point count mismatch");
    return record;
}

void write_metrics_csv(const std::filesystem::path& path, const MetricsSeries& series) {
    const std::size_t n = series.wavelength.size();
    if (series.il_db.size() != n || series.il_norm_db.size() != n ||
        series.mdl_db.size() != n || series.xt_db.size() != n)
        throw InvalidInputError("write_metrics_csv: column length mismatch");
    std::ostringstream out;
    out << "# format: ovna-metrics v1\n"
        << "# columns: wavelength_nm,il_db,il_norm_db,mdl_db,xt_db\n";
    out << std::setprecision(12);
    for (std::size_t i = 0; i < n; ++i)
        out << series.wavelength[i] * 1e9 << "," << series.il_db[i] << ","
            << series.il_norm_db[i] << "," << series.mdl_db[i] << "," << series.xt_db[i]
            << "\n";
    atomic_write(path, out.str());
}

MetricsSeries read_metrics_csv(const std::filesystem::path& path) {
    auto in = open_text(path, "metrics csv");
    const auto body = read_csv_body(in, "ovna-metrics v1", "read_metrics_csv");
    MetricsSeries series;
    for (const auto& line : body) {
        const auto fields = split_csv_line(line);
        if (fields.size() != 5)
            throw InvalidInputError("read_metrics_csv: expected 5 columns in '" + line + "'");
        series.wavelength.push_back(parse_double(fields[0], "metrics csv") * 1e-9);
        series.il_db.push_back(parse_double(fields[1], "metrics csv"));
        series.il_norm_db.push_back(parse_double(fields[2], "metrics csv"));
        series.mdl_db.push_back(parse_double(fields[3], "metrics csv"));
        series.xt_db.push_back(parse_double(fields[4], "metrics csv"));
    }
    return series;
}

void write_tracking_csv(const std::filesystem::path& path, const TrackingTrace& trace) {
    const std::size_t n = trace.time.size();
    if (trace.lambda.size() != n || trace.tracking_power.size() != n ||
        trace.orthogonal_power.size() != n)
        throw InvalidInputError("write_tracking_csv: column length mismatch");
    std::ostringstream out;
    out << "# format: ovna-tracking v1\n"
        << "# columns: time_s,wavelength_nm,tracking_power,orthogonal_power\n";
    out << std::setprecision(12);
    for (std::size_t i = 0; i < n; ++i)
        out << trace.time[i] << "," << trace.lambda[i] * 1e9 << "," << trace.tracking_power[i]
            << "," << trace.orthogonal_power[i] << "\n";
    atomic_write(path, out.str());
}

TrackingTrace read_tracking_csv(const std::filesystem::path& path) {
    auto in = open_text(path, "tracking csv");
    const auto body = read_csv_body(in, "ovna-tracking v1", "read_tracking_csv");
    TrackingTrace trace;
    for (const auto& line : body) {
        const auto fields = split_csv_line(line);
        if (fields.size() != 4)
            throw InvalidInputError("read_tracking_csv: expected 4 columns in '" + line + "'");
        trace.time.push_back(parse_double(fields[0], "tracking csv"));
        trace.lambda.push_back(parse_double(fields[1], "tracking csv") * 1e-9);
        trace.tracking_power.push_back(parse_double(fields[2], "tracking csv"));
        trace.orthogonal_power.push_back(parse_double(fields[3], "tracking csv"));
    }
    return trace;
}

void write_core_map_csv(const std::filesystem::path& path,
                        const std::vector<double>& wavelength,
                        const std::vector<std::vector<double>>& core_rows) {
    for (const auto& row : core_rows)
        if (row.size() != wavelength.size())
            throw InvalidInputError("write_core_map_csv: row length mismatch");
    std::ostringstream out;
    out << "# format: ovna-core-map v1\n"
        << "# rows: core index; columns: wavelength_nm then il_norm_db per sample\n";
    out << std::setprecision(12);
    out << "wavelength_nm";
    for (double w : wavelength) out << "," << w * 1e9;
    out << "\n";
    for (std::size_t c = 0; c < core_rows.size(); ++c) {
        out << "core" << c;
        for (double v : core_rows[c]) out << "," << v;
        out << "\n";
    }
    atomic_write(path, out.str());
}

std::vector<std::vector<double>> read_core_map_csv(const std::filesystem::path& path,
                                                   std::vector<double>& wavelength_out) {
    auto in = open_text(path, "core map csv");
    const auto body = read_csv_body(in, "ovna-core-map v1", "read_core_map_csv");
    wavelength_out.clear();
    std::vector<std::vector<double>> rows;
    for (const auto& line : body) {
        const auto fields = split_csv_line(line);
        if (fields.size() < 2)
            throw InvalidInputError("read_core_map_csv: short row '" + line + "'");
        if (fields[0] == "wavelength_nm") {
            for (std::size_t i = 1; i < fields.size(); ++i)
                wavelength_out.push_back(parse_double(fields[i], "core map csv") * 1e-9);
            continue;
        }
        std::vector<double> row;
        for (std::size_t i = 1; i < fields.size(); ++i)
            row.push_back(parse_double(fields[i], "core map csv"));
        rows.push_back(std::move(row));
    }
    if (wavelength_out.empty())
        throw InvalidInputError("read_core_map_csv: missing wavelength row");
    for (const auto& row : rows)
        if (row.size() != wavelength_out.size())
            throw InvalidInputError("read_core_map_csv: row length mismatch");
    return rows;
}

void write_ground_truth_csv(const std::filesystem::path& path,
                            const TransferFunctionEstimate& truth) {
    truth.grid.validate();
    if (truth.h.size() != truth.grid.count)
        throw InvalidInputError("write_ground_truth_csv: grid/sample count mismatch");
    const int dim = truth.n_channels;
    std::ostringstream out;
    out << "# format: ovna-ground-truth v1\n"
        << "# columns: frequency_hz then re,im per matrix entry in row-major order\n"
        << "# dim: " << dim << "\n";
    out << std::setprecision(17);
    for (std::size_t m = 0; m < truth.h.size(); ++m) {
        out << truth.grid.at(m);
        for (int r = 0; r < dim; ++r)
            for (int c = 0; c < dim; ++c)
                out << "," << truth.h[m](r, c).real() << "," << truth.h[m](r, c).imag();
        out << "\n";
    }
    atomic_write(path, out.str());
}

TransferFunctionEstimate read_ground_truth_csv(const std::filesystem::path& path) {
    auto in = open_text(path, "ground truth csv");
    in.clear();
    in.seekg(0);
    int dim = 0;
    std::vector<std::string> body;
    {
        std::string line;
        bool format_seen = false;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            if (line.front() == '#') {
                if (line.rfind("# format: ", 0) == 0) format_seen = (line.substr(10) == "ovna-ground-truth v1");
                if (line.rfind("# dim: ", 0) == 0)
                    dim = static_cast<int>(parse_double(line.substr(7), "ground truth csv"));
                continue;
            }
            body.push_back(line);
        }
        if (!format_seen)
            throw InvalidInputError("read_ground_truth_csv: missing format header");
    }
    if (dim < 2) throw InvalidInputError("read_ground_truth_csv: missing or bad dim header");
    if (body.size() < 2) throw InvalidInputError("read_ground_truth_csv: too few rows");

    TransferFunctionEstimate truth;
    truth.n_channels = dim;
    std::vector<double> freqs;
    for (const auto& line : body) {
        const auto fields = split_csv_line(line);
        if (static_cast<int>(fields.size()) != 1 + 2 * dim * dim)
            throw InvalidInputError("read_ground_truth_csv: wrong column count in a row");
        freqs.push_back(parse_double(fields[0], "ground truth csv"));
        Eigen::MatrixXcd m(dim, dim);
        std::size_t f = 1;
        for (int r = 0; r < dim; ++r)
            for (int c = 0; c < dim; ++c) {
                const double re = parse_double(fields[f++], "ground truth csv");
                const double im = parse_double(fields[f++], "ground truth csv");
                m(r, c) = cdouble(re, im);
            }
        truth.h.push_back(std::move(m));
    }
    truth.grid.start = freqs.front();
    truth.grid.count = freqs.size();
    truth.grid.step = (freqs.back() - freqs.front()) / static_cast<double>(freqs.size() - 1);
    truth.grid.validate();
    return truth;
}

}  // namespace ovna
