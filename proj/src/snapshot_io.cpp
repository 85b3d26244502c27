#include "sdeim/snapshot_io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <system_error>

namespace sdeim
{

namespace
{

constexpr char kMagic[4] = {'S', 'D', 'M', '1'};
constexpr std::size_t kHeaderBytes = 4 + 4 * 8;

void put_u64(std::string &out, std::uint64_t value)
{
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((value >> (8 * b)) & 0xffU));
}

std::uint64_t get_u64(const std::string &in, std::size_t offset)
{
    std::uint64_t value = 0;
    for (int b = 0; b < 8; ++b) {
        value |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[offset + b]))
                 << (8 * b);
    }
    return value;
}

void put_f64(std::string &out, double value)
{
    put_u64(out, std::bit_cast<std::uint64_t>(value));
}

double get_f64(const std::string &in, std::size_t offset)
{
    return std::bit_cast<double>(get_u64(in, offset));
}

[[noreturn]] void fail(std::size_t offset, std::size_t line, const std::string &what)
{
    std::ostringstream msg;
    msg << what << " (byte offset " << offset;
    if (line > 0) msg << ", line " << line;
    msg << ")";
    throw ParseError(offset, line, msg.str());
}

void check_header_values(double t0, double dt, std::size_t offset, std::size_t line)
{
    if (!std::isfinite(t0)) fail(offset, line, "t0 is not finite");
    if (!(dt > 0.0) || !std::isfinite(dt)) fail(offset, line, "dt_sample must be positive");
}

bool matches(double a, double b)
{
    return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

} // namespace

std::string format_double(double value)
{
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

std::string encode_snapshots(const TrajectoryMatrix &traj)
{
    std::string out;
    out.reserve(kHeaderBytes + 8 * static_cast<std::size_t>(traj.states.size()));
    out.append(kMagic, 4);
    put_u64(out, static_cast<std::uint64_t>(traj.states.rows()));
    put_u64(out, static_cast<std::uint64_t>(traj.states.cols()));
    put_f64(out, traj.t0);
    put_f64(out, traj.dt_sample);
    const double *data = traj.states.data();
    for (Index i = 0; i < traj.states.size(); ++i) put_f64(out, data[i]);
    return out;
}

TrajectoryMatrix decode_snapshots(const std::string &bytes)
{
    if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
        fail(0, 0, "missing SDM1 magic bytes");
    }
    if (bytes.size() < kHeaderBytes) fail(bytes.size(), 0, "truncated SDM1 header");
    const std::uint64_t n = get_u64(bytes, 4);
    const std::uint64_t m = get_u64(bytes, 12);
    if (n < 1 || m < 2) fail(4, 0, "SDM1 header needs N >= 1 and M >= 2");
    if (n > (1ULL << 32) || m > (1ULL << 32)) fail(4, 0, "SDM1 dimensions are implausibly large");
    const double t0 = get_f64(bytes, 20);
    const double dt = get_f64(bytes, 28);
    check_header_values(t0, dt, 20, 0);

    const std::size_t count = static_cast<std::size_t>(n * m);
    const std::size_t expected = kHeaderBytes + 8 * count;
    if (bytes.size() < expected) {
        fail(bytes.size(), 0, "truncated SDM1 payload: expected " + std::to_string(expected) +
                                  " bytes, got " + std::to_string(bytes.size()));
    }
    if (bytes.size() > expected) fail(expected, 0, "trailing bytes after SDM1 payload");

    TrajectoryMatrix traj;
    traj.states.resize(static_cast<Index>(n), static_cast<Index>(m));
    traj.t0 = t0;
    traj.dt_sample = dt;
    double *data = traj.states.data();
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t offset = kHeaderBytes + 8 * i;
        data[i] = get_f64(bytes, offset);
        if (!std::isfinite(data[i])) fail(offset, 0, "non-finite snapshot value");
    }
    return traj;
}

std::string encode_snapshots_csv(const TrajectoryMatrix &traj)
{
    std::string out = "# " + std::to_string(traj.states.rows()) + "," +
                      std::to_string(traj.states.cols()) + "," + format_double(traj.t0) + "," +
                      format_double(traj.dt_sample) + "\n";
    for (Index i = 0; i < traj.states.rows(); ++i) {
        for (Index j = 0; j < traj.states.cols(); ++j) {
            if (j > 0) out.push_back(',');
            out += format_double(traj.states(i, j));
        }
        out.push_back('\n');
    }
    return out;
}

TrajectoryMatrix decode_snapshots_csv(const std::string &text)
{
    std::size_t pos = 0;
    std::size_t line = 1;

    auto parse_double = [&](std::size_t begin, std::size_t end) {
        double value = 0.0;
        std::size_t b = begin;
        while (b < end && (text[b] == ' ' || text[b] == '\t')) ++b;
        std::size_t e = end;
        while (e > b && (text[e - 1] == ' ' || text[e - 1] == '\t' || text[e - 1] == '\r')) --e;
        const auto res = std::from_chars(text.data() + b, text.data() + e, value);
        if (res.ec != std::errc() || res.ptr != text.data() + e || b == e) {
            fail(begin, line, "malformed number '" + text.substr(b, e - b) + "'");
        }
        if (!std::isfinite(value)) fail(begin, line, "non-finite value");
        return value;
    };
    auto split_line = [&](std::size_t begin, std::size_t end) {
        std::vector<std::pair<std::size_t, std::size_t>> fields;
        std::size_t start = begin;
        for (std::size_t i = begin; i <= end; ++i) {
            if (i == end || text[i] == ',') {
                fields.emplace_back(start, i);
                start = i + 1;
            }
        }
        return fields;
    };

    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    if (text.compare(0, 1, "#") != 0) fail(0, 1, "missing '# N,M,t0,dt' header");
    const auto header = split_line(1, eol);
    if (header.size() != 4) fail(0, 1, "header must have four fields N,M,t0,dt");
    const double nd = parse_double(header[0].first, header[0].second);
    const double md = parse_double(header[1].first, header[1].second);
    if (nd < 1 || md < 2 || nd != std::floor(nd) || md != std::floor(md) || nd > 1e9 || md > 1e9) {
        fail(header[0].first, 1, "header needs integer N >= 1 and M >= 2");
    }
    const Index n = static_cast<Index>(nd);
    const Index m = static_cast<Index>(md);
    const double t0 = parse_double(header[2].first, header[2].second);
    const double dt = parse_double(header[3].first, header[3].second);
    check_header_values(t0, dt, header[2].first, 1);

    TrajectoryMatrix traj;
    traj.states.resize(n, m);
    traj.t0 = t0;
    traj.dt_sample = dt;
    pos = eol + 1;
    for (Index i = 0; i < n; ++i) {
        ++line;
        if (pos >= text.size()) {
            fail(text.size(), line, "truncated CSV: expected " + std::to_string(n) + " rows");
        }
        eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        const auto fields = split_line(pos, eol);
        if (static_cast<Index>(fields.size()) != m) {
            fail(pos, line, "row has " + std::to_string(fields.size()) + " values, expected " +
                                std::to_string(m));
        }
        for (Index j = 0; j < m; ++j) {
            traj.states(i, j) = parse_double(fields[j].first, fields[j].second);
        }
        pos = eol + 1;
    }
    while (pos < text.size()) {
        if (text[pos] != '\n' && text[pos] != '\r' && text[pos] != ' ') {
            fail(pos, line + 1, "unexpected data after the last row");
        }
        ++pos;
    }
    return traj;
}

std::string read_file(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file_atomic(const std::filesystem::path &path, const std::string &contents)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw Error(ErrorKind::Io, "write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot rename onto " + path.string() + ": " + ec.message());
}

void write_snapshots(const std::filesystem::path &path, const TrajectoryMatrix &traj)
{
    traj.validate();
    const bool csv = path.extension() == ".csv";
    write_file_atomic(path, csv ? encode_snapshots_csv(traj) : encode_snapshots(traj));
}

TrajectoryMatrix ingest_snapshots(const std::filesystem::path &path,
                                  std::optional<double> dt_sample, std::optional<double> t0)
{
    const std::string bytes = read_file(path);
    TrajectoryMatrix traj = bytes.compare(0, 4, std::string(kMagic, 4)) == 0
                                ? decode_snapshots(bytes)
                                : decode_snapshots_csv(bytes);
    if (dt_sample && !matches(*dt_sample, traj.dt_sample)) {
        throw Error(ErrorKind::InvalidInput,
                    path.string() + ": file dt_sample " + format_double(traj.dt_sample) +
                        " does not match expected " + format_double(*dt_sample));
    }
    if (t0 && !matches(*t0, traj.t0)) {
        throw Error(ErrorKind::InvalidInput, path.string() + ": file t0 " +
                                                 format_double(traj.t0) +
                                                 " does not match expected " + format_double(*t0));
    }
    traj.system = SystemTag::External;
    traj.validate();
    return traj;
}

} // namespace sdeim
