#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <limits>
#include <random>

#include "sdeim/snapshot_io.hpp"

using namespace sdeim;
namespace fs = std::filesystem;

namespace
{

TrajectoryMatrix random_trajectory(Index n, Index m, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    TrajectoryMatrix traj;
    traj.states.resize(n, m);
    for (Index j = 0; j < m; ++j)
        for (Index i = 0; i < n; ++i) traj.states(i, j) = normal(rng) / 3.0;
    traj.t0 = 0.1;
    traj.dt_sample = 0.2;
    traj.system = SystemTag::KS;
    return traj;
}

fs::path scratch_dir(const std::string &name)
{
    const fs::path dir = fs::temp_directory_path() / ("sdeim_io_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

template <typename F> ParseError expect_parse_error(F &&f)
{
    try {
        f();
    } catch (const ParseError &e) {
        return e;
    }
    FAIL("expected a parse error");
    return ParseError(0, 0, "");
}

} // namespace

TEST_CASE("binary layout of a 2 x 3 matrix")
{
    TrajectoryMatrix traj;
    traj.states.resize(2, 3);
    traj.states << 1, 3, 5, 2, 4, 6;
    traj.t0 = 0.0;
    traj.dt_sample = 0.5;
    const std::string bytes = encode_snapshots(traj);
    CHECK(bytes.size() == 36 + 6 * 8);
    CHECK(bytes.compare(0, 4, "SDM1") == 0);
    CHECK(static_cast<unsigned char>(bytes[4]) == 2);
    CHECK(static_cast<unsigned char>(bytes[12]) == 3);
    // Column-major: the fourth value is entry (1, 1) = 4.
    double fourth = 0.0;
    std::memcpy(&fourth, bytes.data() + 36 + 3 * 8, 8);
    CHECK(fourth == 4.0);
}

TEST_CASE("binary and CSV files round-trip bit-exactly")
{
    const fs::path dir = scratch_dir("roundtrip");
    TrajectoryMatrix traj = random_trajectory(5, 7, 1);
    traj.states(0, 0) = std::numeric_limits<double>::denorm_min();
    traj.states(1, 0) = -0.0;
    traj.states(2, 0) = 1e300;
    for (const char *name : {"a.sdm", "a.csv"}) {
        write_snapshots(dir / name, traj);
        const TrajectoryMatrix back = ingest_snapshots(dir / name);
        CHECK(back.states.rows() == 5);
        CHECK(std::memcmp(back.states.data(), traj.states.data(), 35 * sizeof(double)) == 0);
        CHECK(back.t0 == traj.t0);
        CHECK(back.dt_sample == traj.dt_sample);
        CHECK(back.system == SystemTag::External);
    }
    fs::remove_all(dir);
}

TEST_CASE("hand-written CSV fixture")
{
    const std::string text = "# 2,3,0,0.25\n1,2,3\n4,5,6\n";
    const TrajectoryMatrix traj = decode_snapshots_csv(text);
    CHECK(traj.states.rows() == 2);
    CHECK(traj.states.cols() == 3);
    for (Index i = 0; i < 2; ++i)
        for (Index j = 0; j < 3; ++j) CHECK(traj.states(i, j) == static_cast<double>(3 * i + j + 1));
    CHECK(traj.dt_sample == 0.25);
    CHECK(encode_snapshots_csv(traj) == text);

    const TrajectoryMatrix spaced = decode_snapshots_csv("# 2, 3, 0, 0.25\r\n1, 2 ,3\r\n4,5,6");
    CHECK(spaced.states == traj.states);
}

TEST_CASE("truncated binary file names the offset")
{
    const std::string bytes = encode_snapshots(random_trajectory(3, 4, 2));
    const ParseError e = expect_parse_error([&] { decode_snapshots(bytes.substr(0, 60)); });
    CHECK(e.offset() == 60);
    CHECK(e.line() == 0);
    CHECK(std::string(e.what()).find("60") != std::string::npos);

    const ParseError header = expect_parse_error([&] { decode_snapshots(bytes.substr(0, 20)); });
    CHECK(header.offset() == 20);
    expect_parse_error([&] { decode_snapshots(bytes + "x"); });
}

TEST_CASE("binary format errors")
{
    std::string bytes = encode_snapshots(random_trajectory(2, 3, 3));
    std::string bad_magic = bytes;
    bad_magic[0] = 'X';
    CHECK(expect_parse_error([&] { decode_snapshots(bad_magic); }).offset() == 0);

    std::string nan = bytes;
    const double value = std::numeric_limits<double>::quiet_NaN();
    std::memcpy(nan.data() + 36 + 8, &value, 8);
    CHECK(expect_parse_error([&] { decode_snapshots(nan); }).offset() == 44);

    std::string bad_dt = bytes;
    const double zero = 0.0;
    std::memcpy(bad_dt.data() + 28, &zero, 8);
    expect_parse_error([&] { decode_snapshots(bad_dt); });
}

TEST_CASE("CSV errors carry line numbers")
{
    CHECK(expect_parse_error([] { decode_snapshots_csv("# 2,3,0,1\n1,2,3\n4,5\n"); }).line() == 3);
    CHECK(expect_parse_error([] { decode_snapshots_csv("# 2,3,0,1\n1,2,3\n"); }).line() == 3);
    CHECK(expect_parse_error([] { decode_snapshots_csv("# 2,3,0,1\n1,nan,3\n4,5,6\n"); }).line() == 2);
    CHECK(expect_parse_error([] { decode_snapshots_csv("# 2,3,0,1\n1,x,3\n4,5,6\n"); }).line() == 2);
    CHECK(expect_parse_error([] { decode_snapshots_csv("2,3,0,1\n"); }).line() == 1);
    CHECK(expect_parse_error([] { decode_snapshots_csv("# 2,1,0,1\n1\n2\n"); }).line() == 1);
    CHECK(expect_parse_error([] { decode_snapshots_csv("# 1,2,0,1\n1,2\n3,4\n"); }).line() == 3);
    const ParseError e = expect_parse_error([] { decode_snapshots_csv("# 1,2,0,1\n1,2x\n"); });
    CHECK(e.offset() == 12);
}

TEST_CASE("ingest checks the expected time axis")
{
    const fs::path dir = scratch_dir("ingest");
    const TrajectoryMatrix traj = random_trajectory(3, 4, 4);
    write_snapshots(dir / "t.sdm", traj);
    CHECK_NOTHROW(ingest_snapshots(dir / "t.sdm", 0.2, 0.1));
    CHECK_THROWS_AS(ingest_snapshots(dir / "t.sdm", 0.25), Error);
    CHECK_THROWS_AS(ingest_snapshots(dir / "t.sdm", std::nullopt, 0.0), Error);
    try {
        ingest_snapshots(dir / "missing.sdm");
        FAIL("expected an i/o error");
    } catch (const Error &e) {
        CHECK(e.kind() == ErrorKind::Io);
    }
    fs::remove_all(dir);
}

TEST_CASE("atomic writes leave no temporary files")
{
    const fs::path dir = scratch_dir("atomic");
    write_file_atomic(dir / "x.txt", "one");
    write_file_atomic(dir / "x.txt", "two");
    CHECK(read_file(dir / "x.txt") == "two");
    CHECK(std::distance(fs::directory_iterator(dir), fs::directory_iterator()) == 1);
    fs::remove_all(dir);
}

TEST_CASE("format_double is the shortest round-trip form")
{
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1e-300) == "1e-300");
    CHECK(format_double(-2.0) == "-2");
}
