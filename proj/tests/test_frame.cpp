#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dscp/csv.hpp"
#include "dscp/rng.hpp"
#include "dscp/types.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

namespace {

dscp::SeriesFrame frame_of(std::initializer_list<double> values) {
    dscp::SeriesFrame frame;
    frame.stride = 1;
    frame.target.resize(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double v : values) {
        frame.timestamps.push_back(i);
        frame.target[i++] = v;
    }
    return frame;
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("validate_frame accepts well-formed input") {
    auto frame = frame_of({1.0, 2.0, 3.0});
    CHECK_NOTHROW(dscp::validate_frame(frame));
}

TEST_CASE("validate_frame rejects non-monotone timestamps") {
    auto frame = frame_of({1.0, 2.0, 3.0});
    frame.timestamps = {0, 2, 1};
    CHECK_THROWS_AS(dscp::validate_frame(frame), dscp::NonMonotoneTime);
}

TEST_CASE("validate_frame rejects uneven spacing") {
    auto frame = frame_of({1.0, 2.0, 3.0});
    frame.timestamps = {0, 1, 3};
    CHECK_THROWS_AS(dscp::validate_frame(frame), dscp::NonMonotoneTime);
}

TEST_CASE("validate_frame rejects non-finite targets") {
    auto frame = frame_of({1.0, 2.0});
    frame.target[1] = std::nan("");
    CHECK_THROWS_AS(dscp::validate_frame(frame), dscp::NonFinite);
    frame.target[1] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(dscp::validate_frame(frame), dscp::NonFinite);
}

TEST_CASE("validate_frame rejects ragged feature rows") {
    auto frame = frame_of({1.0, 2.0, 3.0});
    frame.features.resize(2, 2);
    frame.features.setZero();
    CHECK_THROWS_AS(dscp::validate_frame(frame), dscp::RaggedFeatures);
}

TEST_CASE("validate_frame rejects timestamp count mismatch") {
    auto frame = frame_of({1.0, 2.0, 3.0});
    frame.timestamps.pop_back();
    CHECK_THROWS_AS(dscp::validate_frame(frame), dscp::RaggedFeatures);
}

TEST_CASE("validate_frame enforces a minimum length") {
    auto frame = frame_of({1.0, 2.0, 3.0});
    CHECK_THROWS_AS(dscp::validate_frame(frame, 4), dscp::TooShort);
}

TEST_CASE("make_supervised emits len-a-b+1 pairs") {
    auto frame = frame_of({0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
    const auto pairs = dscp::make_supervised(frame, 3, 2);
    CHECK(pairs.size() == 6);
    // First pair: input spans the first a steps, truth the next b.
    CHECK(pairs.front().input[0] == 0.0);
    CHECK(pairs.front().input[2] == 2.0);
    CHECK(pairs.front().truth[0] == 3.0);
    CHECK(pairs.front().truth[1] == 4.0);
    CHECK(pairs.back().truth[1] == 9.0);
}

TEST_CASE("make_supervised boundary case yields exactly one pair") {
    auto frame = frame_of({10, 11, 12, 13, 14});
    const auto pairs = dscp::make_supervised(frame, 3, 2);
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0].input[0] == 10.0);
    CHECK(pairs[0].input[2] == 12.0);
    CHECK(pairs[0].truth[0] == 13.0);
    CHECK(pairs[0].truth[1] == 14.0);
}

TEST_CASE("make_supervised rejects frames shorter than a+b") {
    auto frame = frame_of({1, 2, 3, 4});
    CHECK_THROWS_AS(dscp::make_supervised(frame, 3, 2), dscp::TooShort);
}

TEST_CASE("make_supervised pairs stay inside the frame on random sizes") {
    dscp::Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const int len = 8 + static_cast<int>(rng.index(40));
        const int a = 1 + static_cast<int>(rng.index(5));
        const int b = 1 + static_cast<int>(rng.index(5));
        dscp::SeriesFrame frame;
        frame.stride = 1;
        frame.target.resize(len);
        for (int i = 0; i < len; ++i) {
            frame.timestamps.push_back(i);
            frame.target[i] = static_cast<double>(i);
        }
        if (len < a + b) continue;
        const auto pairs = dscp::make_supervised(frame, a, b);
        CHECK(static_cast<int>(pairs.size()) == len - a - b + 1);
        for (const auto& p : pairs) {
            // Targets hold their own index, so bounds checks reduce to value checks.
            CHECK(p.input[0] >= 0.0);
            CHECK(p.truth[b - 1] <= static_cast<double>(len - 1));
            CHECK(p.truth[0] == p.input[a - 1] + 1.0);
        }
    }
}

TEST_CASE("csv round trip preserves integer-step series") {
    auto frame = frame_of({1.5, -2.25, 3.125, 4.0625});
    const auto path = temp_path("dscp_frame_rt.csv");
    dscp::write_series_csv(frame, path);
    const auto back = dscp::read_series_csv(path);
    REQUIRE(back.size() == frame.size());
    for (Eigen::Index i = 0; i < frame.size(); ++i) {
        CHECK(back.target[i] == doctest::Approx(frame.target[i]).epsilon(1e-12));
        CHECK(back.timestamps[static_cast<std::size_t>(i)] == frame.timestamps[static_cast<std::size_t>(i)]);
    }
    std::filesystem::remove(path);
}

TEST_CASE("csv reader accepts ISO-8601 timestamp column") {
    const auto path = temp_path("dscp_frame_iso.csv");
    {
        std::ofstream out(path);
        out << "timestamp,y\n"
            << "2024-01-01T00:00:00,1.0\n"
            << "2024-01-01T01:00:00,2.0\n"
            << "2024-01-01T02:00:00,3.0\n";
    }
    const auto frame = dscp::read_series_csv(path);
    CHECK(frame.size() == 3);
    CHECK(frame.stride == 3600);
    CHECK(frame.target[2] == 3.0);
    std::filesystem::remove(path);
}

TEST_CASE("csv reader ingests feature columns") {
    const auto path = temp_path("dscp_frame_feat.csv");
    {
        std::ofstream out(path);
        out << "t,y,f1,f2\n0,1.0,10,20\n1,2.0,11,21\n2,3.0,12,22\n";
    }
    const auto frame = dscp::read_series_csv(path);
    REQUIRE(frame.has_features());
    CHECK(frame.features.rows() == 3);
    CHECK(frame.features.cols() == 2);
    CHECK(frame.features(1, 1) == 21.0);
    std::filesystem::remove(path);
}

TEST_CASE("csv reader reports the offending line number") {
    const auto path = temp_path("dscp_frame_bad.csv");
    {
        std::ofstream out(path);
        out << "t,y\n0,1.0\n1,oops\n";
    }
    try {
        dscp::read_series_csv(path);
        FAIL("expected ParseError");
    } catch (const dscp::ParseError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    std::filesystem::remove(path);
}

TEST_CASE("csv reader rejects rows with missing cells") {
    const auto path = temp_path("dscp_frame_gap.csv");
    {
        std::ofstream out(path);
        out << "t,y,f1\n0,1.0,5\n1,2.0\n";
    }
    CHECK_THROWS_AS(dscp::read_series_csv(path), dscp::ParseError);
    std::filesystem::remove(path);
}

TEST_CASE("csv reader rejects unknown headers") {
    const auto path = temp_path("dscp_frame_hdr.csv");
    {
        std::ofstream out(path);
        out << "time,y\n0,1.0\n";
    }
    CHECK_THROWS_AS(dscp::read_series_csv(path), dscp::ParseError);
    std::filesystem::remove(path);
}

TEST_CASE("iso8601 parser round-trips against known epochs") {
    CHECK(dscp::parse_iso8601("1970-01-01T00:00:00") == 0);
    CHECK(dscp::parse_iso8601("1970-01-02T00:00:00") == 86400);
    CHECK(dscp::parse_iso8601("2024-01-01T00:00:00") == 1704067200);
}
