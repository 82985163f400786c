#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <string>

#include "driftcast/errors.hpp"
#include "driftcast/rng.hpp"
#include "driftcast/series.hpp"

using namespace driftcast;

namespace {

std::string temp_csv(const std::string& tag, const std::string& content) {
    const std::string path = "test_series_" + tag + ".csv";
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path;
}

} // namespace

TEST_CASE("load_csv parses a small file") {
    const std::string path = temp_csv("small", "a,b\n1,2\n3,4\n5,6\n");
    const MultiSeries s = load_csv(path, 10.0);
    CHECK(s.size() == 3);
    CHECK(s.dimension() == 2);
    CHECK(s.dt() == 10.0);
    CHECK(s(0, 0) == 1.0);
    CHECK(s(2, 1) == 6.0);
    CHECK(s.feature_names()[0] == "a");
    std::remove(path.c_str());
}

TEST_CASE("load_csv reports NaN with its row and column") {
    const std::string path =
        temp_csv("nan", "x,y\n1,1\n2,2\n3,3\n4,4\n5,NaN\n6,6\n");
    try {
        load_csv(path, 1.0);
        FAIL("expected NonFiniteValue");
    } catch (const NonFiniteValue& e) {
        CHECK(e.row == 5);
        CHECK(e.col == 2);
    }
    std::remove(path.c_str());
}

TEST_CASE("load_csv keeps engine-style headers verbatim") {
    const std::string path = temp_csv(
        "names", "LOT,FW TEMP,EXT TEMP A,EXT TEMP B,LOP,FOP,SW PRES,RPM\n1,2,3,4,5,6,7,8\n");
    const MultiSeries s = load_csv(path, 10.0);
    const std::vector<std::string> expected{"LOT",  "FW TEMP", "EXT TEMP A", "EXT TEMP B",
                                            "LOP",  "FOP",     "SW PRES",    "RPM"};
    CHECK(s.feature_names() == expected);
    std::remove(path.c_str());
}

TEST_CASE("load_csv rejects ragged rows and empty files") {
    const std::string ragged = temp_csv("ragged", "a,b\n1,2\n3\n");
    CHECK_THROWS_AS(load_csv(ragged, 1.0), MalformedCsv);
    std::remove(ragged.c_str());

    const std::string empty = temp_csv("empty", "a,b\n");
    CHECK_THROWS_AS(load_csv(empty, 1.0), EmptyInput);
    std::remove(empty.c_str());

    CHECK_THROWS_AS(load_csv("does_not_exist.csv", 1.0), Error);
}

TEST_CASE("load_csv can skip a timestamp column") {
    const std::string path = temp_csv("ts", "time,v\n100,1.5\n200,2.5\n");
    const MultiSeries s = load_csv(path, 1.0, true);
    CHECK(s.dimension() == 1);
    CHECK(s.feature_names()[0] == "v");
    CHECK(s(1, 0) == 2.5);
    std::remove(path.c_str());
}

TEST_CASE("window arithmetic") {
    MultiSeries s(100, 1, 1.0, {"x"});
    for (std::size_t i = 0; i < 100; ++i) s(i, 0) = static_cast<double>(i);
    const WindowView w = window(s, 50, 10);
    CHECK(w.start == 40);
    CHECK(w.end == 50);
    CHECK(w.size() == 10);
    CHECK(w.row(9)[0] == s(49, 0));
    CHECK_THROWS_AS(window(s, 5, 10), OutOfBounds);

    MultiSeries big(300, 1, 1.0, {"x"});
    const WindowView full = window(big, 200, 200);
    CHECK(full.start == 0);
    CHECK(full.end == 200);
}

TEST_CASE("csv round trip is bit exact") {
    SeededRng rng(5);
    MultiSeries s(50, 3, 2.5, {"p", "q", "r"});
    for (std::size_t i = 0; i < 50; ++i)
        for (std::size_t j = 0; j < 3; ++j) s(i, j) = rng.standard_normal() * 1e3;
    const std::string path = "test_series_roundtrip.csv";
    write_csv(s, path);
    const MultiSeries back = load_csv(path, 2.5);
    REQUIRE(back.size() == s.size());
    REQUIRE(back.dimension() == s.dimension());
    for (std::size_t i = 0; i < 50; ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(back(i, j) == s(i, j));
    std::remove(path.c_str());
}

TEST_CASE("column extraction preserves order and dt") {
    MultiSeries s(4, 2, 0.5, {"u", "v"});
    for (std::size_t i = 0; i < 4; ++i) {
        s(i, 0) = static_cast<double>(i);
        s(i, 1) = 10.0 + i;
    }
    const UniformSeries col = s.column(1);
    CHECK(col.dt == 0.5);
    CHECK(col.name == "v");
    CHECK(col.values == Vec{10.0, 11.0, 12.0, 13.0});
}
