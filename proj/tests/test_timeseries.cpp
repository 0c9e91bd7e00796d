#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "uptake/timeseries.hpp"

using namespace uptake;

TEST_CASE("year-month ordering, arithmetic and text round trip") {
    const YearMonth a{2013, 6};
    CHECK(a.str() == "2013-06");
    CHECK(YearMonth::parse("2013-06") == a);
    CHECK(YearMonth::from_index(a.index()) == a);
    CHECK(a.plus(7) == YearMonth{2014, 1});
    CHECK(a.plus(-6) == YearMonth{2012, 12});
    CHECK(months_between(YearMonth{2012, 11}, a) == 7);
    CHECK(YearMonth{2013, 5} < a);
    CHECK(a < YearMonth{2014, 1});

    CHECK_THROWS_AS(YearMonth::parse("2013-13"), ParseError);
    CHECK_THROWS_AS(YearMonth::parse("2013-00"), ParseError);
    CHECK_THROWS_AS(YearMonth::parse("201306"), ParseError);
    CHECK_THROWS_AS(YearMonth::parse("2013-6"), ParseError);
}

TEST_CASE("series window parsing and membership") {
    const auto w = SeriesWindow::parse("2010-03..2011-02");
    CHECK(w.length() == 12);
    CHECK(w.contains(YearMonth{2010, 3}));
    CHECK(w.contains(YearMonth{2011, 2}));
    CHECK_FALSE(w.contains(YearMonth{2011, 3}));
    CHECK(w.str() == "2010-03..2011-02");
    CHECK_THROWS_AS(SeriesWindow::parse("2011-02..2010-03"), PreconditionError);
    CHECK_THROWS_AS(SeriesWindow::parse("2010-03"), ParseError);
    CHECK_THROWS_AS(SeriesWindow(YearMonth{2011, 1}, YearMonth{2010, 1}), PreconditionError);
}

TEST_CASE("monthly series invariants") {
    CHECK_THROWS_AS(MonthlyTimeSeries(YearMonth{2010, 1}, {}), PreconditionError);
    CHECK_THROWS_AS(MonthlyTimeSeries(YearMonth{2010, 1}, {1.0, std::nan("")}),
                    PreconditionError);

    const MonthlyTimeSeries s(YearMonth{2010, 11}, {1.0, 2.0, 3.0});
    CHECK(s.size() == 3);
    CHECK(s.end() == YearMonth{2011, 1});
    CHECK(s.at(YearMonth{2010, 12}) == 2.0);
    CHECK(s.month_at(2) == YearMonth{2011, 1});
    CHECK_THROWS_AS(s.at(YearMonth{2011, 2}), MissingMonth);
}

TEST_CASE("align keeps the overlap and rejects disjoint ranges") {
    const MonthlyTimeSeries a(YearMonth{2010, 1}, {1, 2, 3, 4, 5, 6});
    const MonthlyTimeSeries b(YearMonth{2010, 4}, {40, 50, 60, 70, 80});
    const auto [x, y] = align(a, b);
    CHECK(x.start() == YearMonth{2010, 4});
    CHECK(x.end() == YearMonth{2010, 6});
    CHECK(x.values() == std::vector<double>{4, 5, 6});
    CHECK(y.values() == std::vector<double>{40, 50, 60});

    const MonthlyTimeSeries c(YearMonth{2011, 1}, {9.0});
    CHECK_THROWS_AS(align(a, c), EmptyOverlap);
}

TEST_CASE("slice clips to the window overlap") {
    const MonthlyTimeSeries s(YearMonth{2010, 1}, {1, 2, 3, 4, 5, 6});
    const auto inner = slice(s, SeriesWindow::parse("2010-02..2010-04"));
    CHECK(inner.values() == std::vector<double>{2, 3, 4});
    const auto clipped = slice(s, SeriesWindow::parse("2010-05..2011-12"));
    CHECK(clipped.values() == std::vector<double>{5, 6});
    CHECK_THROWS_AS(slice(s, SeriesWindow::parse("2011-01..2011-02")), EmptyOverlap);
}

TEST_CASE("rolling mean clips the window at the edges") {
    const MonthlyTimeSeries s(YearMonth{2010, 1}, {1, 2, 3, 4, 5});
    const auto smoothed = rolling_mean(s, 1);
    CHECK(smoothed.size() == 5);
    CHECK(smoothed[0] == doctest::Approx((1 + 2) / 2.0));
    CHECK(smoothed[2] == doctest::Approx(3.0));
    CHECK(smoothed[4] == doctest::Approx((4 + 5) / 2.0));
    CHECK(rolling_mean(s, 0).values() == s.values());
}

TEST_CASE("csv round trip and parse failures") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "uptake_ts_test";
    fs::create_directories(dir);

    const MonthlyTimeSeries s(YearMonth{2012, 11}, {1.5, -2.25, 0.0625});
    write_series_csv(dir / "s.csv", s);
    const auto back = read_series_csv(dir / "s.csv");
    CHECK(back.start() == s.start());
    CHECK(back.values() == s.values());

    const auto expect_parse_error = [&](const char* name, const char* body) {
        std::ofstream(dir / name) << body;
        CHECK_THROWS_AS(read_series_csv(dir / name), ParseError);
    };
    expect_parse_error("bad_header.csv", "time,value\n2012-01,1\n");
    expect_parse_error("gap.csv", "month,value\n2012-01,1\n2012-03,2\n");
    expect_parse_error("nonfinite.csv", "month,value\n2012-01,inf\n");
    expect_parse_error("fields.csv", "month,value\n2012-01,1,2\n");
    expect_parse_error("empty.csv", "month,value\n");
    CHECK_THROWS_AS(read_series_csv(dir / "absent.csv"), ParseError);
}
