#include <doctest.h>

#include <cmath>

#include "support/synthetic.hpp"
#include "uptake/changepoint.hpp"

using namespace uptake;

TEST_CASE("tipping scan recovers a planted correlation flip") {
    const auto pair = synthetic::flipped_pair(1234, YearMonth{2010, 1}, 36, 36, 0.9, 0.1);
    const SeriesWindow candidates(YearMonth{2011, 1}, YearMonth{2014, 12});
    const auto result = find_tipping_point(pair.x, pair.y, candidates);

    CHECK(std::abs(months_between(result.split, pair.plant)) <= 2);
    CHECK(result.before.r > 0.7);
    CHECK(result.after.r < -0.7);
    CHECK(result.delta == doctest::Approx(std::fabs(result.after.r - result.before.r)));

    // The scan is a faithful record: reported delta is its maximum.
    double best = 0.0;
    for (const auto& point : result.scan) best = std::max(best, point.delta);
    CHECK(result.delta == doctest::Approx(best));
    CHECK(result.scan.size() == static_cast<std::size_t>(candidates.length()));
}

TEST_CASE("identical series give zero delta everywhere") {
    const auto x = synthetic::gaussian_series(77, YearMonth{2010, 1}, 48, 0.0, 1.0);
    const auto result =
        find_tipping_point(x, x, SeriesWindow(YearMonth{2011, 1}, YearMonth{2012, 12}));
    CHECK(result.before.r == doctest::Approx(1.0));
    CHECK(result.after.r == doctest::Approx(1.0));
    CHECK(result.delta == doctest::Approx(0.0));
    // All-tied scan: the earliest candidate wins.
    CHECK(result.split == YearMonth{2011, 1});
}

TEST_CASE("candidates violating the segment minimum are rejected") {
    const auto pair = synthetic::flipped_pair(5, YearMonth{2010, 1}, 24, 24, 0.9, 0.1);
    CHECK_THROWS_AS(find_tipping_point(pair.x, pair.y,
                                       SeriesWindow(YearMonth{2010, 6}, YearMonth{2011, 6})),
                    SegmentTooShort);
    TippingOptions opts;
    opts.min_segment = 2;
    CHECK_THROWS_AS(find_tipping_point(pair.x, pair.y,
                                       SeriesWindow(YearMonth{2011, 1}, YearMonth{2012, 12}),
                                       opts),
                    PreconditionError);
}

TEST_CASE("constant segments are reported as such") {
    std::vector<double> flat(48, 1.0);
    for (int i = 24; i < 48; ++i) flat[static_cast<std::size_t>(i)] = i;
    const MonthlyTimeSeries x(YearMonth{2010, 1}, flat);
    const auto y = synthetic::gaussian_series(3, YearMonth{2010, 1}, 48, 0.0, 1.0);
    CHECK_THROWS_AS(find_tipping_point(x, y,
                                       SeriesWindow(YearMonth{2011, 1}, YearMonth{2012, 12})),
                    ConstantSegment);
}

TEST_CASE("boundary option moves the split month to the other side") {
    const auto pair = synthetic::flipped_pair(901, YearMonth{2010, 1}, 30, 30, 0.9, 0.1);
    TippingOptions after_opts;  // default: candidate starts the after segment
    const auto owns_after = find_tipping_point(
        pair.x, pair.y, SeriesWindow(YearMonth{2011, 6}, YearMonth{2013, 6}), after_opts);

    TippingOptions before_opts;
    before_opts.boundary = SplitBoundary::ends_before;
    const auto owns_before = find_tipping_point(
        pair.x, pair.y, SeriesWindow(YearMonth{2011, 6}, YearMonth{2013, 6}), before_opts);

    // Either way the reported split is the first month of the after period.
    CHECK(std::abs(months_between(owns_after.split, pair.plant)) <= 2);
    CHECK(std::abs(months_between(owns_before.split, pair.plant)) <= 2);
}

TEST_CASE("split regression reports both segments over the analysis window") {
    // Planted slopes: +2 before 2012-01, -3 after.
    std::vector<double> xs, ys;
    std::mt19937_64 rng(8);
    std::normal_distribution<double> unit(0.0, 0.05);
    for (int t = 0; t < 48; ++t) {
        const double x = std::sin(t * 0.7) + 0.1 * t;
        xs.push_back(x);
        ys.push_back(t < 24 ? 2.0 * x + unit(rng) : -3.0 * x + 10.0 + unit(rng));
    }
    const MonthlyTimeSeries x(YearMonth{2010, 1}, xs);
    const MonthlyTimeSeries y(YearMonth{2010, 1}, ys);

    const auto report = split_regression(x, y, YearMonth{2012, 1},
                                         SeriesWindow(YearMonth{2010, 1}, YearMonth{2013, 12}));
    CHECK(report.before_window.str() == "2010-01..2011-12");
    CHECK(report.after_window.str() == "2012-01..2013-12");
    CHECK(std::fabs(report.before.coefficients[1] - (2.0)) <= 0.05);
    CHECK(std::fabs(report.after.coefficients[1] - (-3.0)) <= 0.05);
    CHECK(report.after.p_values[1] < 0.001);

    CHECK_THROWS_AS(split_regression(x, y, YearMonth{2010, 1},
                                     SeriesWindow(YearMonth{2010, 1}, YearMonth{2013, 12})),
                    SegmentTooShort);
    CHECK_THROWS_AS(split_regression(x, y, YearMonth{2010, 3},
                                     SeriesWindow(YearMonth{2010, 1}, YearMonth{2013, 12})),
                    SegmentTooShort);
}

TEST_CASE("implied response change is slope times the move") {
    CHECK(implied_response_change(-44165.0, 5.0e-4) == doctest::Approx(-22.0825));
    CHECK(implied_response_change(13642.0, 5.0e-4) == doctest::Approx(6.821));
}

TEST_CASE("report text carries slopes and implied changes") {
    std::vector<double> xs, ys;
    for (int t = 0; t < 20; ++t) {
        xs.push_back(t);
        ys.push_back(t < 10 ? 1.0 + 2.0 * t + 0.001 * (t % 3) : 40.0 - 1.0 * t + 0.001 * (t % 3));
    }
    const MonthlyTimeSeries x(YearMonth{2010, 1}, xs);
    const MonthlyTimeSeries y(YearMonth{2010, 1}, ys);
    const auto report = split_regression(x, y, YearMonth{2010, 11},
                                         SeriesWindow(YearMonth{2010, 1}, YearMonth{2011, 8}));
    const std::string text = format_split_report(report, 2.0);
    CHECK(text.find("before") != std::string::npos);
    CHECK(text.find("after") != std::string::npos);
    CHECK(text.find("slope=") != std::string::npos);
    CHECK(text.find("+4.00") != std::string::npos);  // 2.0 slope x 2.0 move
    CHECK(text.find("-2.00") != std::string::npos);
}
