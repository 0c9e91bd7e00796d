#include "uptake/timeseries.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace uptake {

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

int parse_int(std::string_view s) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ParseError("not an integer: '" + std::string(s) + "'");
    return v;
}

}  // namespace

YearMonth YearMonth::from_index(int idx) {
    int year = idx / 12;
    int rem = idx % 12;
    if (rem < 0) {
        year -= 1;
        rem += 12;
    }
    return YearMonth{year, rem + 1};
}

std::string YearMonth::str() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
    return buf;
}

YearMonth YearMonth::parse(std::string_view text) {
    auto fail = [&] { throw ParseError("expected YYYY-MM, got '" + std::string(text) + "'"); };
    if (text.size() != 7 || text[4] != '-') fail();
    std::string_view y = text.substr(0, 4);
    std::string_view m = text.substr(5, 2);
    if (!all_digits(y) || !all_digits(m)) fail();
    YearMonth ym{parse_int(y), parse_int(m)};
    if (ym.month < 1 || ym.month > 12) fail();
    return ym;
}

SeriesWindow::SeriesWindow(YearMonth f, YearMonth t) : from(f), to(t) {
    if (to < from)
        throw PreconditionError("window end " + to.str() + " precedes start " + from.str());
}

std::string SeriesWindow::str() const { return from.str() + ".." + to.str(); }

SeriesWindow SeriesWindow::parse(std::string_view text) {
    auto sep = text.find("..");
    if (sep == std::string_view::npos)
        throw ParseError("expected FROM..TO, got '" + std::string(text) + "'");
    return SeriesWindow(YearMonth::parse(text.substr(0, sep)),
                        YearMonth::parse(text.substr(sep + 2)));
}

MonthlyTimeSeries::MonthlyTimeSeries(YearMonth start, std::vector<double> values)
    : start_(start), values_(std::move(values)) {
    if (values_.empty()) throw PreconditionError("series must hold at least one month");
    if (start_.month < 1 || start_.month > 12)
        throw PreconditionError("month out of range: " + std::to_string(start_.month));
    for (double v : values_)
        if (!std::isfinite(v)) throw PreconditionError("series values must be finite");
}

double MonthlyTimeSeries::at(YearMonth m) const {
    if (!window().contains(m))
        throw MissingMonth(m.str() + " outside " + window().str());
    return values_[static_cast<std::size_t>(months_between(start_, m))];
}

std::pair<MonthlyTimeSeries, MonthlyTimeSeries> align(const MonthlyTimeSeries& a,
                                                      const MonthlyTimeSeries& b) {
    YearMonth from = std::max(a.start(), b.start());
    YearMonth to = std::min(a.end(), b.end());
    if (to < from)
        throw EmptyOverlap("series " + a.window().str() + " and " + b.window().str() +
                           " share no months");
    SeriesWindow w(from, to);
    return {slice(a, w), slice(b, w)};
}

MonthlyTimeSeries slice(const MonthlyTimeSeries& s, const SeriesWindow& w) {
    YearMonth from = std::max(s.start(), w.from);
    YearMonth to = std::min(s.end(), w.to);
    if (to < from)
        throw EmptyOverlap("window " + w.str() + " outside series " + s.window().str());
    auto first = s.values().begin() + months_between(s.start(), from);
    return MonthlyTimeSeries(from,
                             std::vector<double>(first, first + months_between(from, to) + 1));
}

MonthlyTimeSeries rolling_mean(const MonthlyTimeSeries& s, int half_width) {
    if (half_width < 0) throw PreconditionError("half_width must be >= 0");
    const int n = s.size();
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        int lo = std::max(0, i - half_width);
        int hi = std::min(n - 1, i + half_width);
        double sum = 0.0;
        for (int j = lo; j <= hi; ++j) sum += s[j];
        out[static_cast<std::size_t>(i)] = sum / (hi - lo + 1);
    }
    return MonthlyTimeSeries(s.start(), std::move(out));
}

MonthlyTimeSeries read_series_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw ParseError(path.string(), 1, "empty file");
    ++lineno;
    if (line == "month,value\r") line.pop_back();
    if (line != "month,value")
        throw ParseError(path.string(), lineno, "expected header 'month,value'");

    std::vector<double> values;
    YearMonth start{};
    bool have_start = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ParseError(path.string(), lineno, "expected 'month,value'");
        YearMonth m;
        double v = 0.0;
        try {
            m = YearMonth::parse(std::string_view(line).substr(0, comma));
        } catch (const ParseError& e) {
            throw ParseError(path.string(), lineno, e.what());
        }
        std::string_view vs = std::string_view(line).substr(comma + 1);
        auto [ptr, ec] = std::from_chars(vs.data(), vs.data() + vs.size(), v);
        if (ec != std::errc() || ptr != vs.data() + vs.size() || !std::isfinite(v))
            throw ParseError(path.string(), lineno, "bad value '" + std::string(vs) + "'");
        if (!have_start) {
            start = m;
            have_start = true;
        } else {
            YearMonth expect = start.plus(static_cast<int>(values.size()));
            if (m != expect)
                throw ParseError(path.string(), lineno,
                                 "expected " + expect.str() + ", got " + m.str() +
                                     " (months must be consecutive)");
        }
        values.push_back(v);
    }
    if (values.empty()) throw ParseError(path.string(), lineno, "no data rows");
    return MonthlyTimeSeries(start, std::move(values));
}

void write_series_csv(const std::filesystem::path& path, const MonthlyTimeSeries& s) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path.string());
    out << "month,value\n";
    char buf[64];
    for (int i = 0; i < s.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", s[i]);
        out << s.month_at(i).str() << ',' << buf << '\n';
    }
    if (!out) throw ParseError("write failed: " + path.string());
}

}  // namespace uptake
