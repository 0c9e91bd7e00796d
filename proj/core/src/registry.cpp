#include "uptake/registry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <unordered_map>

#include "parse_util.hpp"

namespace uptake {

namespace {

using parse_util::all_digits;
using parse_util::split_fields;
using parse_util::strip_cr;
using parse_util::to_double;
using parse_util::to_int;

int days_in_month(int year, int month) {
    static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (month == 2) {
        const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
        return leap ? 29 : 28;
    }
    return kDays[month - 1];
}

}  // namespace

Date Date::parse(std::string_view text) {
    auto fail = [&] { throw ParseError("expected YYYY-MM-DD, got '" + std::string(text) + "'"); };
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') fail();
    std::string_view y = text.substr(0, 4);
    std::string_view m = text.substr(5, 2);
    std::string_view d = text.substr(8, 2);
    if (!all_digits(y) || !all_digits(m) || !all_digits(d)) fail();
    Date date{to_int<int>(y), to_int<int>(m), to_int<int>(d)};
    if (date.month < 1 || date.month > 12) fail();
    if (date.day < 1 || date.day > days_in_month(date.year, date.month)) fail();
    return date;
}

std::string Date::str() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
    return buf;
}

int whole_months_between(const Date& from, const Date& to) {
    int months = (to.year * 12 + to.month) - (from.year * 12 + from.month);
    if (to.day < from.day) months -= 1;
    return months;
}

Stance parse_stance(std::string_view label) {
    if (label == "pro") return Stance::pro;
    if (label == "anti") return Stance::anti;
    if (label == "neutral") return Stance::neutral;
    if (label == "irrelevant") return Stance::irrelevant;
    throw UnknownStance("unknown stance '" + std::string(label) + "'");
}

std::string_view stance_name(Stance s) {
    switch (s) {
        case Stance::pro: return "pro";
        case Stance::anti: return "anti";
        case Stance::neutral: return "neutral";
        case Stance::irrelevant: return "irrelevant";
    }
    return "?";
}

VaccineSchedule VaccineSchedule::make(std::vector<std::pair<int, int>> targets) {
    if (targets.empty()) throw PreconditionError("schedule must have at least one dose");
    std::sort(targets.begin(), targets.end());
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (targets[i].first < 1) throw PreconditionError("dose indices start at 1");
        if (i > 0) {
            if (targets[i].first == targets[i - 1].first)
                throw PreconditionError("duplicate dose index " + std::to_string(targets[i].first));
            if (targets[i].second <= targets[i - 1].second)
                throw PreconditionError("target ages must increase with dose index");
        }
    }
    VaccineSchedule s;
    s.targets = std::move(targets);
    return s;
}

ScheduleTimeline ScheduleTimeline::make(
    std::vector<std::pair<YearMonth, VaccineSchedule>> entries) {
    if (entries.empty()) throw PreconditionError("timeline must have at least one schedule");
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < entries.size(); ++i)
        if (entries[i].first == entries[i - 1].first)
            throw PreconditionError("duplicate schedule validity start " + entries[i].first.str());
    ScheduleTimeline t;
    t.entries = std::move(entries);
    return t;
}

const VaccineSchedule& ScheduleTimeline::in_force_at(YearMonth m) const {
    const VaccineSchedule* found = nullptr;
    for (const auto& [from, schedule] : entries) {
        if (from <= m) found = &schedule;
    }
    if (!found)
        throw PreconditionError("no schedule in force at " + m.str() + " (first starts " +
                                entries.front().first.str() + ")");
    return *found;
}

MonthlyTimeSeries vaccination_activity(const std::vector<VaccinationRecord>& records,
                                       const std::vector<PopulationCohort>& cohorts, int dose,
                                       int target_age_months, const SeriesWindow& window,
                                       const ActivityOptions& options) {
    std::map<YearMonth, long> cohort_by_month;
    for (const auto& c : cohorts) cohort_by_month[c.birth_month] += c.count;

    std::map<YearMonth, long> numerator;
    for (const auto& rec : records) {
        if (rec.dose != dose) continue;
        const YearMonth m = rec.vaccination_date.year_month();
        if (!window.contains(m)) continue;
        const int age = whole_months_between(rec.birth_date, rec.vaccination_date);
        if (options.min_age_months && age < *options.min_age_months) continue;
        if (options.max_age_months && age > *options.max_age_months) continue;
        numerator[m] += 1;
    }

    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(window.length()));
    for (YearMonth m = window.from; m <= window.to; m = m.plus(1)) {
        const YearMonth birth = m.plus(-target_age_months);
        auto it = cohort_by_month.find(birth);
        if (it == cohort_by_month.end())
            throw MissingCohort("no cohort for birth month " + birth.str() +
                                " (denominator of " + m.str() + ")");
        if (it->second == 0)
            throw ZeroDenominator("cohort " + birth.str() + " is empty (denominator of " +
                                  m.str() + ")");
        const auto num_it = numerator.find(m);
        const long n = num_it == numerator.end() ? 0 : num_it->second;
        values.push_back(100.0 * static_cast<double>(n) / static_cast<double>(it->second));
    }
    return MonthlyTimeSeries(window.from, std::move(values));
}

namespace {

// person -> (birth date, max recorded dose, first-dose record index)
struct PersonFold {
    Date birth;
    int max_dose = 0;
    Date first_vaccination;
    int first_dose = 0;
};

std::unordered_map<std::string, PersonFold> fold_persons(
    const std::vector<VaccinationRecord>& records) {
    std::unordered_map<std::string, PersonFold> persons;
    for (const auto& rec : records) {
        auto [it, inserted] = persons.try_emplace(
            rec.person_id, PersonFold{rec.birth_date, rec.dose, rec.vaccination_date, rec.dose});
        if (inserted) continue;
        PersonFold& p = it->second;
        p.max_dose = std::max(p.max_dose, rec.dose);
        if (rec.vaccination_date < p.first_vaccination ||
            (rec.vaccination_date == p.first_vaccination && rec.dose < p.first_dose)) {
            p.first_vaccination = rec.vaccination_date;
            p.first_dose = rec.dose;
        }
    }
    return persons;
}

std::map<int, long> cohort_totals_by_year(const std::vector<PopulationCohort>& cohorts) {
    std::map<int, long> totals;
    for (const auto& c : cohorts) totals[c.birth_month.year] += c.count;
    return totals;
}

std::map<int, double> percentage_by_year(const std::map<int, long>& hits,
                                         const std::map<int, long>& totals) {
    std::map<int, double> out;
    for (const auto& [year, total] : totals) {
        if (total == 0) throw ZeroDenominator("cohort year " + std::to_string(year) + " is empty");
        const auto it = hits.find(year);
        const long h = it == hits.end() ? 0 : it->second;
        out[year] = 100.0 * static_cast<double>(h) / static_cast<double>(total);
    }
    return out;
}

}  // namespace

std::map<int, double> uptake_by_cohort(const std::vector<VaccinationRecord>& records,
                                       const std::vector<PopulationCohort>& cohorts, int dose) {
    const auto persons = fold_persons(records);
    const auto totals = cohort_totals_by_year(cohorts);
    std::map<int, long> hits;
    for (const auto& [id, p] : persons) {
        if (p.max_dose < dose) continue;
        if (!totals.count(p.birth.year))
            throw MissingCohort("person " + id + " born " + std::to_string(p.birth.year) +
                                " has no cohort");
        hits[p.birth.year] += 1;
    }
    return percentage_by_year(hits, totals);
}

std::map<int, double> completion_by_cohort(const std::vector<VaccinationRecord>& records,
                                           const std::vector<PopulationCohort>& cohorts,
                                           const ScheduleTimeline& timeline) {
    const auto persons = fold_persons(records);
    const auto totals = cohort_totals_by_year(cohorts);
    std::map<int, long> hits;
    for (const auto& [id, p] : persons) {
        const auto& schedule = timeline.in_force_at(p.first_vaccination.year_month());
        if (p.max_dose < schedule.final_dose()) continue;
        if (!totals.count(p.birth.year))
            throw MissingCohort("person " + id + " born " + std::to_string(p.birth.year) +
                                " has no cohort");
        hits[p.birth.year] += 1;
    }
    return percentage_by_year(hits, totals);
}

int assign_dose_group(const VaccinationRecord& record, const VaccineSchedule& schedule) {
    const int age = whole_months_between(record.birth_date, record.vaccination_date);
    int best_dose = schedule.targets.front().first;
    int best_dist = std::abs(age - schedule.targets.front().second);
    for (const auto& [dose, target] : schedule.targets) {
        const int dist = std::abs(age - target);
        if (dist < best_dist) {
            best_dist = dist;
            best_dose = dose;
        }
    }
    return best_dose;
}

MonthlyTimeSeries article_percentage(const std::vector<ArticleCount>& counts,
                                     const SeriesWindow& window) {
    std::map<YearMonth, const ArticleCount*> by_month;
    for (const auto& c : counts) {
        if (!window.contains(c.month)) continue;
        auto [it, inserted] = by_month.try_emplace(c.month, &c);
        if (!inserted)
            throw PreconditionError("multiple rows for " + c.month.str() +
                                    "; aggregate stances first");
    }
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(window.length()));
    for (YearMonth m = window.from; m <= window.to; m = m.plus(1)) {
        auto it = by_month.find(m);
        if (it == by_month.end()) throw MissingMonth("no article counts for " + m.str());
        const ArticleCount& c = *it->second;
        values.push_back(100.0 * static_cast<double>(c.matched) /
                         static_cast<double>(c.normalizer));
    }
    return MonthlyTimeSeries(window.from, std::move(values));
}

MonthlyTimeSeries stance_series(const std::vector<ArticleCount>& counts, Stance stance,
                                const SeriesWindow& window) {
    std::vector<double> values(static_cast<std::size_t>(window.length()), 0.0);
    for (const auto& c : counts) {
        if (!window.contains(c.month)) continue;
        if (!c.stance)
            throw UnknownStance("row for " + c.month.str() + " carries no stance label");
        if (*c.stance != stance) continue;
        values[static_cast<std::size_t>(months_between(window.from, c.month))] +=
            static_cast<double>(c.matched);
    }
    return MonthlyTimeSeries(window.from, std::move(values));
}

std::vector<ArticleCount> aggregate_stances(const std::vector<ArticleCount>& counts) {
    std::map<YearMonth, ArticleCount> by_month;
    for (const auto& c : counts) {
        auto [it, inserted] = by_month.try_emplace(c.month, c);
        if (inserted) {
            it->second.stance.reset();
            continue;
        }
        if (it->second.normalizer != c.normalizer)
            throw PreconditionError("rows for " + c.month.str() + " disagree on normalizer (" +
                                    std::to_string(it->second.normalizer) + " vs " +
                                    std::to_string(c.normalizer) + ")");
        it->second.matched += c.matched;
    }
    std::vector<ArticleCount> out;
    out.reserve(by_month.size());
    for (auto& [m, c] : by_month) out.push_back(c);
    return out;
}

std::vector<std::string> dose_sequence_violations(const std::vector<VaccinationRecord>& records) {
    std::map<std::string, std::set<int>> doses;
    for (const auto& rec : records) doses[rec.person_id].insert(rec.dose);
    std::vector<std::string> out;
    for (const auto& [id, ds] : doses) {
        for (int d : ds) {
            if (d > 1 && !ds.count(d - 1)) {
                out.push_back(id);
                break;
            }
        }
    }
    return out;
}

namespace {

std::ifstream open_or_throw(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    return in;
}

void expect_header(std::ifstream& in, const std::filesystem::path& path,
                   std::string_view header) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path.string(), 1, "empty file");
    strip_cr(line);
    if (line != header)
        throw ParseError(path.string(), 1, "expected header '" + std::string(header) + "'");
}

}  // namespace

std::vector<VaccinationRecord> read_vaccination_csv(const std::filesystem::path& path) {
    auto in = open_or_throw(path);
    expect_header(in, path, "person_id,birth_date,vaccination_date,vaccine,dose");
    std::vector<VaccinationRecord> out;
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (line.empty()) continue;
        const auto f = split_fields(line);
        if (f.size() != 5) throw ParseError(path.string(), lineno, "expected 5 fields");
        try {
            VaccinationRecord rec;
            rec.person_id = std::string(f[0]);
            if (rec.person_id.empty()) throw ParseError("empty person_id");
            rec.birth_date = Date::parse(f[1]);
            rec.vaccination_date = Date::parse(f[2]);
            rec.vaccine = std::string(f[3]);
            rec.dose = to_int<int>(f[4]);
            if (rec.dose < 1) throw ParseError("dose must be >= 1");
            if (rec.vaccination_date < rec.birth_date)
                throw ParseError("vaccination before birth");
            out.push_back(std::move(rec));
        } catch (const ParseError& e) {
            throw ParseError(path.string(), lineno, e.what());
        }
    }
    return out;
}

std::vector<PopulationCohort> read_cohort_csv(const std::filesystem::path& path) {
    auto in = open_or_throw(path);
    expect_header(in, path, "birth_month,count");
    std::vector<PopulationCohort> out;
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (line.empty()) continue;
        const auto f = split_fields(line);
        if (f.size() != 2) throw ParseError(path.string(), lineno, "expected 2 fields");
        try {
            PopulationCohort c;
            c.birth_month = YearMonth::parse(f[0]);
            c.count = to_int<long>(f[1]);
            if (c.count < 0) throw ParseError("count must be >= 0");
            out.push_back(c);
        } catch (const ParseError& e) {
            throw ParseError(path.string(), lineno, e.what());
        }
    }
    return out;
}

std::vector<ArticleCount> read_article_csv(const std::filesystem::path& path) {
    auto in = open_or_throw(path);
    std::string header;
    if (!std::getline(in, header)) throw ParseError(path.string(), 1, "empty file");
    strip_cr(header);
    bool with_stance;
    if (header == "month,matched,normalizer")
        with_stance = false;
    else if (header == "month,matched,normalizer,stance")
        with_stance = true;
    else
        throw ParseError(path.string(), 1, "expected header 'month,matched,normalizer[,stance]'");

    std::vector<ArticleCount> out;
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (line.empty()) continue;
        const auto f = split_fields(line);
        if (f.size() != (with_stance ? 4u : 3u))
            throw ParseError(path.string(), lineno,
                             with_stance ? "expected 4 fields" : "expected 3 fields");
        try {
            ArticleCount c;
            c.month = YearMonth::parse(f[0]);
            c.matched = to_int<long>(f[1]);
            c.normalizer = to_int<long>(f[2]);
            if (c.matched < 0) throw ParseError("matched must be >= 0");
            if (c.normalizer < 1) throw ParseError("normalizer must be >= 1");
            if (c.matched > c.normalizer) throw ParseError("matched exceeds normalizer");
            if (with_stance) c.stance = parse_stance(f[3]);
            out.push_back(c);
        } catch (const Error& e) {
            throw ParseError(path.string(), lineno, e.what());
        }
    }
    return out;
}

}  // namespace uptake
