#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uptake/timeseries.hpp"

namespace uptake {

struct Date {
    int year = 0;
    int month = 1;
    int day = 1;

    auto operator<=>(const Date&) const = default;

    // "YYYY-MM-DD", calendar-validated.
    static Date parse(std::string_view text);
    std::string str() const;
    YearMonth year_month() const { return YearMonth{year, month}; }
};

// Whole months elapsed from `from` to `to` (floor).
int whole_months_between(const Date& from, const Date& to);

struct VaccinationRecord {
    std::string person_id;
    Date birth_date;
    Date vaccination_date;
    std::string vaccine;
    int dose = 1;
};

struct PopulationCohort {
    YearMonth birth_month;
    long count = 0;
};

enum class Stance { pro, anti, neutral, irrelevant };

Stance parse_stance(std::string_view label);
std::string_view stance_name(Stance s);

struct ArticleCount {
    YearMonth month;
    long matched = 0;
    long normalizer = 1;
    std::optional<Stance> stance;
};

// Dose index -> target age in whole months, target ages strictly increasing.
struct VaccineSchedule {
    std::vector<std::pair<int, int>> targets;

    static VaccineSchedule make(std::vector<std::pair<int, int>> targets);
    int final_dose() const { return targets.back().first; }
};

// Schedules with validity intervals; the schedule in force at a month is the
// latest entry whose valid_from is not later than it.
struct ScheduleTimeline {
    std::vector<std::pair<YearMonth, VaccineSchedule>> entries;

    static ScheduleTimeline make(std::vector<std::pair<YearMonth, VaccineSchedule>> entries);
    const VaccineSchedule& in_force_at(YearMonth m) const;
};

struct ActivityOptions {
    // Optional age band on the numerator, in whole months at vaccination.
    // Defaults keep every record (catch-up vaccinations included).
    std::optional<int> min_age_months;
    std::optional<int> max_age_months;
};

// Monthly count of records with the given dose, divided by the count of
// persons whose birth month lies target_age_months earlier, x100. Values
// above 100 occur during catch-up periods.
MonthlyTimeSeries vaccination_activity(const std::vector<VaccinationRecord>& records,
                                       const std::vector<PopulationCohort>& cohorts, int dose,
                                       int target_age_months, const SeriesWindow& window,
                                       const ActivityOptions& options = {});

// Percentage of each birth-year cohort holding at least the given dose.
std::map<int, double> uptake_by_cohort(const std::vector<VaccinationRecord>& records,
                                       const std::vector<PopulationCohort>& cohorts, int dose);

// Percentage of each birth-year cohort that completed the schedule in force
// at the person's first recorded dose.
std::map<int, double> completion_by_cohort(const std::vector<VaccinationRecord>& records,
                                           const std::vector<PopulationCohort>& cohorts,
                                           const ScheduleTimeline& timeline);

// Schedule entry whose target age is nearest the age at vaccination; ties go
// to the lower dose index.
int assign_dose_group(const VaccinationRecord& record, const VaccineSchedule& schedule);

// 100 x matched / normalizer per month; input must hold exactly one
// stance-aggregated row per month of the window.
MonthlyTimeSeries article_percentage(const std::vector<ArticleCount>& counts,
                                     const SeriesWindow& window);

// Raw monthly count of articles with the given stance; months without such
// articles yield 0.
MonthlyTimeSeries stance_series(const std::vector<ArticleCount>& counts, Stance stance,
                                const SeriesWindow& window);

// Collapse stance-labeled rows into one row per month (matched summed; the
// rows of a month must agree on the normalizer).
std::vector<ArticleCount> aggregate_stances(const std::vector<ArticleCount>& counts);

// person_ids whose recorded dose set has gaps (dose d without every dose
// below d). Ingest validation reports these rather than reordering.
std::vector<std::string> dose_sequence_violations(const std::vector<VaccinationRecord>& records);

// CSV: person_id,birth_date,vaccination_date,vaccine,dose
std::vector<VaccinationRecord> read_vaccination_csv(const std::filesystem::path& path);
// CSV: birth_month,count
std::vector<PopulationCohort> read_cohort_csv(const std::filesystem::path& path);
// CSV: month,matched,normalizer[,stance]
std::vector<ArticleCount> read_article_csv(const std::filesystem::path& path);

}  // namespace uptake
