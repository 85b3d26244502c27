#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "sdeim/error.hpp"

namespace sdeim
{

struct SeriesStats
{
    double mean = 0.0;
    double std = 0.0; // population standard deviation
};

struct MethodSummary
{
    SeriesStats full;
    SeriesStats post_transient;
};

/// Per-snapshot relative errors of one estimation run.
struct RunReport
{
    std::vector<double> times;
    Vector re_bestfit;
    Vector re_qdeim;
    Vector re_sdeim;
    /// Snapshots excluded from the post-transient statistics.
    Index transient_steps = 0;
    nlohmann::ordered_json metadata;

    [[nodiscard]] Index size() const noexcept { return re_sdeim.size(); }
    [[nodiscard]] MethodSummary bestfit_summary() const;
    [[nodiscard]] MethodSummary qdeim_summary() const;
    [[nodiscard]] MethodSummary sdeim_summary() const;
};

SeriesStats series_stats(const Vector &values);
MethodSummary summarize(const Vector &series, Index transient_steps);

/// "time,re_bestfit,re_qdeim,re_sdeim" followed by one row per snapshot.
std::string report_csv(const RunReport &report);
/// Summary statistics plus the stored metadata.
nlohmann::ordered_json report_json(const RunReport &report);

/// Writes <stem>.csv and <stem>.json into `dir`.
void write_report(const RunReport &report, const std::filesystem::path &dir,
                  const std::string &stem = "report");

} // namespace sdeim
