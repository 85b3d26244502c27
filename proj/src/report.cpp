#include "sdeim/report.hpp"

#include <cmath>

#include "sdeim/snapshot_io.hpp"

namespace sdeim
{

SeriesStats series_stats(const Vector &values)
{
    SeriesStats s;
    if (values.size() == 0) return s;
    s.mean = values.mean();
    s.std = std::sqrt((values.array() - s.mean).square().mean());
    return s;
}

MethodSummary summarize(const Vector &series, Index transient_steps)
{
    MethodSummary out;
    out.full = series_stats(series);
    const Index skip = std::min(transient_steps, series.size());
    out.post_transient = series_stats(series.tail(series.size() - skip));
    return out;
}

MethodSummary RunReport::bestfit_summary() const { return summarize(re_bestfit, transient_steps); }
MethodSummary RunReport::qdeim_summary() const { return summarize(re_qdeim, transient_steps); }
MethodSummary RunReport::sdeim_summary() const { return summarize(re_sdeim, transient_steps); }

std::string report_csv(const RunReport &report)
{
    std::string out = "time,re_bestfit,re_qdeim,re_sdeim\n";
    for (Index j = 0; j < report.size(); ++j) {
        out += format_double(report.times[static_cast<std::size_t>(j)]);
        out += ',';
        out += format_double(report.re_bestfit[j]);
        out += ',';
        out += format_double(report.re_qdeim[j]);
        out += ',';
        out += format_double(report.re_sdeim[j]);
        out += '\n';
    }
    return out;
}

namespace
{

nlohmann::ordered_json to_json(const MethodSummary &s)
{
    return {
        {"mean", s.full.mean},
        {"std", s.full.std},
        {"post_transient_mean", s.post_transient.mean},
        {"post_transient_std", s.post_transient.std},
    };
}

} // namespace

nlohmann::ordered_json report_json(const RunReport &report)
{
    nlohmann::ordered_json j;
    j["snapshots"] = report.size();
    j["transient_steps"] = report.transient_steps;
    j["summary"] = {
        {"bestfit", to_json(report.bestfit_summary())},
        {"qdeim", to_json(report.qdeim_summary())},
        {"sdeim", to_json(report.sdeim_summary())},
    };
    j["metadata"] = report.metadata;
    return j;
}

void write_report(const RunReport &report, const std::filesystem::path &dir,
                  const std::string &stem)
{
    write_file_atomic(dir / (stem + ".csv"), report_csv(report));
    write_file_atomic(dir / (stem + ".json"), report_json(report).dump(2) + "\n");
}

} // namespace sdeim
