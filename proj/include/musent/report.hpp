#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "musent/eval.hpp"
#include "musent/fusion.hpp"
#include "musent/ingest.hpp"

namespace musent {

using OrderedJson = nlohmann::ordered_json;

OrderedJson metrics_to_json(const MetricsReport& report, const ConfusionMatrix& cm);
OrderedJson join_report_to_json(const JoinReport& report);

/// Grouped bar chart: one group per class plus a macro group, bars for
/// precision, recall and F1 on a 0..1 axis. No timestamps or ids, so the
/// same report always renders to the same bytes.
std::string render_metrics_svg(const MetricsReport& report, std::string_view title);

/// One bar per grid weight with the best weight highlighted.
std::string render_sweep_svg(const SweepResult& sweep, std::string_view title, std::string_view metric_name);

/// Tab-separated `weight\tscore` rows with a header.
std::string format_sweep_curve(const SweepResult& sweep);

/// Writes `content` to `path`, creating parent directories. Throws IoError.
void write_file(const std::filesystem::path& path, std::string_view content);
void write_json(const std::filesystem::path& path, const OrderedJson& doc);

}  // namespace musent
