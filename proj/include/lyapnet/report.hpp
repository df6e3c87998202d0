#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lyapnet/experiment.hpp"

namespace lyapnet {

/// Header: n,p,epsilon,dynamics,method,trial,seed,alignment,status,wall_time
std::string records_to_csv(const std::vector<ResultRecord>& records);
std::vector<ResultRecord> records_from_csv(const std::string& text);
std::string records_to_json(const std::vector<ResultRecord>& records);

/// Per (p, epsilon, dynamics, method) cell: count, median, mean, quartiles.
std::string summary_to_csv(const std::vector<ResultRecord>& records);

struct BoxStats {
  double q1 = 0, median = 0, q3 = 0, mean = 0;
  double whisker_low = 0, whisker_high = 0;
  std::vector<double> outliers;
  std::size_t count = 0;
};

BoxStats box_stats(std::vector<double> values);

/// One box-plot panel per edge count: x grouped by epsilon, one box per
/// method and dynamics. Returns the SVG text.
std::string boxplot_svg(const std::vector<ResultRecord>& records, Eigen::Index p);

enum class ReportFormat { Csv, Json, Svg };

/// Writes records.csv / records.json / summary.csv / boxplot_p<P>.svg into
/// `dir` according to the requested formats; returns the paths written.
std::vector<std::filesystem::path> write_report(const std::vector<ResultRecord>& records,
                                                const std::filesystem::path& dir,
                                                const std::vector<ReportFormat>& formats);

}  // namespace lyapnet
