#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

#include "dlse/dataset.hpp"
#include "dlse/dca.hpp"
#include "dlse/lse.hpp"
#include "dlse/pwa.hpp"

namespace dlse {

// Model files are JSON:
//   {"schema_version":1,"n":..,"T":..,
//    "plus":{"K":..,"alphas":[[..]..],"betas":[..]},"minus":{..}}
// Doubles are written with shortest round-trip decimals, so write -> read is
// lossless.
nlohmann::json model_to_json(const DlseModel& m);
DlseModel model_from_json(const nlohmann::json& j);
void write_model(const DlseModel& m, const std::string& path);
DlseModel read_model(const std::string& path);

// Data files are CSV with header x1,..,xn,y and '.' decimal separator.
void write_dataset_csv(const Dataset& d, const std::string& path);
Dataset read_dataset_csv(const std::string& path);

// Generic numeric CSV (used by predict for data with or without targets).
struct Table {
  std::vector<std::string> header;
  Eigen::MatrixXd values;
};
Table read_csv(const std::string& path);

void write_trace_csv(const DcaTrace& trace, const std::string& path);
nlohmann::json trace_to_json(const DcaTrace& trace);

nlohmann::json pwa_to_json(const PwaSpec& s);
PwaSpec pwa_from_json(const nlohmann::json& j);

// Logging gated by the DLSE_LOG environment variable (quiet|info|debug);
// messages go to stderr so stdout stays machine-readable.
enum class LogLevel { quiet = 0, info = 1, debug = 2 };
LogLevel log_level();
void log_info(const std::string& message);
void log_debug(const std::string& message);

}  // namespace dlse
