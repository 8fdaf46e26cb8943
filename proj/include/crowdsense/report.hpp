#pragma once

#include "crowdsense/rational.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace crowdsense {

/// One (algorithm, scenario, seed) measurement.
struct ResultRow {
  std::string algorithm;  // "csopt" or "gssum"
  int n_users = 0;
  int n_tasks = 0;
  int r = 1;
  std::uint64_t seed = 0;
  Rational total_payment;
  Rational total_cost;
  double runtime_s = 0.0;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

inline constexpr const char* kCsvHeader =
    "algorithm,n_users,n_tasks,r,seed,total_payment,total_cost,runtime_s";

/// "123", "123.45", or "n/d" when the value is not a 0.01 multiple.
std::string format_amount(const Rational& q);

std::string rows_to_csv(const std::vector<ResultRow>& rows);
std::vector<ResultRow> rows_from_csv(const std::string& text);

nlohmann::json rows_to_json(const std::vector<ResultRow>& rows);
std::vector<ResultRow> rows_from_json(const nlohmann::json& j);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

/// Writes rows in the requested format ("csv" or "json") plus a metadata
/// sidecar at `path + ".meta.json"` describing the configuration that
/// produced them.
void write_report(const std::vector<ResultRow>& rows, const std::string& path,
                  const std::string& format, const nlohmann::json& metadata);

}  // namespace crowdsense
