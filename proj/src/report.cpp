#include "crowdsense/report.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace crowdsense {
namespace {

std::string format_runtime(double seconds) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", seconds);
  return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) fields.push_back(field);
  return fields;
}

}  // namespace

std::string format_amount(const Rational& q) {
  if (q.denominator() == 1) return to_string(q);
  try {
    const std::int64_t c = to_centi(q);
    char buf[64];
    const char* sign = c < 0 ? "-" : "";
    const std::int64_t abs = c < 0 ? -c : c;
    std::snprintf(buf, sizeof buf, "%s%" PRId64 ".%02" PRId64, sign, abs / 100, abs % 100);
    return buf;
  } catch (const std::domain_error&) {
    return to_string(q);
  }
}

std::string rows_to_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  out << kCsvHeader << "\n";
  for (const ResultRow& row : rows) {
    out << row.algorithm << ',' << row.n_users << ',' << row.n_tasks << ',' << row.r << ','
        << row.seed << ',' << format_amount(row.total_payment) << ','
        << format_amount(row.total_cost) << ',' << format_runtime(row.runtime_s) << "\n";
  }
  return out.str();
}

std::vector<ResultRow> rows_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw std::runtime_error("unexpected CSV header: " + line);
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 8) throw std::runtime_error("malformed CSV row: " + line);
    ResultRow row;
    row.algorithm = fields[0];
    row.n_users = std::stoi(fields[1]);
    row.n_tasks = std::stoi(fields[2]);
    row.r = std::stoi(fields[3]);
    row.seed = std::stoull(fields[4]);
    row.total_payment = parse_rational(fields[5]);
    row.total_cost = parse_rational(fields[6]);
    row.runtime_s = std::stod(fields[7]);
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json rows_to_json(const std::vector<ResultRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const ResultRow& row : rows) {
    out.push_back({{"algorithm", row.algorithm},
                   {"n_users", row.n_users},
                   {"n_tasks", row.n_tasks},
                   {"r", row.r},
                   {"seed", row.seed},
                   {"total_payment", format_amount(row.total_payment)},
                   {"total_cost", format_amount(row.total_cost)},
                   {"runtime_s", row.runtime_s}});
  }
  return out;
}

std::vector<ResultRow> rows_from_json(const nlohmann::json& j) {
  std::vector<ResultRow> rows;
  for (const auto& item : j) {
    ResultRow row;
    row.algorithm = item.at("algorithm").get<std::string>();
    row.n_users = item.at("n_users").get<int>();
    row.n_tasks = item.at("n_tasks").get<int>();
    row.r = item.at("r").get<int>();
    row.seed = item.at("seed").get<std::uint64_t>();
    row.total_payment = parse_rational(item.at("total_payment").get<std::string>());
    row.total_cost = parse_rational(item.at("total_cost").get<std::string>());
    row.runtime_s = item.at("runtime_s").get<double>();
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_report(const std::vector<ResultRow>& rows, const std::string& path,
                  const std::string& format, const nlohmann::json& metadata) {
  if (format == "csv")
    write_text_file(path, rows_to_csv(rows));
  else if (format == "json")
    write_text_file(path, rows_to_json(rows).dump(2) + "\n");
  else
    throw std::invalid_argument("unknown format: " + format);
  write_text_file(path + ".meta.json", metadata.dump(2) + "\n");
}

}  // namespace crowdsense
