#include "nlod/record.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nlod/errors.hpp"

namespace nlod {

namespace {

constexpr const char* kHeader =
    "command,s,p,alpha,sigma,N,lambda,seminorm_term,penalty_term,iterations,el_residual,"
    "design_checksum,seed,wall_time_ms";

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_double_field(const std::string& text, const char* name) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("record field '" + std::string(name) + "' is not a number: '" + text +
                          "'");
  }
}

std::uint64_t parse_u64_field(const std::string& text, const char* name) {
  try {
    std::size_t pos = 0;
    const std::uint64_t v = std::stoull(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("record field '" + std::string(name) +
                          "' is not an unsigned integer: '" + text + "'");
  }
}

int parse_int_field(const std::string& text, const char* name) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("record field '" + std::string(name) + "' is not an integer: '" + text +
                          "'");
  }
}

nlohmann::ordered_json record_to_json(const ExperimentRecord& r) {
  nlohmann::ordered_json j;
  j["command"] = r.command;
  j["s"] = r.s;
  j["p"] = r.p;
  j["alpha"] = r.alpha;
  if (r.sigma) {
    j["sigma"] = *r.sigma;
  } else {
    j["sigma"] = nullptr;
  }
  j["N"] = r.N;
  j["lambda"] = r.lambda;
  j["seminorm_term"] = r.seminorm_term;
  j["penalty_term"] = r.penalty_term;
  j["iterations"] = r.iterations;
  j["el_residual"] = r.el_residual;
  j["design_checksum"] = r.design_checksum;
  j["seed"] = r.seed;
  j["wall_time_ms"] = r.wall_time_ms;
  return j;
}

ExperimentRecord record_from_json(const nlohmann::json& j) {
  ExperimentRecord r;
  r.command = j.at("command").get<std::string>();
  r.s = j.at("s").get<double>();
  r.p = j.at("p").get<double>();
  r.alpha = j.at("alpha").get<double>();
  if (!j.at("sigma").is_null()) r.sigma = j.at("sigma").get<double>();
  r.N = j.at("N").get<int>();
  r.lambda = j.at("lambda").get<double>();
  r.seminorm_term = j.at("seminorm_term").get<double>();
  r.penalty_term = j.at("penalty_term").get<double>();
  r.iterations = j.at("iterations").get<int>();
  r.el_residual = j.at("el_residual").get<double>();
  r.design_checksum = j.at("design_checksum").get<std::uint64_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.wall_time_ms = j.at("wall_time_ms").get<double>();
  return r;
}

}  // namespace

RecordFormat record_format_from_name(const std::string& name) {
  if (name == "csv") return RecordFormat::csv;
  if (name == "jsonlines") return RecordFormat::jsonlines;
  throw ValidationError("output format must be 'csv' or 'jsonlines', got '" + name + "'");
}

std::string record_header() { return kHeader; }

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::uint64_t design_checksum(const Eigen::VectorXd& values) {
  std::uint64_t hash = 14695981039346656037ull;
  constexpr std::uint64_t prime = 1099511628211ull;
  for (int i = 0; i < values.size(); ++i) {
    const auto q = static_cast<std::uint64_t>(std::llround(values[i] * 1e12));
    for (int b = 0; b < 8; ++b) {
      hash ^= (q >> (8 * b)) & 0xffu;
      hash *= prime;
    }
  }
  return hash;
}

void emit_records(const std::vector<ExperimentRecord>& records, std::ostream& out,
                  RecordFormat format) {
  if (format == RecordFormat::csv) {
    out << kHeader << '\n';
    for (const ExperimentRecord& r : records) {
      if (r.command.find_first_of(",\n") != std::string::npos) {
        throw ValidationError("record command '" + r.command + "' contains a delimiter");
      }
      out << r.command << ',' << format_double(r.s) << ',' << format_double(r.p) << ','
          << format_double(r.alpha) << ',' << (r.sigma ? format_double(*r.sigma) : std::string())
          << ',' << r.N << ',' << format_double(r.lambda) << ',' << format_double(r.seminorm_term)
          << ',' << format_double(r.penalty_term) << ',' << r.iterations << ','
          << format_double(r.el_residual) << ',' << r.design_checksum << ',' << r.seed << ','
          << format_double(r.wall_time_ms) << '\n';
    }
  } else {
    for (const ExperimentRecord& r : records) {
      out << record_to_json(r).dump() << '\n';
    }
  }
}

void emit_records(const std::vector<ExperimentRecord>& records, const std::string& path,
                  RecordFormat format) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open '" + path + "' for writing");
  }
  emit_records(records, out, format);
  out.flush();
  if (!out.good()) {
    throw IoError("failed while writing '" + path + "'");
  }
}

std::vector<ExperimentRecord> parse_records(std::istream& in, RecordFormat format) {
  std::vector<ExperimentRecord> records;
  std::string line;
  if (format == RecordFormat::csv) {
    if (!std::getline(in, line)) {
      throw ValidationError("record stream is empty; expected the CSV header");
    }
    if (line != kHeader) {
      throw ValidationError("unexpected CSV header: '" + line + "'");
    }
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const std::vector<std::string> f = split_csv_line(line);
      if (f.size() != 14) {
        throw ValidationError("CSV row has " + std::to_string(f.size()) +
                              " fields; expected 14: '" + line + "'");
      }
      ExperimentRecord r;
      r.command = f[0];
      r.s = parse_double_field(f[1], "s");
      r.p = parse_double_field(f[2], "p");
      r.alpha = parse_double_field(f[3], "alpha");
      if (!f[4].empty()) r.sigma = parse_double_field(f[4], "sigma");
      r.N = parse_int_field(f[5], "N");
      r.lambda = parse_double_field(f[6], "lambda");
      r.seminorm_term = parse_double_field(f[7], "seminorm_term");
      r.penalty_term = parse_double_field(f[8], "penalty_term");
      r.iterations = parse_int_field(f[9], "iterations");
      r.el_residual = parse_double_field(f[10], "el_residual");
      r.design_checksum = parse_u64_field(f[11], "design_checksum");
      r.seed = parse_u64_field(f[12], "seed");
      r.wall_time_ms = parse_double_field(f[13], "wall_time_ms");
      records.push_back(std::move(r));
    }
  } else {
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("invalid JSON line: ") + e.what());
      }
      try {
        records.push_back(record_from_json(j));
      } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("JSON record missing or mistyped field: ") + e.what());
      }
    }
  }
  return records;
}

std::vector<ExperimentRecord> parse_records_file(const std::string& path, RecordFormat format) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open '" + path + "' for reading");
  }
  return parse_records(in, format);
}

}  // namespace nlod
