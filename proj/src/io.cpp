#include "strata_bounds/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "strata_bounds/errors.hpp"

namespace strata_bounds {

namespace {

using nlohmann::ordered_json;

std::int64_t require_count(const ordered_json& arm, const std::string& key,
                           bool required, std::size_t position) {
  const auto where = " in arm entry " + std::to_string(position);
  if (!arm.contains(key)) {
    if (!required) return 0;
    throw InputError("missing field '" + key + "'" + where);
  }
  const auto& value = arm.at(key);
  if (!value.is_number_integer() || value.get<std::int64_t>() < 0) {
    throw InputError("field '" + key + "'" + where +
                     " must be a nonnegative integer");
  }
  return value.get<std::int64_t>();
}

TrialCounts assemble(std::vector<std::pair<int, ArmCounts>> rows) {
  TrialCounts counts;
  std::sort(rows.begin(), rows.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].first != static_cast<int>(i)) {
      throw InputError("arm levels must be exactly 0.." +
                       std::to_string(rows.size() - 1) +
                       " with no gaps or duplicates");
    }
    counts.arms.push_back(rows[i].second);
  }
  counts.validate();
  return counts;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    const auto begin = field.find_first_not_of(" \t\r");
    const auto end = field.find_last_not_of(" \t\r");
    fields.push_back(begin == std::string::npos
                         ? std::string()
                         : field.substr(begin, end - begin + 1));
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string csv_escape(const std::string& value) {
  if (value.find_first_of(",\"\n") == std::string::npos) return value;
  std::string escaped = "\"";
  for (char c : value) {
    if (c == '"') escaped += '"';
    escaped += c;
  }
  escaped += '"';
  return escaped;
}

std::string scalar_to_csv(const ordered_json& value) {
  if (value.is_string()) return csv_escape(value.get<std::string>());
  return value.dump();
}

bool is_uniform_object_array(const ordered_json& value) {
  if (!value.is_array() || value.empty() || !value.front().is_object()) {
    return false;
  }
  std::vector<std::string> keys;
  for (const auto& [k, v] : value.front().items()) {
    if (v.is_object() || v.is_array()) return false;
    keys.push_back(k);
  }
  for (const auto& element : value) {
    if (!element.is_object()) return false;
    std::vector<std::string> other;
    for (const auto& [k, v] : element.items()) {
      if (v.is_object() || v.is_array()) return false;
      other.push_back(k);
    }
    if (other != keys) return false;
  }
  return true;
}

void flatten(const ordered_json& node, const std::string& path,
             std::ostringstream& scalars,
             std::vector<std::pair<std::string, const ordered_json*>>& tables) {
  if (node.is_object()) {
    for (const auto& [key, value] : node.items()) {
      flatten(value, path.empty() ? key : path + "." + key, scalars, tables);
    }
  } else if (is_uniform_object_array(node)) {
    tables.emplace_back(path, &node);
  } else if (node.is_array()) {
    for (std::size_t i = 0; i < node.size(); ++i) {
      flatten(node[i], path + "[" + std::to_string(i) + "]", scalars, tables);
    }
  } else {
    scalars << csv_escape(path) << ',' << scalar_to_csv(node) << '\n';
  }
}

}  // namespace

TrialCounts ingest_json(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& err) {
    throw InputError(std::string("invalid JSON: ") + err.what());
  }
  if (!doc.is_object() || !doc.contains("arms") || !doc.at("arms").is_array()) {
    throw InputError("expected a top-level object with an 'arms' array");
  }
  static const std::set<std::string> known = {
      "z", "survived_y1", "survived_y0", "died", "survived_y_missing"};
  std::vector<std::pair<int, ArmCounts>> rows;
  std::size_t position = 0;
  for (const auto& arm : doc.at("arms")) {
    if (!arm.is_object()) {
      throw InputError("arm entry " + std::to_string(position) +
                       " is not an object");
    }
    for (const auto& [key, value] : arm.items()) {
      (void)value;
      if (!known.count(key)) {
        throw InputError("unknown field '" + key + "' in arm entry " +
                         std::to_string(position));
      }
    }
    if (!arm.contains("z") || !arm.at("z").is_number_integer()) {
      throw InputError("arm entry " + std::to_string(position) +
                       " needs an integer 'z'");
    }
    ArmCounts cell;
    cell.survived_y1 = require_count(arm, "survived_y1", true, position);
    cell.survived_y0 = require_count(arm, "survived_y0", true, position);
    cell.died = require_count(arm, "died", true, position);
    cell.survived_y_missing =
        require_count(arm, "survived_y_missing", false, position);
    rows.emplace_back(arm.at("z").get<int>(), cell);
    ++position;
  }
  return assemble(std::move(rows));
}

TrialCounts ingest_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> header;
  std::vector<std::pair<int, ArmCounts>> rows;
  std::size_t line_number = 0;
  std::map<std::string, std::size_t> column;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<std::string> fields = split_csv_line(line);
    if (header.empty()) {
      header = fields;
      for (std::size_t i = 0; i < header.size(); ++i) {
        if (column.count(header[i])) {
          throw InputError("duplicate CSV column '" + header[i] + "'");
        }
        column[header[i]] = i;
      }
      for (const char* required : {"z", "survived_y1", "survived_y0", "died"}) {
        if (!column.count(required)) {
          throw InputError(std::string("CSV header is missing column '") +
                           required + "'");
        }
      }
      for (const auto& [name, index] : column) {
        (void)index;
        if (name != "z" && name != "survived_y1" && name != "survived_y0" &&
            name != "died" && name != "survived_y_missing") {
          throw InputError("unknown CSV column '" + name + "'");
        }
      }
      continue;
    }
    if (fields.size() != header.size()) {
      throw InputError("line " + std::to_string(line_number) + " has " +
                       std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(header.size()));
    }
    auto parse_field = [&](const std::string& name,
                           bool required) -> std::int64_t {
      auto it = column.find(name);
      if (it == column.end()) return 0;
      const std::string& raw = fields[it->second];
      if (raw.empty() && !required) return 0;
      std::int64_t value = 0;
      const auto [ptr, ec] =
          std::from_chars(raw.data(), raw.data() + raw.size(), value);
      if (ec != std::errc() || ptr != raw.data() + raw.size() || value < 0) {
        throw InputError("line " + std::to_string(line_number) + ", column '" +
                         name + "': expected a nonnegative integer, got '" +
                         raw + "'");
      }
      return value;
    };
    ArmCounts cell;
    const std::int64_t z = parse_field("z", true);
    cell.survived_y1 = parse_field("survived_y1", true);
    cell.survived_y0 = parse_field("survived_y0", true);
    cell.died = parse_field("died", true);
    cell.survived_y_missing = parse_field("survived_y_missing", false);
    rows.emplace_back(static_cast<int>(z), cell);
  }
  if (header.empty()) throw InputError("CSV input has no header row");
  return assemble(std::move(rows));
}

TrialCounts ingest_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open input file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") {
    return ingest_csv(buffer.str());
  }
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
    return ingest_json(buffer.str());
  }
  throw InputError("unsupported input extension (want .json or .csv): " + path);
}

Report counts_to_json(const TrialCounts& counts) {
  Report arms = Report::array();
  for (std::size_t z = 0; z < counts.arms.size(); ++z) {
    const ArmCounts& cell = counts.arms[z];
    arms.push_back({{"z", z},
                    {"survived_y1", cell.survived_y1},
                    {"survived_y0", cell.survived_y0},
                    {"died", cell.died},
                    {"survived_y_missing", cell.survived_y_missing}});
  }
  return Report{{"arms", arms}};
}

std::string input_digest(const TrialCounts& counts) {
  std::string canonical;
  for (std::size_t z = 0; z < counts.arms.size(); ++z) {
    const ArmCounts& cell = counts.arms[z];
    canonical += "z" + std::to_string(z) + ":" +
                 std::to_string(cell.survived_y1) + "," +
                 std::to_string(cell.survived_y0) + "," +
                 std::to_string(cell.died) + "," +
                 std::to_string(cell.survived_y_missing) + ";";
  }
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(hash));
  return std::string("fnv1a:") + hex;
}

std::string report_to_csv(const Report& doc) {
  std::ostringstream scalars;
  std::vector<std::pair<std::string, const ordered_json*>> tables;
  scalars << "key,value\n";
  flatten(doc, "", scalars, tables);
  std::ostringstream out;
  out << scalars.str();
  for (const auto& [path, array] : tables) {
    out << "\ntable," << csv_escape(path) << '\n';
    bool first = true;
    for (const auto& element : *array) {
      if (first) {
        bool lead = true;
        for (const auto& [key, value] : element.items()) {
          (void)value;
          out << (lead ? "" : ",") << csv_escape(key);
          lead = false;
        }
        out << '\n';
        first = false;
      }
      bool lead = true;
      for (const auto& [key, value] : element.items()) {
        (void)key;
        out << (lead ? "" : ",") << scalar_to_csv(value);
        lead = false;
      }
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace strata_bounds
