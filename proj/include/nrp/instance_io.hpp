#ifndef NRP_INSTANCE_IO_HPP_
#define NRP_INSTANCE_IO_HPP_

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "nrp/core.hpp"
#include "nrp/errors.hpp"
#include "nrp/metrics.hpp"

namespace nrp {

using Json = nlohmann::ordered_json;

/// Shortest round-trip decimal form; integral doubles print without a
/// fractional part. Keeps every emitted file deterministic and diff-friendly.
inline std::string format_number(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

/// Writes via a temporary file and rename so readers never observe a
/// half-written file.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out << content;
    if (!out) throw IoError("short write to '" + tmp.string() + "'");
  }
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename '" + tmp.string() + "' to '" + path.string() + "'");
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream oss;
  oss << in.rdbuf();
  return oss.str();
}

/// On-disk instance document: base data plus the effort ratios it should be
/// solved under. Each ratio r yields an NrpInstance with B = r * total
/// effort.
struct InstanceFile {
  std::string name;
  std::vector<Client> clients;
  std::vector<Requirement> requirements;
  InteractionSet interactions;
  std::vector<double> effort_ratios;

  double total_effort() const {
    double sum = 0.0;
    for (const auto& r : requirements) sum += r.effort;
    return sum;
  }

  NrpInstance make_instance(double ratio) const {
    if (ratio <= 0.0) throw ValidationError("effort ratio must be positive");
    NrpInstance instance;
    instance.name = name + "/" + format_number(ratio * total_effort());
    instance.clients = clients;
    instance.requirements = requirements;
    instance.interactions = interactions;
    instance.effort_limit = ratio * total_effort();
    instance = aggregate_satisfaction(std::move(instance));
    validate_instance(instance);
    return instance;
  }
};

namespace detail {

inline double require_number(const Json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key) || !j[key].is_number()) {
    throw ParseError(where + ": missing or non-numeric '" + key + "'");
  }
  return j[key].get<double>();
}

inline std::string require_string(const Json& j, const std::string& key,
                                  const std::string& where) {
  if (!j.contains(key) || !j[key].is_string()) {
    throw ParseError(where + ": missing or non-string '" + key + "'");
  }
  return j[key].get<std::string>();
}

inline std::vector<IdPair> parse_pairs(const Json& j, const std::string& key) {
  std::vector<IdPair> pairs;
  if (!j.contains(key)) return pairs;
  if (!j[key].is_array()) throw ParseError("interactions." + key + " must be an array");
  std::size_t index = 0;
  for (const auto& item : j[key]) {
    if (!item.is_array() || item.size() != 2 || !item[0].is_string() || !item[1].is_string()) {
      throw ParseError("interactions." + key + "[" + std::to_string(index) +
                       "] must be a pair of requirement ids");
    }
    pairs.emplace_back(item[0].get<std::string>(), item[1].get<std::string>());
    ++index;
  }
  return pairs;
}

}  // namespace detail

inline InstanceFile instance_file_from_json(const Json& doc) {
  InstanceFile file;
  file.name = detail::require_string(doc, "name", "instance");

  if (doc.contains("clients")) {
    if (!doc["clients"].is_array()) throw ParseError("clients must be an array");
    for (const auto& c : doc["clients"]) {
      Client client;
      client.id = detail::require_string(c, "id", "client");
      client.weight = detail::require_number(c, "weight", "client '" + client.id + "'");
      file.clients.push_back(std::move(client));
    }
  }

  if (!doc.contains("requirements") || !doc["requirements"].is_array()) {
    throw ParseError("instance: missing 'requirements' array");
  }
  for (const auto& r : doc["requirements"]) {
    Requirement req;
    req.id = detail::require_string(r, "id", "requirement");
    req.effort = detail::require_number(r, "effort", "requirement '" + req.id + "'");
    const bool has_values = r.contains("values");
    const bool has_direct = r.contains("satisfaction");
    if (has_values && has_direct) {
      throw ParseError("requirement '" + req.id +
                       "': give either per-client 'values' or a direct 'satisfaction', not both");
    }
    if (has_values) {
      if (!r["values"].is_object()) {
        throw ParseError("requirement '" + req.id + "': 'values' must be an object");
      }
      for (const auto& [client_id, value] : r["values"].items()) {
        if (!value.is_number()) {
          throw ParseError("requirement '" + req.id + "': value for client '" + client_id +
                           "' must be numeric");
        }
        req.client_values[client_id] = value.get<double>();
      }
    } else if (has_direct) {
      if (!r["satisfaction"].is_number()) {
        throw ParseError("requirement '" + req.id + "': 'satisfaction' must be numeric");
      }
      req.satisfaction = r["satisfaction"].get<double>();
    }
    file.requirements.push_back(std::move(req));
  }

  if (doc.contains("interactions")) {
    const auto& i = doc["interactions"];
    if (!i.is_object()) throw ParseError("interactions must be an object");
    file.interactions.implications = detail::parse_pairs(i, "implications");
    file.interactions.combinations = detail::parse_pairs(i, "combinations");
    file.interactions.exclusions = detail::parse_pairs(i, "exclusions");
  }

  if (doc.contains("effort_ratios")) {
    if (!doc["effort_ratios"].is_array()) throw ParseError("effort_ratios must be an array");
    for (const auto& r : doc["effort_ratios"]) {
      if (!r.is_number() || r.get<double>() <= 0.0) {
        throw ParseError("effort_ratios entries must be positive numbers");
      }
      file.effort_ratios.push_back(r.get<double>());
    }
  }
  if (file.effort_ratios.empty()) file.effort_ratios = {0.3, 0.5, 0.75};
  return file;
}

inline Json instance_file_to_json(const InstanceFile& file) {
  Json doc;
  doc["name"] = file.name;
  if (!file.clients.empty()) {
    doc["clients"] = Json::array();
    for (const auto& c : file.clients) {
      doc["clients"].push_back(Json{{"id", c.id}, {"weight", c.weight}});
    }
  }
  doc["requirements"] = Json::array();
  for (const auto& r : file.requirements) {
    Json item{{"id", r.id}, {"effort", r.effort}};
    if (!r.client_values.empty()) {
      Json values = Json::object();
      for (const auto& [client_id, value] : r.client_values) values[client_id] = value;
      item["values"] = std::move(values);
    } else {
      item["satisfaction"] = r.satisfaction;
    }
    doc["requirements"].push_back(std::move(item));
  }
  Json interactions = Json::object();
  auto pairs_to_json = [](const std::vector<IdPair>& pairs) {
    Json arr = Json::array();
    for (const auto& [a, b] : pairs) arr.push_back(Json::array({a, b}));
    return arr;
  };
  interactions["implications"] = pairs_to_json(file.interactions.implications);
  interactions["combinations"] = pairs_to_json(file.interactions.combinations);
  interactions["exclusions"] = pairs_to_json(file.interactions.exclusions);
  doc["interactions"] = std::move(interactions);
  doc["effort_ratios"] = file.effort_ratios;
  return doc;
}

inline InstanceFile parse_instance_file(const std::filesystem::path& path) {
  Json doc;
  try {
    doc = Json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  try {
    return instance_file_from_json(doc);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

/// One validated instance per effort ratio declared in the file.
inline std::vector<NrpInstance> parse_instance(const std::filesystem::path& path) {
  const auto file = parse_instance_file(path);
  std::vector<NrpInstance> instances;
  instances.reserve(file.effort_ratios.size());
  for (double ratio : file.effort_ratios) instances.push_back(file.make_instance(ratio));
  return instances;
}

inline void write_instance_file(const InstanceFile& file, const std::filesystem::path& path) {
  atomic_write(path, instance_file_to_json(file).dump(2) + "\n");
}

/// Front CSV: one row per solution, ascending effort, requirement ids
/// semicolon-joined and sorted.
inline std::string front_to_csv(const Front& front) {
  std::ostringstream oss;
  oss << "effort,satisfaction,requirements\n";
  for (const auto& s : front.solutions) {
    oss << format_number(s.effort) << ',' << format_number(s.satisfaction) << ',';
    for (std::size_t i = 0; i < s.selected.size(); ++i) {
      if (i) oss << ';';
      oss << s.selected[i];
    }
    oss << '\n';
  }
  return oss.str();
}

inline void write_front_csv(const Front& front, const std::filesystem::path& path) {
  atomic_write(path, front_to_csv(front));
}

inline Front front_from_csv(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line) || line.rfind("effort,satisfaction,requirements", 0) != 0) {
    throw ParseError(path.string() + ": missing front CSV header");
  }
  Front front;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string effort_text, sat_text, ids_text;
    if (!std::getline(row, effort_text, ',') || !std::getline(row, sat_text, ',')) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": malformed row");
    }
    std::getline(row, ids_text);
    Solution s;
    try {
      s.effort = std::stod(effort_text);
      s.satisfaction = std::stod(sat_text);
    } catch (const std::exception&) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": malformed number");
    }
    std::istringstream ids(ids_text);
    std::string id;
    while (std::getline(ids, id, ';')) {
      if (!id.empty()) s.selected.push_back(id);
    }
    std::sort(s.selected.begin(), s.selected.end());
    front.solutions.push_back(std::move(s));
  }
  return front;
}

}  // namespace nrp

#endif  // NRP_INSTANCE_IO_HPP_
