#include "agequeue/io.hpp"

#include <algorithm>
#include <cctype>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <type_traits>

#include <json.hpp>

namespace agequeue {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

// Reads key paths of a scenario document; every problem lands in `errors`.
class Reader {
 public:
  Reader(const fs::path& base, std::vector<std::string>& errors) : base_(base), errors_(errors) {}

  const json* child(const json& obj, const std::string& key, const std::string& path, bool required) {
    if (!obj.is_object() || !obj.contains(key)) {
      if (required) errors_.push_back(path + ": missing " + key);
      return nullptr;
    }
    return &obj.at(key);
  }

  template <class T>
  std::optional<T> get(const json& obj, const std::string& key, const std::string& prefix, bool required = true) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    const json* v = child(obj, key, prefix.empty() ? key : path, required);
    if (!v) return std::nullopt;
    try {
      if constexpr (std::is_floating_point_v<T>) {
        if (!v->is_number()) throw std::invalid_argument("expected a number");
      }
      return v->get<T>();
    } catch (const std::exception&) {
      errors_.push_back(path + ": wrong type");
      return std::nullopt;
    }
  }

  fs::path resolve(const std::string& p) const {
    const fs::path path(p);
    return path.is_absolute() ? path : base_ / path;
  }

  template <class Build>
  auto guarded(const std::string& path, Build build) -> std::optional<decltype(build())> {
    try {
      return build();
    } catch (const ConfigError& e) {
      errors_.push_back(path + ": " + e.what());
    } catch (const std::invalid_argument& e) {
      errors_.push_back(path + ": " + e.what());
    } catch (const json::exception& e) {
      errors_.push_back(path + ": " + e.what());
    }
    return std::nullopt;
  }

  std::vector<std::pair<double, double>> pairs(const json& rows) {
    std::vector<std::pair<double, double>> out;
    for (const auto& r : rows) {
      if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number()) {
        throw std::invalid_argument("table rows must be [age, value] pairs");
      }
      out.emplace_back(r[0].get<double>(), r[1].get<double>());
    }
    return out;
  }

  std::optional<SurvivalModel> survival(const json& root, const std::string& key) {
    const json* node = child(root, key, key, true);
    if (!node) return std::nullopt;
    const auto kind = get<std::string>(*node, "kind", key);
    if (!kind) return std::nullopt;
    const double max_age = get<double>(*node, "max_age", key, false).value_or(kDefaultMaxAge);
    return guarded(key, [&]() -> SurvivalModel {
      if (*kind == "exponential") return SurvivalModel::exponential(node->at("rate").get<double>(), max_age);
      if (*kind == "weibull") {
        return SurvivalModel::weibull(node->at("shape").get<double>(), node->at("scale").get<double>(), max_age);
      }
      if (*kind == "gompertz") {
        return SurvivalModel::gompertz(node->at("a").get<double>(), node->at("b").get<double>(), max_age);
      }
      if (*kind == "life_table") {
        if (node->contains("path")) return ingest_life_table(resolve(node->at("path").get<std::string>()));
        std::vector<LifeTableRow> rows;
        for (auto [a, v] : pairs(node->at("rows"))) rows.push_back({a, v});
        return SurvivalModel::life_table(std::move(rows));
      }
      throw std::invalid_argument("unknown kind \"" + *kind + "\"");
    });
  }

  std::optional<FertilitySchedule> fertility(const json& root, std::optional<double>& declared_bmax) {
    const std::string key = "fertility";
    const json* node = child(root, key, key, true);
    if (!node) return std::nullopt;
    const auto kind = get<std::string>(*node, "kind", key);
    declared_bmax = get<double>(*node, "b_max", key, false);
    if (!kind) return std::nullopt;
    return guarded(key, [&]() -> FertilitySchedule {
      FertilitySchedule f;
      if (*kind == "constant") {
        f = FertilitySchedule::constant(node->at("rate").get<double>());
      } else if (*kind == "window") {
        f = FertilitySchedule::window(node->at("lo").get<double>(), node->at("hi").get<double>(),
                                      node->at("peak").get<double>());
      } else if (*kind == "table") {
        if (node->contains("path")) {
          f = ingest_fertility_table(resolve(node->at("path").get<std::string>()));
        } else {
          std::vector<AgeRate> rows;
          for (auto [a, v] : pairs(node->at("rows"))) rows.push_back({a, v});
          f = FertilitySchedule::table(std::move(rows));
        }
      } else {
        throw std::invalid_argument("unknown kind \"" + *kind + "\"");
      }
      if (node->contains("time_factor")) {
        std::vector<TimeFactor> tf;
        for (auto [t, v] : pairs(node->at("time_factor"))) tf.push_back({t, v});
        f = f.with_time_factor(std::move(tf));
      }
      return f;
    });
  }

  std::optional<InitialDensity> initial(const json& root, const std::string& key) {
    const json* node = child(root, key, key, true);
    if (!node) return std::nullopt;
    const auto kind = get<std::string>(*node, "kind", key);
    if (!kind) return std::nullopt;
    return guarded(key, [&]() -> InitialDensity {
      if (*kind == "zero") return InitialDensity::zero();
      if (*kind == "exponential") {
        return InitialDensity::exponential(node->at("scale").get<double>(), node->at("rate").get<double>());
      }
      if (*kind == "uniform") {
        return InitialDensity::uniform(node->at("lo").get<double>(), node->at("hi").get<double>(),
                                       node->at("density").get<double>());
      }
      if (*kind == "table") {
        if (node->contains("path")) return ingest_density_table(resolve(node->at("path").get<std::string>()));
        std::vector<DensityPoint> pts;
        for (auto [a, v] : pairs(node->at("points"))) pts.push_back({a, v});
        return InitialDensity::table(std::move(pts));
      }
      throw std::invalid_argument("unknown kind \"" + *kind + "\"");
    });
  }

 private:
  fs::path base_;
  std::vector<std::string>& errors_;
};

std::size_t line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(byte), '\n'));
}

template <class Row, class Build>
auto ingest_two_column(const fs::path& path, Build build) {
  const NumericCsv csv = read_numeric_csv(path);
  if (csv.header.size() != 2 || csv.header[0] != "age") {
    throw ConfigError(path.string() + ": expected header \"age,<value>\"");
  }
  std::vector<Row> rows;
  for (const auto& r : csv.rows) {
    if (r.size() != 2) throw ConfigError(path.string() + ": every row needs two fields");
    rows.push_back({r[0], r[1]});
  }
  try {
    return build(std::move(rows));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace

ScenarioConfig load_scenario_config(const fs::path& path) {
  const std::string text = read_file(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ":" + std::to_string(line_of(text, e.byte)) + ": JSON parse error: " +
                      e.what());
  }
  if (!doc.is_object()) throw ConfigError(path.string() + ": top level must be an object");

  std::vector<std::string> errors;
  Reader rd(path.parent_path(), errors);
  ScenarioConfig cfg;
  if (auto v = rd.survival(doc, "survival_female")) cfg.female_survival = *v;
  if (auto v = rd.survival(doc, "survival_male")) cfg.male_survival = *v;
  if (auto v = rd.fertility(doc, cfg.declared_bmax)) cfg.fertility = *v;
  if (auto v = rd.get<double>(doc, "r", "")) cfg.r = *v;
  if (auto v = rd.get<std::int64_t>(doc, "N", "")) cfg.N = *v;
  if (auto v = rd.initial(doc, "initial_female")) cfg.female_initial = *v;
  if (auto v = rd.initial(doc, "initial_male")) cfg.male_initial = *v;
  if (auto v = rd.get<double>(doc, "t_max", "")) cfg.t_max = *v;
  if (auto v = rd.get<double>(doc, "h", "")) cfg.h = *v;
  if (auto v = rd.get<std::uint64_t>(doc, "seed", "", false)) cfg.seed = *v;
  if (auto v = rd.get<int>(doc, "replications", "", false)) cfg.replications = *v;
  if (auto v = rd.get<bool>(doc, "fertility_kernel_lagged", "", false)) cfg.fertility_kernel_lagged = *v;
  if (doc.contains("observation")) {
    const json& o = doc["observation"];
    if (auto v = rd.get<double>(o, "bin_width", "observation", false)) cfg.observation.bin_width = *v;
    if (auto v = rd.get<double>(o, "max_age", "observation", false)) cfg.observation.max_age = *v;
    if (auto v = rd.get<std::vector<double>>(o, "times", "observation", false)) cfg.observation.times = *v;
  }
  if (doc.contains("thresholds")) {
    const json& t = doc["thresholds"];
    auto& th = cfg.thresholds;
    for (auto [key, field] : {std::pair{"z_mean", &th.z_mean}, {"z_variance", &th.z_variance},
                              {"z_normal", &th.z_normal}, {"mean_floor", &th.mean_floor},
                              {"variance_floor", &th.variance_floor}, {"normality_floor", &th.normality_floor}}) {
      if (auto v = rd.get<double>(t, key, "thresholds", false)) *field = *v;
    }
  }
  if (!errors.empty()) {
    std::string msg = path.string() + ": invalid scenario";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  return cfg;
}

Scenario load_scenario(const fs::path& path) { return validate_scenario(load_scenario_config(path)); }

SurvivalModel ingest_life_table(const fs::path& path) {
  return ingest_two_column<LifeTableRow>(path, [](std::vector<LifeTableRow> rows) {
    return SurvivalModel::life_table(std::move(rows));
  });
}

FertilitySchedule ingest_fertility_table(const fs::path& path) {
  return ingest_two_column<AgeRate>(path, [](std::vector<AgeRate> rows) {
    return FertilitySchedule::table(std::move(rows));
  });
}

InitialDensity ingest_density_table(const fs::path& path) {
  return ingest_two_column<DensityPoint>(path, [](std::vector<DensityPoint> rows) {
    return InitialDensity::table(std::move(rows));
  });
}

std::string format_csv(const CsvTable& table) {
  std::string out;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) out += ',';
    out += table.header[i];
  }
  out += '\n';
  char buf[64];
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      if (const double* d = std::get_if<double>(&row[i])) {
        std::snprintf(buf, sizeof buf, "%.10g", *d);
        out += buf;
      } else if (const std::int64_t* n = std::get_if<std::int64_t>(&row[i])) {
        std::snprintf(buf, sizeof buf, "%" PRId64, *n);
        out += buf;
      } else {
        out += std::get<std::string>(row[i]);
      }
    }
    out += '\n';
  }
  return out;
}

void write_csv(const CsvTable& table, const fs::path& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError(path.string() + ": cannot open for writing");
  const std::string text = format_csv(table);
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  f.close();
  if (!f) throw IoError(path.string() + ": write failed");
}

void emit_csv(const std::vector<NamedTable>& tables, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(dir.string() + ": " + ec.message());
  for (const auto& t : tables) write_csv(t.table, dir / t.file_name);
}

NumericCsv read_numeric_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open");
  NumericCsv csv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto fields = split(line);
    if (csv.header.empty()) {
      csv.header = std::move(fields);
      continue;
    }
    std::vector<double> row;
    for (const auto& f : fields) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(f, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (f.empty() || used != f.size()) {
        throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": not a number: \"" + f + "\"");
      }
      row.push_back(v);
    }
    csv.rows.push_back(std::move(row));
  }
  if (csv.header.empty()) throw ConfigError(path.string() + ": empty file");
  return csv;
}

}  // namespace agequeue
