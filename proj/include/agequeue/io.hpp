#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "agequeue/fertility.hpp"
#include "agequeue/initial_density.hpp"
#include "agequeue/scenario.hpp"
#include "agequeue/survival.hpp"

namespace agequeue {

/// Malformed input files: JSON syntax, missing or mistyped keys, bad CSV.
/// The message carries the path and, where known, the line.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unwritable outputs.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses a scenario file. Table paths inside it are resolved against the
/// directory of `path`. The result is not yet validated.
ScenarioConfig load_scenario_config(const std::filesystem::path& path);

/// load_scenario_config followed by validate_scenario.
Scenario load_scenario(const std::filesystem::path& path);

/// Two-column CSV "age,<value>" tables.
SurvivalModel ingest_life_table(const std::filesystem::path& path);
FertilitySchedule ingest_fertility_table(const std::filesystem::path& path);
InitialDensity ingest_density_table(const std::filesystem::path& path);

using CsvCell = std::variant<double, std::int64_t, std::string>;

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<CsvCell>> rows;
};

/// Comma separated, LF line endings, doubles as %.10g.
std::string format_csv(const CsvTable& table);

/// Writes one file; throws IoError naming the path on failure.
void write_csv(const CsvTable& table, const std::filesystem::path& path);

struct NamedTable {
  std::string file_name;
  CsvTable table;
};

/// Creates `dir` if needed and writes each table into it.
void emit_csv(const std::vector<NamedTable>& tables, const std::filesystem::path& dir);

struct NumericCsv {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// Reads a CSV whose body is entirely numeric. Throws ConfigError with the
/// line number of the first bad field.
NumericCsv read_numeric_csv(const std::filesystem::path& path);

}  // namespace agequeue
