// Tables, output formats, atomic writes and run manifests for the kkflows tool.

#ifndef KKFLOWS_TOOLS_OUTPUT_HPP
#define KKFLOWS_TOOLS_OUTPUT_HPP

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace kkflows::cli {

using Cell = std::variant<double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

enum class Format { Csv, Json, Text };
// Throws InvalidInput for names other than csv, json and text.
Format format_from_name(const std::string& name);
std::string format_name(Format f);

// Doubles with 17 significant digits; nan and inf spelled out.
std::string format_double(double x);

// CSV with a header row, JSON as an array of row objects, text as aligned columns.
std::string render(const Table& table, Format format);
// JSON cells: doubles as numbers (null when not finite), strings as strings.
nlohmann::json to_json(const Table& table);

std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t h);

// Writes through a temporary file in the same directory and a rename.
void write_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

struct ManifestInfo {
  std::vector<std::string> command;  // argv without the program name
  std::uint64_t seed = 1;
  std::string tolerance_override;    // KKFLOWS_TOL as read
  double replay_rtol = 1e-9;         // numeric outputs are reproduced to this relative tolerance
  bool symbolic = false;             // symbolic outputs are reproduced byte for byte
  Format format = Format::Csv;
};

nlohmann::json make_manifest(const ManifestInfo& info, const std::string& output_path, const std::string& content);
nlohmann::json library_versions();

// Compares two outputs token by token. Returns the largest |x - y| / max(1, |x|)
// over numeric tokens, or infinity when a non-numeric token or the token
// count differs.
double compare_numeric_text(const std::string& a, const std::string& b);

}  // namespace kkflows::cli

#endif  // KKFLOWS_TOOLS_OUTPUT_HPP
