#include "output.hpp"

#include <fftw3.h>
#include <gmp.h>

#include <Eigen/Core>
#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <unistd.h>

#include "kkflows/errors.hpp"

#ifndef KKFLOWS_VERSION
#define KKFLOWS_VERSION "unknown"
#endif

namespace kkflows::cli {

Format format_from_name(const std::string& name) {
  if (name == "csv") return Format::Csv;
  if (name == "json") return Format::Json;
  if (name == "text") return Format::Text;
  throw InvalidInput("unknown output format '" + name + "' (csv, json or text)");
}

std::string format_name(Format f) {
  switch (f) {
    case Format::Csv: return "csv";
    case Format::Json: return "json";
    case Format::Text: return "text";
  }
  return "csv";
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::string cell_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  return std::get<std::string>(c);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

nlohmann::json cell_json(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) {
    if (std::isfinite(*d)) return *d;
    return nullptr;
  }
  return std::get<std::string>(c);
}

}  // namespace

nlohmann::json to_json(const Table& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json r = nlohmann::json::object();
    for (std::size_t j = 0; j < table.columns.size() && j < row.size(); ++j) r[table.columns[j]] = cell_json(row[j]);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string render(const Table& table, Format format) {
  std::ostringstream os;
  switch (format) {
    case Format::Csv: {
      for (std::size_t j = 0; j < table.columns.size(); ++j) os << (j ? "," : "") << csv_field(table.columns[j]);
      os << '\n';
      for (const auto& row : table.rows) {
        for (std::size_t j = 0; j < row.size(); ++j) os << (j ? "," : "") << csv_field(cell_text(row[j]));
        os << '\n';
      }
      break;
    }
    case Format::Json: os << to_json(table).dump(2) << '\n'; break;
    case Format::Text: {
      std::vector<std::size_t> width(table.columns.size());
      for (std::size_t j = 0; j < width.size(); ++j) width[j] = table.columns[j].size();
      std::vector<std::vector<std::string>> text;
      for (const auto& row : table.rows) {
        std::vector<std::string> t;
        for (std::size_t j = 0; j < row.size(); ++j) {
          t.push_back(cell_text(row[j]));
          if (j < width.size()) width[j] = std::max(width[j], t.back().size());
        }
        text.push_back(std::move(t));
      }
      auto line = [&](const std::vector<std::string>& cells) {
        std::string out;
        for (std::size_t j = 0; j < cells.size(); ++j) {
          std::string c = cells[j];
          if (j + 1 < cells.size() && j < width.size()) c.resize(width[j], ' ');
          out += (j ? "  " : "") + c;
        }
        os << out << '\n';
      };
      line(table.columns);
      for (const auto& t : text) line(t);
      break;
    }
  }
  return os.str();
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw InvalidInput("cannot write " + tmp.string());
    f << content;
    f.flush();
    if (!f) throw InvalidInput("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw InvalidInput("cannot rename onto " + path + ": " + ec.message());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InvalidInput("cannot read " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

nlohmann::json library_versions() {
  nlohmann::json v;
  v["kkflows"] = KKFLOWS_VERSION;
  v["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
               std::to_string(EIGEN_MINOR_VERSION);
  v["fftw"] = std::string(fftw_version);
  v["gmp"] = gmp_version;
#if defined(__VERSION__)
  v["compiler"] = __VERSION__;
#endif
  return v;
}

nlohmann::json make_manifest(const ManifestInfo& info, const std::string& output_path, const std::string& content) {
  nlohmann::json m;
  m["command"] = info.command;
  m["seed"] = info.seed;
  m["tolerances"] = {{"KKFLOWS_TOL", info.tolerance_override}, {"replay_rtol", info.replay_rtol}};
  m["versions"] = library_versions();
  m["outputs"] = nlohmann::json::array({{{"path", output_path},
                                         {"format", format_name(info.format)},
                                         {"kind", info.symbolic ? "symbolic" : "numeric"},
                                         {"bytes", content.size()},
                                         {"fnv1a64", hex64(fnv1a64(content))}}});
  return m;
}

namespace {

std::vector<std::string> tokens(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(cur);
    cur.clear();
  };
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c)) || std::string_view(",[]{}:\"").find(c) != std::string_view::npos)
      flush();
    else
      cur += c;
  }
  flush();
  return out;
}

bool parse_number(const std::string& t, double& x) {
  char* end = nullptr;
  x = std::strtod(t.c_str(), &end);
  return end == t.c_str() + t.size() && !t.empty();
}

}  // namespace

double compare_numeric_text(const std::string& a, const std::string& b) {
  auto ta = tokens(a), tb = tokens(b);
  if (ta.size() != tb.size()) return std::numeric_limits<double>::infinity();
  double worst = 0;
  for (std::size_t i = 0; i < ta.size(); ++i) {
    if (ta[i] == tb[i]) continue;
    double x, y;
    if (!parse_number(ta[i], x) || !parse_number(tb[i], y)) return std::numeric_limits<double>::infinity();
    if (std::isnan(x) != std::isnan(y)) return std::numeric_limits<double>::infinity();
    if (std::isnan(x)) continue;
    worst = std::max(worst, std::abs(x - y) / std::max(1.0, std::abs(x)));
  }
  return worst;
}

}  // namespace kkflows::cli
