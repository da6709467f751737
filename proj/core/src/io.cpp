#include "resalloc/io.hpp"

#include <bit>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <nlohmann/json.hpp>
#include <sstream>

#include "resalloc/errors.hpp"

namespace resalloc::io {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

[[noreturn]] void parse_error(const fs::path& path, const std::string& what) {
  throw Error(ErrorCode::kParseError, path.string() + ": " + what);
}

bool is_csv(const fs::path& path) { return path.extension() == ".csv"; }

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

File open_file(const fs::path& path, const char* mode) {
  File file(std::fopen(path.c_str(), mode));
  if (!file) {
    throw Error(ErrorCode::kIoError, "cannot open " + path.string() + ": " + std::strerror(errno));
  }
  return file;
}

void swap_if_big_endian(std::span<double> values) {
  if constexpr (std::endian::native == std::endian::big) {
    for (double& v : values) {
      auto bits = std::bit_cast<std::uint64_t>(v);
      bits = __builtin_bswap64(bits);
      v = std::bit_cast<double>(bits);
    }
  }
}

std::vector<double> read_binary(const fs::path& path, std::size_t expected) {
  std::error_code ec;
  const auto bytes = fs::file_size(path, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot stat " + path.string() + ": " + ec.message());
  if (bytes != expected * sizeof(double)) {
    parse_error(path, "expected " + std::to_string(expected * sizeof(double)) + " bytes, found " +
                          std::to_string(bytes));
  }
  std::vector<double> values(expected);
  auto file = open_file(path, "rb");
  if (std::fread(values.data(), sizeof(double), expected, file.get()) != expected) {
    throw Error(ErrorCode::kIoError, "short read from " + path.string());
  }
  swap_if_big_endian(values);
  return values;
}

void write_binary(const fs::path& path, std::span<const double> values) {
  auto file = open_file(path, "wb");
  if constexpr (std::endian::native == std::endian::big) {
    std::vector<double> copy(values.begin(), values.end());
    swap_if_big_endian(copy);
    if (std::fwrite(copy.data(), sizeof(double), copy.size(), file.get()) != copy.size()) {
      throw Error(ErrorCode::kIoError, "short write to " + path.string());
    }
    return;
  }
  if (std::fwrite(values.data(), sizeof(double), values.size(), file.get()) != values.size()) {
    throw Error(ErrorCode::kIoError, "short write to " + path.string());
  }
}

double parse_number(const fs::path& path, std::string_view field, std::size_t line) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
    field.remove_suffix(1);
  }
  double value = 0.0;
  const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || end != field.data() + field.size()) {
    parse_error(path, "line " + std::to_string(line) + ": invalid number '" + std::string(field) +
                          "'");
  }
  return value;
}

// Rows of comma-separated numbers; blank lines are skipped.
std::vector<std::vector<double>> read_csv_rows(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      row.push_back(parse_number(path, rest.substr(0, comma), line_no));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_csv_value(std::FILE* f, double v) {
  char buffer[32];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), v);
  std::fwrite(buffer, 1, static_cast<std::size_t>(end - buffer), f);
}

fs::path resolve(const fs::path& base, const std::string& relative) {
  const fs::path p(relative);
  return p.is_absolute() ? p : base / p;
}

template <typename T>
T require(const json& obj, const char* key, const fs::path& path) {
  if (!obj.contains(key)) parse_error(path, std::string("missing key '") + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    parse_error(path, std::string("bad value for '") + key + "': " + e.what());
  }
}

std::vector<double> per_job_values(const json& node, const char* key, std::size_t n,
                                   const fs::path& base, const fs::path& manifest) {
  if (!node.contains(key)) parse_error(manifest, std::string("utility is missing '") + key + "'");
  const json& value = node.at(key);
  if (value.is_number()) return std::vector<double>(n, value.get<double>());
  if (value.is_string()) return read_vector(resolve(base, value.get<std::string>()), n);
  if (value.is_array()) {
    auto out = require<std::vector<double>>(node, key, manifest);
    if (out.size() != n) {
      throw Error(ErrorCode::kDimensionMismatch,
                  std::string(key) + " has " + std::to_string(out.size()) + " entries, expected " +
                      std::to_string(n));
    }
    return out;
  }
  parse_error(manifest, std::string("utility '") + key + "' must be a number, array or path");
}

UtilitySpec parse_utility(const json& node, std::size_t n, const fs::path& base,
                          const fs::path& manifest) {
  if (!node.is_object()) parse_error(manifest, "'utility' must be an object");
  const auto name = require<std::string>(node, "family", manifest);
  const auto family = parse_family(name);
  if (!family) throw Error(ErrorCode::kUnsupportedFamily, "unknown utility family '" + name + "'");
  switch (*family) {
    case UtilityFamily::kLinear: return UtilitySpec::linear();
    case UtilityFamily::kLog: return UtilitySpec::log();
    case UtilityFamily::kAlphaFair:
      return UtilitySpec::alpha_fair(require<double>(node, "alpha", manifest));
    case UtilityFamily::kPower: return UtilitySpec::power(require<double>(node, "rho", manifest));
    case UtilityFamily::kTargetPriority:
      return UtilitySpec::target_priority(per_job_values(node, "weights", n, base, manifest),
                                          per_job_values(node, "targets", n, base, manifest));
  }
  throw Error(ErrorCode::kUnsupportedFamily, "unknown utility family '" + name + "'");
}

}  // namespace

Matrix read_matrix(const fs::path& path, std::size_t rows, std::size_t cols) {
  if (is_csv(path)) {
    Matrix m = read_matrix_csv(path);
    if (m.rows() != rows || m.cols() != cols) {
      parse_error(path, "expected " + std::to_string(rows) + "x" + std::to_string(cols) +
                            " values, found " + std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()));
    }
    return m;
  }
  return Matrix(rows, cols, read_binary(path, rows * cols));
}

Matrix read_matrix_csv(const fs::path& path) {
  const auto rows = read_csv_rows(path);
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  std::vector<double> data;
  data.reserve(rows.size() * cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) {
      parse_error(path, "row " + std::to_string(i + 1) + " has " +
                            std::to_string(rows[i].size()) + " columns, expected " +
                            std::to_string(cols));
    }
    data.insert(data.end(), rows[i].begin(), rows[i].end());
  }
  return Matrix(rows.size(), cols, std::move(data));
}

void write_matrix(const fs::path& path, const Matrix& matrix) {
  if (!is_csv(path)) {
    write_binary(path, matrix.data());
    return;
  }
  auto file = open_file(path, "w");
  for (std::size_t i = 0; i < matrix.rows(); ++i) {
    const auto row = matrix.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j > 0) std::fputc(',', file.get());
      write_csv_value(file.get(), row[j]);
    }
    std::fputc('\n', file.get());
  }
}

std::vector<double> read_vector(const fs::path& path, std::optional<std::size_t> size) {
  if (!is_csv(path)) {
    if (!size) {
      std::error_code ec;
      const auto bytes = fs::file_size(path, ec);
      if (ec) throw Error(ErrorCode::kIoError, "cannot stat " + path.string());
      if (bytes % sizeof(double) != 0) parse_error(path, "length is not a multiple of 8 bytes");
      size = bytes / sizeof(double);
    }
    return read_binary(path, *size);
  }
  std::vector<double> out;
  for (const auto& row : read_csv_rows(path)) out.insert(out.end(), row.begin(), row.end());
  if (size && out.size() != *size) {
    parse_error(path, "expected " + std::to_string(*size) + " values, found " +
                          std::to_string(out.size()));
  }
  return out;
}

void write_vector(const fs::path& path, std::span<const double> values) {
  if (!is_csv(path)) {
    write_binary(path, values);
    return;
  }
  auto file = open_file(path, "w");
  for (double v : values) {
    write_csv_value(file.get(), v);
    std::fputc('\n', file.get());
  }
}

Problem load_problem(const fs::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + manifest_path.string());
  json manifest;
  try {
    manifest = json::parse(in);
  } catch (const json::exception& e) {
    parse_error(manifest_path, e.what());
  }
  if (!manifest.is_object()) parse_error(manifest_path, "manifest must be a JSON object");
  const int version = require<int>(manifest, "format_version", manifest_path);
  if (version != kManifestVersion) {
    parse_error(manifest_path, "unsupported format_version " + std::to_string(version));
  }
  const auto n = require<std::size_t>(manifest, "n", manifest_path);
  const auto m = require<std::size_t>(manifest, "m", manifest_path);
  const fs::path base = manifest_path.parent_path();

  Problem problem;
  problem.efficiency =
      read_matrix(resolve(base, require<std::string>(manifest, "matrix_path", manifest_path)), n, m);
  problem.limits = require<std::vector<double>>(manifest, "limits", manifest_path);
  if (manifest.contains("demands_path") && !manifest.at("demands_path").is_null()) {
    problem.demands = read_vector(
        resolve(base, require<std::string>(manifest, "demands_path", manifest_path)), n);
  }
  if (!manifest.contains("utility")) parse_error(manifest_path, "missing key 'utility'");
  problem.utility = parse_utility(manifest.at("utility"), n, base, manifest_path);
  validate(problem);
  return problem;
}

void save_problem(const fs::path& manifest_path, const Problem& problem) {
  const fs::path base = manifest_path.parent_path();
  const std::string stem = manifest_path.stem().string();
  if (!base.empty()) fs::create_directories(base);

  json manifest;
  manifest["format_version"] = kManifestVersion;
  manifest["n"] = problem.num_jobs();
  manifest["m"] = problem.num_resources();
  const std::string matrix_name = stem + ".efficiency.f64";
  write_matrix(base / matrix_name, problem.efficiency);
  manifest["matrix_path"] = matrix_name;
  manifest["limits"] = problem.limits;
  if (!problem.demands.empty()) {
    const std::string name = stem + ".demands.f64";
    write_vector(base / name, problem.demands);
    manifest["demands_path"] = name;
  }

  const UtilitySpec& u = problem.utility;
  json utility;
  utility["family"] = std::string(to_string(u.family));
  switch (u.family) {
    case UtilityFamily::kAlphaFair: utility["alpha"] = u.alpha; break;
    case UtilityFamily::kPower: utility["rho"] = u.rho; break;
    case UtilityFamily::kTargetPriority: {
      const std::string weights = stem + ".weights.f64";
      const std::string targets = stem + ".targets.f64";
      write_vector(base / weights, u.weights);
      write_vector(base / targets, u.targets);
      utility["weights"] = weights;
      utility["targets"] = targets;
      break;
    }
    default: break;
  }
  manifest["utility"] = utility;

  std::ofstream out(manifest_path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + manifest_path.string());
  out << manifest.dump(2) << '\n';
}

}  // namespace resalloc::io
