#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "resalloc/matrix.hpp"
#include "resalloc/problem.hpp"

namespace resalloc::io {

inline constexpr int kManifestVersion = 1;

// Matrices are row-major little-endian f64, or plain decimal CSV when the
// path ends in ".csv". Binary reads require the declared shape; CSV reads
// check it when given.
Matrix read_matrix(const std::filesystem::path& path, std::size_t rows, std::size_t cols);
Matrix read_matrix_csv(const std::filesystem::path& path);
void write_matrix(const std::filesystem::path& path, const Matrix& matrix);

// Vectors use the same encodings; CSV holds one value per line.
std::vector<double> read_vector(const std::filesystem::path& path,
                                std::optional<std::size_t> size = std::nullopt);
void write_vector(const std::filesystem::path& path, std::span<const double> values);

// JSON manifest:
//   {"format_version": 1, "n": N, "m": M, "matrix_path": "A.f64",
//    "limits": [...], "demands_path": "d.f64",
//    "utility": {"family": "log" | "linear" | "alpha-fair" | "power" |
//                "target-priority", "alpha": a, "rho": r,
//                "weights": w, "targets": t}}
// Relative paths resolve against the manifest's directory. Per-job utility
// parameters may be a scalar (broadcast), an inline array, or a vector file
// path. The loaded problem is validated before it is returned.
Problem load_problem(const std::filesystem::path& manifest_path);

// Writes the matrix (and demands, and target-priority parameters) next to the
// manifest using binary encoding, then the manifest itself.
void save_problem(const std::filesystem::path& manifest_path, const Problem& problem);

}  // namespace resalloc::io
