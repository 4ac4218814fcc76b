#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "ddlqr/data.hpp"

namespace ddlqr::io {

// Dataset CSV: a header line naming each block (u0, x0, x1 and optionally d0)
// followed by that matrix's rows, comma separated, one line per row. Values
// use the shortest round-trip decimal form so that reading back is bit-exact.
std::string dataset_to_csv(const Dataset& ds);
Dataset dataset_from_csv(std::string_view text);

// JSON sidecar with n, m, T, seed and the generating noise specs.
std::string dataset_sidecar(const Dataset& ds);

/// Path of the sidecar belonging to a dataset CSV (same stem, .json).
std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

void write_dataset(const Dataset& ds, const std::filesystem::path& csv_path);

/// Reads the CSV and, when present, the sidecar (dimensions are cross-checked
/// and the origin record restored). Throws InvalidInput on malformed files.
Dataset read_dataset(const std::filesystem::path& csv_path);

std::string format_double(double v);
double parse_double(std::string_view s);

std::string_view to_string(NoiseKind k);
NoiseKind parse_noise_kind(std::string_view s);

}  // namespace ddlqr::io
