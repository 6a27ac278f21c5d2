#pragma once

#include <filesystem>
#include <optional>
#include <string_view>

#include "skelgait/skeleton.hpp"

namespace skelgait {

enum class DataFormat { json, csv };

std::optional<DataFormat> parse_data_format(std::string_view text);
/// Picks the format from the file extension (".csv" -> csv, otherwise json).
DataFormat format_from_extension(const std::filesystem::path& path);

/// Loads a dataset. CSV input also reads the sidecar `<path>.meta.csv`.
///
/// Throws IoError if the file cannot be opened, ParseError (naming the line or
/// record) for malformed content and ValidationError for non-finite coordinates
/// or unsupported joint counts.
Dataset load_dataset(const std::filesystem::path& path, DataFormat format);

/// Writes a dataset so that load_dataset reproduces every value bit-exactly.
void save_dataset(const Dataset& ds, const std::filesystem::path& path, DataFormat format);

/// Sidecar metadata path used by the CSV format.
std::filesystem::path csv_metadata_path(const std::filesystem::path& path);

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double value);

}  // namespace skelgait
