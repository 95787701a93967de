#pragma once

#include <filesystem>
#include <string>

#include "topoblend/errors.hpp"
#include "topoblend/pipeline.hpp"

namespace topoblend {

/// Write the grid as little-endian float32 (x-fastest) at `path`, with a JSON
/// sidecar at `path + ".json"` declaring dims, box, dtype and order.
void export_grid(const FilteredGrid& grid, const std::filesystem::path& path);
FilteredGrid import_grid(const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

std::string report_to_json(const BlendReport& report, int indent = 2);

}  // namespace topoblend
