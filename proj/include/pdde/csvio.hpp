#pragma once
#include <string>
#include <vector>

namespace pdde {

/// Shortest round-trippable decimal form (17 significant digits).
std::string fmt17(double v);

/// Table with a header row; every numeric cell rendered via fmt17.
std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows);

/// Writes through a temp file in the target directory plus rename, so a
/// reader never sees a half-written file. Creates parent directories.
void atomic_write(const std::string& path, const std::string& content);

}  // namespace pdde
