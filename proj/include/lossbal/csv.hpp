#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lossbal {

/// Shortest round-trip decimal form, independent of the C locale.
std::string format_double(double v);

/// Minimal CSV writer: comma-separated, '\n' line endings, no quoting.
class CsvWriter {
  public:
    explicit CsvWriter(const std::filesystem::path& path);
    void header(const std::vector<std::string>& columns);
    CsvWriter& cell(double v);
    CsvWriter& cell(std::optional<double> v);
    CsvWriter& cell(long long v);
    CsvWriter& cell(std::string_view v);
    void end_row();
    void close();

  private:
    void sep();
    std::ofstream out_;
    std::string row_;
    bool first_ = true;
};

}  // namespace lossbal
