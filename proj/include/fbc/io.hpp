#pragma once
#include <cstdint>
#include <fstream>
#include <map>
#include <string>
#include <vector>

namespace fbc {

uint64_t fnv1a64(const void* data, size_t len);
uint64_t fnv1a64(const std::string& s);

// shortest round-trip decimal for a double (printf %.17g)
std::string format_g17(double v);

// CSV with a leading schema comment row ("# schema: name vN"), then the
// header; numeric cells rendered with format_g17, LF endings. Byte-stable
// for identical inputs, which the determinism contract leans on.
class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::string& schema_name, int schema_version,
              const std::vector<std::string>& columns);
    ~CsvWriter();

    void row(const std::vector<double>& values);
    void row_cells(const std::vector<std::string>& cells);
    void close();
    const std::string& path() const { return path_; }

  private:
    std::string path_;
    std::ofstream out_;
    size_t n_cols_ = 0;
};

// Run-level provenance. Everything except the timing block is a pure
// function of the inputs, so re-runs compare equal after stripping it.
struct RunManifest {
    std::string subcommand;
    uint64_t config_hash = 0;
    uint64_t base_seed = 0;
    int threads = 0;
    std::map<std::string, std::string> parameters;
    std::map<std::string, std::string> module_versions;
    std::vector<std::string> outputs;
    double wall_seconds = 0.0;

    std::string to_json() const;
    void write(const std::string& path) const;
};

// minimal line plot: one polyline per series over shared x, log axes on
// request, ticks and labels kept deliberately plain
void write_svg_lines(const std::string& path, const std::string& title,
                     const std::vector<double>& xs,
                     const std::vector<std::vector<double>>& series,
                     const std::vector<std::string>& labels, bool log_x = false,
                     bool log_y = false);

} // namespace fbc
