#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "cyl/config.hpp"

namespace cyl {

inline constexpr const char* library_version = "0.1.0";

using Cell = std::variant<double, long, std::string>;

// Fixed-format table: doubles print with 17 significant digits and '.' decimal.
struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row);
    std::string csv() const;
    nlohmann::ordered_json json() const;
};

std::string format_number(double x);

// Writes <dir>/<name>.csv and <dir>/<name>.json.
void write_table(const Table& t, const std::filesystem::path& dir);

// Whitespace-separated x y yerr columns for external plotting.
void write_plot_data(const std::filesystem::path& file, const std::vector<double>& x, const std::vector<double>& y,
                     const std::vector<double>& yerr);

class Manifest {
public:
    explicit Manifest(const RunConfig& cfg);
    void stage(const std::string& name, double seconds);
    // A persisted number with its error estimate.
    void result(const std::string& key, double value, double error);
    void note(const std::string& key, const std::string& text);
    nlohmann::ordered_json json() const { return doc_; }
    void write(const std::filesystem::path& dir, const std::string& file = "manifest.json") const;

private:
    nlohmann::ordered_json doc_;
};

// --out, then CYL_OUT_DIR, then the config's out_dir, then "cyl_out".
std::filesystem::path resolve_out_dir(const std::string& flag, const RunConfig& cfg);

}  // namespace cyl
