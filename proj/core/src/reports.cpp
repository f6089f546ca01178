#include "cyl/reports.hpp"

#include <fmt/format.h>

#include <cmath>
#include <cstdlib>
#include <fstream>

#include "cyl/constants.hpp"
#include "cyl/types.hpp"

namespace cyl {

namespace fs = std::filesystem;

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return fmt::format("{:.17g}", x);
}

namespace {

std::string cell_text(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
    if (const auto* i = std::get_if<long>(&c)) return std::to_string(*i);
    const auto& s = std::get<std::string>(c);
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
}

nlohmann::ordered_json cell_json(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) {
        // JSON has no inf/nan; keep them as the CSV spelling.
        if (!std::isfinite(*d)) return format_number(*d);
        return *d;
    }
    if (const auto* i = std::get_if<long>(&c)) return *i;
    return std::get<std::string>(c);
}

void write_text(const fs::path& file, const std::string& text) {
    std::ofstream f(file, std::ios::binary);
    if (!f) throw InvalidParameter("cannot write " + file.string());
    f << text;
}

}  // namespace

void Table::add(std::vector<Cell> row) {
    if (row.size() != columns.size())
        throw InvalidParameter(fmt::format("table {}: row has {} cells, expected {}", name, row.size(), columns.size()));
    rows.push_back(std::move(row));
}

std::string Table::csv() const {
    std::string out;
    for (std::size_t j = 0; j < columns.size(); ++j) out += (j ? "," : "") + columns[j];
    out += '\n';
    for (const auto& r : rows) {
        for (std::size_t j = 0; j < r.size(); ++j) out += (j ? "," : "") + cell_text(r[j]);
        out += '\n';
    }
    return out;
}

nlohmann::ordered_json Table::json() const {
    nlohmann::ordered_json doc;
    doc["table"] = name;
    doc["columns"] = columns;
    auto& rows_json = doc["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        nlohmann::ordered_json o;
        for (std::size_t j = 0; j < r.size(); ++j) o[columns[j]] = cell_json(r[j]);
        rows_json.push_back(std::move(o));
    }
    return doc;
}

void write_table(const Table& t, const fs::path& dir) {
    fs::create_directories(dir);
    write_text(dir / (t.name + ".csv"), t.csv());
    write_text(dir / (t.name + ".json"), t.json().dump(2) + "\n");
}

void write_plot_data(const fs::path& file, const std::vector<double>& x, const std::vector<double>& y,
                     const std::vector<double>& yerr) {
    if (x.size() != y.size() || x.size() != yerr.size()) throw InvalidParameter("plot data: column lengths differ");
    if (file.has_parent_path()) fs::create_directories(file.parent_path());
    std::string out = "# x y yerr\n";
    for (std::size_t i = 0; i < x.size(); ++i)
        out += format_number(x[i]) + " " + format_number(y[i]) + " " + format_number(yerr[i]) + "\n";
    write_text(file, out);
}

Manifest::Manifest(const RunConfig& cfg) {
    doc_["library_version"] = library_version;
    auto& echo = doc_["config"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : cfg.echo()) echo[k] = v;
    const auto& c = constants();
    doc_["constants"] = {{"c4", c.c4}, {"S4", c.S4}, {"Y4", c.Y4}, {"Ys", c.Ys}, {"A", c.A}, {"B", c.B}};
    doc_["stages"] = nlohmann::ordered_json::array();
    doc_["results"] = nlohmann::ordered_json::object();
    doc_["notes"] = nlohmann::ordered_json::object();
}

void Manifest::stage(const std::string& name, double seconds) {
    doc_["stages"].push_back({{"stage", name}, {"seconds", seconds}});
}

void Manifest::result(const std::string& key, double value, double error) {
    doc_["results"][key] = {{"value", value}, {"error", error}};
}

void Manifest::note(const std::string& key, const std::string& text) { doc_["notes"][key] = text; }

void Manifest::write(const fs::path& dir, const std::string& file) const {
    fs::create_directories(dir);
    write_text(dir / file, doc_.dump(2) + "\n");
}

fs::path resolve_out_dir(const std::string& flag, const RunConfig& cfg) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("CYL_OUT_DIR"); env && *env) return env;
    if (!cfg.out_dir.empty()) return cfg.out_dir;
    return "cyl_out";
}

}  // namespace cyl
