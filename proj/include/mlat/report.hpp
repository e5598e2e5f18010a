#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

namespace mlat {

/// Shortest decimal string that parses back to exactly `v`.
std::string format_number(double v);

/// CSV table with a fixed header. Cells are stored preformatted.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string render() const;
};

/// Ordered "key: value" report plus the CSV tables produced by a command.
/// The body contains nothing that varies between runs (no timings, paths
/// of temporary files or host names).
class Report {
public:
    void add(std::string key, std::string value);
    void add(std::string key, double value) { add(std::move(key), format_number(value)); }
    void add(std::string key, bool value) { add(std::move(key), std::string(value ? "true" : "false")); }
    void add(std::string key, const char* value) { add(std::move(key), std::string(value)); }
    template <class Int>
        requires std::is_integral_v<Int>
    void add(std::string key, Int value) {
        add(std::move(key), std::to_string(value));
    }

    void set_table(std::string name, CsvTable table);

    const std::vector<std::pair<std::string, std::string>>& entries() const noexcept { return entries_; }
    const std::vector<std::pair<std::string, CsvTable>>& tables() const noexcept { return tables_; }
    const CsvTable* table(std::string_view name) const;
    /// First value stored under `key`, empty if absent.
    std::string value(std::string_view key) const;

    std::string render() const;

    /// Writes report.txt and <name>.csv for every table into `dir`.
    void write(const std::filesystem::path& dir) const;

private:
    std::vector<std::pair<std::string, std::string>> entries_;
    std::vector<std::pair<std::string, CsvTable>> tables_;
};

}  // namespace mlat
