#include "mlat/report.hpp"

#include <array>
#include <charconv>
#include <fstream>

#include "mlat/errors.hpp"

namespace mlat {

std::string format_number(double v) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    std::string s(buf.data(), res.ptr);
    if (s == "-0") s = "0";
    return s;
}

std::string CsvTable::render() const {
    std::string out;
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t k = 0; k < cells.size(); ++k) {
            if (k) out += ',';
            out += cells[k];
        }
        out += '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out;
}

void Report::add(std::string key, std::string value) { entries_.emplace_back(std::move(key), std::move(value)); }

void Report::set_table(std::string name, CsvTable table) {
    for (auto& [n, t] : tables_) {
        if (n == name) {
            t = std::move(table);
            return;
        }
    }
    tables_.emplace_back(std::move(name), std::move(table));
}

const CsvTable* Report::table(std::string_view name) const {
    for (const auto& [n, t] : tables_) {
        if (n == name) return &t;
    }
    return nullptr;
}

std::string Report::value(std::string_view key) const {
    for (const auto& [k, v] : entries_) {
        if (k == key) return v;
    }
    return {};
}

std::string Report::render() const {
    std::string out;
    for (const auto& [k, v] : entries_) out += k + ": " + v + "\n";
    return out;
}

void Report::write(const std::filesystem::path& dir) const {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::ValidationError, "cannot create output directory " + dir.string());
    auto put = [](const std::filesystem::path& p, const std::string& body) {
        std::ofstream out(p, std::ios::binary);
        if (!out) throw Error(ErrorKind::ValidationError, "cannot write " + p.string());
        out << body;
    };
    put(dir / "report.txt", render());
    for (const auto& [name, t] : tables_) put(dir / (name + ".csv"), t.render());
}

}  // namespace mlat
