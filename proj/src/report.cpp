#include "bva/report.hpp"

#include "bva/error.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace bva {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Report::Report(std::string command, std::uint64_t seed) : command_(std::move(command)), seed_(seed) {}

void Report::config(const std::string& key, const std::string& value) { config_.emplace_back(key, value); }

void Report::set(const std::string& key, const std::string& value) { entries_.emplace_back(key, value); }

void Report::table(const std::string& name, std::vector<std::string> columns,
                   const std::vector<std::vector<double>>& rows) {
    std::ostringstream s;
    s << "[table " << name << "]\n";
    for (std::size_t i = 0; i < columns.size(); ++i) s << (i ? "\t" : "") << columns[i];
    s << '\n';
    for (const auto& r : rows) {
        if (r.size() != columns.size()) throw DimensionError("table row width does not match columns");
        for (std::size_t i = 0; i < r.size(); ++i) s << (i ? "\t" : "") << format_number(r[i]);
        s << '\n';
    }
    s << "[end]\n";
    tables_.push_back(s.str());
}

std::string Report::str() const {
    std::ostringstream s;
    s << "tool=bva\nversion=" << kVersion << "\ncommand=" << command_ << "\nseed=" << seed_ << '\n';
    for (const auto& [k, v] : config_) s << "config." << k << '=' << v << '\n';
    for (const auto& [k, v] : entries_) s << k << '=' << v << '\n';
    for (const auto& t : tables_) s << t;
    return s.str();
}

TsvTable parse_table(const std::string& report, const std::string& name) {
    std::istringstream in(report);
    std::string line;
    const std::string head = "[table " + name + "]";
    while (std::getline(in, line))
        if (line == head) break;
    if (line != head) throw ParseError("no table '" + name + "' in report");
    TsvTable t;
    if (!std::getline(in, line)) throw ParseError("table '" + name + "' has no header");
    {
        std::istringstream cols(line);
        std::string c;
        while (std::getline(cols, c, '\t')) t.columns.push_back(c);
    }
    while (std::getline(in, line) && line != "[end]") {
        std::istringstream cells(line);
        std::string c;
        std::vector<double> row;
        while (std::getline(cells, c, '\t')) row.push_back(std::stod(c));
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::string report_value(const std::string& report, const std::string& key) {
    std::istringstream in(report);
    std::string line;
    const std::string prefix = key + "=";
    while (std::getline(in, line))
        if (line.rfind(prefix, 0) == 0) return line.substr(prefix.size());
    return {};
}

}  // namespace bva
