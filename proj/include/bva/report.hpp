#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace bva {

inline constexpr const char* kVersion = "0.1.0";

/// 17 significant digits, round-trips through std::stod.
std::string format_number(double v);

/// Deterministic key=value report with TSV tables. Header: tool, version, command, seed,
/// then the effective configuration as config.<key>=<value>.
class Report {
public:
    Report(std::string command, std::uint64_t seed);

    void config(const std::string& key, const std::string& value);
    void config(const std::string& key, double value) { config(key, format_number(value)); }

    void set(const std::string& key, const std::string& value);
    void set(const std::string& key, const char* value) { set(key, std::string(value)); }
    void set(const std::string& key, double value) { set(key, format_number(value)); }
    void set(const std::string& key, int value) { set(key, std::to_string(value)); }
    void set(const std::string& key, long long value) { set(key, std::to_string(value)); }
    void set(const std::string& key, std::size_t value) { set(key, std::to_string(value)); }
    void set(const std::string& key, bool value) { set(key, std::string(value ? "true" : "false")); }

    void table(const std::string& name, std::vector<std::string> columns, const std::vector<std::vector<double>>& rows);

    std::string str() const;

private:
    std::string command_;
    std::uint64_t seed_;
    std::vector<std::pair<std::string, std::string>> config_, entries_;
    std::vector<std::string> tables_;
};

struct TsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

/// Parses the "[table NAME]" block of a report.
TsvTable parse_table(const std::string& report, const std::string& name);
/// Value of `key=` in a report; empty when absent.
std::string report_value(const std::string& report, const std::string& key);

}  // namespace bva
