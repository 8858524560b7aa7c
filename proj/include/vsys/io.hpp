// io.hpp — CSV emission with round-trip-exact numbers and '#' metadata headers

#pragma once

#include <charconv>
#include <cmath>
#include <ostream>
#include <string>
#include <system_error>
#include <vector>

#include "vsys/core.hpp"
#include "vsys/version.hpp"

namespace vsys {

// Shortest decimal representation that parses back to the same double.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

struct CsvMetadata {
    std::vector<std::pair<std::string, std::string>> entries;

    void add(const std::string& key, const std::string& value) { entries.emplace_back(key, value); }
    void add(const std::string& key, double value) { entries.emplace_back(key, format_double(value)); }

    void add_params(const VParams& p) {
        add("gamma", p.gamma);
        add("delta", p.delta);
        add("p", p.p);
        add("nbar", p.nbar);
    }
};

inline void write_csv_header(std::ostream& os, const CsvMetadata& meta,
                             const std::vector<std::string>& columns) {
    os << "# version = vsys " << version_string << "\n";
    for (const auto& [key, value] : meta.entries) os << "# " << key << " = " << value << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i)
        os << columns[i] << (i + 1 < columns.size() ? "," : "\n");
}

inline void write_csv_row(std::ostream& os, const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i)
        os << format_double(values[i]) << (i + 1 < values.size() ? "," : "\n");
}

} // namespace vsys
