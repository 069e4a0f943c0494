#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace growthlab {

struct CsvError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// 12 significant digits, enough to reconstruct plots bit-stably without
// dragging in denormal noise.
inline std::string format_number(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

inline std::string format_flag(bool b) { return b ? "1" : "0"; }

// In-memory columnar table; all experiment outputs pass through here so
// that column selection and checksumming are uniform.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row) {
        if (row.size() != columns.size())
            throw CsvError("table row width does not match header");
        rows.push_back(std::move(row));
    }
};

// Renders the table to CSV text, optionally restricted to a column subset
// in the requested order. Unknown column names are an error.
inline std::string render_csv(const Table& t, const std::vector<std::string>& selected = {}) {
    std::vector<size_t> idx;
    if (selected.empty()) {
        for (size_t i = 0; i < t.columns.size(); ++i) idx.push_back(i);
    } else {
        for (const std::string& name : selected) {
            size_t found = t.columns.size();
            for (size_t i = 0; i < t.columns.size(); ++i)
                if (t.columns[i] == name) {
                    found = i;
                    break;
                }
            if (found == t.columns.size())
                throw CsvError("unknown column '" + name + "'");
            idx.push_back(found);
        }
    }
    std::string out;
    for (size_t k = 0; k < idx.size(); ++k) {
        if (k) out += ',';
        out += t.columns[idx[k]];
    }
    out += '\n';
    for (const auto& row : t.rows) {
        for (size_t k = 0; k < idx.size(); ++k) {
            if (k) out += ',';
            out += row[idx[k]];
        }
        out += '\n';
    }
    return out;
}

// FNV-1a 64-bit, the manifest checksum. Stable, dependency-free, and
// plenty for detecting artifact drift between runs.
inline std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string checksum_hex(const std::string& data) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", (unsigned long long)fnv1a64(data));
    return buf;
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f << content;
    if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

} // namespace growthlab
