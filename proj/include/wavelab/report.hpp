#pragma once

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace wavelab {

/// Floats are serialized everywhere with 12 significant digits so repeated
/// runs produce byte-identical artifacts.
inline std::string format_float(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

/// Round-trip a double through its 12-significant-digit decimal form (for
/// JSON payloads, which store numbers).
inline double round_float(double v) { return std::strtod(format_float(v).c_str(), nullptr); }

/// Minimal fixed-column CSV emitter with stable column order.
class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> columns) : cols_(std::move(columns)) {}

    void add_row(const std::vector<std::string>& cells) {
        if (cells.size() != cols_.size()) throw std::invalid_argument("csv row arity mismatch");
        rows_.push_back(cells);
    }

    std::string str() const {
        std::string out;
        for (size_t i = 0; i < cols_.size(); ++i) out += (i ? "," : "") + cols_[i];
        out += "\n";
        for (const auto& row : rows_) {
            for (size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + row[i];
            out += "\n";
        }
        return out;
    }

    void write(const std::string& path) const {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open " + path);
        f << str();
    }

  private:
    std::vector<std::string> cols_;
    std::vector<std::vector<std::string>> rows_;
};

inline void write_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    f << j.dump(2) << "\n";
}

}  // namespace wavelab
