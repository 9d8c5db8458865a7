#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mfbm {

/// Shortest round-trippable decimal form of a double ("%.17g"), used for all
/// numeric file output so that runs are byte-comparable.
inline std::string fmt_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

/// Tiny deterministic CSV writer: fixed header, '\n' line endings, all
/// doubles through fmt_g17.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_(path) {
        if (!out_)
            throw std::runtime_error("cannot open output file: " + path);
        cols_ = header.size();
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (i)
                out_ << ',';
            out_ << header[i];
        }
        out_ << '\n';
    }

    void row(const std::vector<std::string>& cells) {
        if (cells.size() != cols_)
            throw std::invalid_argument("CsvWriter: wrong number of cells");
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i)
                out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

    void row(const std::vector<double>& cells) {
        std::vector<std::string> s;
        s.reserve(cells.size());
        for (double v : cells)
            s.push_back(fmt_g17(v));
        row(s);
    }

private:
    std::ofstream out_;
    std::size_t cols_;
};

} // namespace mfbm
