// Matrix-set file format:
//
//   NOJD v1 N K
//   K blocks of N lines, 2N floats each (re im re im ..., row major)
//   TRUTH                                (optional)
//   N lines of 2N floats                 (mixing A)
//   K lines of 2N floats                 (diagonals d_k)
//
// Values are written with 17 significant digits so doubles round-trip.
#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "nojd/embedding.hpp"

namespace nojd {

namespace detail {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void append_double(std::string& line, double v) {
    if (!line.empty()) line.push_back(' ');
    line += format_double(v);
}

class TokenReader {
  public:
    explicit TokenReader(std::istream& in) : in_(in) {}

    bool next_line() {
        while (std::getline(in_, line_)) {
            ++line_no_;
            if (line_.find_first_not_of(" \t\r") != std::string::npos) return true;
        }
        return false;
    }

    // Peeks the current line with surrounding whitespace stripped.
    std::string trimmed() const {
        auto b = line_.find_first_not_of(" \t\r");
        auto e = line_.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : line_.substr(b, e - b + 1);
    }

    std::vector<double> numbers(size_t expected) {
        std::vector<double> out;
        out.reserve(expected);
        const char* begin = line_.data();
        const char* end = begin + line_.size();
        const char* p = begin;
        while (p < end) {
            while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
            if (p >= end) break;
            double v = 0;
            auto [next, ec] = std::from_chars(p, end, v);
            if (ec != std::errc())
                fail("malformed number");
            out.push_back(v);
            p = next;
        }
        if (out.size() != expected)
            fail("expected " + std::to_string(expected) + " values, got " + std::to_string(out.size()));
        return out;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw std::runtime_error("matrix set parse error at line " + std::to_string(line_no_) +
                                 ": " + what);
    }

  private:
    std::istream& in_;
    std::string line_;
    int line_no_ = 0;
};

inline MatC read_complex_rows(TokenReader& rd, int rows, int cols) {
    MatC m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        if (!rd.next_line()) rd.fail("unexpected end of file in matrix block");
        auto vals = rd.numbers(2 * static_cast<size_t>(cols));
        for (int c = 0; c < cols; ++c) m(r, c) = Cx(vals[2 * c], vals[2 * c + 1]);
    }
    return m;
}

}  // namespace detail

inline void write_matrix_set(std::ostream& out, const TargetSet& set) {
    set.validate();
    out << "NOJD v1 " << set.n << ' ' << set.k << '\n';
    auto emit = [&out](const MatC& m) {
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            std::string line;
            for (Eigen::Index c = 0; c < m.cols(); ++c) {
                detail::append_double(line, m(r, c).real());
                detail::append_double(line, m(r, c).imag());
            }
            out << line << '\n';
        }
    };
    for (const auto& m : set.matrices) emit(m);
    if (set.truth) {
        out << "TRUTH\n";
        emit(set.truth->mixing);
        for (const auto& d : set.truth->diagonals) emit(MatC(d.transpose()));
    }
}

inline void write_matrix_set(const std::string& path, const TargetSet& set) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    write_matrix_set(out, set);
    if (!out.good()) throw std::runtime_error("write failed: " + path);
}

inline TargetSet read_matrix_set(std::istream& in) {
    detail::TokenReader rd(in);
    if (!rd.next_line()) rd.fail("empty file");
    std::istringstream header(rd.trimmed());
    std::string magic, version;
    int n = 0, k = 0;
    header >> magic >> version >> n >> k;
    if (magic != "NOJD" || version != "v1" || header.fail())
        rd.fail("bad header, expected 'NOJD v1 N K'");
    if (n < 2 || k < 1) rd.fail("bad dimensions in header");

    TargetSet set;
    set.n = n;
    set.k = k;
    for (int i = 0; i < k; ++i) set.matrices.push_back(detail::read_complex_rows(rd, n, n));
    if (rd.next_line()) {
        if (rd.trimmed() != "TRUTH") rd.fail("expected TRUTH section or end of file");
        MixingTruth truth;
        truth.mixing = detail::read_complex_rows(rd, n, n);
        for (int i = 0; i < k; ++i) {
            MatC row = detail::read_complex_rows(rd, 1, n);
            truth.diagonals.push_back(row.row(0).transpose());
        }
        set.truth = std::move(truth);
    }
    set.validate();
    return set;
}

inline TargetSet read_matrix_set(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_matrix_set(in);
}

}  // namespace nojd
