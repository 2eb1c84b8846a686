#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>

#include "dt/errors.hpp"
#include "dt/grid.hpp"

// GRD1: a plain-text raster format.
//   line 1:  GRD1
//   line 2:  kind=<cloudmask|precip|population|targetmask>
//   line 3:  width=<int> height=<int> res_km=<float>
//   then height rows of width space-separated values, row 0 first.
// Values are written with the shortest digits that round-trip exactly.

namespace dt {

namespace detail {

inline std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double_token(std::string_view tok, int line, int offset) {
    double v = 0.0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
        throw FormatError("malformed numeric value '" + std::string(tok) + "'", line, offset);
    return v;
}

inline long long parse_int_token(std::string_view tok, int line, int offset) {
    long long v = 0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
        throw FormatError("malformed integer value '" + std::string(tok) + "'", line, offset);
    return v;
}

}  // namespace detail

inline std::string write_grd1(const EnvGrid& g) {
    g.validate();
    std::string out;
    out.reserve(g.cell_count() * 4 + 64);
    out += "GRD1\n";
    out += "kind=";
    out += kind_name(g.kind);
    out += '\n';
    out += "width=" + std::to_string(g.width) + " height=" + std::to_string(g.height) +
           " res_km=" + detail::format_double(g.resolution_km) + '\n';
    for (int r = 0; r < g.height; ++r) {
        for (int c = 0; c < g.width; ++c) {
            if (c) out += ' ';
            out += detail::format_double(g.at(c, r));
        }
        out += '\n';
    }
    return out;
}

inline EnvGrid parse_grd1(std::string_view text) {
    int line_no = 0;
    std::size_t pos = 0;
    auto next_line = [&](bool required) -> std::string_view {
        if (pos >= text.size()) {
            if (required) throw FormatError("unexpected end of file", line_no + 1, 0);
            return {};
        }
        std::size_t eol = text.find('\n', pos);
        std::string_view ln;
        if (eol == std::string_view::npos) {
            ln = text.substr(pos);
            pos = text.size();
        } else {
            ln = text.substr(pos, eol - pos);
            pos = eol + 1;
        }
        ++line_no;
        if (!ln.empty() && ln.back() == '\r') ln.remove_suffix(1);
        return ln;
    };

    if (next_line(true) != "GRD1") throw FormatError("missing GRD1 magic line", 1, 0);

    std::string_view kind_line = next_line(true);
    if (kind_line.substr(0, 5) != "kind=")
        throw FormatError("expected kind=<...>", line_no, 0);
    std::string_view kind_tok = kind_line.substr(5);
    GridKind kind;
    if (kind_tok == "cloudmask") kind = GridKind::CloudMask;
    else if (kind_tok == "precip") kind = GridKind::Precip;
    else if (kind_tok == "population") kind = GridKind::Population;
    else if (kind_tok == "targetmask") kind = GridKind::TargetMask;
    else throw FormatError("unknown grid kind '" + std::string(kind_tok) + "'", line_no, 5);

    std::string_view dim_line = next_line(true);
    long long width = 0, height = 0;
    double res_km = 0.0;
    {
        std::size_t p = 0;
        auto take = [&](std::string_view key) -> std::string_view {
            if (dim_line.substr(p, key.size()) != key)
                throw FormatError("expected '" + std::string(key) + "'", line_no, int(p));
            p += key.size();
            std::size_t sp = dim_line.find(' ', p);
            std::string_view tok = (sp == std::string_view::npos) ? dim_line.substr(p)
                                                                  : dim_line.substr(p, sp - p);
            p = (sp == std::string_view::npos) ? dim_line.size() : sp + 1;
            return tok;
        };
        std::string_view wt = take("width=");
        width = detail::parse_int_token(wt, line_no, 6);
        std::string_view ht = take("height=");
        height = detail::parse_int_token(ht, line_no, 0);
        std::string_view rt = take("res_km=");
        res_km = detail::parse_double_token(rt, line_no, 0);
        if (p < dim_line.size())
            throw FormatError("trailing content on dimension line", line_no, int(p));
    }
    if (width <= 0 || height <= 0)
        throw FormatError("grid dimensions must be positive", line_no, 0);
    if (width > (1 << 20) || height > (1 << 20) || width * height > (1LL << 28))
        throw FormatError("grid dimensions unreasonably large", line_no, 0);
    if (!(res_km > 0.0))
        throw FormatError("grid resolution must be positive", line_no, 0);

    EnvGrid g = make_grid(int(width), int(height), res_km, kind);
    for (int r = 0; r < g.height; ++r) {
        std::string_view row = next_line(true);
        std::size_t p = 0;
        for (int c = 0; c < g.width; ++c) {
            while (p < row.size() && row[p] == ' ') ++p;
            std::size_t start = p;
            while (p < row.size() && row[p] != ' ') ++p;
            if (start == p)
                throw FormatError("row " + std::to_string(r) + " has only " + std::to_string(c) +
                                      " of " + std::to_string(g.width) + " values",
                                  line_no, int(start));
            double v = detail::parse_double_token(row.substr(start, p - start), line_no, int(start));
            if (!(v >= 0.0) || !std::isfinite(v))
                throw FormatError("negative or non-finite value", line_no, int(start));
            if (is_binary_kind(kind) && v != 0.0 && v != 1.0)
                throw FormatError("non-binary value in " + std::string(kind_name(kind)) + " grid",
                                  line_no, int(start));
            g.at(c, r) = v;
        }
        while (p < row.size() && row[p] == ' ') ++p;
        if (p != row.size())
            throw FormatError("row " + std::to_string(r) + " has more than " +
                                  std::to_string(g.width) + " values",
                              line_no, int(p));
    }
    std::string_view tail = next_line(false);
    if (!tail.empty())
        throw FormatError("trailing content after grid rows", line_no, 0);
    return g;
}

inline void save_grid(const EnvGrid& g, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    std::string text = write_grd1(g);
    out.write(text.data(), std::streamsize(text.size()));
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline EnvGrid load_grid(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_grd1(ss.str());
}

}  // namespace dt
