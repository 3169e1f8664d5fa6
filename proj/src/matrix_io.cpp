#include "rsvd/matrix_io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cerrno>
#include <climits>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <vector>

#include "rsvd/errors.hpp"

namespace rsvd {
namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path, 0);
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
}

struct Cursor {
    const char* begin;
    const char* p;
    const char* end;
    explicit Cursor(const std::string& buf)
        : begin(buf.data()), p(buf.data()), end(buf.data() + buf.size()) {}
    std::size_t off() const { return std::size_t(p - begin); }
};

// ---- Matrix Market array ----

void mm_skip(Cursor& c) {
    for (;;) {
        while (c.p < c.end && std::isspace(static_cast<unsigned char>(*c.p)))
            ++c.p;
        if (c.p < c.end && *c.p == '%') {
            while (c.p < c.end && *c.p != '\n') ++c.p;
            continue;
        }
        return;
    }
}

double mm_double(Cursor& c) {
    mm_skip(c);
    if (c.p >= c.end)
        throw FormatError("unexpected end of file in matrix entries", c.off());
    char* e = nullptr;
    errno = 0;
    // The backing string is NUL terminated, so strtod stops at the buffer end.
    double v = std::strtod(c.p, &e);
    if (e == c.p) throw FormatError("expected a real number", c.off());
    if (errno == ERANGE) throw FormatError("number out of range", c.off());
    c.p = e;
    return v;
}

long long mm_dim(Cursor& c, const char* what) {
    mm_skip(c);
    const std::size_t at = c.off();
    if (c.p >= c.end)
        throw FormatError(std::string("missing ") + what, at);
    char* e = nullptr;
    errno = 0;
    long long v = std::strtoll(c.p, &e, 10);
    if (e == c.p) throw FormatError(std::string("expected ") + what, at);
    if (errno == ERANGE || v < 0 || v > INT_MAX)
        throw FormatError(std::string("dimension overflow in ") + what, at);
    c.p = e;
    return v;
}

DenseMatrix load_mm(const std::string& buf) {
    Cursor c(buf);
    static const char kBanner[] = "%%MatrixMarket";
    const std::size_t blen = sizeof(kBanner) - 1;
    if (std::size_t(c.end - c.p) < blen || std::strncmp(c.p, kBanner, blen) != 0)
        throw FormatError("missing %%MatrixMarket banner", 0);
    const char* eol = c.p;
    while (eol < c.end && *eol != '\n') ++eol;
    std::vector<std::string> words;
    {
        std::string cur;
        for (const char* q = c.p + blen; q < eol; ++q) {
            if (std::isspace(static_cast<unsigned char>(*q))) {
                if (!cur.empty()) words.push_back(std::move(cur)), cur.clear();
            } else {
                cur.push_back(char(std::tolower(static_cast<unsigned char>(*q))));
            }
        }
        if (!cur.empty()) words.push_back(std::move(cur));
    }
    const std::vector<std::string> want = {"matrix", "array", "real", "general"};
    if (words != want)
        throw FormatError(
            "unsupported Matrix Market type, need: matrix array real general", 0);
    c.p = eol;

    const long long rows = mm_dim(c, "row count");
    const long long cols = mm_dim(c, "column count");
    const std::size_t total = std::size_t(rows) * std::size_t(cols);
    if (cols != 0 && total / std::size_t(cols) != std::size_t(rows))
        throw FormatError("dimension overflow in size line", c.off());

    DenseMatrix a(static_cast<int>(rows), static_cast<int>(cols));
    // Array files list entries in column-major order, matching our storage.
    for (std::size_t k = 0; k < total; ++k) a.data[k] = mm_double(c);
    mm_skip(c);
    if (c.p != c.end)
        throw FormatError("trailing data after matrix entries", c.off());
    return a;
}

void save_mm(const DenseMatrix& a, std::string& out) {
    char line[64];
    out += "%%MatrixMarket matrix array real general\n";
    std::snprintf(line, sizeof line, "%d %d\n", a.rows, a.cols);
    out += line;
    for (double v : a.data) {
        std::snprintf(line, sizeof line, "%.17g\n", v);
        out += line;
    }
}

// ---- RawF64 ----

std::uint32_t read_u32le(const unsigned char* b) {
    return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) |
           (std::uint32_t(b[2]) << 16) | (std::uint32_t(b[3]) << 24);
}

DenseMatrix load_raw(const std::string& buf) {
    if (buf.size() < 16)
        throw FormatError("truncated header, need 16 bytes", buf.size());
    const unsigned char* b = reinterpret_cast<const unsigned char*>(buf.data());
    if (std::memcmp(b, "SKLR", 4) != 0)
        throw FormatError("bad magic, expected SKLR", 0);
    const std::uint64_t rows = read_u32le(b + 4);
    const std::uint64_t cols = read_u32le(b + 8);
    if (rows > std::uint64_t(INT_MAX))
        throw FormatError("dimension overflow in row count", 4);
    if (cols > std::uint64_t(INT_MAX))
        throw FormatError("dimension overflow in column count", 8);
    if (cols != 0 && rows > (std::numeric_limits<std::uint64_t>::max() / 8) / cols)
        throw FormatError("dimension overflow in payload size", 4);
    const std::uint64_t need = rows * cols * 8;
    if (buf.size() - 16 < need)
        throw FormatError("truncated payload: expected " +
                              std::to_string(need) + " bytes, found " +
                              std::to_string(buf.size() - 16),
                          buf.size());
    if (buf.size() - 16 > need)
        throw FormatError("trailing bytes after payload",
                          std::size_t(16 + need));
    DenseMatrix a(static_cast<int>(rows), static_cast<int>(cols));
    if constexpr (std::endian::native == std::endian::little) {
        std::memcpy(a.data.data(), b + 16, std::size_t(need));
    } else {
        for (std::size_t k = 0; k < a.data.size(); ++k) {
            const unsigned char* q = b + 16 + 8 * k;
            std::uint64_t bits = 0;
            for (int i = 7; i >= 0; --i) bits = (bits << 8) | q[i];
            a.data[k] = std::bit_cast<double>(bits);
        }
    }
    return a;
}

void put_u32le(std::string& out, std::uint32_t v) {
    out.push_back(char(v & 0xFF));
    out.push_back(char((v >> 8) & 0xFF));
    out.push_back(char((v >> 16) & 0xFF));
    out.push_back(char((v >> 24) & 0xFF));
}

void save_raw(const DenseMatrix& a, std::string& out) {
    out.reserve(16 + 8 * a.data.size());
    out += "SKLR";
    put_u32le(out, std::uint32_t(a.rows));
    put_u32le(out, std::uint32_t(a.cols));
    put_u32le(out, 0);  // reserved
    if constexpr (std::endian::native == std::endian::little) {
        out.append(reinterpret_cast<const char*>(a.data.data()),
                   8 * a.data.size());
    } else {
        for (double v : a.data) {
            std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
            for (int i = 0; i < 8; ++i) out.push_back(char((bits >> (8 * i)) & 0xFF));
        }
    }
}

// ---- PPM (P6) ----

int ppm_int(Cursor& c, const char* what, std::size_t* at) {
    for (;;) {
        while (c.p < c.end && std::isspace(static_cast<unsigned char>(*c.p)))
            ++c.p;
        if (c.p < c.end && *c.p == '#') {
            while (c.p < c.end && *c.p != '\n') ++c.p;
            continue;
        }
        break;
    }
    *at = c.off();
    if (c.p >= c.end || !std::isdigit(static_cast<unsigned char>(*c.p)))
        throw FormatError(std::string("expected ") + what + " in PPM header",
                          *at);
    long long v = 0;
    while (c.p < c.end && std::isdigit(static_cast<unsigned char>(*c.p))) {
        v = v * 10 + (*c.p - '0');
        if (v > INT_MAX)
            throw FormatError(std::string("dimension overflow in ") + what, *at);
        ++c.p;
    }
    return int(v);
}

DenseMatrix load_ppm(const std::string& buf) {
    if (buf.size() < 2 || buf[0] != 'P' || buf[1] != '6')
        throw FormatError("not a P6 PPM file", 0);
    Cursor c(buf);
    c.p += 2;
    std::size_t at_w = 0, at_h = 0, at_m = 0;
    const int w = ppm_int(c, "width", &at_w);
    const int h = ppm_int(c, "height", &at_h);
    const int maxval = ppm_int(c, "maxval", &at_m);
    if (w < 1) throw FormatError("PPM width must be positive", at_w);
    if (h < 1) throw FormatError("PPM height must be positive", at_h);
    if (maxval < 1 || maxval > 65535)
        throw FormatError("PPM maxval out of range", at_m);
    if (std::uint64_t(h) * 3 > std::uint64_t(INT_MAX))
        throw FormatError("dimension overflow in height", at_h);
    if (c.p >= c.end || !std::isspace(static_cast<unsigned char>(*c.p)))
        throw FormatError("missing separator after maxval", c.off());
    ++c.p;

    const int bps = maxval < 256 ? 1 : 2;
    const std::uint64_t need = std::uint64_t(w) * h * 3 * bps;
    const std::uint64_t have = std::uint64_t(c.end - c.p);
    if (have < need)
        throw FormatError("truncated pixel payload: expected " +
                              std::to_string(need) + " bytes, found " +
                              std::to_string(have),
                          buf.size());
    if (have > need)
        throw FormatError("trailing bytes after pixel payload",
                          c.off() + std::size_t(need));

    DenseMatrix a(3 * h, w);
    const unsigned char* q = reinterpret_cast<const unsigned char*>(c.p);
    const double scale = 255.0 / maxval;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int ch = 0; ch < 3; ++ch) {
                unsigned raw;
                if (bps == 1) {
                    raw = q[(std::size_t(y) * w + x) * 3 + ch];
                } else {
                    const unsigned char* s =
                        q + ((std::size_t(y) * w + x) * 3 + ch) * 2;
                    raw = (unsigned(s[0]) << 8) | s[1];  // big-endian sample
                }
                a(y + ch * h, x) = double(raw) * scale;
            }
    return a;
}

void save_ppm(const DenseMatrix& a, std::string& out) {
    if (a.rows % 3 != 0 || a.rows == 0)
        throw DimensionError(
            "PPM save needs a positive row count divisible by 3");
    const int h = a.rows / 3;
    const int w = a.cols;
    char head[64];
    std::snprintf(head, sizeof head, "P6\n%d %d\n255\n", w, h);
    out += head;
    out.reserve(out.size() + std::size_t(w) * h * 3);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int ch = 0; ch < 3; ++ch) {
                double v = a(y + ch * h, x);
                long r = std::lround(std::min(255.0, std::max(0.0, v)));
                out.push_back(char(static_cast<unsigned char>(r)));
            }
}

}  // namespace

MatrixFormat matrix_format_from_name(const std::string& name) {
    std::string s;
    for (char ch : name)
        s.push_back(char(std::tolower(static_cast<unsigned char>(ch))));
    if (s == "mm" || s == "matrixmarket" || s == "mtx")
        return MatrixFormat::MatrixMarketArray;
    if (s == "raw" || s == "rawf64") return MatrixFormat::RawF64;
    if (s == "ppm") return MatrixFormat::Ppm;
    throw ConfigError("unknown matrix format: " + name);
}

const char* matrix_format_name(MatrixFormat format) {
    switch (format) {
        case MatrixFormat::MatrixMarketArray: return "matrixmarket";
        case MatrixFormat::RawF64: return "rawf64";
        case MatrixFormat::Ppm: return "ppm";
    }
    return "unknown";
}

DenseMatrix load_matrix(const std::string& path, MatrixFormat format) {
    const std::string buf = read_file(path);
    switch (format) {
        case MatrixFormat::MatrixMarketArray: return load_mm(buf);
        case MatrixFormat::RawF64: return load_raw(buf);
        case MatrixFormat::Ppm: return load_ppm(buf);
    }
    throw ConfigError("unknown matrix format");
}

void save_matrix(const DenseMatrix& a, const std::string& path,
                 MatrixFormat format) {
    std::string out;
    switch (format) {
        case MatrixFormat::MatrixMarketArray: save_mm(a, out); break;
        case MatrixFormat::RawF64: save_raw(a, out); break;
        case MatrixFormat::Ppm: save_ppm(a, out); break;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw FormatError("cannot open " + path + " for writing", 0);
    f.write(out.data(), std::streamsize(out.size()));
    f.flush();
    if (!f) throw FormatError("write failed: " + path, 0);
}

}  // namespace rsvd
