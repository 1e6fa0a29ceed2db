#include "costarr/tensor.hpp"

#include <array>
#include <bit>
#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace costarr {

namespace {

constexpr std::array<unsigned char, 4> kMagic = {0x43, 0x53, 0x54, 0x31}; // "CST1"

// Integers and IEEE754 payloads are serialized little-endian regardless of
// host order, one value at a time through these helpers.
template <typename T>
void put_le(std::string& out, T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    std::array<unsigned char, sizeof(T)> raw;
    std::memcpy(raw.data(), &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
        for (std::size_t i = sizeof(T); i-- > 0;) out.push_back(static_cast<char>(raw[i]));
    } else {
        out.append(reinterpret_cast<const char*>(raw.data()), sizeof(T));
    }
}

template <typename T>
T get_le(const unsigned char* p) {
    static_assert(std::is_trivially_copyable_v<T>);
    std::array<unsigned char, sizeof(T)> raw;
    if constexpr (std::endian::native == std::endian::big) {
        for (std::size_t i = 0; i < sizeof(T); ++i) raw[i] = p[sizeof(T) - 1 - i];
    } else {
        std::memcpy(raw.data(), p, sizeof(T));
    }
    T v;
    std::memcpy(&v, raw.data(), sizeof(T));
    return v;
}

bool parse_f64(std::string_view s, double& out) {
    // Trim ASCII whitespace; from_chars is strict about it.
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    if (b == e) return false;
    const char* first = s.data() + b;
    const char* last = s.data() + e;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    cells.push_back(cur);
    return cells;
}

} // namespace

const char* dtype_name(Dtype t) {
    switch (t) {
    case Dtype::f32: return "f32";
    case Dtype::f64: return "f64";
    case Dtype::i64: return "i64";
    }
    return "?";
}

std::size_t dtype_size(Dtype t) {
    switch (t) {
    case Dtype::f32: return 4;
    case Dtype::f64: return 8;
    case Dtype::i64: return 8;
    }
    return 0;
}

Tensor::Tensor(std::vector<std::uint64_t> dims, Dtype dtype) : dims_(std::move(dims)), dtype_(dtype) {
    std::size_t n = 1;
    for (auto d : dims_) n *= static_cast<std::size_t>(d);
    switch (dtype_) {
    case Dtype::f32: data_ = std::vector<float>(n, 0.0f); break;
    case Dtype::f64: data_ = std::vector<double>(n, 0.0); break;
    case Dtype::i64: data_ = std::vector<std::int64_t>(n, 0); break;
    }
    check_dims_match_data();
}

Tensor Tensor::from_f32(std::vector<std::uint64_t> dims, std::vector<float> data) {
    Tensor t;
    t.dims_ = std::move(dims);
    t.dtype_ = Dtype::f32;
    t.data_ = std::move(data);
    t.check_dims_match_data();
    return t;
}

Tensor Tensor::from_f64(std::vector<std::uint64_t> dims, std::vector<double> data) {
    Tensor t;
    t.dims_ = std::move(dims);
    t.dtype_ = Dtype::f64;
    t.data_ = std::move(data);
    t.check_dims_match_data();
    return t;
}

Tensor Tensor::from_i64(std::vector<std::uint64_t> dims, std::vector<std::int64_t> data) {
    Tensor t;
    t.dims_ = std::move(dims);
    t.dtype_ = Dtype::i64;
    t.data_ = std::move(data);
    t.check_dims_match_data();
    return t;
}

void Tensor::check_dims_match_data() const {
    if (dims_.empty()) throw ShapeError("tensor needs at least one dimension");
    std::size_t n = 1;
    for (auto d : dims_) {
        if (d == 0) throw ShapeError("tensor dimensions must be positive");
        n *= static_cast<std::size_t>(d);
    }
    std::size_t have = std::visit([](const auto& v) { return v.size(); }, data_);
    if (n != have) {
        throw ShapeError("tensor data size " + std::to_string(have) +
                         " does not match dims product " + std::to_string(n));
    }
}

std::size_t Tensor::size() const {
    return std::visit([](const auto& v) { return v.size(); }, data_);
}

std::size_t Tensor::rows() const {
    if (dims_.size() != 2) throw ShapeError("expected a 2-d tensor, got ndim=" + std::to_string(dims_.size()));
    return static_cast<std::size_t>(dims_[0]);
}

std::size_t Tensor::cols() const {
    if (dims_.size() != 2) throw ShapeError("expected a 2-d tensor, got ndim=" + std::to_string(dims_.size()));
    return static_cast<std::size_t>(dims_[1]);
}

std::span<const float> Tensor::f32() const {
    if (dtype_ != Dtype::f32) throw ShapeError(std::string("tensor dtype is ") + dtype_name(dtype_) + ", wanted f32");
    return std::get<std::vector<float>>(data_);
}

std::span<const double> Tensor::f64() const {
    if (dtype_ != Dtype::f64) throw ShapeError(std::string("tensor dtype is ") + dtype_name(dtype_) + ", wanted f64");
    return std::get<std::vector<double>>(data_);
}

std::span<const std::int64_t> Tensor::i64() const {
    if (dtype_ != Dtype::i64) throw ShapeError(std::string("tensor dtype is ") + dtype_name(dtype_) + ", wanted i64");
    return std::get<std::vector<std::int64_t>>(data_);
}

std::span<float> Tensor::f32() {
    if (dtype_ != Dtype::f32) throw ShapeError(std::string("tensor dtype is ") + dtype_name(dtype_) + ", wanted f32");
    return std::get<std::vector<float>>(data_);
}

std::span<double> Tensor::f64() {
    if (dtype_ != Dtype::f64) throw ShapeError(std::string("tensor dtype is ") + dtype_name(dtype_) + ", wanted f64");
    return std::get<std::vector<double>>(data_);
}

std::span<std::int64_t> Tensor::i64() {
    if (dtype_ != Dtype::i64) throw ShapeError(std::string("tensor dtype is ") + dtype_name(dtype_) + ", wanted i64");
    return std::get<std::vector<std::int64_t>>(data_);
}

double Tensor::at_f64(std::size_t i) const {
    switch (dtype_) {
    case Dtype::f32: return static_cast<double>(std::get<std::vector<float>>(data_).at(i));
    case Dtype::f64: return std::get<std::vector<double>>(data_).at(i);
    case Dtype::i64: return static_cast<double>(std::get<std::vector<std::int64_t>>(data_).at(i));
    }
    throw ShapeError("bad dtype");
}

std::int64_t Tensor::at_i64(std::size_t i) const {
    switch (dtype_) {
    case Dtype::f32: return static_cast<std::int64_t>(std::get<std::vector<float>>(data_).at(i));
    case Dtype::f64: return static_cast<std::int64_t>(std::get<std::vector<double>>(data_).at(i));
    case Dtype::i64: return std::get<std::vector<std::int64_t>>(data_).at(i);
    }
    throw ShapeError("bad dtype");
}

void Tensor::row_f64(std::size_t r, std::vector<double>& out) const {
    std::size_t c = cols();
    if (r >= rows()) throw ShapeError("row index out of range");
    out.resize(c);
    std::size_t base = r * c;
    for (std::size_t j = 0; j < c; ++j) out[j] = at_f64(base + j);
}

bool Tensor::operator==(const Tensor& other) const {
    if (dtype_ != other.dtype_ || dims_ != other.dims_) return false;
    return std::visit(
        [&](const auto& a) {
            const auto& b = std::get<std::decay_t<decltype(a)>>(other.data_);
            if (a.size() != b.size()) return false;
            return std::memcmp(a.data(), b.data(), a.size() * sizeof(a[0])) == 0;
        },
        data_);
}

Tensor read_tensor(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string() + " for reading");
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failure on " + path.string());
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    std::size_t n = bytes.size();

    auto need = [&](std::size_t off, std::size_t len) {
        if (off + len > n) throw IoError("truncated tensor file " + path.string());
    };

    need(0, 4);
    if (std::memcmp(p, kMagic.data(), 4) != 0) throw FormatError("bad magic in " + path.string());
    need(4, 1);
    std::size_t ndim = p[4];
    if (ndim == 0) throw FormatError("zero-dimensional tensor in " + path.string());
    std::size_t off = 5;
    std::vector<std::uint64_t> dims(ndim);
    std::size_t count = 1;
    for (std::size_t i = 0; i < ndim; ++i) {
        need(off, 8);
        dims[i] = get_le<std::uint64_t>(p + off);
        off += 8;
        if (dims[i] == 0) throw FormatError("zero dimension in " + path.string());
        if (count > std::numeric_limits<std::size_t>::max() / dims[i])
            throw FormatError("dimension overflow in " + path.string());
        count *= static_cast<std::size_t>(dims[i]);
    }
    need(off, 1);
    std::uint8_t code = p[off++];
    if (code < 1 || code > 3) throw FormatError("unknown dtype code " + std::to_string(code) + " in " + path.string());
    Dtype dt = static_cast<Dtype>(code);

    std::size_t payload = count * dtype_size(dt);
    need(off, payload);
    if (off + payload != n)
        throw FormatError("trailing bytes after payload in " + path.string());

    Tensor t(dims, dt);
    switch (dt) {
    case Dtype::f32: {
        auto dst = t.f32();
        for (std::size_t i = 0; i < count; ++i) dst[i] = get_le<float>(p + off + i * 4);
        break;
    }
    case Dtype::f64: {
        auto dst = t.f64();
        for (std::size_t i = 0; i < count; ++i) dst[i] = get_le<double>(p + off + i * 8);
        break;
    }
    case Dtype::i64: {
        auto dst = t.i64();
        for (std::size_t i = 0; i < count; ++i) dst[i] = get_le<std::int64_t>(p + off + i * 8);
        break;
    }
    }
    return t;
}

void write_tensor(const Tensor& t, const std::filesystem::path& path) {
    std::string out;
    out.reserve(6 + t.ndim() * 8 + t.size() * dtype_size(t.dtype()));
    out.append(reinterpret_cast<const char*>(kMagic.data()), 4);
    out.push_back(static_cast<char>(t.ndim()));
    for (auto d : t.dims()) put_le(out, d);
    out.push_back(static_cast<char>(t.dtype()));
    switch (t.dtype()) {
    case Dtype::f32:
        for (float v : t.f32()) put_le(out, v);
        break;
    case Dtype::f64:
        for (double v : t.f64()) put_le(out, v);
        break;
    case Dtype::i64:
        for (std::int64_t v : t.i64()) put_le(out, v);
        break;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    f.flush();
    if (!f) throw IoError("write failure on " + path.string());
}

Tensor read_csv_matrix(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string() + " for reading");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() && in.peek() == std::char_traits<char>::eof()) break;
        lines.push_back(line);
    }
    if (in.bad()) throw IoError("read failure on " + path.string());
    // Drop trailing blank lines (a final newline is not a row).
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    if (lines.empty()) throw FormatError("empty csv file " + path.string());

    auto first = split_csv_line(lines[0]);
    bool header = false;
    for (const auto& cell : first) {
        double v;
        if (!parse_f64(cell, v)) {
            header = true;
            break;
        }
    }
    std::size_t start = header ? 1 : 0;
    if (start >= lines.size()) throw FormatError("csv has a header but no data rows: " + path.string());

    std::size_t cols = split_csv_line(lines[start]).size();
    std::size_t rows = lines.size() - start;
    std::vector<double> data;
    data.reserve(rows * cols);
    for (std::size_t r = 0; r < rows; ++r) {
        auto cells = split_csv_line(lines[start + r]);
        if (cells.size() != cols) {
            throw FormatError("ragged csv row " + std::to_string(r + 1) + " in " + path.string() + ": expected " +
                              std::to_string(cols) + " cells, got " + std::to_string(cells.size()));
        }
        for (const auto& cell : cells) {
            double v;
            if (!parse_f64(cell, v)) {
                throw FormatError("non-numeric cell '" + cell + "' in data row " + std::to_string(r + 1) + " of " +
                                  path.string());
            }
            data.push_back(v);
        }
    }
    return Tensor::from_f64({rows, cols}, std::move(data));
}

std::string format_f64(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_csv_matrix(const Tensor& t, const std::filesystem::path& path, const std::string& header) {
    std::size_t rows, cols;
    if (t.ndim() == 1) {
        rows = static_cast<std::size_t>(t.dim(0));
        cols = 1;
    } else if (t.ndim() == 2) {
        rows = t.rows();
        cols = t.cols();
    } else {
        throw ShapeError("csv output needs a 1-d or 2-d tensor, got ndim=" + std::to_string(t.ndim()));
    }
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    std::string buf;
    if (!header.empty()) {
        buf += header;
        buf += '\n';
    }
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            if (c) buf += ',';
            if (t.dtype() == Dtype::i64) {
                buf += std::to_string(t.at_i64(r * cols + c));
            } else {
                buf += format_f64(t.at_f64(r * cols + c));
            }
        }
        buf += '\n';
    }
    f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    f.flush();
    if (!f) throw IoError("write failure on " + path.string());
}

} // namespace costarr
