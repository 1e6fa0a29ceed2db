#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "costarr/errors.hpp"

namespace costarr {

enum class Dtype : std::uint8_t {
    f32 = 1,
    f64 = 2,
    i64 = 3,
};

const char* dtype_name(Dtype t);
std::size_t dtype_size(Dtype t);

// Dense n-dimensional array with row-major storage in its declared dtype.
//
// On-disk form ("CST1"): magic bytes 43 53 54 31, u8 ndim, ndim x u64
// little-endian dims, u8 dtype code (1=f32, 2=f64, 3=i64), then the
// row-major little-endian payload. The file is byte-identical on any host.
class Tensor {
public:
    Tensor() = default;
    Tensor(std::vector<std::uint64_t> dims, Dtype dtype); // zero-filled

    static Tensor from_f32(std::vector<std::uint64_t> dims, std::vector<float> data);
    static Tensor from_f64(std::vector<std::uint64_t> dims, std::vector<double> data);
    static Tensor from_i64(std::vector<std::uint64_t> dims, std::vector<std::int64_t> data);

    Dtype dtype() const { return dtype_; }
    const std::vector<std::uint64_t>& dims() const { return dims_; }
    std::size_t ndim() const { return dims_.size(); }
    std::size_t size() const;           // element count
    std::uint64_t dim(std::size_t i) const { return dims_.at(i); }

    // 2-D convenience accessors; throw ShapeError when ndim != 2.
    std::size_t rows() const;
    std::size_t cols() const;

    std::span<const float> f32() const;
    std::span<const double> f64() const;
    std::span<const std::int64_t> i64() const;
    std::span<float> f32();
    std::span<double> f64();
    std::span<std::int64_t> i64();

    // Converting scalar reads, valid for any dtype.
    double at_f64(std::size_t i) const;
    std::int64_t at_i64(std::size_t i) const;

    // Copies row r of a 2-D tensor into out (resized to cols()), as float64.
    void row_f64(std::size_t r, std::vector<double>& out) const;

    // Bit-exact comparison: dtype, dims, and payload bit patterns
    // (distinguishes NaN payloads and signed zeros).
    bool operator==(const Tensor& other) const;
    bool operator!=(const Tensor& other) const { return !(*this == other); }

private:
    std::vector<std::uint64_t> dims_;
    Dtype dtype_ = Dtype::f64;
    std::variant<std::vector<float>, std::vector<double>, std::vector<std::int64_t>> data_;

    void check_dims_match_data() const;
};

Tensor read_tensor(const std::filesystem::path& path);
void write_tensor(const Tensor& t, const std::filesystem::path& path);

// Rectangular numeric CSV -> float64 [rows x cols]. The first row is taken
// as a header iff any of its cells fails numeric parsing.
Tensor read_csv_matrix(const std::filesystem::path& path);

// Writes a 1-D or 2-D tensor as CSV with %.17g floats. Pass a non-empty
// header to emit it as the first line.
void write_csv_matrix(const Tensor& t, const std::filesystem::path& path,
                      const std::string& header = "");

// %.17g rendering used for every float the artifact serializes.
std::string format_f64(double v);

} // namespace costarr
