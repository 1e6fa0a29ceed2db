#pragma once

#include <atomic>
#include <bit>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>

#include "costarr/rng.hpp"
#include "costarr/tensor.hpp"

namespace testutil {

// Scratch directory removed on scope exit.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<unsigned> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("costarr-test-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline std::string read_bytes(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

inline void write_bytes(const std::filesystem::path& p, const std::string& bytes) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

// Deterministic stand-ins for "random" test data, all driven by the
// counter rng so failures reproduce exactly.
inline double uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t i) {
    return costarr::rng::uniform01(seed, stream, i);
}

inline double normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t i) {
    return costarr::rng::normal(seed, stream, i);
}

// Arbitrary bit patterns (NaNs, infinities, -0.0 included) to make
// bit-exactness claims meaningful.
inline double f64_bits(std::uint64_t seed, std::uint64_t stream, std::uint64_t i) {
    return std::bit_cast<double>(costarr::rng::rand_u64(seed, stream, i));
}

inline float f32_bits(std::uint64_t seed, std::uint64_t stream, std::uint64_t i) {
    return std::bit_cast<float>(static_cast<std::uint32_t>(costarr::rng::rand_u64(seed, stream, i)));
}

} // namespace testutil
