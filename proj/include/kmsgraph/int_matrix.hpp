#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace kms {

class OverflowError : public std::overflow_error {
public:
    using std::overflow_error::overflow_error;
};

/// Dense square matrix of nonnegative path counts. All arithmetic is
/// overflow-checked and throws OverflowError instead of wrapping.
class IntMatrix {
public:
    IntMatrix() = default;
    explicit IntMatrix(std::size_t n) : n_(n), data_(n * n, 0) {}

    static IntMatrix identity(std::size_t n);

    std::size_t size() const { return n_; }
    std::int64_t operator()(std::size_t r, std::size_t c) const { return data_[r * n_ + c]; }
    std::int64_t& operator()(std::size_t r, std::size_t c) { return data_[r * n_ + c]; }
    const std::vector<std::int64_t>& data() const { return data_; }

    IntMatrix operator*(const IntMatrix& rhs) const;
    IntMatrix& operator+=(const IntMatrix& rhs);
    IntMatrix scaled(std::int64_t factor) const;
    IntMatrix power(std::uint64_t exponent) const;

    friend bool operator==(const IntMatrix&, const IntMatrix&) = default;

    std::string to_string() const;

private:
    std::size_t n_ = 0;
    std::vector<std::int64_t> data_;
};

}  // namespace kms
