#include "kmsgraph/int_matrix.hpp"

#include <sstream>

namespace kms {

namespace {

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t out;
    if (__builtin_add_overflow(a, b, &out)) throw OverflowError("path count overflow in matrix sum");
    return out;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t out;
    if (__builtin_mul_overflow(a, b, &out)) throw OverflowError("path count overflow in matrix product");
    return out;
}

}  // namespace

IntMatrix IntMatrix::identity(std::size_t n) {
    IntMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

IntMatrix IntMatrix::operator*(const IntMatrix& rhs) const {
    if (rhs.n_ != n_) throw std::invalid_argument("matrix size mismatch");
    IntMatrix out(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t k = 0; k < n_; ++k) {
            const std::int64_t a = (*this)(i, k);
            if (a == 0) continue;
            for (std::size_t j = 0; j < n_; ++j) {
                const std::int64_t b = rhs(k, j);
                if (b == 0) continue;
                out(i, j) = checked_add(out(i, j), checked_mul(a, b));
            }
        }
    }
    return out;
}

IntMatrix& IntMatrix::operator+=(const IntMatrix& rhs) {
    if (rhs.n_ != n_) throw std::invalid_argument("matrix size mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] = checked_add(data_[i], rhs.data_[i]);
    return *this;
}

IntMatrix IntMatrix::scaled(std::int64_t factor) const {
    IntMatrix out(n_);
    for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] = checked_mul(data_[i], factor);
    return out;
}

IntMatrix IntMatrix::power(std::uint64_t exponent) const {
    IntMatrix result = identity(n_);
    IntMatrix base = *this;
    while (exponent > 0) {
        if (exponent & 1u) result = result * base;
        exponent >>= 1u;
        if (exponent > 0) base = base * base;
    }
    return result;
}

std::string IntMatrix::to_string() const {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < n_; ++i) {
        if (i) os << "; ";
        for (std::size_t j = 0; j < n_; ++j) {
            if (j) os << " ";
            os << (*this)(i, j);
        }
    }
    os << "]";
    return os.str();
}

}  // namespace kms
