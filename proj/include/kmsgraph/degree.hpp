#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace kms {

/// Element of N^k: the degree of a path.
///
/// The defaulted ordering operators are lexicographic and exist only so that
/// degrees can be used as container keys. The partial order of N^k is `leq`.
class Degree {
public:
    Degree() = default;
    explicit Degree(std::size_t rank) : coords_(rank, 0) {}
    Degree(std::initializer_list<std::uint32_t> coords) : coords_(coords) {}
    explicit Degree(std::vector<std::uint32_t> coords) : coords_(std::move(coords)) {}

    static Degree unit(std::size_t rank, std::size_t color) {
        Degree d(rank);
        d.coords_.at(color) = 1;
        return d;
    }

    static Degree uniform(std::size_t rank, std::uint32_t value) {
        return Degree(std::vector<std::uint32_t>(rank, value));
    }

    std::size_t rank() const { return coords_.size(); }
    std::uint32_t operator[](std::size_t i) const { return coords_[i]; }
    std::uint32_t& operator[](std::size_t i) { return coords_[i]; }
    const std::vector<std::uint32_t>& coords() const { return coords_; }

    bool is_zero() const {
        return std::all_of(coords_.begin(), coords_.end(), [](std::uint32_t c) { return c == 0; });
    }

    std::uint64_t total() const {
        std::uint64_t t = 0;
        for (auto c : coords_) t += c;
        return t;
    }

    std::uint32_t max_coord() const {
        return coords_.empty() ? 0 : *std::max_element(coords_.begin(), coords_.end());
    }

    Degree& operator+=(const Degree& other) {
        check_rank(other);
        for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] += other.coords_[i];
        return *this;
    }

    friend Degree operator+(Degree a, const Degree& b) { return a += b; }

    /// Coordinatewise difference; requires b <= a.
    friend Degree operator-(const Degree& a, const Degree& b) {
        a.check_rank(b);
        Degree out(a.rank());
        for (std::size_t i = 0; i < a.rank(); ++i) {
            if (b.coords_[i] > a.coords_[i]) throw std::domain_error("degree subtraction below zero");
            out.coords_[i] = a.coords_[i] - b.coords_[i];
        }
        return out;
    }

    friend bool operator==(const Degree&, const Degree&) = default;
    friend auto operator<=>(const Degree&, const Degree&) = default;

    std::string to_string() const {
        std::string s = "(";
        for (std::size_t i = 0; i < coords_.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(coords_[i]);
        }
        return s + ")";
    }

private:
    void check_rank(const Degree& other) const {
        if (other.rank() != rank()) throw std::invalid_argument("degree rank mismatch");
    }

    std::vector<std::uint32_t> coords_;
};

/// a <= b in the coordinatewise partial order.
inline bool leq(const Degree& a, const Degree& b) {
    if (a.rank() != b.rank()) throw std::invalid_argument("degree rank mismatch");
    for (std::size_t i = 0; i < a.rank(); ++i)
        if (a[i] > b[i]) return false;
    return true;
}

inline Degree join(const Degree& a, const Degree& b) {
    if (a.rank() != b.rank()) throw std::invalid_argument("degree rank mismatch");
    Degree out(a.rank());
    for (std::size_t i = 0; i < a.rank(); ++i) out[i] = std::max(a[i], b[i]);
    return out;
}

inline Degree meet(const Degree& a, const Degree& b) {
    if (a.rank() != b.rank()) throw std::invalid_argument("degree rank mismatch");
    Degree out(a.rank());
    for (std::size_t i = 0; i < a.rank(); ++i) out[i] = std::min(a[i], b[i]);
    return out;
}

/// d(a) - d(b) as an element of Z^k.
inline std::vector<std::int64_t> difference(const Degree& a, const Degree& b) {
    if (a.rank() != b.rank()) throw std::invalid_argument("degree rank mismatch");
    std::vector<std::int64_t> out(a.rank());
    for (std::size_t i = 0; i < a.rank(); ++i)
        out[i] = static_cast<std::int64_t>(a[i]) - static_cast<std::int64_t>(b[i]);
    return out;
}

/// Enumerate every degree d with 0 <= d <= bound, in lexicographic order.
template <class Fn>
void for_each_degree_below(const Degree& bound, Fn&& fn) {
    Degree d(bound.rank());
    while (true) {
        fn(static_cast<const Degree&>(d));
        std::size_t i = bound.rank();
        while (i > 0) {
            --i;
            if (d[i] < bound[i]) {
                ++d[i];
                for (std::size_t j = i + 1; j < bound.rank(); ++j) d[j] = 0;
                break;
            }
            if (i == 0) return;
        }
        if (bound.rank() == 0) return;
    }
}

}  // namespace kms
