#include "kmsgraph/lattice.hpp"

#include <cstdlib>
#include <stdexcept>

namespace kms {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

void axpy(IntVector& y, std::int64_t a, const IntVector& x) {
    for (std::size_t i = 0; i < y.size(); ++i) {
        std::int64_t t;
        if (__builtin_mul_overflow(a, x[i], &t) || __builtin_sub_overflow(y[i], t, &y[i]))
            throw std::overflow_error("lattice reduction overflow");
    }
}

}  // namespace

Lattice Lattice::generated_by(std::size_t ambient, const std::vector<IntVector>& generators) {
    std::vector<IntVector> rows;
    for (const auto& g : generators) {
        if (g.size() != ambient) throw std::invalid_argument("generator has the wrong rank");
        rows.push_back(g);
    }
    Lattice out(ambient);
    std::size_t top = 0;
    for (std::size_t col = 0; col < ambient && top < rows.size(); ++col) {
        // Euclid down the column until a single nonzero entry remains
        while (true) {
            std::size_t piv = rows.size();
            for (std::size_t r = top; r < rows.size(); ++r)
                if (rows[r][col] != 0 && (piv == rows.size() || std::llabs(rows[r][col]) < std::llabs(rows[piv][col])))
                    piv = r;
            if (piv == rows.size()) break;
            std::swap(rows[top], rows[piv]);
            bool done = true;
            for (std::size_t r = top + 1; r < rows.size(); ++r) {
                if (rows[r][col] == 0) continue;
                axpy(rows[r], rows[r][col] / rows[top][col], rows[top]);
                if (rows[r][col] != 0) done = false;
            }
            if (done) break;
        }
        if (rows[top][col] == 0) continue;
        if (rows[top][col] < 0)
            for (auto& x : rows[top]) x = -x;
        for (std::size_t r = 0; r < top; ++r) axpy(rows[r], floor_div(rows[r][col], rows[top][col]), rows[top]);
        out.pivots_.push_back(col);
        ++top;
    }
    rows.resize(top);
    out.basis_ = std::move(rows);
    return out;
}

std::optional<IntVector> Lattice::coordinates(std::span<const std::int64_t> v) const {
    if (v.size() != ambient_) throw std::invalid_argument("vector has the wrong rank");
    IntVector rest(v.begin(), v.end());
    IntVector coords(basis_.size(), 0);
    for (std::size_t j = 0; j < basis_.size(); ++j) {
        const std::size_t p = pivots_[j];
        for (std::size_t c = (j ? pivots_[j - 1] + 1 : 0); c < p; ++c)
            if (rest[c] != 0) return std::nullopt;
        if (rest[p] % basis_[j][p] != 0) return std::nullopt;
        coords[j] = rest[p] / basis_[j][p];
        axpy(rest, coords[j], basis_[j]);
    }
    for (auto x : rest)
        if (x != 0) return std::nullopt;
    return coords;
}

Lattice Lattice::with(std::span<const std::int64_t> v) const {
    auto gens = basis_;
    gens.emplace_back(v.begin(), v.end());
    return generated_by(ambient_, gens);
}

std::string Lattice::to_string() const {
    std::string s = "{";
    for (std::size_t j = 0; j < basis_.size(); ++j) {
        if (j) s += ", ";
        s += "(";
        for (std::size_t i = 0; i < ambient_; ++i) {
            if (i) s += ",";
            s += std::to_string(basis_[j][i]);
        }
        s += ")";
    }
    return s + "}";
}

}  // namespace kms
