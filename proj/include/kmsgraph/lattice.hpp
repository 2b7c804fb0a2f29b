#pragma once

// Subgroups of Z^k in Hermite normal form.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace kms {

using IntVector = std::vector<std::int64_t>;

class Lattice {
public:
    explicit Lattice(std::size_t ambient = 0) : ambient_(ambient) {}

    /// Subgroup generated by the given vectors, reduced to row HNF.
    static Lattice generated_by(std::size_t ambient, const std::vector<IntVector>& generators);

    std::size_t ambient_rank() const { return ambient_; }
    std::size_t dimension() const { return basis_.size(); }
    /// Rows in echelon form: strictly increasing pivot columns, positive
    /// pivots, entries above each pivot reduced into [0, pivot).
    const std::vector<IntVector>& basis() const { return basis_; }
    const std::vector<std::size_t>& pivots() const { return pivots_; }

    bool contains(std::span<const std::int64_t> v) const { return coordinates(v).has_value(); }
    /// Integer c with v = Σ c_j basis_j, if v lies in the subgroup.
    std::optional<IntVector> coordinates(std::span<const std::int64_t> v) const;

    Lattice with(std::span<const std::int64_t> v) const;

    std::string to_string() const;
    friend bool operator==(const Lattice&, const Lattice&) = default;

private:
    std::size_t ambient_;
    std::vector<IntVector> basis_;
    std::vector<std::size_t> pivots_;
};

}  // namespace kms
