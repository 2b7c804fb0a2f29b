#pragma once

// Cylinder measures on the infinite path space, the periodicity group of a
// component, characters of it, and bounds on isotropy-cylinder masses.

#include <algorithm>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "kmsgraph/harmonic.hpp"
#include "kmsgraph/kgraph.hpp"
#include "kmsgraph/lattice.hpp"
#include "kmsgraph/rational.hpp"

namespace kms {

class SearchExplosion : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// M(Z(λ)) = e^{-β r·d(λ)} ψ_{s(λ)}.
class CylinderMeasure {
public:
    CylinderMeasure(const KGraph& graph, HarmonicVector psi);

    const HarmonicVector& vector() const { return psi_; }
    double weight(const Degree& d) const;  // e^{-β r·d}
    double mass(const Path& lambda) const;
    double vertex_mass(VertexId v) const { return psi_.psi.at(v); }
    double total_mass() const;

private:
    const KGraph* graph_;
    HarmonicVector psi_;
};

struct CheckReport {
    std::size_t checked = 0;
    std::size_t violations = 0;
    double worst = 0.0;
    std::vector<std::string> examples;  // first few violations
    bool pass() const { return violations == 0; }
};

/// Every path with degree <= bound, grouped by nothing in particular but in a
/// deterministic order (vertex, degree, word).
std::vector<Path> paths_up_to(const KGraph& graph, const Degree& bound);

/// M(Z(λ)) = Σ_{μ ∈ s(λ)Λ^{e_i}} M(Z(λμ)) for all λ with d(λ) <= depth.
CheckReport check_consistency(const KGraph& graph, const CylinderMeasure& m, const Degree& depth, double tol = 1e-10);

/// M(Z(γ)) = e^{β r·(d(λ)-d(γ))} M(Z(λ)) for each pair with s(λ) = s(γ),
/// relative tolerance.
CheckReport check_quasi_invariance(const KGraph& graph, const CylinderMeasure& m,
                                   const std::vector<std::pair<Path, Path>>& pairs, double tol = 1e-10);

/// All (λ, γ) with s(λ) = s(γ) and degrees <= bound.
std::vector<std::pair<Path, Path>> same_source_pairs(const KGraph& graph, const Degree& bound);

// ---------------------------------------------------------------- periodicity

enum class ShiftVerdict { Holds, Refuted, Unknown };
const char* to_string(ShiftVerdict v);

struct ShiftResult {
    ShiftVerdict verdict = ShiftVerdict::Unknown;
    std::size_t depth = 0;           // p reached
    std::optional<Path> witness;     // path on which the segments differ
    std::size_t paths_checked = 0;
};

struct SearchBudget {
    std::size_t max_paths = 200000;  // per enumeration
};

/// Does σ^m = σ^n hold on the paths of Λ_C, checked for p = 1..p_max on
/// every path of degree (m∨n) + p·(1,...,1)? Unknown when the budget is hit.
ShiftResult shift_relation_holds(const KGraph& graph, const Component& c, const Degree& m, const Degree& n,
                                 std::size_t p_max, const SearchBudget& budget = {});

/// Default search depth |C| + max coordinate of m∨n.
std::size_t default_shift_depth(const Component& c, const Degree& m, const Degree& n);

struct PeriodicityGroup {
    Lattice group;
    Degree box;                    // pairs searched: m, n <= box
    std::optional<std::size_t> p_max;  // fixed depth, or unset for the per-pair default
    bool complete = true;          // false if some difference was left undecided
    std::size_t depth_used = 0;    // largest p_max used by any test
    std::map<IntVector, ShiftVerdict> status;  // per difference in the box

    enum class Membership { In, Out, Unknown };
    Membership membership(const IntVector& g) const;
    std::size_t certified_depth() const;
};

/// Search all pairs m, n <= box (default 2|C|·1) and return the subgroup
/// generated by the differences whose shift relation holds.
PeriodicityGroup periodicity_group(const KGraph& graph, const Component& c, std::optional<Degree> box = std::nullopt,
                                   std::optional<std::size_t> p_max = std::nullopt,
                                   const SearchBudget& budget = {});

// ---------------------------------------------------------------- characters

/// A phase in [0, 1), exact when rational. Default is the exact zero.
class Phase {
public:
    Phase() = default;
    static Phase exact(const Rational& q);
    static Phase approx(double x);

    bool is_exact() const { return exact_.has_value(); }
    const std::optional<Rational>& exact_value() const { return exact_; }
    double value() const { return value_; }
    bool is_zero() const;

    Phase operator+(const Phase& o) const;
    Phase operator-() const;
    Phase times(std::int64_t n) const;

    std::string to_string() const;

private:
    std::optional<Rational> exact_ = Rational(0);
    double value_ = 0.0;
};

/// exp(2πi θ) with exact values for θ in {0, 1/4, 1/2, 3/4}.
std::complex<double> unit_phase(const Phase& theta);

/// Character of a periodicity group, given by phases against its basis.
struct Character {
    std::vector<Phase> theta;

    static Character trivial(std::size_t dim) { return {std::vector<Phase>(dim)}; }
    Phase phase_at(const Lattice& per, const IntVector& g) const;  // throws if g not in per
    Character operator*(const Character& o) const;
    bool is_trivial() const;
};

/// A point of the k-torus, i.e. a character of Z^k.
struct TorusPoint {
    std::vector<Phase> eta;

    Phase phase_at(const IntVector& g) const;
    /// η restricted to the subgroup, as a character in its basis.
    Character restrict_to(const Lattice& per) const;
};

// ---------------------------------------------------------------- isotropy

struct MassInterval {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t depth = 0;
    bool closed() const { return hi - lo <= 1e-15 * std::max(1.0, hi); }
};

/// Bounds on M({x ∈ Z(λ) ∩ Z(γ) : σ^{d(λ)} x = σ^{d(γ)} x}) for the measure of
/// x^C. Cylinders of degree d(λ)∨d(γ) + q·1 are refined for q <= depth.
MassInterval isotropy_cylinder_bounds(const KGraph& graph, const Component& c, const CylinderMeasure& m,
                                      const Path& lambda, const Path& gamma, std::size_t depth,
                                      const SearchBudget& budget = {});

/// Upper bound for the mass of paths that have not entered C after q·1:
/// Σ over cylinders of degree q·1 with source outside C.
double non_eventual_mass(const KGraph& graph, const Component& c, const CylinderMeasure& m, std::size_t q);

/// Sample a path of degree q·1 from the cylinder measure.
Path sample_path(const KGraph& graph, const CylinderMeasure& m, std::size_t q, std::mt19937_64& rng);

struct AuditReport {
    std::size_t samples = 0;
    std::size_t eventually_in_c = 0;
    std::size_t violations = 0;  // sampled isotropy outside Per(C)
    std::vector<std::string> examples;
};

/// Sample paths of the measure of x^C and look for shift coincidences
/// σ^m y = σ^n y on the part y of the path inside C, over a window of
/// `window`·1, for differences m - n (|m - n| <= box) outside Per(C).
AuditReport isotropy_audit(const KGraph& graph, const Component& c, const PeriodicityGroup& per,
                           const CylinderMeasure& m, const Degree& box, std::size_t samples, std::size_t window,
                           std::uint64_t seed);

}  // namespace kms
