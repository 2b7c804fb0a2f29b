#pragma once

// Finite linear combinations of spanning elements t_λ t_γ* of the
// Cuntz–Krieger algebra, the dynamics and gauge action on them, and the KMS
// state functionals.

#include <algorithm>
#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"
#include "kmsgraph/harmonic.hpp"
#include "kmsgraph/kgraph.hpp"
#include "kmsgraph/pathspace.hpp"
#include "kmsgraph/rational.hpp"

namespace kms {

/// Complex coefficient: exact Gaussian rational when every input was
/// rational, double otherwise. Mixing the two yields a double.
class Scalar {
public:
    Scalar() = default;
    Scalar(int v) : re_(v), z_(v, 0.0) {}  // NOLINT: implicit on purpose
    static Scalar exact(const Rational& re, const Rational& im = 0);
    static Scalar approx(std::complex<double> z);

    bool is_exact() const { return exact_; }
    std::complex<double> value() const { return z_; }
    const Rational& re() const { return re_; }
    const Rational& im() const { return im_; }
    bool is_zero() const;

    Scalar operator+(const Scalar& o) const;
    Scalar operator-(const Scalar& o) const;
    Scalar operator*(const Scalar& o) const;
    Scalar operator-() const;
    Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
    Scalar conj() const;

    std::string to_string() const;

private:
    bool exact_ = true;
    Rational re_ = 0, im_ = 0;
    std::complex<double> z_{0.0, 0.0};
};

/// α^r at imaginary time: t_λ t_γ* ↦ e^{-β r·(d(λ)-d(γ))} t_λ t_γ*.
/// When β = ln(base) with rational base and r is integral the factor is the
/// exact rational base^{-r·(d(λ)-d(γ))}.
struct Dynamics {
    std::vector<double> r;
    double beta = 0.0;
    std::optional<Rational> base;

    bool exact() const;
    Scalar boltzmann(const IntVector& diff) const;  // e^{-β r·diff}
};

using SpanKey = std::pair<Path, Path>;

class AlgebraElement {
public:
    AlgebraElement() = default;
    static AlgebraElement spanning(const Path& lambda, const Path& gamma, const Scalar& c = 1);

    void add(const Path& lambda, const Path& gamma, const Scalar& c);
    const std::map<SpanKey, Scalar>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    AlgebraElement operator+(const AlgebraElement& o) const;
    AlgebraElement scaled(const Scalar& c) const;

    /// Same support and coefficients within tol (exact terms compare exactly).
    bool approx_equal(const AlgebraElement& o, double tol = 0.0) const;
    friend bool operator==(const AlgebraElement& a, const AlgebraElement& b) { return a.approx_equal(b, 0.0); }

private:
    std::map<SpanKey, Scalar> terms_;
};

class Algebra {
public:
    explicit Algebra(const KGraph& graph) : graph_(&graph) {}

    const KGraph& graph() const { return *graph_; }

    AlgebraElement vertex(VertexId v) const;
    /// (t_λ t_γ*)(t_δ t_ε*) = Σ_{(η,ν) ∈ Λ^min(γ,δ)} t_{λη} t_{εν}*
    AlgebraElement multiply(const AlgebraElement& a, const AlgebraElement& b) const;
    AlgebraElement adjoint(const AlgebraElement& a) const;
    /// Σ_{λ ∈ vΛ^n} t_λ t_λ*
    AlgebraElement ck4_expand(VertexId v, const Degree& n) const;
    AlgebraElement dynamics(const AlgebraElement& a, const Dynamics& dyn) const;
    /// t_λ t_γ* ↦ η(d(λ) - d(γ)) t_λ t_γ*
    AlgebraElement gauge_transform(const AlgebraElement& a, const TorusPoint& eta) const;

    /// Every (λ, γ) with s(λ) = s(γ) and d(λ), d(γ) <= cap.
    std::vector<SpanKey> spanning_elements(const Degree& cap) const;

    /// Λ^min, memoised.
    const std::vector<std::pair<Path, Path>>& lambda_min(const Path& a, const Path& b) const;

private:
    const KGraph* graph_;
    mutable std::mutex cache_mutex_;
    mutable std::map<SpanKey, std::vector<std::pair<Path, Path>>> min_cache_;
};

// -------------------------------------------------------------------- states

struct GaugeInvariantState {
    HarmonicVector psi;
    Dynamics dyn;
};

struct TwistedState {
    std::size_t component = 0;
    PeriodicityGroup per;
    Character xi;
    HarmonicVector psi;  // x^C
    Dynamics dyn;
    std::size_t depth = 4;  // isotropy refinement depth
};

using StateDescriptor = std::variant<GaugeInvariantState, TwistedState>;

/// Axis-aligned box in C.
struct ComplexInterval {
    double re_lo = 0, re_hi = 0, im_lo = 0, im_hi = 0;

    static ComplexInterval point(std::complex<double> z) { return {z.real(), z.real(), z.imag(), z.imag()}; }
    bool is_point() const { return re_lo == re_hi && im_lo == im_hi; }
    std::complex<double> center() const { return {(re_lo + re_hi) / 2, (im_lo + im_hi) / 2}; }
    double width() const { return std::max(re_hi - re_lo, im_hi - im_lo); }
    ComplexInterval operator+(const ComplexInterval& o) const {
        return {re_lo + o.re_lo, re_hi + o.re_hi, im_lo + o.im_lo, im_hi + o.im_hi};
    }
    /// ∞-distance between the boxes (0 when they meet).
    double distance(const ComplexInterval& o) const;
};

struct StateValue {
    ComplexInterval range;
    std::optional<Scalar> exact;  // set when every term evaluated exactly
    bool uncertified = false;     // some Per membership undecided
    bool is_point() const { return range.is_point(); }
    std::complex<double> value() const { return range.center(); }
};

class StateEvaluator {
public:
    StateEvaluator(const Algebra& algebra, StateDescriptor state);

    const StateDescriptor& state() const { return state_; }
    StateValue evaluate(const AlgebraElement& a) const;
    StateValue evaluate_term(const Path& lambda, const Path& gamma, const Scalar& c) const;

private:
    const Algebra* algebra_;
    StateDescriptor state_;
    std::optional<CylinderMeasure> measure_;
    mutable std::map<SpanKey, MassInterval> bounds_cache_;
};

StateValue evaluate(const Algebra& algebra, const StateDescriptor& state, const AlgebraElement& a);

struct KmsReport {
    std::size_t checked = 0;
    std::size_t failures = 0;
    double max_violation = 0.0;
    std::vector<std::string> examples;
    bool pass() const { return failures == 0; }
};

/// |ω(ab) - ω(b α_{iβ}(a))| <= tol for point values; box overlap (within tol)
/// for intervals.
KmsReport verify_kms(const Algebra& algebra, const StateEvaluator& omega,
                     const std::vector<std::pair<AlgebraElement, AlgebraElement>>& pairs, double tol = 1e-9);

/// Run the KMS identity over all pairs of spanning elements with degrees <=
/// cap. Pairs whose two products are both zero by construction (range
/// mismatch on both sides) are counted but not expanded; for gauge-invariant
/// states so are pairs whose products have nonzero net degree. Each element
/// is also compared with its expansion through p_v = Σ_{e ∈ vΛ^{e_i}} t_e t_e*.
KmsReport verify_kms_spanning(const Algebra& algebra, const StateEvaluator& omega, const Degree& cap,
                              double tol = 1e-9);

struct SymmetryReport {
    bool restriction_trivial = false;
    double equivariance_error = 0.0;  // max |ω_ξ(Ψ_η a) - ω_{ξη}(a)|
    double separation = 0.0;          // max |ω_ξ(a) - ω_{ξη}(a)|
    std::optional<SpanKey> witness;   // element attaining the separation
    bool pass = false;
};

/// Gauge action on twisted states: ω_{C,ξ} ∘ Ψ_η = ω_{C, ξ·η|Per}, and the
/// action is free on the torus of characters.
SymmetryReport verify_symmetry(const Algebra& algebra, const TwistedState& base, const TorusPoint& eta,
                               const std::vector<SpanKey>& tests, double tol = 1e-9);

struct ExtremalFamily {
    HarmonicComponentInfo info;
    PeriodicityGroup per;
    std::size_t torus_dimension = 0;
};

struct PerSearchOptions {
    std::optional<Degree> box;
    std::optional<std::size_t> p_max;
    SearchBudget budget;
};

/// One entry per C in C_r(β): the extremal β-KMS states over C form a torus
/// of dimension rank Per(C).
std::vector<ExtremalFamily> extremal_states(const KGraph& graph, const std::vector<double>& r, double beta,
                                            const WellChosenSet& f, const Tolerances& tol = {},
                                            const PerSearchOptions& per = {});

// ------------------------------------------------------------- serialization

/// Edge ids in order, or "@v" for the vertex v.
std::vector<std::string> word_of(const KGraph& graph, const Path& p);
/// Inverse of word_of; an empty word is rejected.
Path path_from_word(const KGraph& graph, const std::vector<std::string>& word);

nlohmann::json to_json(const KGraph& graph, const Scalar& s);
/// Sorted list of {lambda, gamma, re, im}.
nlohmann::json to_json(const KGraph& graph, const AlgebraElement& a);
AlgebraElement element_from_json(const KGraph& graph, const nlohmann::json& j);

}  // namespace kms
