#pragma once

// Harmonic vectors, positive harmonic components and their extremal vectors.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kmsgraph/kgraph.hpp"
#include "kmsgraph/rational.hpp"
#include "kmsgraph/spectral.hpp"

namespace kms {

struct Tolerances {
    double eps_cmp = 1e-9;    // spectral comparisons
    double eps_match = 1e-9;  // |β r_i - ln ρ_i|
    double eps_supp = 1e-12;  // support threshold in decompose
    double residual = 1e-9;   // harmonic residuals
};

/// ψ with A_i ψ = e^{β r_i} ψ. `exact` carries the same vector in rationals
/// when it could be certified exactly.
struct HarmonicVector {
    std::vector<double> r;
    double beta = 0.0;
    std::vector<double> psi;
    std::optional<std::vector<Rational>> exact;
};

/// (ρ(A_1^C), ..., ρ(A_k^C))
using SpectrumVector = std::vector<double>;

enum class HarmonicStatus {
    Harmonic,
    Trivial,      // no nontrivial path inside C
    NotPositive,  // some ρ(A_i^C) is zero
    Dominated,    // some D in closure(C) \ C is not strictly below C
};

const char* to_string(HarmonicStatus s);

struct HarmonicDecision {
    HarmonicStatus status = HarmonicStatus::Trivial;
    SpectrumVector spectrum;
    std::optional<std::size_t> blocking;  // component index of the offending D
    bool harmonic() const { return status == HarmonicStatus::Harmonic; }
};

struct ExtremalVector {
    std::vector<double> x;                   // unit 1-norm, support = closure(C)
    double rho_f = 0.0;                      // ρ(A_F^C)
    std::optional<std::vector<Rational>> exact;
};

struct HarmonicComponentInfo {
    std::size_t component = 0;
    SpectrumVector spectrum;
    bool positive = false;
    bool harmonic = false;
    HarmonicStatus status = HarmonicStatus::Trivial;
    std::optional<std::size_t> blocking;
    std::optional<ExtremalVector> extremal;  // present when harmonic
};

class SingularSolve : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ResidualTooLarge : public std::runtime_error {
public:
    ResidualTooLarge(const std::string& what, double residual) : std::runtime_error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

SpectrumVector component_spectrum(const KGraph& graph, const Component& c);

/// Decision from the per-colour spectra alone: C is harmonic iff it is
/// nontrivial, positive, and every D in closure(C) \ C has spectrum <= that of
/// C with strict inequality somewhere. Differences within eps_cmp count as
/// equal.
HarmonicDecision harmonic_decision(const KGraph& graph, std::size_t component, const Tolerances& tol = {});
bool is_harmonic(const KGraph& graph, std::size_t component, const Tolerances& tol = {});

/// x^C: Perron vector of A_F on C extended to closure(C) by a linear solve.
ExtremalVector extremal_vector(const KGraph& graph, std::size_t component, const WellChosenSet& f,
                               const Tolerances& tol = {});

/// Rational x^C when every ρ(A_i^C) is an integer and the joint eigenspace on
/// closure(C) is one dimensional.
std::optional<std::vector<Rational>> exact_extremal_vector(const KGraph& graph, std::size_t component,
                                                           const SpectrumVector& spectrum);

struct FIndependenceReport {
    bool pass = false;
    bool decisions_agree = false;
    double max_difference = 0.0;
};

FIndependenceReport f_independence_check(const KGraph& graph, std::size_t component, const WellChosenSet& f1,
                                         const WellChosenSet& f2, const Tolerances& tol = {});

/// Every component with its spectrum, harmonic decision and x^C.
std::vector<HarmonicComponentInfo> analyse_components(const KGraph& graph, const WellChosenSet& f,
                                                      const Tolerances& tol = {});

/// C_r(β): harmonic components with |β r_i - ln ρ(A_i^C)| <= eps_match for all i.
std::vector<HarmonicComponentInfo> harmonic_components_for(const KGraph& graph, const std::vector<double>& r,
                                                           double beta, const WellChosenSet& f,
                                                           const Tolerances& tol = {});

struct HarmonicReport {
    bool pass = false;
    bool nonnegative = false;
    double norm_error = 0.0;
    std::vector<double> residuals;  // per colour, ||A_i ψ - e^{β r_i} ψ||_inf
    double max_residual = 0.0;
};

HarmonicReport verify_harmonic(const KGraph& graph, const std::vector<double>& psi, const std::vector<double>& r,
                               double beta, const Tolerances& tol = {});

struct Decomposition {
    std::vector<std::pair<std::size_t, double>> weights;  // (component, t_C)
    double residual = 0.0;
    double max_deviation = 0.0;  // spread of ψ_v / x^C_v over C
};

/// ψ = Σ t_C x^C over the minimal components of W with ρ(B^C) = 1.
Decomposition decompose(const KGraph& graph, const HarmonicVector& psi, const WellChosenSet& f,
                        const Tolerances& tol = {});

struct AdmissibleTemperature {
    std::size_t component = 0;
    std::optional<double> beta;  // unset when every β works
    bool all_beta = false;
};

std::vector<AdmissibleTemperature> admissible_temperatures(const KGraph& graph, const std::vector<double>& r,
                                                           const Tolerances& tol = {});

}  // namespace kms
