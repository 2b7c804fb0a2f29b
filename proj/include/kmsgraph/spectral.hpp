#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "kmsgraph/int_matrix.hpp"
#include "kmsgraph/kgraph.hpp"

namespace kms {

class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
    static DenseMatrix from(const IntMatrix& m);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const double* data() const { return data_.data(); }

    DenseMatrix restrict(std::span<const VertexId> rows, std::span<const VertexId> cols) const;
    DenseMatrix restrict(std::span<const VertexId> subset) const { return restrict(subset, subset); }
    std::vector<double> apply(std::span<const double> x) const;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

class NonConvergence : public std::runtime_error {
public:
    NonConvergence(const std::string& what, double lower, double upper, std::size_t iterations)
        : std::runtime_error(what), lower_(lower), upper_(upper), iterations_(iterations) {}
    double lower() const { return lower_; }
    double upper() const { return upper_; }
    std::size_t iterations() const { return iterations_; }

private:
    double lower_, upper_;
    std::size_t iterations_;
};

class CertificationFailure : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Finite multiset F of nonzero degrees. Well chosen when A_F(v,w) > 0 exactly
/// for the pairs joined by a path of nonzero degree.
struct WellChosenSet {
    std::vector<Degree> degrees;
};

/// F = {n : 0 < n <= |Λ^0| (1,...,1)}, certified against skeleton reachability.
WellChosenSet default_well_chosen(const KGraph& graph);

bool is_well_chosen(const KGraph& graph, const WellChosenSet& f);

/// A_F = Σ_{n ∈ F} A^n with multiplicity; overflow-checked.
IntMatrix a_f_matrix(const KGraph& graph, const WellChosenSet& f);

struct SpectralOptions {
    double relative_tolerance = 1e-12;
    std::size_t max_iterations = 500000;
};

/// ρ(M^S), the maximum over the strong components of the support of M^S of the
/// Perron root of each irreducible block. Returns 0 for empty S.
double spectral_radius(const DenseMatrix& m, std::span<const VertexId> subset, const SpectralOptions& opts = {});
double spectral_radius(const DenseMatrix& m, const SpectralOptions& opts = {});

struct PerronResult {
    std::vector<double> vector;  // strictly positive, unit 1-norm
    double radius = 0.0;
    double lower = 0.0;          // Collatz–Wielandt bracket of the radius
    double upper = 0.0;
    double residual = 0.0;       // ||Mx - ρx||_inf
    std::size_t iterations = 0;
};

/// Perron eigenpair of a strictly positive square matrix. The residual is
/// guaranteed below 1e-10 * max(1, ρ).
PerronResult perron_vector(const DenseMatrix& m, const SpectralOptions& opts = {});

/// Perron eigenpair of an irreducible nonnegative matrix via the shifted
/// iteration on M + sI, which is primitive.
PerronResult irreducible_perron(const DenseMatrix& m, const SpectralOptions& opts = {});

/// Strong components of the support graph of a square matrix, each ascending.
std::vector<std::vector<std::size_t>> support_components(const DenseMatrix& m);

}  // namespace kms
