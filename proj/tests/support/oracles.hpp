#pragma once

// Independent reference implementations. None of these call the library code
// they are used to check; they work on raw edge words and dense matrices.

#include <cstddef>
#include <cstdint>
#include <set>
#include <vector>

#include "kmsgraph/kgraph.hpp"

namespace kms::oracle {

using Word = std::vector<EdgeId>;

/// Largest |eigenvalue| of a dense matrix (Eigen general eigensolver).
double spectral_radius(const std::vector<std::vector<double>>& m);
/// Nonnegative eigenvector for the eigenvalue closest to rho, unit 1-norm.
std::vector<double> eigenvector(const std::vector<std::vector<double>>& m, double rho);

/// Null vectors of the stacked matrices (M_i - rho_i I) via SVD; singular
/// values below 1e-8 count as zero. Each vector is normalised to unit 1-norm
/// with nonnegative sum.
std::vector<std::vector<double>> joint_null_space(const std::vector<std::vector<std::vector<double>>>& ms,
                                                  const std::vector<double>& rhos);

/// Every word reachable from w by replacing adjacent pairs according to the
/// squares, in either direction.
std::set<Word> rewrite_closure(const KGraph& g, const Word& w);
/// The unique word of the closure whose colours are sorted.
Word sorted_representative(const KGraph& g, const Word& w);

/// Floyd-Warshall closure of the skeleton, identity included.
std::vector<std::vector<bool>> reachability(const KGraph& g);

/// Raw composable words with given colour counts and range v (colours in
/// sorted order), built edge by edge from the skeleton.
std::vector<Word> sorted_words(const KGraph& g, VertexId v, const Degree& n);

/// Λ^min(λ, γ) by brute force over the closures of all paths of degree
/// d(λ) ∨ d(γ); pairs of sorted words.
std::set<std::pair<Word, Word>> lambda_min(const KGraph& g, const Word& lambda, const Word& gamma);

/// σ^m = σ^n on every path of the 1-graph restricted to C, checked on all
/// words of length max(m, n) + p for p <= p_max, compared letter by letter.
/// Only for rank 1, or for a component where every degree has a single path.
enum class Verdict { Holds, Refuted };
Verdict shift_relation(const KGraph& g, const std::vector<VertexId>& component, const Degree& m, const Degree& n,
                       std::size_t p_max);

}  // namespace kms::oracle
