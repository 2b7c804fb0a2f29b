#pragma once

// Finite k-graphs without sources, presented by a coloured skeleton plus a
// complete set of factorisation squares.
//
// Conventions: an edge e has range r(e) = dst and source s(e) = src. A path
// is written as an edge word e1 e2 ... en with s(e_j) = r(e_{j+1}); its range
// is r(e1) and its source s(en). A square (f, g, g2, f2) records the identity
// f g = g2 f2 where f, f2 carry the lower colour.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "kmsgraph/degree.hpp"
#include "kmsgraph/int_matrix.hpp"

namespace kms {

using VertexId = std::uint32_t;
using EdgeId = std::uint32_t;

/// Parsed but unvalidated graph description. Colours are 1-based here, as in
/// the document format; all cross references are already resolved to indices.
struct KGraphSpec {
    struct EdgeSpec {
        std::string id;
        std::uint32_t color = 0;
        VertexId src = 0;
        VertexId dst = 0;
    };
    struct SquareSpec {
        EdgeId f = 0, g = 0, g2 = 0, f2 = 0;
    };

    std::size_t rank = 0;
    std::vector<std::string> vertices;
    std::vector<EdgeSpec> edges;
    std::vector<SquareSpec> squares;
};

struct Edge {
    std::string id;
    std::size_t color = 0;  // 0-based
    VertexId src = 0;
    VertexId dst = 0;
};

struct Square {
    EdgeId f = 0, g = 0, g2 = 0, f2 = 0;
};

class GraphError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Syntax or reference error in a graph document.
class ParseError : public GraphError {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : GraphError(what), line_(line), column_(column) {}
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

enum class IssueKind {
    InvalidRank,
    InvalidColor,
    MalformedSquare,
    MissingSquare,
    DuplicateSquare,
    CubeInconsistency,
    SourceVertex,
    NonCommutingMatrices,
};

const char* to_string(IssueKind kind);

struct ValidationIssue {
    IssueKind kind;
    std::string detail;
};

/// Thrown by KGraph::validate with every invariant violation found.
class ValidationError : public GraphError {
public:
    explicit ValidationError(std::vector<ValidationIssue> issues);
    const std::vector<ValidationIssue>& issues() const { return issues_; }

private:
    std::vector<ValidationIssue> issues_;
};

class PathError : public GraphError {
public:
    enum class Kind { NotComposable, DegreeOutOfRange, EmptyWord };
    PathError(Kind kind, const std::string& what, std::size_t position = 0)
        : GraphError(what), kind_(kind), position_(position) {}
    Kind kind() const { return kind_; }
    std::size_t position() const { return position_; }

private:
    Kind kind_;
    std::size_t position_;
};

/// A morphism of the k-graph in colour-sorted normal form. Vertices are paths
/// of degree zero with an empty edge word.
struct Path {
    VertexId range = 0;
    VertexId source = 0;
    Degree degree;
    std::vector<EdgeId> edges;

    bool is_vertex() const { return edges.empty(); }

    friend bool operator==(const Path&, const Path&) = default;
    friend auto operator<=>(const Path&, const Path&) = default;
};

struct Component {
    std::size_t index = 0;
    std::vector<VertexId> vertices;  // ascending
    bool trivial = false;
    std::vector<VertexId> closure;              // {w : w Λ C != ∅}
    std::vector<VertexId> hereditary_closure;   // {w : C Λ w != ∅}

    bool contains(VertexId v) const;
};

/// Strong components of the skeleton with the reachability order C <= D iff
/// C Λ D != ∅.
struct ComponentStructure {
    std::vector<Component> components;        // ordered by smallest vertex
    std::vector<std::size_t> component_of;    // vertex -> component index
    std::vector<std::vector<bool>> order;     // order[c][d]: C <= D

    bool leq(std::size_t c, std::size_t d) const { return order[c][d]; }
};

class KGraph {
public:
    /// Certify every invariant of a finite k-graph without sources and build
    /// the vertex matrices. Throws ValidationError listing all violations.
    static KGraph validate(const KGraphSpec& spec);

    std::size_t rank() const { return rank_; }
    std::size_t vertex_count() const { return vertex_names_.size(); }
    std::size_t edge_count() const { return edges_.size(); }

    const std::string& vertex_name(VertexId v) const { return vertex_names_.at(v); }
    const Edge& edge(EdgeId e) const { return edges_.at(e); }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<Square>& squares() const { return squares_; }
    std::optional<VertexId> find_vertex(const std::string& name) const;
    std::optional<EdgeId> find_edge(const std::string& name) const;

    /// Edges of the given 0-based colour with range v.
    std::span<const EdgeId> edges_into(VertexId v, std::size_t color) const;

    /// A_i(v, w) = |v Λ^{e_i} w|, colour 0-based.
    const IntMatrix& vertex_matrix(std::size_t color) const { return vertex_matrices_.at(color); }
    /// A^n = prod_i A_i^{n_i}; throws OverflowError instead of wrapping.
    IntMatrix path_count_matrix(const Degree& n) const;

    Path vertex_path(VertexId v) const;
    Path edge_path(EdgeId e) const;

    /// Colour-sorted representative of a composable edge word.
    Path normal_form(std::span<const EdgeId> word) const;
    Path compose(const Path& p, const Path& q) const;
    /// The unique path p(a, b) of degree b - a with p = p(0,a) p(a,b) p(b,d(p)).
    Path segment(const Path& p, const Degree& a, const Degree& b) const;
    /// Vertex reached after the first `a` of p, i.e. s(p(0,a)).
    VertexId vertex_at(const Path& p, const Degree& a) const;

    /// All paths in v Λ^n, optionally restricted to source w. When `allowed`
    /// is non-empty every vertex visited must be allowed.
    std::vector<Path> enumerate_paths(VertexId v, const Degree& n,
                                      std::optional<VertexId> w = std::nullopt,
                                      std::span<const bool> allowed = {}) const;

    /// Λ^min(λ, γ): pairs (δ, ν) with λδ = γν of degree d(λ) ∨ d(γ).
    std::vector<std::pair<Path, Path>> lambda_min(const Path& lambda, const Path& gamma) const;

    const ComponentStructure& components() const { return components_; }

    /// reach(v, w): v Λ w != ∅ (identity paths included).
    bool reaches(VertexId v, VertexId w) const { return reach_[v][w]; }
    /// v Λ^l w != ∅ for some l != 0.
    bool reaches_nontrivially(VertexId v, VertexId w) const { return nontrivial_reach_[v][w]; }

    /// Rewrite a word so that its colour sequence equals `target`, using the
    /// squares in both directions. The multiset of colours must agree.
    std::vector<EdgeId> rearrange(std::span<const EdgeId> word,
                                  std::span<const std::size_t> target) const;

private:
    KGraph() = default;

    void build_indices();
    void build_components();
    // (lower-colour edge, higher-colour edge) <-> (higher, lower)
    std::pair<EdgeId, EdgeId> swap_pair(EdgeId left, EdgeId right) const;
    void check_composable(std::span<const EdgeId> word) const;

    std::size_t rank_ = 0;
    std::vector<std::string> vertex_names_;
    std::vector<Edge> edges_;
    std::vector<Square> squares_;
    std::unordered_map<std::string, VertexId> vertex_index_;
    std::unordered_map<std::string, EdgeId> edge_index_;
    std::vector<std::vector<EdgeId>> incoming_;  // [v * rank + color]
    std::unordered_map<std::uint64_t, std::pair<EdgeId, EdgeId>> sorted_to_unsorted_;
    std::unordered_map<std::uint64_t, std::pair<EdgeId, EdgeId>> unsorted_to_sorted_;
    std::vector<IntMatrix> vertex_matrices_;
    std::vector<std::vector<bool>> reach_;
    std::vector<std::vector<bool>> nontrivial_reach_;
    ComponentStructure components_;
};

}  // namespace kms
