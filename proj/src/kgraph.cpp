#include "kmsgraph/kgraph.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

namespace kms {

namespace {

std::uint64_t pair_key(EdgeId a, EdgeId b) {
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
}

}  // namespace

const char* to_string(IssueKind kind) {
    switch (kind) {
        case IssueKind::InvalidRank: return "InvalidRank";
        case IssueKind::InvalidColor: return "InvalidColor";
        case IssueKind::MalformedSquare: return "MalformedSquare";
        case IssueKind::MissingSquare: return "MissingSquare";
        case IssueKind::DuplicateSquare: return "DuplicateSquare";
        case IssueKind::CubeInconsistency: return "CubeInconsistency";
        case IssueKind::SourceVertex: return "SourceVertex";
        case IssueKind::NonCommutingMatrices: return "NonCommutingMatrices";
    }
    return "Unknown";
}

ValidationError::ValidationError(std::vector<ValidationIssue> issues)
    : GraphError([&] {
          std::string msg = "invalid k-graph:";
          for (const auto& issue : issues) msg += std::string(" ") + to_string(issue.kind) + "(" + issue.detail + ")";
          return msg;
      }()),
      issues_(std::move(issues)) {}

bool Component::contains(VertexId v) const {
    return std::binary_search(vertices.begin(), vertices.end(), v);
}

KGraph KGraph::validate(const KGraphSpec& spec) {
    std::vector<ValidationIssue> issues;
    auto fail = [&](IssueKind kind, std::string detail) { issues.push_back({kind, std::move(detail)}); };

    if (spec.rank == 0) {
        fail(IssueKind::InvalidRank, "rank must be at least 1");
        throw ValidationError(std::move(issues));
    }

    KGraph g;
    g.rank_ = spec.rank;
    g.vertex_names_ = spec.vertices;
    for (const auto& e : spec.edges) {
        if (e.color < 1 || e.color > spec.rank) {
            fail(IssueKind::InvalidColor, e.id + " has colour " + std::to_string(e.color));
            continue;
        }
        g.edges_.push_back({e.id, e.color - 1, e.src, e.dst});
    }
    if (!issues.empty()) throw ValidationError(std::move(issues));
    g.build_indices();

    const auto& E = g.edges_;
    auto name = [&](EdgeId e) { return E[e].id; };

    for (const auto& sq : spec.squares) {
        const std::string label = "(" + name(sq.f) + "," + name(sq.g) + "," + name(sq.g2) + "," + name(sq.f2) + ")";
        const Edge& f = E[sq.f];
        const Edge& gg = E[sq.g];
        const Edge& g2 = E[sq.g2];
        const Edge& f2 = E[sq.f2];
        if (f.color != f2.color || gg.color != g2.color || f.color >= gg.color) {
            fail(IssueKind::MalformedSquare, label + " colours must satisfy c(f)=c(f2) < c(g)=c(g2)");
            continue;
        }
        if (f.src != gg.dst || f.dst != g2.dst || g2.src != f2.dst || gg.src != f2.src) {
            fail(IssueKind::MalformedSquare, label + " does not close: f g and g2 f2 must share range and source");
            continue;
        }
        auto [it1, fresh1] = g.sorted_to_unsorted_.emplace(pair_key(sq.f, sq.g), std::pair{sq.g2, sq.f2});
        if (!fresh1) fail(IssueKind::DuplicateSquare, "pair (" + name(sq.f) + "," + name(sq.g) + ") appears in more than one square");
        auto [it2, fresh2] = g.unsorted_to_sorted_.emplace(pair_key(sq.g2, sq.f2), std::pair{sq.f, sq.g});
        if (!fresh2) fail(IssueKind::DuplicateSquare, "pair (" + name(sq.g2) + "," + name(sq.f2) + ") appears in more than one square");
        g.squares_.push_back({sq.f, sq.g, sq.g2, sq.f2});
    }

    // Every colour-mixed composable pair must sit in exactly one square.
    for (EdgeId left = 0; left < E.size(); ++left) {
        for (std::size_t c = 0; c < g.rank_; ++c) {
            if (c == E[left].color) continue;
            for (EdgeId right : g.edges_into(E[left].src, c)) {
                const bool sorted = E[left].color < E[right].color;
                const auto& table = sorted ? g.sorted_to_unsorted_ : g.unsorted_to_sorted_;
                if (!table.contains(pair_key(left, right)))
                    fail(IssueKind::MissingSquare, name(left) + "," + name(right));
            }
        }
    }

    for (VertexId v = 0; v < g.vertex_count(); ++v)
        for (std::size_t c = 0; c < g.rank_; ++c)
            if (g.edges_into(v, c).empty())
                fail(IssueKind::SourceVertex, g.vertex_names_[v] + "," + std::to_string(c + 1));

    if (!issues.empty()) throw ValidationError(std::move(issues));

    if (g.rank_ >= 3) {
        // Sorting a three-colour word left-first and right-first applies the
        // squares in the two canonical orders; they must agree.
        for (EdgeId x = 0; x < E.size(); ++x) {
            for (std::size_t cy = 0; cy < g.rank_; ++cy) {
                if (cy == E[x].color) continue;
                for (EdgeId y : g.edges_into(E[x].src, cy)) {
                    for (std::size_t cz = 0; cz < g.rank_; ++cz) {
                        if (cz == E[x].color || cz == cy) continue;
                        for (EdgeId z : g.edges_into(E[y].src, cz)) {
                            std::vector<EdgeId> left{x, y, z};
                            std::vector<EdgeId> right{x, y, z};
                            for (std::size_t i = 1; i < 3; ++i)
                                for (std::size_t j = i; j > 0 && E[left[j - 1]].color > E[left[j]].color; --j) {
                                    auto [a, b] = g.swap_pair(left[j - 1], left[j]);
                                    left[j - 1] = a;
                                    left[j] = b;
                                }
                            bool swapped = true;
                            while (swapped) {
                                swapped = false;
                                for (std::size_t j = 2; j > 0; --j) {
                                    if (E[right[j - 1]].color > E[right[j]].color) {
                                        auto [a, b] = g.swap_pair(right[j - 1], right[j]);
                                        right[j - 1] = a;
                                        right[j] = b;
                                        swapped = true;
                                        break;
                                    }
                                }
                            }
                            if (left != right)
                                fail(IssueKind::CubeInconsistency, name(x) + "," + name(y) + "," + name(z));
                        }
                    }
                }
            }
        }
        if (!issues.empty()) throw ValidationError(std::move(issues));
    }

    const std::size_t n = g.vertex_count();
    g.vertex_matrices_.assign(g.rank_, IntMatrix(n));
    for (const auto& e : E) g.vertex_matrices_[e.color](e.dst, e.src) += 1;
    for (std::size_t i = 0; i < g.rank_; ++i)
        for (std::size_t j = i + 1; j < g.rank_; ++j)
            if (g.vertex_matrices_[i] * g.vertex_matrices_[j] != g.vertex_matrices_[j] * g.vertex_matrices_[i])
                fail(IssueKind::NonCommutingMatrices, "A_" + std::to_string(i + 1) + " A_" + std::to_string(j + 1));
    if (!issues.empty()) throw ValidationError(std::move(issues));

    g.build_components();
    return g;
}

void KGraph::build_indices() {
    vertex_index_.clear();
    for (VertexId v = 0; v < vertex_names_.size(); ++v) vertex_index_.emplace(vertex_names_[v], v);
    edge_index_.clear();
    incoming_.assign(vertex_names_.size() * rank_, {});
    for (EdgeId e = 0; e < edges_.size(); ++e) {
        edge_index_.emplace(edges_[e].id, e);
        incoming_[edges_[e].dst * rank_ + edges_[e].color].push_back(e);
    }
}

void KGraph::build_components() {
    const std::size_t n = vertex_count();
    reach_.assign(n, std::vector<bool>(n, false));
    nontrivial_reach_.assign(n, std::vector<bool>(n, false));
    for (VertexId v = 0; v < n; ++v) {
        // Walk backwards along edges: from a range to its sources.
        std::deque<VertexId> queue;
        for (std::size_t c = 0; c < rank_; ++c)
            for (EdgeId e : edges_into(v, c))
                if (!nontrivial_reach_[v][edges_[e].src]) {
                    nontrivial_reach_[v][edges_[e].src] = true;
                    queue.push_back(edges_[e].src);
                }
        while (!queue.empty()) {
            const VertexId u = queue.front();
            queue.pop_front();
            for (std::size_t c = 0; c < rank_; ++c)
                for (EdgeId e : edges_into(u, c))
                    if (!nontrivial_reach_[v][edges_[e].src]) {
                        nontrivial_reach_[v][edges_[e].src] = true;
                        queue.push_back(edges_[e].src);
                    }
        }
        reach_[v] = nontrivial_reach_[v];
        reach_[v][v] = true;
    }

    ComponentStructure cs;
    cs.component_of.assign(n, n);
    for (VertexId v = 0; v < n; ++v) {
        if (cs.component_of[v] != n) continue;
        Component comp;
        comp.index = cs.components.size();
        for (VertexId w = v; w < n; ++w)
            if (reach_[v][w] && reach_[w][v]) {
                comp.vertices.push_back(w);
                cs.component_of[w] = comp.index;
            }
        comp.trivial = comp.vertices.size() == 1 && !nontrivial_reach_[v][v];
        for (VertexId w = 0; w < n; ++w) {
            if (reach_[w][v]) comp.closure.push_back(w);
            if (reach_[v][w]) comp.hereditary_closure.push_back(w);
        }
        cs.components.push_back(std::move(comp));
    }
    const std::size_t m = cs.components.size();
    cs.order.assign(m, std::vector<bool>(m, false));
    for (std::size_t c = 0; c < m; ++c)
        for (std::size_t d = 0; d < m; ++d)
            cs.order[c][d] = reach_[cs.components[c].vertices.front()][cs.components[d].vertices.front()];
    components_ = std::move(cs);
}

std::optional<VertexId> KGraph::find_vertex(const std::string& name) const {
    auto it = vertex_index_.find(name);
    if (it == vertex_index_.end()) return std::nullopt;
    return it->second;
}

std::optional<EdgeId> KGraph::find_edge(const std::string& name) const {
    auto it = edge_index_.find(name);
    if (it == edge_index_.end()) return std::nullopt;
    return it->second;
}

std::span<const EdgeId> KGraph::edges_into(VertexId v, std::size_t color) const {
    return incoming_.at(v * rank_ + color);
}

IntMatrix KGraph::path_count_matrix(const Degree& n) const {
    if (n.rank() != rank_) throw std::invalid_argument("degree rank mismatch");
    IntMatrix out = IntMatrix::identity(vertex_count());
    for (std::size_t i = 0; i < rank_; ++i)
        if (n[i] > 0) out = out * vertex_matrices_[i].power(n[i]);
    return out;
}

Path KGraph::vertex_path(VertexId v) const {
    if (v >= vertex_count()) throw std::out_of_range("unknown vertex");
    return Path{v, v, Degree(rank_), {}};
}

Path KGraph::edge_path(EdgeId e) const {
    const Edge& edge = edges_.at(e);
    return Path{edge.dst, edge.src, Degree::unit(rank_, edge.color), {e}};
}

std::pair<EdgeId, EdgeId> KGraph::swap_pair(EdgeId left, EdgeId right) const {
    const bool sorted = edges_[left].color < edges_[right].color;
    const auto& table = sorted ? sorted_to_unsorted_ : unsorted_to_sorted_;
    auto it = table.find(pair_key(left, right));
    if (it == table.end())
        throw GraphError("no square for pair (" + edges_[left].id + "," + edges_[right].id + ")");
    return it->second;
}

void KGraph::check_composable(std::span<const EdgeId> word) const {
    for (std::size_t i = 0; i + 1 < word.size(); ++i)
        if (edges_.at(word[i]).src != edges_.at(word[i + 1]).dst)
            throw PathError(PathError::Kind::NotComposable,
                            "edges " + edges_[word[i]].id + " and " + edges_[word[i + 1]].id +
                                " are not composable at position " + std::to_string(i),
                            i);
    if (word.size() == 1) (void)edges_.at(word[0]);
}

Path KGraph::normal_form(std::span<const EdgeId> word) const {
    if (word.empty()) throw PathError(PathError::Kind::EmptyWord, "empty edge word has no vertex");
    check_composable(word);
    Path p;
    p.edges.assign(word.begin(), word.end());
    auto& w = p.edges;
    for (std::size_t i = 1; i < w.size(); ++i)
        for (std::size_t j = i; j > 0 && edges_[w[j - 1]].color > edges_[w[j]].color; --j) {
            auto [a, b] = swap_pair(w[j - 1], w[j]);
            w[j - 1] = a;
            w[j] = b;
        }
    p.range = edges_[w.front()].dst;
    p.source = edges_[w.back()].src;
    p.degree = Degree(rank_);
    for (EdgeId e : w) p.degree[edges_[e].color] += 1;
    return p;
}

Path KGraph::compose(const Path& p, const Path& q) const {
    if (p.source != q.range)
        throw PathError(PathError::Kind::NotComposable,
                        "cannot compose: s(p)=" + vertex_names_[p.source] + " but r(q)=" + vertex_names_[q.range],
                        p.edges.size());
    if (p.is_vertex()) return q;
    if (q.is_vertex()) return p;
    std::vector<EdgeId> word = p.edges;
    word.insert(word.end(), q.edges.begin(), q.edges.end());
    return normal_form(word);
}

std::vector<EdgeId> KGraph::rearrange(std::span<const EdgeId> word, std::span<const std::size_t> target) const {
    if (word.size() != target.size()) throw std::invalid_argument("rearrange: length mismatch");
    // Label the j-th occurrence of colour c with the position of the j-th
    // occurrence of c in the target sequence, then sort by label.
    std::vector<std::vector<std::size_t>> slots(rank_);
    for (std::size_t i = 0; i < target.size(); ++i) slots.at(target[i]).push_back(i);
    std::vector<std::size_t> seen(rank_, 0);
    std::vector<EdgeId> w(word.begin(), word.end());
    std::vector<std::size_t> label(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        const std::size_t c = edges_[w[i]].color;
        if (seen[c] >= slots[c].size()) throw std::invalid_argument("rearrange: colour multiset mismatch");
        label[i] = slots[c][seen[c]++];
    }
    for (std::size_t i = 1; i < w.size(); ++i)
        for (std::size_t j = i; j > 0 && label[j - 1] > label[j]; --j) {
            auto [a, b] = swap_pair(w[j - 1], w[j]);
            w[j - 1] = a;
            w[j] = b;
            std::swap(label[j - 1], label[j]);
        }
    return w;
}

Path KGraph::segment(const Path& p, const Degree& a, const Degree& b) const {
    if (!leq(a, b) || !leq(b, p.degree))
        throw PathError(PathError::Kind::DegreeOutOfRange,
                        "segment " + a.to_string() + ".." + b.to_string() + " outside " + p.degree.to_string());
    if (a.is_zero() && b == p.degree) return p;

    std::vector<std::size_t> target;
    target.reserve(p.edges.size());
    auto append = [&](const Degree& d) {
        for (std::size_t c = 0; c < rank_; ++c)
            for (std::uint32_t i = 0; i < d[c]; ++i) target.push_back(c);
    };
    append(a);
    append(b - a);
    append(p.degree - b);
    const std::vector<EdgeId> w = rearrange(p.edges, target);

    const std::size_t begin = a.total();
    const std::size_t end = b.total();
    Path out;
    out.degree = b - a;
    out.edges.assign(w.begin() + static_cast<std::ptrdiff_t>(begin), w.begin() + static_cast<std::ptrdiff_t>(end));
    if (!out.edges.empty()) {
        out.range = edges_[out.edges.front()].dst;
        out.source = edges_[out.edges.back()].src;
    } else {
        const VertexId v = begin == 0 ? p.range : edges_[w[begin - 1]].src;
        out.range = out.source = v;
    }
    return out;
}

VertexId KGraph::vertex_at(const Path& p, const Degree& a) const {
    if (a.is_zero()) return p.range;
    return segment(p, Degree(rank_), a).source;
}

std::vector<Path> KGraph::enumerate_paths(VertexId v, const Degree& n, std::optional<VertexId> w,
                                          std::span<const bool> allowed) const {
    if (n.rank() != rank_) throw std::invalid_argument("degree rank mismatch");
    std::vector<Path> out;
    if (!allowed.empty() && !allowed[v]) return out;

    std::vector<std::size_t> colors;
    for (std::size_t c = 0; c < rank_; ++c)
        for (std::uint32_t i = 0; i < n[c]; ++i) colors.push_back(c);

    std::vector<EdgeId> word;
    word.reserve(colors.size());
    auto dfs = [&](auto&& self, VertexId at) -> void {
        if (word.size() == colors.size()) {
            if (w && at != *w) return;
            out.push_back(Path{v, at, n, word});
            return;
        }
        for (EdgeId e : edges_into(at, colors[word.size()])) {
            const VertexId next = edges_[e].src;
            if (!allowed.empty() && !allowed[next]) continue;
            word.push_back(e);
            self(self, next);
            word.pop_back();
        }
    };
    dfs(dfs, v);
    return out;
}

std::vector<std::pair<Path, Path>> KGraph::lambda_min(const Path& lambda, const Path& gamma) const {
    std::vector<std::pair<Path, Path>> out;
    if (lambda.range != gamma.range) return out;
    const Degree m = join(lambda.degree, gamma.degree);
    for (Path& delta : enumerate_paths(lambda.source, m - lambda.degree)) {
        const Path mu = compose(lambda, delta);
        if (segment(mu, Degree(rank_), gamma.degree) != gamma) continue;
        out.emplace_back(std::move(delta), segment(mu, gamma.degree, m));
    }
    return out;
}

}  // namespace kms
