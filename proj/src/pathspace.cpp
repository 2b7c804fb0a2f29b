#include "kmsgraph/pathspace.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <numeric>
#include <sstream>

#include "kmsgraph/spectral.hpp"

namespace kms {

namespace {

std::string describe(const KGraph& g, const Path& p) {
    if (p.is_vertex()) return "@" + g.vertex_name(p.range);
    std::string s;
    for (std::size_t i = 0; i < p.edges.size(); ++i) {
        if (i) s += " ";
        s += g.edge(p.edges[i]).id;
    }
    return s;
}

void note(CheckReport& rep, std::string msg) {
    if (rep.examples.size() < 8) rep.examples.push_back(std::move(msg));
}

// Contiguous mask for KGraph::enumerate_paths.
struct Mask {
    std::unique_ptr<bool[]> data;
    std::size_t n = 0;
    Mask(const KGraph& g, const Component& c) : data(new bool[g.vertex_count()]()), n(g.vertex_count()) {
        for (VertexId v : c.vertices) data[v] = true;
    }
    std::span<const bool> span() const { return {data.get(), n}; }
};

}  // namespace

// ------------------------------------------------------------------ measures

CylinderMeasure::CylinderMeasure(const KGraph& graph, HarmonicVector psi) : graph_(&graph), psi_(std::move(psi)) {
    if (psi_.psi.size() != graph.vertex_count()) throw std::invalid_argument("ψ has the wrong length");
    if (psi_.r.size() != graph.rank()) throw std::invalid_argument("r has the wrong rank");
}

double CylinderMeasure::weight(const Degree& d) const {
    double e = 0.0;
    for (std::size_t i = 0; i < d.rank(); ++i) e += psi_.r[i] * d[i];
    return std::exp(-psi_.beta * e);
}

double CylinderMeasure::mass(const Path& lambda) const { return weight(lambda.degree) * psi_.psi.at(lambda.source); }

double CylinderMeasure::total_mass() const { return std::accumulate(psi_.psi.begin(), psi_.psi.end(), 0.0); }

std::vector<Path> paths_up_to(const KGraph& graph, const Degree& bound) {
    std::vector<Path> out;
    for (VertexId v = 0; v < graph.vertex_count(); ++v)
        for_each_degree_below(bound, [&](const Degree& d) {
            auto ps = graph.enumerate_paths(v, d);
            out.insert(out.end(), std::make_move_iterator(ps.begin()), std::make_move_iterator(ps.end()));
        });
    return out;
}

CheckReport check_consistency(const KGraph& graph, const CylinderMeasure& m, const Degree& depth, double tol) {
    CheckReport rep;
    for (const Path& lambda : paths_up_to(graph, depth)) {
        const double parent = m.mass(lambda);
        for (std::size_t i = 0; i < graph.rank(); ++i) {
            double children = 0.0;
            for (EdgeId e : graph.edges_into(lambda.source, i))
                children += m.mass(graph.compose(lambda, graph.edge_path(e)));
            const double err = std::fabs(parent - children);
            ++rep.checked;
            rep.worst = std::max(rep.worst, err);
            if (err > tol) {
                ++rep.violations;
                note(rep, "Z(" + describe(graph, lambda) + ") colour " + std::to_string(i + 1) + ": " +
                              std::to_string(parent) + " vs " + std::to_string(children));
            }
        }
    }
    return rep;
}

CheckReport check_quasi_invariance(const KGraph& graph, const CylinderMeasure& m,
                                   const std::vector<std::pair<Path, Path>>& pairs, double tol) {
    CheckReport rep;
    for (const auto& [lambda, gamma] : pairs) {
        if (lambda.source != gamma.source) throw std::invalid_argument("quasi-invariance pair with s(λ) != s(γ)");
        const double lhs = m.mass(gamma);
        double e = 0.0;
        const auto diff = difference(lambda.degree, gamma.degree);
        for (std::size_t i = 0; i < diff.size(); ++i) e += m.vector().r[i] * static_cast<double>(diff[i]);
        const double rhs = std::exp(m.vector().beta * e) * m.mass(lambda);
        const double scale = std::max({std::fabs(lhs), std::fabs(rhs), 1e-300});
        const double err = std::fabs(lhs - rhs) / scale;
        ++rep.checked;
        rep.worst = std::max(rep.worst, err);
        if (err > tol) {
            ++rep.violations;
            note(rep, "(" + describe(graph, lambda) + " | " + describe(graph, gamma) + ")");
        }
    }
    return rep;
}

std::vector<std::pair<Path, Path>> same_source_pairs(const KGraph& graph, const Degree& bound) {
    std::vector<std::vector<Path>> by_source(graph.vertex_count());
    for (Path& p : paths_up_to(graph, bound)) by_source[p.source].push_back(std::move(p));
    std::vector<std::pair<Path, Path>> out;
    for (const auto& group : by_source)
        for (const auto& a : group)
            for (const auto& b : group) out.emplace_back(a, b);
    return out;
}

// --------------------------------------------------------------- periodicity

const char* to_string(ShiftVerdict v) {
    switch (v) {
        case ShiftVerdict::Holds: return "holds";
        case ShiftVerdict::Refuted: return "refuted";
        case ShiftVerdict::Unknown: return "unknown";
    }
    return "unknown";
}

std::size_t default_shift_depth(const Component& c, const Degree& m, const Degree& n) {
    return c.vertices.size() + join(m, n).max_coord();
}

ShiftResult shift_relation_holds(const KGraph& graph, const Component& c, const Degree& m, const Degree& n,
                                 std::size_t p_max, const SearchBudget& budget) {
    ShiftResult res;
    if (m == n) {
        res.verdict = ShiftVerdict::Holds;
        res.depth = p_max;
        return res;
    }
    const Mask mask(graph, c);
    const Degree base = join(m, n);
    for (std::size_t p = 1; p <= p_max; ++p) {
        const Degree step = Degree::uniform(graph.rank(), static_cast<std::uint32_t>(p));
        const Degree d = base + step;
        std::size_t count = 0;
        try {
            const IntMatrix a = graph.path_count_matrix(d);
            for (VertexId v : c.vertices)
                for (VertexId w : c.vertices) count += static_cast<std::size_t>(a(v, w));
        } catch (const OverflowError&) {
            count = budget.max_paths + 1;
        }
        if (count > budget.max_paths) {
            res.verdict = ShiftVerdict::Unknown;
            return res;
        }
        for (VertexId v : c.vertices) {
            for (const Path& lambda : graph.enumerate_paths(v, d, std::nullopt, mask.span())) {
                ++res.paths_checked;
                if (graph.segment(lambda, m, m + step) != graph.segment(lambda, n, n + step)) {
                    res.verdict = ShiftVerdict::Refuted;
                    res.depth = p;
                    res.witness = lambda;
                    return res;
                }
            }
        }
        res.depth = p;
    }
    res.verdict = ShiftVerdict::Holds;
    return res;
}

PeriodicityGroup::Membership PeriodicityGroup::membership(const IntVector& g) const {
    if (group.contains(g)) return Membership::In;
    IntVector key = g;
    for (std::size_t i = 0; i < key.size(); ++i) {
        if (key[i] == 0) continue;
        if (key[i] < 0)
            for (auto& x : key) x = -x;
        break;
    }
    auto it = status.find(key);
    if (it == status.end()) return Membership::Unknown;
    return it->second == ShiftVerdict::Refuted ? Membership::Out : Membership::Unknown;
}

std::size_t PeriodicityGroup::certified_depth() const { return p_max ? *p_max : depth_used; }

PeriodicityGroup periodicity_group(const KGraph& graph, const Component& c, std::optional<Degree> box,
                                   std::optional<std::size_t> p_max, const SearchBudget& budget) {
    if (c.trivial) throw std::invalid_argument("periodicity_group: trivial component");
    const std::size_t k = graph.rank();
    PeriodicityGroup out;
    out.box = box ? *box : Degree::uniform(k, static_cast<std::uint32_t>(2 * c.vertices.size()));
    out.p_max = p_max;
    out.group = Lattice(k);

    // Differences g with |g_i| <= box_i and first nonzero coordinate positive,
    // ordered by l1 norm. Only the pair (g+, g-) is tested: σ^l is onto the
    // path space of a component without sources, so σ^{m+l} = σ^{n+l} forces
    // σ^m = σ^n.
    std::vector<IntVector> diffs;
    IntVector g(k);
    auto rec = [&](auto&& self, std::size_t i) -> void {
        if (i == k) {
            for (auto x : g) {
                if (x == 0) continue;
                if (x > 0) diffs.push_back(g);
                break;
            }
            return;
        }
        const auto b = static_cast<std::int64_t>(out.box[i]);
        for (std::int64_t x = -b; x <= b; ++x) {
            g[i] = x;
            self(self, i + 1);
        }
    };
    rec(rec, 0);
    auto l1 = [](const IntVector& v) {
        std::int64_t s = 0;
        for (auto x : v) s += std::llabs(x);
        return s;
    };
    std::stable_sort(diffs.begin(), diffs.end(), [&](const IntVector& a, const IntVector& b) { return l1(a) < l1(b); });

    for (const auto& d : diffs) {
        if (out.group.contains(d)) {
            out.status[d] = ShiftVerdict::Holds;
            continue;
        }
        Degree m(k), n(k);
        for (std::size_t i = 0; i < k; ++i) {
            if (d[i] > 0) m[i] = static_cast<std::uint32_t>(d[i]);
            else n[i] = static_cast<std::uint32_t>(-d[i]);
        }
        const std::size_t depth = p_max ? *p_max : default_shift_depth(c, m, n);
        out.depth_used = std::max(out.depth_used, depth);
        const auto res = shift_relation_holds(graph, c, m, n, depth, budget);
        out.status[d] = res.verdict;
        if (res.verdict == ShiftVerdict::Holds) out.group = out.group.with(d);
        if (res.verdict == ShiftVerdict::Unknown) out.complete = false;
    }
    return out;
}

// ---------------------------------------------------------------- characters

namespace {

Rational frac(const Rational& q) {
    using boost::multiprecision::denominator;
    using boost::multiprecision::numerator;
    BigInt num = numerator(q), den = denominator(q);
    BigInt fl = num / den;
    if (num % den != 0 && num < 0) fl -= 1;
    return q - Rational(fl);
}

}  // namespace

Phase Phase::exact(const Rational& q) {
    Phase p;
    p.exact_ = frac(q);
    p.value_ = to_double(*p.exact_);
    return p;
}

Phase Phase::approx(double x) {
    Phase p;
    p.exact_.reset();
    p.value_ = x - std::floor(x);
    if (p.value_ >= 1.0) p.value_ = 0.0;
    return p;
}

bool Phase::is_zero() const { return exact_ ? *exact_ == 0 : value_ == 0.0; }

Phase Phase::operator+(const Phase& o) const {
    if (exact_ && o.exact_) return exact(*exact_ + *o.exact_);
    return approx(value_ + o.value_);
}

Phase Phase::operator-() const {
    if (exact_) return exact(-*exact_);
    return approx(-value_);
}

Phase Phase::times(std::int64_t n) const {
    if (exact_) return exact(*exact_ * n);
    return approx(value_ * static_cast<double>(n));
}

std::string Phase::to_string() const {
    if (exact_) {
        std::ostringstream os;
        os << *exact_;
        return os.str();
    }
    std::ostringstream os;
    os.precision(17);
    os << value_;
    return os.str();
}

std::complex<double> unit_phase(const Phase& theta) {
    if (theta.is_exact()) {
        const Rational& q = *theta.exact_value();
        if (q == 0) return {1.0, 0.0};
        if (q == Rational(1, 4)) return {0.0, 1.0};
        if (q == Rational(1, 2)) return {-1.0, 0.0};
        if (q == Rational(3, 4)) return {0.0, -1.0};
    }
    const double a = 2.0 * std::numbers::pi * theta.value();
    return {std::cos(a), std::sin(a)};
}

Phase Character::phase_at(const Lattice& per, const IntVector& g) const {
    const auto coords = per.coordinates(g);
    if (!coords) throw std::invalid_argument("character evaluated outside its group");
    if (coords->size() != theta.size()) throw std::invalid_argument("character dimension mismatch");
    Phase out = Phase::exact(0);
    for (std::size_t j = 0; j < theta.size(); ++j) out = out + theta[j].times((*coords)[j]);
    return out;
}

Character Character::operator*(const Character& o) const {
    if (theta.size() != o.theta.size()) throw std::invalid_argument("character dimension mismatch");
    Character out;
    for (std::size_t j = 0; j < theta.size(); ++j) out.theta.push_back(theta[j] + o.theta[j]);
    return out;
}

bool Character::is_trivial() const {
    return std::all_of(theta.begin(), theta.end(), [](const Phase& p) { return p.is_zero(); });
}

Phase TorusPoint::phase_at(const IntVector& g) const {
    if (g.size() != eta.size()) throw std::invalid_argument("torus point rank mismatch");
    Phase out = Phase::exact(0);
    for (std::size_t i = 0; i < g.size(); ++i) out = out + eta[i].times(g[i]);
    return out;
}

Character TorusPoint::restrict_to(const Lattice& per) const {
    Character out;
    for (const auto& b : per.basis()) out.theta.push_back(phase_at(b));
    return out;
}

// ------------------------------------------------------------------ isotropy

MassInterval isotropy_cylinder_bounds(const KGraph& graph, const Component& c, const CylinderMeasure& m,
                                      const Path& lambda, const Path& gamma, std::size_t depth,
                                      const SearchBudget& budget) {
    MassInterval out;
    out.depth = depth;
    if (lambda.range != gamma.range) return out;
    const std::size_t k = graph.rank();
    const Degree top = join(lambda.degree, gamma.degree);
    const Degree low = meet(lambda.degree, gamma.degree);
    const Degree mp = lambda.degree - low, np = gamma.degree - low;
    const bool relation = shift_relation_holds(graph, c, mp, np, default_shift_depth(c, mp, np), budget).verdict ==
                          ShiftVerdict::Holds;

    std::vector<std::vector<Path>> steps(graph.vertex_count());
    const Degree one = Degree::uniform(k, 1);
    for (VertexId v = 0; v < graph.vertex_count(); ++v) steps[v] = graph.enumerate_paths(v, one);

    std::vector<Path> frontier;
    for (auto& [delta, nu] : graph.lambda_min(lambda, gamma)) frontier.push_back(graph.compose(lambda, delta));

    for (std::size_t q = 0;; ++q) {
        const Degree qd = Degree::uniform(k, static_cast<std::uint32_t>(q));
        double open = 0.0;
        std::vector<Path> next;
        for (const Path& rho : frontier) {
            const double mass = m.mass(rho);
            if (mass == 0.0) continue;  // source outside closure(C): every extension is null too
            if (graph.segment(rho, lambda.degree, lambda.degree + qd) != graph.segment(rho, gamma.degree, gamma.degree + qd))
                continue;
            // d(λ) = d(γ) makes the relation trivial; otherwise it is forced
            // once the tail sits in C, where it holds on every path
            if (mp == np || (relation && c.contains(graph.vertex_at(rho, low + qd)))) {
                out.lo += mass;
                continue;
            }
            open += mass;
            if (q < depth)
                for (const Path& s : steps[rho.source]) next.push_back(graph.compose(rho, s));
        }
        if (q == depth || next.empty()) {
            out.hi = out.lo + open;
            break;
        }
        if (next.size() > budget.max_paths) throw SearchExplosion("isotropy refinement exceeded the path budget");
        frontier = std::move(next);
    }
    return out;
}

double non_eventual_mass(const KGraph& graph, const Component& c, const CylinderMeasure& m, std::size_t q) {
    std::vector<double> z(graph.vertex_count(), 0.0);
    for (VertexId w = 0; w < graph.vertex_count(); ++w)
        if (!c.contains(w)) z[w] = m.vertex_mass(w);
    for (std::size_t i = 0; i < graph.rank(); ++i) {
        const DenseMatrix a = DenseMatrix::from(graph.vertex_matrix(i));
        for (std::size_t t = 0; t < q; ++t) z = a.apply(z);
    }
    const double total = std::accumulate(z.begin(), z.end(), 0.0);
    return total * m.weight(Degree::uniform(graph.rank(), static_cast<std::uint32_t>(q)));
}

Path sample_path(const KGraph& graph, const CylinderMeasure& m, std::size_t q, std::mt19937_64& rng) {
    const auto& psi = m.vector().psi;
    std::discrete_distribution<VertexId> start(psi.begin(), psi.end());
    VertexId at = start(rng);
    const VertexId range = at;
    std::vector<EdgeId> word;
    for (std::size_t t = 0; t < q; ++t)
        for (std::size_t i = 0; i < graph.rank(); ++i) {
            const auto in = graph.edges_into(at, i);
            std::vector<double> w;
            for (EdgeId e : in) w.push_back(psi[graph.edge(e).src]);
            std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
            const EdgeId e = in[pick(rng)];
            word.push_back(e);
            at = graph.edge(e).src;
        }
    if (word.empty()) return graph.vertex_path(range);
    return graph.normal_form(word);
}

AuditReport isotropy_audit(const KGraph& graph, const Component& c, const PeriodicityGroup& per,
                           const CylinderMeasure& m, const Degree& box, std::size_t samples, std::size_t window,
                           std::uint64_t seed) {
    const std::size_t k = graph.rank();
    const std::size_t entry_limit = 2 * graph.vertex_count();
    const std::size_t length = entry_limit + box.max_coord() + window;
    const Degree win = Degree::uniform(k, static_cast<std::uint32_t>(window));

    // differences outside Per(C), as pairs (g+, g-)
    std::vector<std::pair<Degree, Degree>> tests;
    IntVector g(k);
    auto rec = [&](auto&& self, std::size_t i) -> void {
        if (i == k) {
            bool positive = false;
            for (auto x : g)
                if (x != 0) {
                    positive = x > 0;
                    break;
                }
            if (!positive || per.membership(g) != PeriodicityGroup::Membership::Out) return;
            Degree a(k), b(k);
            for (std::size_t j = 0; j < k; ++j) {
                if (g[j] > 0) a[j] = static_cast<std::uint32_t>(g[j]);
                else b[j] = static_cast<std::uint32_t>(-g[j]);
            }
            tests.emplace_back(a, b);
            return;
        }
        const auto bd = static_cast<std::int64_t>(box[i]);
        for (std::int64_t x = -bd; x <= bd; ++x) {
            g[i] = x;
            self(self, i + 1);
        }
    };
    rec(rec, 0);

    AuditReport rep;
    std::mt19937_64 rng(seed);
    for (std::size_t s = 0; s < samples; ++s) {
        ++rep.samples;
        const Path x = sample_path(graph, m, length, rng);
        std::optional<std::size_t> entry;
        for (std::size_t t = 0; t <= entry_limit; ++t)
            if (c.contains(graph.vertex_at(x, Degree::uniform(k, static_cast<std::uint32_t>(t))))) {
                entry = t;
                break;
            }
        if (!entry) continue;
        ++rep.eventually_in_c;
        const Degree from = Degree::uniform(k, static_cast<std::uint32_t>(*entry));
        const Path tail = graph.segment(x, from, x.degree);
        for (const auto& [a, b] : tests) {
            if (graph.segment(tail, a, a + win) == graph.segment(tail, b, b + win)) {
                ++rep.violations;
                if (rep.examples.size() < 8)
                    rep.examples.push_back("sample " + std::to_string(s) + ": shift " + a.to_string() + " vs " +
                                           b.to_string());
            }
        }
    }
    return rep;
}

}  // namespace kms
