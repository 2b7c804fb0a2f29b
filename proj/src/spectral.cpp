#include "kmsgraph/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "kmsgraph/simd/kernels.hpp"

namespace kms {

DenseMatrix DenseMatrix::from(const IntMatrix& m) {
    DenseMatrix out(m.size(), m.size());
    for (std::size_t r = 0; r < m.size(); ++r)
        for (std::size_t c = 0; c < m.size(); ++c) out(r, c) = static_cast<double>(m(r, c));
    return out;
}

DenseMatrix DenseMatrix::restrict(std::span<const VertexId> rows, std::span<const VertexId> cols) const {
    DenseMatrix out(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = (*this)(rows[i], cols[j]);
    return out;
}

std::vector<double> DenseMatrix::apply(std::span<const double> x) const {
    if (x.size() != cols_) throw std::invalid_argument("matrix/vector size mismatch");
    std::vector<double> y(rows_, 0.0);
    if (rows_ && cols_) simd::active_kernels().matvec(data_.data(), x.data(), y.data(), rows_, cols_);
    return y;
}

WellChosenSet default_well_chosen(const KGraph& graph) {
    WellChosenSet f;
    const auto bound = Degree::uniform(graph.rank(), static_cast<std::uint32_t>(graph.vertex_count()));
    for_each_degree_below(bound, [&](const Degree& d) {
        if (!d.is_zero()) f.degrees.push_back(d);
    });
    if (!is_well_chosen(graph, f))
        throw CertificationFailure("default box set is not well chosen");
    return f;
}

bool is_well_chosen(const KGraph& graph, const WellChosenSet& f) {
    if (f.degrees.empty()) return false;
    for (const auto& d : f.degrees)
        if (d.rank() != graph.rank() || d.is_zero()) return false;
    const IntMatrix a = a_f_matrix(graph, f);
    for (VertexId v = 0; v < graph.vertex_count(); ++v)
        for (VertexId w = 0; w < graph.vertex_count(); ++w)
            if ((a(v, w) > 0) != graph.reaches_nontrivially(v, w)) return false;
    return true;
}

IntMatrix a_f_matrix(const KGraph& graph, const WellChosenSet& f) {
    if (f.degrees.empty()) throw std::invalid_argument("empty well-chosen set");
    const std::size_t k = graph.rank();
    // cache colour powers; F is usually a box so each power is reused often
    std::vector<std::vector<IntMatrix>> powers(k);
    auto colour_power = [&](std::size_t i, std::uint32_t e) -> const IntMatrix& {
        auto& p = powers[i];
        if (p.empty()) p.push_back(IntMatrix::identity(graph.vertex_count()));
        while (p.size() <= e) p.push_back(p.back() * graph.vertex_matrix(i));
        return p[e];
    };
    IntMatrix out(graph.vertex_count());
    for (const auto& d : f.degrees) {
        if (d.rank() != k) throw std::invalid_argument("degree rank mismatch in F");
        if (d.is_zero()) throw std::invalid_argument("zero degree in F");
        IntMatrix term = IntMatrix::identity(graph.vertex_count());
        for (std::size_t i = 0; i < k; ++i)
            if (d[i]) term = term * colour_power(i, d[i]);
        out += term;
    }
    return out;
}

std::vector<std::vector<std::size_t>> support_components(const DenseMatrix& m) {
    const std::size_t n = m.rows();
    // Tarjan, iterative
    std::vector<int> index(n, -1), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::vector<std::vector<std::size_t>> out;
    int counter = 0;
    struct Frame {
        std::size_t v, next;
    };
    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] >= 0) continue;
        std::vector<Frame> call{{root, 0}};
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!call.empty()) {
            Frame& fr = call.back();
            if (fr.next < n) {
                const std::size_t w = fr.next++;
                if (m(fr.v, w) <= 0.0) continue;
                if (index[w] < 0) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[fr.v] = std::min(low[fr.v], index[w]);
                }
                continue;
            }
            const std::size_t v = fr.v;
            call.pop_back();
            if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
            if (low[v] == index[v]) {
                std::vector<std::size_t> comp;
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp.push_back(w);
                } while (w != v);
                std::sort(comp.begin(), comp.end());
                out.push_back(std::move(comp));
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

// Power iteration on M + shift*I from the uniform vector, stopped when the
// Collatz–Wielandt bounds of M agree to the relative tolerance.
PerronResult shifted_iteration(const DenseMatrix& m, double shift, const SpectralOptions& opts) {
    const auto& kern = simd::active_kernels();
    const std::size_t n = m.rows();
    PerronResult res;
    std::vector<double> x(n, 1.0 / static_cast<double>(n)), y(n), z(n);
    double lo = 0.0, hi = INFINITY;
    for (std::size_t it = 1; it <= opts.max_iterations; ++it) {
        kern.matvec(m.data(), x.data(), y.data(), n, n);
        z = x;
        kern.axpby(y.data(), shift, z.data(), n);  // z = Mx + shift x
        kern.ratio_bounds(z.data(), x.data(), n, &lo, &hi);
        const double total = kern.sum(z.data(), n);
        kern.scale(z.data(), 1.0 / total, n);
        x.swap(z);
        res.iterations = it;
        const double l = lo - shift, h = hi - shift;
        if (h - l <= opts.relative_tolerance * std::max(std::fabs(h), 1e-300)) break;
        if (it == opts.max_iterations)
            throw NonConvergence("power iteration did not converge", l, h, it);
    }
    res.lower = lo - shift;
    res.upper = hi - shift;
    res.radius = 0.5 * (res.lower + res.upper);
    kern.matvec(m.data(), x.data(), y.data(), n, n);
    double resid = 0.0;
    for (std::size_t i = 0; i < n; ++i) resid = std::max(resid, std::fabs(y[i] - res.radius * x[i]));
    res.residual = resid;
    res.vector = std::move(x);
    return res;
}

double max_row_sum(const DenseMatrix& m) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double r = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) r += m(i, j);
        s = std::max(s, r);
    }
    return s;
}

}  // namespace

PerronResult irreducible_perron(const DenseMatrix& m, const SpectralOptions& opts) {
    if (m.rows() != m.cols() || m.rows() == 0) throw std::invalid_argument("irreducible_perron: bad shape");
    if (m.rows() == 1) {
        PerronResult r;
        r.vector = {1.0};
        r.radius = r.lower = r.upper = m(0, 0);
        return r;
    }
    // M + sI is primitive for irreducible M; the shift removes periodicity.
    return shifted_iteration(m, std::max(1.0, max_row_sum(m)), opts);
}

double spectral_radius(const DenseMatrix& m, std::span<const VertexId> subset, const SpectralOptions& opts) {
    if (subset.empty()) return 0.0;
    const DenseMatrix sub = m.restrict(subset);
    double best = 0.0;
    for (const auto& comp : support_components(sub)) {
        if (comp.size() == 1) {
            best = std::max(best, sub(comp[0], comp[0]));
            continue;
        }
        std::vector<VertexId> idx(comp.begin(), comp.end());
        best = std::max(best, irreducible_perron(sub.restrict(idx), opts).radius);
    }
    return best;
}

double spectral_radius(const DenseMatrix& m, const SpectralOptions& opts) {
    std::vector<VertexId> all(m.rows());
    std::iota(all.begin(), all.end(), VertexId{0});
    return spectral_radius(m, all, opts);
}

PerronResult perron_vector(const DenseMatrix& m, const SpectralOptions& opts) {
    if (m.rows() != m.cols() || m.rows() == 0) throw std::invalid_argument("perron_vector: bad shape");
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (!(m(i, j) > 0.0)) throw std::invalid_argument("perron_vector: matrix not strictly positive");
    PerronResult r = shifted_iteration(m, 0.0, opts);
    if (r.residual > 1e-10 * std::max(1.0, r.radius))
        throw NonConvergence("Perron residual above tolerance", r.lower, r.upper, r.iterations);
    return r;
}

}  // namespace kms
