#include "kmsgraph/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "linalg.hpp"

namespace kms {

const char* to_string(HarmonicStatus s) {
    switch (s) {
        case HarmonicStatus::Harmonic: return "harmonic";
        case HarmonicStatus::Trivial: return "trivial";
        case HarmonicStatus::NotPositive: return "not-positive";
        case HarmonicStatus::Dominated: return "dominated";
    }
    return "unknown";
}

SpectrumVector component_spectrum(const KGraph& graph, const Component& c) {
    SpectrumVector out(graph.rank(), 0.0);
    for (std::size_t i = 0; i < graph.rank(); ++i)
        out[i] = spectral_radius(DenseMatrix::from(graph.vertex_matrix(i)), c.vertices);
    return out;
}

namespace {

HarmonicDecision decide(const KGraph& graph, std::size_t ci, const std::vector<SpectrumVector>& spectra,
                        const Tolerances& tol) {
    const auto& cs = graph.components();
    HarmonicDecision d;
    d.spectrum = spectra[ci];
    if (cs.components[ci].trivial) {
        d.status = HarmonicStatus::Trivial;
        return d;
    }
    for (double s : d.spectrum)
        if (!(s > tol.eps_cmp)) {
            d.status = HarmonicStatus::NotPositive;
            return d;
        }
    for (std::size_t di = 0; di < cs.components.size(); ++di) {
        if (di == ci || !cs.leq(di, ci)) continue;  // D <= C means D sits in closure(C)
        bool below = true, strict = false;
        for (std::size_t i = 0; i < graph.rank(); ++i) {
            const double gap = d.spectrum[i] - spectra[di][i];
            if (gap < -tol.eps_cmp) below = false;
            if (gap > tol.eps_cmp) strict = true;
        }
        if (!below || !strict) {
            d.status = HarmonicStatus::Dominated;
            d.blocking = di;
            return d;
        }
    }
    d.status = HarmonicStatus::Harmonic;
    return d;
}

std::vector<SpectrumVector> all_spectra(const KGraph& graph) {
    std::vector<SpectrumVector> out;
    for (const auto& c : graph.components().components) out.push_back(component_spectrum(graph, c));
    return out;
}

std::vector<VertexId> closure_minus(const Component& c) {
    std::vector<VertexId> out;
    for (VertexId v : c.closure)
        if (!c.contains(v)) out.push_back(v);
    return out;
}

}  // namespace

HarmonicDecision harmonic_decision(const KGraph& graph, std::size_t component, const Tolerances& tol) {
    return decide(graph, component, all_spectra(graph), tol);
}

bool is_harmonic(const KGraph& graph, std::size_t component, const Tolerances& tol) {
    return harmonic_decision(graph, component, tol).harmonic();
}

ExtremalVector extremal_vector(const KGraph& graph, std::size_t component, const WellChosenSet& f,
                               const Tolerances& tol) {
    const Component& c = graph.components().components.at(component);
    if (!is_harmonic(graph, component, tol))
        throw std::invalid_argument("extremal_vector: component is not harmonic");
    const DenseMatrix af = DenseMatrix::from(a_f_matrix(graph, f));
    const PerronResult pr = perron_vector(af.restrict(c.vertices));
    const double rho = pr.radius;

    const auto out = closure_minus(c);
    std::vector<double> x(graph.vertex_count(), 0.0);
    for (std::size_t i = 0; i < c.vertices.size(); ++i) x[c.vertices[i]] = pr.vector[i];

    if (!out.empty()) {
        // (ρ I - A_oo) x_o = A_oC x_C
        linalg::Matrix a(out.size(), std::vector<double>(out.size(), 0.0));
        std::vector<double> b(out.size(), 0.0);
        for (std::size_t i = 0; i < out.size(); ++i) {
            for (std::size_t j = 0; j < out.size(); ++j) a[i][j] = -af(out[i], out[j]);
            a[i][i] += rho;
            for (std::size_t j = 0; j < c.vertices.size(); ++j) b[i] += af(out[i], c.vertices[j]) * pr.vector[j];
        }
        auto sol = linalg::solve(std::move(a), std::move(b));
        if (!sol) throw SingularSolve("extremal_vector: singular system on closure(C) \\ C");
        for (std::size_t i = 0; i < out.size(); ++i) {
            if (!((*sol)[i] > 0.0)) throw SingularSolve("extremal_vector: non-positive entry on closure(C)");
            x[out[i]] = (*sol)[i];
        }
    }
    const double total = std::accumulate(x.begin(), x.end(), 0.0);
    for (double& v : x) v /= total;

    ExtremalVector ev;
    ev.x = std::move(x);
    ev.rho_f = rho;
    ev.exact = exact_extremal_vector(graph, component, component_spectrum(graph, c));
    return ev;
}

std::optional<std::vector<Rational>> exact_extremal_vector(const KGraph& graph, std::size_t component,
                                                           const SpectrumVector& spectrum) {
    const Component& c = graph.components().components.at(component);
    std::vector<std::int64_t> rho(graph.rank());
    for (std::size_t i = 0; i < graph.rank(); ++i) {
        const double rounded = std::round(spectrum[i]);
        if (rounded < 1.0 || std::fabs(spectrum[i] - rounded) > 1e-9 * std::max(1.0, rounded)) return std::nullopt;
        rho[i] = static_cast<std::int64_t>(rounded);
    }
    const auto& cl = c.closure;
    linalg::QMatrix rows;
    for (std::size_t i = 0; i < graph.rank(); ++i) {
        const IntMatrix& a = graph.vertex_matrix(i);
        for (std::size_t p = 0; p < cl.size(); ++p) {
            std::vector<Rational> row(cl.size());
            for (std::size_t q = 0; q < cl.size(); ++q) row[q] = Rational(a(cl[p], cl[q]));
            row[p] -= rho[i];
            rows.push_back(std::move(row));
        }
    }
    auto basis = linalg::nullspace(std::move(rows), cl.size());
    if (basis.size() != 1) return std::nullopt;
    auto& v = basis[0];
    Rational total = 0;
    for (const auto& e : v) total += e;
    if (total == 0) return std::nullopt;
    std::vector<Rational> x(graph.vertex_count(), Rational(0));
    for (std::size_t p = 0; p < cl.size(); ++p) {
        x[cl[p]] = v[p] / total;
        if (x[cl[p]] <= 0) return std::nullopt;
    }
    return x;
}

FIndependenceReport f_independence_check(const KGraph& graph, std::size_t component, const WellChosenSet& f1,
                                         const WellChosenSet& f2, const Tolerances& tol) {
    FIndependenceReport rep;
    // the decision itself never looks at F; what can differ is the vector
    const bool h = is_harmonic(graph, component, tol);
    rep.decisions_agree = is_well_chosen(graph, f1) && is_well_chosen(graph, f2);
    if (!h) {
        rep.pass = rep.decisions_agree;
        return rep;
    }
    const auto x1 = extremal_vector(graph, component, f1, tol).x;
    const auto x2 = extremal_vector(graph, component, f2, tol).x;
    for (std::size_t v = 0; v < x1.size(); ++v) rep.max_difference = std::max(rep.max_difference, std::fabs(x1[v] - x2[v]));
    rep.pass = rep.decisions_agree && rep.max_difference <= 1e-8;
    return rep;
}

std::vector<HarmonicComponentInfo> analyse_components(const KGraph& graph, const WellChosenSet& f,
                                                      const Tolerances& tol) {
    const auto spectra = all_spectra(graph);
    std::vector<HarmonicComponentInfo> out;
    for (std::size_t ci = 0; ci < spectra.size(); ++ci) {
        const auto d = decide(graph, ci, spectra, tol);
        HarmonicComponentInfo info;
        info.component = ci;
        info.spectrum = d.spectrum;
        info.positive = !graph.components().components[ci].trivial &&
                        std::all_of(d.spectrum.begin(), d.spectrum.end(), [&](double s) { return s > tol.eps_cmp; });
        info.status = d.status;
        info.harmonic = d.harmonic();
        info.blocking = d.blocking;
        if (info.harmonic) {
            info.extremal = extremal_vector(graph, ci, f, tol);
        }
        out.push_back(std::move(info));
    }
    return out;
}

std::vector<HarmonicComponentInfo> harmonic_components_for(const KGraph& graph, const std::vector<double>& r,
                                                           double beta, const WellChosenSet& f,
                                                           const Tolerances& tol) {
    if (r.size() != graph.rank()) throw std::invalid_argument("r has the wrong rank");
    std::vector<HarmonicComponentInfo> out;
    for (auto& info : analyse_components(graph, f, tol)) {
        if (!info.harmonic) continue;
        bool match = true;
        for (std::size_t i = 0; i < r.size(); ++i)
            if (std::fabs(beta * r[i] - std::log(info.spectrum[i])) > tol.eps_match) match = false;
        if (match) out.push_back(std::move(info));
    }
    return out;
}

HarmonicReport verify_harmonic(const KGraph& graph, const std::vector<double>& psi, const std::vector<double>& r,
                               double beta, const Tolerances& tol) {
    if (psi.size() != graph.vertex_count()) throw std::invalid_argument("ψ has the wrong length");
    if (r.size() != graph.rank()) throw std::invalid_argument("r has the wrong rank");
    HarmonicReport rep;
    rep.nonnegative = std::all_of(psi.begin(), psi.end(), [](double v) { return v >= 0.0; });
    rep.norm_error = std::fabs(std::accumulate(psi.begin(), psi.end(), 0.0) - 1.0);
    for (std::size_t i = 0; i < graph.rank(); ++i) {
        const auto y = DenseMatrix::from(graph.vertex_matrix(i)).apply(psi);
        const double lam = std::exp(beta * r[i]);
        double res = 0.0;
        for (std::size_t v = 0; v < psi.size(); ++v) res = std::max(res, std::fabs(y[v] - lam * psi[v]));
        rep.residuals.push_back(res);
        rep.max_residual = std::max(rep.max_residual, res);
    }
    rep.pass = rep.nonnegative && rep.norm_error <= 1e-10 && rep.max_residual <= tol.residual;
    return rep;
}

Decomposition decompose(const KGraph& graph, const HarmonicVector& psi, const WellChosenSet& f,
                        const Tolerances& tol) {
    const auto& cs = graph.components();
    if (psi.psi.size() != graph.vertex_count()) throw std::invalid_argument("ψ has the wrong length");
    std::vector<bool> in_w(graph.vertex_count());
    for (VertexId v = 0; v < graph.vertex_count(); ++v) in_w[v] = psi.psi[v] > tol.eps_supp;

    double k = 0.0;
    for (const auto& n : f.degrees) {
        double e = 0.0;
        for (std::size_t i = 0; i < n.rank(); ++i) e += psi.r[i] * n[i];
        k += std::exp(psi.beta * e);
    }
    DenseMatrix b = DenseMatrix::from(a_f_matrix(graph, f));
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) b(i, j) /= k;

    std::vector<std::size_t> collected;
    for (const auto& c : cs.components) {
        if (!std::all_of(c.vertices.begin(), c.vertices.end(), [&](VertexId v) { return in_w[v]; })) continue;
        if (std::fabs(spectral_radius(b, c.vertices) - 1.0) <= tol.eps_cmp) collected.push_back(c.index);
    }
    std::vector<std::size_t> minimal;
    for (std::size_t c : collected) {
        bool is_min = true;
        for (std::size_t d : collected)
            if (d != c && cs.leq(d, c)) is_min = false;
        if (is_min) minimal.push_back(c);
    }

    Decomposition out;
    std::vector<double> recon(graph.vertex_count(), 0.0);
    double weight_sum = 0.0;
    for (std::size_t ci : minimal) {
        if (!is_harmonic(graph, ci, tol))
            throw ResidualTooLarge("component " + std::to_string(ci) + " has ρ(B^C) = 1 but is not harmonic", INFINITY);
        const auto x = extremal_vector(graph, ci, f, tol).x;
        const auto& verts = cs.components[ci].vertices;
        double mean = 0.0;
        for (VertexId v : verts) mean += psi.psi[v] / x[v];
        mean /= static_cast<double>(verts.size());
        for (VertexId v : verts) out.max_deviation = std::max(out.max_deviation, std::fabs(psi.psi[v] / x[v] - mean));
        out.weights.emplace_back(ci, mean);
        weight_sum += mean;
        for (VertexId v = 0; v < graph.vertex_count(); ++v) recon[v] += mean * x[v];
    }
    for (VertexId v = 0; v < graph.vertex_count(); ++v)
        out.residual = std::max(out.residual, std::fabs(recon[v] - psi.psi[v]));
    if (out.weights.empty()) throw ResidualTooLarge("no component of the support has ρ(B^C) = 1", out.residual);
    if (out.residual > 1e-8) throw ResidualTooLarge("reconstruction residual above 1e-8", out.residual);
    if (out.max_deviation > 1e-8) throw ResidualTooLarge("ψ is not proportional to x^C on C", out.max_deviation);
    if (std::fabs(weight_sum - 1.0) > 1e-8) throw ResidualTooLarge("weights do not sum to 1", std::fabs(weight_sum - 1.0));
    return out;
}

std::vector<AdmissibleTemperature> admissible_temperatures(const KGraph& graph, const std::vector<double>& r,
                                                           const Tolerances& tol) {
    if (r.size() != graph.rank()) throw std::invalid_argument("r has the wrong rank");
    const auto spectra = all_spectra(graph);
    const bool zero = std::all_of(r.begin(), r.end(), [](double x) { return x == 0.0; });
    std::vector<AdmissibleTemperature> out;
    for (std::size_t ci = 0; ci < spectra.size(); ++ci) {
        if (!decide(graph, ci, spectra, tol).harmonic()) continue;
        const auto& s = spectra[ci];
        if (zero) {
            if (std::all_of(s.begin(), s.end(), [&](double x) { return std::fabs(std::log(x)) <= tol.eps_match; }))
                out.push_back({ci, std::nullopt, true});
            continue;
        }
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i) {
            num += r[i] * std::log(s[i]);
            den += r[i] * r[i];
        }
        const double beta = num / den;
        bool ok = true;
        for (std::size_t i = 0; i < r.size(); ++i)
            if (std::fabs(beta * r[i] - std::log(s[i])) > tol.eps_match) ok = false;
        if (ok) out.push_back({ci, beta, false});
    }
    return out;
}

}  // namespace kms
