#include "kmsgraph/algebra.hpp"

#include <cmath>
#include <sstream>

namespace kms {

// -------------------------------------------------------------------- Scalar

Scalar Scalar::exact(const Rational& re, const Rational& im) {
    Scalar s;
    s.re_ = re;
    s.im_ = im;
    s.z_ = {to_double(re), to_double(im)};
    return s;
}

Scalar Scalar::approx(std::complex<double> z) {
    Scalar s;
    s.exact_ = false;
    s.z_ = z;
    return s;
}

bool Scalar::is_zero() const { return exact_ ? (re_ == 0 && im_ == 0) : (z_ == std::complex<double>(0.0, 0.0)); }

Scalar Scalar::operator+(const Scalar& o) const {
    if (exact_ && o.exact_) return exact(re_ + o.re_, im_ + o.im_);
    return approx(z_ + o.z_);
}

Scalar Scalar::operator-(const Scalar& o) const { return *this + (-o); }

Scalar Scalar::operator*(const Scalar& o) const {
    if (exact_ && o.exact_) {
        if (im_ == 0 && o.im_ == 0) return exact(re_ * o.re_);
        return exact(re_ * o.re_ - im_ * o.im_, re_ * o.im_ + im_ * o.re_);
    }
    return approx(z_ * o.z_);
}

Scalar Scalar::operator-() const {
    if (exact_) return exact(-re_, -im_);
    return approx(-z_);
}

Scalar Scalar::conj() const {
    if (exact_) return exact(re_, -im_);
    return approx(std::conj(z_));
}

std::string Scalar::to_string() const {
    std::ostringstream os;
    if (exact_) {
        os << re_;
        if (im_ != 0) os << (im_ > 0 ? "+" : "") << im_ << "i";
        return os.str();
    }
    os.precision(17);
    os << z_.real();
    if (z_.imag() != 0.0) os << (z_.imag() > 0 ? "+" : "") << z_.imag() << "i";
    return os.str();
}

namespace {

Scalar phase_scalar(const Phase& p) {
    if (p.is_exact()) {
        const Rational& q = *p.exact_value();
        if (q == 0) return Scalar::exact(1);
        if (q == Rational(1, 4)) return Scalar::exact(0, 1);
        if (q == Rational(1, 2)) return Scalar::exact(-1);
        if (q == Rational(3, 4)) return Scalar::exact(0, -1);
    }
    return Scalar::approx(unit_phase(p));
}

Scalar psi_at(const HarmonicVector& psi, VertexId v) {
    if (psi.exact) return Scalar::exact((*psi.exact).at(v));
    return Scalar::approx(psi.psi.at(v));
}

IntVector as_vector(const Degree& d) { return difference(d, Degree(d.rank())); }

}  // namespace

// ------------------------------------------------------------------ Dynamics

bool Dynamics::exact() const {
    if (!base) return false;
    for (double x : r)
        if (std::floor(x) != x || std::fabs(x) > 1e6) return false;
    return true;
}

Scalar Dynamics::boltzmann(const IntVector& diff) const {
    if (diff.size() != r.size()) throw std::invalid_argument("dynamics: rank mismatch");
    if (exact()) {
        std::int64_t n = 0;
        for (std::size_t i = 0; i < r.size(); ++i) n += static_cast<std::int64_t>(r[i]) * diff[i];
        Rational p = 1;
        const Rational b = n >= 0 ? Rational(1) / *base : *base;
        for (std::int64_t i = 0; i < std::llabs(n); ++i) p *= b;
        return Scalar::exact(p);
    }
    double e = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) e += r[i] * static_cast<double>(diff[i]);
    return Scalar::approx(std::exp(-beta * e));
}

// ------------------------------------------------------------ AlgebraElement

AlgebraElement AlgebraElement::spanning(const Path& lambda, const Path& gamma, const Scalar& c) {
    AlgebraElement a;
    a.add(lambda, gamma, c);
    return a;
}

void AlgebraElement::add(const Path& lambda, const Path& gamma, const Scalar& c) {
    if (lambda.source != gamma.source) throw std::invalid_argument("spanning element needs s(λ) = s(γ)");
    if (c.is_zero()) return;
    auto [it, fresh] = terms_.try_emplace(SpanKey{lambda, gamma}, c);
    if (fresh) return;
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
}

AlgebraElement AlgebraElement::operator+(const AlgebraElement& o) const {
    AlgebraElement out = *this;
    for (const auto& [k, c] : o.terms_) out.add(k.first, k.second, c);
    return out;
}

AlgebraElement AlgebraElement::scaled(const Scalar& c) const {
    AlgebraElement out;
    for (const auto& [k, v] : terms_) out.add(k.first, k.second, v * c);
    return out;
}

bool AlgebraElement::approx_equal(const AlgebraElement& o, double tol) const {
    auto close = [&](const Scalar& a, const Scalar& b) {
        if (a.is_exact() && b.is_exact()) return (a - b).is_zero() || std::abs(a.value() - b.value()) <= tol;
        return std::abs(a.value() - b.value()) <= tol;
    };
    for (const auto& [k, c] : terms_) {
        auto it = o.terms_.find(k);
        if (!close(c, it == o.terms_.end() ? Scalar(0) : it->second)) return false;
    }
    for (const auto& [k, c] : o.terms_)
        if (!terms_.contains(k) && !close(c, Scalar(0))) return false;
    return true;
}

// ------------------------------------------------------------------- Algebra

AlgebraElement Algebra::vertex(VertexId v) const {
    const Path p = graph_->vertex_path(v);
    return AlgebraElement::spanning(p, p);
}

const std::vector<std::pair<Path, Path>>& Algebra::lambda_min(const Path& a, const Path& b) const {
    std::lock_guard lock(cache_mutex_);
    auto it = min_cache_.find(SpanKey{a, b});
    if (it != min_cache_.end()) return it->second;
    return min_cache_.emplace(SpanKey{a, b}, graph_->lambda_min(a, b)).first->second;
}

AlgebraElement Algebra::multiply(const AlgebraElement& a, const AlgebraElement& b) const {
    AlgebraElement out;
    for (const auto& [ka, ca] : a.terms()) {
        const auto& [lambda, gamma] = ka;
        for (const auto& [kb, cb] : b.terms()) {
            const auto& [delta, eps] = kb;
            if (gamma.range != delta.range) continue;
            const Scalar c = ca * cb;
            for (const auto& [eta, nu] : lambda_min(gamma, delta))
                out.add(graph_->compose(lambda, eta), graph_->compose(eps, nu), c);
        }
    }
    return out;
}

AlgebraElement Algebra::adjoint(const AlgebraElement& a) const {
    AlgebraElement out;
    for (const auto& [k, c] : a.terms()) out.add(k.second, k.first, c.conj());
    return out;
}

AlgebraElement Algebra::ck4_expand(VertexId v, const Degree& n) const {
    AlgebraElement out;
    for (const Path& p : graph_->enumerate_paths(v, n)) out.add(p, p, 1);
    return out;
}

AlgebraElement Algebra::dynamics(const AlgebraElement& a, const Dynamics& dyn) const {
    AlgebraElement out;
    for (const auto& [k, c] : a.terms())
        out.add(k.first, k.second, c * dyn.boltzmann(difference(k.first.degree, k.second.degree)));
    return out;
}

AlgebraElement Algebra::gauge_transform(const AlgebraElement& a, const TorusPoint& eta) const {
    AlgebraElement out;
    for (const auto& [k, c] : a.terms())
        out.add(k.first, k.second, c * phase_scalar(eta.phase_at(difference(k.first.degree, k.second.degree))));
    return out;
}

std::vector<SpanKey> Algebra::spanning_elements(const Degree& cap) const {
    std::vector<std::vector<Path>> by_source(graph_->vertex_count());
    for (Path& p : paths_up_to(*graph_, cap)) by_source[p.source].push_back(std::move(p));
    std::vector<SpanKey> out;
    for (const auto& group : by_source)
        for (const auto& a : group)
            for (const auto& b : group) out.emplace_back(a, b);
    return out;
}

// -------------------------------------------------------------------- states

double ComplexInterval::distance(const ComplexInterval& o) const {
    const double dx = std::max(0.0, std::max(re_lo, o.re_lo) - std::min(re_hi, o.re_hi));
    const double dy = std::max(0.0, std::max(im_lo, o.im_lo) - std::min(im_hi, o.im_hi));
    return std::max(dx, dy);
}

StateEvaluator::StateEvaluator(const Algebra& algebra, StateDescriptor state)
    : algebra_(&algebra), state_(std::move(state)) {
    if (auto* t = std::get_if<TwistedState>(&state_)) {
        const HarmonicVector& x = t->psi;
        measure_.emplace(algebra.graph(), x);
        if (t->xi.theta.size() != t->per.group.dimension())
            throw std::invalid_argument("character dimension does not match Per(C)");
    }
}

StateValue StateEvaluator::evaluate_term(const Path& lambda, const Path& gamma, const Scalar& c) const {
    StateValue out;
    if (const auto* g = std::get_if<GaugeInvariantState>(&state_)) {
        Scalar v = 0;
        if (lambda == gamma) v = c * g->dyn.boltzmann(as_vector(lambda.degree)) * psi_at(g->psi, lambda.source);
        out.range = ComplexInterval::point(v.value());
        if (v.is_exact()) out.exact = v;
        return out;
    }
    const auto& t = std::get<TwistedState>(state_);
    const KGraph& graph = algebra_->graph();
    const IntVector diff = difference(lambda.degree, gamma.degree);
    const auto member = t.per.membership(diff);
    if (member == PeriodicityGroup::Membership::Out || lambda.range != gamma.range) {
        out.range = ComplexInterval::point(0.0);
        out.exact = Scalar(0);
        return out;
    }
    const SpanKey key{lambda, gamma};
    auto it = bounds_cache_.find(key);
    if (it == bounds_cache_.end())
        it = bounds_cache_
                 .emplace(key, isotropy_cylinder_bounds(graph, graph.components().components.at(t.component),
                                                        *measure_, lambda, gamma, t.depth))
                 .first;
    const MassInterval& iv = it->second;
    if (member == PeriodicityGroup::Membership::Unknown) {
        const double r = std::abs(c.value()) * iv.hi;
        out.range = {-r, r, -r, r};
        out.uncertified = true;
        return out;
    }
    const Scalar u = c * phase_scalar(t.xi.phase_at(t.per.group, diff));
    if (iv.closed()) {
        const Scalar v = u * Scalar::approx(iv.lo);
        out.range = ComplexInterval::point(v.value());
        return out;
    }
    const auto a = u.value() * iv.lo, b = u.value() * iv.hi;
    out.range = {std::min(a.real(), b.real()), std::max(a.real(), b.real()), std::min(a.imag(), b.imag()),
                 std::max(a.imag(), b.imag())};
    return out;
}

StateValue StateEvaluator::evaluate(const AlgebraElement& a) const {
    StateValue out;
    out.range = ComplexInterval::point(0.0);
    std::optional<Scalar> exact = Scalar(0);
    for (const auto& [k, c] : a.terms()) {
        const StateValue v = evaluate_term(k.first, k.second, c);
        out.range = out.range + v.range;
        out.uncertified = out.uncertified || v.uncertified;
        if (exact && v.exact) *exact += *v.exact;
        else exact.reset();
    }
    if (exact && exact->is_exact()) {
        out.exact = exact;
        out.range = ComplexInterval::point(exact->value());
    }
    return out;
}

StateValue evaluate(const Algebra& algebra, const StateDescriptor& state, const AlgebraElement& a) {
    return StateEvaluator(algebra, state).evaluate(a);
}

namespace {

const Dynamics& dynamics_of(const StateDescriptor& s) {
    if (const auto* g = std::get_if<GaugeInvariantState>(&s)) return g->dyn;
    return std::get<TwistedState>(s).dyn;
}

double discrepancy(const StateValue& a, const StateValue& b) {
    if (a.exact && b.exact && a.exact->is_exact() && b.exact->is_exact())
        return (*a.exact - *b.exact).is_zero() ? 0.0 : std::abs(a.exact->value() - b.exact->value());
    return a.range.distance(b.range);
}

std::string describe(const KGraph& g, const SpanKey& k) {
    auto w = [&](const Path& p) {
        std::string s;
        for (const auto& x : word_of(g, p)) s += (s.empty() ? "" : " ") + x;
        return s;
    };
    return "t[" + w(k.first) + "] t[" + w(k.second) + "]*";
}

void check_pair(const Algebra& algebra, const StateEvaluator& omega, const Dynamics& dyn, const AlgebraElement& a,
                const AlgebraElement& b, double tol, KmsReport& rep, const std::string& label) {
    const StateValue lhs = omega.evaluate(algebra.multiply(a, b));
    const StateValue rhs = omega.evaluate(algebra.multiply(b, algebra.dynamics(a, dyn)));
    const double d = discrepancy(lhs, rhs);
    ++rep.checked;
    rep.max_violation = std::max(rep.max_violation, d);
    if (d > tol) {
        ++rep.failures;
        if (rep.examples.size() < 8) rep.examples.push_back(label + ": " + std::to_string(d));
    }
}

}  // namespace

KmsReport verify_kms(const Algebra& algebra, const StateEvaluator& omega,
                     const std::vector<std::pair<AlgebraElement, AlgebraElement>>& pairs, double tol) {
    KmsReport rep;
    const Dynamics& dyn = dynamics_of(omega.state());
    for (std::size_t i = 0; i < pairs.size(); ++i)
        check_pair(algebra, omega, dyn, pairs[i].first, pairs[i].second, tol, rep, "pair " + std::to_string(i));
    return rep;
}

KmsReport verify_kms_spanning(const Algebra& algebra, const StateEvaluator& omega, const Degree& cap, double tol) {
    KmsReport rep;
    const Dynamics& dyn = dynamics_of(omega.state());
    const bool gauge = std::holds_alternative<GaugeInvariantState>(omega.state());
    const auto elems = algebra.spanning_elements(cap);
    std::vector<AlgebraElement> as;
    as.reserve(elems.size());
    for (const auto& k : elems) as.push_back(AlgebraElement::spanning(k.first, k.second));
    const std::size_t k = algebra.graph().rank();
    for (std::size_t i = 0; i < elems.size(); ++i) {
        const auto& [lambda, gamma] = elems[i];
        const IntVector da = difference(lambda.degree, gamma.degree);
        for (std::size_t j = 0; j < elems.size(); ++j) {
            const auto& [delta, eps] = elems[j];
            const bool ab = gamma.range == delta.range;
            const bool ba = eps.range == lambda.range;
            bool skip = !ab && !ba;
            if (gauge && !skip) {
                const IntVector db = difference(delta.degree, eps.degree);
                for (std::size_t c = 0; c < k; ++c)
                    if (da[c] + db[c] != 0) skip = true;
            }
            if (skip) {
                ++rep.checked;  // both sides vanish identically
                continue;
            }
            check_pair(algebra, omega, dyn, as[i], as[j], tol, rep,
                       describe(algebra.graph(), elems[i]) + " , " + describe(algebra.graph(), elems[j]));
        }
    }
    // the products above never use p_v = Σ t_e t_e*, so a functional built
    // from any ψ passes them; check that ω respects the relation as well
    const KGraph& graph = algebra.graph();
    for (std::size_t i = 0; i < elems.size(); ++i) {
        const auto& [lambda, gamma] = elems[i];
        const StateValue lhs = omega.evaluate(as[i]);
        for (std::size_t c = 0; c < k; ++c) {
            AlgebraElement expanded;
            for (EdgeId e : graph.edges_into(lambda.source, c)) {
                const Path ep = graph.edge_path(e);
                expanded.add(graph.compose(lambda, ep), graph.compose(gamma, ep), 1);
            }
            const double d = discrepancy(lhs, omega.evaluate(expanded));
            ++rep.checked;
            rep.max_violation = std::max(rep.max_violation, d);
            if (d > tol) {
                ++rep.failures;
                if (rep.examples.size() < 8)
                    rep.examples.push_back(describe(graph, elems[i]) + " vs its colour " + std::to_string(c + 1) +
                                           " expansion: " + std::to_string(d));
            }
        }
    }
    return rep;
}

SymmetryReport verify_symmetry(const Algebra& algebra, const TwistedState& base, const TorusPoint& eta,
                               const std::vector<SpanKey>& tests, double tol) {
    SymmetryReport rep;
    const Character restricted = eta.restrict_to(base.per.group);
    rep.restriction_trivial = std::all_of(restricted.theta.begin(), restricted.theta.end(), [](const Phase& p) {
        return p.is_exact() ? p.is_zero() : (p.value() < 1e-12 || p.value() > 1.0 - 1e-12);
    });
    TwistedState moved = base;
    moved.xi = base.xi * restricted;
    const StateEvaluator from(algebra, base), to(algebra, moved);
    for (const auto& k : tests) {
        const AlgebraElement a = AlgebraElement::spanning(k.first, k.second);
        const StateValue lhs = from.evaluate(algebra.gauge_transform(a, eta));
        const StateValue rhs = to.evaluate(a);
        rep.equivariance_error = std::max(rep.equivariance_error, discrepancy(lhs, rhs));
        const double sep = discrepancy(from.evaluate(a), rhs);
        if (sep > rep.separation) {
            rep.separation = sep;
            rep.witness = k;
        }
    }
    rep.pass = rep.equivariance_error <= tol && (rep.restriction_trivial ? rep.separation <= tol : rep.separation > 1e-6);
    return rep;
}

std::vector<ExtremalFamily> extremal_states(const KGraph& graph, const std::vector<double>& r, double beta,
                                            const WellChosenSet& f, const Tolerances& tol,
                                            const PerSearchOptions& per) {
    std::vector<ExtremalFamily> out;
    for (auto& info : harmonic_components_for(graph, r, beta, f, tol)) {
        ExtremalFamily fam;
        fam.per = periodicity_group(graph, graph.components().components.at(info.component), per.box, per.p_max,
                                    per.budget);
        fam.torus_dimension = fam.per.group.dimension();
        fam.info = std::move(info);
        out.push_back(std::move(fam));
    }
    return out;
}

// ------------------------------------------------------------- serialization

std::vector<std::string> word_of(const KGraph& graph, const Path& p) {
    if (p.is_vertex()) return {"@" + graph.vertex_name(p.range)};
    std::vector<std::string> out;
    for (EdgeId e : p.edges) out.push_back(graph.edge(e).id);
    return out;
}

Path path_from_word(const KGraph& graph, const std::vector<std::string>& word) {
    if (word.empty()) throw PathError(PathError::Kind::EmptyWord, "empty word");
    if (word.size() == 1 && !word[0].empty() && word[0][0] == '@') {
        const auto v = graph.find_vertex(word[0].substr(1));
        if (!v) throw GraphError("unknown vertex " + word[0].substr(1));
        return graph.vertex_path(*v);
    }
    std::vector<EdgeId> edges;
    for (const auto& id : word) {
        const auto e = graph.find_edge(id);
        if (!e) throw GraphError("unknown edge " + id);
        edges.push_back(*e);
    }
    return graph.normal_form(edges);
}

nlohmann::json to_json(const KGraph&, const Scalar& s) {
    nlohmann::json j{{"re", s.value().real()}, {"im", s.value().imag()}};
    if (s.is_exact()) {
        std::ostringstream re, im;
        re << s.re();
        im << s.im();
        j["exact_re"] = re.str();
        j["exact_im"] = im.str();
    }
    return j;
}

nlohmann::json to_json(const KGraph& graph, const AlgebraElement& a) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& [k, c] : a.terms()) {
        nlohmann::json t = to_json(graph, c);
        t["lambda"] = word_of(graph, k.first);
        t["gamma"] = word_of(graph, k.second);
        out.push_back(std::move(t));
    }
    return out;
}

AlgebraElement element_from_json(const KGraph& graph, const nlohmann::json& j) {
    AlgebraElement out;
    for (const auto& t : j) {
        const Path lambda = path_from_word(graph, t.at("lambda").get<std::vector<std::string>>());
        const Path gamma = path_from_word(graph, t.at("gamma").get<std::vector<std::string>>());
        Scalar c;
        if (t.contains("exact_re"))
            c = Scalar::exact(Rational(t.at("exact_re").get<std::string>()),
                              Rational(t.value("exact_im", std::string("0"))));
        else
            c = Scalar::approx({t.value("re", 0.0), t.value("im", 0.0)});
        out.add(lambda, gamma, c);
    }
    return out;
}

}  // namespace kms
