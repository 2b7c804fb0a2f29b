#include <doctest.h>

#include <cmath>
#include <random>

#include "kmsgraph/harmonic.hpp"
#include "kmsgraph/pathspace.hpp"
#include "support/graphs.hpp"
#include "support/oracles.hpp"

using namespace kms;

namespace {

Path path_of(const KGraph& g, std::initializer_list<const char*> ids) {
    std::vector<EdgeId> w;
    for (const char* id : ids) w.push_back(*g.find_edge(id));
    return g.normal_form(w);
}

Path vertex_of(const KGraph& g, const char* name) { return g.vertex_path(*g.find_vertex(name)); }

const Component& component_at(const KGraph& g, const char* vertex) {
    const auto& cs = g.components();
    return cs.components[cs.component_of.at(*g.find_vertex(vertex))];
}

// x^C with r_i = ln ρ_i at β = 1
HarmonicVector extremal_measure_vector(const KGraph& g, const Component& c) {
    const auto spec = component_spectrum(g, c);
    HarmonicVector h;
    for (double rho : spec) h.r.push_back(std::log(rho));
    h.beta = 1.0;
    const auto ev = extremal_vector(g, c.index, default_well_chosen(g));
    h.psi = ev.x;
    h.exact = ev.exact;
    return h;
}

}  // namespace

TEST_CASE("cylinder masses") {
    const KGraph two = kms::testing::loops(2);
    const CylinderMeasure m2(two, HarmonicVector{{1.0}, std::log(2.0), {1.0}, std::nullopt});
    CHECK(m2.mass(vertex_of(two, "v")) == doctest::Approx(1.0));
    CHECK(m2.mass(path_of(two, {"e1", "e2", "e1"})) == doctest::Approx(0.125).epsilon(1e-14));
    CHECK(m2.total_mass() == doctest::Approx(1.0));

    const KGraph sf = kms::testing::sink_feeding();
    const CylinderMeasure ms(sf, HarmonicVector{{1.0}, std::log(2.0), {2.0 / 3, 1.0 / 3}, std::nullopt});
    CHECK(ms.mass(path_of(sf, {"h"})) == doctest::Approx(1.0 / 3).epsilon(1e-14));
    CHECK(ms.mass(vertex_of(sf, "u")) == doctest::Approx(1.0 / 3));
    CHECK(ms.total_mass() == doctest::Approx(1.0));
    CHECK(ms.weight(Degree{2}) == doctest::Approx(0.25));
}

TEST_CASE("consistency and quasi-invariance on examples") {
    const KGraph two = kms::testing::loops(2);
    const CylinderMeasure m(two, HarmonicVector{{1.0}, std::log(2.0), {1.0}, std::nullopt});
    const auto c = check_consistency(two, m, Degree{3});
    CHECK(c.pass());
    CHECK(c.checked > 0);

    const Path lambda = path_of(two, {"e1", "e2"});
    const Path gamma = path_of(two, {"e2"});
    CHECK(m.mass(gamma) == doctest::Approx(std::exp(std::log(2.0) * 1.0) * m.mass(lambda)));
    CHECK(check_quasi_invariance(two, m, {{lambda, gamma}}).pass());

    // harmonic at the wrong temperature, or not harmonic at all
    const CylinderMeasure hot(two, HarmonicVector{{1.0}, 1.0, {1.0}, std::nullopt});
    CHECK_FALSE(check_consistency(two, hot, Degree{2}).pass());
    const KGraph sf = kms::testing::sink_feeding();
    const CylinderMeasure flat(sf, HarmonicVector{{1.0}, std::log(2.0), {0.5, 0.5}, std::nullopt});
    const auto bad = check_consistency(sf, flat, Degree{2});
    CHECK_FALSE(bad.pass());
    CHECK(bad.worst > 0.1);
    CHECK_FALSE(bad.examples.empty());
}

TEST_CASE("same_source_pairs") {
    const KGraph sf = kms::testing::sink_feeding();
    const auto pairs = same_source_pairs(sf, Degree{1});
    // sources: v has {v, e1, e2, h}, u has {u}
    CHECK(pairs.size() == 4 * 4 + 1);
    for (const auto& [l, g] : pairs) CHECK(l.source == g.source);
}

TEST_CASE("corpus measures are consistent and quasi-invariant") {
    const auto corpus = kms::testing::make_corpus(12, 5);
    std::size_t measures = 0;
    for (const auto& entry : corpus) {
        const KGraph& g = entry.graph;
        const Degree depth = Degree::uniform(g.rank(), 2);
        const auto pairs = same_source_pairs(g, depth);
        for (const auto& c : g.components().components) {
            if (!is_harmonic(g, c.index)) continue;
            const CylinderMeasure m(g, extremal_measure_vector(g, c));
            INFO(entry.name);
            CHECK(check_consistency(g, m, depth, 1e-10).pass());
            CHECK(check_quasi_invariance(g, m, pairs, 1e-10).pass());
            CHECK(m.total_mass() == doctest::Approx(1.0));
            ++measures;
        }
    }
    CHECK(measures >= corpus.size());
}

TEST_CASE("shift relation") {
    const KGraph c3 = kms::testing::cycle(3);
    const Component& c = c3.components().components[0];
    CHECK(shift_relation_holds(c3, c, Degree{3}, Degree{0}, 3).verdict == ShiftVerdict::Holds);
    const auto r = shift_relation_holds(c3, c, Degree{1}, Degree{0}, 3);
    CHECK(r.verdict == ShiftVerdict::Refuted);
    CHECK(r.witness.has_value());
    CHECK(default_shift_depth(c, Degree{4}, Degree{1}) == 3 + 4);

    const KGraph flip = kms::testing::flip_square();
    const Component& cf = flip.components().components[0];
    for (std::uint32_t a = 0; a < 3; ++a)
        for (std::uint32_t b = 0; b < 3; ++b)
            CHECK(shift_relation_holds(flip, cf, Degree{a, 0}, Degree{0, b}, 2).verdict == ShiftVerdict::Holds);

    const KGraph tc = kms::testing::data_graph("two-cycles.json");
    CHECK(shift_relation_holds(tc, tc.components().components[0], Degree{2}, Degree{0}, 4).verdict ==
          ShiftVerdict::Refuted);

    // a tiny budget leaves the question open
    const KGraph l3 = kms::testing::loops(3);
    const auto u = shift_relation_holds(l3, l3.components().components[0], Degree{1}, Degree{0}, 6, SearchBudget{5});
    CHECK(u.verdict != ShiftVerdict::Holds);
}

TEST_CASE("periodicity groups") {
    for (std::size_t len = 1; len <= 5; ++len) {
        const KGraph g = kms::testing::cycle(len);
        const Component& c = g.components().components[0];
        const auto per = periodicity_group(g, c);
        INFO(len);
        CHECK(per.complete);
        CHECK(per.group == Lattice::generated_by(1, {{static_cast<std::int64_t>(len)}}));
        CHECK(per.membership(IntVector{static_cast<std::int64_t>(2 * len)}) == PeriodicityGroup::Membership::In);
        if (len > 1) CHECK(per.membership(IntVector{1}) == PeriodicityGroup::Membership::Out);
        // the status of each difference agrees with the oracle
        for (const auto& [diff, verdict] : per.status) {
            const std::int64_t d = diff[0];
            const Degree m{static_cast<std::uint32_t>(d > 0 ? d : 0)};
            const Degree n{static_cast<std::uint32_t>(d < 0 ? -d : 0)};
            const auto expect = kms::oracle::shift_relation(g, c.vertices, m, n, per.certified_depth());
            CHECK((verdict == ShiftVerdict::Holds) == (expect == kms::oracle::Verdict::Holds));
        }
    }

    const KGraph tc = kms::testing::data_graph("two-cycles.json");
    const auto p0 = periodicity_group(tc, tc.components().components[0]);
    CHECK(p0.group.dimension() == 0);
    CHECK(p0.complete);

    const KGraph flip = kms::testing::flip_square();
    const auto pf = periodicity_group(flip, flip.components().components[0]);
    CHECK(pf.group == Lattice::generated_by(2, {{1, 0}, {0, 1}}));
    CHECK(pf.group.contains(IntVector{3, -2}));
    CHECK(pf.membership(IntVector{5, 7}) == PeriodicityGroup::Membership::In);

    // membership beyond the searched box is undecided for proper subgroups
    const KGraph c3 = kms::testing::cycle(3);
    const auto p3 = periodicity_group(c3, c3.components().components[0], Degree{2});
    CHECK(p3.group.dimension() == 0);
    CHECK(p3.membership(IntVector{1}) == PeriodicityGroup::Membership::Out);
    CHECK(p3.membership(IntVector{3}) == PeriodicityGroup::Membership::Unknown);
}

TEST_CASE("phases and characters") {
    const Phase q = Phase::exact(Rational(1, 4));
    CHECK((q + Phase::exact(Rational(3, 4))).is_zero());
    CHECK((q.times(6)).exact_value() == Rational(1, 2));
    CHECK((-q).exact_value() == Rational(3, 4));
    CHECK(Phase::exact(Rational(5, 4)).exact_value() == Rational(1, 4));
    CHECK(unit_phase(q) == std::complex<double>(0, 1));
    CHECK(unit_phase(Phase::exact(Rational(1, 2))) == std::complex<double>(-1, 0));
    CHECK(unit_phase(Phase::approx(0.125)).real() == doctest::Approx(std::sqrt(0.5)));
    CHECK_FALSE((q + Phase::approx(0.1)).is_exact());

    const Lattice three = Lattice::generated_by(1, {{3}});
    const Character chi{{Phase::exact(Rational(1, 3))}};
    CHECK(chi.phase_at(three, IntVector{6}).exact_value() == Rational(2, 3));
    CHECK_THROWS(chi.phase_at(three, IntVector{1}));
    CHECK((chi * chi * chi).is_trivial());

    const TorusPoint eta{{Phase::exact(Rational(1, 2))}};
    CHECK(eta.phase_at(IntVector{3}).exact_value() == Rational(1, 2));
    const auto restricted = eta.restrict_to(three);
    REQUIRE(restricted.theta.size() == 1);
    CHECK(restricted.theta[0].exact_value() == Rational(1, 2));

    const TorusPoint eta2{{Phase::exact(Rational(1, 8)), Phase::exact(Rational(3, 8))}};
    CHECK(eta2.phase_at(IntVector{2, -1}).exact_value() == Rational(7, 8));
}

TEST_CASE("isotropy cylinder bounds") {
    const KGraph flip = kms::testing::flip_square();
    const Component& cf = flip.components().components[0];
    const CylinderMeasure mf(flip, extremal_measure_vector(flip, cf));
    const auto bf = isotropy_cylinder_bounds(flip, cf, mf, path_of(flip, {"f"}), path_of(flip, {"g"}), 1);
    CHECK(bf.lo == doctest::Approx(1.0));
    CHECK(bf.hi == doctest::Approx(1.0));
    CHECK(bf.closed());

    const KGraph c3 = kms::testing::cycle(3);
    const Component& c = c3.components().components[0];
    const CylinderMeasure m(c3, extremal_measure_vector(c3, c));
    const Path loop = path_of(c3, {"c3", "c2", "c1"});
    REQUIRE(loop.range == loop.source);
    const auto b = isotropy_cylinder_bounds(c3, c, m, loop, vertex_of(c3, "v1"), 3);
    CHECK(b.lo == doctest::Approx(1.0 / 3));
    CHECK(b.hi == doctest::Approx(1.0 / 3));
    // a single step never returns to itself
    const auto b1 = isotropy_cylinder_bounds(c3, c, m, path_of(c3, {"c3"}), vertex_of(c3, "v1"), 3);
    CHECK(b1.hi == doctest::Approx(0.0));

    // the mixed graph: intervals shrink as the depth grows
    const KGraph sf = kms::testing::sink_feeding();
    const Component& cv = component_at(sf, "v");
    const CylinderMeasure ms(sf, extremal_measure_vector(sf, cv));
    MassInterval prev{0.0, 1.0, 0};
    for (std::size_t d = 0; d <= 6; ++d) {
        const auto cur = isotropy_cylinder_bounds(sf, cv, ms, path_of(sf, {"e1"}), vertex_of(sf, "v"), d);
        CHECK(cur.lo >= prev.lo - 1e-15);
        CHECK(cur.hi <= prev.hi + 1e-15);
        CHECK(cur.lo <= cur.hi);
        prev = cur;
    }
}

TEST_CASE("non-eventual mass decreases") {
    // two loops at a, edge a -> b, one loop at b
    const KGraph g = kms::testing::from_json(R"({"rank":1,"vertices":["a","b"],"edges":[
        {"id":"a1","color":1,"src":"a","dst":"a"},{"id":"a2","color":1,"src":"a","dst":"a"},
        {"id":"ab","color":1,"src":"a","dst":"b"},{"id":"b1","color":1,"src":"b","dst":"b"}]})");
    const Component& c = component_at(g, "a");
    REQUIRE(is_harmonic(g, c.index));
    const CylinderMeasure m(g, extremal_measure_vector(g, c));
    double prev = 2.0;
    for (std::size_t q = 0; q < 8; ++q) {
        const double cur = non_eventual_mass(g, c, m, q);
        CHECK(cur < prev);
        prev = cur;
    }
    CHECK(prev < 0.01);
}

TEST_CASE("sampled paths and the isotropy audit") {
    const KGraph sf = kms::testing::sink_feeding();
    const CylinderMeasure ms(sf, extremal_measure_vector(sf, component_at(sf, "v")));
    std::mt19937_64 rng(3);
    std::size_t at_u = 0;
    for (int i = 0; i < 2000; ++i) {
        const Path p = sample_path(sf, ms, 3, rng);
        CHECK(p.degree == Degree{3});
        if (p.range == *sf.find_vertex("u")) ++at_u;
    }
    CHECK(std::abs(at_u / 2000.0 - 1.0 / 3) < 0.05);

    const KGraph c3 = kms::testing::cycle(3);
    const Component& c = c3.components().components[0];
    const CylinderMeasure m(c3, extremal_measure_vector(c3, c));
    const auto per = periodicity_group(c3, c);
    const auto ok = isotropy_audit(c3, c, per, m, Degree{6}, 64, 24, 9);
    CHECK(ok.samples == 64);
    CHECK(ok.violations == 0);

    // claiming Per = {0} is caught
    PeriodicityGroup wrong = per;
    wrong.group = Lattice(1);
    for (auto& [diff, verdict] : wrong.status) verdict = ShiftVerdict::Refuted;
    const auto caught = isotropy_audit(c3, c, wrong, m, Degree{6}, 64, 24, 9);
    CHECK(caught.violations > 0);
    CHECK_FALSE(caught.examples.empty());

    const KGraph tc = kms::testing::data_graph("two-cycles.json");
    const Component& ct = tc.components().components[0];
    const CylinderMeasure mt(tc, extremal_measure_vector(tc, ct));
    CHECK(isotropy_audit(tc, ct, periodicity_group(tc, ct), mt, Degree{4}, 64, 40, 2).violations == 0);
}
