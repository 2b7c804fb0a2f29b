#include <doctest.h>

#include <random>

#include "kmsgraph/graph_io.hpp"
#include "kmsgraph/kgraph.hpp"
#include "support/graphs.hpp"
#include "support/oracles.hpp"

using namespace kms;
using kms::testing::flip_square;

namespace {

std::vector<EdgeId> word(const KGraph& g, std::initializer_list<const char*> ids) {
    std::vector<EdgeId> out;
    for (const char* id : ids) out.push_back(*g.find_edge(id));
    return out;
}

bool has_issue(const ValidationError& e, IssueKind kind) {
    for (const auto& i : e.issues())
        if (i.kind == kind) return true;
    return false;
}

}  // namespace

TEST_CASE("parse: smallest 2-graph") {
    const auto spec = parse_kgraph(R"({"rank":2,"vertices":["v"],
        "edges":[{"id":"f","color":1,"src":"v","dst":"v"},{"id":"g","color":2,"src":"v","dst":"v"}],
        "squares":[{"f":"f","g":"g","g2":"g","f2":"f"}]})");
    CHECK(spec.rank == 2);
    CHECK(spec.vertices.size() == 1);
    CHECK(spec.edges.size() == 2);
    CHECK(spec.squares.size() == 1);
}

TEST_CASE("parse: errors") {
    CHECK_THROWS_WITH_AS(parse_kgraph(R"({"rank":1,"vertices":["v"],"edges":[{"id":"e","color":1,"src":"x","dst":"v"}]})"),
                         doctest::Contains("unknown vertex"), ParseError);
    try {
        parse_kgraph("{\"rank\": 1,\n  \"vertices\": [\"v\",]\n}");
        FAIL("expected a syntax error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(parse_kgraph(R"({"rank":1,"vertices":["v","v"],"edges":[]})"), ParseError);
}

TEST_CASE("parse: 3-cycle has no squares") {
    const auto spec = parse_kgraph(R"({"rank":1,"vertices":["v1","v2","v3"],"edges":[
        {"id":"a","color":1,"src":"v1","dst":"v2"},{"id":"b","color":1,"src":"v2","dst":"v3"},
        {"id":"c","color":1,"src":"v3","dst":"v1"}]})");
    CHECK(spec.edges.size() == 3);
    CHECK(spec.squares.empty());
}

TEST_CASE("validate: flip square and its failures") {
    const KGraph g = flip_square();
    CHECK(g.vertex_matrix(0)(0, 0) == 1);
    CHECK(g.vertex_matrix(1)(0, 0) == 1);

    try {
        kms::testing::from_json(R"({"rank":2,"vertices":["v"],
            "edges":[{"id":"f","color":1,"src":"v","dst":"v"},{"id":"g","color":2,"src":"v","dst":"v"}],"squares":[]})");
        FAIL("expected MissingSquare");
    } catch (const ValidationError& e) {
        CHECK(has_issue(e, IssueKind::MissingSquare));
    }
    try {
        kms::testing::from_json(R"({"rank":1,"vertices":["v","u"],"edges":[{"id":"e","color":1,"src":"u","dst":"v"},
            {"id":"l","color":1,"src":"v","dst":"v"}]})");
        FAIL("expected SourceVertex");
    } catch (const ValidationError& e) {
        REQUIRE(has_issue(e, IssueKind::SourceVertex));
        bool names_u = false;
        for (const auto& i : e.issues())
            if (i.kind == IssueKind::SourceVertex && i.detail.find('u') != std::string::npos) names_u = true;
        CHECK(names_u);
    }
    try {
        kms::testing::from_json(R"({"rank":2,"vertices":["v"],
            "edges":[{"id":"f","color":1,"src":"v","dst":"v"},{"id":"g","color":2,"src":"v","dst":"v"}],
            "squares":[{"f":"f","g":"g","g2":"g","f2":"f"},{"f":"f","g":"g","g2":"g","f2":"f"}]})");
        FAIL("expected DuplicateSquare");
    } catch (const ValidationError& e) {
        CHECK(has_issue(e, IssueKind::DuplicateSquare));
    }
    try {
        kms::testing::from_json(R"({"rank":1,"vertices":["v"],"edges":[{"id":"e","color":2,"src":"v","dst":"v"}]})");
        FAIL("expected InvalidColor");
    } catch (const ValidationError& e) {
        CHECK(has_issue(e, IssueKind::InvalidColor));
    }
}

TEST_CASE("normal form, compose, segment on the flip square") {
    const KGraph g = flip_square();
    const Path p = g.normal_form(word(g, {"g", "f"}));
    CHECK(p.edges == word(g, {"f", "g"}));
    CHECK(g.normal_form(p.edges) == p);
    CHECK(g.compose(g.edge_path(*g.find_edge("f")), g.edge_path(*g.find_edge("g"))) ==
          g.normal_form(word(g, {"f", "g"})));
    CHECK(g.compose(p, g.vertex_path(p.source)) == p);
    CHECK(g.segment(p, Degree{0, 0}, p.degree) == p);
    CHECK(g.segment(p, Degree{0, 0}, Degree{0, 0}) == g.vertex_path(p.range));
    const auto paths = g.enumerate_paths(0, Degree{1, 1});
    REQUIRE(paths.size() == 1);
    CHECK(paths[0].edges == word(g, {"f", "g"}));
    const auto lm = g.lambda_min(g.edge_path(*g.find_edge("f")), g.edge_path(*g.find_edge("g")));
    REQUIRE(lm.size() == 1);
    CHECK(lm[0].first == g.edge_path(*g.find_edge("g")));
    CHECK(lm[0].second == g.edge_path(*g.find_edge("f")));
}

TEST_CASE("enumerate: counts match vertex matrices") {
    const KGraph c3 = kms::testing::cycle(3);
    CHECK(c3.enumerate_paths(0, Degree{3}, VertexId{0}).size() == 1);
    CHECK(c3.enumerate_paths(1, Degree{0}).size() == 1);
    for (const auto& cg : kms::testing::make_corpus(10, 11)) {
        const KGraph& g = cg.graph;
        for_each_degree_below(Degree::uniform(g.rank(), 2), [&](const Degree& d) {
            const IntMatrix m = g.path_count_matrix(d);
            for (VertexId v = 0; v < g.vertex_count(); ++v)
                for (VertexId w = 0; w < g.vertex_count(); ++w)
                    CHECK(static_cast<std::int64_t>(g.enumerate_paths(v, d, w).size()) == m(v, w));
        });
    }
}

TEST_CASE("lambda_min: trivial cases") {
    const KGraph g = kms::testing::sink_feeding();
    const Path e1 = g.edge_path(*g.find_edge("e1"));
    const auto same = g.lambda_min(e1, e1);
    REQUIRE(same.size() == 1);
    CHECK(same[0].first == g.vertex_path(e1.source));
    CHECK(same[0].second == g.vertex_path(e1.source));
    CHECK(g.lambda_min(e1, g.edge_path(*g.find_edge("h"))).empty());  // ranges v and u
}

TEST_CASE("property: normal form equals the rewrite-closure oracle") {
    std::mt19937_64 rng(5);
    std::size_t words = 0;
    for (const auto& cg : kms::testing::make_corpus(20, 21)) {
        const KGraph& g = cg.graph;
        if (g.rank() < 2) continue;
        for (VertexId v = 0; v < g.vertex_count(); ++v) {
            // random composable mixed words of length 3 and 4
            for (int t = 0; t < 6; ++t) {
                std::vector<EdgeId> w;
                VertexId at = v;
                const std::size_t len = 3 + rng() % 2;
                while (w.size() < len) {
                    std::vector<EdgeId> into;
                    for (EdgeId e = 0; e < g.edge_count(); ++e)
                        if (g.edge(e).dst == at) into.push_back(e);
                    const EdgeId e = into[rng() % into.size()];
                    w.push_back(e);
                    at = g.edge(e).src;
                }
                const Path p = g.normal_form(w);
                CHECK(p.edges == oracle::sorted_representative(g, w));
                CHECK(p.range == v);
                CHECK(p.source == at);
                ++words;
            }
        }
    }
    CHECK(words > 20);
}

TEST_CASE("property: degrees add and segments recompose") {
    for (const auto& cg : kms::testing::make_corpus(10, 31)) {
        const KGraph& g = cg.graph;
        const Degree two = Degree::uniform(g.rank(), 2);
        for (VertexId v = 0; v < g.vertex_count(); ++v)
            for (const Path& p : g.enumerate_paths(v, two)) {
                for_each_degree_below(two, [&](const Degree& a) {
                    const Path head = g.segment(p, Degree(g.rank()), a);
                    const Path tail = g.segment(p, a, p.degree);
                    CHECK(head.degree + tail.degree == p.degree);
                    CHECK(g.compose(head, tail) == p);
                    CHECK(g.vertex_at(p, a) == head.source);
                });
            }
    }
}

TEST_CASE("property: lambda_min equals the brute-force oracle") {
    std::size_t pairs = 0;
    for (const auto& cg : kms::testing::make_corpus(10, 41)) {
        const KGraph& g = cg.graph;
        const Degree one = Degree::uniform(g.rank(), 1);
        std::vector<Path> paths;
        for (VertexId v = 0; v < g.vertex_count(); ++v)
            for_each_degree_below(one, [&](const Degree& d) {
                if (d.is_zero()) return;
                for (const Path& p : g.enumerate_paths(v, d)) paths.push_back(p);
            });
        for (const Path& a : paths)
            for (const Path& b : paths) {
                if (a.range != b.range) continue;
                std::set<std::pair<oracle::Word, oracle::Word>> got;
                for (const auto& [d, n] : g.lambda_min(a, b)) {
                    CHECK(g.compose(a, d) == g.compose(b, n));
                    got.insert({d.edges, n.edges});
                }
                CHECK(got == oracle::lambda_min(g, a.edges, b.edges));
                ++pairs;
            }
    }
    CHECK(pairs > 50);
}

TEST_CASE("components: order and closures") {
    const KGraph g = kms::testing::sink_feeding();
    const auto& cs = g.components();
    REQUIRE(cs.components.size() == 2);
    const auto v = *g.find_vertex("v"), u = *g.find_vertex("u");
    const auto& cv = cs.components[cs.component_of[v]];
    const auto& cu = cs.components[cs.component_of[u]];
    CHECK_FALSE(cv.trivial);
    CHECK(cu.trivial);
    CHECK(cv.closure == std::vector<VertexId>{0, 1});
    CHECK(cs.leq(cu.index, cv.index));  // u Λ v != ∅
    CHECK_FALSE(cs.leq(cv.index, cu.index));

    const KGraph two = kms::testing::data_graph("two-disjoint.json");
    CHECK(two.components().components.size() == 2);
    CHECK_FALSE(two.components().leq(0, 1));
    CHECK_FALSE(two.components().leq(1, 0));
    CHECK(kms::testing::cycle(4).components().components.size() == 1);
}

TEST_CASE("property: reachability equals the transitive-closure oracle") {
    for (const auto& cg : kms::testing::make_corpus(20, 51)) {
        const KGraph& g = cg.graph;
        const auto r = oracle::reachability(g);
        const auto& cs = g.components();
        for (VertexId v = 0; v < g.vertex_count(); ++v)
            for (VertexId w = 0; w < g.vertex_count(); ++w) {
                CHECK(g.reaches(v, w) == r[v][w]);
                CHECK(cs.leq(cs.component_of[v], cs.component_of[w]) == r[v][w]);
                const bool same = cs.component_of[v] == cs.component_of[w];
                CHECK(same == (r[v][w] && r[w][v]));
            }
    }
}

TEST_CASE("export round trip") {
    for (const auto& cg : kms::testing::make_corpus(6, 61)) {
        const KGraph again = KGraph::validate(parse_kgraph(export_kgraph(cg.graph)));
        CHECK(export_kgraph(again) == export_kgraph(cg.graph));
    }
    const std::string dot = export_dot(kms::testing::sink_feeding());
    CHECK(dot.find("\"v\" -> \"u\"") != std::string::npos);
    CHECK(dot.find("color=1") != std::string::npos);
}

TEST_CASE("path count overflow is reported") {
    const KGraph g = kms::testing::loops(1000);
    CHECK_THROWS_AS(g.path_count_matrix(Degree{8}), OverflowError);
}
