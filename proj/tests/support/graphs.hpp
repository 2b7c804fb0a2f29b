#pragma once

// Fixture graphs and the seeded random corpus shared by the unit and
// acceptance tests.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "kmsgraph/kgraph.hpp"

namespace kms::testing {

KGraph from_json(const std::string& text);
/// A file under data/.
KGraph data_graph(const std::string& name);
std::string data_path(const std::string& name);

KGraph flip_square();
KGraph loops(std::size_t count);                    // k = 1, one vertex
KGraph loops2(std::size_t a, std::size_t b);        // k = 2, one vertex, fg = gf
KGraph cycle(std::size_t length);                   // k = 1, v1 -> v2 -> ... -> v1
KGraph sink_feeding();                              // 2 loops at v, edge v -> u

struct EdgeList {
    std::size_t vertices = 0;
    std::vector<std::pair<std::size_t, std::size_t>> edges;  // (src, dst)
};

/// k = 1 graph from an edge list.
KGraph one_graph(const EdgeList& e);
/// k = 2 graph with the given colour-1 and colour-2 edges and squares chosen
/// by a random endpoint-preserving bijection. The vertex matrices must commute.
KGraph two_graph(const EdgeList& c1, const EdgeList& c2, std::mt19937_64& rng);

struct CorpusGraph {
    std::string name;
    KGraph graph;
};

/// Random graphs without sources, k <= 2, at most 6 vertices, with at least
/// one harmonic component. Graphs whose spanning set at degree (2,...,2)
/// exceeds `max_spanning` elements are redrawn.
std::vector<CorpusGraph> make_corpus(std::size_t count, std::uint64_t seed, std::size_t max_spanning = 400);

/// Graphs with several incomparable harmonic components of equal spectrum
/// sharing part of their closures, for decomposition round trips.
std::vector<CorpusGraph> make_mixture_corpus(std::size_t count, std::uint64_t seed);

}  // namespace kms::testing
