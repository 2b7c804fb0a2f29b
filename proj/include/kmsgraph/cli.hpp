#pragma once

// Command-line front end. Everything except main() lives here so the tests can
// drive the commands in-process.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "kmsgraph/harmonic.hpp"
#include "kmsgraph/kgraph.hpp"
#include "kmsgraph/rational.hpp"

namespace kms::cli {

enum ExitCode : int { Success = 0, DomainFailure = 1, UsageFailure = 2 };

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// β as typed: a decimal, or ln(q) for rational q > 0, which keeps q around so
/// Boltzmann factors can be computed exactly.
struct BetaSpec {
    std::string text;
    double value = 0.0;
    std::optional<Rational> base;
};

struct ScanRange {
    double lo = 0.0;
    double hi = 0.0;
    std::optional<double> step;  // accepted for compatibility; β is solved, not sampled
};

struct SessionConfig {
    std::string graph_path;
    std::string r_text;
    std::string beta_text;
    std::string scan_text;
    Tolerances tol;
    std::string per_box;  // N or n1,n2,...
    std::optional<std::size_t> per_depth;
    std::size_t cyl_depth = 4;
    std::uint64_t seed = 1;
    std::string format = "json";
    std::string dot_out;

    // command specific
    std::string vector_path;
    std::string suites = "kms,quasi-invariance,consistency,f-independence,symmetry,per-oracle";
    std::string perturb;  // vertex:delta
    std::string cap = "2";
    std::size_t samples = 8;
    std::string state = "gauge";
    std::string component;  // vertex name picking the component
    std::string xi;
    std::string lambda;
    std::string gamma;
};

BetaSpec parse_beta(const std::string& text);
std::vector<double> parse_r(const std::string& text, std::size_t rank);
ScanRange parse_scan(const std::string& text);
Rational parse_rational(const std::string& text);
/// N or n1,...,nk
Degree parse_degree(const std::string& text, std::size_t rank);

struct VectorFile {
    std::vector<double> values;
    std::optional<std::vector<Rational>> exact;  // when every entry was rational
};

/// Either a JSON object {vertex: value} or whitespace/comma separated
/// vertex:value tokens. Values may be decimals or p/q. Vertices not listed
/// are zero.
VectorFile parse_vector(const KGraph& graph, std::string_view text);

std::string render_text(const nlohmann::json& report);

/// argv without the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kms::cli
