#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "kmsgraph/algebra.hpp"
#include "kmsgraph/cli.hpp"
#include "kmsgraph/graph_io.hpp"
#include "kmsgraph/pathspace.hpp"
#include "kmsgraph/spectral.hpp"

namespace kms::cli {

using json = nlohmann::json;

namespace {

constexpr int kSchema = 1;

struct Outcome {
    json report;
    int code = Success;
};

std::string read_file(const std::string& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure(std::string("cannot open ") + what + " '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string rational_text(const Rational& q) {
    std::ostringstream os;
    os << q;
    return os.str();
}

json issues_json(const std::vector<ValidationIssue>& issues) {
    json out = json::array();
    for (const auto& i : issues) out.push_back({{"kind", to_string(i.kind)}, {"detail", i.detail}});
    return out;
}

/// nullopt when the document is invalid; the report then carries the errors.
std::optional<KGraph> load_graph(const SessionConfig& cfg, json& report) {
    if (cfg.graph_path.empty()) throw UsageError("--graph is required");
    const std::string text = read_file(cfg.graph_path, "graph file");
    try {
        return KGraph::validate(parse_kgraph(text));
    } catch (const ParseError& e) {
        report["valid"] = false;
        json err{{"kind", "ParseError"}, {"detail", e.what()}};
        if (e.line()) {
            err["line"] = e.line();
            err["column"] = e.column();
        }
        report["errors"] = json::array({err});
    } catch (const ValidationError& e) {
        report["valid"] = false;
        report["errors"] = issues_json(e.issues());
    }
    return std::nullopt;
}

json base_report(const std::string& command, const SessionConfig& cfg) {
    json inputs{{"graph", cfg.graph_path},
                {"eps_cmp", cfg.tol.eps_cmp},
                {"eps_match", cfg.tol.eps_match},
                {"residual_tol", cfg.tol.residual},
                {"seed", cfg.seed}};
    if (!cfg.r_text.empty()) inputs["r"] = cfg.r_text;
    if (!cfg.beta_text.empty()) inputs["beta"] = cfg.beta_text;
    if (!cfg.scan_text.empty()) inputs["beta_scan"] = cfg.scan_text;
    if (!cfg.per_box.empty()) inputs["per_box"] = cfg.per_box;
    if (cfg.per_depth) inputs["per_depth"] = *cfg.per_depth;
    return {{"schema", kSchema}, {"command", command}, {"inputs", inputs}};
}

json names_of(const KGraph& g, const std::vector<VertexId>& vs) {
    json out = json::array();
    for (VertexId v : vs) out.push_back(g.vertex_name(v));
    return out;
}

json component_json(const KGraph& g, std::size_t c) {
    return {{"index", c}, {"vertices", names_of(g, g.components().components.at(c).vertices)}};
}

json vector_json(const KGraph& g, const std::vector<double>& x) {
    json out = json::object();
    for (VertexId v = 0; v < g.vertex_count(); ++v) out[g.vertex_name(v)] = x[v];
    return out;
}

json exact_vector_json(const KGraph& g, const std::vector<Rational>& x) {
    json out = json::object();
    for (VertexId v = 0; v < g.vertex_count(); ++v) out[g.vertex_name(v)] = rational_text(x[v]);
    return out;
}

json degree_json(const Degree& d) { return d.coords(); }

json per_json(const PeriodicityGroup& per) {
    json basis = json::array();
    for (const auto& b : per.group.basis()) basis.push_back(b);
    return {{"basis", basis},
            {"rank", per.group.dimension()},
            {"box", degree_json(per.box)},
            {"complete", per.complete},
            {"certified_depth", per.certified_depth()},
            {"note", "certified to depth " + std::to_string(per.certified_depth()) +
                         (per.complete ? "" : "; some differences in the box left undecided")}};
}

PerSearchOptions per_options(const SessionConfig& cfg, const KGraph& g) {
    PerSearchOptions o;
    if (!cfg.per_box.empty()) o.box = parse_degree(cfg.per_box, g.rank());
    o.p_max = cfg.per_depth;
    return o;
}

BetaSpec require_beta(const SessionConfig& cfg) {
    if (cfg.beta_text.empty()) throw UsageError("--beta is required");
    return parse_beta(cfg.beta_text);
}

Dynamics dynamics_for(const std::vector<double>& r, const BetaSpec& b) { return Dynamics{r, b.value, b.base}; }

HarmonicVector extremal_harmonic(const HarmonicComponentInfo& info, const std::vector<double>& r, double beta) {
    HarmonicVector h{r, beta, info.extremal->x, info.extremal->exact};
    return h;
}

/// Every ρ_i matches β r_i, regardless of the harmonic decision.
bool spectrum_matches(const SpectrumVector& s, const std::vector<double>& r, double beta, const Tolerances& tol) {
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!(s[i] > 0)) return false;
        if (std::fabs(beta * r[i] - std::log(s[i])) > tol.eps_match) return false;
    }
    return true;
}

std::optional<std::size_t> component_by_vertex(const KGraph& g, const std::string& name) {
    if (name.empty()) return std::nullopt;
    const auto v = g.find_vertex(name);
    if (!v) throw UsageError("unknown vertex '" + name + "' for --component");
    return g.components().component_of.at(*v);
}

// ------------------------------------------------------------------ validate

Outcome cmd_validate(const SessionConfig& cfg) {
    Outcome o{base_report("validate", cfg)};
    auto graph = load_graph(cfg, o.report);
    if (!graph) {
        o.code = DomainFailure;
        return o;
    }
    const KGraph& g = *graph;
    o.report["valid"] = true;
    o.report["status"] = "valid";
    json comps = json::array();
    for (const auto& c : g.components().components) {
        json cj = component_json(g, c.index);
        cj["trivial"] = c.trivial;
        cj["closure"] = names_of(g, c.closure);
        comps.push_back(cj);
    }
    o.report["results"] = {{"rank", g.rank()},
                           {"vertices", g.vertex_count()},
                           {"edges", g.edge_count()},
                           {"squares", g.squares().size()},
                           {"components", comps}};
    if (!cfg.dot_out.empty()) {
        std::ofstream out(cfg.dot_out);
        if (!out) throw std::ios_base::failure("cannot write '" + cfg.dot_out + "'");
        out << export_dot(g);
    }
    return o;
}

// ----------------------------------------------------------------------- kms

Outcome cmd_kms(const SessionConfig& cfg) {
    Outcome o{base_report("kms", cfg)};
    auto graph = load_graph(cfg, o.report);
    if (!graph) {
        o.code = DomainFailure;
        return o;
    }
    const KGraph& g = *graph;
    const auto r = parse_r(cfg.r_text, g.rank());
    const BetaSpec beta = require_beta(cfg);
    const auto f = default_well_chosen(g);
    const auto popts = per_options(cfg, g);

    json states = json::array();
    for (const auto& fam : extremal_states(g, r, beta.value, f, cfg.tol, popts)) {
        json s = component_json(g, fam.info.component);
        s["spectrum"] = fam.info.spectrum;
        s["x"] = vector_json(g, fam.info.extremal->x);
        if (fam.info.extremal->exact) s["x_exact"] = exact_vector_json(g, *fam.info.extremal->exact);
        s["rho_f"] = fam.info.extremal->rho_f;
        s["per"] = per_json(fam.per);
        s["torus_dimension"] = fam.torus_dimension;
        states.push_back(s);
    }
    json diagnostics = json::array();
    for (const auto& info : analyse_components(g, f, cfg.tol)) {
        if (info.harmonic || g.components().components[info.component].trivial) continue;
        if (!spectrum_matches(info.spectrum, r, beta.value, cfg.tol)) continue;
        json d = component_json(g, info.component);
        d["status"] = to_string(info.status);
        d["spectrum"] = info.spectrum;
        if (info.blocking) d["blocking"] = component_json(g, *info.blocking);
        diagnostics.push_back(d);
    }
    o.report["results"] = {{"states", states}, {"count", states.size()}, {"diagnostics", diagnostics}};
    if (states.empty()) o.report["results"]["message"] = "no KMS states at this (r, beta)";
    return o;
}

// --------------------------------------------------------------------- phase

Outcome cmd_phase(const SessionConfig& cfg) {
    Outcome o{base_report("phase", cfg)};
    auto graph = load_graph(cfg, o.report);
    if (!graph) {
        o.code = DomainFailure;
        return o;
    }
    const KGraph& g = *graph;
    const auto r = parse_r(cfg.r_text, g.rank());
    std::optional<ScanRange> scan;
    if (!cfg.scan_text.empty()) scan = parse_scan(cfg.scan_text);

    const auto temps = admissible_temperatures(g, r, cfg.tol);
    const auto spectra = analyse_components(g, default_well_chosen(g), cfg.tol);
    std::vector<std::pair<double, std::size_t>> found;
    json all = json::array();
    for (const auto& t : temps) {
        if (t.all_beta) {
            json c = component_json(g, t.component);
            c["spectrum"] = spectra[t.component].spectrum;
            all.push_back(c);
            continue;
        }
        if (!t.beta) continue;
        if (scan && (*t.beta < scan->lo - cfg.tol.eps_match || *t.beta > scan->hi + cfg.tol.eps_match)) continue;
        found.emplace_back(*t.beta, t.component);
    }
    std::sort(found.begin(), found.end());
    json phases = json::array();
    for (std::size_t i = 0; i < found.size();) {
        std::size_t j = i;
        json comps = json::array();
        while (j < found.size() && found[j].first - found[i].first <= cfg.tol.eps_match) {
            json c = component_json(g, found[j].second);
            c["spectrum"] = spectra[found[j].second].spectrum;
            comps.push_back(c);
            ++j;
        }
        phases.push_back({{"beta", found[i].first}, {"components", comps}});
        i = j;
    }
    if (!all.empty()) phases.push_back({{"beta", "all"}, {"components", all}});
    o.report["results"] = {{"phases", phases}, {"count", phases.size()}};
    return o;
}

// -------------------------------------------------------------------- verify

struct Target {
    std::string label;
    std::optional<std::size_t> component;
    HarmonicVector psi;
};

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',' || c == ' ') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

void apply_perturbation(const KGraph& g, const std::string& spec, HarmonicVector& h) {
    const auto colon = spec.rfind(':');
    if (colon == std::string::npos) throw UsageError("--perturb expects vertex:delta");
    const auto v = g.find_vertex(spec.substr(0, colon));
    if (!v) throw UsageError("--perturb names unknown vertex");
    const double delta = parse_beta(spec.substr(colon + 1)).value;  // plain real
    h.psi.at(*v) += delta;
    double total = 0.0;
    for (double x : h.psi) total += x;
    if (!(total > 0)) throw UsageError("perturbation leaves no mass");
    for (double& x : h.psi) x /= total;
    h.exact.reset();
}

Phase grid_phase(std::mt19937_64& rng, std::uint64_t grid) {
    return Phase::exact(Rational(static_cast<long long>(rng() % grid), static_cast<long long>(grid)));
}

json check_json(const CheckReport& c) {
    return {{"pass", c.pass()}, {"checked", c.checked}, {"violations", c.violations}, {"worst", c.worst},
            {"examples", c.examples}};
}

json kms_json(const KmsReport& k) {
    return {{"pass", k.pass()}, {"checked", k.checked}, {"failures", k.failures},
            {"max_violation", k.max_violation}, {"examples", k.examples}};
}

Outcome cmd_verify(const SessionConfig& cfg) {
    Outcome o{base_report("verify", cfg)};
    auto graph = load_graph(cfg, o.report);
    if (!graph) {
        o.code = DomainFailure;
        return o;
    }
    const KGraph& g = *graph;
    const auto r = parse_r(cfg.r_text, g.rank());
    const BetaSpec beta = require_beta(cfg);
    const Degree cap = parse_degree(cfg.cap, g.rank());
    const auto f = default_well_chosen(g);
    const auto popts = per_options(cfg, g);
    const Dynamics dyn = dynamics_for(r, beta);
    o.report["inputs"]["cap"] = degree_json(cap);
    o.report["inputs"]["samples"] = cfg.samples;
    if (!cfg.perturb.empty()) o.report["inputs"]["perturb"] = cfg.perturb;
    if (!cfg.vector_path.empty()) o.report["inputs"]["vector"] = cfg.vector_path;

    const auto wanted = split_list(cfg.suites);
    static const std::vector<std::string> known{"kms", "quasi-invariance", "consistency",
                                                "f-independence", "symmetry", "per-oracle"};
    for (const auto& s : wanted)
        if (std::find(known.begin(), known.end(), s) == known.end()) throw UsageError("unknown suite '" + s + "'");
    auto selected = [&](const char* s) { return std::find(wanted.begin(), wanted.end(), s) != wanted.end(); };

    const auto families = extremal_states(g, r, beta.value, f, cfg.tol, popts);
    std::vector<Target> targets;
    if (!cfg.vector_path.empty()) {
        const auto vf = parse_vector(g, read_file(cfg.vector_path, "vector file"));
        targets.push_back({"vector", std::nullopt, HarmonicVector{r, beta.value, vf.values, vf.exact}});
    } else {
        for (const auto& fam : families)
            targets.push_back({"C" + std::to_string(fam.info.component), fam.info.component,
                               extremal_harmonic(fam.info, r, beta.value)});
    }
    if (!cfg.perturb.empty())
        for (auto& t : targets) apply_perturbation(g, cfg.perturb, t.psi);

    const Algebra algebra(g);
    std::mt19937_64 rng(cfg.seed);
    json suites = json::object();
    std::size_t passed = 0, failed = 0;
    auto record = [&](const std::string& suite, const std::string& label, json result) {
        (result.at("pass").get<bool>() ? passed : failed) += 1;
        suites[suite][label] = std::move(result);
    };

    for (const auto& t : targets) {
        const CylinderMeasure m(g, t.psi);
        if (selected("consistency")) record("consistency", t.label, check_json(check_consistency(g, m, cap)));
        if (selected("quasi-invariance"))
            record("quasi-invariance", t.label,
                   check_json(check_quasi_invariance(g, m, same_source_pairs(g, cap))));
        if (selected("kms")) {
            const StateEvaluator omega(algebra, GaugeInvariantState{t.psi, dyn});
            record("kms", t.label + "/gauge", kms_json(verify_kms_spanning(algebra, omega, cap, cfg.tol.residual)));
        }
    }

    for (const auto& fam : families) {
        const std::size_t c = fam.info.component;
        const std::string label = "C" + std::to_string(c);
        const HarmonicVector x = extremal_harmonic(fam.info, r, beta.value);
        const std::size_t dim = fam.per.group.dimension();
        const Component& comp = g.components().components[c];

        if (selected("kms") && cfg.vector_path.empty() && cfg.perturb.empty()) {
            // twisted states at seeded characters of Per(C)
            for (std::size_t s = 0; s < cfg.samples && dim > 0; ++s) {
                Character xi;
                for (std::size_t i = 0; i < dim; ++i) xi.theta.push_back(grid_phase(rng, 8));
                TwistedState ts{c, fam.per, xi, x, dyn, cfg.cyl_depth};
                const StateEvaluator omega(algebra, ts);
                json res = kms_json(verify_kms_spanning(algebra, omega, cap, cfg.tol.residual));
                std::string name;
                for (const auto& p : xi.theta) name += (name.empty() ? "" : ",") + p.to_string();
                record("kms", label + "/xi=" + name, res);
            }
        }
        if (selected("f-independence")) {
            WellChosenSet f2;
            for_each_degree_below(Degree::uniform(g.rank(), static_cast<std::uint32_t>(g.vertex_count() + 1)),
                                  [&](const Degree& d) {
                                      if (!d.is_zero()) f2.degrees.push_back(d);
                                  });
            const auto rep = f_independence_check(g, c, f, f2, cfg.tol);
            record("f-independence", label,
                   {{"pass", rep.pass}, {"decisions_agree", rep.decisions_agree},
                    {"max_difference", rep.max_difference}});
        }
        if (selected("symmetry")) {
            TwistedState base{c, fam.per, Character::trivial(dim), x, dyn, cfg.cyl_depth};
            // the cap must reach the basis of Per(C), or no element can
            // tell a nontrivial restriction apart
            Degree sym_cap = cap;
            for (const auto& b : fam.per.group.basis())
                for (std::size_t i = 0; i < b.size(); ++i)
                    sym_cap[i] = std::max<std::uint32_t>(sym_cap[i], static_cast<std::uint32_t>(std::llabs(b[i])));
            const auto tests = algebra.spanning_elements(sym_cap);
            json res = json::array();
            bool ok = true;
            for (std::size_t s = 0; s < cfg.samples; ++s) {
                TorusPoint eta;
                for (std::size_t i = 0; i < g.rank(); ++i) eta.eta.push_back(grid_phase(rng, 8));
                const auto rep = verify_symmetry(algebra, base, eta, tests, cfg.tol.residual);
                json ej = json::array();
                for (const auto& p : eta.eta) ej.push_back(p.to_string());
                json item{{"eta", ej},
                          {"pass", rep.pass},
                          {"restriction_trivial", rep.restriction_trivial},
                          {"equivariance_error", rep.equivariance_error},
                          {"separation", rep.separation}};
                if (rep.witness)
                    item["witness"] = {{"lambda", word_of(g, rep.witness->first)},
                                       {"gamma", word_of(g, rep.witness->second)}};
                ok = ok && rep.pass;
                res.push_back(item);
            }
            record("symmetry", label, {{"pass", ok}, {"samples", res}});
        }
        if (selected("per-oracle")) {
            // every basis vector must survive a deeper re-check, and sampled
            // paths must show no shift coincidence outside the group
            bool ok = true;
            json basis = json::array();
            for (const auto& b : fam.per.group.basis()) {
                Degree plus(g.rank()), minus(g.rank());
                for (std::size_t i = 0; i < b.size(); ++i)
                    (b[i] > 0 ? plus : minus)[i] = static_cast<std::uint32_t>(std::llabs(b[i]));
                const auto res = shift_relation_holds(g, comp, plus, minus,
                                                      default_shift_depth(comp, plus, minus) + 1, popts.budget);
                ok = ok && res.verdict != ShiftVerdict::Refuted;
                basis.push_back({{"g", b}, {"verdict", to_string(res.verdict)}, {"depth", res.depth}});
            }
            const CylinderMeasure m(g, x);
            // chance coincidences over a window of w decay like rho^-w; the
            // window is long enough that none should show up in the sample
            const auto audit = isotropy_audit(g, comp, fam.per, m, fam.per.box, 64 * cfg.samples,
                                              8 * comp.vertices.size() + 24, cfg.seed);
            ok = ok && audit.violations == 0;
            record("per-oracle", label,
                   {{"pass", ok},
                    {"basis_recheck", basis},
                    {"audit",
                     {{"samples", audit.samples},
                      {"eventually_in_c", audit.eventually_in_c},
                      {"violations", audit.violations},
                      {"examples", audit.examples}}}});
        }
    }

    o.report["results"] = {{"suites", suites}};
    if (targets.empty()) o.report["results"]["message"] = "no KMS states at this (r, beta)";
    o.report["counts"] = {{"pass", passed}, {"fail", failed}};
    o.code = failed == 0 ? Success : DomainFailure;
    return o;
}

// ----------------------------------------------------------------- decompose

Outcome cmd_decompose(const SessionConfig& cfg) {
    Outcome o{base_report("decompose", cfg)};
    auto graph = load_graph(cfg, o.report);
    if (!graph) {
        o.code = DomainFailure;
        return o;
    }
    const KGraph& g = *graph;
    const auto r = parse_r(cfg.r_text, g.rank());
    const BetaSpec beta = require_beta(cfg);
    if (cfg.vector_path.empty()) throw UsageError("--vector is required");
    o.report["inputs"]["vector"] = cfg.vector_path;
    const auto vf = parse_vector(g, read_file(cfg.vector_path, "vector file"));

    const auto hr = verify_harmonic(g, vf.values, r, beta.value, cfg.tol);
    json check{{"pass", hr.pass},
               {"nonnegative", hr.nonnegative},
               {"norm_error", hr.norm_error},
               {"residuals", hr.residuals},
               {"max_residual", hr.max_residual}};
    if (!hr.pass) {
        std::string why;
        if (!hr.nonnegative) why = "vector has negative entries";
        else if (hr.norm_error > 1e-10) why = "vector does not have unit 1-norm (error " + std::to_string(hr.norm_error) + ")";
        else
            for (std::size_t i = 0; i < hr.residuals.size(); ++i)
                if (hr.residuals[i] > cfg.tol.residual) {
                    std::ostringstream os;
                    os << "residual for colour " << i + 1 << " is " << hr.residuals[i] << " > " << cfg.tol.residual;
                    why = os.str();
                    break;
                }
        o.report["results"] = {{"harmonic_check", check}, {"diagnostic", why}};
        o.code = DomainFailure;
        return o;
    }
    try {
        const auto d = decompose(g, HarmonicVector{r, beta.value, vf.values, vf.exact}, default_well_chosen(g),
                                 cfg.tol);
        json comps = json::array();
        for (const auto& [c, t] : d.weights) {
            json cj = component_json(g, c);
            cj["weight"] = t;
            comps.push_back(cj);
        }
        o.report["results"] = {{"harmonic_check", check},
                               {"components", comps},
                               {"residual", d.residual},
                               {"max_deviation", d.max_deviation}};
    } catch (const ResidualTooLarge& e) {
        o.report["results"] = {{"harmonic_check", check},
                               {"diagnostic", std::string("ResidualTooLarge: ") + e.what()},
                               {"residual", e.residual()}};
        o.code = DomainFailure;
    }
    return o;
}

// ---------------------------------------------------------------------- eval

Outcome cmd_eval(const SessionConfig& cfg) {
    Outcome o{base_report("eval", cfg)};
    auto graph = load_graph(cfg, o.report);
    if (!graph) {
        o.code = DomainFailure;
        return o;
    }
    const KGraph& g = *graph;
    const auto r = parse_r(cfg.r_text, g.rank());
    const BetaSpec beta = require_beta(cfg);
    const Dynamics dyn = dynamics_for(r, beta);
    if (cfg.lambda.empty() || cfg.gamma.empty()) throw UsageError("--lambda and --gamma are required");
    o.report["inputs"]["state"] = cfg.state;
    o.report["inputs"]["lambda"] = cfg.lambda;
    o.report["inputs"]["gamma"] = cfg.gamma;
    if (!cfg.component.empty()) o.report["inputs"]["component"] = cfg.component;
    if (!cfg.xi.empty()) o.report["inputs"]["xi"] = cfg.xi;
    if (!cfg.vector_path.empty()) o.report["inputs"]["vector"] = cfg.vector_path;

    Path lambda, gamma;
    try {
        lambda = path_from_word(g, split_list(cfg.lambda));
        gamma = path_from_word(g, split_list(cfg.gamma));
        if (lambda.source != gamma.source) throw GraphError("lambda and gamma have different sources");
    } catch (const GraphError& e) {
        o.report["errors"] = json::array({{{"kind", "MalformedWord"}, {"detail", e.what()}}});
        o.code = DomainFailure;
        return o;
    }

    const auto f = default_well_chosen(g);
    const auto families = extremal_states(g, r, beta.value, f, cfg.tol, per_options(cfg, g));
    const auto picked = component_by_vertex(g, cfg.component);
    const ExtremalFamily* fam = nullptr;
    for (const auto& fm : families)
        if (!picked || fm.info.component == *picked) {
            fam = &fm;
            break;
        }

    const Algebra algebra(g);
    json cert = json::object();
    std::optional<StateEvaluator> omega;
    if (cfg.state == "gauge") {
        HarmonicVector psi;
        if (!cfg.vector_path.empty()) {
            const auto vf = parse_vector(g, read_file(cfg.vector_path, "vector file"));
            psi = HarmonicVector{r, beta.value, vf.values, vf.exact};
            const auto hr = verify_harmonic(g, vf.values, r, beta.value, cfg.tol);
            cert["harmonic_check"] = hr.pass;
            if (!hr.pass) o.report["warning"] = "vector is not harmonic at this (r, beta); value is not a KMS state value";
        } else {
            if (!fam) {
                o.report["results"] = {{"message", "no KMS states at this (r, beta)"}};
                o.code = DomainFailure;
                return o;
            }
            psi = extremal_harmonic(fam->info, r, beta.value);
            cert["component"] = component_json(g, fam->info.component);
        }
        omega.emplace(algebra, GaugeInvariantState{psi, dyn});
    } else if (cfg.state == "twisted") {
        if (!fam) {
            o.report["results"] = {{"message", "component is not in C_r(beta)"}};
            o.code = DomainFailure;
            return o;
        }
        const std::size_t dim = fam->per.group.dimension();
        Character xi = Character::trivial(dim);
        if (!cfg.xi.empty()) {
            xi.theta.clear();
            for (const auto& s : split_list(cfg.xi)) {
                const Rational q = parse_rational(s);
                xi.theta.push_back(Phase::exact(q));
            }
            if (xi.theta.size() != dim)
                throw UsageError("--xi needs " + std::to_string(dim) + " phases (rank of Per(C))");
        }
        TwistedState ts{fam->info.component, fam->per, xi, extremal_harmonic(fam->info, r, beta.value), dyn,
                        cfg.cyl_depth};
        cert["component"] = component_json(g, fam->info.component);
        cert["per"] = per_json(fam->per);
        cert["cyl_depth"] = cfg.cyl_depth;
        const auto member = fam->per.membership(difference(lambda.degree, gamma.degree));
        cert["per_membership"] = member == PeriodicityGroup::Membership::In    ? "in"
                                 : member == PeriodicityGroup::Membership::Out ? "out"
                                                                               : "unknown";
        omega.emplace(algebra, ts);
    } else {
        throw UsageError("--state must be gauge or twisted");
    }

    const StateValue v = omega->evaluate_term(lambda, gamma, Scalar(1));
    json value;
    if (v.exact) {
        value = to_json(g, *v.exact);
        value["kind"] = "exact";
    } else if (v.is_point()) {
        value = {{"kind", "float"}, {"re", v.value().real()}, {"im", v.value().imag()}};
    } else {
        value = {{"kind", "interval"},
                 {"re_lo", v.range.re_lo},
                 {"re_hi", v.range.re_hi},
                 {"im_lo", v.range.im_lo},
                 {"im_hi", v.range.im_hi}};
        o.report["warning"] = v.uncertified
                                  ? "Per(C) membership of d(lambda)-d(gamma) undecided at this depth; value bounded"
                                  : "isotropy mass only bounded at this refinement depth";
    }
    o.report["results"] = {{"value", value}, {"certification", cert}};
    return o;
}

// -------------------------------------------------------------------- export

Outcome cmd_export(const SessionConfig& cfg, std::ostream& out) {
    Outcome o{base_report("export", cfg)};
    auto graph = load_graph(cfg, o.report);
    if (!graph) {
        o.code = DomainFailure;
        return o;
    }
    if (cfg.dot_out == "-") {
        out << export_dot(*graph);
    } else {
        if (!cfg.dot_out.empty()) {
            std::ofstream f(cfg.dot_out);
            if (!f) throw std::ios_base::failure("cannot write '" + cfg.dot_out + "'");
            f << export_dot(*graph);
        }
        out << export_kgraph(*graph);
    }
    o.report = nullptr;  // document already written
    return o;
}

void add_common(CLI::App* sub, SessionConfig& cfg) {
    sub->add_option("--graph", cfg.graph_path, "graph document (JSON)")->required();
    sub->add_option("--eps-cmp", cfg.tol.eps_cmp, "spectral comparison tolerance");
    sub->add_option("--eps-match", cfg.tol.eps_match, "tolerance for beta r_i = ln rho_i");
    sub->add_option("--residual-tol", cfg.tol.residual, "harmonic residual / KMS tolerance");
    sub->add_option("--per-box", cfg.per_box, "Per(C) search box, N or n1,...,nk");
    sub->add_option("--per-depth", cfg.per_depth, "fixed shift-relation depth p_max");
    sub->add_option("--cyl-depth", cfg.cyl_depth, "isotropy refinement depth");
    sub->add_option("--seed", cfg.seed, "random seed");
    sub->add_option("--format", cfg.format, "json or text")->check(CLI::IsMember({"json", "text"}));
}

void add_temperature(CLI::App* sub, SessionConfig& cfg) {
    sub->add_option("--r", cfg.r_text, "dynamics vector a,b,...")->required();
    sub->add_option("--beta", cfg.beta_text, "inverse temperature, X or ln(q)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    SessionConfig cfg;
    CLI::App app{"KMS states of finite higher-rank graph algebras", "kmsgraph"};
    app.require_subcommand(1);

    auto* validate = app.add_subcommand("validate", "check a graph document");
    add_common(validate, cfg);
    validate->add_option("--dot", cfg.dot_out, "also write a DOT rendering");

    auto* kms = app.add_subcommand("kms", "list the extremal KMS states at (r, beta)");
    add_common(kms, cfg);
    add_temperature(kms, cfg);

    auto* phase = app.add_subcommand("phase", "inverse temperatures admitting KMS states");
    add_common(phase, cfg);
    phase->add_option("--r", cfg.r_text, "dynamics vector a,b,...")->required();
    phase->add_option("--beta-scan", cfg.scan_text, "lo:hi");

    auto* verify = app.add_subcommand("verify", "run verification suites");
    add_common(verify, cfg);
    add_temperature(verify, cfg);
    verify->add_option("--suites", cfg.suites, "comma separated subset of " + cfg.suites);
    verify->add_option("--cap", cfg.cap, "degree cap for spanning elements, N or n1,...,nk");
    verify->add_option("--samples", cfg.samples, "random characters / torus points per component");
    verify->add_option("--vector", cfg.vector_path, "check this harmonic vector instead of the x^C");
    verify->add_option("--perturb", cfg.perturb, "vertex:delta added to the vector before checking");

    auto* decomp = app.add_subcommand("decompose", "decompose a harmonic vector");
    add_common(decomp, cfg);
    add_temperature(decomp, cfg);
    decomp->add_option("--vector", cfg.vector_path, "vertex:value file")->required();

    auto* eval = app.add_subcommand("eval", "evaluate a state on t_lambda t_gamma*");
    add_common(eval, cfg);
    add_temperature(eval, cfg);
    eval->add_option("--state", cfg.state, "gauge or twisted");
    eval->add_option("--component", cfg.component, "a vertex of the component C");
    eval->add_option("--xi", cfg.xi, "character of Per(C) as phases p/q against its basis");
    eval->add_option("--vector", cfg.vector_path, "harmonic vector for the gauge-invariant state");
    eval->add_option("--lambda", cfg.lambda, "edge ids, comma separated, or @vertex")->required();
    eval->add_option("--gamma", cfg.gamma, "edge ids, comma separated, or @vertex")->required();

    auto* exp = app.add_subcommand("export", "re-emit the graph document");
    add_common(exp, cfg);
    exp->add_option("--dot", cfg.dot_out, "write a DOT rendering ('-' for stdout instead of JSON)");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return UsageFailure;
    }

    try {
        Outcome o;
        if (validate->parsed()) o = cmd_validate(cfg);
        else if (kms->parsed()) o = cmd_kms(cfg);
        else if (phase->parsed()) o = cmd_phase(cfg);
        else if (verify->parsed()) o = cmd_verify(cfg);
        else if (decomp->parsed()) o = cmd_decompose(cfg);
        else if (eval->parsed()) o = cmd_eval(cfg);
        else o = cmd_export(cfg, out);

        if (!o.report.is_null()) {
            if (cfg.format == "text") out << render_text(o.report);
            else out << o.report.dump(2) << "\n";
        }
        if (o.code != Success) err << "kmsgraph: " << (o.report.contains("errors") ? "invalid input" : "check failed")
                                   << "\n";
        return o.code;
    } catch (const UsageError& e) {
        err << "kmsgraph: " << e.what() << "\n";
        return UsageFailure;
    } catch (const std::ios_base::failure& e) {
        err << "kmsgraph: " << e.what() << "\n";
        return UsageFailure;
    } catch (const OverflowError& e) {
        err << "kmsgraph: " << e.what() << "\n";
        return DomainFailure;
    } catch (const std::exception& e) {
        err << "kmsgraph: " << e.what() << "\n";
        return DomainFailure;
    }
}

}  // namespace kms::cli
