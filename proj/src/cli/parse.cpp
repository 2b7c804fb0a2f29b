#include <cctype>
#include <cmath>
#include <sstream>

#include "kmsgraph/cli.hpp"

namespace kms::cli {

using json = nlohmann::json;

namespace {

std::string trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

double parse_real(const std::string& text, const char* what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw UsageError(std::string("bad ") + what + " '" + text + "'");
    }
    if (used != text.size() || !std::isfinite(v)) throw UsageError(std::string("bad ") + what + " '" + text + "'");
    return v;
}

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

// cpp_int reads a leading 0 as octal
BigInt decimal_int(std::string_view digits) {
    const auto first = digits.find_first_not_of('0');
    if (first == std::string_view::npos) return 0;
    return BigInt{std::string(digits.substr(first))};
}

}  // namespace

Rational parse_rational(const std::string& raw) {
    std::string text = trim(raw);
    bool negative = false;
    std::string_view body = text;
    if (!body.empty() && (body[0] == '-' || body[0] == '+')) {
        negative = body[0] == '-';
        body.remove_prefix(1);
    }
    Rational q;
    if (const auto slash = body.find('/'); slash != std::string_view::npos) {
        const auto num = body.substr(0, slash), den = body.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den)) throw UsageError("bad rational '" + text + "'");
        const BigInt d = decimal_int(den);
        if (d == 0) throw UsageError("zero denominator in '" + text + "'");
        q = Rational(decimal_int(num), d);
    } else {
        // plain decimal, read exactly
        const auto dot = body.find('.');
        const auto whole = body.substr(0, dot);
        const auto frac = dot == std::string_view::npos ? std::string_view{} : body.substr(dot + 1);
        if ((whole.empty() && frac.empty()) || (!whole.empty() && !all_digits(whole)) ||
            (!frac.empty() && !all_digits(frac)))
            throw UsageError("bad rational '" + text + "'");
        BigInt scale = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
        const BigInt digits = decimal_int(std::string(whole) + std::string(frac));
        q = Rational(digits, scale);
    }
    return negative ? Rational(-q) : q;
}

BetaSpec parse_beta(const std::string& raw) {
    BetaSpec b;
    b.text = trim(raw);
    if (b.text.size() > 4 && b.text.rfind("ln(", 0) == 0 && b.text.back() == ')') {
        const Rational q = parse_rational(b.text.substr(3, b.text.size() - 4));
        if (q <= 0) throw UsageError("ln argument must be positive in '" + b.text + "'");
        b.base = q;
        // log of numerator and denominator separately keeps precision for big q
        b.value = std::log(to_double(Rational(numerator(q)))) - std::log(to_double(Rational(denominator(q))));
        return b;
    }
    b.value = parse_real(b.text, "beta");
    return b;
}

std::vector<double> parse_r(const std::string& text, std::size_t rank) {
    if (trim(text).empty()) throw UsageError("--r is required");
    std::vector<double> r;
    for (const auto& part : split(text, ',')) r.push_back(parse_real(part, "r component"));
    if (r.size() != rank)
        throw UsageError("r has " + std::to_string(r.size()) + " entries but the graph has rank " +
                         std::to_string(rank));
    return r;
}

ScanRange parse_scan(const std::string& text) {
    const auto parts = split(text, ':');
    if (parts.size() < 2 || parts.size() > 3) throw UsageError("scan range must be lo:hi or lo:hi:step");
    ScanRange s;
    s.lo = parse_real(parts[0], "scan bound");
    s.hi = parse_real(parts[1], "scan bound");
    if (!(s.lo < s.hi)) throw UsageError("scan range needs lo < hi");
    if (parts.size() == 3) {
        s.step = parse_real(parts[2], "scan step");
        if (!(*s.step > 0)) throw UsageError("scan step must be positive");
    }
    return s;
}

Degree parse_degree(const std::string& text, std::size_t rank) {
    const auto parts = split(text, ',');
    std::vector<std::uint32_t> coords;
    for (const auto& p : parts) {
        if (!all_digits(p) || p.size() > 6) throw UsageError("bad degree '" + text + "'");
        coords.push_back(static_cast<std::uint32_t>(std::stoul(p)));
    }
    if (coords.size() == 1) return Degree::uniform(rank, coords[0]);
    if (coords.size() != rank) throw UsageError("degree '" + text + "' does not match the rank");
    return Degree(coords);
}

VectorFile parse_vector(const KGraph& graph, std::string_view text) {
    VectorFile out;
    out.values.assign(graph.vertex_count(), 0.0);
    std::vector<Rational> exact(graph.vertex_count(), Rational(0));
    std::vector<bool> seen(graph.vertex_count(), false);
    bool all_exact = true;

    auto assign = [&](const std::string& name, const std::optional<Rational>& q, double v) {
        const auto id = graph.find_vertex(name);
        if (!id) throw UsageError("vector file names unknown vertex '" + name + "'");
        if (seen[*id]) throw UsageError("vertex '" + name + "' listed twice in vector file");
        seen[*id] = true;
        out.values[*id] = v;
        if (q) exact[*id] = *q;
        else all_exact = false;
    };
    auto value_of = [&](const std::string& name, const std::string& s) {
        try {
            const Rational q = parse_rational(s);
            assign(name, q, to_double(q));
        } catch (const UsageError&) {
            assign(name, std::nullopt, parse_real(s, "vector entry"));
        }
    };

    const std::string body = trim(text);
    if (!body.empty() && body.front() == '{') {
        json doc;
        try {
            doc = json::parse(body);
        } catch (const json::parse_error& e) {
            throw UsageError(std::string("vector file: ") + e.what());
        }
        for (const auto& [name, v] : doc.items()) {
            if (v.is_string()) value_of(name, v.get<std::string>());
            else if (v.is_number_integer()) assign(name, Rational(v.get<long long>()), v.get<double>());
            else if (v.is_number()) assign(name, std::nullopt, v.get<double>());
            else throw UsageError("vector entry for '" + name + "' is not a number");
        }
    } else {
        std::istringstream in(body);
        std::string line;
        while (std::getline(in, line)) {
            if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            for (char& c : line)
                if (c == ',') c = ' ';
            std::istringstream tokens(line);
            std::string tok;
            while (tokens >> tok) {
                const auto colon = tok.rfind(':');
                if (colon == std::string::npos || colon == 0 || colon + 1 == tok.size())
                    throw UsageError("vector token '" + tok + "' is not vertex:value");
                value_of(tok.substr(0, colon), tok.substr(colon + 1));
            }
        }
    }
    for (double v : out.values)
        if (v < 0) throw UsageError("vector entries must be nonnegative");
    if (all_exact) out.exact = std::move(exact);
    return out;
}

namespace {

std::string scalar_text(const json& j) {
    if (j.is_string()) return j.get<std::string>();
    return j.dump();
}

bool flat(const json& j) { return !j.is_object() && !j.is_array(); }

void render(const json& j, const std::string& indent, std::ostringstream& os) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) {
            if (flat(v)) {
                os << indent << k << ": " << scalar_text(v) << "\n";
            } else if (v.is_array() && std::all_of(v.begin(), v.end(), flat)) {
                os << indent << k << ": [";
                for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << scalar_text(v[i]);
                os << "]\n";
            } else if (v.empty()) {
                os << indent << k << ": (none)\n";
            } else {
                os << indent << k << ":\n";
                render(v, indent + "  ", os);
            }
        }
    } else if (j.is_array()) {
        for (const auto& v : j) {
            if (flat(v)) {
                os << indent << "- " << scalar_text(v) << "\n";
            } else {
                std::ostringstream inner;
                render(v, indent + "  ", inner);
                std::string s = inner.str();
                // put the first line on the bullet
                if (s.size() >= indent.size() + 2) s.replace(0, indent.size() + 2, indent + "- ");
                os << s;
            }
        }
    } else {
        os << indent << scalar_text(j) << "\n";
    }
}

}  // namespace

std::string render_text(const json& report) {
    std::ostringstream os;
    render(report, "", os);
    return os.str();
}

}  // namespace kms::cli
