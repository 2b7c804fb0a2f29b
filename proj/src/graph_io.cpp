#include "kmsgraph/graph_io.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

namespace kms {

using json = nlohmann::json;

namespace {

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

[[noreturn]] void reference_error(const std::string& pointer, const std::string& what) {
    throw ParseError(what + " at " + pointer, 0, 0);
}

std::string id_of(const json& value, const std::string& pointer) {
    if (value.is_string()) return value.get<std::string>();
    if (value.is_number_integer()) return std::to_string(value.get<long long>());
    reference_error(pointer, "expected string or integer id");
}

const json& field(const json& obj, const char* key, const std::string& pointer) {
    if (!obj.is_object()) reference_error(pointer, "expected object");
    auto it = obj.find(key);
    if (it == obj.end()) reference_error(pointer, std::string("missing field '") + key + "'");
    return *it;
}

}  // namespace

KGraphSpec parse_kgraph(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        auto [line, column] = line_column(text, e.byte);
        throw ParseError("syntax error at line " + std::to_string(line) + ", column " + std::to_string(column) +
                             ": " + e.what(),
                         line, column);
    }

    KGraphSpec spec;
    const json& rank = field(doc, "rank", "");
    if (!rank.is_number_integer() || rank.get<long long>() < 1) reference_error("/rank", "rank must be a positive integer");
    spec.rank = rank.get<std::size_t>();

    std::unordered_map<std::string, VertexId> vertices;
    const json& vlist = field(doc, "vertices", "");
    if (!vlist.is_array()) reference_error("/vertices", "expected array");
    for (std::size_t i = 0; i < vlist.size(); ++i) {
        const std::string ptr = "/vertices/" + std::to_string(i);
        std::string id = id_of(vlist[i], ptr);
        if (!vertices.emplace(id, static_cast<VertexId>(spec.vertices.size())).second)
            reference_error(ptr, "duplicate vertex id '" + id + "'");
        spec.vertices.push_back(std::move(id));
    }

    auto vertex_ref = [&](const json& v, const std::string& ptr) {
        std::string id = id_of(v, ptr);
        auto it = vertices.find(id);
        if (it == vertices.end()) reference_error(ptr, "unknown vertex '" + id + "'");
        return it->second;
    };

    std::unordered_map<std::string, EdgeId> edges;
    const json& elist = field(doc, "edges", "");
    if (!elist.is_array()) reference_error("/edges", "expected array");
    for (std::size_t i = 0; i < elist.size(); ++i) {
        const std::string ptr = "/edges/" + std::to_string(i);
        const json& e = elist[i];
        KGraphSpec::EdgeSpec edge;
        edge.id = id_of(field(e, "id", ptr), ptr + "/id");
        const json& color = field(e, "color", ptr);
        if (!color.is_number_integer() || color.get<long long>() < 0) reference_error(ptr + "/color", "colour must be a positive integer");
        edge.color = color.get<std::uint32_t>();
        edge.src = vertex_ref(field(e, "src", ptr), ptr + "/src");
        edge.dst = vertex_ref(field(e, "dst", ptr), ptr + "/dst");
        if (!edges.emplace(edge.id, static_cast<EdgeId>(spec.edges.size())).second)
            reference_error(ptr + "/id", "duplicate edge id '" + edge.id + "'");
        spec.edges.push_back(std::move(edge));
    }

    auto edge_ref = [&](const json& sq, const char* key, const std::string& ptr) {
        const std::string at = ptr + "/" + key;
        std::string id = id_of(field(sq, key, ptr), at);
        auto it = edges.find(id);
        if (it == edges.end()) reference_error(at, "unknown edge '" + id + "'");
        return it->second;
    };

    if (auto it = doc.find("squares"); it != doc.end()) {
        if (!it->is_array()) reference_error("/squares", "expected array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const std::string ptr = "/squares/" + std::to_string(i);
            const json& sq = (*it)[i];
            spec.squares.push_back({edge_ref(sq, "f", ptr), edge_ref(sq, "g", ptr), edge_ref(sq, "g2", ptr),
                                    edge_ref(sq, "f2", ptr)});
        }
    }
    return spec;
}

KGraphSpec parse_kgraph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open graph file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_kgraph(buf.str());
}

std::string export_kgraph(const KGraph& graph) {
    json doc;
    doc["rank"] = graph.rank();
    doc["vertices"] = json::array();
    for (VertexId v = 0; v < graph.vertex_count(); ++v) doc["vertices"].push_back(graph.vertex_name(v));
    doc["edges"] = json::array();
    for (const Edge& e : graph.edges())
        doc["edges"].push_back({{"id", e.id},
                                {"color", e.color + 1},
                                {"src", graph.vertex_name(e.src)},
                                {"dst", graph.vertex_name(e.dst)}});
    doc["squares"] = json::array();
    for (const Square& s : graph.squares())
        doc["squares"].push_back({{"f", graph.edge(s.f).id},
                                  {"g", graph.edge(s.g).id},
                                  {"g2", graph.edge(s.g2).id},
                                  {"f2", graph.edge(s.f2).id}});
    return doc.dump(2) + "\n";
}

std::string export_dot(const KGraph& graph) {
    auto quote = [](const std::string& s) {
        std::string out = "\"";
        for (char c : s) {
            if (c == '"' || c == '\\') out += '\\';
            out += c;
        }
        return out + "\"";
    };
    std::ostringstream os;
    os << "digraph kgraph {\n";
    os << "  // rank " << graph.rank() << "; edges point from source to range\n";
    for (VertexId v = 0; v < graph.vertex_count(); ++v) os << "  " << quote(graph.vertex_name(v)) << ";\n";
    for (const Edge& e : graph.edges())
        os << "  " << quote(graph.vertex_name(e.src)) << " -> " << quote(graph.vertex_name(e.dst))
           << " [label=" << quote(e.id + " (" + std::to_string(e.color + 1) + ")") << ", color=" << e.color + 1
           << ", colorscheme=set19];\n";
    os << "}\n";
    return os.str();
}

}  // namespace kms
