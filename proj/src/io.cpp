#include "cpflow/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include "cpflow/errors.hpp"

namespace cpflow::io
{

using nlohmann::json;

namespace
{

void check_format(const json& doc, const char* what)
{
    if (!doc.is_object()) {
        throw ParseError(std::string(what) + ": document must be a JSON object");
    }
    if (!doc.contains("format")) {
        throw ParseError(std::string(what) + ": missing field 'format'");
    }
    if (!doc["format"].is_number_integer() || doc["format"].get<int>() != kFormatVersion) {
        throw ParseError(std::string(what) + ": field 'format' must be " +
                         std::to_string(kFormatVersion));
    }
}

void reject_unknown(const json& doc, const std::set<std::string>& known, const char* what)
{
    for (const auto& [key, value] : doc.items()) {
        if (!known.count(key)) {
            throw ParseError(std::string(what) + ": unknown field '" + key + "'");
        }
    }
}

double number_field(const json& v, const std::string& field)
{
    if (!v.is_number()) {
        throw ParseError("field '" + field + "' must be a number");
    }
    return v.get<double>();
}

std::vector<Face> parse_faces(const json& doc)
{
    if (!doc.contains("faces")) {
        throw ParseError("surface: missing field 'faces'");
    }
    const json& faces = doc["faces"];
    if (!faces.is_array() || faces.empty()) {
        throw ParseError("surface: field 'faces' must be a nonempty array");
    }
    std::vector<Face> out;
    for (std::size_t f = 0; f < faces.size(); ++f) {
        const json& tri = faces[f];
        if (!tri.is_array() || tri.size() != 3) {
            throw ParseError("surface: faces[" + std::to_string(f) + "] must have 3 entries");
        }
        Face face{};
        for (int k = 0; k < 3; ++k) {
            if (!tri[k].is_number_integer()) {
                throw ParseError("surface: faces[" + std::to_string(f) +
                                 "] entries must be integers");
            }
            face[k] = tri[k].get<int>();
        }
        out.push_back(face);
    }
    return out;
}

InversiveDistances parse_inversive(const json& doc, const SurfaceComplex& complex)
{
    if (!doc.contains("inversive")) {
        throw ParseError("surface: missing field 'inversive'");
    }
    const json& inv = doc["inversive"];
    std::optional<double> fallback;
    if (doc.contains("inversive_default")) {
        fallback = number_field(doc["inversive_default"], "inversive_default");
    }
    if (inv.is_number()) {
        if (fallback) {
            throw ParseError("surface: 'inversive_default' only applies to an edge list");
        }
        return InversiveDistances(complex.edge_count(), inv.get<double>());
    }
    if (!inv.is_array()) {
        throw ParseError("surface: field 'inversive' must be a number or an array");
    }
    std::vector<std::optional<double>> values(complex.edge_count());
    for (std::size_t n = 0; n < inv.size(); ++n) {
        const json& entry = inv[n];
        const std::string where = "inversive[" + std::to_string(n) + "]";
        if (!entry.is_object() || !entry.contains("edge") || !entry.contains("value")) {
            throw ParseError("surface: " + where + " needs 'edge' and 'value'");
        }
        reject_unknown(entry, {"edge", "value"}, ("surface: " + where).c_str());
        const json& e = entry["edge"];
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() ||
            !e[1].is_number_integer()) {
            throw ParseError("surface: " + where + ".edge must be two integers");
        }
        const int a = e[0].get<int>();
        const int b = e[1].get<int>();
        if (!complex.has_edge(a, b)) {
            throw ParseError("surface: " + where + ".edge [" + std::to_string(a) + "," +
                             std::to_string(b) + "] is not an edge of the complex");
        }
        const std::size_t idx = complex.edge_index(a, b);
        if (values[idx]) {
            throw ParseError("surface: " + where + " duplicates edge [" + std::to_string(a) +
                             "," + std::to_string(b) + "]");
        }
        values[idx] = number_field(entry["value"], where + ".value");
    }
    InversiveDistances out(complex.edge_count());
    for (std::size_t e = 0; e < values.size(); ++e) {
        if (values[e]) {
            out[e] = *values[e];
        } else if (fallback) {
            out[e] = *fallback;
        } else {
            const Edge& edge = complex.edges()[e];
            throw ParseError("surface: field 'inversive' has no value for edge [" +
                             std::to_string(edge.a) + "," + std::to_string(edge.b) +
                             "] and no 'inversive_default'");
        }
    }
    return out;
}

}  // namespace

PackingMetric SurfaceFile::metric() const
{
    if (!radii) {
        throw ParseError("surface: missing field 'radii'");
    }
    return PackingMetric::make(complex, background, inversive, *radii, allow_negative_inversive);
}

SurfaceFile parse_surface(const json& doc)
{
    check_format(doc, "surface");
    reject_unknown(doc,
                   {"format", "background", "faces", "inversive", "inversive_default",
                    "allow_negative_inversive", "radii"},
                   "surface");
    if (!doc.contains("background")) {
        throw ParseError("surface: missing field 'background'");
    }
    const json& bg = doc["background"];
    Background background;
    if (bg == "hyperbolic") {
        background = Background::hyperbolic;
    } else if (bg == "euclidean") {
        background = Background::euclidean;
    } else {
        throw ParseError("surface: field 'background' must be \"euclidean\" or \"hyperbolic\"");
    }
    SurfaceComplex complex = SurfaceComplex::build(parse_faces(doc));
    InversiveDistances inversive = parse_inversive(doc, complex);
    bool permissive = false;
    if (doc.contains("allow_negative_inversive")) {
        if (!doc["allow_negative_inversive"].is_boolean()) {
            throw ParseError("surface: field 'allow_negative_inversive' must be a boolean");
        }
        permissive = doc["allow_negative_inversive"].get<bool>();
    }
    std::optional<Eigen::VectorXd> radii;
    if (doc.contains("radii")) {
        const json& r = doc["radii"];
        if (!r.is_array() || r.size() != complex.vertex_count()) {
            throw ParseError("surface: field 'radii' must list " +
                             std::to_string(complex.vertex_count()) + " numbers");
        }
        radii = Eigen::VectorXd(static_cast<Eigen::Index>(r.size()));
        for (std::size_t i = 0; i < r.size(); ++i) {
            (*radii)[static_cast<Eigen::Index>(i)] =
                number_field(r[i], "radii[" + std::to_string(i) + "]");
        }
    }
    SurfaceFile out{std::move(complex), background, std::move(inversive), std::move(radii),
                    permissive};
    // Validate the inversive distances (and radii when present) eagerly.
    PackingMetric::make(out.complex, out.background, out.inversive,
                        out.radii.value_or(Eigen::VectorXd::Ones(
                            static_cast<Eigen::Index>(out.complex.vertex_count()))),
                        permissive);
    return out;
}

json read_json(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open " + path.string());
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& err) {
        throw ParseError(path.string() + ": " + err.what());
    }
}

void write_json(const std::filesystem::path& path, const json& doc)
{
    std::ofstream out(path);
    if (!out) {
        throw ParseError("cannot write " + path.string());
    }
    out << doc.dump(2) << '\n';
}

SurfaceFile load_surface(const std::filesystem::path& path)
{
    return parse_surface(read_json(path));
}

json surface_to_json(const SurfaceFile& surface)
{
    json doc;
    doc["format"] = kFormatVersion;
    doc["background"] = std::string(to_string(surface.background));
    json faces = json::array();
    for (const auto& f : surface.complex.faces()) {
        faces.push_back({f[0], f[1], f[2]});
    }
    doc["faces"] = std::move(faces);
    json inv = json::array();
    for (std::size_t e = 0; e < surface.complex.edge_count(); ++e) {
        const Edge& edge = surface.complex.edges()[e];
        inv.push_back({{"edge", {edge.a, edge.b}}, {"value", surface.inversive[e]}});
    }
    doc["inversive"] = std::move(inv);
    if (surface.allow_negative_inversive) {
        doc["allow_negative_inversive"] = true;
    }
    if (surface.radii) {
        doc["radii"] = std::vector<double>(surface.radii->data(),
                                           surface.radii->data() + surface.radii->size());
    }
    return doc;
}

void save_surface(const std::filesystem::path& path, const SurfaceFile& surface)
{
    write_json(path, surface_to_json(surface));
}

Eigen::VectorXd parse_target(const json& doc, std::size_t vertex_count)
{
    check_format(doc, "target");
    reject_unknown(doc, {"format", "target"}, "target");
    if (!doc.contains("target")) {
        throw ParseError("target: missing field 'target'");
    }
    const json& t = doc["target"];
    if (!t.is_array() || t.size() != vertex_count) {
        throw ParseError("target: field 'target' must list " + std::to_string(vertex_count) +
                         " numbers");
    }
    Eigen::VectorXd out(static_cast<Eigen::Index>(vertex_count));
    for (std::size_t i = 0; i < vertex_count; ++i) {
        out[static_cast<Eigen::Index>(i)] = number_field(t[i], "target[" + std::to_string(i) + "]");
    }
    return out;
}

Eigen::VectorXd load_target(const std::filesystem::path& path, std::size_t vertex_count)
{
    return parse_target(read_json(path), vertex_count);
}

json target_to_json(const Eigen::VectorXd& target)
{
    return json{{"format", kFormatVersion},
                {"target", std::vector<double>(target.data(), target.data() + target.size())}};
}

std::vector<std::vector<VertexId>> load_subsets(const std::filesystem::path& path)
{
    const json doc = read_json(path);
    check_format(doc, "subsets");
    reject_unknown(doc, {"format", "subsets"}, "subsets");
    if (!doc.contains("subsets") || !doc["subsets"].is_array()) {
        throw ParseError("subsets: missing array field 'subsets'");
    }
    std::vector<std::vector<VertexId>> out;
    for (const auto& s : doc["subsets"]) {
        if (!s.is_array()) {
            throw ParseError("subsets: every entry of 'subsets' must be an array of vertex ids");
        }
        std::vector<VertexId> members;
        for (const auto& v : s) {
            if (!v.is_number_integer()) {
                throw ParseError("subsets: vertex ids must be integers");
            }
            members.push_back(v.get<int>());
        }
        out.push_back(std::move(members));
    }
    return out;
}

std::vector<std::string> trace_columns(std::size_t vertex_count)
{
    std::vector<std::string> cols{"t"};
    for (std::size_t i = 0; i < vertex_count; ++i) {
        cols.push_back("u" + std::to_string(i));
    }
    for (std::size_t i = 0; i < vertex_count; ++i) {
        cols.push_back("K" + std::to_string(i));
    }
    cols.insert(cols.end(), {"M", "m", "potential"});
    return cols;
}

namespace
{

void put_double(std::ostream& out, double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    out << buf;
}

}  // namespace

void write_trace_csv(std::ostream& out, const std::vector<FlowSample>& trace,
                     std::size_t vertex_count)
{
    const auto cols = trace_columns(vertex_count);
    for (std::size_t c = 0; c < cols.size(); ++c) {
        out << (c ? "," : "") << cols[c];
    }
    out << '\n';
    for (const auto& s : trace) {
        put_double(out, s.t);
        for (Eigen::Index i = 0; i < s.u.size(); ++i) {
            out << ',';
            put_double(out, s.u[i]);
        }
        for (Eigen::Index i = 0; i < s.curvature.size(); ++i) {
            out << ',';
            put_double(out, s.curvature[i]);
        }
        out << ',';
        put_double(out, s.max_curvature);
        out << ',';
        put_double(out, s.min_curvature);
        out << ',';
        put_double(out, s.potential);
        out << '\n';
    }
}

json trace_to_json(const std::vector<FlowSample>& trace, std::size_t vertex_count)
{
    json rows = json::array();
    for (const auto& s : trace) {
        json row = json::array();
        row.push_back(s.t);
        for (Eigen::Index i = 0; i < s.u.size(); ++i) {
            row.push_back(s.u[i]);
        }
        for (Eigen::Index i = 0; i < s.curvature.size(); ++i) {
            row.push_back(s.curvature[i]);
        }
        row.push_back(s.max_curvature);
        row.push_back(s.min_curvature);
        // JSON has no NaN; an unrecorded potential is null.
        row.push_back(std::isnan(s.potential) ? json(nullptr) : json(s.potential));
        rows.push_back(std::move(row));
    }
    return json{{"format", kFormatVersion}, {"columns", trace_columns(vertex_count)},
                {"rows", std::move(rows)}};
}

json obstruction_report_to_json(const ObstructionReport& report)
{
    json records = json::array();
    for (const auto& r : report.records) {
        records.push_back(
            {{"subset", r.subset}, {"bound", r.bound}, {"observed", r.observed}, {"margin", r.margin}});
    }
    return json{{"kind", std::string(to_string(report.kind))},
                {"verdict", report.verdict},
                {"failures", report.failures},
                {"min_margin", report.records.empty() ? json(nullptr) : json(report.min_margin)},
                {"records", std::move(records)}};
}

std::string sha256_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open " + path.string());
    }
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
    char buf[8192];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), digest, &len);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) {
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    }
    return hex.str();
}

}  // namespace cpflow::io
