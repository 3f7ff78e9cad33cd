#include "novflow/io.hpp"

#include <limits>

namespace novflow {

namespace {

[[noreturn]] void schema(const std::string& path, const std::string& what) {
    throw SchemaError((path.empty() ? "/" : path) + ": " + what);
}

const Json& field(const Json& j, const std::string& path, const char* key) {
    if (!j.is_object()) schema(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) schema(path, std::string("missing field \"") + key + "\"");
    return *it;
}

const Json* optional_field(const Json& j, const char* key) {
    auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

const Json& array(const Json& j, const std::string& path) {
    if (!j.is_array()) schema(path, "expected an array");
    return j;
}

Integer read_integer(const Json& j, const std::string& path) {
    if (j.is_number_integer()) return j.is_number_unsigned() ? Integer(j.get<std::uint64_t>()) : Integer(j.get<std::int64_t>());
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        const std::size_t start = !s.empty() && s[0] == '-' ? 1 : 0;
        if (s.size() == start || s.find_first_not_of("0123456789", start) != std::string::npos)
            schema(path, "malformed integer \"" + s + "\"");
        return Integer(s);
    }
    schema(path, "expected an integer");
}

long long read_int(const Json& j, const std::string& path) {
    if (!j.is_number_integer()) schema(path, "expected an integer");
    if (j.is_number_unsigned() && j.get<std::uint64_t>() > static_cast<std::uint64_t>(std::numeric_limits<long long>::max()))
        schema(path, "integer out of range");
    return j.get<long long>();
}

int read_small(const Json& j, const std::string& path, int lo, int hi) {
    const long long v = read_int(j, path);
    if (v < lo || v > hi) schema(path, "value " + std::to_string(v) + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return static_cast<int>(v);
}

std::string read_string(const Json& j, const std::string& path) {
    if (!j.is_string()) schema(path, "expected a string");
    return j.get<std::string>();
}

bool read_bool(const Json& j, const std::string& path) {
    if (!j.is_boolean()) schema(path, "expected a boolean");
    return j.get<bool>();
}

Rational read_rational(const Json& j, const std::string& path) {
    if (j.is_number_integer() || (j.is_string() && j.get<std::string>().find('/') == std::string::npos))
        return Rational(read_integer(j, path));
    if (j.is_string()) {
        try {
            return parse_rational(j.get<std::string>());
        } catch (const Error& e) {
            schema(path, e.what());
        }
    }
    if (!j.is_object()) schema(path, "expected a rational {\"num\", \"den\"}");
    const Integer num = read_integer(field(j, path, "num"), path + "/num");
    const Integer den = read_integer(field(j, path, "den"), path + "/den");
    if (den == 0) schema(path, "zero denominator");
    return Rational(num, den);
}

ExtRational read_truncation(const Json& j, const std::string& path) {
    if (j.is_string() && j.get<std::string>() == "exact") return ExtRational::infinity();
    return read_rational(j, path);
}

NovikovElement read_novikov(const Json& j, const std::string& path) {
    if (j.is_string()) {
        try {
            return parse_novikov(j.get<std::string>());
        } catch (const Error& e) {
            schema(path, e.what());
        }
    }
    if (j.is_number_integer()) return NovikovElement::constant(read_integer(j, path));
    std::vector<NovikovTerm> terms;
    const auto& ts = array(field(j, path, "terms"), path + "/terms");
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const std::string p = path + "/terms/" + std::to_string(i);
        terms.push_back({read_integer(field(ts[i], p, "coeff"), p + "/coeff"), read_rational(field(ts[i], p, "exp"), p + "/exp")});
    }
    ExtRational t = ExtRational::infinity();
    if (const Json* tj = optional_field(j, "truncation")) t = read_truncation(*tj, path + "/truncation");
    return NovikovElement::from_terms(std::move(terms), t);
}

NovikovMatrix read_matrix(const Json& j, const std::string& path) {
    const auto& rows = array(field(j, path, "entries"), path + "/entries");
    const std::size_t r = rows.size();
    std::size_t c = 0;
    if (const Json* cj = optional_field(j, "cols")) c = static_cast<std::size_t>(read_small(*cj, path + "/cols", 0, 1 << 20));
    else if (r > 0) c = array(rows[0], path + "/entries/0").size();
    if (const Json* rj = optional_field(j, "rows"))
        if (static_cast<std::size_t>(read_small(*rj, path + "/rows", 0, 1 << 20)) != r) schema(path + "/rows", "does not match the entries");
    std::vector<NovikovElement> entries;
    for (std::size_t i = 0; i < r; ++i) {
        const std::string p = path + "/entries/" + std::to_string(i);
        const auto& row = array(rows[i], p);
        if (row.size() != c) schema(p, "row has " + std::to_string(row.size()) + " entries, expected " + std::to_string(c));
        for (std::size_t k = 0; k < c; ++k) entries.push_back(read_novikov(row[k], p + "/" + std::to_string(k)));
    }
    ExtRational t = ExtRational::infinity();
    if (const Json* tj = optional_field(j, "truncation")) t = read_truncation(*tj, path + "/truncation");
    return NovikovMatrix(r, c, std::move(entries), t);
}

NovikovGroupDesc read_group(const Json& j, const std::string& path) {
    std::vector<Rational> energy;
    std::vector<long long> grading;
    const auto& e = array(field(j, path, "energy"), path + "/energy");
    for (std::size_t i = 0; i < e.size(); ++i) energy.push_back(read_rational(e[i], path + "/energy/" + std::to_string(i)));
    const auto& g = array(field(j, path, "grading"), path + "/grading");
    for (std::size_t i = 0; i < g.size(); ++i) grading.push_back(read_int(g[i], path + "/grading/" + std::to_string(i)));
    if (energy.size() != grading.size()) schema(path, "energy and grading have different lengths");
    return NovikovGroupDesc::make(std::move(energy), std::move(grading));
}

NovikovComplex read_complex(const Json& j, const std::string& path) {
    NovikovGroupDesc group;
    if (const Json* gj = optional_field(j, "group")) group = read_group(*gj, path + "/group");
    std::vector<ComplexGenerator> gens;
    const auto& gs = array(field(j, path, "generators"), path + "/generators");
    for (std::size_t i = 0; i < gs.size(); ++i) {
        const std::string p = path + "/generators/" + std::to_string(i);
        gens.push_back({read_string(field(gs[i], p, "id"), p + "/id"), read_int(field(gs[i], p, "degree"), p + "/degree")});
    }
    const auto d = read_matrix(field(j, path, "differential"), path + "/differential");
    if (d.rows() != gens.size() || d.cols() != gens.size()) schema(path + "/differential", "must be square of the generator count");
    bool lambda0 = false;
    if (const Json* lj = optional_field(j, "lambda0")) lambda0 = read_bool(*lj, path + "/lambda0");
    try {
        return NovikovComplex(group, std::move(gens), d, lambda0);
    } catch (const Error& e) {
        schema(path + "/differential", e.what());
    }
}

LabelKind read_kind(const Json& j, const std::string& path) {
    const auto s = read_string(j, path);
    if (s == "sized") return LabelKind::sized;
    if (s == "bullet") return LabelKind::bullet;
    if (s == "unit") return LabelKind::unit;
    schema(path, "unknown label kind \"" + s + "\"");
}

const char* kind_name(LabelKind k) {
    switch (k) {
        case LabelKind::sized: return "sized";
        case LabelKind::bullet: return "bullet";
        case LabelKind::unit: return "unit";
    }
    return "sized";
}

FlowCategoryDesc read_flow(const Json& j, const std::string& path) {
    FlowCategoryDesc f;
    if (const Json* gj = optional_field(j, "group")) f.group = read_group(*gj, path + "/group");
    const auto& os = array(field(j, path, "objects"), path + "/objects");
    for (std::size_t i = 0; i < os.size(); ++i) {
        const std::string p = path + "/objects/" + std::to_string(i);
        f.objects.push_back({read_string(field(os[i], p, "id"), p + "/id"), read_int(field(os[i], p, "mu"), p + "/mu"),
                             read_rational(field(os[i], p, "energy"), p + "/energy")});
    }
    const auto& ms = array(field(j, path, "morphisms"), path + "/morphisms");
    for (std::size_t i = 0; i < ms.size(); ++i) {
        const std::string p = path + "/morphisms/" + std::to_string(i);
        MorphismRecord m;
        m.source = read_string(field(ms[i], p, "source"), p + "/source");
        m.target = read_string(field(ms[i], p, "target"), p + "/target");
        if (const Json* gj = optional_field(ms[i], "g")) {
            const auto& g = array(*gj, p + "/g");
            for (std::size_t k = 0; k < g.size(); ++k) m.g.push_back(read_int(g[k], p + "/g/" + std::to_string(k)));
        }
        m.kind = LabelKind::sized;
        if (const Json* kj = optional_field(ms[i], "kind")) m.kind = read_kind(*kj, p + "/kind");
        if (const Json* rj = optional_field(ms[i], "r")) m.r = read_small(*rj, p + "/r", 0, 1 << 20);
        if (const Json* cj = optional_field(ms[i], "count"); cj && !cj->is_null()) m.count = read_integer(*cj, p + "/count");
        f.morphisms.push_back(std::move(m));
    }
    if (const Json* fj = optional_field(j, "flags")) {
        const std::string p = path + "/flags";
        if (!fj->is_object()) schema(p, "expected an object");
        for (const auto& [key, value] : fj->items()) {
            const bool b = read_bool(value, p + "/" + key);
            if (key == "proper") f.flags.proper = b;
            else if (key == "e_proper") f.flags.e_proper = b;
            else if (key == "e_positive") f.flags.e_positive = b;
            else if (key == "gapped") f.flags.gapped = b;
            else schema(p + "/" + key, "unknown flag");
        }
    }
    return f;
}

StratumLabel read_label(const Json& j, const std::string& path, int k) {
    std::vector<int> elems;
    const auto& a = array(j, path);
    for (std::size_t i = 0; i < a.size(); ++i) elems.push_back(read_small(a[i], path + "/" + std::to_string(i), 1, std::max(k, 1)));
    try {
        return StratumLabel::of(k, elems);
    } catch (const Error& e) {
        schema(path, e.what());
    }
}

Json label_to_json(const StratumLabel& s) { return Json(s.elements()); }

CombStratSpace read_strat(const Json& j, const std::string& path) {
    const int k = read_small(field(j, path, "k"), path + "/k", 0, StratumLabel::kMaxK);
    std::vector<StratCell> cells;
    const auto& cs = array(field(j, path, "cells"), path + "/cells");
    for (std::size_t i = 0; i < cs.size(); ++i) {
        const std::string p = path + "/cells/" + std::to_string(i);
        cells.push_back({read_string(field(cs[i], p, "id"), p + "/id"), read_small(field(cs[i], p, "dim"), p + "/dim", 0, 1 << 20),
                         read_label(field(cs[i], p, "label"), p + "/label", k)});
    }
    std::vector<StratFace> faces;
    if (const Json* fj = optional_field(j, "faces")) {
        const auto& fs = array(*fj, path + "/faces");
        for (std::size_t i = 0; i < fs.size(); ++i) {
            const std::string p = path + "/faces/" + std::to_string(i);
            faces.push_back({read_string(field(fs[i], p, "cell"), p + "/cell"), read_string(field(fs[i], p, "face"), p + "/face"),
                             static_cast<int>(read_int(field(fs[i], p, "incidence"), p + "/incidence"))});
        }
    }
    try {
        return CombStratSpace(k, std::move(cells), std::move(faces));
    } catch (const Error& e) {
        schema(path, e.what());
    }
}

Poly read_poly(const Json& j, const std::string& path, int nvars) {
    if (const Json* nj = optional_field(j, "nvars"))
        if (read_int(*nj, path + "/nvars") != nvars) schema(path + "/nvars", "expected " + std::to_string(nvars) + " variables");
    Poly p(nvars);
    const auto& ts = array(field(j, path, "terms"), path + "/terms");
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const std::string q = path + "/terms/" + std::to_string(i);
        const auto& ej = array(field(ts[i], q, "exp"), q + "/exp");
        if (static_cast<int>(ej.size()) != nvars) schema(q + "/exp", "expected " + std::to_string(nvars) + " exponents");
        Exponent e;
        for (std::size_t k = 0; k < ej.size(); ++k) e.push_back(read_small(ej[k], q + "/exp/" + std::to_string(k), 0, 64));
        p.add_term(e, read_rational(field(ts[i], q, "coeff"), q + "/coeff"));
    }
    return p;
}

PolyMap read_components(const Json& j, const std::string& path, int nvars) {
    PolyMap out;
    const auto& a = array(j, path);
    for (std::size_t i = 0; i < a.size(); ++i) out.push_back(read_poly(a[i], path + "/" + std::to_string(i), nvars));
    return out;
}

SectionOnBox read_section(const Json& j, const std::string& path) {
    SectionOnBox s;
    s.corner = read_small(field(j, path, "corner"), path + "/corner", 0, 8);
    s.free = read_small(field(j, path, "free"), path + "/free", 0, 8);
    s.map = read_components(field(j, path, "components"), path + "/components", s.corner + s.free);
    return s;
}

RatMatrix read_rat_matrix(const Json& j, const std::string& path, int n) {
    RatMatrix m;
    const auto& rows = array(j, path);
    if (static_cast<int>(rows.size()) != n) schema(path, "expected " + std::to_string(n) + " rows");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::string p = path + "/" + std::to_string(i);
        const auto& row = array(rows[i], p);
        if (static_cast<int>(row.size()) != n) schema(p, "expected " + std::to_string(n) + " entries");
        std::vector<Rational> r;
        for (std::size_t k = 0; k < row.size(); ++k) r.push_back(read_rational(row[k], p + "/" + std::to_string(k)));
        m.push_back(std::move(r));
    }
    return m;
}

FiniteGroupRep read_group_rep(const Json& j, const std::string& path) {
    const int nV = read_small(field(j, path, "nV"), path + "/nV", 0, 8);
    const int nW = read_small(field(j, path, "nW"), path + "/nW", 0, 8);
    std::vector<GroupElement> gens;
    const auto& gs = array(field(j, path, "generators"), path + "/generators");
    for (std::size_t i = 0; i < gs.size(); ++i) {
        const std::string p = path + "/generators/" + std::to_string(i);
        gens.push_back({read_rat_matrix(field(gs[i], p, "v"), p + "/v", nV), read_rat_matrix(field(gs[i], p, "w"), p + "/w", nW)});
    }
    try {
        return FiniteGroupRep(nV, nW, std::move(gens));
    } catch (const InvariantViolation& e) {
        schema(path + "/generators", e.what());
    }
}

BoundaryData read_boundary(const Json& j, const std::string& path) {
    BoundaryData bd;
    bd.corner = read_small(field(j, path, "corner"), path + "/corner", 0, 8);
    bd.free = read_small(field(j, path, "free"), path + "/free", 0, 8);
    bd.codim = read_small(field(j, path, "codim"), path + "/codim", 0, 8);
    const auto& fs = array(field(j, path, "faces"), path + "/faces");
    for (std::size_t i = 0; i < fs.size(); ++i) {
        const std::string p = path + "/faces/" + std::to_string(i);
        const auto T = read_label(field(fs[i], p, "stratum"), p + "/stratum", bd.corner);
        if (bd.faces.count(T)) schema(p + "/stratum", "duplicate face " + T.to_string());
        bd.faces[T] = read_components(field(fs[i], p, "components"), p + "/components", bd.corner + bd.free);
    }
    if (const Json* gj = optional_field(j, "group"); gj && !gj->is_null()) bd.group = read_group_rep(*gj, path + "/group");
    return bd;
}

Json group_to_json(const NovikovGroupDesc& g) {
    Json e = Json::array();
    for (const auto& x : g.energy) e.push_back(rational_to_json(x));
    return {{"energy", e}, {"grading", g.grading}};
}

Json rat_matrix_to_json(const RatMatrix& m) {
    Json out = Json::array();
    for (const auto& row : m) {
        Json r = Json::array();
        for (const auto& x : row) r.push_back(rational_to_json(x));
        out.push_back(r);
    }
    return out;
}

Json group_rep_to_json(const FiniteGroupRep& g) {
    Json gens = Json::array();
    for (const auto& e : g.generators()) gens.push_back({{"v", rat_matrix_to_json(e.v)}, {"w", rat_matrix_to_json(e.w)}});
    return {{"nV", g.nV()}, {"nW", g.nW()}, {"generators", gens}};
}

Json components_to_json(const PolyMap& p) {
    Json out = Json::array();
    for (const auto& c : p) out.push_back(poly_to_json(c));
    return out;
}

struct PayloadWriter {
    Json& out;

    void operator()(const NovikovMatrix& m) const {
        const Json j = matrix_to_json(m);
        for (const auto& [k, v] : j.items()) out[k] = v;
    }
    void operator()(const NovikovComplex& c) const {
        out["group"] = group_to_json(c.group());
        Json gens = Json::array();
        for (const auto& g : c.generators()) gens.push_back({{"id", g.id}, {"degree", g.degree}});
        out["generators"] = gens;
        out["differential"] = matrix_to_json(c.full_differential());
        out["lambda0"] = c.lambda0();
    }
    void operator()(const FlowCategoryDesc& f) const {
        out["group"] = group_to_json(f.group);
        Json objs = Json::array();
        for (const auto& o : f.objects) objs.push_back({{"id", o.id}, {"mu", o.mu}, {"energy", rational_to_json(o.energy)}});
        out["objects"] = objs;
        Json ms = Json::array();
        for (const auto& m : f.morphisms) {
            Json r = {{"source", m.source}, {"target", m.target}, {"g", m.g}, {"kind", kind_name(m.kind)}, {"r", m.r}};
            if (m.count) r["count"] = integer_to_json(*m.count);
            ms.push_back(r);
        }
        out["morphisms"] = ms;
        out["flags"] = {{"proper", f.flags.proper}, {"e_proper", f.flags.e_proper}, {"e_positive", f.flags.e_positive},
                        {"gapped", f.flags.gapped}};
    }
    void operator()(const CombStratSpace& x) const {
        out["k"] = x.k();
        Json cells = Json::array();
        for (const auto& c : x.cells()) cells.push_back({{"id", c.id}, {"dim", c.dim}, {"label", label_to_json(c.label)}});
        out["cells"] = cells;
        Json faces = Json::array();
        for (const auto& f : x.faces()) faces.push_back({{"cell", f.cell}, {"face", f.face}, {"incidence", f.incidence}});
        out["faces"] = faces;
    }
    void operator()(const SectionOnBox& s) const {
        out["corner"] = s.corner;
        out["free"] = s.free;
        out["components"] = components_to_json(s.map);
    }
    void operator()(const FiniteGroupRep& g) const {
        const Json j = group_rep_to_json(g);
        for (const auto& [k, v] : j.items()) out[k] = v;
    }
    void operator()(const BoundaryData& bd) const {
        out["corner"] = bd.corner;
        out["free"] = bd.free;
        out["codim"] = bd.codim;
        Json faces = Json::array();
        for (const auto& [T, p] : bd.faces) faces.push_back({{"stratum", label_to_json(T)}, {"components", components_to_json(p)}});
        out["faces"] = faces;
        if (bd.group) out["group"] = group_rep_to_json(*bd.group);
    }
};

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

}  // namespace

std::string Document::kind() const {
    static const char* names[] = {"novikov_matrix", "complex", "flow_category", "strat_space",
                                  "section", "group_rep", "boundary_data"};
    return names[payload.index()];
}

Document parse_document(std::string_view text) {
    Json j;
    try {
        j = Json::parse(text.begin(), text.end());
    } catch (const Json::parse_error& e) {
        const auto [line, col] = line_column(text, e.byte);
        std::string msg = e.what();
        if (auto pos = msg.find("parse error"); pos != std::string::npos) msg = msg.substr(pos);
        throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + msg);
    }
    if (!j.is_object()) schema("", "a document must be a JSON object");
    const auto fmt = read_int(field(j, "", "fmt"), "/fmt");
    if (fmt != kFormatVersion) schema("/fmt", "unsupported format version " + std::to_string(fmt));
    const auto kind = read_string(field(j, "", "kind"), "/kind");
    if (kind == "novikov_matrix") return {read_matrix(j, "")};
    if (kind == "complex") return {read_complex(j, "")};
    if (kind == "flow_category") return {read_flow(j, "")};
    if (kind == "strat_space") return {read_strat(j, "")};
    if (kind == "section") return {read_section(j, "")};
    if (kind == "group_rep") return {read_group_rep(j, "")};
    if (kind == "boundary_data") return {read_boundary(j, "")};
    schema("/kind", "unknown kind \"" + kind + "\"");
}

Json to_json(const Document& doc) {
    Json out = {{"fmt", kFormatVersion}, {"kind", doc.kind()}};
    std::visit(PayloadWriter{out}, doc.payload);
    return out;
}

std::string serialize(const Document& doc) { return to_json(doc).dump(2) + "\n"; }

Json integer_to_json(const Integer& n) {
    if (n >= std::numeric_limits<std::int64_t>::min() && n <= std::numeric_limits<std::int64_t>::max())
        return Json(static_cast<std::int64_t>(n));
    return Json(n.str());
}

Json rational_to_json(const Rational& r) {
    return {{"num", integer_to_json(numerator(r))}, {"den", integer_to_json(denominator(r))}};
}

Json truncation_to_json(const ExtRational& t) {
    if (t.is_infinite()) return "exact";
    return rational_to_json(t.value());
}

Json novikov_to_json(const NovikovElement& e) {
    Json terms = Json::array();
    for (const auto& t : e.terms()) terms.push_back({{"coeff", integer_to_json(t.coeff)}, {"exp", rational_to_json(t.exponent)}});
    return {{"terms", terms}, {"truncation", truncation_to_json(e.truncation())}, {"text", e.to_string()}};
}

Json matrix_to_json(const NovikovMatrix& m) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (std::size_t k = 0; k < m.cols(); ++k) row.push_back(novikov_to_json(m(i, k)));
        rows.push_back(row);
    }
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"truncation", truncation_to_json(m.truncation())}, {"entries", rows}};
}

Json cohomology_to_json(const GradedCohomology& h) {
    Json degrees = Json::array();
    for (const auto& [k, d] : h.degrees) {
        Json torsion = Json::array();
        for (const auto& t : d.torsion) torsion.push_back(integer_to_json(t));
        degrees.push_back({{"degree", k}, {"free", d.free_rank}, {"torsion", torsion}});
    }
    return {{"modulus", h.modulus}, {"degrees", degrees}, {"text", h.to_string()}};
}

Json poly_to_json(const Poly& p) {
    Json terms = Json::array();
    for (const auto& [e, c] : p.terms()) terms.push_back({{"exp", e}, {"coeff", rational_to_json(c)}});
    return {{"nvars", p.nvars()}, {"terms", terms}, {"text", p.to_string()}};
}

}  // namespace novflow
