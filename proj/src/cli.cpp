#include "novflow/cli.hpp"

#include "novflow/io.hpp"
#include "novflow/morse.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

namespace novflow {

namespace {

struct Options {
    std::string truncation = "exact";
    double tol = 1e-8;
    std::uint64_t seed = 0;
    std::string format = "json";
};

enum class Status { ok, violation, error };

struct Report {
    Status status = Status::ok;
    Json findings = Json::array();
    Json result = Json::object();

    void violation(const std::string& code, const std::string& message, const Json& witness = Json::array()) {
        status = Status::violation;
        findings.push_back({{"code", code}, {"message", message}, {"witness", witness}});
    }
};

// Usage or input problems that map to exit code 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

ExtRational truncation_of(const Options& o) {
    if (o.truncation == "exact" || o.truncation == "inf") return ExtRational::infinity();
    try {
        return parse_rational(o.truncation);
    } catch (const Error& e) {
        throw UsageError("--truncation: " + std::string(e.what()));
    }
}

std::string read_text(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Document load(const std::string& path) { return parse_document(read_text(path)); }

template <class T>
T load_as(const std::string& path, const char* kind) {
    auto doc = load(path);
    if (auto* p = std::get_if<T>(&doc.payload)) return std::move(*p);
    throw SchemaError("/kind: expected " + std::string(kind) + ", got " + doc.kind());
}

CombStratSpace load_space(const std::string& path) {
    if (path == "@point") return strat_point();
    if (path == "@interval") return strat_interval();
    if (path == "@square") return strat_square();
    if (!path.empty() && path[0] == '@') throw UsageError("unknown built-in space " + path + " (@point, @interval, @square)");
    return load_as<CombStratSpace>(path, "strat_space");
}

NovikovComplex load_complex(const std::string& path, const ExtRational& t) {
    auto doc = load(path);
    if (auto* c = std::get_if<NovikovComplex>(&doc.payload)) return *c;
    if (auto* f = std::get_if<FlowCategoryDesc>(&doc.payload)) return assemble_complex(*f, t);
    throw SchemaError("/kind: expected complex or flow_category, got " + doc.kind());
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    if (s.empty()) return out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

Json doc_json(DocumentPayload p) { return to_json(Document{std::move(p)}); }

Json invariant_factors(const NovikovComplex& c) {
    Json out = Json::array();
    for (long long k : c.degrees()) {
        const auto d = c.differential(k);
        Json factors = Json::array();
        if (d.rows() && d.cols())
            for (const auto& f : nov_diagonalize(d).invariant_factors()) factors.push_back(integer_to_json(f));
        out.push_back({{"degree", k}, {"factors", factors}});
    }
    return out;
}

Json simplex_json(const Simplex& s) { return Json(s); }

void need_name(const std::string& name) {
    const auto& names = simplicial_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) {
        std::string list;
        for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
        throw UsageError("unknown space " + name + " (" + list + ")");
    }
}

Json zero_json(const ZeroPoint& z) {
    return {{"x", z.x}, {"rank", z.rank}, {"min_singular", z.min_singular}, {"sign", z.sign}};
}

Json label_json(const StratumLabel& s) { return Json(s.elements()); }

const char* status_name(Status s) {
    switch (s) {
        case Status::ok: return "ok";
        case Status::violation: return "violation";
        case Status::error: return "error";
    }
    return "error";
}

void print_matrix_text(std::ostream& out, const std::string& indent, const Json& m, const Json* labels) {
    const auto& rows = m["entries"];
    bool any = false;
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            const auto& e = rows[i][j];
            if (e["terms"].empty()) continue;
            any = true;
            out << indent;
            if (labels) out << "(" << (*labels)[i]["id"].get<std::string>() << ", " << (*labels)[j]["id"].get<std::string>() << ")";
            else out << "(" << i << ", " << j << ")";
            out << " " << e["text"].get<std::string>() << "\n";
        }
    if (!any) out << indent << "zero " << m["rows"] << "x" << m["cols"] << "\n";
}

void print_document_text(std::ostream& out, const std::string& key, const Json& v) {
    const auto kind = v["kind"].get<std::string>();
    if (kind == "complex") {
        out << "  " << key << ": complex with " << v["generators"].size() << " generators\n";
        for (const auto& g : v["generators"]) out << "    " << g["id"].get<std::string>() << " degree " << g["degree"] << "\n";
        out << "    differential entries (row, col):\n";
        print_matrix_text(out, "      ", v["differential"], &v["generators"]);
    } else if (kind == "novikov_matrix") {
        out << "  " << key << ": " << v["rows"] << "x" << v["cols"] << " matrix\n";
        print_matrix_text(out, "    ", v, nullptr);
    } else if (kind == "section") {
        out << "  " << key << ": section on a box with " << v["corner"] << " corner and " << v["free"]
            << " free coordinates\n";
        for (const auto& c : v["components"]) out << "    " << c["text"].get<std::string>() << "\n";
    } else {
        Json rest = v;
        rest.erase("fmt");
        rest.erase("kind");
        out << "  " << key << " (" << kind << "): " << rest.dump() << "\n";
    }
}

void print_text(std::ostream& out, const std::string& command, const Json& report) {
    out << command << ": " << report["status"].get<std::string>() << "\n";
    for (const auto& f : report["findings"]) {
        out << "  " << f["code"].get<std::string>() << ": " << f["message"].get<std::string>();
        if (!f["witness"].empty()) out << " " << f["witness"].dump();
        out << "\n";
    }
    for (const auto& [k, v] : report["result"].items()) {
        if (v.is_object() && v.contains("fmt")) print_document_text(out, k, v);
        else if (v.is_object() && v.contains("entries") && v.contains("rows")) {
            out << "  " << k << ": " << v["rows"] << "x" << v["cols"] << " matrix\n";
            print_matrix_text(out, "    ", v, nullptr);
        }
        else if (v.is_object() && v.contains("text")) out << "  " << k << ": " << v["text"].get<std::string>() << "\n";
        else out << "  " << k << ": " << v.dump() << "\n";
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Novikov complexes, flow categories, stratified spaces and perturbations", "novflow"};
    app.require_subcommand(1);
    app.fallthrough();
    Options opt;
    app.add_option("--truncation", opt.truncation, "Truncation p/q or 'exact'");
    app.add_option("--tol", opt.tol, "Numerical rank tolerance");
    app.add_option("--seed", opt.seed, "Seed for randomized steps");
    app.add_option("--format", opt.format, "Report format")->check(CLI::IsMember({"json", "text"}));

    std::string file, file2, name, stratum, c1, c2, c3, c4;
    std::vector<std::string> moves;
    std::function<Report()> action;
    std::string command;

    auto sub = [&](const char* cmd, const char* help, std::function<Report()> f) {
        auto* s = app.add_subcommand(cmd, help);
        s->callback([&command, &action, cmd, f] {
            command = cmd;
            action = f;
        });
        return s;
    };
    auto file_arg = [&](CLI::App* s, std::string& target, const char* what) {
        s->add_option("file", target, what)->required();
    };

    auto* s_assemble = sub("assemble", "Validate a flow category and assemble its complex", [&] {
        Report r;
        const auto f = load_as<FlowCategoryDesc>(file, "flow_category");
        const auto v = validate_category(f);
        for (const auto& x : v.violations) r.violation(x.code, x.message, x.witness);
        if (!v.valid()) return r;
        r.result["complex"] = doc_json(assemble_complex(f, truncation_of(opt)));
        return r;
    });
    file_arg(s_assemble, file, "flow_category document");

    auto* s_d2 = sub("d2", "Check d^2 = 0 for a flow category", [&] {
        Report r;
        const auto f = load_as<FlowCategoryDesc>(file, "flow_category");
        const auto d = check_d_squared(f, truncation_of(opt));
        for (const auto& w : d.witnesses)
            r.violation("DSquaredNonzero", "coefficient of " + w.x + " in d(d(" + w.y + ")) is " + w.value.to_string(),
                        Json::array({w.x, w.y}));
        r.result["ok"] = d.ok;
        return r;
    });
    file_arg(s_d2, file, "flow_category document");

    auto* s_cone = sub("cone", "Split a flow category into a mapping cone", [&] {
        Report r;
        const auto f = load_as<FlowCategoryDesc>(file, "flow_category");
        const auto c = cone_decompose(f, split(c1, ','), split(c2, ','), truncation_of(opt));
        r.result["d1"] = matrix_to_json(c.d1);
        r.result["d2"] = matrix_to_json(c.d2);
        r.result["f"] = matrix_to_json(c.f);
        r.result["chain_map"] = c.chain_map;
        r.result["reassembles"] = c.reassembles;
        if (!c.chain_map) r.violation("NotAChainMap", "f does not commute with the differentials");
        if (!c.reassembles) r.violation("ConeMismatch", "the cone differential differs from the assembled one");
        return r;
    });
    file_arg(s_cone, file, "flow_category document");
    s_cone->add_option("--c1", c1, "Comma-separated object ids of C1")->required();
    s_cone->add_option("--c2", c2, "Comma-separated object ids of C2")->required();

    auto* s_square = sub("square", "Solve for the homotopy of a four-part split", [&] {
        Report r;
        const auto f = load_as<FlowCategoryDesc>(file, "flow_category");
        const std::vector<std::string> classes[4] = {split(c1, ','), split(c2, ','), split(c3, ','), split(c4, ',')};
        const auto s = square_decompose(f, classes, truncation_of(opt));
        r.result["homotopy"] = matrix_to_json(s.homotopy);
        r.result["extracted"] = matrix_to_json(s.extracted);
        r.result["solved_verified"] = s.solved_verified;
        r.result["extracted_verified"] = s.extracted_verified;
        if (!s.solved_verified) r.violation("HomotopyCheckFailed", "the solved homotopy does not satisfy the identity");
        if (!s.extracted_verified) r.violation("HomotopyCheckFailed", "the extracted component does not satisfy the identity");
        return r;
    });
    file_arg(s_square, file, "flow_category document");
    s_square->add_option("--c1", c1, "Object ids of C1")->required();
    s_square->add_option("--c2", c2, "Object ids of C2")->required();
    s_square->add_option("--c3", c3, "Object ids of C3")->required();
    s_square->add_option("--c4", c4, "Object ids of C4")->required();

    auto* s_descend = sub("descend", "Rebase the assembled complex over the valuation ring", [&] {
        Report r;
        const auto f = load_as<FlowCategoryDesc>(file, "flow_category");
        const auto c = assemble_complex(f, truncation_of(opt));
        std::vector<Rational> energy;
        for (const auto& o : f.objects) energy.push_back(o.energy);
        const auto d = descend_to_lambda0(c, energy);
        r.result["lambda0"] = d.full_differential().is_lambda0();
        r.result["complex"] = doc_json(d);
        return r;
    });
    file_arg(s_descend, file, "flow_category document");

    auto* s_bif = sub("bifurcate", "Apply basis-change moves and compare invariant factors", [&] {
        Report r;
        const auto c = load_complex(file, truncation_of(opt));
        auto cur = c;
        for (const auto& m : moves) {
            const auto parts = split(m, ':');
            auto gen = [&](const std::string& id) {
                auto i = cur.index_of(id);
                if (!i) throw UsageError("--move: unknown generator " + id);
                return *i;
            };
            if (parts.size() == 5 && parts[0] == "c") {
                int sign = 0;
                if (parts[3] == "+1" || parts[3] == "1" || parts[3] == "+") sign = 1;
                else if (parts[3] == "-1" || parts[3] == "-") sign = -1;
                else throw UsageError("--move: sign must be +1 or -1");
                cur = bifurcation_move_c(cur, gen(parts[1]), gen(parts[2]), sign, parse_novikov(parts[4]));
            } else if (parts.size() == 3 && parts[0] == "d") {
                cur = bifurcation_move_d(cur, gen(parts[1]), parse_novikov(parts[2]));
            } else {
                throw UsageError("--move: expected c:P:Q:SIGN:WEIGHT or d:P:U, got " + m);
            }
        }
        const auto before = invariant_factors(c), after = invariant_factors(cur);
        r.result["before"] = before;
        r.result["after"] = after;
        r.result["invariant"] = before == after;
        r.result["complex"] = doc_json(cur);
        if (before != after) r.violation("InvariantFactorsChanged", "the moves changed the invariant factors");
        return r;
    });
    file_arg(s_bif, file, "complex or flow_category document");
    s_bif->add_option("--move", moves, "c:P:Q:SIGN:WEIGHT or d:P:U, applied in order");

    auto* s_arnold = sub("arnold", "Compare the generator count with the minimal rank", [&] {
        Report r;
        const auto f = load_as<FlowCategoryDesc>(file, "flow_category");
        const auto a = arnold_check(f, truncation_of(opt));
        r.result["generators"] = a.generators;
        r.result["min_rank"] = a.min_rank;
        r.result["lemma_count"] = a.lemma_count;
        r.result["bound_holds"] = a.bound_holds;
        r.result["cohomology"] = cohomology_to_json(a.cohomology);
        if (!a.bound_holds) r.violation("BoundViolated", "fewer generators than the minimal rank");
        return r;
    });
    file_arg(s_arnold, file, "flow_category document");

    auto* s_snf = sub("snf", "Diagonalize a Novikov matrix", [&] {
        Report r;
        const auto m = load_as<NovikovMatrix>(file, "novikov_matrix");
        const auto d = diagonalize(m);
        r.result["rank"] = d.rank;
        r.result["integral"] = d.integral;
        r.result["truncation"] = truncation_to_json(d.truncation);
        Json diag = Json::array();
        for (const auto& e : d.diagonal()) diag.push_back(e.to_string());
        r.result["diagonal"] = diag;
        if (d.integral) {
            Json f = Json::array();
            for (const auto& x : d.invariant_factors()) f.push_back(integer_to_json(x));
            r.result["invariant_factors"] = f;
        } else {
            r.violation("NonIntegralInvariantFactor", "some invariant factor is not an integer times a unit");
        }
        r.result["U"] = matrix_to_json(d.U);
        r.result["D"] = matrix_to_json(d.D);
        r.result["V"] = matrix_to_json(d.V);
        return r;
    });
    file_arg(s_snf, file, "novikov_matrix document");

    auto* s_minrank = sub("minrank", "Minimal rank of a complex with the same cohomology", [&] {
        Report r;
        const auto c = load_complex(file, truncation_of(opt));
        const auto h = nov_homology(c);
        const auto m = min_rank_report(h, c.group().N);
        r.result["cohomology"] = cohomology_to_json(h);
        r.result["min_rank"] = m.per_degree_bound;
        r.result["lemma_count"] = m.lemma_count;
        r.result["generators"] = c.size();
        r.result["bound_holds"] = c.size() >= m.per_degree_bound;
        if (c.size() < m.per_degree_bound) r.violation("BoundViolated", "fewer generators than the minimal rank");
        return r;
    });
    file_arg(s_minrank, file, "complex or flow_category document");

    auto* s_double = sub("double", "Double a stratified space along its boundary strata", [&] {
        Report r;
        const auto x = load_space(file);
        const auto d = double_space(x);
        r.result["euler"] = euler_char(d.space);
        r.result["group_rank"] = d.k;
        Json copies = Json::object();
        for (const auto& b : d.base) copies[b] = copies.value(b, 0) + 1;
        r.result["copies"] = copies;
        r.result["space"] = doc_json(d.space);
        return r;
    });
    file_arg(s_double, file, "strat_space document or @point, @interval, @square");

    auto* s_collar = sub("collar", "Attach collars along the boundary strata", [&] {
        Report r;
        const auto x = load_space(file);
        const auto c = collar(x);
        r.result["euler_before"] = euler_char(x);
        r.result["euler"] = euler_char(c);
        if (euler_char(x) != euler_char(c)) r.violation("EulerChanged", "collaring changed the Euler characteristic");
        r.result["space"] = doc_json(c);
        return r;
    });
    file_arg(s_collar, file, "strat_space document or built-in");

    auto* s_product = sub("product", "Product of two stratified spaces", [&] {
        Report r;
        const auto p = product(load_space(file), load_space(file2));
        r.result["euler"] = euler_char(p);
        r.result["space"] = doc_json(p);
        return r;
    });
    s_product->add_option("first", file, "strat_space document or built-in")->required();
    s_product->add_option("second", file2, "strat_space document or built-in")->required();

    auto* s_euler = sub("euler", "Euler characteristic and stratum cell counts", [&] {
        Report r;
        const auto x = load_space(file);
        r.result["k"] = x.k();
        r.result["euler"] = euler_char(x);
        Json strata = Json::array();
        for (std::uint64_t b = 0; b < (std::uint64_t{1} << std::min(x.k(), 12)); ++b) {
            const StratumLabel s{x.k(), b};
            if (const auto n = x.stratum_count(s)) strata.push_back({{"stratum", label_json(s)}, {"cells", n}});
        }
        r.result["strata"] = strata;
        return r;
    });
    file_arg(s_euler, file, "strat_space document or built-in");

    auto* s_extend = sub("extend", "Canonical extension of compatible boundary data", [&] {
        Report r;
        const auto bd = load_as<BoundaryData>(file, "boundary_data");
        r.result["section"] = doc_json(extend_from_boundary(bd));
        return r;
    });
    file_arg(s_extend, file, "boundary_data document");

    auto* s_trans = sub("transversal", "Check transversality on every stratum", [&] {
        Report r;
        const auto s = load_as<SectionOnBox>(file, "section");
        const auto t = check_strong_transversality(s, opt.tol);
        Json strata = Json::array();
        for (const auto& st : t.strata) {
            Json pts = Json::array();
            for (const auto& z : st.points) pts.push_back(zero_json(z));
            strata.push_back({{"stratum", label_json(st.stratum)}, {"dimension", st.dimension}, {"codim", st.codim},
                              {"transverse", st.transverse}, {"points", pts}});
            if (!st.transverse)
                r.violation("NotTransverse", "degenerate zero on stratum " + st.stratum.to_string(), label_json(st.stratum));
        }
        r.result["transverse"] = t.transverse;
        r.result["strata"] = strata;
        return r;
    });
    file_arg(s_trans, file, "section document");

    auto* s_count = sub("count", "Signed zero count on a stratum", [&] {
        Report r;
        const auto s = load_as<SectionOnBox>(file, "section");
        StratumLabel T = StratumLabel::full(s.corner);
        if (!stratum.empty() || app.get_subcommand("count")->count("--stratum")) {
            std::vector<int> elems;
            for (const auto& e : split(stratum, ',')) {
                try {
                    elems.push_back(std::stoi(e));
                } catch (const std::exception&) {
                    throw UsageError("--stratum: expected comma-separated indices");
                }
            }
            T = StratumLabel::of(s.corner, elems);
        }
        Json pts = Json::array();
        long long total = 0;
        for (const auto& z : signed_zeros(s, T, opt.tol)) {
            pts.push_back(zero_json(z));
            total += z.sign;
        }
        r.result["stratum"] = label_json(T);
        r.result["count"] = total;
        r.result["zeros"] = pts;
        return r;
    });
    file_arg(s_count, file, "section document");
    s_count->add_option("--stratum", stratum, "Comma-separated corner indices (default: all)");

    auto* s_boundary = sub("boundary", "Trace zero curves and compare endpoint signs with wall counts", [&] {
        Report r;
        const auto s = load_as<SectionOnBox>(file, "section");
        const auto b = boundary_consistency(s, opt.tol);
        Json walls = Json::array();
        for (const auto& w : b.walls) {
            walls.push_back({{"wall", label_json(w.wall)}, {"count", w.count}, {"endpoint_sum", w.endpoint_sum},
                             {"expected_sum", w.expected_sum}, {"consistent", w.consistent}});
            if (!w.consistent)
                r.violation("BoundaryMismatch", "endpoint signs on wall " + w.wall.to_string() + " differ from the wall count",
                            label_json(w.wall));
        }
        Json curves = Json::array();
        for (const auto& c : b.curves)
            curves.push_back({{"start", c.start}, {"end", c.end}, {"start_wall", c.start_wall}, {"end_wall", c.end_wall},
                              {"start_sign", c.start_sign}, {"end_sign", c.end_sign}, {"steps", c.steps}});
        r.result["consistent"] = b.consistent;
        r.result["outer_sum"] = b.outer_sum;
        r.result["walls"] = walls;
        r.result["curves"] = curves;
        if (!b.consistent && r.findings.empty()) r.violation("BoundaryMismatch", "signed endpoints do not sum to zero");
        return r;
    });
    file_arg(s_boundary, file, "section document");

    auto* s_tri = sub("triangulate", "Print a built-in triangulation", [&] {
        Report r;
        need_name(name);
        const auto x = build_simplicial(name);
        r.result["name"] = name;
        r.result["vertices"] = x.vertex_count();
        r.result["dimension"] = x.dimension();
        Json counts = Json::array();
        for (int k = 0; k <= x.dimension(); ++k) counts.push_back(x.cells(k).size());
        r.result["cell_counts"] = counts;
        r.result["euler"] = x.euler_char();
        Json maximal = Json::array();
        for (const auto& s : x.maximal()) maximal.push_back(simplex_json(s));
        r.result["maximal"] = maximal;
        return r;
    });
    s_tri->add_option("name", name, "point, interval, circle, sphere2, torus, rp2, klein")->required();

    auto* s_hom = sub("homology", "Integral homology by Smith normal form", [&] {
        Report r;
        need_name(name);
        const auto h = simplicial_homology(build_simplicial(name));
        r.result["homology"] = cohomology_to_json(h);
        r.result["cohomology"] = cohomology_to_json(cohomology_from_homology(h));
        return r;
    });
    s_hom->add_option("name", name, "Built-in triangulation")->required();

    std::string morse_out;
    auto* s_morse = sub("morse", "Greedy discrete gradient, Morse complex and its flow category", [&] {
        Report r;
        need_name(name);
        const auto x = build_simplicial(name);
        const auto v = discrete_gradient(x);
        const auto m = morse_complex(x, v);
        Json crit = Json::array();
        for (const auto& s : m.critical) crit.push_back(cell_id(s));
        r.result["critical"] = crit;
        r.result["matched_pairs"] = v.matching.size();
        r.result["homology"] = cohomology_to_json(morse_homology(m));
        const auto oracle = simplicial_homology(x);
        r.result["oracle_agrees"] = morse_homology(m) == oracle;
        if (!(morse_homology(m) == oracle)) r.violation("OracleMismatch", "Morse homology differs from the simplicial oracle");
        r.result["flow_category"] = doc_json(to_flow_category(m));
        if (!morse_out.empty()) {
            std::ofstream f(morse_out);
            if (!(f << r.result["flow_category"].dump(2) << "\n")) throw UsageError("cannot write " + morse_out);
            r.result["written"] = morse_out;
        }
        return r;
    });
    s_morse->add_option("name", name, "Built-in triangulation")->required();
    s_morse->add_option("--output", morse_out, "Also write the flow category document to this file");

    auto* s_demo = sub("arnold-demo", "Morse pipeline: critical cells against the minimal rank", [&] {
        Report r;
        need_name(name);
        const auto a = arnold_demo(name);
        r.result["name"] = a.name;
        r.result["critical"] = a.critical;
        r.result["min_rank"] = a.min_rank;
        r.result["bound_holds"] = a.bound_holds;
        r.result["oracle_agrees"] = a.oracle_agrees;
        r.result["cohomology"] = cohomology_to_json(a.cohomology);
        if (!a.bound_holds) r.violation("BoundViolated", "fewer critical cells than the minimal rank");
        if (!a.oracle_agrees) r.violation("OracleMismatch", "Morse cohomology differs from the simplicial oracle");
        return r;
    });
    s_demo->add_option("name", name, "Built-in triangulation")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    }

    const auto start = std::chrono::steady_clock::now();
    Report report;
    int code = 0;
    try {
        report = action();
        code = report.status == Status::ok ? 0 : 1;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        err << "ParseError: " << e.what() << "\n";
        report = Report{};
        report.status = Status::error;
        report.findings.push_back({{"code", "ParseError"}, {"message", e.what()}, {"witness", Json::array()}});
        code = 2;
    } catch (const SchemaError& e) {
        err << "SchemaError: " << e.what() << "\n";
        report = Report{};
        report.status = Status::error;
        report.findings.push_back({{"code", "SchemaError"}, {"message", e.what()}, {"witness", Json::array()}});
        code = 2;
    } catch (const Error& e) {
        // the library refused the input or could not finish the check
        err << e.code() << ": " << e.what() << "\n";
        report = Report{};
        const bool incomplete = e.code() == "BudgetExceeded" || e.code() == "CurveTrackingFailure" ||
                                e.code() == "OutOfScope" || e.code() == "TruncationTooCoarse";
        report.status = incomplete ? Status::error : Status::violation;
        report.findings.push_back({{"code", e.code()}, {"message", e.what()}, {"witness", Json::array()}});
        code = 1;
    }
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

    Json j = {{"command", command},
              {"status", status_name(report.status)},
              {"findings", report.findings},
              {"result", report.result},
              {"seed", opt.seed},
              {"timing_ms", ms}};
    if (opt.format == "text") print_text(out, command, j);
    else out << j.dump(2) << "\n";
    return code;
}

}  // namespace novflow
