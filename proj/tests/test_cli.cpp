#include "doctest.h"

#include "novflow/cli.hpp"
#include "novflow/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace novflow;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return std::string(NOVFLOW_DATA_DIR) + "/" + name; }

Json report(const Result& r) {
    auto j = Json::parse(r.out);
    j.erase("timing_ms");
    return j;
}

}  // namespace

TEST_CASE("arnold-demo rp2") {
    const auto r = cli({"arnold-demo", "rp2", "--format", "json"});
    CHECK(r.code == 0);
    const auto j = report(r);
    CHECK(j["status"] == "ok");
    CHECK(j["result"]["critical"] == 3);
    CHECK(j["result"]["min_rank"] == 3);
    CHECK(j["result"]["bound_holds"] == true);
}

TEST_CASE("exit codes") {
    CHECK(cli({"frobnicate"}).code == 2);
    CHECK(cli({}).code == 2);
    CHECK(cli({"d2"}).code == 2);
    CHECK(cli({"d2", data("missing.json")}).code == 2);
    CHECK(cli({"homology", "mobius"}).code == 2);
    CHECK(cli({"euler", "@cube"}).code == 2);
    CHECK(cli({"arnold-demo", "torus", "--format", "yaml"}).code == 2);
    CHECK(cli({"assemble", data("two_objects.json"), "--truncation", "1/0"}).code == 2);
    CHECK(cli({"--help"}).code == 0);

    const auto d2 = cli({"d2", data("broken_d2.json")});
    CHECK(d2.code == 1);
    const auto j = report(d2);
    CHECK(j["status"] == "violation");
    REQUIRE(j["findings"].size() == 1);
    CHECK(j["findings"][0]["witness"] == Json::array({"x", "y"}));

    CHECK(cli({"d2", data("two_objects.json")}).code == 0);
    CHECK(cli({"bifurcate", data("two_objects.json"), "--move", "d:a:T"}).code == 1);  // exact inverse is a series
    CHECK(cli({"bifurcate", data("two_objects.json"), "--move", "x:a"}).code == 2);
    CHECK(cli({"descend", data("negative_energy.json")}).code == 1);
    CHECK(cli({"descend", data("two_objects.json")}).code == 0);
    CHECK(cli({"assemble", data("broken_d2.json")}).code == 1);
    CHECK(cli({"snf", data("matrix.json")}).code == 1);
    CHECK(cli({"boundary", data("line_section.json")}).code == 0);
    CHECK(cli({"count", data("line_section.json"), "--stratum", "1"}).code == 0);
    CHECK(cli({"count", data("line_section.json")}).code == 1);  // dimension 2, codim 1
    CHECK(cli({"transversal", data("line_section.json")}).code == 0);
    CHECK(cli({"d2", data("line_section.json")}).code == 2);     // wrong kind
}

TEST_CASE("every subcommand on the bundled data") {
    const std::vector<std::vector<std::string>> ok = {
        {"assemble", data("two_objects.json")},
        {"arnold", data("two_objects.json")},
        {"minrank", data("two_objects.json"), "--truncation", "5"},
        {"bifurcate", data("two_objects.json"), "--truncation", "5", "--move", "d:a:T^(1/2)", "--move", "d:b:-T"},
        {"cone", data("two_objects.json"), "--c1", "a", "--c2", "b"},
        {"double", "@interval"},
        {"collar", "@square"},
        {"product", "@interval", "@square"},
        {"euler", "@point"},
        {"extend", data("corner_boundary.json")},
        {"triangulate", "klein"},
        {"homology", "torus"},
        {"morse", "sphere2"},
        {"arnold-demo", "klein"},
    };
    for (const auto& args : ok) {
        INFO(args[0]);
        const auto r = cli(args);
        CHECK(r.code == 0);
        CHECK(report(r)["status"] == "ok");
        CHECK(report(r)["findings"].empty());
    }
    const auto e = report(cli({"extend", data("corner_boundary.json")}));
    CHECK(e["result"]["section"]["components"][0]["text"] == "x1^2 + 3*x2 + 2");
}

TEST_CASE("reports are deterministic") {
    for (const auto& args : std::vector<std::vector<std::string>>{
             {"morse", "rp2"}, {"boundary", data("line_section.json")}, {"snf", data("matrix.json")}, {"double", "@square"}}) {
        CHECK(report(cli(args)) == report(cli(args)));
        CHECK(report(cli(args)).dump() == report(cli(args)).dump());
    }
}

TEST_CASE("morse export feeds the flow-category commands") {
    const auto m = report(cli({"morse", "rp2"}));
    const auto path = std::filesystem::temp_directory_path() / "novflow_rp2.json";
    {
        std::ofstream f(path);
        f << m["result"]["flow_category"].dump(2);
    }
    CHECK(cli({"d2", path.string()}).code == 0);
    const auto a = report(cli({"arnold", path.string()}));
    CHECK(a["result"]["generators"] == 3);
    CHECK(a["result"]["min_rank"] == 3);
    CHECK(cli({"descend", path.string()}).code == 0);
    std::filesystem::remove(path);
}

TEST_CASE("morse --output writes a readable flow category") {
    const auto path = std::filesystem::temp_directory_path() / "novflow_torus.json";
    CHECK(cli({"morse", "torus", "--output", path.string()}).code == 0);
    std::ifstream f(path);
    std::stringstream buf;
    buf << f.rdbuf();
    CHECK(parse_document(buf.str()).kind() == "flow_category");
    CHECK(cli({"d2", path.string()}).code == 0);
    std::filesystem::remove(path);
}
