#include <doctest.h>

#include <cstdlib>
#include <string>

#include <sys/wait.h>

#include <json.hpp>

#include "hodge/analysis.hpp"
#include "hodge/complex.hpp"
#include "hodge/geometry.hpp"
#include "hodge/io.hpp"
#include "manifest.hpp"
#include "support.hpp"

using namespace hodge;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int run(const std::string& args)
{
    const std::string cmd = std::string(HODGE_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

void write(const fs::path& p, const std::string& text) { write_text_atomic(p, text); }

const char* kHollow = R"({"simplices": [[0],[1],[2],[0,1],[0,2],[1,2]], "values": [0,0,0,1,1,1]})";
const char* kFilled =
    R"({"simplices": [[0],[1],[2],[0,1],[0,2],[1,2],[0,1,2]], "values": [0,0,0,1,1,1,2],
        "points": [[0,0],[1,0],[0,1]]})";

}  // namespace

TEST_CASE("sha256")
{
    CHECK(cli::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(cli::sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("triangulate")
{
    const test::TempDir dir;
    write(dir / "three.csv", "0,0\n1,0\n0,1\n");
    REQUIRE(run("triangulate " + q(dir / "three.csv") + " -o " + q(dir / "c.json")) == 0);
    const FilteredComplex c = import_complex(dir / "c.json");
    CHECK(c.size(0) == 3);
    CHECK(c.size(1) == 3);
    CHECK(c.size(2) == 1);

    const json manifest = json::parse(read_text(dir / "c.json.manifest.json"));
    CHECK(manifest["command"] == "triangulate");
    CHECK(manifest["input"]["sha256"] == cli::sha256_hex("0,0\n1,0\n0,1\n"));
    CHECK(manifest.contains("duration_seconds"));
    CHECK(manifest.contains("version"));

    write(dir / "line.csv", "0,0\n1,1\n2,2\n");
    CHECK(run("triangulate " + q(dir / "line.csv") + " -o " + q(dir / "x.json")) == 2);
    CHECK(!fs::exists(dir / "x.json"));
    write(dir / "bad.csv", "0,0\n1,zz\n");
    CHECK(run("triangulate " + q(dir / "bad.csv") + " -o " + q(dir / "x.json")) == 1);
    CHECK(run("triangulate " + q(dir / "missing.csv") + " -o " + q(dir / "x.json")) == 1);
    CHECK(run("triangulate") == 1);
    CHECK(run("frobnicate") == 1);

    // A larger cloud imports cleanly, and nothing but outputs is left behind.
    write(dir / "big.csv", point_cloud_to_csv(test::random_cloud(200, 3)));
    REQUIRE(run("triangulate " + q(dir / "big.csv") + " -o " + q(dir / "big.json")) == 0);
    CHECK_NOTHROW(import_complex(dir / "big.json"));
    for (const auto& entry : fs::directory_iterator(dir.path())) {
        CHECK(entry.path().filename().string().find(".tmp") == std::string::npos);
    }
}

TEST_CASE("spectrum")
{
    const test::TempDir dir;
    write(dir / "hollow.json", kHollow);
    write(dir / "filled.json", kFilled);

    REQUIRE(run("spectrum " + q(dir / "hollow.json") + " --t inf --dim 1 -o " + q(dir / "h.json")) == 0);
    const json h = json::parse(read_text(dir / "h.json"));
    REQUIRE(h["pairs"].size() == 3);
    const double expected[] = {0, 3, 3};
    const char* type[] = {"harmonic", "gradient", "gradient"};
    for (int i = 0; i < 3; ++i) {
        CHECK(h["pairs"][i]["lambda"].get<double>() == doctest::Approx(expected[i]).epsilon(1e-12));
        CHECK(h["pairs"][i]["type"] == type[i]);
    }

    REQUIRE(run("spectrum " + q(dir / "filled.json") + " -o " + q(dir / "f.json")) == 0);
    const json f = json::parse(read_text(dir / "f.json"));
    CHECK(f["counts"]["curl"] == 1);
    for (const auto& p : f["pairs"]) CHECK(p["lambda"].get<double>() == doctest::Approx(3.0));

    REQUIRE(run("spectrum " + q(dir / "hollow.json") + " --t 0.5 -o " + q(dir / "e.json")) == 0);
    CHECK(json::parse(read_text(dir / "e.json"))["pairs"].empty());

    CHECK(run("spectrum " + q(dir / "hollow.json") + " --t -2 -o " + q(dir / "e.json")) == 1);
    CHECK(run("spectrum " + q(dir / "hollow.json") + " --dim 4 -o " + q(dir / "e.json")) == 1);
    write(dir / "broken.json", R"({"simplices": [[0],[1],[0,1]], "values": [2,0,1]})");
    CHECK(run("spectrum " + q(dir / "broken.json") + " -o " + q(dir / "e.json")) == 1);
}

TEST_CASE("generate, track, cluster and hgc")
{
    const test::TempDir dir;
    REQUIRE(run("generate --preset four-disks --n 400 --seed 7 -o " + q(dir / "a.csv")) == 0);
    REQUIRE(run("generate --preset four-disks --n 400 --seed 7 -o " + q(dir / "b.csv")) == 0);
    CHECK(read_text(dir / "a.csv") == read_text(dir / "b.csv"));
    CHECK(test::count_of(read_text(dir / "a.csv"), "\n") == 400);
    CHECK(run("generate --preset hexagon -o " + q(dir / "c.csv")) == 1);

    REQUIRE(run("generate --preset two-clusters --n 60 --seed 2 -o " + q(dir / "small.csv")) == 0);
    REQUIRE(run("triangulate " + q(dir / "small.csv") + " -o " + q(dir / "small.json")) == 0);

    SUBCASE("track")
    {
        const std::string base = "track " + q(dir / "small.json") + " --num 10 --steps 6 ";
        REQUIRE(run(base + "-o " + q(dir / "t1.csv")) == 0);
        REQUIRE(run(base + "-o " + q(dir / "t2.csv") + " --json " + q(dir / "t2.json")) == 0);
        CHECK(read_text(dir / "t1.csv") == read_text(dir / "t2.csv"));
        CHECK(fs::exists(dir / "t1.svg"));
        CHECK(test::xml_well_formed(read_text(dir / "t1.svg")));
        const json manifest = json::parse(read_text(dir / "t1.csv.manifest.json"));
        CHECK(manifest["parameters"]["thresholds"].size() == 6);
        CHECK(manifest["tolerances"].contains("pes_tie"));

        REQUIRE(run("track " + q(dir / "small.json") + " --num 10 --steps 1 -o " + q(dir / "one.csv")) == 0);
        CHECK(test::count_of(read_text(dir / "one.csv"), "\n") == 11);
        CHECK(run(base + "--theta 0 -o " + q(dir / "x.csv")) == 1);
        CHECK(run(base + "--grid spiral -o " + q(dir / "x.csv")) == 1);
    }
    SUBCASE("cluster")
    {
        const std::string base = "cluster " + q(dir / "small.json") + " --t 1.0 --mode gradient --num-eigvecs 2 --clusters 2 ";
        REQUIRE(run(base + "--nodes -o " + q(dir / "l.csv")) == 0);
        CHECK(read_text(dir / "l.csv").rfind("v0,v1,label\n", 0) == 0);
        CHECK(fs::exists(dir / "l.nodes.csv"));
        CHECK(test::xml_well_formed(read_text(dir / "l.svg")));
        REQUIRE(run(base + "-o " + q(dir / "l2.csv")) == 0);
        CHECK(read_text(dir / "l.csv") == read_text(dir / "l2.csv"));
        CHECK(run(base + "--mode swirl -o " + q(dir / "x.csv")) == 1);
        CHECK(run("cluster " + q(dir / "small.json") + " --t 1.0 --mode harmonic --num-eigvecs 500 -o " + q(dir / "x.csv")) == 1);
    }
    SUBCASE("hgc")
    {
        REQUIRE(run("hgc " + q(dir / "small.json") + " --t 1.0 --num 12 -o " + q(dir / "h.csv")) == 0);
        const HgcTable table = parse_hgc_csv(read_text(dir / "h.csv"));
        CHECK(table.triples.maxCoeff() == doctest::Approx(1.0));
        CHECK(fs::exists(dir / "h.svg"));
        CHECK(run("hgc " + q(dir / "small.json") + " --num 0 -o " + q(dir / "x.csv")) == 1);
    }
}

TEST_CASE("3D complexes get no SVG")
{
    const test::TempDir dir;
    write(dir / "c3.json", R"({"simplices": [[0],[1],[2],[0,1],[0,2],[1,2],[0,1,2]], "values": [0,0,0,1,1,1,2],
        "points": [[0,0,0],[1,0,0],[0,1,1]]})");
    REQUIRE(run("hgc " + q(dir / "c3.json") + " --num 3 -o " + q(dir / "h.csv")) == 0);
    CHECK(!fs::exists(dir / "h.svg"));
    CHECK(run("hgc " + q(dir / "c3.json") + " --num 3 --svg " + q(dir / "h.svg") + " -o " + q(dir / "h.csv")) == 1);
}
