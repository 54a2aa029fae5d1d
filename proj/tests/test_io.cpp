#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "fbc/io.hpp"

using namespace fbc;

namespace {
std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}
} // namespace

TEST_CASE("fnv-1a 64 reference vectors") {
    CHECK(fnv1a64(std::string("")) == 0xcbf29ce484222325ull);
    CHECK(fnv1a64(std::string("a")) == 0xaf63dc4c8601ec8cull);
    CHECK(fnv1a64(std::string("hello")) == 0xa430d84680aabd0bull);
    const char raw[] = {'a'};
    CHECK(fnv1a64(raw, 1) == 0xaf63dc4c8601ec8cull);
}

TEST_CASE("g17 formatting round-trips doubles") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 12345.0, -2.718281828459045}) {
        std::string s = format_g17(v);
        CHECK(std::stod(s) == v);
    }
    CHECK(format_g17(2.0) == "2");
}

TEST_CASE("csv writer layout and byte stability") {
    std::string path = "io_test_a.csv";
    auto emit = [&](const std::string& p) {
        CsvWriter w(p, "demo", 3, {"x", "y"});
        w.row({1.5, 0.1});
        w.row_cells({"lo", "7"});
        w.close();
    };
    emit(path);

    std::string text = slurp(path);
    CHECK(text == "# schema: demo v3\nx,y\n1.5,0.10000000000000001\nlo,7\n");

    std::string path2 = "io_test_b.csv";
    emit(path2);
    CHECK(slurp(path2) == text);
    std::remove(path.c_str());
    std::remove(path2.c_str());
}

TEST_CASE("csv writer rejects ragged rows") {
    std::string path = "io_test_c.csv";
    CsvWriter w(path, "demo", 1, {"x", "y"});
    CHECK_THROWS(w.row({1.0}));
    CHECK_THROWS(w.row_cells({"a", "b", "c"}));
    w.close();
    std::remove(path.c_str());
}

TEST_CASE("manifest quarantines timing from the reproducible payload") {
    RunManifest m;
    m.subcommand = "demo";
    m.config_hash = 0xdeadbeefull;
    m.base_seed = 42;
    m.threads = 8;
    m.parameters["alpha"] = "2";
    m.module_versions["kernel"] = "1";
    m.outputs.push_back("out.csv");
    m.wall_seconds = 1.25;

    auto j = nlohmann::json::parse(m.to_json());
    CHECK(j["subcommand"] == "demo");
    CHECK(j["base_seed"] == 42);
    CHECK(j["timing"]["threads"] == 8);
    CHECK(j["timing"]["wall_seconds"] == 1.25);
    CHECK(j["parameters"]["alpha"] == "2");
    CHECK(j["outputs"][0] == "out.csv");

    RunManifest m2 = m;
    m2.wall_seconds = 99.0;
    m2.threads = 1;
    auto ja = nlohmann::json::parse(m.to_json());
    auto jb = nlohmann::json::parse(m2.to_json());
    CHECK(ja != jb);
    ja.erase("timing");
    jb.erase("timing");
    CHECK(ja == jb);

    std::string path = "io_manifest_test.json";
    m.write(path);
    auto round = nlohmann::json::parse(slurp(path));
    CHECK(round["config_hash"] == j["config_hash"]);
    std::remove(path.c_str());
}

TEST_CASE("svg export emits one polyline per series") {
    std::string path = "io_test_plot.svg";
    write_svg_lines(path, "demo", {1.0, 2.0, 4.0},
                    {{0.5, 0.2, 0.1}, {1.0, 2.0, 8.0}}, {"down", "up"}, true, true);
    std::string text = slurp(path);
    std::remove(path.c_str());

    CHECK(text.find("<svg") != std::string::npos);
    size_t count = 0, pos = 0;
    while ((pos = text.find("<polyline", pos)) != std::string::npos) {
        ++count;
        pos += 9;
    }
    CHECK(count == 2);
    CHECK(text.find("down") != std::string::npos);
}
