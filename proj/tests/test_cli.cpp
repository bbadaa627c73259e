#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

using nlohmann::json;

namespace {

struct Run {
    int status = -1;
    std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + " '" ZIGFAST_CLI "' " + args + " 2>/dev/null";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    std::size_t got = 0;
    while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) {
        r.out.append(buf.data(), got);
    }
    const int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

std::vector<double> parse_lines(const std::string& text) {
    std::vector<double> v;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        v.push_back(std::stod(line));
    }
    return v;
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("zigfast_cli_" + name);
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("tables reports the layer count") {
    const Run r = run("tables --dist exp --format json");
    REQUIRE(r.status == 0);
    const json j = json::parse(r.out);
    CHECK(j["L_max"] == 252);
    CHECK(run("tables --dist normal --format json").status == 0);
    CHECK(run("tables --dist exp --imax 2").status == 0);
    CHECK(run("tables --dist exp --imax 100").status == 2);
}

TEST_CASE("gen is deterministic and both formats carry the same values") {
    const Run a = run("gen --dist exp --seed 7 --n 1000");
    const Run b = run("gen --dist exp --seed 7 --n 1000");
    REQUIRE(a.status == 0);
    CHECK(a.out == b.out);
    const auto text = parse_lines(a.out);
    REQUIRE(text.size() == 1000);

    const Run raw = run("gen --dist exp --seed 7 --n 1000 --format f64le");
    REQUIRE(raw.status == 0);
    REQUIRE(raw.out.size() == 8000);
    for (std::size_t k = 0; k < text.size(); ++k) {
        double v = 0;
        std::memcpy(&v, raw.out.data() + 8 * k, 8);
        REQUIRE(v == text[k]);
    }

    CHECK(run("gen --dist exp --seed 8 --n 1000").out != a.out);
    const Run empty = run("gen --dist normal --seed 1 --n 0");
    CHECK(empty.status == 0);
    CHECK(empty.out.empty());
}

TEST_CASE("ZIGFAST_SEED is the default seed") {
    const Run flag = run("gen --dist normal --seed 99 --n 50");
    const Run env = run("gen --dist normal --n 50", "ZIGFAST_SEED=99");
    CHECK(flag.out == env.out);
}

TEST_CASE("gen writes to a file") {
    const auto path = temp_file("gen.txt");
    REQUIRE(run("gen --dist exp --seed 3 --n 10 --out '" + path.string() + "'").status == 0);
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == run("gen --dist exp --seed 3 --n 10").out);
    std::filesystem::remove(path);
}

TEST_CASE("quality exit codes") {
    const Run ok = run("quality --dist exp --seed 5 --n 200000 --format json");
    CHECK(ok.status == 0);
    const json j = json::parse(ok.out);
    CHECK(j["pass"] == true);
    CHECK(j["n"] == 200000);

    CHECK(run("quality --dist normal --seed 5 --n 200000 --threshold 1e-6").status == 1);
    CHECK(run("quality --dist normal --seed 5 --n 200000 --jobs 4").status == 0);
    CHECK(run("quality --dist gamma --n 10").status == 2);
    CHECK(run("").status == 2);
    CHECK(run("frobnicate").status == 2);
}

TEST_CASE("sharded runs are reproducible") {
    const Run a = run("quality --dist exp --seed 11 --n 100000 --jobs 3 --format json");
    const Run b = run("quality --dist exp --seed 11 --n 100000 --jobs 3 --format json");
    CHECK(a.out == b.out);
}

TEST_CASE("bench smoke test") {
    const Run r =
        run("bench --dist exp --n 100000 --trials 3 --algorithms modified,traditional --format json");
    REQUIRE(r.status == 0);
    const json j = json::parse(r.out);
    REQUIRE(j.is_array());
    REQUIRE(j.size() == 2);
    CHECK(j[0]["algorithm"] == "modified");
    CHECK(j[0]["trial_seconds"].size() == 3);
    CHECK(j[0]["speedup_vs_baseline"].get<double>() > 0);
    CHECK(run("bench --dist exp --n 10 --trials 2").status == 2);
}

TEST_CASE("pathstats JSON") {
    const Run r = run("pathstats --dist exp --seed 1 --n 1000000 --format json");
    REQUIRE(r.status == 0);
    const json j = json::parse(r.out);
    CHECK(std::abs(j["fractions"]["common"].get<double>() - 252.0 / 256) < 0.001);
    CHECK(j["counts"]["layer_draw"].get<std::uint64_t>() >= 1000000);
    const Run t =
        run("pathstats --dist normal --seed 1 --n 1000000 --algorithm traditional --format json");
    REQUIRE(t.status == 0);
    CHECK(json::parse(t.out)["fractions"].contains("rejection_test"));
}

TEST_CASE("tables --check") {
    const std::filesystem::path dir = ZIGFAST_TEST_DATA;
    CHECK(run("tables --check '" + (dir / "exp256.json").string() + "'").status == 0);
    CHECK(run("tables --check '" + (dir / "normal256.json").string() + "'").status == 0);

    std::ifstream in(dir / "exp256.json");
    std::stringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();
    const auto pos = text.find("0x1.e46eff20739afp+2");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 20, "0x1.e46eff20739aep+2");
    const auto tampered = temp_file("tampered.json");
    std::ofstream(tampered) << text;
    CHECK(run("tables --check '" + tampered.string() + "'").status == 2);
    std::filesystem::remove(tampered);
    CHECK(run("tables --check /nonexistent/file.json").status == 2);
}

}
