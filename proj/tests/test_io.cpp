#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <defsieve/defsieve.hpp>

#include "oracles.hpp"

using namespace defsieve;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "defsieve-test-io";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string curve11_csv(std::uint64_t bound, bool with_local_type = true) {
    std::ostringstream out;
    out << "# k=2\n# N=11\n# bound=" << bound << "\n# character=trivial\n";
    if (with_local_type) out << "# localtype=11:special\n";
    for (const auto& [p, ap] : oracles::curve11_eigenvalues(bound))
        out << p << "," << ap << "\n";
    return out.str();
}

fs::path write_scratch(const std::string& name, const std::string& body) {
    fs::path path = scratch_dir() / name;
    std::ofstream(path, std::ios::trunc) << body;
    return path;
}

struct CommandResult {
    int exit_code = -1;
    std::string output;
};

// Run the CLI binary, capturing stdout only.
CommandResult run_cli(const std::string& args) {
    std::string cmd = "DEFSIEVE_CACHE_DIR=" + (scratch_dir() / "qcache").string() + " " +
                      DEFSIEVE_CLI_PATH + " " + args + " 2>/dev/null";
    std::array<char, 4096> buf{};
    CommandResult result;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::size_t got = 0;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0)
        result.output.append(buf.data(), got);
    int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

}  // namespace

TEST_CASE("ingest a complete weight-2 eigenvalue file") {
    fs::path path = write_scratch("curve11.csv", curve11_csv(100));
    NewformData data = ingest_newform(path);
    CHECK(data.weight() == 2);
    CHECK(data.level() == 11);
    CHECK(data.bound() == 100);
    CHECK(data.source() == Source::ingested);
    CHECK(data.eigenvalues().size() == 25);  // 25 primes up to 100
    CHECK(data.a(7) == -2);
    CHECK(data.local_type(11) == LocalType::special);
    CHECK(data.suspect_report().empty());
}

TEST_CASE("ingest rejects gaps, non-prime rows, and malformed lines") {
    SECTION("missing prime is named") {
        std::string body = curve11_csv(100, false);
        std::string needle = "\n13,";
        auto pos = body.find(needle);
        REQUIRE(pos != std::string::npos);
        auto end = body.find('\n', pos + 1);
        body.erase(pos, end - pos);
        fs::path path = write_scratch("gap.csv", body);
        try {
            ingest_newform(path);
            FAIL("expected MissingPrimeError");
        } catch (const MissingPrimeError& e) {
            CHECK(e.p() == 13);
        }
    }
    SECTION("non-prime index") {
        fs::path path = write_scratch(
            "nonprime.csv", "# k=2\n# N=11\n# bound=3\n2,-2\n3,-1\n4,10\n");
        try {
            ingest_newform(path);
            FAIL("expected NonPrimeIndexError");
        } catch (const NonPrimeIndexError& e) {
            CHECK(e.n() == 4);
        }
    }
    SECTION("parse error carries the line number") {
        fs::path path =
            write_scratch("bad.csv", "# k=2\n# N=11\n# bound=3\n2,-2\n3;-1\n");
        try {
            ingest_newform(path);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 5);
        }
    }
    SECTION("header must be complete") {
        fs::path path = write_scratch("nohdr.csv", "# k=2\n# N=11\n2,-2\n");
        CHECK_THROWS_AS(ingest_newform(path), ParseError);
    }
    SECTION("descending primes are rejected") {
        fs::path path =
            write_scratch("order.csv", "# k=2\n# N=11\n# bound=3\n3,-1\n2,-2\n");
        CHECK_THROWS_AS(ingest_newform(path), ParseError);
    }
}

TEST_CASE("ingest keeps Ramanujan-violating data but marks it suspect") {
    std::string body = "# k=2\n# N=11\n# bound=10\n2,999\n3,-1\n5,1\n7,-2\n";
    fs::path path = write_scratch("suspect.csv", body);
    NewformData data = ingest_newform(path);
    REQUIRE(data.suspect_report().size() == 1);
    CHECK(data.suspect_report()[0].p == 2);
}

TEST_CASE("rows beyond the declared bound are accepted as extra data") {
    std::string body = "# k=2\n# N=11\n# bound=5\n2,-2\n3,-1\n5,1\n7,-2\n13,4\n";
    fs::path path = write_scratch("extra.csv", body);
    NewformData data = ingest_newform(path);
    CHECK(data.bound() == 5);
    CHECK(data.a(13) == 4);
}

TEST_CASE("quadratic character values parse from the header") {
    std::string body = "# k=3\n# N=7\n# bound=10\n# character=3:-1,5:1\n2,1\n3,2\n5,0\n7,1\n";
    fs::path path = write_scratch("char.csv", body);
    NewformData data = ingest_newform(path);
    CHECK(data.omega(3) == -1);
    CHECK(data.omega(5) == 1);
    CHECK(data.omega(2) == 1);  // default
}

TEST_CASE("q-expansion cache round-trips exactly") {
    QExpansion f = level1_cuspform(16, 50);
    fs::path path = scratch_dir() / "qexp_w16.txt";
    write_qexp_cache(path, f, 16);
    auto loaded = read_qexp_cache(path);
    REQUIRE(loaded.has_value());
    CHECK(loaded->weight == 16);
    CHECK(loaded->series == f);

    // cached_level1_form reuses sufficient precision and recomputes otherwise
    QExpansion shorter = cached_level1_form(16, 20, scratch_dir());
    CHECK(shorter.precision() >= 20);
    CHECK(shorter.coefficient(2) == 216);
    QExpansion longer = cached_level1_form(16, 80, scratch_dir());
    CHECK(longer.precision() >= 80);
    CHECK(longer.coefficient(2) == 216);
}

TEST_CASE("reports serialize deterministically") {
    auto data = NewformData::builtin(12, 400);
    auto c1 = classify(data, {3}, 2, 100);
    auto c2 = classify(data, {3}, 2, 100);
    CHECK(emit_report_json(c1) == emit_report_json(c2));
    CHECK(emit_report_text(c1) == emit_report_text(c2));
}

TEST_CASE("JSON report structure matches the documented schema") {
    auto data = NewformData::builtin(12, 400);
    auto c = classify(data, {3}, 2, 100);
    auto doc = report_json(c);
    REQUIRE(doc.contains("metadata"));
    REQUIRE(doc.contains("entries"));
    REQUIRE(doc.contains("discrepancies"));
    CHECK(doc["metadata"]["form"] == "level1-weight12");
    CHECK(doc["metadata"]["tool_version"] == kToolVersion);

    bool found17 = false;
    for (const auto& e : doc["entries"]) {
        if (e["ell"] != 17) continue;
        found17 = true;
        CHECK(e["status"] == "SCREEN_FAIL");
        REQUIRE(e["reasons"].size() == 1);
        CHECK(e["reasons"][0]["criterion"] == "unramified_screen");
        CHECK(e["reasons"][0]["p"] == 3);
        CHECK(e["reasons"][0]["divisor"] == 17);
    }
    CHECK(found17);
}

TEST_CASE("empty ranges produce empty entry lists") {
    auto data = NewformData::builtin(12, 400);
    auto c = classify(data, {}, 500, 400);
    CHECK(c.entries.empty());
    auto doc = report_json(c);
    CHECK(doc["entries"].empty());
}

TEST_CASE("text report flags certified and failing primes") {
    auto data = NewformData::builtin(12, 400);
    auto c = classify(data, {3}, 2, 30);
    std::string text = emit_report_text(c);
    CHECK(text.find("17  FAIL ✗ @3") != std::string::npos);
    CHECK(text.find("19  CERT ✓") != std::string::npos);
    CHECK(text.find("discrepancies") == std::string::npos);  // only when non-empty
}

TEST_CASE("cli: eigen prints the eigenvalue") {
    auto r = run_cli("eigen --weight 12 --prime 7");
    CHECK(r.exit_code == 0);
    CHECK(r.output == "-16744\n");
}

TEST_CASE("cli: unsupported weight is a usage error") {
    auto r = run_cli("classify --weight 40 --lmin 2 --lmax 100");
    CHECK(r.exit_code == 1);
    auto r2 = run_cli("eigen --weight 13 --prime 7");
    CHECK(r2.exit_code == 1);
}

TEST_CASE("cli: missing ingest file is a data error") {
    auto r = run_cli("classify --ingest /nonexistent.csv --lmin 2 --lmax 50");
    CHECK(r.exit_code == 1);  // rejected by the existence check at parse time
    fs::path bad = write_scratch("incomplete.csv", "# k=2\n2,-2\n");
    auto r2 = run_cli("classify --ingest " + bad.string() + " --lmin 2 --lmax 50");
    CHECK(r2.exit_code == 2);
}

TEST_CASE("cli: qexp emits the cache format") {
    auto r = run_cli("qexp --weight 12 --terms 8");
    CHECK(r.exit_code == 0);
    std::istringstream in(r.output);
    std::string header;
    std::getline(in, header);
    CHECK(header == "QEXP v1 k=12 N=1 terms=8");
    std::vector<std::string> expected = {"0", "1", "-24", "252", "-1472",
                                         "4830", "-6048", "-16744"};
    for (const auto& want : expected) {
        std::string line;
        REQUIRE(std::getline(in, line));
        CHECK(line == want);
    }
}

TEST_CASE("cli: screen prints the report fields") {
    auto r = run_cli("screen --weight 12 --prime 3");
    CHECK(r.exit_code == 0);
    CHECK(r.output ==
          "p=3\n"
          "delta_p=-881280\n"
          "factorization=-2^7 * 3^4 * 5 * 17\n"
          "eps_candidates=2\n"
          "candidates=2 3 5 17\n");
}

TEST_CASE("cli: classify json is byte-identical across invocations") {
    std::string args = "classify --weight 12 --set 3 --lmin 2 --lmax 60 --format json";
    auto r1 = run_cli(args);
    auto r2 = run_cli(args);
    CHECK(r1.exit_code == 0);
    CHECK(r1.output == r2.output);
    CHECK(r1.output.find("\"unramified_screen\"") != std::string::npos);
}

TEST_CASE("cli: ingested classify runs end to end") {
    fs::path path = write_scratch("curve11_cli.csv", curve11_csv(250));
    auto r = run_cli("classify --ingest " + path.string() +
                     " --lmin 2 --lmax 50 --format json");
    CHECK(r.exit_code == 0);
    auto doc = nlohmann::json::parse(r.output);
    CHECK(doc["metadata"]["source"] == "ingested");
    bool saw_pass = false;
    for (const auto& e : doc["entries"]) {
        CHECK(e["status"] != "CERTIFIED_UNOBSTRUCTED");
        if (e["status"] == "SCREEN_PASS") saw_pass = true;
    }
    CHECK(saw_pass);
}
