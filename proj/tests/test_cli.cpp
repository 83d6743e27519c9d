#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "slc/model.hpp"

// End-to-end checks against the built binary: exit-code contract, JSON
// output shape, schema validity, determinism.

namespace {

using nlohmann::json;

struct RunResult {
    int exit_code;
    std::string out;
};

std::string tmp_dir() {
    static std::string dir = [] {
        std::string d = "/tmp/slc_cli_test";
        (void)!std::system(("mkdir -p " + d).c_str());
        return d;
    }();
    return dir;
}

std::string write_file(const std::string& name, const std::string& content) {
    const std::string path = tmp_dir() + "/" + name;
    std::ofstream out(path);
    out << content;
    return path;
}

RunResult run_cli(const std::string& args) {
    const std::string out_path = tmp_dir() + "/out.txt";
    const std::string cmd =
        std::string(SLC_BIN) + " " + args + " > " + out_path + " 2>/dev/null";
    const int rc = std::system(cmd.c_str());
    std::ifstream in(out_path);
    std::string out((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
    return {WEXITSTATUS(rc), out};
}

// Minimal structural validator for the JSON-Schema subset the shipped schema
// uses: type, required, properties, items, enum.
bool validate_schema(const json& doc, const json& schema, std::string* why) {
    if (schema.contains("type")) {
        const std::string t = schema["type"];
        const bool ok = (t == "object" && doc.is_object()) ||
                        (t == "array" && doc.is_array()) ||
                        (t == "string" && doc.is_string()) ||
                        (t == "number" && doc.is_number()) ||
                        (t == "integer" && doc.is_number_integer()) ||
                        (t == "boolean" && doc.is_boolean()) ||
                        (t == "null" && doc.is_null());
        if (!ok) {
            *why = "type mismatch: expected " + t + " got " + doc.dump().substr(0, 80);
            return false;
        }
    }
    if (schema.contains("enum")) {
        bool found = false;
        for (const auto& v : schema["enum"])
            if (v == doc) found = true;
        if (!found) {
            *why = "enum mismatch: " + doc.dump();
            return false;
        }
    }
    if (schema.contains("required"))
        for (const auto& key : schema["required"])
            if (!doc.contains(key.get<std::string>())) {
                *why = "missing required key " + key.get<std::string>();
                return false;
            }
    if (schema.contains("properties") && doc.is_object())
        for (auto it = schema["properties"].begin();
             it != schema["properties"].end(); ++it)
            if (doc.contains(it.key()))
                if (!validate_schema(doc[it.key()], it.value(), why)) return false;
    if (schema.contains("items") && doc.is_array())
        for (const auto& item : doc)
            if (!validate_schema(item, schema["items"], why)) return false;
    return true;
}

const char* kGauss = R"({"family":"gaussian","mu":0.0,"sigma2":2.0})";
const char* kPoisson3 = R"({"family":"poisson","lambda":3.0,"tail_eps":1e-12})";
const char* kQuartic = R"({"family":"poly_potential","coeffs":[0,0,0.5,0,1]})";

}  // namespace

TEST_CASE("cli: certify a gaussian") {
    const std::string cfg = write_file("gauss.json", kGauss);
    const RunResult r = run_cli("certify " + cfg);
    CHECK(r.exit_code == 0);
    const json doc = json::parse(r.out);
    CHECK(doc["verdict"] == "certified");
    CHECK(std::abs(double(doc["alpha_star"]) - 2.0) < 1e-10);
}

TEST_CASE("cli: refuted and undetermined exit codes") {
    // geometric pmf: ratio difference identically zero
    json probs = json::array();
    double t = 1.0;
    for (int i = 0; i < 40; ++i) {
        probs.push_back(t);
        t *= 0.5;
    }
    const std::string geo = write_file(
        "geo.json", json{{"family", "tabulated_pmf"}, {"probs", probs}}.dump());
    CHECK(run_cli("certify " + geo).exit_code == 2);

    // concave-increasing ratio profile: the minimum sits at the truncation
    // edge, so the verdict degrades to undetermined_tail
    std::vector<double> f{1.0};
    for (int n = 0; n < 30; ++n)
        f.push_back(f.back() / (1.0 + std::sqrt(n + 1.0)));
    const std::string und = write_file(
        "und.json", json{{"family", "tabulated_pmf"}, {"probs", f}}.dump());
    CHECK(run_cli("certify " + und).exit_code == 3);
}

TEST_CASE("cli: usage errors") {
    CHECK(run_cli("certify /nonexistent.json").exit_code == 64);
    const std::string cfg = write_file("gauss.json", kGauss);
    CHECK(run_cli("certify " + cfg + " --frobnicate").exit_code == 64);
    CHECK(run_cli("frobnicate").exit_code == 64);
    const std::string bad = write_file("bad.json", "{family:");
    CHECK(run_cli("certify " + bad).exit_code == 64);
}

TEST_CASE("cli: gap subcommand on the quartic model") {
    const std::string cfg = write_file("quartic.json", kQuartic);
    const RunResult r = run_cli(
        "gap " + cfg +
        " --ineq stein_gaussian --alpha 1 "
        R"(--test-fn {\"kind\":\"centered_monomial\",\"degree\":3})");
    CHECK(r.exit_code == 0);
    const json arr = json::parse(r.out);
    REQUIRE(arr.is_array());
    CHECK(double(arr[0]["gap"]) > 0.0);
}

TEST_CASE("cli: moments subcommand") {
    const std::string cfg = write_file("gauss.json", kGauss);
    const RunResult r = run_cli("moments " + cfg + " --alpha 2 --rmax 3");
    CHECK(r.exit_code == 0);
    const json arr = json::parse(r.out);
    CHECK(arr[0]["inequality"] == "moment_chain");
    CHECK(arr[0]["gaps"].size() == 6);
}

TEST_CASE("cli: u-estimate subcommand") {
    const std::string cfg = write_file("gauss.json", kGauss);
    const RunResult r = run_cli("u-estimate " + cfg + " --dict poly:3");
    CHECK(r.exit_code == 0);
    const json arr = json::parse(r.out);
    CHECK(std::abs(double(arr[0]["gap"]) - 1.0) < 1e-6);
}

TEST_CASE("cli: sample determinism") {
    const std::string cfg = write_file("gauss.json", kGauss);
    const RunResult a = run_cli("sample " + cfg + " --n 64 --seed 9");
    const RunResult b = run_cli("sample " + cfg + " --n 64 --seed 9");
    CHECK(a.exit_code == 0);
    CHECK(a.out == b.out);
    const json doc = json::parse(a.out);
    CHECK(doc["samples"].size() == 64);
}

TEST_CASE("cli: diagnose poisson reports the Poisson characterization") {
    const std::string cfg = write_file("poisson3.json", kPoisson3);
    const RunResult r = run_cli("diagnose " + cfg);
    CHECK(r.exit_code == 0);
    const json doc = json::parse(r.out);
    CHECK(doc["diagnostic"]["kind"] == "consistent_with_poisson");
    CHECK(std::abs(double(doc["diagnostic"]["params"]["alpha"]) - 3.0) < 1e-9);
}

TEST_CASE("cli: emitted documents validate against the shipped schemas") {
    auto load_schema = [](const char* name) {
        std::ifstream in(std::string(SLC_SOURCE_DIR) + "/schemas/" + name);
        REQUIRE(in.good());
        json s;
        in >> s;
        return s;
    };
    const std::string cfg = write_file("gauss.json", kGauss);
    std::string why;

    const RunResult diag = run_cli("diagnose " + cfg);
    REQUIRE(diag.exit_code == 0);
    bool ok = validate_schema(json::parse(diag.out),
                              load_schema("run_report.schema.json"), &why);
    INFO(why);
    CHECK(ok);

    const RunResult cert = run_cli("certify " + cfg);
    REQUIRE(cert.exit_code == 0);
    ok = validate_schema(json::parse(cert.out),
                         load_schema("certificate.schema.json"), &why);
    INFO(why);
    CHECK(ok);

    const RunResult gap = run_cli("gap " + cfg + " --ineq brascamp_lieb");
    REQUIRE(gap.exit_code == 0);
    ok = validate_schema(json::parse(gap.out),
                         load_schema("gap_report.schema.json"), &why);
    INFO(why);
    CHECK(ok);
}

TEST_CASE("cli: diagnose is bit-identical apart from the wall clock") {
    const std::string cfg = write_file("poisson3.json", kPoisson3);
    json a = json::parse(run_cli("diagnose " + cfg).out);
    json b = json::parse(run_cli("diagnose " + cfg).out);
    a.erase("wall_ms");
    b.erase("wall_ms");
    CHECK(a.dump() == b.dump());
}

TEST_CASE("cli: gen-corpus determinism and --out") {
    const std::string out1 = tmp_dir() + "/corpus1.json";
    const std::string out2 = tmp_dir() + "/corpus2.json";
    CHECK(run_cli("gen-corpus --seed 4 --count 12 --out " + out1).exit_code == 0);
    CHECK(run_cli("gen-corpus --seed 4 --count 12 --out " + out2).exit_code == 0);
    std::ifstream f1(out1), f2(out2);
    const std::string s1((std::istreambuf_iterator<char>(f1)),
                         std::istreambuf_iterator<char>());
    const std::string s2((std::istreambuf_iterator<char>(f2)),
                         std::istreambuf_iterator<char>());
    CHECK(s1 == s2);
    CHECK(json::parse(s1).size() == 12);
}

TEST_CASE("cli: discrete gap subcommands") {
    const std::string cfg = write_file("poisson3.json", kPoisson3);
    const RunResult stein = run_cli(
        "gap " + cfg + " --ineq stein_poisson --alpha 3 "
        R"(--test-fn {\"kind\":\"poly\",\"coeffs\":[0,1],\"monotone\":\"strict\"})");
    CHECK(stein.exit_code == 0);
    CHECK(std::abs(double(json::parse(stein.out)[0]["gap"])) < 1e-9);

    const RunResult cheb = run_cli(
        "gap " + cfg + " --ineq chebyshev "
        R"(--test-fn {\"kind\":\"poly\",\"coeffs\":[0,1],\"monotone\":\"strict\"} )"
        R"(--test-fn-u {\"kind\":\"poly\",\"coeffs\":[0,0,1],\"monotone\":\"strict\"})");
    CHECK(cheb.exit_code == 0);
    CHECK(double(json::parse(cheb.out)[0]["gap"]) > 0.0);

    const std::string bcfg =
        write_file("binom.json", R"({"family":"binomial","N":10,"p":0.3})");
    const RunResult sb = run_cli(
        "gap " + bcfg + " --ineq stein_binomial --alpha 3 "
        R"(--test-fn {\"kind\":\"centered_monomial\",\"degree\":1,\"center\":3})");
    CHECK(sb.exit_code == 0);
    CHECK(std::abs(double(json::parse(sb.out)[0]["gap"])) < 1e-12);
}

TEST_CASE("cli: diagnose exit code mirrors the verdict") {
    std::vector<double> f{1.0};
    for (int n = 0; n < 30; ++n)
        f.push_back(f.back() / (1.0 + std::sqrt(n + 1.0)));
    const std::string und = write_file(
        "und2.json", json{{"family", "tabulated_pmf"}, {"probs", f}}.dump());
    CHECK(run_cli("diagnose " + und).exit_code == 3);
}
