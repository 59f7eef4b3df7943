#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dnls/cli.hpp"
#include "dnls/io.hpp"

namespace fs = std::filesystem;
using dnls::Json;

namespace
{
int run(std::vector<std::string> args)
{
    args.insert(args.begin(), "dnls");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    return dnls::cli::run(static_cast<int>(argv.size()), argv.data());
}

fs::path fresh_dir(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / "dnls-cli-tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Json load(const fs::path& p)
{
    return Json::parse(slurp(p));
}
} // namespace

TEST_CASE("usage errors exit 1")
{
    CHECK(run({}) == dnls::cli::UsageFailure);
    CHECK(run({"solve"}) == dnls::cli::UsageFailure);
    CHECK(run({"minimize", "--m", "1", "--bogus", "2"}) == dnls::cli::UsageFailure);
    CHECK(run({"minimize", "--m", "abc"}) == dnls::cli::UsageFailure);
    CHECK(run({"minimize", "--m", "1", "--side", "20"}) == dnls::cli::UsageFailure);
    CHECK(run({"minimize", "--m", "1", "--family", "cubic"}) == dnls::cli::UsageFailure);
    CHECK(run({"minimize", "--m", "1", "--family", "power"}) == dnls::cli::UsageFailure); // no exponent
    CHECK(run({"minimize", "--p", "3", "--config", "/nonexistent.json"}) == dnls::cli::UsageFailure);
}

TEST_CASE("unknown and mistyped config keys are rejected")
{
    const auto dir = fresh_dir("config");
    dnls::write_json(dir / "unknown.json", Json{{"m", 1.0}, {"p", 3.0}, {"colour", "red"}});
    CHECK(run({"minimize", "--config", (dir / "unknown.json").string()}) == dnls::cli::UsageFailure);
    dnls::write_json(dir / "typed.json", Json{{"m", "one"}, {"p", 3.0}});
    CHECK(run({"minimize", "--config", (dir / "typed.json").string()}) == dnls::cli::UsageFailure);
    // Keys of another subcommand are unknown here.
    dnls::write_json(dir / "other.json", Json{{"m", 1.0}, {"p", 3.0}, {"m_grid", {1.0}}});
    CHECK(run({"minimize", "--config", (dir / "other.json").string()}) == dnls::cli::UsageFailure);
}

TEST_CASE("minimize writes result, field and manifest; flags override the config file")
{
    const auto dir = fresh_dir("minimize");
    dnls::write_json(dir / "cfg.json", Json{{"m", 0.5}, {"p", 3.0}, {"side", 11}, {"max_side", 11}, {"seed", 7}});
    const int code = run({"minimize", "--config", (dir / "cfg.json").string(), "--m", "1", "--out-dir",
                          (dir / "out").string()});
    const Json result = load(dir / "out" / "result.json");
    const Json manifest = load(dir / "out" / "manifest.json");
    CHECK(result["m"] == 1.0);
    CHECK(result["seed"] == 7);
    CHECK(result["box_side"] == 11);
    CHECK(manifest["tool"] == "dnls");
    CHECK(manifest["version"] == DNLS_VERSION);
    CHECK(manifest["config"]["m"] == 1.0);
    CHECK(manifest["config"]["side"] == 11);
    const Json field = load(dir / "out" / "minimizer.json");
    CHECK(field["side"] == 11);
    // A single side of 11 cannot show stabilisation, so the run reports non-convergence.
    CHECK(code == dnls::cli::NotConverged);
    CHECK_FALSE(result["converged"].get<bool>());
}

TEST_CASE("documented minimize example exits 0 and replays byte-identically from its manifest")
{
    const auto dir = fresh_dir("example");
    const auto a = dir / "a";
    CHECK(run({"minimize", "--dim", "2", "--family", "power", "--p", "3", "--m", "1", "--seed", "42", "--out-dir",
               a.string()}) == dnls::cli::Success);
    const Json result = load(a / "result.json");
    CHECK(result["converged"] == true);
    CHECK(result["energy"].get<double>() < 0.0);

    dnls::write_json(dir / "replay.json", load(a / "manifest.json")["config"]);
    const auto b = dir / "b";
    CHECK(run({"minimize", "--config", (dir / "replay.json").string(), "--out-dir", b.string()}) ==
          dnls::cli::Success);
    CHECK(slurp(a / "result.json") == slurp(b / "result.json"));
    CHECK(slurp(a / "minimizer.json") == slurp(b / "minimizer.json"));
}

TEST_CASE("curve writes CSV, JSON and SVG")
{
    const auto dir = fresh_dir("curve");
    CHECK(run({"curve", "--p", "3", "--m-grid", "0.5,1", "--side", "11", "--max-side", "21", "--formats",
               "csv,json,svg", "--out-dir", dir.string()}) == dnls::cli::Success);
    const std::string csv = slurp(dir / "curve.csv");
    CHECK(csv.rfind("m,energy,converged,box_side\n", 0) == 0);
    CHECK(load(dir / "curve.json")["points"].size() == 2);
    CHECK(fs::exists(dir / "curve.svg"));
    CHECK(run({"curve", "--p", "3", "--m-grid", "1,0.5", "--out-dir", dir.string()}) == dnls::cli::UsageFailure);
    CHECK(run({"curve", "--p", "3", "--m-grid", "1", "--formats", "png", "--out-dir", dir.string()}) ==
          dnls::cli::UsageFailure);
}

TEST_CASE("threshold example")
{
    const auto dir = fresh_dir("threshold");
    CHECK(run({"threshold", "--dim", "2", "--family", "power", "--p", "4", "--resolution", "0.01", "--out-dir",
               dir.string()}) == dnls::cli::Success);
    const Json r = load(dir / "threshold.json");
    CHECK(r["status"] == "bracketed");
    CHECK(r["m_hi"].get<double>() - r["m_lo"].get<double>() <= 0.01);
}

TEST_CASE("constants")
{
    const auto dir = fresh_dir("constants");
    CHECK(run({"constants", "--dim", "2", "--samples", "50", "--out-dir", dir.string()}) == dnls::cli::Success);
    const Json r = load(dir / "constants.json");
    CHECK(r["gn_check"]["violations"] == 0);
    CHECK(run({"constants", "--dim", "2", "--p", "6", "--quotient-sides", "11", "--out-dir", dir.string()}) ==
          dnls::cli::Success);
    CHECK(load(dir / "constants.json")["p"] == 6.0);
}

TEST_CASE("rearrange")
{
    const auto dir = fresh_dir("rearrange");
    dnls::write_json(dir / "in.json", Json{{"dim", 1}, {"side", 5}, {"values", {0.0, 3.0, 0.0, 1.0, 2.0}}});
    CHECK(run({"rearrange", "--in", (dir / "in.json").string(), "--out", (dir / "out.json").string()}) ==
          dnls::cli::Success);
    const Json out = load(dir / "out.json");
    CHECK(out["values"] == Json({0.0, 2.0, 3.0, 1.0, 0.0}));
    dnls::write_json(dir / "neg.json", Json{{"dim", 1}, {"side", 1}, {"values", {-1.0}}});
    CHECK(run({"rearrange", "--in", (dir / "neg.json").string(), "--out", (dir / "x.json").string()}) ==
          dnls::cli::UsageFailure);
    CHECK(run({"rearrange", "--in", (dir / "in.json").string(), "--out", (dir / "y.json").string(), "--ordering",
               "spiral"}) == dnls::cli::UsageFailure);
}

TEST_CASE("verify: an injected failing tolerance exits 2")
{
    const auto dir = fresh_dir("verify");
    const int code = run({"verify", "--suite", "certificates", "--dim", "2", "--seed", "42",
                          "--certificate-residual-tol", "1e-30", "--out", (dir / "report.json").string()});
    CHECK(code == dnls::cli::CheckFailure);
    const Json report = load(dir / "report.json");
    bool residual_failure = false;
    for (const auto& r : report)
        if (r["status"] == "fail" && r["message"].get<std::string>().find("residual") != std::string::npos)
            residual_failure = true;
    CHECK(residual_failure);
    CHECK(fs::exists(dir / "manifest.json"));
    CHECK(fs::exists(dir / "run.log"));
}
