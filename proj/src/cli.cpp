#include "dnls/cli.hpp"

#include <charconv>
#include <chrono>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dnls/analysis.hpp"
#include "dnls/constants.hpp"
#include "dnls/errors.hpp"
#include "dnls/io.hpp"
#include "dnls/rearrange.hpp"
#include "dnls/solver.hpp"
#include "dnls/threshold.hpp"

namespace dnls::cli
{
namespace fs = std::filesystem;

namespace
{
enum class Kind
{
    Int,
    Real,
    Text,
    Bool,
    RealList,
    TextList,
};

struct Key
{
    const char* name;
    Kind kind;
    const char* help;
};

// Keys shared by every solver-backed subcommand.
const std::vector<Key> kSolverKeys{
    {"dim", Kind::Int, "lattice dimension N"},
    {"side", Kind::Int, "starting (odd) box side"},
    {"max_side", Kind::Int, "largest box side for adaptive growth"},
    {"side_step", Kind::Int, "box growth increment (even)"},
    {"family", Kind::Text, "power | two_power_sum | two_power_diff | log_power | exp_saturating"},
    {"p", Kind::Real, "exponent of the power family"},
    {"s1", Kind::Real, "first exponent of two-exponent families"},
    {"s2", Kind::Real, "second exponent of two-exponent families"},
    {"seed", Kind::Int, "global RNG seed"},
    {"workers", Kind::Int, "worker threads (0 = hardware)"},
    {"ordering", Kind::Text, "l1shell | linfshell"},
    {"mode", Kind::Text, "auto | threshold | subcritical | unchecked"},
    {"energy_tol", Kind::Real, "energy change tolerance between boxes"},
    {"residual_tol", Kind::Real, "Euler-Lagrange residual tolerance (relative to max(1, |u|_2))"},
    {"boundary_tol", Kind::Real, "boundary-shell mass tolerance (fraction of m)"},
    {"descent_tol", Kind::Real, "allowed energy rise of an accepted step"},
    {"max_iterations", Kind::Int, "iteration cap per start"},
    {"symmetrize_every", Kind::Int, "guarded rearrangement period (0 = off)"},
    {"initializers", Kind::TextList, "subset of box,delta,gaussian,random"},
    {"initial_step", Kind::Real, "first step size"},
    {"backtrack", Kind::Real, "backtracking factor in (0,1)"},
    {"barzilai_borwein", Kind::Bool, "use Barzilai-Borwein steps"},
    {"min_step", Kind::Real, "lower clamp of the step size"},
    {"max_step", Kind::Real, "upper clamp of the step size"},
    {"formats", Kind::TextList, "output formats: json,csv,svg"},
};

const std::vector<Key> kThresholdKeys{
    {"m_start", Kind::Real, "first mass of the exponential scan"},
    {"m_max", Kind::Real, "upper end of the mass search"},
    {"resolution", Kind::Real, "bisection bracket width"},
    {"eps_zero", Kind::Real, "energies >= -eps_zero count as zero"},
    {"eps_neg", Kind::Real, "energies < -eps_neg count as negative"},
    {"quotient_sides", Kind::RealList, "box sides for the quotient minimisation"},
};

std::vector<Key> keys_for(const std::string& sub)
{
    std::vector<Key> keys;
    if (sub == "rearrange")
        return {{"ordering", Kind::Text, "l1shell | linfshell"}};
    if (sub == "constants")
        return {{"dim", Kind::Int, "lattice dimension N"},
                {"p", Kind::Real, "exponent (default 2 + 4/N)"},
                {"samples", Kind::Int, "random fields for the inequality check"},
                {"sample_side", Kind::Int, "box side of the random fields"},
                {"quotient_sides", Kind::RealList, "box sides for the quotient minimisation"},
                {"seed", Kind::Int, "global RNG seed"},
                {"workers", Kind::Int, "worker threads (0 = hardware)"},
                {"max_iterations", Kind::Int, "iteration cap per start"}};
    keys = kSolverKeys;
    if (sub == "minimize")
        keys.push_back({"m", Kind::Real, "mass m"});
    if (sub == "curve")
        keys.push_back({"m_grid", Kind::RealList, "strictly increasing masses"});
    if (sub == "threshold" || sub == "verify")
        keys.insert(keys.end(), kThresholdKeys.begin(), kThresholdKeys.end());
    if (sub == "verify")
    {
        keys.push_back({"suite", Kind::Text, "core | thresholds | certificates | all"});
        keys.push_back({"certificate_residual_tol", Kind::Real, "certificate residual tolerance"});
        keys.push_back({"schwarz_tol", Kind::Real, "certificate Schwarz-symmetry tolerance"});
        keys.push_back({"threshold_side", Kind::Int, "starting box side of threshold searches"});
    }
    return keys;
}

Json defaults_for(const std::string& sub)
{
    Json d;
    if (sub == "rearrange")
        return Json{{"ordering", "l1shell"}};
    if (sub == "constants")
    {
        d["dim"] = 2;
        d["p"] = nullptr;
        d["samples"] = 1000;
        d["sample_side"] = nullptr;
        d["quotient_sides"] = nullptr;
        d["seed"] = 42;
        d["workers"] = 0;
        d["max_iterations"] = 20000;
        return d;
    }
    const SolveConfig s;
    d["dim"] = s.dim;
    d["side"] = sub == "verify" ? Json(nullptr) : Json(s.side);
    d["max_side"] = sub == "verify" ? Json(nullptr) : Json(101);
    d["side_step"] = s.side_step;
    d["family"] = "power";
    d["p"] = nullptr;
    d["s1"] = nullptr;
    d["s2"] = nullptr;
    d["seed"] = s.seed;
    d["workers"] = 0;
    d["ordering"] = "l1shell";
    d["mode"] = "auto";
    d["energy_tol"] = s.energy_tol;
    d["residual_tol"] = s.residual_tol;
    d["boundary_tol"] = s.boundary_tol;
    d["descent_tol"] = s.descent_tol;
    d["max_iterations"] = s.max_iterations;
    d["symmetrize_every"] = s.symmetrize_every;
    d["initializers"] = Json::array({"box", "delta", "gaussian", "random"});
    d["initial_step"] = s.initial_step;
    d["backtrack"] = s.backtrack;
    d["barzilai_borwein"] = s.barzilai_borwein;
    d["min_step"] = s.min_step;
    d["max_step"] = s.max_step;
    d["formats"] = sub == "curve" ? Json::array({"json", "csv"}) : Json::array({"json"});
    if (sub == "minimize")
        d["m"] = nullptr;
    if (sub == "curve")
        d["m_grid"] = nullptr;
    if (sub == "threshold" || sub == "verify")
    {
        const ThresholdConfig t;
        d["m_start"] = t.m_start;
        d["m_max"] = t.m_max;
        d["resolution"] = t.resolution;
        d["eps_zero"] = t.eps_zero;
        d["eps_neg"] = t.eps_neg;
        d["quotient_sides"] = Json::array({21});
    }
    if (sub == "verify")
    {
        const CheckContext c;
        d["suite"] = "all";
        d["certificate_residual_tol"] = c.residual_tol;
        d["schwarz_tol"] = c.schwarz_tol;
        d["threshold_side"] = c.threshold_side;
    }
    return d;
}

std::string flag_name(const char* key)
{
    std::string s = std::string("--") + key;
    for (auto& c : s)
        if (c == '_')
            c = '-';
    return s;
}

double parse_real(const std::string& key, const std::string& text)
{
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end)
        throw UsageError("option " + key + " expects a number, got '" + text + "'");
    return v;
}

std::vector<std::string> split_list(const std::string& text)
{
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty())
            out.push_back(item);
    return out;
}

Json parse_flag(const Key& key, const std::string& text)
{
    switch (key.kind)
    {
    case Kind::Int:
    {
        long long v = 0;
        const auto* end = text.data() + text.size();
        const auto res = std::from_chars(text.data(), end, v);
        if (res.ec != std::errc() || res.ptr != end)
            throw UsageError(std::string("option ") + key.name + " expects an integer, got '" + text + "'");
        return v;
    }
    case Kind::Real: return parse_real(key.name, text);
    case Kind::Text: return text;
    case Kind::Bool:
        if (text == "true" || text == "1")
            return true;
        if (text == "false" || text == "0")
            return false;
        throw UsageError(std::string("option ") + key.name + " expects true or false");
    case Kind::RealList:
    {
        Json arr = Json::array();
        for (const auto& item : split_list(text))
            arr.push_back(parse_real(key.name, item));
        return arr;
    }
    case Kind::TextList:
    {
        Json arr = Json::array();
        for (const auto& item : split_list(text))
            arr.push_back(item);
        return arr;
    }
    }
    return nullptr;
}

void check_config_value(const Key& key, const Json& v)
{
    bool ok = v.is_null(); // null keeps the built-in default
    switch (key.kind)
    {
    case Kind::Int: ok = ok || v.is_number_integer(); break;
    case Kind::Real: ok = ok || v.is_number(); break;
    case Kind::Text: ok = ok || v.is_string(); break;
    case Kind::Bool: ok = ok || v.is_boolean(); break;
    case Kind::RealList:
        ok = ok || (v.is_array() && std::all_of(v.begin(), v.end(), [](const Json& x) { return x.is_number(); }));
        break;
    case Kind::TextList:
        ok = ok || (v.is_array() && std::all_of(v.begin(), v.end(), [](const Json& x) { return x.is_string(); }));
        break;
    }
    if (!ok)
        throw UsageError(std::string("config key '") + key.name + "' has the wrong type");
}

/// Per-subcommand state: raw flag strings plus file options.
struct Command
{
    std::string name;
    CLI::App* app = nullptr;
    std::vector<Key> keys;
    std::map<std::string, std::string> raw;
    std::string config_path;
    std::string out; // directory, or a file for rearrange and verify
    std::string in;  // rearrange input

    Json resolve() const
    {
        Json cfg = defaults_for(name);
        if (!config_path.empty())
        {
            const Json file = read_json(config_path);
            if (!file.is_object())
                throw UsageError("config file must hold a JSON object");
            for (const auto& [k, v] : file.items())
            {
                const auto it = std::find_if(keys.begin(), keys.end(), [&](const Key& key) { return k == key.name; });
                if (it == keys.end())
                    throw UsageError("unknown config key '" + k + "' for subcommand " + name);
                check_config_value(*it, v);
                if (!v.is_null())
                    cfg[k] = v;
            }
        }
        for (const auto& key : keys)
        {
            const auto it = raw.find(key.name);
            if (it != raw.end())
                cfg[key.name] = parse_flag(key, it->second);
        }
        return cfg;
    }
};

std::optional<double> opt_real(const Json& cfg, const char* key)
{
    if (!cfg.contains(key) || cfg[key].is_null())
        return std::nullopt;
    return cfg[key].get<double>();
}

Nonlinearity nonlinearity_from(const Json& cfg)
{
    return Nonlinearity::from_parameters(family_from_string(cfg["family"].get<std::string>()), opt_real(cfg, "p"),
                                         opt_real(cfg, "s1"), opt_real(cfg, "s2"));
}

int positive_int(const Json& cfg, const char* key)
{
    const auto v = cfg[key].get<long long>();
    if (v < 0 || v > 1'000'000'000)
        throw UsageError(std::string(key) + " is out of range");
    return static_cast<int>(v);
}

SolveConfig solve_config_from(const Json& cfg)
{
    SolveConfig s;
    s.dim = positive_int(cfg, "dim");
    if (!cfg["side"].is_null())
        s.side = positive_int(cfg, "side");
    if (!cfg["max_side"].is_null())
        s.max_side = positive_int(cfg, "max_side");
    s.max_side = std::max(s.max_side, s.side);
    s.side_step = positive_int(cfg, "side_step");
    s.seed = static_cast<std::uint64_t>(cfg["seed"].get<long long>());
    s.workers = static_cast<unsigned>(positive_int(cfg, "workers"));
    s.ordering = ordering_from_string(cfg["ordering"].get<std::string>());
    s.mode = theorem_mode_from_string(cfg["mode"].get<std::string>());
    s.energy_tol = cfg["energy_tol"].get<double>();
    s.residual_tol = cfg["residual_tol"].get<double>();
    s.boundary_tol = cfg["boundary_tol"].get<double>();
    s.descent_tol = cfg["descent_tol"].get<double>();
    s.max_iterations = positive_int(cfg, "max_iterations");
    s.symmetrize_every = positive_int(cfg, "symmetrize_every");
    s.initializers.clear();
    for (const auto& name : cfg["initializers"])
        s.initializers.push_back(initializer_from_string(name.get<std::string>()));
    s.initial_step = cfg["initial_step"].get<double>();
    s.backtrack = cfg["backtrack"].get<double>();
    s.barzilai_borwein = cfg["barzilai_borwein"].get<bool>();
    s.min_step = cfg["min_step"].get<double>();
    s.max_step = cfg["max_step"].get<double>();
    if (auto m = opt_real(cfg, "m"))
        s.m = *m;
    return s;
}

std::vector<int> sides_from(const Json& list)
{
    std::vector<int> sides;
    for (const auto& v : list)
    {
        const double d = v.get<double>();
        if (d != std::floor(d))
            throw UsageError("box sides must be integers");
        sides.push_back(static_cast<int>(d));
    }
    if (sides.empty())
        throw UsageError("at least one quotient side is required");
    return sides;
}

ThresholdConfig threshold_config_from(const Json& cfg, unsigned workers)
{
    ThresholdConfig t;
    t.m_start = cfg["m_start"].get<double>();
    t.m_max = cfg["m_max"].get<double>();
    t.resolution = cfg["resolution"].get<double>();
    t.eps_zero = cfg["eps_zero"].get<double>();
    t.eps_neg = cfg["eps_neg"].get<double>();
    t.quotient.sides = sides_from(cfg["quotient_sides"]);
    t.quotient.workers = workers;
    return t;
}

bool wants(const Json& cfg, const char* format)
{
    for (const auto& f : cfg["formats"])
    {
        const auto s = f.get<std::string>();
        if (s != "json" && s != "csv" && s != "svg")
            throw UsageError("unknown output format '" + s + "'");
        if (s == format)
            return true;
    }
    return false;
}

void write_manifest(const fs::path& dir, const std::string& sub, const Json& cfg)
{
    Json m;
    m["tool"] = "dnls";
    m["version"] = DNLS_VERSION;
    m["subcommand"] = sub;
    m["config"] = cfg;
    write_json(dir / "manifest.json", m);
}

void append_log(const fs::path& dir, const std::string& line)
{
    fs::create_directories(dir);
    std::ofstream log(dir / "run.log", std::ios::app);
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%S", std::localtime(&now));
    log << stamp << ' ' << line << '\n';
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

//---------------------------------------------------------------------------//

int do_minimize(const Command& c)
{
    const auto t0 = std::chrono::steady_clock::now();
    const Json cfg = c.resolve();
    if (cfg["m"].is_null())
        throw UsageError("minimize needs --m");
    const auto nl = nonlinearity_from(cfg);
    const auto s = solve_config_from(cfg);
    const fs::path dir = c.out;
    const auto r = minimize_adaptive(s, nl);
    write_json(dir / "result.json", outcome_to_json(r, nl, s));
    write_field(dir / "minimizer.json", r.minimizer);
    write_manifest(dir, c.name, cfg);
    append_log(dir, "minimize finished in " + format_double(seconds_since(t0)) + " s");
    std::cout << "E = " << format_double(r.energy) << "  lambda = " << format_double(r.multiplier)
              << "  residual = " << format_double(r.residual) << "  side = " << r.box_side
              << (r.converged ? "" : "  (not converged: " + r.diagnostic + ")") << '\n';
    return r.converged ? Success : NotConverged;
}

int do_curve(const Command& c)
{
    const auto t0 = std::chrono::steady_clock::now();
    const Json cfg = c.resolve();
    if (cfg["m_grid"].is_null())
        throw UsageError("curve needs --m-grid");
    const auto nl = nonlinearity_from(cfg);
    const auto s = solve_config_from(cfg);
    const auto masses = cfg["m_grid"].get<std::vector<double>>();
    const auto curve = energy_curve(s, nl, masses);
    const fs::path dir = c.out;
    if (wants(cfg, "csv"))
        write_text(dir / "curve.csv", curve_csv(curve));
    if (wants(cfg, "json"))
    {
        Json j;
        j["spec"] = nonlinearity_to_json(nl);
        j["dim"] = s.dim;
        j["seed"] = s.seed;
        j["points"] = Json::array();
        for (const auto& p : curve.points)
            j["points"].push_back({{"m", p.m},
                                   {"energy", p.energy},
                                   {"converged", p.converged},
                                   {"box_side", p.box_side},
                                   {"lattice_energy", p.lattice_energy},
                                   {"lambda", p.multiplier},
                                   {"residual", p.residual},
                                   {"diagnostic", p.diagnostic}});
        write_json(dir / "curve.json", j);
    }
    if (wants(cfg, "svg"))
        write_text(dir / "curve.svg", curve_svg(curve, "E_m for " + nl.describe()));
    write_manifest(dir, c.name, cfg);
    append_log(dir, "curve finished in " + format_double(seconds_since(t0)) + " s");
    bool failed = false;
    for (const auto& p : curve.points)
    {
        std::cout << "m = " << format_double(p.m) << "  E = " << format_double(p.energy)
                  << (p.converged ? "" : "  (" + p.diagnostic + ")") << '\n';
        failed = failed || !std::isfinite(p.energy);
    }
    return failed ? NotConverged : Success;
}

int do_threshold(const Command& c)
{
    const auto t0 = std::chrono::steady_clock::now();
    const Json cfg = c.resolve();
    const auto nl = nonlinearity_from(cfg);
    const auto s = solve_config_from(cfg);
    const auto t = threshold_config_from(cfg, s.workers);
    const auto r = estimate_threshold(s, nl, t);
    const fs::path dir = c.out;
    write_json(dir / "threshold.json", threshold_to_json(r, nl));
    write_manifest(dir, c.name, cfg);
    append_log(dir, "threshold finished in " + format_double(seconds_since(t0)) + " s");
    std::cout << "status = " << to_string(r.status) << "  m* estimate = " << format_double(r.estimate)
              << "  bracket = [" << format_double(r.m_lo) << ", " << format_double(r.m_hi) << "]";
    if (r.formula_value)
        std::cout << "  formula = " << format_double(*r.formula_value);
    std::cout << '\n';
    return r.status == ThresholdStatus::Failed ? NotConverged : Success;
}

int do_constants(const Command& c)
{
    const auto t0 = std::chrono::steady_clock::now();
    const Json cfg = c.resolve();
    const int dim = positive_int(cfg, "dim");
    const fs::path dir = c.out;
    const int sample_side = cfg["sample_side"].is_null() ? (dim <= 2 ? 21 : 11) : positive_int(cfg, "sample_side");
    QuotientConfig q;
    q.dim = dim;
    q.sides = cfg["quotient_sides"].is_null() ? std::vector<int>{sample_side} : sides_from(cfg["quotient_sides"]);
    q.workers = static_cast<unsigned>(positive_int(cfg, "workers"));
    q.max_iterations = positive_int(cfg, "max_iterations");
    const auto seed = static_cast<std::uint64_t>(cfg["seed"].get<long long>());

    Json out;
    int violations = 0;
    if (auto p = opt_real(cfg, "p"); p && std::abs(*p - critical_exponent(dim)) > 1e-12)
    {
        const auto j = j_constant(*p, q);
        out["dim"] = dim;
        out["p"] = *p;
        out["j"] = j.value;
        out["j_side"] = j.side;
        out["j_per_side"] = j.per_side;
        out["j_converged"] = j.converged;
        out["delta_quotient"] = j.delta_value;
        out["weinstein_threshold"] = weinstein_threshold(*p, j.value);
        write_field(dir / "quotient_minimizer.json", j.minimizer);
    }
    else
    {
        const auto r = gn_verify(dim, positive_int(cfg, "samples"), sample_side, seed, q);
        out = constants_to_json(r);
        out["weinstein_threshold"] = weinstein_threshold(r.p, r.j.value);
        write_field(dir / "quotient_minimizer.json", r.j.minimizer);
        int k = 0;
        for (const auto& f : r.gn.counterexamples)
            write_field(dir / "counterexamples" / ("gn_" + std::to_string(k++) + ".json"), f);
        if (r.sobolev_check)
            for (const auto& f : r.sobolev_check->counterexamples)
                write_field(dir / "counterexamples" / ("sobolev_" + std::to_string(k++) + ".json"), f);
        violations = r.gn.violations + (r.sobolev_check ? r.sobolev_check->violations : 0);
    }
    write_json(dir / "constants.json", out);
    write_manifest(dir, c.name, cfg);
    append_log(dir, "constants finished in " + format_double(seconds_since(t0)) + " s");
    std::cout << out.dump(2) << '\n';
    return violations > 0 ? CheckFailure : Success;
}

int do_rearrange(const Command& c)
{
    const Json cfg = c.resolve();
    if (c.in.empty() || c.out.empty())
        throw UsageError("rearrange needs --in and --out");
    const auto strategy = ordering_from_string(cfg["ordering"].get<std::string>());
    const Field u = read_field(c.in);
    const auto rep = rearrange_with_report(u, strategy);
    write_field(c.out, rep.output);
    const fs::path out(c.out);
    write_manifest(out.has_parent_path() ? out.parent_path() : fs::path("."), c.name, cfg);
    std::cout << rearrange_to_json(rep).dump(2) << '\n';
    return Success;
}

int do_verify(const Command& c)
{
    const auto t0 = std::chrono::steady_clock::now();
    const Json cfg = c.resolve();
    const fs::path report_path = c.out.empty() ? fs::path("report.json") : fs::path(c.out);
    const fs::path dir = report_path.has_parent_path() ? report_path.parent_path() : fs::path(".");

    CheckContext ctx;
    const int dim = positive_int(cfg, "dim");
    Json resolved = cfg;
    if (resolved["side"].is_null())
        resolved["side"] = dim <= 2 ? 41 : 15;
    if (resolved["max_side"].is_null())
        resolved["max_side"] = std::max(61, resolved["side"].get<int>());
    ctx.solve = solve_config_from(resolved);
    ctx.threshold = threshold_config_from(resolved, ctx.solve.workers);
    ctx.quotient = ctx.threshold.quotient;
    ctx.residual_tol = resolved["certificate_residual_tol"].get<double>();
    ctx.schwarz_tol = resolved["schwarz_tol"].get<double>();
    ctx.threshold_side = positive_int(resolved, "threshold_side");
    ctx.out_dir = dir;
    const auto suite = suite_from_string(resolved["suite"].get<std::string>());

    const auto reports = run_suite(ctx, suite);
    Json arr = Json::array();
    for (const auto& r : reports)
        arr.push_back(check_to_json(r));
    write_json(report_path, arr);
    write_manifest(dir, c.name, resolved);
    for (const auto& r : reports)
    {
        append_log(dir, r.name + " " + std::string(to_string(r.status)) + " in " +
                            format_double(r.runtime_seconds) + " s");
        std::cout << to_string(r.status) << "  " << r.name << (r.message.empty() ? "" : "  - " + r.message)
                  << '\n';
    }
    append_log(dir, "verify finished in " + format_double(seconds_since(t0)) + " s");
    return any_failed(reports) ? CheckFailure : Success;
}

} // namespace

int run(int argc, const char* const* argv)
{
    CLI::App app{"Constrained minimisation of the discrete NLS energy on Z^N and its verification harness", "dnls"};
    app.set_version_flag("--version", DNLS_VERSION);
    app.require_subcommand(1);

    const std::vector<std::pair<std::string, std::string>> subs{
        {"minimize", "minimise I on S_m with adaptive box growth"},
        {"curve", "energy curve m -> E_m"},
        {"threshold", "estimate the excitation threshold m*"},
        {"constants", "J^{p,N}, Gagliardo-Nirenberg and Sobolev constants"},
        {"rearrange", "Schwarz rearrangement of a field JSON file"},
        {"verify", "run a verification suite"}};

    std::vector<std::unique_ptr<Command>> commands;
    for (const auto& [name, help] : subs)
    {
        auto cmd = std::make_unique<Command>();
        cmd->name = name;
        cmd->keys = keys_for(name);
        cmd->app = app.add_subcommand(name, help);
        cmd->app->add_option("--config", cmd->config_path, "JSON config file (flags override its keys)");
        if (name == "rearrange")
        {
            cmd->app->add_option("--in", cmd->in, "input field JSON")->required();
            cmd->app->add_option("--out", cmd->out, "output field JSON")->required();
        }
        else if (name == "verify")
        {
            cmd->out = "report.json";
            cmd->app->add_option("--out", cmd->out, "report JSON; reproducers go next to it");
        }
        else
        {
            cmd->out = ".";
            cmd->app->add_option("--out-dir", cmd->out, "output directory");
        }
        for (const auto& key : cmd->keys)
        {
            auto* raw = &cmd->raw;
            const std::string k = key.name;
            cmd->app->add_option_function<std::string>(
                flag_name(key.name), [raw, k](const std::string& v) { (*raw)[k] = v; }, key.help);
        }
        commands.push_back(std::move(cmd));
    }

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? Success : UsageFailure;
    }

    try
    {
        for (const auto& cmd : commands)
        {
            if (!cmd->app->parsed())
                continue;
            if (cmd->name == "minimize")
                return do_minimize(*cmd);
            if (cmd->name == "curve")
                return do_curve(*cmd);
            if (cmd->name == "threshold")
                return do_threshold(*cmd);
            if (cmd->name == "constants")
                return do_constants(*cmd);
            if (cmd->name == "rearrange")
                return do_rearrange(*cmd);
            if (cmd->name == "verify")
                return do_verify(*cmd);
        }
    }
    catch (const UsageError& e)
    {
        std::cerr << "dnls: " << e.what() << '\n';
        return UsageFailure;
    }
    catch (const nlohmann::json::exception& e)
    {
        std::cerr << "dnls: configuration error: " << e.what() << '\n';
        return UsageFailure;
    }
    catch (const std::range_error& e)
    {
        std::cerr << "dnls: " << e.what() << '\n';
        return UsageFailure;
    }
    return UsageFailure;
}

} // namespace dnls::cli
