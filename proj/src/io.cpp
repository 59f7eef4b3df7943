#include "dnls/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "dnls/errors.hpp"

namespace dnls
{
namespace fs = std::filesystem;

Json field_to_json(const Field& u)
{
    Json j;
    j["dim"] = u.dim();
    j["side"] = u.side();
    j["values"] = Json::array();
    auto& vals = j["values"];
    for (double v : u.values())
        vals.push_back(v);
    return j;
}

Field field_from_json(const Json& j)
{
    if (!j.is_object())
        throw UsageError("field JSON must be an object");
    for (const char* key : {"dim", "side", "values"})
        if (!j.contains(key))
            throw UsageError(std::string("field JSON lacks \"") + key + "\"");
    if (!j["dim"].is_number_integer() || !j["side"].is_number_integer() || !j["values"].is_array())
        throw UsageError("field JSON has mistyped dim, side or values");
    const auto box = make_box(j["dim"].get<int>(), j["side"].get<int>());
    std::vector<double> values;
    values.reserve(j["values"].size());
    for (const auto& v : j["values"])
    {
        if (!v.is_number())
            throw UsageError("field values must be numbers");
        values.push_back(v.get<double>());
    }
    return Field(box, std::move(values));
}

Json read_json(const fs::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw UsageError("cannot open " + path.string());
    try
    {
        return Json::parse(in);
    }
    catch (const nlohmann::json::parse_error& e)
    {
        throw UsageError("malformed JSON in " + path.string() + ": " + e.what());
    }
}

void write_text(const fs::path& path, const std::string& text)
{
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw UsageError("cannot write " + path.string());
    out << text;
}

void write_json(const fs::path& path, const Json& j)
{
    write_text(path, j.dump(2) + "\n");
}

Field read_field(const fs::path& path)
{
    return field_from_json(read_json(path));
}

void write_field(const fs::path& path, const Field& u)
{
    write_json(path, field_to_json(u));
}

Json nonlinearity_to_json(const Nonlinearity& nl)
{
    Json j;
    j["family"] = std::string(to_string(nl.family()));
    switch (nl.family())
    {
    case Family::Power:
        j["p"] = nl.first_exponent();
        break;
    case Family::ExpSaturating:
        break;
    default:
        j["s1"] = nl.first_exponent();
        j["s2"] = nl.second_exponent();
        break;
    }
    return j;
}

Json outcome_to_json(const MinimizeOutcome& r, const Nonlinearity& nl, const SolveConfig& cfg)
{
    Json j;
    j["m"] = cfg.m;
    j["energy"] = r.energy;
    j["lambda"] = r.multiplier;
    j["residual"] = r.residual;
    j["iterations"] = r.iterations;
    j["converged"] = r.converged;
    j["box_side"] = r.box_side;
    j["spec"] = nonlinearity_to_json(nl);
    j["seed"] = cfg.seed;
    j["dim"] = cfg.dim;
    j["lattice_energy"] = r.lattice_energy;
    j["spreading_bound_used"] = r.spreading_bound_used;
    j["stabilized"] = r.stabilized;
    j["boundary_mass"] = r.boundary_mass;
    j["initializer"] = r.initializer;
    j["ordering"] = std::string(to_string(cfg.ordering));
    j["sides_tried"] = r.sides_tried;
    j["sup_norms"] = r.sup_norms;
    j["side_energies"] = r.side_energies;
    j["diagnostic"] = r.diagnostic;
    return j;
}

Json threshold_to_json(const ThresholdReport& r, const Nonlinearity& nl)
{
    Json j;
    j["status"] = std::string(to_string(r.status));
    j["classification"] = std::string(to_string(r.growth));
    j["spec"] = nonlinearity_to_json(nl);
    j["m_lo"] = r.m_lo;
    j["m_hi"] = r.m_hi;
    j["estimate"] = r.estimate;
    j["eps_zero"] = r.eps_zero;
    j["eps_neg"] = r.eps_neg;
    j["eps_widened"] = r.widened;
    j["bisection_steps"] = r.bisection_steps;
    j["box_sides"] = r.box_sides;
    j["j_constant"] = r.j_value ? Json(*r.j_value) : Json(nullptr);
    j["formula_value"] = r.formula_value ? Json(*r.formula_value) : Json(nullptr);
    j["zeta_witness"] = r.zeta ? Json(*r.zeta) : Json(nullptr);
    j["diagnostic"] = r.diagnostic;
    Json probes = Json::array();
    for (const auto& p : r.probes)
    {
        Json q;
        q["phase"] = p.phase;
        q["m"] = p.m;
        q["energy"] = p.energy;
        q["lattice_energy"] = p.lattice_energy;
        q["box_side"] = p.box_side;
        q["sign"] = std::string(to_string(p.sign));
        probes.push_back(q);
    }
    j["probes"] = probes;
    return j;
}

namespace
{
Json quotient_to_json(const QuotientResult& q)
{
    Json j;
    j["value"] = q.value;
    j["side"] = q.side;
    j["converged"] = q.converged;
    j["per_side"] = q.per_side;
    j["starts"] = q.starts;
    j["delta_value"] = q.delta_value;
    return j;
}

Json inequality_to_json(const InequalityCheck& c)
{
    Json j;
    j["constant"] = c.constant;
    j["samples"] = c.samples;
    j["violations"] = c.violations;
    j["worst_ratio"] = c.worst_ratio;
    return j;
}

} // namespace

Json constants_to_json(const ConstantsReport& r)
{
    Json j;
    j["dim"] = r.dim;
    j["p"] = r.p;
    j["j"] = quotient_to_json(r.j);
    j["gn_constant"] = r.gn_constant;
    j["gn_check"] = inequality_to_json(r.gn);
    j["sample_side"] = r.sample_side;
    Json slack = Json::array();
    for (const auto& s : r.block_slack)
        slack.push_back(Json{{"n", s.n}, {"lhs", s.lhs}, {"rhs", s.rhs}});
    j["block_slack"] = slack;
    if (r.sobolev)
    {
        j["sobolev"] = quotient_to_json(*r.sobolev);
        j["sobolev_constant"] = *r.sobolev_constant;
        j["sobolev_check"] = inequality_to_json(*r.sobolev_check);
    }
    return j;
}

Json rearrange_to_json(const RearrangeReport& r)
{
    Json j;
    j["ordering"] = r.ordering;
    j["hash_before"] = r.hash_before;
    j["hash_after"] = r.hash_after;
    j["dirichlet_before"] = r.energy_before;
    j["dirichlet_after"] = r.energy_after;
    j["input_side"] = r.input.side();
    j["output_side"] = r.output.side();
    return j;
}

std::string format_double(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string curve_csv(const EnergyCurve& curve)
{
    std::string out = "m,energy,converged,box_side\n";
    for (const auto& p : curve.points)
        out += format_double(p.m) + "," + format_double(p.energy) + "," + (p.converged ? "true" : "false") + "," +
               std::to_string(p.box_side) + "\n";
    return out;
}

namespace
{
std::string xml_escape(const std::string& text)
{
    std::string out;
    for (char c : text)
    {
        switch (c)
        {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}
} // namespace

std::string curve_svg(const EnergyCurve& curve, const std::string& title)
{
    constexpr double width = 640, height = 400, left = 80, right = 20, top = 40, bottom = 60;
    double mlo = std::numeric_limits<double>::infinity(), mhi = -mlo, elo = mlo, ehi = -mlo;
    for (const auto& p : curve.points)
    {
        if (!std::isfinite(p.energy))
            continue;
        mlo = std::min(mlo, p.m);
        mhi = std::max(mhi, p.m);
        elo = std::min(elo, p.energy);
        ehi = std::max(ehi, p.energy);
    }
    if (!std::isfinite(mlo))
        mlo = 0, mhi = 1, elo = -1, ehi = 0;
    ehi = std::max(ehi, 0.0);
    if (mhi == mlo)
        mhi = mlo + 1;
    if (ehi == elo)
        elo = ehi - 1;
    auto sx = [&](double m) { return left + (m - mlo) / (mhi - mlo) * (width - left - right); };
    auto sy = [&](double e) { return top + (ehi - e) / (ehi - elo) * (height - top - bottom); };

    std::ostringstream svg;
    svg.imbue(std::locale::classic());
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
        << xml_escape(title) << "</text>\n";
    svg << "<line x1=\"" << left << "\" y1=\"" << height - bottom << "\" x2=\"" << width - right << "\" y2=\""
        << height - bottom << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << height - bottom
        << "\" stroke=\"black\"/>\n";
    if (elo < 0.0 && ehi >= 0.0)
        svg << "<line x1=\"" << left << "\" y1=\"" << sy(0.0) << "\" x2=\"" << width - right << "\" y2=\"" << sy(0.0)
            << "\" stroke=\"#999\" stroke-dasharray=\"4 4\"/>\n";
    auto label = [&](double x, double y, const std::string& text, const char* anchor) {
        svg << "<text x=\"" << x << "\" y=\"" << y << "\" text-anchor=\"" << anchor
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << text << "</text>\n";
    };
    label(left, height - bottom + 16, format_double(mlo), "middle");
    label(width - right, height - bottom + 16, format_double(mhi), "middle");
    label(left - 6, top + 4, format_double(ehi), "end");
    label(left - 6, height - bottom + 4, format_double(elo), "end");
    label((left + width - right) / 2, height - 16, "m", "middle");
    label(20, (top + height - bottom) / 2, "E_m", "middle");

    svg << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
    for (const auto& p : curve.points)
        if (std::isfinite(p.energy))
            svg << sx(p.m) << ',' << sy(p.energy) << ' ';
    svg << "\"/>\n";
    for (const auto& p : curve.points)
        if (std::isfinite(p.energy))
            svg << "<circle cx=\"" << sx(p.m) << "\" cy=\"" << sy(p.energy) << "\" r=\"3\" fill=\""
                << (p.converged ? "steelblue" : "crimson") << "\"/>\n";
    svg << "</svg>\n";
    return svg.str();
}

} // namespace dnls
