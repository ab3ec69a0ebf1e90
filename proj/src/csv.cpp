#include "medianscape/csv.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace medianscape {

std::string format_g17(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::string tok;
    std::istringstream is(line);
    while (std::getline(is, tok, sep))
        out.push_back(tok);
    return out;
}

std::string trim(std::string s)
{
    const auto notspace = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
    s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
    return s;
}

double parse_double(const std::string& tok, std::size_t line)
{
    try {
        std::size_t pos = 0;
        const std::string t = trim(tok);
        const double v = std::stod(t, &pos);
        if (pos != t.size())
            throw ParseError("trailing characters in number '" + tok + "'", line);
        return v;
    } catch (const ParseError&) {
        throw;
    } catch (...) {
        throw ParseError("malformed number '" + tok + "'", line);
    }
}

long parse_id(const std::string& tok, std::size_t line)
{
    try {
        return std::stol(trim(tok));
    } catch (...) {
        throw ParseError("malformed id '" + tok + "'", line);
    }
}

std::ifstream open_or_throw(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open '" + path + "'", 0);
    return in;
}

} // namespace

MetricMeasureSpace read_space_csv(const std::string& path, double snowflake)
{
    std::ifstream in = open_or_throw(path);
    std::string line;
    std::size_t lno = 0;

    if (!std::getline(in, line))
        throw ParseError("empty space file", 1);
    ++lno;
    const auto header = split(trim(line), ',');
    if (header.size() < 3 || trim(header.front()) != "id" || trim(header.back()) != "mass")
        throw ParseError("expected header id,x1[,x2...],mass", lno);
    const int dim = static_cast<int>(header.size()) - 2;

    std::vector<std::pair<long, std::vector<double>>> rows;
    while (std::getline(in, line)) {
        ++lno;
        if (trim(line).empty())
            continue;
        const auto toks = split(line, ',');
        if (toks.size() != header.size())
            throw ParseError("wrong column count", lno);
        std::vector<double> vals;
        for (std::size_t k = 1; k < toks.size(); ++k)
            vals.push_back(parse_double(toks[k], lno));
        rows.emplace_back(parse_id(toks[0], lno), std::move(vals));
    }
    std::sort(rows.begin(), rows.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (rows[i].first != static_cast<long>(i))
            throw ParseError("ids must be 0..n-1 without gaps", 0);

    std::vector<double> coords, masses;
    for (auto& [id, vals] : rows) {
        for (int d = 0; d < dim; ++d)
            coords.push_back(vals[static_cast<std::size_t>(d)]);
        masses.push_back(vals.back());
    }
    return MetricMeasureSpace::from_coords(std::move(coords), dim, std::move(masses),
                                           snowflake);
}

void write_space_csv(const MetricMeasureSpace& space, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw ParseError("cannot write '" + path + "'", 0);
    out << "id";
    for (int d = 0; d < space.dim(); ++d)
        out << ",x" << d + 1;
    out << ",mass\n";
    for (std::size_t i = 0; i < space.size(); ++i) {
        out << i;
        for (int d = 0; d < space.dim(); ++d)
            out << ',' << format_g17(space.coord(static_cast<PointId>(i), d));
        out << ',' << format_g17(space.mass(static_cast<PointId>(i))) << '\n';
    }
}

MetricMeasureSpace read_space_table(const std::string& dist_path, const std::string& mass_path)
{
    std::vector<double> masses;
    {
        std::ifstream in = open_or_throw(mass_path);
        std::string line;
        std::size_t lno = 0;
        std::vector<std::pair<long, double>> rows;
        while (std::getline(in, line)) {
            ++lno;
            const std::string t = trim(line);
            if (t.empty() || t == "id,mass")
                continue;
            const auto toks = split(line, ',');
            if (toks.size() != 2)
                throw ParseError("expected id,mass", lno);
            rows.emplace_back(parse_id(toks[0], lno), parse_double(toks[1], lno));
        }
        std::sort(rows.begin(), rows.end());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].first != static_cast<long>(i))
                throw ParseError("mass ids must be 0..n-1", 0);
            masses.push_back(rows[i].second);
        }
    }
    const std::size_t n = masses.size();
    std::vector<double> table(n * n, 0.0);
    {
        std::ifstream in = open_or_throw(dist_path);
        std::string line;
        std::size_t lno = 0;
        while (std::getline(in, line)) {
            ++lno;
            const std::string t = trim(line);
            if (t.empty() || t == "id_a,id_b,dist")
                continue;
            const auto toks = split(line, ',');
            if (toks.size() != 3)
                throw ParseError("expected id_a,id_b,dist", lno);
            const long a = parse_id(toks[0], lno), b = parse_id(toks[1], lno);
            if (a < 0 || b < 0 || a >= static_cast<long>(n) || b >= static_cast<long>(n))
                throw ParseError("id out of range", lno);
            const double d = parse_double(toks[2], lno);
            table[static_cast<std::size_t>(a) * n + static_cast<std::size_t>(b)] = d;
            table[static_cast<std::size_t>(b) * n + static_cast<std::size_t>(a)] = d;
        }
    }
    return MetricMeasureSpace::from_table(std::move(table), std::move(masses));
}

namespace {

std::vector<double> read_id_value(const std::string& path, std::size_t expected,
                                  const char* what)
{
    std::ifstream in = open_or_throw(path);
    std::string line;
    std::size_t lno = 0;
    std::vector<std::pair<long, double>> rows;
    while (std::getline(in, line)) {
        ++lno;
        const std::string t = trim(line);
        if (t.empty())
            continue;
        if (lno == 1 && t.find_first_not_of("0123456789,.-+eE ") != std::string::npos)
            continue; // header
        const auto toks = split(line, ',');
        if (toks.size() != 2)
            throw ParseError(std::string("expected id,") + what, lno);
        rows.emplace_back(parse_id(toks[0], lno), parse_double(toks[1], lno));
    }
    std::sort(rows.begin(), rows.end());
    if (rows.size() != expected)
        throw ParseError(std::string(what) + " row count does not match the space", 0);
    std::vector<double> out;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].first != static_cast<long>(i))
            throw ParseError("ids must be 0..n-1 and match the space file", 0);
        out.push_back(rows[i].second);
    }
    return out;
}

} // namespace

std::vector<double> read_function_csv(const std::string& path, std::size_t expected_size)
{
    return read_id_value(path, expected_size, "value");
}

void write_function_csv(const std::string& path, const std::vector<double>& values)
{
    std::ofstream out(path);
    if (!out)
        throw ParseError("cannot write '" + path + "'", 0);
    out << "id,value\n";
    for (std::size_t i = 0; i < values.size(); ++i)
        out << i << ',' << format_g17(values[i]) << '\n';
}

std::vector<double> read_exponent_csv(const std::string& path, std::size_t expected_size)
{
    return read_id_value(path, expected_size, "p");
}

QuasinormSpec read_spec_file(const std::string& path, const MetricMeasureSpace* space)
{
    std::ifstream in = open_or_throw(path);
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t lno = 0;
    while (std::getline(in, line)) {
        ++lno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#')
            continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ParseError("expected key=value", lno);
        kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
    }
    if (!kv.count("variant"))
        throw ParseError("spec file missing 'variant'", 0);
    const std::string variant = kv["variant"];
    auto num = [&](const std::string& key) {
        if (!kv.count(key))
            throw ParseError("spec file missing '" + key + "'", 0);
        const std::string v = kv[key];
        if (v == "inf")
            return kInf;
        return parse_double(v, 0);
    };
    if (variant == "lp")
        return QuasinormSpec::lp(num("p"));
    if (variant == "lorentz")
        return QuasinormSpec::lorentz(num("p"), num("q"));
    if (variant == "orlicz") {
        if (kv.count("phi_table")) {
            std::ifstream tf(kv["phi_table"]);
            if (!tf)
                throw ParseError("cannot open '" + kv["phi_table"] + "'", 0);
            std::vector<std::pair<double, double>> pts;
            std::string row;
            std::size_t rno = 0;
            while (std::getline(tf, row)) {
                ++rno;
                const std::string t = trim(row);
                if (t.empty())
                    continue;
                const auto toks = split(t, ',');
                if (toks.size() != 2)
                    throw ParseError("phi table expects t,phi", rno);
                pts.emplace_back(parse_double(toks[0], rno), parse_double(toks[1], rno));
            }
            return QuasinormSpec::orlicz(OrliczFunction::from_table(std::move(pts)));
        }
        if (!kv.count("phi"))
            throw ParseError("orlicz spec needs 'phi' or 'phi_table'", 0);
        const std::string phi = kv["phi"];
        if (phi.rfind("power_log", 0) == 0)
            return QuasinormSpec::orlicz(OrliczFunction::power_log(
                parse_double(phi.substr(10, phi.size() - 11), 0)));
        if (phi.rfind("power", 0) == 0)
            return QuasinormSpec::orlicz(
                OrliczFunction::power(parse_double(phi.substr(6, phi.size() - 7), 0)));
        if (phi == "exp_minus_one")
            return QuasinormSpec::orlicz(OrliczFunction::exp_minus_one());
        throw ParseError("unknown phi '" + phi + "'", 0);
    }
    if (variant == "varexp") {
        if (!space)
            throw ParseError("varexp spec needs a space to bind p(.) to", 0);
        if (!kv.count("pfile"))
            throw ParseError("varexp spec needs 'pfile'", 0);
        auto p = read_exponent_csv(kv["pfile"], space->size());
        return QuasinormSpec::varexp(make_exponent_field(*space, std::move(p)));
    }
    throw ParseError("unknown variant '" + variant + "'", 0);
}

} // namespace medianscape
