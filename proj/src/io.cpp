#include "polyvol/io.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace polyvol {

namespace {

using json = nlohmann::json;

std::ifstream open_in(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "' for reading");
    return in;
}

std::ofstream open_out(const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw InputError("cannot open '" + path + "' for writing");
    return out;
}

std::string trim(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, sep)) out.push_back(trim(cell));
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

bool parse_double(const std::string& s, double& v)
{
    if (s.empty()) return false;
    char* end = nullptr;
    v = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size() && std::isfinite(v);
}

// --- JSON ------------------------------------------------------------------

void write_row(std::ostream& out, const auto& row)
{
    out << '[';
    for (Index j = 0; j < row.size(); ++j) out << (j ? ", " : "") << format_exact(row(j));
    out << ']';
}

void write_matrix(std::ostream& out, const char* key, const Mat<double>& M)
{
    out << ",\n  \"" << key << "\": [";
    for (Index i = 0; i < M.rows(); ++i) {
        out << (i ? ",\n    " : "\n    ");
        write_row(out, M.row(i));
    }
    out << "\n  ]";
}

Mat<double> read_matrix(const json& doc, const char* key)
{
    const json& a = doc.at(key);
    const std::string where = std::string("field '") + key + "'";
    if (!a.is_array() || a.empty()) throw InputError(where + " must be a non-empty array of rows");
    const std::size_t cols = a[0].is_array() ? a[0].size() : 0;
    if (cols == 0) throw InputError(where + " must be a non-empty array of rows");
    Mat<double> M(Index(a.size()), Index(cols));
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i].is_array()) throw InputError(where + ": row " + std::to_string(i + 1) + " is not an array");
        if (a[i].size() != cols)
            throw InputError("ragged array in " + where + ": row " + std::to_string(i + 1) + " has " +
                             std::to_string(a[i].size()) + " entries, expected " + std::to_string(cols));
        for (std::size_t j = 0; j < cols; ++j) {
            if (!a[i][j].is_number())
                throw InputError(where + ": entry (" + std::to_string(i + 1) + ", " + std::to_string(j + 1) +
                                 ") is not a number");
            M(Index(i), Index(j)) = a[i][j].get<double>();
        }
    }
    return M;
}

Vec<double> read_array(const json& doc, const char* key)
{
    const json& a = doc.at(key);
    const std::string where = std::string("field '") + key + "'";
    if (!a.is_array()) throw InputError(where + " must be an array of numbers");
    Vec<double> v(Index(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i].is_number()) throw InputError(where + ": entry " + std::to_string(i + 1) + " is not a number");
        v(Index(i)) = a[i].get<double>();
    }
    return v;
}

}  // namespace

std::string format_scientific(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6e", v);
    return buf;
}

std::string format_exact(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string polytope_to_json(const Polytope<double>& P)
{
    std::ostringstream out;
    std::visit(
        [&](const auto& q) {
            using Q = std::decay_t<decltype(q)>;
            if constexpr (std::is_same_v<Q, HPolytope<double>>) {
                out << "{\n  \"type\": \"H\"";
                write_matrix(out, "A", q.A);
                out << ",\n  \"b\": ";
                write_row(out, q.b);
            } else if constexpr (std::is_same_v<Q, VPolytope<double>>) {
                out << "{\n  \"type\": \"V\"";
                write_matrix(out, "V", q.V);
            } else if constexpr (std::is_same_v<Q, Zonotope<double>>) {
                out << "{\n  \"type\": \"Z\"";
                write_matrix(out, "G", q.G);
            } else {
                out << "{\n  \"type\": \"Vint\"";
                write_matrix(out, "V1", q.V1);
                write_matrix(out, "V2", q.V2);
            }
            if (q.known_volume) out << ",\n  \"volume\": " << format_exact(*q.known_volume);
        },
        P);
    out << "\n}\n";
    return out.str();
}

Polytope<double> polytope_from_json(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) throw InputError("polytope file must hold a JSON object");
    if (!doc.contains("type") || !doc["type"].is_string()) throw InputError("polytope file: missing string field 'type'");
    const std::string type = doc["type"];

    static const std::set<std::string> known{"type", "A", "b", "V", "G", "V1", "V2", "volume"};
    std::set<std::string> wanted;
    if (type == "H")
        wanted = {"A", "b"};
    else if (type == "V")
        wanted = {"V"};
    else if (type == "Z")
        wanted = {"G"};
    else if (type == "Vint")
        wanted = {"V1", "V2"};
    else
        throw InputError("polytope file: unknown type '" + type + "' (expected H, V, Z or Vint)");
    for (const auto& [key, value] : doc.items()) {
        if (!known.count(key)) throw InputError("polytope file: unknown field '" + key + "'");
        if (key != "type" && key != "volume" && !wanted.count(key))
            throw InputError("polytope file: type mismatch, field '" + key + "' does not belong to type " + type);
    }
    for (const auto& key : wanted)
        if (!doc.contains(key)) throw InputError("polytope file: type " + type + " requires field '" + key + "'");

    std::optional<double> vol;
    if (doc.contains("volume")) {
        if (!doc["volume"].is_number()) throw InputError("polytope file: field 'volume' is not a number");
        vol = doc["volume"].get<double>();
    }
    if (type == "H") {
        Mat<double> A = read_matrix(doc, "A");
        Vec<double> b = read_array(doc, "b");
        return HPolytope<double>(std::move(A), std::move(b), vol);
    }
    if (type == "V") return VPolytope<double>(read_matrix(doc, "V"), vol);
    if (type == "Z") return Zonotope<double>(read_matrix(doc, "G"), vol);
    return VPolyIntersection<double>(read_matrix(doc, "V1"), read_matrix(doc, "V2"), vol);
}

Polytope<double> read_polytope(const std::string& path)
{
    std::ifstream in = open_in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return polytope_from_json(ss.str());
}

void write_polytope(const Polytope<double>& P, const std::string& path)
{
    std::ofstream out = open_out(path);
    out << polytope_to_json(P);
    if (!out) throw InputError("failed writing '" + path + "'");
}

ReturnsMatrix parse_returns(std::istream& in, int skip_rows, const std::vector<int>& drop_cols)
{
    require(skip_rows >= 0, "returns: skip_rows must be non-negative");
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_of;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno <= std::size_t(skip_rows)) continue;
        if (trim(line).empty()) continue;
        rows.push_back(split(line, ','));
        line_of.push_back(lineno);
    }
    ReturnsMatrix R;
    if (rows.empty()) throw InputError("returns: no data rows");
    const std::size_t cols = rows[0].size();
    if (cols < 2) throw InputError("returns: need a date column and at least one return column");

    std::vector<bool> keep(cols, true);
    for (int c : drop_cols) {
        const long idx = c < 0 ? long(cols) + c + 1 : c;  // 1-based
        if (idx < 1 || idx > long(cols)) throw InputError("returns: drop column " + std::to_string(c) + " out of range");
        if (idx == 1) throw InputError("returns: column 1 holds the dates and cannot be dropped");
        keep[std::size_t(idx - 1)] = false;
    }
    std::vector<std::size_t> kept;
    for (std::size_t c = 1; c < cols; ++c)
        if (keep[c]) kept.push_back(c);
    if (kept.empty()) throw InputError("returns: every return column was dropped");

    R.values.resize(Index(rows.size()), Index(kept.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != cols)
            throw InputError("returns: ragged row at line " + std::to_string(line_of[r]) + ": " +
                             std::to_string(rows[r].size()) + " columns, expected " + std::to_string(cols));
        R.dates.push_back(rows[r][0]);
        for (std::size_t k = 0; k < kept.size(); ++k) {
            double v;
            const std::string& cell = rows[r][kept[k]];
            if (!parse_double(cell, v))
                throw InputError("returns: line " + std::to_string(line_of[r]) + ", column " +
                                 std::to_string(kept[k] + 1) + ": cannot parse '" + cell + "' as a number");
            R.values(Index(r), Index(k)) = v;
        }
    }
    return R;
}

ReturnsMatrix read_returns(const std::string& path, int skip_rows, const std::vector<int>& drop_cols)
{
    std::ifstream in = open_in(path);
    return parse_returns(in, skip_rows, drop_cols);
}

void write_points(std::ostream& out, const Mat<double>& points)
{
    for (Index i = 0; i < points.rows(); ++i) {
        for (Index j = 0; j < points.cols(); ++j) out << (j ? "," : "") << format_exact(points(i, j));
        out << '\n';
    }
}

void write_points(const std::string& path, const Mat<double>& points)
{
    std::ofstream out = open_out(path);
    write_points(out, points);
}

void write_timeline(std::ostream& out, const MarketTimeline& tl)
{
    for (std::size_t t = 0; t < tl.indicators.size(); ++t) {
        const std::string date = t < tl.dates.size() ? tl.dates[t] : std::to_string(t + 1);
        out << date << ',' << format_exact(tl.indicators[t]) << ',' << to_string(tl.states[t]) << '\n';
    }
}

void write_timeline(const std::string& path, const MarketTimeline& tl)
{
    std::ofstream out = open_out(path);
    write_timeline(out, tl);
}

Dag parse_edges(std::istream& in, Index nodes)
{
    require(nodes >= 1, "edges: node count must be positive");
    Dag g;
    g.n = nodes;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        std::vector<std::string> cells = split(line, ',');
        if (cells.size() != 2)
            throw InputError("edges: line " + std::to_string(lineno) + " must hold exactly two node numbers");
        long e[2];
        for (int k = 0; k < 2; ++k) {
            char* end = nullptr;
            e[k] = std::strtol(cells[std::size_t(k)].c_str(), &end, 10);
            if (cells[std::size_t(k)].empty() || *end != '\0')
                throw InputError("edges: line " + std::to_string(lineno) + ": '" + cells[std::size_t(k)] +
                                 "' is not a node number");
            if (e[k] < 1 || e[k] > nodes)
                throw InputError("edges: line " + std::to_string(lineno) + ": node " + std::to_string(e[k]) +
                                 " outside 1.." + std::to_string(nodes));
        }
        g.edges.emplace_back(Index(e[0] - 1), Index(e[1] - 1));
    }
    return g;
}

Dag read_edges(const std::string& path, Index nodes)
{
    std::ifstream in = open_in(path);
    return parse_edges(in, nodes);
}

Vec<double> read_vector(const std::string& path)
{
    std::ifstream in = open_in(path);
    std::vector<double> vals;
    std::string line;
    while (std::getline(in, line))
        for (const std::string& cell : split(line, ',')) {
            if (cell.empty()) continue;
            double v;
            if (!parse_double(cell, v)) throw InputError("'" + path + "': cannot parse '" + cell + "' as a number");
            vals.push_back(v);
        }
    if (vals.empty()) throw InputError("'" + path + "' holds no numbers");
    return Eigen::Map<Vec<double>>(vals.data(), Index(vals.size()));
}

}  // namespace polyvol
