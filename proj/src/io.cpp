#include "stripe/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "stripe/errors.hpp"

namespace stripe::io {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(s);
    while (std::getline(is, cell, sep)) out.push_back(trim(cell));
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

double parse_number(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(what + ": bad number '" + s + "'");
    }
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

std::string format_sci(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17e", x);
    return buf;
}

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void CsvTable::add_row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(format_sci(v));
    add_cells(cells);
}

void CsvTable::add_cells(const std::vector<std::string>& cells) {
    if (cells.size() != columns_.size()) throw Error("CsvTable: row width does not match the header");
    std::string row = std::to_string(schema_version);
    for (const auto& c : cells) row += "," + c;
    rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
    std::string out = "schema_version";
    for (const auto& c : columns_) out += "," + c;
    out += "\n";
    for (const auto& r : rows_) out += r + "\n";
    return out;
}

std::vector<double> CsvData::column(const std::string& name) const {
    std::size_t idx = columns.size();
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) idx = i;
    if (idx == columns.size()) throw ConfigError("csv: no column '" + name + "'");
    std::vector<double> out;
    for (const auto& r : rows) out.push_back(parse_number(r.at(idx), "csv column " + name));
    return out;
}

CsvData parse_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line)) throw ConfigError("csv: empty input");
    auto header = split(line, ',');
    if (header.empty() || header[0] != "schema_version") throw ConfigError("csv: first column must be schema_version");
    CsvData d;
    d.columns.assign(header.begin() + 1, header.end());
    while (std::getline(is, line)) {
        if (trim(line).empty()) continue;
        auto cells = split(line, ',');
        if (cells.size() != header.size()) throw ConfigError("csv: ragged row");
        if (cells[0] != std::to_string(schema_version))
            throw ConfigError("csv: unsupported schema_version '" + cells[0] + "'");
        d.rows.emplace_back(cells.begin() + 1, cells.end());
    }
    return d;
}

CsvData read_csv(const std::filesystem::path& path) { return parse_csv(slurp(path)); }

nlohmann::json versioned(nlohmann::json j) {
    j["schema_version"] = schema_version;
    return j;
}

void check_version(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("schema_version")) throw ConfigError("json: missing schema_version");
    const auto& v = j["schema_version"];
    if (!v.is_number_integer() || v.get<int>() != schema_version)
        throw ConfigError("json: unsupported schema_version " + v.dump());
}

nlohmann::json read_json(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(slurp(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    check_version(j);
    return j;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw Error("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error("cannot move " + tmp.string() + " into place");
    }
}

void ArtifactSet::add(const std::string& name, std::string content) { files_[name] = std::move(content); }

void ArtifactSet::add_json(const std::string& name, const nlohmann::json& j) {
    add(name, versioned(j).dump(2) + "\n");
}

void ArtifactSet::add_csv(const std::string& name, const CsvTable& t) { add(name, t.str()); }

void ArtifactSet::commit(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    for (const auto& [name, content] : files_) write_atomic(dir / name, content);
}

const std::vector<RunConfig::Key>& RunConfig::keys() {
    static const std::vector<Key> table = {
        {"lambda", "1", "reaction strength"},
        {"a", "0.3", "unstable zero of f, in (0, 1/2)"},
        {"alpha", "0.5", "absorption rate outside the stripe"},
        {"R", "3.5", "stripe half-thickness"},
        {"s_max", "2", "upper end of the shooting range"},
        {"n_samples", "400", "uniform shooting samples before refinement"},
        {"grid_intervals", "2048", "profile grid intervals on [-R, R]"},
        {"width", "1e-6", "bisection width for r0, r1, r2"},
        {"r0", "auto", "precomputed r0 (auto: compute)"},
        {"r1", "auto", "precomputed r1 (auto: compute)"},
        {"sweep_R", "auto", "comma list of R values (auto: sweep_R_min..max)"},
        {"sweep_R_min", "2", "first sweep R"},
        {"sweep_R_max", "8", "last sweep R"},
        {"sweep_steps", "61", "number of sweep points"},
        {"sim1d_nodes", "1025", "1D grid nodes"},
        {"sim1d_T", "500", "1D horizon"},
        {"sim1d_dt", "0.05", "1D time step (must not exceed 1/max|f'|)"},
        {"sim1d_init", "scaled_vm", "scaled_vm | unstable_minus | unstable_plus | constant"},
        {"sim1d_scale", "1.2", "factor for scaled_vm, value for constant"},
        {"sim1d_profile", "1", "profile index for unstable_minus / unstable_plus"},
        {"sim1d_eps", "1e-3", "perturbation size along the principal eigenfunction"},
        {"sim1d_snapshot_every", "100", "steps between stored 1D snapshots"},
        {"sim2d_nx", "400", "x intervals"},
        {"sim2d_ny", "200", "y intervals"},
        {"sim2d_Lx", "80", "domain length"},
        {"sim2d_Ly", "0", "domain half-height (0: R + 8/sqrt(alpha))"},
        {"sim2d_T", "150", "2D horizon"},
        {"sim2d_dt", "0.05", "2D time step"},
        {"sim2d_scheme", "adi", "adi | explicit"},
        {"sim2d_track_every", "10", "steps between front samples"},
        {"sim2d_snapshot_every", "0", "steps between stored 2D snapshots (0: final only)"},
        {"regime_R", "auto", "comma list of R (auto: 0.8 r0, (r0+r1)/2, 1.5 r1)"},
        {"regime_T", "40", "protocol horizon for classification"},
    };
    return table;
}

RunConfig::RunConfig() {
    for (const auto& k : keys()) values_[k.name] = k.default_value;
}

void RunConfig::assign(const std::string& key, const std::string& value, const std::string& where) {
    if (!values_.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    if (value.empty()) throw ConfigError(where + ": empty value for '" + key + "'");
    values_[key] = value;
}

void RunConfig::merge_text(const std::string& text, const std::string& origin) {
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string where = origin + ":" + std::to_string(lineno);
        if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
        assign(trim(line.substr(0, eq)), trim(line.substr(eq + 1)), where);
    }
}

void RunConfig::set(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + assignment + "'");
    assign(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)), "--set");
}

std::string RunConfig::get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown key '" + key + "'");
    return it->second;
}

double RunConfig::get_double(const std::string& key) const { return parse_number(get(key), key); }

std::size_t RunConfig::get_size(const std::string& key) const {
    const double v = get_double(key);
    if (!(v >= 0.0) || v != std::floor(v)) throw ConfigError(key + ": expected a non-negative integer");
    return static_cast<std::size_t>(v);
}

std::vector<double> RunConfig::get_list(const std::string& key) const {
    std::vector<double> out;
    for (const auto& cell : split(get(key), ',')) out.push_back(parse_number(cell, key));
    if (out.empty()) throw ConfigError(key + ": empty list");
    return out;
}

std::string RunConfig::str() const {
    std::string out;
    for (const auto& k : keys()) out += k.name + " = " + values_.at(k.name) + "\n";
    return out;
}

}  // namespace stripe::io
