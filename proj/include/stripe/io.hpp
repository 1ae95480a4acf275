#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace stripe::io {

inline constexpr int schema_version = 1;

/// Full double precision, scientific notation.
std::string format_sci(double x);

/// CSV table whose first column is always `schema_version`.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> columns);

    void add_row(const std::vector<double>& values);
    /// Row given as already formatted cells (for mixed text and numbers).
    void add_cells(const std::vector<std::string>& cells);
    std::string str() const;

    const std::vector<std::string>& columns() const { return columns_; }
    std::size_t rows() const { return rows_.size(); }

private:
    std::vector<std::string> columns_;
    std::vector<std::string> rows_;
};

struct CsvData {
    std::vector<std::string> columns;  ///< without schema_version
    std::vector<std::vector<std::string>> rows;
    /// Column by name, parsed as numbers.
    std::vector<double> column(const std::string& name) const;
};

/// Parses CSV text produced by CsvTable. Throws ConfigError on a missing or unknown schema version.
CsvData parse_csv(const std::string& text);
CsvData read_csv(const std::filesystem::path& path);

/// Adds schema_version to a JSON object.
nlohmann::json versioned(nlohmann::json j);
/// Throws ConfigError unless j.schema_version is the supported version.
void check_version(const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

/// Writes through a temporary file in the same directory and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Collects artifacts in memory; commit() writes them all (each one atomically). Nothing
/// touches the disk before commit, so a failing command leaves no partial artifacts.
class ArtifactSet {
public:
    void add(const std::string& name, std::string content);
    void add_json(const std::string& name, const nlohmann::json& j);
    void add_csv(const std::string& name, const CsvTable& t);
    void commit(const std::filesystem::path& dir) const;
    const std::map<std::string, std::string>& files() const { return files_; }

private:
    std::map<std::string, std::string> files_;
};

/// Flat key = value configuration with a fixed key set. Every known key has a documented
/// default; unknown keys are rejected.
class RunConfig {
public:
    struct Key {
        std::string name;
        std::string default_value;
        std::string doc;
    };
    static const std::vector<Key>& keys();

    RunConfig();
    /// Applies `key = value` lines (# comments allowed).
    void merge_text(const std::string& text, const std::string& origin = "config");
    /// Applies one `key=value` override.
    void set(const std::string& assignment);

    std::string get(const std::string& key) const;
    double get_double(const std::string& key) const;
    std::size_t get_size(const std::string& key) const;
    /// Comma-separated list of numbers.
    std::vector<double> get_list(const std::string& key) const;
    bool is_auto(const std::string& key) const { return get(key) == "auto"; }

    /// Resolved configuration, every key, in key-table order.
    std::string str() const;

private:
    void assign(const std::string& key, const std::string& value, const std::string& where);
    std::map<std::string, std::string> values_;
};

}  // namespace stripe::io
