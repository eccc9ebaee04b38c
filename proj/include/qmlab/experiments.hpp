#pragma once

#include "qmlab/analysis.hpp"
#include "qmlab/quasimode.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace qmlab {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Flat INI-style configuration: "section.key" -> raw string.
struct ExperimentConfig {
    std::string experiment;
    std::uint64_t seed = 20240501;
    std::map<std::string, std::string> values;
    std::filesystem::path source;

    bool has(const std::string& key) const { return values.count(key) > 0; }
    std::string get(const std::string& key, const std::string& fallback) const;
    std::string require(const std::string& key) const;
    double number(const std::string& key, double fallback) const;
    long integer(const std::string& key, long fallback) const;
    std::vector<std::string> list(const std::string& key, const std::string& fallback) const;

    // <section>.h (explicit list) or <section>.h_start, h_stop, dyadic_step; strictly decreasing
    std::vector<double> h_sweep(const std::string& section) const;
    std::vector<PExp> p_list(const std::string& fallback) const;
};

ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& text);
// "2^-4", "0.0625", "1/16"
double parse_real(const std::string& s);

using Cell = std::variant<long long, double, std::string>;

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    void add(std::vector<Cell> row) { rows.push_back(std::move(row)); }
};

struct Verdict {
    std::string name;
    double measured = 0, predicted = 0, tolerance = 0;
    std::string comparison;  // "abs_diff", "at_most", "at_least", "exact"
    bool pass = false;
    std::string note;
};

struct ExperimentReport {
    static constexpr int schema_version = 1;
    std::string experiment;
    std::uint64_t seed = 0;
    std::map<std::string, std::string> config;
    std::vector<Verdict> verdicts;
    std::vector<Table> tables;
    bool all_pass() const;

    Verdict& check_abs(const std::string& name, double measured, double predicted, double tol);
    Verdict& check_at_most(const std::string& name, double measured, double bound);
    Verdict& check_at_least(const std::string& name, double measured, double bound);
    Verdict& check_exact(const std::string& name, bool ok, double measured = 0, double predicted = 0);
};

struct ExperimentInfo {
    std::string id, description, verifies;
};
std::vector<ExperimentInfo> list_experiments();

ExperimentReport run_experiment(const ExperimentConfig& cfg);

void write_csv(const Table& t, std::ostream& os);
std::string format_real(double v);
// report.json plus one CSV per table
void write_report(const ExperimentReport& r, const std::filesystem::path& dir);

// ---- measurement helpers shared with the acceptance checks ----

// |T_chi| on a product grid: margin times the example's flat box, spacing at most
// 2 pi h / (8 max|xi_d|) per axis, odd counts so that 0 is a node. The shell is the
// outer 10% of each axis.
struct LpGrid {
    std::vector<double> absval, weights;
    std::vector<char> shell;
    std::vector<long> points;
};
LpGrid sample_lp_grid(const ExampleSpec& e, const CutoffGrid& chi, double margin);
LpResult measure_lp(const LpGrid& g, const PExp& p);

// Predicted log-log slope of ||T_chi||_p against h for the example.
double predicted_slope(const ExampleSpec& e, const PExp& p);

// Entry point of the command-line runner; returns the process exit code.
int cli_main(int argc, char** argv);

}  // namespace qmlab
