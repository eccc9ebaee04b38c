#include "qmlab/experiments.hpp"

#include "qmlab/symbols.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <regex>
#include <sstream>

namespace qmlab {

namespace {

constexpr int kExitFail = 1, kExitConfig = 2, kExitRefused = 3, kExitInternal = 4;

std::string read_symbol_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read symbol file '" + path + "'");
    std::string line, text;
    while (std::getline(is, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        text += line + ' ';
    }
    return text;
}

int max_variable(const std::string& text) {
    int m = 0;
    static const std::regex var("x([0-9]+)");
    for (auto it = std::sregex_iterator(text.begin(), text.end(), var); it != std::sregex_iterator(); ++it)
        m = std::max(m, std::stoi((*it)[1]));
    return m;
}

void print_verdicts(const ExperimentReport& r) {
    for (const auto& v : r.verdicts) {
        std::cout << (v.pass ? "PASS  " : "FAIL  ") << v.name << "  measured=" << format_real(v.measured)
                  << " predicted=" << format_real(v.predicted);
        if (v.comparison == "abs_diff") std::cout << " tolerance=" << format_real(v.tolerance);
        else std::cout << " (" << v.comparison << ")";
        if (!v.note.empty()) std::cout << "  [" << v.note << "]";
        std::cout << '\n';
    }
}

int do_run(const std::string& config, const std::string& out) {
    const auto cfg = load_config(config);
    const auto report = run_experiment(cfg);
    std::filesystem::path dir = out.empty() ? std::filesystem::path("out") / std::filesystem::path(config).stem()
                                            : std::filesystem::path(out);
    write_report(report, dir);
    print_verdicts(report);
    std::cout << (report.all_pass() ? "all verdicts pass" : "some verdicts fail") << "; report in " << dir.string()
              << '\n';
    return report.all_pass() ? 0 : kExitFail;
}

int do_list(const std::string& filter) {
    Table t{"experiments", {"id", "description", "verifies"}, {}};
    for (const auto& e : list_experiments()) {
        if (!filter.empty() && e.id.find(filter) == std::string::npos &&
            e.description.find(filter) == std::string::npos && e.verifies.find(filter) == std::string::npos)
            continue;
        std::cout << e.id << "  " << e.description << "  -- " << e.verifies << '\n';
    }
    return 0;
}

int do_delta(const std::string& family, int n, const std::string& p, int k, const std::string& out) {
    ExponentQuery q;
    PExp pe;
    try {
        q.family = parse_family(family);
        pe = PExp::parse(p);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    q.n = n;
    q.p = pe;
    q.extra = k;
    Rational d;
    try {
        d = exponent(q);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    std::ostringstream exact;
    exact << d;
    Table t{"delta", {"family", "n", "p", "k", "delta", "delta_exact"}, {}};
    t.add({family_name(q.family), (long long)n, pe.to_string(), (long long)k, to_double(d), exact.str()});
    write_csv(t, std::cout);
    if (!out.empty()) {
        std::filesystem::create_directories(out);
        std::ofstream os(std::filesystem::path(out) / "delta.csv", std::ios::binary);
        write_csv(t, os);
    }
    return 0;
}

int do_contact(const std::string& f1, const std::string& f2, int max_order, int directions, const std::string& out) {
    const std::string t1 = read_symbol_file(f1), t2 = read_symbol_file(f2);
    const int dim = std::max(max_variable(t1), max_variable(t2));
    if (dim < 2) throw ConfigError("symbols need at least the variables x1, x2");
    PolySymbol p1, p2;
    try {
        p1 = PolySymbol::parse(t1, dim);
        p2 = PolySymbol::parse(t2, dim);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    const auto g1 = graph_factor(p1), g2 = graph_factor(p2);
    if (!g1.valid) throw ConfigError("p1: " + g1.note);
    if (!g2.valid) throw ConfigError("p2: " + g2.note);
    const auto prof = contact_profile(g1.a, g2.a, sample_directions(dim - 1, directions), max_order);
    Table t{"contact", {"direction", "order", "leading_coefficient", "unit_leading_coefficient", "outside_hypotheses"},
            {}};
    for (const auto& r : prof.reports) {
        std::ostringstream dir, lc;
        for (std::size_t i = 0; i < r.direction.size(); ++i) dir << (i ? " " : "") << r.direction[i];
        lc << r.leading_coefficient;
        t.add({dir.str(), r.order ? Cell((long long)*r.order) : Cell(std::string("inf")), lc.str(),
               r.unit_leading_coefficient, (long long)r.outside_hypotheses});
    }
    write_csv(t, std::cout);
    std::cout << "# uniform=" << (prof.uniform ? "yes" : "no");
    if (prof.common_order) std::cout << " order=" << *prof.common_order;
    std::cout << '\n';
    if (!out.empty()) {
        std::filesystem::create_directories(out);
        std::ofstream os(std::filesystem::path(out) / "contact.csv", std::ios::binary);
        write_csv(t, os);
    }
    return 0;
}

}  // namespace

int cli_main(int argc, char** argv) {
    CLI::App app{"qmlab: joint quasimode experiments"};
    app.require_subcommand(1);
    std::string out;
    app.add_option("--out", out, "output directory");

    std::string config;
    auto* run = app.add_subcommand("run", "run an experiment configuration");
    run->add_option("config", config, "configuration file")->required();
    run->fallthrough();

    std::string filter;
    auto* list = app.add_subcommand("list", "list built-in experiments");
    list->add_option("filter", filter, "substring filter");
    list->fallthrough();

    std::string family = "contact", p = "inf";
    int n = 2, k = 1;
    auto* delta = app.add_subcommand("delta", "evaluate an exponent formula");
    delta->add_option("--family", family, "sogge | submanifold | transverse | contact");
    delta->add_option("--n", n, "dimension");
    delta->add_option("--p", p, "Lebesgue exponent, rational or inf");
    delta->add_option("--k", k, "contact order, submanifold dimension or operator count");
    delta->fallthrough();

    std::string f1, f2;
    int max_order = 12, directions = 64;
    auto* contact = app.add_subcommand("contact", "contact profile of two symbols in graph form");
    contact->add_option("--p1", f1, "file holding the first symbol")->required();
    contact->add_option("--p2", f2, "file holding the second symbol")->required();
    contact->add_option("--max-order", max_order, "largest order searched");
    contact->add_option("--directions", directions, "minimum number of sampled directions");
    contact->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (run->parsed()) return do_run(config, out);
        if (list->parsed()) return do_list(filter);
        if (delta->parsed()) return do_delta(family, n, p, k, out);
        if (contact->parsed()) return do_contact(f1, f2, max_order, directions, out);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ResolutionError& e) {
        std::string what = e.what();
        if (what.starts_with(e.module() + ": ")) what.erase(0, e.module().size() + 2);
        std::cerr << "refused by module '" << e.module() << "': " << what << '\n';
        return kExitRefused;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInternal;
    }
    return kExitConfig;
}

}  // namespace qmlab
