#include "qmlab/analysis.hpp"
#include "qmlab/experiments.hpp"
#include "qmlab/fio.hpp"
#include "qmlab/quasimode.hpp"
#include "qmlab/symbols.hpp"

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace qmlab;

namespace {

std::string rational_text(const Rational& r) {
    std::ostringstream os;
    os << r;
    return os.str();
}

py::dict exponent_py(const std::string& family, int n, const std::string& p, int k) {
    ExponentQuery q;
    q.family = parse_family(family);
    q.n = n;
    q.p = PExp::parse(p);
    q.extra = k;
    const Rational d = exponent(q);
    py::dict out;
    out["exact"] = rational_text(d);
    out["value"] = to_double(d);
    return out;
}

int infer_dim(const std::string& a, const std::string& b) {
    int m = 0;
    for (const std::string* s : {&a, &b})
        for (std::size_t i = 0; i + 1 < s->size(); ++i)
            if ((*s)[i] == 'x' && std::isdigit(static_cast<unsigned char>((*s)[i + 1]))) m = std::max(m, std::stoi(s->substr(i + 1)));
    return m;
}

py::dict contact_py(const std::string& p1, const std::string& p2, int max_order, int directions) {
    const int dim = infer_dim(p1, p2);
    if (dim < 2) throw std::invalid_argument("symbols need at least the variables x1, x2");
    const auto g1 = graph_factor(PolySymbol::parse(p1, dim)), g2 = graph_factor(PolySymbol::parse(p2, dim));
    if (!g1.valid) throw std::invalid_argument("p1: " + g1.note);
    if (!g2.valid) throw std::invalid_argument("p2: " + g2.note);
    const auto prof = contact_profile(g1.a, g2.a, sample_directions(dim - 1, directions), max_order);
    py::list rows;
    for (const auto& r : prof.reports) {
        py::dict d;
        d["direction"] = r.unit_direction;
        d["order"] = r.order ? py::object(py::int_(*r.order)) : py::object(py::none());
        d["leading_coefficient"] = r.unit_leading_coefficient;
        d["outside_hypotheses"] = r.outside_hypotheses;
        rows.append(d);
    }
    py::dict out;
    out["uniform"] = prof.uniform;
    out["order"] = prof.common_order ? py::object(py::int_(*prof.common_order)) : py::object(py::none());
    out["directions"] = rows;
    return out;
}

py::dict report_dict(const ExperimentReport& r) {
    py::list verdicts;
    for (const auto& v : r.verdicts) {
        py::dict d;
        d["name"] = v.name;
        d["measured"] = v.measured;
        d["predicted"] = v.predicted;
        d["tolerance"] = v.tolerance;
        d["comparison"] = v.comparison;
        d["pass"] = v.pass;
        d["note"] = v.note;
        verdicts.append(d);
    }
    py::dict tables;
    for (const auto& t : r.tables) {
        std::ostringstream os;
        write_csv(t, os);
        tables[py::str(t.name)] = os.str();
    }
    py::dict out;
    out["experiment"] = r.experiment;
    out["seed"] = r.seed;
    out["all_pass"] = r.all_pass();
    out["verdicts"] = verdicts;
    out["tables"] = tables;
    return out;
}

// Cutoff together with its example so that p1, p2 stay available.
struct Cutoff {
    ExampleSpec example;
    CutoffGrid grid;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Exact symbols, joint quasimodes and scaling experiments";

    py::register_exception<ResolutionError>(m, "ResolutionError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    m.def("exponent", &exponent_py, py::arg("family"), py::arg("n"), py::arg("p"), py::arg("k") = 1,
          "delta for family sogge | submanifold | transverse | contact; p is 'inf' or a rational string");
    m.def("contact_profile", &contact_py, py::arg("p1"), py::arg("p2"), py::arg("max_order") = 12,
          py::arg("directions") = 64, "line contact orders of two symbols c xi_1 + r(xi_bar)");
    m.def(
        "egorov_symbol",
        [](const std::string& a1, const std::string& a2, int dim) {
            return egorov_symbol(PolySymbol::parse(a1, dim), PolySymbol::parse(a2, dim)).to_string();
        },
        py::arg("a1"), py::arg("a2"), py::arg("dim"));

    py::class_<Cutoff>(m, "Cutoff")
        .def_property_readonly("h", [](const Cutoff& c) { return c.grid.h; })
        .def_property_readonly("dim", [](const Cutoff& c) { return c.grid.dim(); })
        .def_property_readonly("cell_count", [](const Cutoff& c) { return c.grid.cell_count; })
        .def_property_readonly("volume", [](const Cutoff& c) { return support_volume(c.grid); })
        .def_property_readonly("l2_norm", [](const Cutoff& c) { return c.grid.l2_norm(); })
        .def_property_readonly("peak_value", [](const Cutoff& c) { return peak_value(c.grid); })
        .def_property_readonly("volume_exponent", [](const Cutoff& c) { return c.example.volume_exponent; });

    m.def(
        "build_cutoff",
        [](const std::string& id, int n, int k, double h) {
            Cutoff c{example_by_id(id, n, k), {}};
            c.grid = build_cutoff(c.example.cutoff, h);
            return c;
        },
        py::arg("example"), py::arg("n"), py::arg("k"), py::arg("h"), "support of chi_h for ex21 | ex22 | ex23 | kappa | flat");
    m.def(
        "synthesize",
        [](const Cutoff& c, py::array_t<double, py::array::c_style | py::array::forcecast> x) {
            if (x.ndim() != 2 || x.shape(1) != c.grid.dim())
                throw std::invalid_argument("targets must have shape (m, dim)");
            std::vector<std::vector<double>> t(x.shape(0), std::vector<double>(x.shape(1)));
            auto r = x.unchecked<2>();
            for (py::ssize_t i = 0; i < x.shape(0); ++i)
                for (py::ssize_t d = 0; d < x.shape(1); ++d) t[i][d] = r(i, d);
            std::vector<cplx> v;
            {
                py::gil_scoped_release release;
                v = synthesize(c.grid, t);
            }
            py::array_t<cplx> out(static_cast<py::ssize_t>(v.size()));
            auto o = out.mutable_unchecked<1>();
            for (py::ssize_t i = 0; i < o.shape(0); ++i) o(i) = v[i];
            return out;
        },
        py::arg("cutoff"), py::arg("targets"), "T_chi at the rows of targets");
    m.def(
        "verify_joint_quasimode",
        [](const Cutoff& c, int M1, int M2) {
            const auto r = verify_joint_quasimode(c.grid, c.example.p1, c.example.p2, M1, M2);
            return py::make_tuple(r.ratio, r.cell_ratio);
        },
        py::arg("cutoff"), py::arg("M1"), py::arg("M2"), "(midpoint ratio, cell-averaged ratio)");

    m.def("list_experiments", [] {
        py::list out;
        for (const auto& e : list_experiments()) out.append(py::make_tuple(e.id, e.description, e.verifies));
        return out;
    });
    m.def(
        "run_config",
        [](const std::string& text) {
            const auto cfg = parse_config(text);
            ExperimentReport r;
            {
                py::gil_scoped_release release;
                r = run_experiment(cfg);
            }
            return report_dict(r);
        },
        py::arg("text"), "run an experiment from configuration text");
    m.def(
        "run_file",
        [](const std::string& path) {
            const auto cfg = load_config(path);
            ExperimentReport r;
            {
                py::gil_scoped_release release;
                r = run_experiment(cfg);
            }
            return report_dict(r);
        },
        py::arg("path"));
}
