#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <cmath>
#include <optional>

#include "heomtt/bath.hpp"
#include "heomtt/compare.hpp"
#include "heomtt/errors.hpp"
#include "heomtt/heom_dense.hpp"
#include "heomtt/model_io.hpp"
#include "heomtt/tt_heom.hpp"

namespace py = pybind11;
using namespace heomtt;

namespace {

bath::LorentzianOhmicSD ohmic(const std::vector<std::array<double, 3>>& terms) {
    bath::LorentzianOhmicSD sd;
    for (const auto& t : terms)
        sd.terms.push_back({t[0], t[1], t[2]});
    return sd;
}

py::dict simulate(const std::string& path, std::optional<std::string> backend, std::optional<double> t_final,
                  std::optional<double> dt, std::optional<int> stride, std::optional<int> rmax,
                  std::optional<int> pad_rank, std::optional<int> rank_refresh) {
    const io::ModelFile f = io::load_model(path);
    io::RunConfig r = f.run.value_or(io::RunConfig{});
    if (backend) {
        r.backend = *backend;
        r.integrator = *backend == "tt" ? "ksl" : "rk4";
    }
    if (t_final)
        r.t_final = *t_final;
    if (dt)
        r.dt = *dt;
    if (stride)
        r.output_stride = *stride;
    if (rmax)
        r.rmax = *rmax;
    if (pad_rank)
        r.pad_rank = *pad_rank;
    if (rank_refresh)
        r.rank_refresh = *rank_refresh;
    io::validate_run(r, "run");

    const SystemModel m = io::build_model(f);
    const CMat rho0 = io::initial_density(f, m);
    const double h = io::time_to_au(f, r.dt);
    const long steps = std::lround(r.t_final / r.dt);
    std::vector<double> t;
    std::vector<CMat> rho;
    long k = 0;
    auto keep = [&](double time, const CMat& x) {
        if (k % r.output_stride == 0 || k == steps) {
            t.push_back(units::au_to_fs(time));
            rho.push_back(x);
        }
        ++k;
    };
    {
        py::gil_scoped_release nogil;
        const int K = std::max(1, m.mode_count());
        if (r.backend == "tt") {
            const int nh = r.n_max + 1;
            TTLiouvillian L = assemble(m, nh, std::min(r.eps, 1e-14));
            RankPolicy pol;
            pol.eps = r.eps;
            pol.rmax = r.rmax;
            pol.rank_refresh = r.rank_refresh;
            pol.pad_rank = r.pad_rank;
            propagate_tt(L, m, initial_state(rho0, K, nh), 0.0, h, steps, pol,
                         [&](const TTSample& s) { keep(s.t, s.rho); });
        } else {
            auto sp = std::make_shared<const HierarchySpace>(HierarchySpace::level(K, r.level));
            DenseHEOM eng(m, sp);
            eng.propagate(HEOMState::factorized(sp, rho0), h, steps,
                          r.integrator == "rk45" ? Integrator::RK45 : Integrator::RK4,
                          [&](const HEOMState& s) { keep(s.time, s.rho()); });
        }
    }
    const py::ssize_t n = m.dim();
    py::array_t<cplx> out({static_cast<py::ssize_t>(rho.size()), n, n});
    auto a = out.mutable_unchecked<3>();
    for (std::size_t q = 0; q < rho.size(); ++q)
        for (py::ssize_t i = 0; i < n; ++i)
            for (py::ssize_t j = 0; j < n; ++j)
                a(q, i, j) = rho[q](i, j);
    py::dict d;
    d["t_fs"] = py::array_t<double>(t.size(), t.data());
    d["rho"] = out;
    d["basis"] = io::observation_basis(f, m);
    d["states"] = f.states;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, mod) {
    mod.doc() = "HEOM propagation with dense and tensor-train backends";

    py::register_exception<ConfigError>(mod, "ConfigError", PyExc_ValueError);
    py::register_exception<ConvergenceError>(mod, "ConvergenceError", PyExc_RuntimeError);
    py::register_exception<ResourceError>(mod, "ResourceError", PyExc_MemoryError);

    mod.def("fs_to_au", &units::fs_to_au);
    mod.def("au_to_fs", &units::au_to_fs);
    mod.def("ev_to_au", &units::ev_to_au);
    mod.def("au_to_ev", &units::au_to_ev);
    mod.def("beta_from_kelvin", &units::beta_from_kelvin);

    mod.def(
        "reorganization_energy",
        [](const std::vector<std::array<double, 3>>& terms) { return bath::reorganization_energy(ohmic(terms)); },
        py::arg("terms"), "lambda of an Ohmic Lorentzian sum, terms (p, Omega, Gamma) in a.u.");
    mod.def(
        "kappa",
        [](const std::vector<std::array<double, 3>>& terms, double temperature_K) {
            const auto k = bath::kappa(ohmic(terms), units::beta_from_kelvin(temperature_K));
            return py::make_tuple(k.kappa, k.Lambda, k.Delta);
        },
        py::arg("terms"), py::arg("temperature_K"), "(kappa, Lambda, Delta) in a.u.");
    mod.def(
        "correlation_expansion",
        [](const std::vector<std::array<double, 3>>& terms, double temperature_K, int n_matsubara) {
            const auto e =
                bath::expand_correlation(ohmic(terms), units::beta_from_kelvin(temperature_K), n_matsubara);
            std::vector<std::tuple<cplx, cplx, cplx>> out;
            for (const auto& t : e.terms)
                out.emplace_back(t.alpha, t.alpha_tilde, t.gamma);
            return out;
        },
        py::arg("terms"), py::arg("temperature_K"), py::arg("n_matsubara") = 0,
        "list of (alpha, alpha_tilde, gamma) with C(t) = sum alpha exp(i gamma t)");
    mod.def(
        "storage_report",
        [](int n, int K, int L, int rmax) {
            const auto r = storage_report(n, K, L, rmax);
            py::dict d;
            d["dense_scalars"] = r.dense_scalars;
            d["tt_equal_rank"] = r.tt_equal_rank;
            d["tt_bound"] = r.tt_bound;
            return d;
        },
        py::arg("n"), py::arg("K"), py::arg("L"), py::arg("rmax"));
    mod.def("simulate", &simulate, py::arg("model"), py::arg("backend") = py::none(),
            py::arg("t_final") = py::none(), py::arg("dt") = py::none(), py::arg("stride") = py::none(),
            py::arg("rmax") = py::none(), py::arg("pad_rank") = py::none(), py::arg("rank_refresh") = py::none(),
            "propagate a model file; returns t_fs, rho (site basis), basis and states");
}
