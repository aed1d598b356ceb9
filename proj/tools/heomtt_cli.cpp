#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"

#include "heomtt/bath.hpp"
#include "heomtt/checkpoint.hpp"
#include "heomtt/compare.hpp"
#include "heomtt/csv.hpp"
#include "heomtt/errors.hpp"
#include "heomtt/heom_dense.hpp"
#include "heomtt/model_io.hpp"
#include "heomtt/observables.hpp"
#include "heomtt/tt_heom.hpp"

using namespace heomtt;
namespace fs = std::filesystem;

namespace {

enum Exit { ok = 0, config_error = 2, convergence_error = 3, resource_error = 4 };

// Flags that override the run block of the model file.
struct RunFlags {
    std::optional<std::string> backend, integrator, output;
    std::optional<int> level, n_max, stride, rmax, rank_refresh, pad_rank;
    std::optional<double> dt, t_final, eps;
    std::optional<unsigned> seed;

    void add(CLI::App* c) {
        c->add_option("--backend", backend, "dense or tt");
        c->add_option("--level", level, "dense hierarchy level L");
        c->add_option("--n-max", n_max, "tt per-mode occupation cap");
        c->add_option("--integrator", integrator, "rk4, rk45 (dense) or ksl (tt)");
        c->add_option("--dt", dt, "time step, time unit of the model file");
        c->add_option("--t-final", t_final, "final time, time unit of the model file");
        c->add_option("--stride", stride, "output every n-th step");
        c->add_option("--eps", eps, "tt rounding tolerance");
        c->add_option("--rmax", rmax, "tt rank cap");
        c->add_option("--rank-refresh", rank_refresh, "rank-adaptive RK4 step every n steps, 0 = never");
        c->add_option("--pad-rank", pad_rank, "pad the initial tt state to this rank");
        c->add_option("--output,-o", output, "output directory");
        c->add_option("--seed", seed, "seed recorded in the output metadata");
    }

    io::RunConfig apply(io::RunConfig r) const {
        if (backend) {
            r.backend = *backend;
            if (!integrator)
                r.integrator = *backend == "tt" ? "ksl" : "rk4";
        }
        if (integrator)
            r.integrator = *integrator;
        if (output)
            r.output = *output;
        if (level)
            r.level = *level;
        if (n_max)
            r.n_max = *n_max;
        if (stride)
            r.output_stride = *stride;
        if (rmax)
            r.rmax = *rmax;
        if (rank_refresh)
            r.rank_refresh = *rank_refresh;
        if (pad_rank)
            r.pad_rank = *pad_rank;
        if (dt)
            r.dt = *dt;
        if (t_final)
            r.t_final = *t_final;
        if (eps)
            r.eps = *eps;
        if (seed)
            r.seed = *seed;
        io::validate_run(r, "run");
        return r;
    }
};

struct Loaded {
    io::ModelFile file;
    SystemModel model;
    io::RunConfig run;
};

Loaded load(const std::string& path, const RunFlags& flags) {
    Loaded l;
    l.file = io::load_model(path);
    l.model = io::build_model(l.file);
    l.run = flags.apply(l.file.run.value_or(io::RunConfig{}));
    return l;
}

std::string out_path(const io::RunConfig& r, const std::string& name) {
    fs::create_directories(r.output);
    return (fs::path(r.output) / name).string();
}

void write_meta(CsvWriter& w, const Loaded& l, const std::string& command) {
    w.meta("command", command);
    w.meta("model", l.file.name);
    w.meta("backend", l.run.backend);
    w.meta("integrator", l.run.integrator);
    w.meta("dt", CsvWriter::format(l.run.dt) + " " + l.file.time_unit);
    w.meta("truncation", l.run.backend == "tt" ? "n_max " + std::to_string(l.run.n_max)
                                               : "level " + std::to_string(l.run.level));
    if (l.run.backend == "tt") {
        w.meta("eps", CsvWriter::format(l.run.eps));
        w.meta("rmax", std::to_string(l.run.rmax));
        w.meta("rank_refresh", std::to_string(l.run.rank_refresh));
    }
    w.meta("seed", std::to_string(l.run.seed));
    w.meta("time_unit", "fs");
}

std::vector<std::string> state_names(const Loaded& l) {
    std::vector<std::string> s = l.file.states;
    for (int i = static_cast<int>(s.size()); i < l.model.dim(); ++i)
        s.push_back(std::to_string(i));
    return s;
}

long step_count(const Loaded& l) { return std::lround(l.run.t_final / l.run.dt); }

std::shared_ptr<const HierarchySpace> dense_space(const Loaded& l) {
    return std::make_shared<const HierarchySpace>(
        HierarchySpace::level(std::max(1, l.model.mode_count()), l.run.level));
}

int simulate(const std::string& path, const RunFlags& flags) {
    const Loaded l = load(path, flags);
    const int n = l.model.dim();
    const CMat U = io::observation_basis(l.file, l.model);
    const CMat rho0 = io::initial_density(l.file, l.model);
    const bool tt_backend = l.run.backend == "tt";

    CsvWriter w(out_path(l.run, "trajectory.csv"));
    write_meta(w, l, "simulate");
    w.meta("basis", l.file.basis);
    std::vector<std::string> cols{"t"};
    const auto names = state_names(l);
    for (int i = 0; i < n; ++i)
        cols.push_back("p_" + names[i]);
    for (auto [a, b] : l.file.coherences) {
        const std::string tag = names[a] + "_" + names[b];
        cols.insert(cols.end(), {"re_" + tag, "im_" + tag, "abs_" + tag});
    }
    cols.push_back("trace");
    if (tt_backend)
        cols.insert(cols.end(), {"max_rank", "norm"});
    w.header(cols);

    auto emit = [&](double t, const CMat& rho, double max_rank, double norm) {
        const CMat r = U.adjoint() * rho * U;
        std::vector<double> row{units::au_to_fs(t)};
        for (int i = 0; i < n; ++i)
            row.push_back(r(i, i).real());
        for (auto [a, b] : l.file.coherences)
            row.insert(row.end(), {r(a, b).real(), r(a, b).imag(), std::abs(r(a, b))});
        row.push_back(rho.trace().real());
        if (tt_backend)
            row.insert(row.end(), {max_rank, norm});
        w.row(row);
    };

    const double dt = io::time_to_au(l.file, l.run.dt);
    const long steps = step_count(l);
    const long stride = l.run.output_stride;
    const auto t0 = std::chrono::steady_clock::now();
    long k = 0;
    if (tt_backend) {
        const int nh = l.run.n_max + 1;
        TTLiouvillian L = assemble(l.model, nh, std::min(l.run.eps, 1e-14));
        RankPolicy pol;
        pol.eps = l.run.eps;
        pol.rmax = l.run.rmax;
        pol.rank_refresh = l.run.rank_refresh;
        pol.pad_rank = l.run.pad_rank;
        const auto info = propagate_tt(L, l.model, initial_state(rho0, std::max(1, l.model.mode_count()), nh), 0.0, dt,
                                       steps, pol, [&](const TTSample& s) {
                                           if (k % stride == 0 || k == steps)
                                               emit(s.t, s.rho, s.max_rank, s.norm);
                                           ++k;
                                       });
        save_tt(out_path(l.run, "final.ckpt"), info.final_state, steps * dt);
        if (info.rank_capped)
            std::cerr << "warning: bond ranks reached rmax = " << l.run.rmax << "\n";
        if (info.norm_alarm)
            std::cerr << "warning: norm drift exceeded the watchdog threshold\n";
    } else {
        auto sp = dense_space(l);
        DenseHEOM eng(l.model, sp);
        const Integrator integ = l.run.integrator == "rk45" ? Integrator::RK45 : Integrator::RK4;
        const HEOMState fin = eng.propagate(HEOMState::factorized(sp, rho0), dt, steps, integ, [&](const HEOMState& s) {
            if (k % stride == 0 || k == steps)
                emit(s.time, s.rho(), 0.0, 0.0);
            ++k;
        });
        save_dense(out_path(l.run, "final.ckpt"), fin);
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("simulate: %ld steps in %.2f s, output in %s\n", steps, sec, l.run.output.c_str());
    return ok;
}

struct SpectrumFlags {
    std::string mode = "absorption";
    double emin = 0.0, emax = 5.0, t_max = 500.0, window = -1.0;
    int points = 2001;
    double relax_window = 20.0, relax_tol = 1e-6, relax_t_max = 3000.0;
    std::string restart;
};

int spectrum(const std::string& path, const RunFlags& flags, const SpectrumFlags& sf) {
    const Loaded l = load(path, flags);
    if (l.run.backend != "dense")
        throw ConfigError("spectra use the dense backend");
    auto sp = dense_space(l);
    DenseHEOM eng(l.model, sp);
    SpectrumOptions o;
    o.dt = io::time_to_au(l.file, l.run.dt);
    o.t_max = units::fs_to_au(sf.t_max);
    o.window = 0.0;
    o.omega_min_ev = sf.emin;
    o.omega_max_ev = sf.emax;
    o.n_omega = sf.points;
    o.normalize = false;
    o.integrator = l.run.integrator == "rk45" ? Integrator::RK45 : Integrator::RK4;

    SpectrumResult r;
    if (sf.mode == "absorption") {
        CMat g = CMat::Zero(l.model.dim(), l.model.dim());
        g(0, 0) = 1.0;
        r = absorption_spectrum(eng, g, o);
    } else if (sf.mode == "emission") {
        HEOMState eq;
        if (!sf.restart.empty()) {
            eq = load_dense(sf.restart);
            if (eq.data.size() != static_cast<Eigen::Index>(eng.size()))
                throw ConfigError("restart checkpoint does not match the hierarchy of " + path);
            eq = HEOMState{sp, eq.n, eq.data, eq.time};
        } else {
            RelaxOptions ro;
            ro.dt = o.dt;
            ro.window = units::fs_to_au(sf.relax_window);
            ro.tol = sf.relax_tol;
            ro.t_max = units::fs_to_au(sf.relax_t_max);
            ro.integrator = o.integrator;
            auto [state, t_eq] = eng.relax_to_equilibrium(
                HEOMState::factorized(sp, io::initial_density(l.file, l.model)), ro);
            std::printf("equilibrated after %.1f fs\n", units::au_to_fs(t_eq));
            save_dense(out_path(l.run, "equilibrium.ckpt"), state);
            eq = std::move(state);
        }
        r = emission_spectrum(eng, eq, o);
    } else {
        throw ConfigError("--mode must be absorption or emission");
    }

    // Exponential window: explicit, or 5 times the observed 1/e decay.
    double window = units::fs_to_au(sf.window);
    if (sf.window < 0.0) {
        window = r.times.back();
        const double c0 = std::abs(r.correlation.front());
        for (std::size_t i = 0; i < r.times.size(); ++i)
            if (std::abs(r.correlation[i]) < std::exp(-1.0) * c0) {
                window = 5.0 * r.times[i];
                break;
            }
    }
    std::vector<double> w;
    for (double e : r.grid_ev)
        w.push_back(units::ev_to_au(e));
    std::vector<double> v = window > 0.0 ? half_line_transform(r.times, r.correlation, w, window) : r.values;
    const double mx = *std::max_element(v.begin(), v.end());
    if (mx > 0.0)
        for (double& x : v)
            x /= mx;
    const std::size_t ip = std::max_element(v.begin(), v.end()) - v.begin();

    CsvWriter s(out_path(l.run, sf.mode + ".csv"));
    write_meta(s, l, "spectrum " + sf.mode);
    s.meta("window_fs", CsvWriter::format(units::au_to_fs(window)));
    s.meta("peak_ev", CsvWriter::format(r.grid_ev[ip]));
    s.meta("unresolved", r.unresolved ? "true" : "false");
    s.header({"omega_ev", "intensity"});
    for (std::size_t q = 0; q < v.size(); ++q)
        s.row({r.grid_ev[q], v[q]});
    CsvWriter c(out_path(l.run, sf.mode + "_correlation.csv"));
    write_meta(c, l, "spectrum " + sf.mode);
    c.header({"t", "re", "im"});
    for (std::size_t i = 0; i < r.times.size(); ++i)
        c.row({units::au_to_fs(r.times[i]), r.correlation[i].real(), r.correlation[i].imag()});
    std::printf("%s peak %.4f eV%s\n", sf.mode.c_str(), r.grid_ev[ip],
                r.unresolved ? " (correlation not decayed: raise --t-max)" : "");
    return ok;
}

int nonmarkov(const std::string& path, const RunFlags& flags, int jobs) {
    const Loaded l = load(path, flags);
    if (l.run.backend != "dense")
        throw ConfigError("the non-Markovianity toolkit uses the dense backend");
    auto sp = dense_space(l);
    DenseHEOM eng(l.model, sp);
    const double dt = io::time_to_au(l.file, l.run.dt);
    const long steps = step_count(l);
    const long stride = l.run.output_stride;
    const int n2 = l.model.dim() * l.model.dim();

    const auto vol = f_matrix_and_volume(eng, dt, steps, stride, jobs);
    CsvWriter v(out_path(l.run, "volume.csv"));
    write_meta(v, l, "nonmarkov");
    v.meta("non_monotonic", non_monotonic(vol.V, 1e-12) ? "true" : "false");
    v.header({"t", "V"});
    for (std::size_t q = 0; q < vol.V.size(); ++q)
        v.row({units::au_to_fs(vol.times[q]), vol.V[q]});

    const auto map = dynamical_map(eng, dt, steps, stride, jobs);
    CsvWriter rates(out_path(l.run, "rates.csv"));
    CsvWriter choi(out_path(l.run, "choi.csv"));
    write_meta(rates, l, "nonmarkov");
    write_meta(choi, l, "nonmarkov");
    std::vector<std::string> rc{"t"}, cc{"t"};
    for (int i = 1; i < n2; ++i)
        rc.push_back("rate_" + std::to_string(i));
    for (int i = 1; i <= n2; ++i)
        cc.push_back("ev_" + std::to_string(i));
    rates.header(rc);
    choi.header(cc);
    double most_negative = 0.0;
    for (std::size_t q = 0; q < map.A.size(); ++q) {
        std::vector<double> row{units::au_to_fs(map.times[q])};
        const auto r = canonical_rates(map.A[q], map.A_dot[q]);
        row.insert(row.end(), r.begin(), r.end());
        if (q > 0)
            most_negative = std::min(most_negative, r.front());
        rates.row(row);
        std::vector<double> crow{row.front()};
        const auto ev = choi_eigenvalues(map.A[q]);
        crow.insert(crow.end(), ev.begin(), ev.end());
        choi.row(crow);
    }
    std::printf("nonmarkov: V non-monotonic %s, most negative canonical rate %.3e a.u.\n",
                non_monotonic(vol.V, 1e-12) ? "yes" : "no", most_negative);
    return ok;
}

int compare(const std::string& path, const RunFlags& flags) {
    const Loaded l = load(path, flags);
    const int nh = l.run.n_max + 1;
    RankPolicy pol;
    pol.eps = l.run.eps;
    pol.rmax = l.run.rmax;
    pol.rank_refresh = l.run.rank_refresh;
    pol.pad_rank = l.run.pad_rank;
    const auto rep = compare_backends(l.model, nh, io::initial_density(l.file, l.model),
                                      io::time_to_au(l.file, l.run.dt), step_count(l), pol);
    std::printf("modes %d, n_heom %d\n", l.model.mode_count(), nh);
    std::printf("max population deviation  %.3e\n", rep.max_population_deviation);
    std::printf("trace drift dense / tt    %.3e / %.3e\n", rep.dense_trace_drift, rep.tt_trace_drift);
    std::printf("wall time dense / tt      %.2f s / %.2f s\n", rep.dense_seconds, rep.tt_seconds);
    std::printf("stored scalars dense / tt %zu / %zu (max rank %d)\n", rep.dense_scalars, rep.tt_scalars,
                rep.tt_max_rank);
    return ok;
}

int storage(int n, int K, int L, int rmax) {
    const auto r = storage_report(n, K, L, rmax);
    std::printf("n = %d, K = %d, L = %d, rmax = %d\n", n, K, L, rmax);
    std::printf("dense scalars             %zu\n", r.dense_scalars);
    std::printf("tt, all ranks rmax        %zu\n", r.tt_equal_rank);
    std::printf("tt bound                  %zu\n", r.tt_bound);
    return ok;
}

int bath_dump(const std::string& path, const RunFlags& flags, double t_max_fs, int points) {
    const Loaded l = load(path, flags);
    for (std::size_t b = 0; b < l.file.baths.size(); ++b) {
        const auto& bc = l.file.baths[b];
        const auto sd = io::effective_sd(bc);
        const double beta = units::beta_from_kelvin(bc.temperature_K);
        const auto& e = l.model.baths[b].expansion;
        const std::string tag = "bath" + std::to_string(b);
        const bool discrete = std::holds_alternative<bath::DiscreteSD>(sd);

        CsvWriter x(out_path(l.run, tag + "_expansion.csv"));
        write_meta(x, l, "bath-dump");
        x.header({"re_alpha", "im_alpha", "re_alpha_tilde", "im_alpha_tilde", "re_gamma", "im_gamma", "matsubara"});
        for (const auto& t : e.terms)
            x.row({t.alpha.real(), t.alpha.imag(), t.alpha_tilde.real(), t.alpha_tilde.imag(), t.gamma.real(),
                   t.gamma.imag(), t.matsubara ? 1.0 : 0.0});

        CsvWriter c(out_path(l.run, tag + "_correlation.csv"));
        write_meta(c, l, "bath-dump");
        c.header({"t", "re_exact", "im_exact", "re_expansion", "im_expansion"});
        for (int j = 0; j < points; ++j) {
            const double t = units::fs_to_au(t_max_fs * j / std::max(1, points - 1));
            const cplx exact = discrete ? bath::discrete_correlation(std::get<bath::DiscreteSD>(sd), beta, t)
                                        : bath::correlation_quadrature(sd, beta, t);
            const cplx ex = e.correlation(t);
            c.row({units::au_to_fs(t), exact.real(), exact.imag(), ex.real(), ex.imag()});
        }

        const double lambda = bath::reorganization_energy(sd);
        std::printf("bath %zu: %zu expansion terms, lambda %.6e a.u. (%.4f eV)", b, e.size(), lambda,
                    units::au_to_ev(lambda));
        if (!discrete) {
            const auto k = bath::kappa(sd, beta);
            std::printf(", kappa %.4f (Lambda %.4f eV, Delta %.4f eV)", k.kappa, units::au_to_ev(k.Lambda),
                        units::au_to_ev(k.Delta));
            CsvWriter s(out_path(l.run, tag + "_sd.csv"));
            write_meta(s, l, "bath-dump");
            s.header({"omega_au", "omega_ev", "J_au"});
            const double wmax = 4.0 * bath::spectral_peak(sd);
            for (int j = 1; j < points; ++j) {
                const double w = wmax * j / (points - 1);
                s.row({w, units::au_to_ev(w), bath::evaluate_sd(sd, w)});
            }
        }
        std::printf("\n");
    }
    return ok;
}

int discretize(const std::string& path, const RunFlags& flags, int n_modes, int bath_index) {
    const Loaded l = load(path, flags);
    if (bath_index < 0 || bath_index >= static_cast<int>(l.file.baths.size()))
        throw ConfigError("--bath out of range");
    const auto sd = io::sd_in_au(l.file.baths[bath_index]);
    if (std::holds_alternative<bath::DiscreteSD>(sd))
        throw ConfigError("bath is already discrete");
    const auto d = bath::discretize_makri(sd, n_modes);
    const auto shown = bath::discrete_display(d);
    CsvWriter w(out_path(l.run, "modes.csv"));
    write_meta(w, l, "discretize");
    w.meta("modes", std::to_string(n_modes));
    w.header({"omega_au", "omega_ev", "coupling_au", "J_display_au"});
    for (std::size_t j = 0; j < d.modes.size(); ++j)
        w.row({d.modes[j].omega, units::au_to_ev(d.modes[j].omega), d.modes[j].coupling, shown[j].second});
    std::printf("discretize: %d modes, lambda %.6e a.u. (continuous %.6e)\n", n_modes, bath::reorganization_energy(d),
                bath::reorganization_energy(sd));
    return ok;
}

int default_jobs() {
    if (const char* e = std::getenv("HEOMTT_THREADS")) {
        const int j = std::atoi(e);
        if (j > 0)
            return j;
    }
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"heomtt: hierarchical equations of motion, dense and tensor-train"};
    app.require_subcommand(1);
    app.fallthrough();
    int jobs = default_jobs();
    app.add_option("--jobs,-j", jobs, "worker threads (default: HEOMTT_THREADS or 1)")->check(CLI::PositiveNumber);

    std::string model;
    RunFlags flags;
    auto with_model = [&](CLI::App* c) {
        c->add_option("model", model, "model file (JSON)")->required()->check(CLI::ExistingFile);
        flags.add(c);
    };

    auto* sim = app.add_subcommand("simulate", "propagate the model and write the trajectory");
    with_model(sim);

    SpectrumFlags sf;
    auto* spec = app.add_subcommand("spectrum", "linear absorption or emission spectrum");
    with_model(spec);
    spec->add_option("--mode", sf.mode, "absorption or emission")->check(CLI::IsMember({"absorption", "emission"}));
    spec->add_option("--emin", sf.emin, "grid start, eV");
    spec->add_option("--emax", sf.emax, "grid end, eV");
    spec->add_option("--points", sf.points, "grid points")->check(CLI::Range(2, 1000000));
    spec->add_option("--t-max", sf.t_max, "correlation length, fs");
    spec->add_option("--window", sf.window, "exponential window, fs (negative: 5 x the 1/e decay, 0: none)");
    spec->add_option("--relax-window", sf.relax_window, "stationarity window, fs");
    spec->add_option("--relax-tol", sf.relax_tol, "stationarity tolerance");
    spec->add_option("--relax-t-max", sf.relax_t_max, "equilibration limit, fs");
    spec->add_option("--restart", sf.restart, "equilibrium checkpoint for emission");

    auto* nm = app.add_subcommand("nonmarkov", "volume of accessible states, canonical rates, Choi spectra");
    with_model(nm);

    auto* cmp = app.add_subcommand("compare", "dense vs tt on the same model, or a storage report");
    std::string cmp_model;
    int st_n = 2, st_K = 80, st_L = 5, st_r = 80;
    bool storage_only = false;
    cmp->add_option("model", cmp_model, "model file (JSON)")->check(CLI::ExistingFile);
    flags.add(cmp);
    cmp->add_flag("--storage", storage_only, "only print storage estimates");
    cmp->add_option("--n", st_n, "system dimension for --storage");
    cmp->add_option("--modes", st_K, "decay modes K for --storage");
    cmp->add_option("--hierarchy-level", st_L, "hierarchy level L for --storage");
    cmp->add_option("--rank", st_r, "rank for --storage");

    double dump_t = 1000.0;
    int dump_points = 501;
    auto* dump = app.add_subcommand("bath-dump", "spectral density, correlation function and expansion");
    with_model(dump);
    dump->add_option("--t-max", dump_t, "correlation range, fs");
    dump->add_option("--points", dump_points, "samples")->check(CLI::Range(2, 1000000));

    int n_modes = 40, bath_index = 0;
    auto* disc = app.add_subcommand("discretize", "equal-reorganization-energy discrete modes");
    with_model(disc);
    disc->add_option("--modes", n_modes, "number of modes")->check(CLI::PositiveNumber);
    disc->add_option("--bath", bath_index, "bath index");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? ok : config_error;
    }

#ifdef _OPENMP
    omp_set_num_threads(jobs);
#endif
    try {
        if (sim->parsed())
            return simulate(model, flags);
        if (spec->parsed())
            return spectrum(model, flags, sf);
        if (nm->parsed())
            return nonmarkov(model, flags, jobs);
        if (cmp->parsed()) {
            if (storage_only || cmp_model.empty())
                return storage(st_n, st_K, st_L, st_r);
            return compare(cmp_model, flags);
        }
        if (dump->parsed())
            return bath_dump(model, flags, dump_t, dump_points);
        if (disc->parsed())
            return discretize(model, flags, n_modes, bath_index);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return config_error;
    } catch (const ConvergenceError& e) {
        std::cerr << "convergence error: " << e.what() << "\n";
        return convergence_error;
    } catch (const ResourceError& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return resource_error;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return config_error;
    }
    return ok;
}
