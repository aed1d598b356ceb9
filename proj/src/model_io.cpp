#include "heomtt/model_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "heomtt/errors.hpp"

namespace heomtt::io {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError("model file: " + path + ": " + what);
}

const json& need(const json& j, const char* key, const std::string& path) {
    if (!j.is_object() || !j.contains(key))
        fail(path, std::string("missing field '") + key + "'");
    return j.at(key);
}

double number(const json& j, const std::string& path) {
    if (!j.is_number())
        fail(path, "expected a number");
    return j.get<double>();
}

int integer(const json& j, const std::string& path) {
    if (!j.is_number_integer())
        fail(path, "expected an integer");
    return j.get<int>();
}

std::string text(const json& j, const std::string& path) {
    if (!j.is_string())
        fail(path, "expected a string");
    return j.get<std::string>();
}

template <class T>
T opt(const json& j, const char* key, T fallback, const std::string& path) {
    if (!j.contains(key))
        return fallback;
    const std::string p = path + "." + key;
    if constexpr (std::is_same_v<T, double>)
        return number(j.at(key), p);
    else if constexpr (std::is_same_v<T, int> || std::is_same_v<T, unsigned>)
        return static_cast<T>(integer(j.at(key), p));
    else if constexpr (std::is_same_v<T, bool>) {
        if (!j.at(key).is_boolean())
            fail(p, "expected true or false");
        return j.at(key).get<bool>();
    } else
        return text(j.at(key), p);
}

cplx entry(const json& j, const std::string& path) {
    if (j.is_number())
        return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    fail(path, "matrix entries are numbers or [re, im] pairs");
}

CMat matrix(const json& j, const std::string& path, long n = -1) {
    if (!j.is_array() || j.empty())
        fail(path, "expected a nonempty array of rows");
    const long rows = static_cast<long>(j.size());
    if (n >= 0 && rows != n)
        fail(path, "expected " + std::to_string(n) + " rows");
    CMat m(rows, rows);
    for (long r = 0; r < rows; ++r) {
        const json& row = j[r];
        const std::string rp = path + "[" + std::to_string(r) + "]";
        if (!row.is_array() || static_cast<long>(row.size()) != rows)
            fail(rp, "row length does not match the matrix size");
        for (long c = 0; c < rows; ++c)
            m(r, c) = entry(row[c], rp + "[" + std::to_string(c) + "]");
    }
    return m;
}

json matrix_json(const CMat& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            const cplx z = m(r, c);
            if (z.imag() == 0.0)
                row.push_back(z.real());
            else
                row.push_back(json::array({z.real(), z.imag()}));
        }
        rows.push_back(row);
    }
    return rows;
}

std::vector<std::vector<double>> rows_of(const json& j, std::size_t width, const std::string& path) {
    if (!j.is_array())
        fail(path, "expected an array of parameter rows");
    std::vector<std::vector<double>> out;
    for (std::size_t r = 0; r < j.size(); ++r) {
        const std::string rp = path + "[" + std::to_string(r) + "]";
        if (!j[r].is_array() || j[r].size() != width)
            fail(rp, "expected " + std::to_string(width) + " numbers");
        std::vector<double> row;
        for (std::size_t c = 0; c < width; ++c)
            row.push_back(number(j[r][c], rp));
        out.push_back(row);
    }
    return out;
}

bath::SpectralDensity parse_sd(const json& j, const std::string& path) {
    const std::string type = text(need(j, "type", path), path + ".type");
    if (type == "ohmic_lorentzian") {
        bath::LorentzianOhmicSD sd;
        for (const auto& r : rows_of(need(j, "terms", path), 3, path + ".terms"))
            sd.terms.push_back({r[0], r[1], r[2]});
        return sd;
    }
    if (type == "superohmic_lorentzian") {
        bath::LorentzianSuperOhmicSD sd;
        for (const auto& r : rows_of(need(j, "terms", path), 5, path + ".terms"))
            sd.terms.push_back({r[0], r[1], r[2], r[3], r[4]});
        return sd;
    }
    if (type == "discrete") {
        bath::DiscreteSD sd;
        for (const auto& r : rows_of(need(j, "modes", path), 2, path + ".modes"))
            sd.modes.push_back({r[0], r[1]});
        return sd;
    }
    fail(path + ".type", "unknown spectral density '" + type + "'");
}

json sd_json(const bath::SpectralDensity& sd, const std::string& unit) {
    json j;
    if (const auto* o = std::get_if<bath::LorentzianOhmicSD>(&sd)) {
        j["type"] = "ohmic_lorentzian";
        j["terms"] = json::array();
        for (const auto& t : o->terms)
            j["terms"].push_back({t.p, t.omega, t.gamma});
    } else if (const auto* s = std::get_if<bath::LorentzianSuperOhmicSD>(&sd)) {
        j["type"] = "superohmic_lorentzian";
        j["terms"] = json::array();
        for (const auto& t : s->terms)
            j["terms"].push_back({t.p, t.omega1, t.gamma1, t.omega2, t.gamma2});
    } else {
        const auto& d = std::get<bath::DiscreteSD>(sd);
        j["type"] = "discrete";
        j["modes"] = json::array();
        for (const auto& m : d.modes)
            j["modes"].push_back({m.omega, m.coupling});
    }
    j["unit"] = unit;
    return j;
}

void check_unit(const std::string& u, const std::string& path, std::initializer_list<const char*> allowed) {
    for (const char* a : allowed)
        if (u == a)
            return;
    fail(path, "unsupported unit '" + u + "'");
}

} // namespace

ModelFile parse_model(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("model file: invalid JSON: ") + e.what());
    }
    if (!j.is_object())
        fail("$", "top level must be an object");
    ModelFile m;
    m.name = opt<std::string>(j, "name", "", "$");
    m.energy_unit = opt<std::string>(j, "energy_unit", "au", "$");
    check_unit(m.energy_unit, "$.energy_unit", {"au", "ev"});
    m.time_unit = opt<std::string>(j, "time_unit", "fs", "$");
    check_unit(m.time_unit, "$.time_unit", {"au", "fs"});
    m.hamiltonian = matrix(need(j, "hamiltonian", "$"), "$.hamiltonian");
    const long n = m.hamiltonian.rows();
    if (j.contains("states")) {
        const json& s = j.at("states");
        if (!s.is_array() || static_cast<long>(s.size()) != n)
            fail("$.states", "expected one label per state");
        for (std::size_t i = 0; i < s.size(); ++i)
            m.states.push_back(text(s[i], "$.states[" + std::to_string(i) + "]"));
    }
    if (j.contains("renormalization"))
        m.renormalization = matrix(j.at("renormalization"), "$.renormalization", n);
    if (j.contains("dipole"))
        m.dipole = matrix(j.at("dipole"), "$.dipole", n);

    if (j.contains("initial_state")) {
        const json& s = j.at("initial_state");
        const std::string p = "$.initial_state";
        if (s.contains("populations")) {
            m.initial.kind = InitialConfig::Kind::Populations;
            const json& pops = s.at("populations");
            if (!pops.is_array() || static_cast<long>(pops.size()) != n)
                fail(p + ".populations", "expected one population per state");
            for (std::size_t i = 0; i < pops.size(); ++i)
                m.initial.populations.push_back(number(pops[i], p + ".populations"));
        } else if (s.contains("pure")) {
            m.initial.kind = InitialConfig::Kind::Pure;
            m.initial.index = integer(s.at("pure"), p + ".pure");
        } else if (s.contains("eigenstate")) {
            m.initial.kind = InitialConfig::Kind::Eigenstate;
            m.initial.index = integer(s.at("eigenstate"), p + ".eigenstate");
        } else if (s.contains("density")) {
            m.initial.kind = InitialConfig::Kind::Density;
            m.initial.density = matrix(s.at("density"), p + ".density", n);
        } else {
            fail(p, "expected one of populations, pure, eigenstate, density");
        }
        if ((m.initial.kind == InitialConfig::Kind::Pure || m.initial.kind == InitialConfig::Kind::Eigenstate) &&
            (m.initial.index < 0 || m.initial.index >= n))
            fail(p, "state index out of range");
    }

    if (j.contains("pulse")) {
        const json& s = j.at("pulse");
        const std::string p = "$.pulse";
        PulseConfig pc;
        pc.pi_pulse = opt<bool>(s, "pi_pulse", false, p);
        pc.omega = opt<double>(s, "omega", 0.0, p);
        pc.tau = number(need(s, "tau", p), p + ".tau");
        pc.t_start = opt<double>(s, "t_start", 0.0, p);
        if (pc.pi_pulse) {
            const json& tr = need(s, "transition", p);
            if (!tr.is_array() || tr.size() != 2)
                fail(p + ".transition", "expected [i, j]");
            pc.transition = {integer(tr[0], p + ".transition"), integer(tr[1], p + ".transition")};
            if (pc.transition.first < 0 || pc.transition.first >= n || pc.transition.second < 0 ||
                pc.transition.second >= n)
                fail(p + ".transition", "state index out of range");
            if (!s.contains("omega")) {
                const auto [a, b] = pc.transition;
                pc.omega = std::abs((m.hamiltonian(b, b) - m.hamiltonian(a, a)).real());
            }
        } else {
            pc.E0 = number(need(s, "E0", p), p + ".E0");
            pc.omega = number(need(s, "omega", p), p + ".omega");
        }
        if (!(pc.tau > 0.0))
            fail(p + ".tau", "must be positive");
        m.pulse = pc;
    }

    if (j.contains("baths")) {
        const json& bs = j.at("baths");
        if (!bs.is_array())
            fail("$.baths", "expected an array");
        for (std::size_t b = 0; b < bs.size(); ++b) {
            const std::string p = "$.baths[" + std::to_string(b) + "]";
            const json& s = bs[b];
            BathConfig bc;
            bc.coupling = matrix(need(s, "coupling", p), p + ".coupling", n);
            const json& sdj = need(s, "spectral_density", p);
            bc.sd = parse_sd(sdj, p + ".spectral_density");
            bc.sd_unit = opt<std::string>(sdj, "unit", "au", p + ".spectral_density");
            check_unit(bc.sd_unit, p + ".spectral_density.unit", {"au", "ev"});
            bc.temperature_K = opt<double>(s, "temperature_K", 298.0, p);
            bc.matsubara = opt<int>(s, "matsubara", 0, p);
            bc.discretize = opt<int>(s, "discretize", 0, p);
            bc.renormalize = opt<bool>(s, "renormalize", false, p);
            if (!(bc.temperature_K > 0.0))
                fail(p + ".temperature_K", "must be positive");
            if (bc.matsubara < 0 || bc.discretize < 0)
                fail(p, "matsubara and discretize must be nonnegative");
            try {
                bath::validate(bc.sd);
            } catch (const ConfigError& e) {
                fail(p + ".spectral_density", e.what());
            }
            m.baths.push_back(std::move(bc));
        }
    }

    if (j.contains("observables")) {
        const json& o = j.at("observables");
        m.basis = opt<std::string>(o, "basis", "site", "$.observables");
        check_unit(m.basis, "$.observables.basis", {"site", "eigen"});
        if (o.contains("coherences")) {
            const json& cs = o.at("coherences");
            if (!cs.is_array())
                fail("$.observables.coherences", "expected an array of [i, j] pairs");
            for (std::size_t c = 0; c < cs.size(); ++c) {
                const std::string p = "$.observables.coherences[" + std::to_string(c) + "]";
                if (!cs[c].is_array() || cs[c].size() != 2)
                    fail(p, "expected [i, j]");
                const int a = integer(cs[c][0], p), b = integer(cs[c][1], p);
                if (a < 0 || a >= n || b < 0 || b >= n)
                    fail(p, "state index out of range");
                m.coherences.emplace_back(a, b);
            }
        }
    }

    if (j.contains("run")) {
        const json& r = j.at("run");
        const std::string p = "$.run";
        RunConfig rc;
        rc.backend = opt<std::string>(r, "backend", rc.backend, p);
        check_unit(rc.backend, p + ".backend", {"dense", "tt"});
        rc.level = opt<int>(r, "level", rc.level, p);
        rc.n_max = opt<int>(r, "n_max", rc.n_max, p);
        rc.integrator = opt<std::string>(r, "integrator", rc.integrator, p);
        check_unit(rc.integrator, p + ".integrator", {"rk4", "rk45", "ksl"});
        rc.dt = opt<double>(r, "dt", rc.dt, p);
        rc.t_final = opt<double>(r, "t_final", rc.t_final, p);
        rc.output_stride = opt<int>(r, "output_stride", rc.output_stride, p);
        rc.eps = opt<double>(r, "eps", rc.eps, p);
        rc.rmax = opt<int>(r, "rmax", rc.rmax, p);
        rc.rank_refresh = opt<int>(r, "rank_refresh", rc.rank_refresh, p);
        rc.pad_rank = opt<int>(r, "pad_rank", rc.pad_rank, p);
        rc.output = opt<std::string>(r, "output", rc.output, p);
        rc.seed = opt<unsigned>(r, "seed", rc.seed, p);
        validate_run(rc, p);
        m.run = rc;
    }
    return m;
}

void validate_run(const RunConfig& rc, const std::string& p) {
    if (rc.backend != "dense" && rc.backend != "tt")
        fail(p + ".backend", "expected dense or tt");
    if (rc.integrator != "rk4" && rc.integrator != "rk45" && rc.integrator != "ksl")
        fail(p + ".integrator", "expected rk4, rk45 or ksl");
    if (!(rc.dt > 0.0))
        fail(p + ".dt", "must be positive");
    if (rc.t_final < 0.0)
        fail(p + ".t_final", "must be nonnegative");
    if (rc.level < 0 || rc.n_max < 0 || rc.rmax < 1 || rc.output_stride < 1)
        fail(p, "level, n_max must be >= 0 and rmax, output_stride >= 1");
    if (rc.backend == "dense" && rc.integrator == "ksl")
        fail(p + ".integrator", "ksl requires the tt backend");
    if (rc.backend == "tt" && rc.integrator != "ksl")
        fail(p + ".integrator", "the tt backend integrates with ksl");
}

ModelFile load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open model file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_model(ss.str());
}

std::string serialize_model(const ModelFile& m) {
    json j;
    if (!m.name.empty())
        j["name"] = m.name;
    j["energy_unit"] = m.energy_unit;
    j["time_unit"] = m.time_unit;
    if (!m.states.empty())
        j["states"] = m.states;
    j["hamiltonian"] = matrix_json(m.hamiltonian);
    if (m.renormalization.size() > 0)
        j["renormalization"] = matrix_json(m.renormalization);
    if (m.dipole.size() > 0)
        j["dipole"] = matrix_json(m.dipole);
    json init;
    switch (m.initial.kind) {
    case InitialConfig::Kind::Populations:
        init["populations"] = m.initial.populations;
        break;
    case InitialConfig::Kind::Pure:
        init["pure"] = m.initial.index;
        break;
    case InitialConfig::Kind::Eigenstate:
        init["eigenstate"] = m.initial.index;
        break;
    case InitialConfig::Kind::Density:
        init["density"] = matrix_json(m.initial.density);
        break;
    }
    j["initial_state"] = init;
    if (m.pulse) {
        json p;
        p["pi_pulse"] = m.pulse->pi_pulse;
        p["omega"] = m.pulse->omega;
        p["tau"] = m.pulse->tau;
        p["t_start"] = m.pulse->t_start;
        if (m.pulse->pi_pulse)
            p["transition"] = {m.pulse->transition.first, m.pulse->transition.second};
        else
            p["E0"] = m.pulse->E0;
        j["pulse"] = p;
    }
    if (!m.baths.empty()) {
        json bs = json::array();
        for (const auto& b : m.baths) {
            json bj;
            bj["coupling"] = matrix_json(b.coupling);
            bj["spectral_density"] = sd_json(b.sd, b.sd_unit);
            bj["temperature_K"] = b.temperature_K;
            bj["matsubara"] = b.matsubara;
            bj["discretize"] = b.discretize;
            bj["renormalize"] = b.renormalize;
            bs.push_back(bj);
        }
        j["baths"] = bs;
    }
    json obs;
    obs["basis"] = m.basis;
    obs["coherences"] = json::array();
    for (const auto& [a, b] : m.coherences)
        obs["coherences"].push_back({a, b});
    j["observables"] = obs;
    if (m.run) {
        const RunConfig& r = *m.run;
        j["run"] = {{"backend", r.backend},     {"level", r.level},
                    {"n_max", r.n_max},         {"integrator", r.integrator},
                    {"dt", r.dt},               {"t_final", r.t_final},
                    {"output_stride", r.output_stride},
                    {"eps", r.eps},             {"rmax", r.rmax},
                    {"rank_refresh", r.rank_refresh},
                    {"pad_rank", r.pad_rank},   {"output", r.output},
                    {"seed", r.seed}};
    }
    return j.dump(2);
}

double energy_to_au(const ModelFile& m, double x) { return m.energy_unit == "ev" ? units::ev_to_au(x) : x; }

double time_to_au(const ModelFile& m, double x) { return m.time_unit == "fs" ? units::fs_to_au(x) : x; }

bath::SpectralDensity sd_in_au(const BathConfig& b) {
    if (b.sd_unit == "au")
        return b.sd;
    const double e = units::ev_to_au(1.0);
    bath::SpectralDensity sd = b.sd;
    if (auto* o = std::get_if<bath::LorentzianOhmicSD>(&sd)) {
        for (auto& t : o->terms) {
            t.p *= e * e * e * e;
            t.omega *= e;
            t.gamma *= e;
        }
    } else if (auto* s = std::get_if<bath::LorentzianSuperOhmicSD>(&sd)) {
        for (auto& t : s->terms) {
            t.p *= std::pow(e, 6);
            t.omega1 *= e;
            t.gamma1 *= e;
            t.omega2 *= e;
            t.gamma2 *= e;
        }
    } else if (auto* d = std::get_if<bath::DiscreteSD>(&sd)) {
        for (auto& md : d->modes) {
            md.omega *= e;
            md.coupling *= std::pow(e, 1.5);
        }
    }
    return sd;
}

bath::SpectralDensity effective_sd(const BathConfig& b) {
    const auto sd = sd_in_au(b);
    if (b.discretize > 0)
        return bath::discretize_makri(sd, b.discretize);
    return sd;
}

SystemModel build_model(const ModelFile& m) {
    SystemModel s;
    const double e = energy_to_au(m, 1.0);
    s.H = m.hamiltonian * e;
    const long n = s.H.rows();
    s.H_ren = m.renormalization.size() > 0 ? CMat(m.renormalization * e) : CMat::Zero(n, n);
    if (m.dipole.size() > 0)
        s.dipole = m.dipole;
    for (const auto& b : m.baths) {
        const auto sd = effective_sd(b);
        bath::BathSpec spec{sd, b.temperature_K, b.matsubara, 0};
        s.baths.push_back({b.coupling, bath::expand_correlation(spec)});
        if (b.renormalize)
            s.H_ren += bath::reorganization_energy(sd) * b.coupling;
    }
    if (m.pulse) {
        PulseField f;
        f.omega = energy_to_au(m, m.pulse->omega);
        f.tau = time_to_au(m, m.pulse->tau);
        f.t_start = time_to_au(m, m.pulse->t_start);
        if (m.pulse->pi_pulse) {
            if (s.dipole.size() == 0)
                throw ConfigError("model file: $.pulse: a pi pulse needs a dipole matrix");
            const auto [a, b] = m.pulse->transition;
            f.E0 = pi_pulse_amplitude(std::abs(s.dipole(a, b)), f.tau);
        } else {
            f.E0 = m.pulse->E0;
        }
        s.pulse = f;
    }
    s.validate();
    return s;
}

namespace {

CMat eigenvectors(const SystemModel& model) {
    const CMat h = model.H + model.H_ren;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    CMat U = es.eigenvectors();
    for (Eigen::Index c = 0; c < U.cols(); ++c) {
        Eigen::Index arg = 0;
        U.col(c).cwiseAbs().maxCoeff(&arg);
        const cplx u = U(arg, c);
        U.col(c) *= std::conj(u) / std::abs(u);
    }
    return U;
}

} // namespace

CMat initial_density(const ModelFile& m, const SystemModel& model) {
    const long n = model.dim();
    CMat rho = CMat::Zero(n, n);
    switch (m.initial.kind) {
    case InitialConfig::Kind::Populations:
        for (long i = 0; i < n; ++i)
            rho(i, i) = m.initial.populations[i];
        break;
    case InitialConfig::Kind::Pure:
        rho(m.initial.index, m.initial.index) = 1.0;
        break;
    case InitialConfig::Kind::Eigenstate: {
        const CMat U = eigenvectors(model);
        rho = U.col(m.initial.index) * U.col(m.initial.index).adjoint();
        break;
    }
    case InitialConfig::Kind::Density:
        rho = m.initial.density;
        break;
    }
    if (std::abs(rho.trace() - 1.0) > 1e-10)
        throw ConfigError("model file: $.initial_state: density matrix must have unit trace");
    return rho;
}

CMat observation_basis(const ModelFile& m, const SystemModel& model) {
    if (m.basis == "eigen")
        return eigenvectors(model);
    return CMat::Identity(model.dim(), model.dim());
}

} // namespace heomtt::io
