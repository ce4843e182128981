// Command-line driver: constructs the ring families, computes existence
// thresholds, integrates radial and full trajectories, and sweeps the shape
// parameter, with CSV/JSON output for plotting and regression.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lj/lj.hpp"

namespace {

using json = nlohmann::ordered_json;

json report_to_json(const lj::VerificationReport& rep) {
    json j;
    j["residual_max"] = rep.residual_max;
    j["energy_drift"] = rep.energy_drift;
    j["angmom_drift"] = rep.angmom_drift;
    j["geometry"] = lj::to_string(rep.geometry);
    j["shape_preserved"] = rep.shape_preserved;
    j["passed"] = rep.passed;
    j["tolerances"] = json::object();
    for (const auto& [key, value] : rep.tolerances) j["tolerances"][key] = value;
    return j;
}

constexpr int kExitPass = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitBadInput = 2;
constexpr int kExitSearchFail = 3;

struct Args {
    double alpha = 6.0;
    double beta = 12.0;
    int n_ring = 2;
    std::string family = "2N";
    double lambda = std::numeric_limits<double>::quiet_NaN();
    double lambda_min = 2.0;
    double lambda_max = 10.0;
    double step = 0.1;
    double h = std::numeric_limits<double>::quiet_NaN();
    double t_end = std::numeric_limits<double>::quiet_NaN();
    double dt = std::numeric_limits<double>::quiet_NaN();
    std::string out;
    std::string config;
    std::vector<std::string> tol;
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

lj::Family parse_family(const std::string& s) {
    if (s == "2N") return lj::Family::TwoPlusN;
    if (s == "3N") return lj::Family::ThreePlusN;
    throw lj::DomainError("family must be 2N or 3N, got '" + s + "'");
}

double tol_or(const std::map<std::string, double>& tols, const std::string& key, double dflt) {
    auto it = tols.find(key);
    return it == tols.end() ? dflt : it->second;
}

std::map<std::string, double> parse_tols(const std::vector<std::string>& entries) {
    std::map<std::string, double> tols;
    for (const auto& e : entries) {
        const auto pos = e.find('=');
        if (pos == std::string::npos)
            throw lj::DomainError("--tol expects key=value, got '" + e + "'");
        tols[e.substr(0, pos)] = std::stod(e.substr(pos + 1));
    }
    return tols;
}

// Flags win over config-file values: only options the user did not pass get
// overwritten from the JSON file.
void apply_config(CLI::App* cmd, Args& a) {
    if (a.config.empty()) return;
    std::ifstream in(a.config);
    if (!in) throw lj::DomainError("config file not readable: " + a.config);
    json cfg;
    try {
        in >> cfg;
    } catch (const std::exception& e) {
        throw lj::DomainError(std::string("config file is not valid JSON: ") + e.what());
    }
    const auto take = [&](const char* key, auto& field) {
        const auto* opt = cmd->get_option_no_throw(std::string("--") + key);
        if (opt != nullptr && opt->count() > 0) return;  // flag wins
        if (cfg.contains(key)) cfg.at(key).get_to(field);
    };
    take("alpha", a.alpha);
    take("beta", a.beta);
    take("n", a.n_ring);
    take("family", a.family);
    take("lambda", a.lambda);
    take("lambda-min", a.lambda_min);
    take("lambda-max", a.lambda_max);
    take("step", a.step);
    take("h", a.h);
    take("t-end", a.t_end);
    take("dt", a.dt);
    take("out", a.out);
}

void write_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw lj::DomainError("cannot open output file: " + tmp.string());
        out << content;
        if (!out.good()) {
            fs::remove(tmp);
            throw lj::DomainError("write failed: " + tmp.string());
        }
    }
    fs::rename(tmp, target);
}

void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty())
        std::fputs(content.c_str(), stdout);
    else
        write_atomic(out_path, content);
}

void require_lambda(const Args& a) {
    if (!std::isfinite(a.lambda))
        throw lj::DomainError("missing --lambda (or 'lambda' in the config file)");
}

double shape_deviation(const std::vector<lj::SystemState>& states) {
    if (states.empty()) return 0.0;
    const auto& first = states.front().bodies;
    double worst = 0.0;
    for (const auto& st : states) {
        for (std::size_t i = 0; i < st.bodies.size(); ++i)
            for (std::size_t j = i + 1; j < st.bodies.size(); ++j) {
                const double d0 = lj::norm(first[i].position - first[j].position);
                const double d = lj::norm(st.bodies[i].position - st.bodies[j].position);
                const double scale = lj::norm(st.bodies[0].position - st.bodies[1].position) /
                                     lj::norm(first[0].position - first[1].position);
                worst = std::max(worst, std::abs(d - d0 * scale) / d0);
            }
    }
    return worst;
}

int cmd_verify_circular(Args& a) {
    require_lambda(a);
    const lj::PotentialParams p(a.alpha, a.beta);
    const lj::Family family = parse_family(a.family);
    const auto tols = parse_tols(a.tol);
    const double residual_tol = tol_or(tols, "residual", 1e-10);

    if (a.lambda < 2.0)
        throw lj::DomainError("lambda=" + fmt(a.lambda) + " below the verified domain lambda >= 2");
    const bool two_pole = family == lj::Family::TwoPlusN;
    const double lam_threshold =
        two_pole ? lj::find_lambda1(a.n_ring, p) : lj::find_lambda2(a.n_ring, p);
    if (a.lambda < lam_threshold)
        throw lj::DomainError("lambda=" + fmt(a.lambda) + " below the existence threshold " +
                              (two_pole ? "lambda1=" : "lambda2=") + fmt(lam_threshold) +
                              " for family " + a.family);

    const auto sol = lj::make_circular_solution(family, a.lambda, a.n_ring, p);
    const double residual = lj::circular_residual(sol);

    std::vector<lj::SystemState> states;
    const double period = 2.0 * M_PI / sol.omega0;
    for (int k = 0; k < 10; ++k)
        states.push_back(lj::circular_state_at(sol, period * k / 10.0));
    lj::VerificationReport rep;
    rep.residual_max = residual;
    rep.geometry = lj::classify_geometry(states);
    rep.shape_preserved = shape_deviation(states) < 1e-12;
    rep.tolerances["residual"] = residual_tol;
    rep.passed = residual < residual_tol;

    std::printf("family=%s lambda=%s n=%d alpha=%s beta=%s\n", a.family.c_str(),
                fmt(a.lambda).c_str(), a.n_ring, fmt(a.alpha).c_str(), fmt(a.beta).c_str());
    std::printf("r0=%s\n", fmt(sol.config.r0).c_str());
    std::printf("omega0=%s\n", fmt(sol.omega0).c_str());
    std::printf("residual=%s\n", fmt(residual).c_str());
    std::printf("geometry=%s\n", lj::to_string(rep.geometry).c_str());
    std::printf("passed=%s\n", rep.passed ? "true" : "false");

    if (!a.out.empty()) {
        json j;
        j["command"] = "verify-circular";
        j["params"] = {{"alpha", a.alpha}, {"beta", a.beta},       {"n", a.n_ring},
                       {"family", a.family}, {"lambda", a.lambda}};
        j["results"] = {{"r0", sol.config.r0}, {"omega0", sol.omega0}};
        j["report"] = report_to_json(rep);
        emit(a.out, j.dump(2) + "\n");
    }
    return rep.passed ? kExitPass : kExitVerifyFail;
}

int cmd_thresholds(Args& a) {
    const lj::PotentialParams p(a.alpha, a.beta);
    const auto rep = lj::compute_thresholds(a.n_ring, p);
    const double exp_inv = 1.0 / (p.beta - p.alpha);
    const double target1 =
        std::pow(lj::theta_sum(p.beta, a.n_ring) / lj::theta_sum(p.alpha, a.n_ring), exp_inv);
    const double target2 = std::max(target1, std::pow(p.beta / p.alpha, exp_inv));
    const auto cap0 = lj::cap_radius(rep.lambda0, a.n_ring, p);

    std::printf("n=%d alpha=%s beta=%s\n", a.n_ring, fmt(a.alpha).c_str(), fmt(a.beta).c_str());
    std::printf("lambda1=%s  g1(lambda1)=%s target=%s\n", fmt(rep.lambda1).c_str(),
                fmt(lj::g1(rep.lambda1, a.n_ring, p, lj::Domain::Exploratory)).c_str(),
                fmt(target1).c_str());
    std::printf("lambda2=%s  g2(lambda2)=%s target=%s\n", fmt(rep.lambda2).c_str(),
                fmt(lj::g2(rep.lambda2, a.n_ring, p, lj::Domain::Exploratory)).c_str(),
                fmt(target2).c_str());
    std::printf("lambda0=%s  inequality_holds=%s capital_lambda=%s rbar=%s\n",
                fmt(rep.lambda0).c_str(),
                lj::admissibility_inequality_holds(rep.lambda0, a.n_ring, p) ? "true" : "false",
                cap0 ? fmt(*cap0).c_str() : "none",
                fmt(lj::equilibrium_radius(rep.lambda0, a.n_ring, p)).c_str());

    if (!a.out.empty()) {
        json j;
        j["command"] = "thresholds";
        j["params"] = {{"alpha", a.alpha}, {"beta", a.beta}, {"n", a.n_ring}};
        j["results"] = {{"lambda1", rep.lambda1},
                        {"lambda2", rep.lambda2},
                        {"lambda0", rep.lambda0},
                        {"grid_resolution", rep.grid_resolution}};
        emit(a.out, j.dump(2) + "\n");
    }
    return kExitPass;
}

int cmd_radial(Args& a) {
    require_lambda(a);
    const lj::PotentialParams p(a.alpha, a.beta);
    const auto tols = parse_tols(a.tol);
    const double residual_tol = tol_or(tols, "residual", 1e-6);
    if (a.lambda < 2.0)
        throw lj::DomainError("lambda=" + fmt(a.lambda) + " below the verified domain lambda >= 2");

    const double rbar = lj::equilibrium_radius(a.lambda, a.n_ring, p);
    const auto cap = lj::cap_radius(a.lambda, a.n_ring, p);
    if (!cap)
        throw lj::DomainError("cap radius does not exist at lambda=" + fmt(a.lambda) +
                              "; no admissible energy window");
    const double psi_bottom = lj::effective_potential(rbar, a.lambda, a.n_ring, p);
    const double psi_cap = lj::effective_potential(*cap, a.lambda, a.n_ring, p);
    const double h = std::isfinite(a.h) ? a.h : 0.5 * (psi_bottom + psi_cap);
    if (!(psi_bottom < h && h < psi_cap))
        throw lj::DomainError("h=" + fmt(h) + " outside the admissible window (Psi(rbar)=" +
                              fmt(psi_bottom) + ", Psi(cap)=" + fmt(psi_cap) + ")");

    const double tau = lj::radial_period(h, a.lambda, a.n_ring, p);
    const double t_end = std::isfinite(a.t_end) ? a.t_end : tau;
    const double dt = std::isfinite(a.dt) ? a.dt : t_end / 1024.0;
    const auto orbit = lj::integrate_radial(h, a.lambda, a.n_ring, p, t_end, dt);

    const auto base =
        lj::make_ring_configuration(lj::Family::TwoPlusN, a.lambda, 1.0, a.n_ring, p);
    const auto states = lj::reconstruct_homographic(orbit, base);

    lj::VerificationReport rep;
    rep.residual_max = lj::homographic_residual(orbit, base);
    for (const auto& s : orbit.samples)
        rep.energy_drift = std::max(
            rep.energy_drift, std::abs(0.5 * s.r_dot * s.r_dot +
                                       lj::effective_potential(s.r, a.lambda, a.n_ring, p) - h));
    const lj::Vec3 l0 = lj::angular_momentum(states.front());
    for (const auto& st : states)
        rep.angmom_drift = std::max(rep.angmom_drift, lj::norm(lj::angular_momentum(st) - l0));
    rep.geometry = lj::classify_geometry(states);
    rep.shape_preserved = shape_deviation(states) < 1e-10;
    rep.tolerances["residual"] = residual_tol;
    rep.passed = rep.residual_max < residual_tol;

    json j;
    j["command"] = "radial";
    j["params"] = {{"alpha", a.alpha}, {"beta", a.beta}, {"n", a.n_ring},
                   {"lambda", a.lambda}, {"h", h}};
    j["window"] = {{"psi_rbar", psi_bottom}, {"psi_cap", psi_cap},
                   {"rbar", rbar},           {"capital_lambda", *cap}};
    j["results"] = {{"r_min", orbit.r_min},
                    {"r_max", orbit.r_max},
                    {"period_tau", orbit.period_tau}};
    j["report"] = report_to_json(rep);

    std::string csv = "t,r,r_dot,omega\n";
    for (const auto& s : orbit.samples)
        csv += fmt(s.t) + "," + fmt(s.r) + "," + fmt(s.r_dot) + "," + fmt(s.omega) + "\n";

    if (a.out.empty()) {
        std::fputs(j.dump(2).c_str(), stderr);
        std::fputc('\n', stderr);
        std::fputs(csv.c_str(), stdout);
    } else {
        write_atomic(a.out, csv);
        std::fputs(j.dump(2).c_str(), stdout);
        std::fputc('\n', stdout);
    }
    return rep.passed ? kExitPass : kExitVerifyFail;
}

int cmd_integrate(Args& a) {
    require_lambda(a);
    const lj::PotentialParams p(a.alpha, a.beta);
    const lj::Family family = parse_family(a.family);
    if (a.lambda < 2.0)
        throw lj::DomainError("lambda=" + fmt(a.lambda) + " below the verified domain lambda >= 2");
    const auto sol = lj::make_circular_solution(family, a.lambda, a.n_ring, p);
    const double t_end = std::isfinite(a.t_end) ? a.t_end : 2.0 * M_PI / sol.omega0;
    const double dt = std::isfinite(a.dt) ? a.dt : t_end / 1000.0;

    lj::IntegrationSettings settings;
    settings.method = lj::Method::AdaptiveRk;
    settings.rel_tol = tol_or(parse_tols(a.tol), "rel", 1e-10);
    settings.abs_tol = 1e-12;
    settings.max_step = dt;
    settings.t_end = t_end;
    const auto samples = lj::integrate(lj::circular_state_at(sol, 0.0), p, settings);

    const double e0 = samples.front().energy;
    const lj::Vec3 l0 = samples.front().angular_momentum;
    double e_drift = 0.0, l_drift = 0.0;
    for (const auto& s : samples) {
        e_drift = std::max(e_drift, std::abs(s.energy - e0) / std::max(1.0, std::abs(e0)));
        l_drift = std::max(l_drift, lj::norm(s.angular_momentum - l0));
    }

    std::string csv = "t,energy,Lx,Ly,Lz";
    const std::size_t nb = samples.front().state.bodies.size();
    for (std::size_t i = 0; i < nb; ++i) {
        const std::string k = std::to_string(i);
        csv += ",x" + k + ",y" + k + ",z" + k + ",vx" + k + ",vy" + k + ",vz" + k;
    }
    csv += "\n";
    for (const auto& s : samples) {
        csv += fmt(s.time) + "," + fmt(s.energy) + "," + fmt(s.angular_momentum.x) + "," +
               fmt(s.angular_momentum.y) + "," + fmt(s.angular_momentum.z);
        for (const auto& b : s.state.bodies) {
            csv += "," + fmt(b.position.x) + "," + fmt(b.position.y) + "," + fmt(b.position.z);
            csv += "," + fmt(b.velocity.x) + "," + fmt(b.velocity.y) + "," + fmt(b.velocity.z);
        }
        csv += "\n";
    }
    std::fprintf(stderr, "steps=%zu energy_drift=%s angmom_drift=%s\n", samples.size(),
                 fmt(e_drift).c_str(), fmt(l_drift).c_str());
    emit(a.out, csv);
    return kExitPass;
}

int cmd_sweep(Args& a) {
    const lj::PotentialParams p(a.alpha, a.beta);
    const lj::Family family = parse_family(a.family);
    if (a.lambda_min < 2.0)
        throw lj::DomainError("lambda-min=" + fmt(a.lambda_min) +
                              " below the verified domain lambda >= 2");
    if (!(a.step > 0.0) || a.lambda_max < a.lambda_min)
        throw lj::DomainError("need step > 0 and lambda-max >= lambda-min");

    const std::size_t rows =
        static_cast<std::size_t>(std::floor((a.lambda_max - a.lambda_min) / a.step + 1e-9)) + 1;
    std::vector<std::string> lines(rows);
    std::atomic<std::size_t> next{0};
    const auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= rows) return;
            const double lam = a.lambda_min + static_cast<double>(i) * a.step;
            const double v_g1 = lj::g1(lam, a.n_ring, p);
            const double v_g2 = lj::g2(lam, a.n_ring, p);
            const double r0 = lj::circular_radius(family, lam, a.n_ring, p);
            const double w2 = lj::omega0_squared(family, lam, a.n_ring, p);
            const double rbar = lj::equilibrium_radius(lam, a.n_ring, p);
            const auto cap = lj::cap_radius(lam, a.n_ring, p);
            const bool ineq = lj::admissibility_inequality_holds(lam, a.n_ring, p);
            lines[i] = fmt(lam) + "," + fmt(v_g1) + "," + fmt(v_g2) + "," + fmt(r0) + "," +
                       fmt(w2) + "," + fmt(rbar) + "," + (cap ? fmt(*cap) : "") + "," +
                       (ineq ? "true" : "false") + "\n";
        }
    };
    const unsigned hw = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < hw; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    std::string csv = "lambda,g1,g2,r0,omega0_sq,rbar,capital_lambda,ineq220\n";
    for (const auto& line : lines) csv += line;
    emit(a.out, csv);
    return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Circular and non-circular ring solutions of the generalized "
                 "Lennard-Jones N-body problem"};
    app.require_subcommand(1);
    Args a;

    const auto add_common = [&](CLI::App* cmd, bool with_family) {
        cmd->add_option("--alpha", a.alpha, "attractive exponent (0 < alpha < beta)");
        cmd->add_option("--beta", a.beta, "repulsive exponent");
        cmd->add_option("--n", a.n_ring, "ring body count N (>= 2)");
        if (with_family) cmd->add_option("--family", a.family, "configuration family: 2N or 3N");
        cmd->add_option("--out", a.out, "output file (atomic write); stdout when omitted");
        cmd->add_option("--config", a.config, "JSON config file; explicit flags win");
        cmd->add_option("--tol", a.tol, "tolerance override key=value (repeatable)");
        return cmd;
    };

    auto* vc = add_common(app.add_subcommand("verify-circular",
                                             "construct a circular solution and verify it"),
                          true);
    vc->add_option("--lambda", a.lambda, "shape parameter (>= 2)");

    add_common(app.add_subcommand("thresholds", "existence thresholds lambda1/lambda2/lambda0"),
               false);

    auto* rad = add_common(
        app.add_subcommand("radial", "radial orbit, period and reconstructed trajectory"), false);
    rad->set_help_flag("--help", "print help");  // frees -h/--h for the energy flag
    rad->add_option("--lambda", a.lambda, "shape parameter (>= 2)");
    rad->add_option("--h", a.h, "radial energy; default: window midpoint");
    rad->add_option("--t-end", a.t_end, "integration horizon; default: one radial period");
    rad->add_option("--dt", a.dt, "sample spacing; default: t-end/1024");

    auto* integ = add_common(
        app.add_subcommand("integrate", "integrate the full system from the circular state"),
        true);
    integ->add_option("--lambda", a.lambda, "shape parameter (>= 2)");
    integ->add_option("--t-end", a.t_end, "integration horizon; default: one revolution");
    integ->add_option("--dt", a.dt, "max step / sample spacing; default: t-end/1000");

    auto* sw = add_common(app.add_subcommand("sweep", "per-lambda quantities as CSV"), true);
    sw->add_option("--lambda-min", a.lambda_min, "sweep start (default 2)");
    sw->add_option("--lambda-max", a.lambda_max, "sweep end (default 10)");
    sw->add_option("--step", a.step, "sweep step (default 0.1)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitBadInput;
    }

    try {
        CLI::App* active = app.get_subcommands().front();
        apply_config(active, a);
        const std::string name = active->get_name();
        if (name == "verify-circular") return cmd_verify_circular(a);
        if (name == "thresholds") return cmd_thresholds(a);
        if (name == "radial") return cmd_radial(a);
        if (name == "integrate") return cmd_integrate(a);
        if (name == "sweep") return cmd_sweep(a);
        return kExitBadInput;
    } catch (const lj::SearchError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitSearchFail;
    } catch (const lj::IntegrationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitSearchFail;
    } catch (const lj::AdmissibilityError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitSearchFail;
    } catch (const lj::ExistenceError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitBadInput;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitBadInput;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitBadInput;
    }
}
