#include "gwlife/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include "gwlife/errors.hpp"
#include "gwlife/extinction.hpp"
#include "gwlife/model_io.hpp"
#include "gwlife/report_json.hpp"
#include "gwlife/simulator.hpp"
#include "gwlife/spectral.hpp"
#include "gwlife/truncation.hpp"

#ifndef GWLIFE_VERSION
#define GWLIFE_VERSION "0.0.0"
#endif

namespace gwlife::cli {

namespace {

using nlohmann::ordered_json;

struct Options {
    std::string command;
    std::string spec;
    std::string out;
    double tol = 1e-12;
    std::size_t K = 200;
    std::size_t k_max = 50;
    std::size_t replicates = 1000;
    std::size_t horizon = 100;
    std::uint64_t seed = 1;
    std::uint64_t cap = 1'000'000;
    std::vector<std::size_t> generations;
    std::string trajectory_csv;
    unsigned threads = 0;
    std::size_t sim_replicates = 2000;  // validate only
};

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

class Session {
public:
    Session(Options opts, std::ostream& out, std::ostream& err)
        : opts_(std::move(opts)), out_(out), err_(err), start_(std::chrono::steady_clock::now()),
          started_utc_(utc_now()) {}

    int dispatch() {
        const ModelSpec spec = load_model_spec(opts_.spec);
        const Model model = build_model(spec);
        spec_json_ = to_json(spec);
        if (opts_.command == "analyze") return analyze(model);
        if (opts_.command == "truncate") return truncate(model);
        if (opts_.command == "extinction") return extinction(model);
        if (opts_.command == "simulate") return simulate(model);
        if (opts_.command == "validate") return validate(model);
        throw std::invalid_argument("unknown command " + opts_.command);
    }

private:
    ordered_json parameters() const {
        ordered_json p;
        p["tol"] = opts_.tol;
        if (opts_.command == "analyze") p["K"] = opts_.K;
        if (opts_.command == "truncate") p["k_max"] = opts_.k_max;
        if (opts_.command == "validate") {
            p["K"] = opts_.K;
            p["k_max"] = opts_.k_max;
            p["seed"] = opts_.seed;
            p["replicates"] = opts_.sim_replicates;
        }
        if (opts_.command == "simulate") {
            p["replicates"] = opts_.replicates;
            p["horizon"] = opts_.horizon;
            p["seed"] = opts_.seed;
            p["cap"] = opts_.cap;
            p["generations"] = opts_.generations;
        }
        return p;
    }

    // The reproducible part of the run manifest; wall-clock data goes to the sidecar.
    ordered_json manifest() const {
        ordered_json m;
        m["command"] = opts_.command;
        m["spec_path"] = opts_.spec;
        m["parameters"] = parameters();
        m["tool_version"] = GWLIFE_VERSION;
        return m;
    }

    ordered_json document() const {
        ordered_json doc;
        doc["manifest"] = manifest();
        doc["model"] = spec_json_;
        return doc;
    }

    void emit(const std::string& text) {
        if (opts_.out.empty()) {
            out_ << text;
            return;
        }
        write_file(opts_.out, text);
        outputs_.push_back(opts_.out);
        write_sidecar();
    }

    void write_file(const std::string& path, const std::string& text) {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + path);
        f << text;
    }

    void write_sidecar() {
        ordered_json m = manifest();
        m["started_utc"] = started_utc_;
        m["wall_clock_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        m["outputs"] = outputs_;
        write_file(opts_.out + ".manifest.json", m.dump(2) + "\n");
    }

    void emit_json(const ordered_json& doc) { emit(doc.dump(2) + "\n"); }

    std::size_t invariant_size(const LifetimeModel& life) const {
        std::size_t K = opts_.K;
        if (auto d = life.support_max()) K = std::min(K, *d + 1);
        return K;
    }

    int analyze(const Model& model) {
        const auto& [off, life] = model;
        ordered_json doc = document();
        const SpectralReport rep = convergence_radius(off, life, opts_.tol);
        doc["spectral"] = to_json(rep);
        doc["boundary"] = to_json(F_at_radius(life, off.mean()));
        doc["recurrence"] = to_json(classify(off, life));
        doc["extinction"] = to_json(extinction_probability(off, life, std::min(opts_.tol, 1e-8)));
        const std::size_t K = invariant_size(life);
        if (rep.radius_case == RadiusCase::SubcriticalBoundary) {
            doc["invariant_system"] = nullptr;
            doc["invariant_note"] = "absent: ml < 1 and F(R) < 1 (transient, gamma = R)";
        } else if (K < 2) {
            doc["invariant_system"] = nullptr;
            doc["invariant_note"] = "absent: lifetime support too short";
        } else {
            doc["invariant_system"] = to_json(invariant_system(off, life, K));
            doc["invariant_note"] = "K = " + std::to_string(K);
        }
        emit_json(doc);
        return kOk;
    }

    int truncate(const Model& model) {
        const auto& [off, life] = model;
        if (opts_.k_max < 1 || opts_.k_max > 10'000) throw std::invalid_argument("k_max must lie in [1, 10000]");
        const RadiusSequence scalar = radius_sequence(off, life, opts_.k_max, RadiusMethod::ScalarRoot);
        std::ostringstream csv;
        csv << "k,scalar_root,power_iteration\n";
        for (std::size_t i = 0; i < scalar.k_values.size(); ++i) {
            const std::size_t k = scalar.k_values[i];
            std::string power;
            try {
                power = format_double(truncated_radius(off, life, k, RadiusMethod::PowerIteration));
            } catch (const ConvergenceError&) {
                power = "nan";
            }
            csv << k << ',' << format_double(scalar.rho[i]) << ',' << power << '\n';
        }
        const double rho = convergence_radius(off, life, opts_.tol).rho;
        csv << "analytic," << format_double(rho) << ',' << format_double(rho) << '\n';
        emit(csv.str());
        return kOk;
    }

    int extinction(const Model& model) {
        const auto& [off, life] = model;
        ordered_json doc = document();
        const ExtinctionReport rep = extinction_probability(off, life, std::min(opts_.tol, 1e-8));
        doc["extinction"] = to_json(rep);
        doc["typewise"] = typewise_extinction(off, life, rep.q, 10);
        emit_json(doc);
        return kOk;
    }

    int simulate(const Model& model) {
        const auto& [off, life] = model;
        SimConfig cfg;
        cfg.replicates = opts_.replicates;
        cfg.master_seed = opts_.seed;
        cfg.population_cap = opts_.cap;
        cfg.threads = opts_.threads;
        std::size_t horizon = opts_.horizon;
        for (std::size_t g : opts_.generations) horizon = std::max(horizon, g);
        cfg.max_generations = horizon;

        std::optional<double> rho;
        if (!opts_.generations.empty()) {
            try {
                rho = convergence_radius(off, life).rho;
            } catch (const IndeterminateError&) {
                rho.reset();
            }
        }
        const Simulator sim(off, life, cfg);
        const SimulationSummary summary = sim.run(horizon, opts_.generations, rho);

        if (!opts_.trajectory_csv.empty()) {
            const Trajectory tr = sim.trajectory(0, horizon);
            std::ostringstream csv;
            csv << "generation,age,count\n";
            for (std::size_t n = 0; n < tr.generations.size(); ++n) {
                for (std::size_t a = 0; a < tr.generations[n].size(); ++a) {
                    csv << n << ',' << a << ',' << tr.generations[n][a] << '\n';
                }
            }
            write_file(opts_.trajectory_csv, csv.str());
            outputs_.push_back(opts_.trajectory_csv);
        }

        ordered_json doc = document();
        doc["summary"] = to_json(summary);
        emit_json(doc);
        if (static_cast<double>(summary.capped) > 0.99 * static_cast<double>(summary.replicates)) {
            err_ << "population cap hit in " << summary.capped << " of " << summary.replicates
                 << " replicates; raise --cap\n";
            return kCapSaturated;
        }
        return kOk;
    }

    struct Check {
        std::string name;
        std::string status;  // pass, fail, skipped
        double residual = 0.0;
        double tolerance = 0.0;
        std::string note;
    };

    static Check bound_check(std::string name, double residual, double tolerance, std::string note = {}) {
        const bool ok = std::isfinite(residual) && residual <= tolerance;
        return {std::move(name), ok ? "pass" : "fail", residual, tolerance, std::move(note)};
    }

    static Check skipped(std::string name, std::string reason) {
        return {std::move(name), "skipped", 0.0, 0.0, std::move(reason)};
    }

    int validate(const Model& model) {
        const auto& [off, life] = model;
        const double m = off.mean();
        std::vector<Check> checks;
        const SpectralReport rep = convergence_radius(off, life, opts_.tol);

        switch (rep.radius_case) {
            case RadiusCase::Supercritical: {
                // independent root of F(s) = 1 on (0, 1) against the B fixed point
                double lo = 0.0, hi = 1.0;
                for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
                    const double mid = 0.5 * (lo + hi);
                    if (F_eval(life, m, mid).value >= 1.0) hi = mid; else lo = mid;
                }
                checks.push_back(bound_check("F_root_vs_B_fixed_point", std::abs(0.5 * (lo + hi) - rep.gamma), 1e-10));
                break;
            }
            case RadiusCase::SubcriticalRoot:
                checks.push_back(bound_check("F_root_residual", rep.root_residual, 1e-10));
                break;
            case RadiusCase::Critical:
                checks.push_back(bound_check("critical_rho", std::abs(rep.rho - 1.0), 1e-12, "ml = 1 branch"));
                break;
            case RadiusCase::SubcriticalBoundary:
                checks.push_back(skipped("F_root", "gamma = R, F(R) < 1: no root"));
                break;
        }

        {
            const std::size_t kk = std::max<std::size_t>(opts_.k_max, 1);
            const RadiusSequence scalar = radius_sequence(off, life, kk, RadiusMethod::ScalarRoot);
            double worst = 0.0;
            bool monotone = true;
            for (std::size_t i = 0; i < kk; ++i) {
                try {
                    const double p = truncated_radius(off, life, i + 1, RadiusMethod::PowerIteration);
                    worst = std::max(worst, std::abs(p - scalar.rho[i]));
                } catch (const ConvergenceError&) {
                    worst = std::numeric_limits<double>::infinity();
                }
                if (i > 0 && scalar.rho[i] < scalar.rho[i - 1] * (1.0 - 1e-14)) monotone = false;
            }
            checks.push_back(bound_check("scalar_root_vs_power_iteration", worst, 1e-9,
                                         "k = 1.." + std::to_string(kk)));
            const double over = std::max(0.0, scalar.rho.back() - rep.rho) / rep.rho;
            checks.push_back(bound_check("truncation_below_rho", monotone ? over : 1.0, 1e-12,
                                         "rho_k nondecreasing and at most rho"));
        }

        const std::size_t K = invariant_size(life);
        if (rep.radius_case == RadiusCase::SubcriticalBoundary) {
            const std::string why = "transient boundary case: no invariant vector or measure";
            checks.push_back(skipped("invariant_vector_residual", why));
            checks.push_back(skipped("invariant_measure_residual", why));
            checks.push_back(skipped("vu_vs_1_plus_S", why));
        } else if (K < 2) {
            checks.push_back(skipped("invariant_vector_residual", "lifetime support too short"));
        } else {
            const InvariantSystem sys = invariant_system(off, life, K);
            checks.push_back(bound_check("invariant_vector_residual", sys.u_residual, 1e-10));
            checks.push_back(bound_check("invariant_measure_residual",
                                         std::max(sys.v_residual, sys.measure_head_residual), 1e-10));
            if (sys.S.is_finite() && sys.vu.is_finite()) {
                checks.push_back(bound_check("vu_vs_1_plus_S", std::abs(sys.vu.value() - 1.0 - sys.S.value()), 1e-8));
            } else {
                checks.push_back(skipped("vu_vs_1_plus_S", "S is infinite"));
            }
        }

        if (rep.m_gprime_at_gamma) {
            const double x = rep.m_gprime_at_gamma->to_double();
            checks.push_back(bound_check("m_gprime_at_gamma", std::max(0.0, x - 1.0), 1e-10,
                                         "m g'(gamma) = " + format_double(x)));
        } else {
            checks.push_back(skipped("m_gprime_at_gamma", "only defined in the subcritical root case"));
        }

        {
            const ExtinctionReport ext = extinction_probability(off, life, std::min(opts_.tol, 1e-8));
            checks.push_back(bound_check("extinction_residual", ext.residual, 1e-10,
                                         "q = " + format_double(ext.q)));
        }

        {
            constexpr std::size_t kGenerations = 6;
            SimConfig cfg;
            cfg.replicates = opts_.sim_replicates;
            cfg.master_seed = opts_.seed;
            cfg.population_cap = std::numeric_limits<std::uint64_t>::max() / 4;
            cfg.threads = opts_.threads;
            std::vector<std::size_t> gens;
            for (std::size_t n = 1; n <= kGenerations; ++n) gens.push_back(n);
            const SimulationSummary s = estimate_growth(off, life, cfg, gens, rep.rho);
            double worst = 0.0;
            for (const GenerationStats& g : s.growth) {
                const std::vector<double> exact = mean_vector(off, life, g.generation);
                for (std::size_t a = 0; a < exact.size(); ++a) {
                    const double mc = a < g.type_means.size() ? g.type_means[a] : 0.0;
                    const double se = a < g.type_se.size() ? g.type_se[a] : 0.0;
                    // rare types may show no sampled variance; floor the error at the Poisson scale
                    const double floor = std::sqrt(exact[a] / static_cast<double>(cfg.replicates));
                    const double z = std::abs(mc - exact[a]) / (std::max(se, floor) + 1e-300);
                    worst = std::max(worst, z);
                }
            }
            checks.push_back(bound_check("simulated_means_vs_matrix_powers", worst, 5.0,
                                         "max |z| over types and n <= 6"));
        }

        ordered_json doc = document();
        doc["spectral"] = to_json(rep);
        ordered_json list = ordered_json::array();
        bool failed = false;
        for (const Check& c : checks) {
            ordered_json e;
            e["name"] = c.name;
            e["status"] = c.status;
            e["residual"] = c.residual;
            e["tolerance"] = c.tolerance;
            e["note"] = c.note;
            list.push_back(std::move(e));
            if (c.status == "fail") {
                failed = true;
                err_ << "check failed: " << c.name << " residual " << format_double(c.residual)
                     << " > " << format_double(c.tolerance) << '\n';
            }
        }
        doc["checks"] = std::move(list);
        doc["passed"] = !failed;
        emit_json(doc);
        return failed ? kCheckFailed : kOk;
    }

    Options opts_;
    std::ostream& out_;
    std::ostream& err_;
    std::chrono::steady_clock::time_point start_;
    std::string started_utc_;
    ordered_json spec_json_;
    std::vector<std::string> outputs_;
};

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options opts;
    CLI::App app{"Galton-Watson processes with random lifetimes", "gwlife"};
    app.set_version_flag("--version", GWLIFE_VERSION);
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--spec", opts.spec, "Model spec JSON file")->required();
    app.add_option("--out", opts.out, "Output path (default: standard output)");
    app.add_option("--tol", opts.tol, "Root tolerance")->check(CLI::PositiveNumber);

    auto* analyze = app.add_subcommand("analyze", "Spectral, recurrence, extinction and invariant analysis");
    analyze->add_option("--K", opts.K, "Size of the truncated invariant vectors");
    auto* truncate = app.add_subcommand("truncate", "Spectral radii of northwest truncations (CSV)");
    truncate->add_option("--k-max", opts.k_max, "Largest truncation size")->check(CLI::Range(1, 10000));
    app.add_subcommand("extinction", "Extinction probability");
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo simulation");
    simulate->add_option("--replicates", opts.replicates)->check(CLI::PositiveNumber);
    simulate->add_option("--horizon", opts.horizon);
    simulate->add_option("--seed", opts.seed);
    simulate->add_option("--cap", opts.cap, "Population cap per replicate")->check(CLI::PositiveNumber);
    simulate->add_option("--generations", opts.generations, "Generations to report means for");
    simulate->add_option("--trajectory-csv", opts.trajectory_csv, "Dump replicate 0 as generation,age,count");
    simulate->add_option("--threads", opts.threads);
    auto* validate = app.add_subcommand("validate", "Cross-check battery");
    validate->add_option("--K", opts.K);
    validate->add_option("--k-max", opts.k_max)->check(CLI::Range(1, 10000));
    validate->add_option("--seed", opts.seed);
    validate->add_option("--replicates", opts.sim_replicates)->check(CLI::PositiveNumber);
    validate->add_option("--threads", opts.threads);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << GWLIFE_VERSION << '\n';
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return kInvalidSpec;
    }
    opts.command = app.get_subcommands().front()->get_name();

    try {
        Session session(opts, out, err);
        return session.dispatch();
    } catch (const ModelError& e) {
        err << "invalid spec: " << e.what() << '\n';
        return kInvalidSpec;
    } catch (const IndeterminateError& e) {
        err << "indeterminate: " << e.what() << '\n';
        return kIndeterminate;
    } catch (const std::invalid_argument& e) {
        err << "invalid input: " << e.what() << '\n';
        return kInvalidSpec;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kCheckFailed;
    }
}

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

} // namespace gwlife::cli
