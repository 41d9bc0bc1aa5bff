// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "gwlife/errors.hpp"
#include "gwlife/extinction.hpp"
#include "gwlife/report_json.hpp"
#include "gwlife/simulator.hpp"
#include "gwlife/spectral.hpp"
#include "gwlife/truncation.hpp"
#include "oracles.hpp"

using namespace gwlife;

namespace {

struct Named {
    std::string name;
    OffspringModel off;
    LifetimeModel life;
};

class Criterion {
public:
    explicit Criterion(int id) : id_(id) {}

    void expect(bool ok, const std::string& what) {
        passed_ = passed_ && ok;
        notes_.emplace_back(ok, what);
    }

    bool report(const std::string& title) const {
        std::printf("[%s] criterion %d: %s\n", passed_ ? "PASS" : "FAIL", id_, title.c_str());
        for (const auto& [ok, what] : notes_) std::printf("      %s %s\n", ok ? "ok  " : "FAIL", what.c_str());
        return passed_;
    }

private:
    int id_;
    bool passed_ = true;
    std::vector<std::pair<bool, std::string>> notes_;
};

std::string fmt(const char* f, double a) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string fmt(const char* f, double a, double b) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Runs `body`; an exception fails the criterion instead of aborting the suite.
bool run_criterion(int id, const std::string& title, const std::function<void(Criterion&)>& body) {
    Criterion c(id);
    try {
        body(c);
    } catch (const std::exception& e) {
        c.expect(false, std::string("exception: ") + e.what());
    }
    return c.report(title);
}

Named geometric_point(double j_mean, double l) {
    return {fmt("point(%g) / geometric l=%g", j_mean, l),
            make_offspring(offspring::Point{static_cast<std::int64_t>(j_mean)}), make_lifetime(lifetime::Geometric{l})};
}

Named geometric_poisson(double m, double l) {
    return {fmt("poisson(%g) / geometric l=%g", m, l), make_offspring(offspring::Poisson{m}),
            make_lifetime(lifetime::Geometric{l})};
}

Named tilt(double m, double a, double b) {
    return {fmt("poisson(%g) / power tilt a=%g", m, a) + fmt(" b=%g", b), make_offspring(offspring::Poisson{m}),
            make_lifetime(lifetime::PowerTilt{a, b})};
}

Named critical_tilt(double a, double b) {
    LifetimeModel life = make_lifetime(lifetime::PowerTilt{a, b});
    const double m = 1.0 / life.mean();
    return {fmt("poisson(1/l) / power tilt a=%g b=%g", a, b), make_offspring(offspring::Poisson{m}), std::move(life)};
}

} // namespace

int main() {
    int failed = 0;
    const auto tally = [&](bool ok) { failed += ok ? 0 : 1; };

    tally(run_criterion(1, "geometric example: rho = 1.5 by both roots and by truncation", [](Criterion& c) {
        const auto t0 = std::chrono::steady_clock::now();
        const Named g = geometric_point(2, 1.0);
        const double m = g.off.mean();
        // (a) smallest root of F(s) = 1
        const double s_F = oracle::bisect_increasing(
            [&](double s) { return F_eval(g.life, m, s).value.value() - 1.0; }, 0.0, 1.0);
        c.expect(std::abs(1.0 / s_F - 1.5) <= 1e-10, fmt("F root: rho = %.17g", 1.0 / s_F));
        // (b) smallest fixed point of B
        const SpectralReport rep = convergence_radius(g.off, g.life);
        c.expect(rep.radius_case == RadiusCase::Supercritical, "case = Supercritical");
        c.expect(std::abs(rep.rho - 1.5) <= 1e-10, fmt("B fixed point: rho = %.17g", rep.rho));
        // (c) truncations
        const RadiusSequence seq = radius_sequence(g.off, g.life, 200, RadiusMethod::ScalarRoot);
        bool monotone = true;
        for (std::size_t i = 1; i < seq.rho.size(); ++i) monotone = monotone && seq.rho[i] >= seq.rho[i - 1];
        c.expect(std::abs(seq.rho.back() - 1.5) <= 1e-7, fmt("rho_200 = %.17g", seq.rho.back()));
        c.expect(monotone, "rho_k nondecreasing for k <= 200");
        const double dt = seconds_since(t0);
        c.expect(dt < 1.0, fmt("runtime %.3f s (< 1 s)", dt));
    }));

    tally(run_criterion(2, "growth limit of the geometric example", [](Criterion& c) {
        const Named g = geometric_point(2, 1.0);
        double worst = 0.0;
        for (std::size_t n = 0; n <= 50; ++n) {
            worst = std::max(worst, std::abs(std::pow(1.5, -static_cast<double>(n)) * mean_total(g.off, g.life, n) - 1.0));
        }
        c.expect(worst < 1e-9, fmt("max_n<=50 |rho^-n E(1.Z_n) - 1| = %.3g", worst));
        const double gc = growth_constant(g.off, g.life);
        c.expect(std::abs(gc - 1.0) <= 1e-10, fmt("growth constant = %.17g", gc));
        const InvariantSystem sys = invariant_system(g.off, g.life, 200);
        if (sys.printed_constant) c.expect(true, fmt("(reported only) (1+1/m)/S = %.17g", *sys.printed_constant));
    }));

    tally(run_criterion(3, "all four convergence-radius cases", [](Criterion& c) {
        {
            const Named g = geometric_poisson(0.5, 1.0);
            const SpectralReport rep = convergence_radius(g.off, g.life);
            c.expect(rep.radius_case == RadiusCase::SubcriticalRoot, "geometric m=1/2: SubcriticalRoot");
            c.expect(std::abs(rep.gamma - 4.0 / 3.0) <= 1e-10, fmt("gamma = %.17g (4/3)", rep.gamma));
        }
        {
            const Named t = tilt(0.3, 0.5, 3.0);
            const SpectralReport rep = convergence_radius(t.off, t.life);
            const BoundaryValue b = F_at_radius(t.life, 0.3);
            c.expect(rep.radius_case == RadiusCase::SubcriticalBoundary, "power tilt m=0.3: SubcriticalBoundary");
            c.expect(rep.gamma == 2.0, fmt("gamma = %.17g (2)", rep.gamma));
            c.expect(b.certified_below_one, fmt("F(2) = %.17g + %.2g certified < 1", b.value.to_double(), b.error_bound));
            c.expect(std::abs(b.value.to_double() - oracle::tilt_half_three_F_at_two(0.3)) <= 1e-10,
                     fmt("F(2) closed form %.17g", oracle::tilt_half_three_F_at_two(0.3)));
        }
        {
            const Named g = geometric_poisson(1.0, 1.0);
            const SpectralReport rep = convergence_radius(g.off, g.life);
            c.expect(rep.radius_case == RadiusCase::Critical, "m = 1/l: Critical");
            c.expect(std::abs(rep.rho - 1.0) < 1e-9, fmt("rho = %.17g", rep.rho));
        }
        {
            const Named g = geometric_poisson(2.0, 1.0);
            c.expect(convergence_radius(g.off, g.life).radius_case == RadiusCase::Supercritical, "m = 2: Supercritical");
        }
    }));

    tally(run_criterion(4, "recurrence classification with evidence", [](Criterion& c) {
        struct Case {
            Named model;
            Recurrence expected;
            Criticality criticality;
        };
        std::vector<Case> cases;
        cases.push_back({geometric_poisson(0.5, 1.0), Recurrence::PositiveRecurrent, Criticality::Subcritical});
        cases.push_back({tilt(0.3, 0.5, 3.0), Recurrence::Transient, Criticality::Subcritical});
        cases.push_back({geometric_poisson(1.0, 1.0), Recurrence::PositiveRecurrent, Criticality::Critical});
        cases.push_back({geometric_poisson(2.0, 1.0), Recurrence::PositiveRecurrent, Criticality::Supercritical});
        cases.push_back({critical_tilt(1.0, 3.0), Recurrence::NullRecurrent, Criticality::Critical});
        cases.push_back({critical_tilt(1.0, 4.0), Recurrence::PositiveRecurrent, Criticality::Critical});
        for (const Case& k : cases) {
            const RecurrenceClass cls = classify(k.model.off, k.model.life);
            bool evidence = false;
            switch (k.criticality) {
                case Criticality::Subcritical:
                    evidence = cls.F_at_R.has_value() &&
                               ((k.expected == Recurrence::Transient) == (*cls.F_at_R < 1.0));
                    break;
                case Criticality::Critical:
                    evidence = cls.g2.has_value() &&
                               ((k.expected == Recurrence::NullRecurrent) == cls.g2->is_infinite());
                    break;
                case Criticality::Supercritical:
                    evidence = cls.ml > 1.0;
                    break;
            }
            c.expect(cls.kind == k.expected && cls.criticality == k.criticality && evidence,
                     k.model.name + ": " + std::string(to_string(cls.kind)) + " [" + cls.clause + "]");
        }
    }));

    tally(run_criterion(5, "extinction probability, analytic and Monte Carlo", [](Criterion& c) {
        const auto t0 = std::chrono::steady_clock::now();
        const Named g = geometric_point(2, 1.0);
        const ExtinctionReport rep = extinction_probability(g.off, g.life);
        const double q = oracle::golden_extinction();
        c.expect(std::abs(rep.q - q) <= 1e-10, fmt("q = %.17g, (sqrt 5 - 1)/2 = %.17g", rep.q, q));
        SimConfig cfg;
        cfg.replicates = 100'000;
        cfg.max_generations = 200;
        cfg.population_cap = 1'000'000;
        cfg.master_seed = 42;
        const SimulationSummary s = estimate_extinction(g.off, g.life, cfg);
        c.expect(std::abs(s.extinction_frequency - q) < 0.01,
                 fmt("frequency = %.5f +- %.5f", s.extinction_frequency, s.half_width));
        const double dt = seconds_since(t0);
        c.expect(dt < 60.0, fmt("runtime %.2f s (< 60 s)", dt));
    }));

    tally(run_criterion(6, "invariant vector and measure", [](Criterion& c) {
        for (double m : {1.0, 2.0}) {
            const Named g = geometric_poisson(m, 1.0);
            const InvariantSystem sys = invariant_system(g.off, g.life, 200);
            const double v_res = std::max(sys.v_residual, sys.measure_head_residual);
            c.expect(sys.u_residual <= 1e-10, fmt("m=%g: gamma M u = u residual %.3g", m, sys.u_residual));
            c.expect(v_res <= 1e-10, fmt("m=%g: gamma v M = v residual %.3g", m, v_res));
            const double gap = std::abs(sys.vu.value() - 1.0 - sys.S.value());
            c.expect(gap <= 1e-8, fmt("m=%g: |vu - (1+S)| = %.3g", m, gap));
        }
        const Named sub = geometric_poisson(0.5, 1.0);
        const SpectralReport rep = convergence_radius(sub.off, sub.life);
        const double mg = rep.m_gprime_at_gamma ? rep.m_gprime_at_gamma->to_double() : NAN;
        c.expect(rep.m_gprime_at_gamma && mg <= 1.0 + 1e-10,
                 fmt("subcritical root model: m g'(gamma) = %.17g (bound 1 + 1e-10)", mg));
    }));

    tally(run_criterion(7, "simulated means against matrix powers", [](Criterion& c) {
        const Named g = geometric_poisson(1.0, 1.0);
        const std::size_t n = 10;
        std::vector<double> q(n + 1);
        for (std::size_t k = 1; k <= n + 1; ++k) q[k - 1] = g.life.hazard(k);
        const std::vector<double> exact = oracle::dense_row_power(oracle::dense_mean_matrix(1.0, q), n);
        SimConfig cfg;
        cfg.replicates = 100'000;
        cfg.master_seed = 2024;
        cfg.population_cap = std::uint64_t{1} << 62;
        const std::vector<std::size_t> gens{n};
        const SimulationSummary s = estimate_growth(g.off, g.life, cfg, gens, 1.0);
        const GenerationStats& st = s.growth.front();
        double worst = 0.0;
        bool all = true;
        for (std::size_t a = 0; a < exact.size(); ++a) {
            const double mc = a < st.type_means.size() ? st.type_means[a] : 0.0;
            const double se = a < st.type_se.size() ? st.type_se[a] : 0.0;
            const double z = se > 0.0 ? std::abs(mc - exact[a]) / se : (mc == exact[a] ? 0.0 : INFINITY);
            worst = std::max(worst, z);
            all = all && z <= 4.0;
        }
        c.expect(all, fmt("max |z| over %g types = %.3f (<= 4)", static_cast<double>(exact.size()), worst));
        cfg.threads = 1;
        const SimulationSummary again = estimate_growth(g.off, g.life, cfg, gens, 1.0);
        c.expect(to_json(s).dump() == to_json(again).dump(), "repeat run with the same seed is byte-identical");
    }));

    tally(run_criterion(8, "ScalarRoot and PowerIteration agree for k <= 400", [](Criterion& c) {
        std::vector<Named> specs;
        specs.push_back(geometric_point(2, 1.0));
        specs.push_back(geometric_poisson(0.5, 1.0));
        specs.push_back(geometric_poisson(1.0, 1.0));
        specs.push_back(geometric_poisson(2.0, 1.0));
        specs.push_back(tilt(0.3, 0.5, 3.0));
        specs.push_back(critical_tilt(1.0, 3.0));
        specs.push_back(critical_tilt(1.0, 4.0));
        for (const Named& g : specs) {
            const RadiusSequence scalar = radius_sequence(g.off, g.life, 400, RadiusMethod::ScalarRoot);
            double worst = 0.0;
            for (std::size_t k = 1; k <= 400; ++k) {
                const double p = truncated_radius(g.off, g.life, k, RadiusMethod::PowerIteration);
                worst = std::max(worst, std::abs(p - scalar.rho[k - 1]));
            }
            c.expect(worst <= 1e-9, g.name + fmt(": max difference %.3g", worst));
        }
    }));

    std::printf("%d of 8 criteria failed\n", failed);
    return failed == 0 ? 0 : 1;
}
