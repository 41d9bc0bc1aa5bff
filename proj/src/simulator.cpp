#include "gwlife/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>
#include <thread>

#include "gwlife/spectral.hpp"

namespace gwlife {

namespace {

__extension__ typedef unsigned __int128 Wide;

struct GenerationAccumulator {
    std::uint64_t samples = 0;
    std::uint64_t capped_before = 0;
    std::uint64_t sum = 0;
    Wide sum_sq = 0;
    std::vector<std::uint64_t> type_sum;
    std::vector<Wide> type_sum_sq;

    void add(const AgeCounts& state, std::uint64_t total) {
        ++samples;
        sum += total;
        sum_sq += static_cast<Wide>(total) * total;
        if (type_sum.size() < state.size()) {
            type_sum.resize(state.size(), 0);
            type_sum_sq.resize(state.size(), 0);
        }
        for (std::size_t a = 0; a < state.size(); ++a) {
            type_sum[a] += state[a];
            type_sum_sq[a] += static_cast<Wide>(state[a]) * state[a];
        }
    }

    void merge(const GenerationAccumulator& o) {
        samples += o.samples;
        capped_before += o.capped_before;
        sum += o.sum;
        sum_sq += o.sum_sq;
        if (type_sum.size() < o.type_sum.size()) {
            type_sum.resize(o.type_sum.size(), 0);
            type_sum_sq.resize(o.type_sum.size(), 0);
        }
        for (std::size_t a = 0; a < o.type_sum.size(); ++a) {
            type_sum[a] += o.type_sum[a];
            type_sum_sq[a] += o.type_sum_sq[a];
        }
    }
};

struct Accumulator {
    std::uint64_t extinct = 0;
    std::uint64_t capped = 0;
    std::uint64_t ran_out = 0;
    std::vector<GenerationAccumulator> gens;

    void merge(const Accumulator& o) {
        extinct += o.extinct;
        capped += o.capped;
        ran_out += o.ran_out;
        for (std::size_t i = 0; i < gens.size(); ++i) gens[i].merge(o.gens[i]);
    }
};

std::pair<double, double> mean_and_se(std::uint64_t n, std::uint64_t sum, Wide sum_sq) {
    if (n == 0) return {0.0, 0.0};
    const long double nn = static_cast<long double>(n);
    const long double mean = static_cast<long double>(sum) / nn;
    if (n < 2) return {static_cast<double>(mean), 0.0};
    long double var = (static_cast<long double>(sum_sq) - nn * mean * mean) / (nn - 1.0L);
    var = std::max(var, 0.0L);
    return {static_cast<double>(mean), static_cast<double>(std::sqrt(var / nn))};
}

std::uint64_t total_of(const AgeCounts& s) {
    std::uint64_t t = 0;
    for (auto c : s) t += c;
    return t;
}

} // namespace

std::string_view to_string(TerminalStatus status) {
    switch (status) {
        case TerminalStatus::Extinct: return "Extinct";
        case TerminalStatus::Capped: return "Capped";
        case TerminalStatus::RanOut: return "RanOut";
    }
    return "?";
}

Simulator::Simulator(OffspringModel off, LifetimeModel life, SimConfig cfg)
    : off_(std::move(off)), life_(std::move(life)), cfg_(cfg) {
    if (cfg_.replicates < 1) throw std::invalid_argument("replicates must be >= 1");
    if (cfg_.population_cap == 0) throw std::invalid_argument("population_cap must be > 0");
    hazards_.assign(cfg_.max_generations + 2, 0.0);
    for (std::size_t k = 1; k < hazards_.size(); ++k) hazards_[k] = life_.hazard(k);
}

double Simulator::hazard(std::size_t k) const {
    return k < hazards_.size() ? hazards_[k] : life_.hazard(k);
}

AgeCounts Simulator::step(std::span<const std::uint64_t> state, std::uint64_t replicate,
                          std::uint64_t generation) const {
    AgeCounts next(state.size() + 1, 0);
    std::uint64_t newborns = 0;
    for (std::size_t a = 0; a < state.size(); ++a) {
        const std::uint64_t n = state[a];
        if (n == 0) continue;
        CounterRng rng(cfg_.master_seed, replicate, generation, a);
        const double q = hazard(a + 1);
        std::uint64_t survivors = 0;
        if (q >= 1.0) {
            survivors = n;
        } else if (q > 0.0) {
            std::binomial_distribution<std::uint64_t> d(n, q);
            survivors = d(rng);
        }
        next[a + 1] = survivors;
        newborns += off_.sample_sum(survivors, rng);
    }
    next[0] = newborns;
    while (!next.empty() && next.back() == 0) next.pop_back();
    return next;
}

Trajectory Simulator::trajectory(std::uint64_t replicate, std::size_t horizon) const {
    Trajectory tr;
    AgeCounts state{1};
    tr.generations.push_back(state);
    tr.totals.push_back(1);
    tr.status = TerminalStatus::RanOut;
    tr.terminal_generation = horizon;
    for (std::size_t n = 0; n < horizon; ++n) {
        state = step(state, replicate, n);
        const std::uint64_t total = total_of(state);
        tr.generations.push_back(state);
        tr.totals.push_back(total);
        if (total == 0) {
            tr.status = TerminalStatus::Extinct;
            tr.terminal_generation = n + 1;
            break;
        }
        if (total > cfg_.population_cap) {
            tr.status = TerminalStatus::Capped;
            tr.terminal_generation = n + 1;
            break;
        }
    }
    return tr;
}

SimulationSummary Simulator::run(std::size_t horizon, std::span<const std::size_t> generations,
                                 std::optional<double> rho) const {
    std::map<std::size_t, std::size_t> slot;  // generation -> accumulator index
    for (std::size_t g : generations) {
        if (g > horizon) throw std::invalid_argument("requested generation beyond the horizon");
        slot.emplace(g, slot.size());
    }

    auto simulate_range = [&](std::size_t first, std::size_t last, Accumulator& acc) {
        acc.gens.assign(slot.size(), {});
        for (std::size_t rep = first; rep < last; ++rep) {
            AgeCounts state{1};
            std::uint64_t total = 1;
            TerminalStatus status = TerminalStatus::RanOut;
            std::size_t stopped = horizon;
            auto record = [&](std::size_t n) {
                if (auto it = slot.find(n); it != slot.end()) acc.gens[it->second].add(state, total);
            };
            record(0);
            for (std::size_t n = 0; n < horizon; ++n) {
                state = step(state, rep, n);
                total = total_of(state);
                if (total > cfg_.population_cap) {
                    status = TerminalStatus::Capped;
                    stopped = n + 1;
                    break;
                }
                record(n + 1);
                if (total == 0) {
                    status = TerminalStatus::Extinct;
                    stopped = n + 1;
                    break;
                }
            }
            if (status == TerminalStatus::Extinct) {
                ++acc.extinct;
                // extinction is absorbing: later generations contribute zeros
                for (const auto& [g, idx] : slot) {
                    if (g > stopped) acc.gens[idx].add({}, 0);
                }
            } else if (status == TerminalStatus::Capped) {
                ++acc.capped;
                for (const auto& [g, idx] : slot) {
                    if (g >= stopped) ++acc.gens[idx].capped_before;
                }
            } else {
                ++acc.ran_out;
            }
        }
    };

    unsigned threads = cfg_.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : cfg_.threads;
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, cfg_.replicates));
    std::vector<Accumulator> parts(threads);
    if (threads == 1) {
        simulate_range(0, cfg_.replicates, parts[0]);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (cfg_.replicates + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            const std::size_t first = std::min(cfg_.replicates, t * chunk);
            const std::size_t last = std::min(cfg_.replicates, first + chunk);
            pool.emplace_back(simulate_range, first, last, std::ref(parts[t]));
        }
        for (auto& th : pool) th.join();
    }
    Accumulator acc = std::move(parts[0]);
    for (unsigned t = 1; t < threads; ++t) acc.merge(parts[t]);

    SimulationSummary out;
    out.replicates = cfg_.replicates;
    out.horizon = horizon;
    out.master_seed = cfg_.master_seed;
    out.population_cap = cfg_.population_cap;
    out.extinct = acc.extinct;
    out.capped = acc.capped;
    out.ran_out = acc.ran_out;
    const double p = static_cast<double>(acc.extinct) / static_cast<double>(cfg_.replicates);
    out.extinction_frequency = p;
    out.half_width = 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(cfg_.replicates));
    out.rho = rho;

    for (const auto& [g, idx] : slot) {
        const GenerationAccumulator& ga = acc.gens[idx];
        GenerationStats st;
        st.generation = g;
        st.samples = ga.samples;
        st.capped_before = ga.capped_before;
        std::tie(st.mean_total, st.se_total) = mean_and_se(ga.samples, ga.sum, ga.sum_sq);
        const double scale = rho ? std::pow(*rho, -static_cast<double>(g)) : 1.0;
        st.normalized = st.mean_total * scale;
        st.normalized_se = st.se_total * scale;
        for (std::size_t a = 0; a < ga.type_sum.size(); ++a) {
            const auto [m, se] = mean_and_se(ga.samples, ga.type_sum[a], ga.type_sum_sq[a]);
            st.type_means.push_back(m);
            st.type_se.push_back(se);
        }
        out.growth.push_back(std::move(st));
    }
    return out;
}

SimulationSummary estimate_extinction(const OffspringModel& off, const LifetimeModel& life,
                                      const SimConfig& cfg) {
    const Simulator sim(off, life, cfg);
    return sim.run(cfg.max_generations, {}, std::nullopt);
}

SimulationSummary estimate_growth(const OffspringModel& off, const LifetimeModel& life, const SimConfig& cfg,
                                  std::span<const std::size_t> generations, std::optional<double> rho) {
    if (generations.empty()) throw std::invalid_argument("estimate_growth needs at least one generation");
    const std::size_t horizon = *std::max_element(generations.begin(), generations.end());
    if (!rho) rho = convergence_radius(off, life).rho;
    SimConfig c = cfg;
    c.max_generations = horizon;
    const Simulator sim(off, life, c);
    return sim.run(horizon, generations, rho);
}

Trajectory simulate_trajectory(const OffspringModel& off, const LifetimeModel& life, const SimConfig& cfg,
                               std::uint64_t replicate) {
    const Simulator sim(off, life, cfg);
    return sim.trajectory(replicate, cfg.max_generations);
}

} // namespace gwlife
