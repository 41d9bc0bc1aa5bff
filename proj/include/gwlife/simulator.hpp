#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "gwlife/distributions.hpp"

namespace gwlife {

struct SimConfig {
    std::size_t replicates = 1000;
    std::size_t max_generations = 100;
    std::uint64_t master_seed = 1;
    std::uint64_t population_cap = 1'000'000;  ///< totals above this stop a replicate as "survived"
    unsigned threads = 0;                      ///< 0: hardware concurrency
};

/// counts[a] = number of individuals of age a (type a + 1).
using AgeCounts = std::vector<std::uint64_t>;

enum class TerminalStatus { Extinct, Capped, RanOut };

std::string_view to_string(TerminalStatus status);

struct Trajectory {
    std::vector<AgeCounts> generations;  ///< state at n = 0, 1, ...
    std::vector<std::uint64_t> totals;
    TerminalStatus status = TerminalStatus::RanOut;
    std::size_t terminal_generation = 0;
};

struct GenerationStats {
    std::size_t generation = 0;
    std::size_t samples = 0;         ///< replicates contributing (not capped before this generation)
    std::size_t capped_before = 0;
    double mean_total = 0.0;
    double se_total = 0.0;
    double normalized = 0.0;         ///< rho^-n * mean_total
    double normalized_se = 0.0;
    std::vector<double> type_means;  ///< index a: age a (type a + 1)
    std::vector<double> type_se;
};

struct SimulationSummary {
    std::size_t replicates = 0;
    std::size_t horizon = 0;
    std::uint64_t master_seed = 0;
    std::uint64_t population_cap = 0;
    std::size_t extinct = 0;
    std::size_t capped = 0;
    std::size_t ran_out = 0;
    double extinction_frequency = 0.0;
    double half_width = 0.0;  ///< 1.96 sqrt(p (1 - p) / replicates)
    std::optional<double> rho;
    std::vector<GenerationStats> growth;
};

/// Seeded Monte Carlo engine for the age-typed process.
///
/// Each cohort (replicate, generation, age) draws from its own counter-based
/// stream, so a replicate's trajectory depends only on the master seed and
/// its index.
class Simulator {
public:
    Simulator(OffspringModel off, LifetimeModel life, SimConfig cfg);

    const SimConfig& config() const { return cfg_; }

    /// One season: survivors of each age cohort ~ Binomial(N, q_{a+1}) move up
    /// one age and each survivor adds its offspring to age 0.
    AgeCounts step(std::span<const std::uint64_t> state, std::uint64_t replicate,
                   std::uint64_t generation) const;

    Trajectory trajectory(std::uint64_t replicate, std::size_t horizon) const;

    /// Runs every replicate to `horizon` and aggregates extinction counts
    /// and the statistics of the requested generations.
    SimulationSummary run(std::size_t horizon, std::span<const std::size_t> generations,
                          std::optional<double> rho) const;

private:
    double hazard(std::size_t k) const;

    OffspringModel off_;
    LifetimeModel life_;
    SimConfig cfg_;
    std::vector<double> hazards_;  // hazards_[k] = q_k, k = 1..
};

/// Fraction of replicates extinct by cfg.max_generations; capped replicates
/// count as survivors.
SimulationSummary estimate_extinction(const OffspringModel& off, const LifetimeModel& life,
                                      const SimConfig& cfg);

/// Sample means of Z_n (total and per type) for each requested n, scaled by
/// rho^-n. rho defaults to the convergence norm. The horizon is the largest
/// requested generation.
SimulationSummary estimate_growth(const OffspringModel& off, const LifetimeModel& life, const SimConfig& cfg,
                                  std::span<const std::size_t> generations,
                                  std::optional<double> rho = std::nullopt);

Trajectory simulate_trajectory(const OffspringModel& off, const LifetimeModel& life, const SimConfig& cfg,
                               std::uint64_t replicate);

} // namespace gwlife
