#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "aperture_forge/metrics.hpp"
#include "aperture_forge/pattern.hpp"

namespace apf {

// Both objectives are minimized: z = (r_max, -d_min).
using Objectives = std::array<double, 2>;

struct Individual {
  std::uint64_t bits = 0;
  PatternScores scores;
  Objectives z{};
  int rank = 0;
  double crowding = 0.0;

  AperturePattern pattern() const { return AperturePattern(bits); }
};

Objectives objectives_of(const PatternScores& s);

bool dominates(const Objectives& a, const Objectives& b);
inline bool dominates(const Individual& a, const Individual& b) { return dominates(a.z, b.z); }

// Fast non-dominated sort. Sets rank on every individual and returns the
// fronts as index lists, front 0 first.
std::vector<std::vector<std::size_t>> non_dominated_sort(std::span<Individual> pop);

// Crowding distance of the members of one front, written to .crowding.
void crowding_distance(std::span<Individual> pop, std::span<const std::size_t> front);

struct GaConfig {
  int population_size = 1500;
  int generations = 100;
  double crossover_prob = 0.9;
  double mutation_prob = 1.0 / AperturePattern::kCells;
  std::uint64_t rng_seed = 1;
  // Cells allowed to vary; the rest stay closed.
  std::uint64_t free_mask = AperturePattern::kAllCells;

  void validate() const;
};

using Scorer = std::function<PatternScores(const AperturePattern&)>;
// Called with the generation index (0 = initial population) and the ranked
// population that survived into it.
using GenerationObserver = std::function<void(int, std::span<const Individual>)>;

// NSGA-II: binary tournament on (rank, crowding), uniform crossover, bit-flip
// mutation, repair to at least one open cell, elitist (mu + lambda)
// replacement. Returns front 0 of the final population sorted by bits.
std::vector<Individual> evolve(const GaConfig& cfg, const Scorer& scorer,
                               const GenerationObserver& observer = nullptr);

// Largest d_r_min; ties go to smaller r_max, then the lexicographically
// smaller bitstring.
AperturePattern select_final(std::span<const Individual> front);

}  // namespace apf
