#include "aperture_forge/nsga2.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "aperture_forge/error.hpp"
#include "aperture_forge/parallel.hpp"

namespace apf {

Objectives objectives_of(const PatternScores& s) { return {s.r_max, -s.d_min}; }

bool dominates(const Objectives& a, const Objectives& b) {
  bool strictly = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) return false;
    if (a[i] < b[i]) strictly = true;
  }
  return strictly;
}

std::vector<std::vector<std::size_t>> non_dominated_sort(std::span<Individual> pop) {
  const std::size_t n = pop.size();
  std::vector<std::vector<std::size_t>> dominated(n);
  std::vector<int> count(n, 0);
  std::vector<std::vector<std::size_t>> fronts(1);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = p + 1; q < n; ++q) {
      if (dominates(pop[p], pop[q])) {
        dominated[p].push_back(q);
        ++count[q];
      } else if (dominates(pop[q], pop[p])) {
        dominated[q].push_back(p);
        ++count[p];
      }
    }
  }
  for (std::size_t p = 0; p < n; ++p)
    if (count[p] == 0) {
      pop[p].rank = 0;
      fronts[0].push_back(p);
    }
  for (std::size_t k = 0; !fronts[k].empty(); ++k) {
    std::vector<std::size_t> next;
    for (std::size_t p : fronts[k])
      for (std::size_t q : dominated[p])
        if (--count[q] == 0) {
          pop[q].rank = static_cast<int>(k + 1);
          next.push_back(q);
        }
    std::sort(next.begin(), next.end());
    fronts.push_back(std::move(next));
  }
  fronts.pop_back();
  return fronts;
}

void crowding_distance(std::span<Individual> pop, std::span<const std::size_t> front) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  for (std::size_t i : front) pop[i].crowding = 0.0;
  if (front.size() <= 2) {
    for (std::size_t i : front) pop[i].crowding = inf;
    return;
  }
  std::vector<std::size_t> order(front.begin(), front.end());
  for (std::size_t m = 0; m < Objectives{}.size(); ++m) {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return pop[a].z[m] < pop[b].z[m]; });
    const double lo = pop[order.front()].z[m];
    const double hi = pop[order.back()].z[m];
    pop[order.front()].crowding = inf;
    pop[order.back()].crowding = inf;
    if (hi <= lo) continue;
    for (std::size_t k = 1; k + 1 < order.size(); ++k)
      pop[order[k]].crowding += (pop[order[k + 1]].z[m] - pop[order[k - 1]].z[m]) / (hi - lo);
  }
}

void GaConfig::validate() const {
  if (population_size < 4 || population_size % 2 != 0) throw ConfigError("population size must be even and >= 4");
  if (generations < 0) throw ConfigError("generations must be >= 0");
  if (!(crossover_prob >= 0.0 && crossover_prob <= 1.0)) throw ConfigError("crossover_prob must be in [0, 1]");
  if (!(mutation_prob >= 0.0 && mutation_prob <= 1.0)) throw ConfigError("mutation_prob must be in [0, 1]");
  if ((free_mask & AperturePattern::kAllCells) == 0) throw ConfigError("free_mask selects no cells");
}

namespace {

class Evolution {
 public:
  Evolution(const GaConfig& cfg, const Scorer& scorer)
      : cfg_(cfg), scorer_(scorer), rng_(cfg.rng_seed), mask_(cfg.free_mask & AperturePattern::kAllCells) {}

  std::uint64_t random_bits() {
    std::uint64_t bits = 0;
    for (int i = 0; i < AperturePattern::kCells; ++i)
      if (((mask_ >> i) & 1u) && coin_(rng_)) bits |= std::uint64_t{1} << i;
    return repair(bits);
  }

  // Opens one random free cell when variation closed them all.
  std::uint64_t repair(std::uint64_t bits) {
    bits &= mask_;
    if (bits != 0) return bits;
    const int free = std::popcount(mask_);
    int pick = std::uniform_int_distribution<int>(0, free - 1)(rng_);
    for (int i = 0; i < AperturePattern::kCells; ++i)
      if ((mask_ >> i) & 1u) {
        if (pick == 0) return std::uint64_t{1} << i;
        --pick;
      }
    return bits;
  }

  void score(std::vector<Individual>& pop) {
    std::vector<std::uint64_t> pending;
    for (const Individual& ind : pop)
      if (!cache_.contains(ind.bits) && std::find(pending.begin(), pending.end(), ind.bits) == pending.end())
        pending.push_back(ind.bits);
    std::vector<PatternScores> results(pending.size());
    parallel_for(pending.size(), [&](std::size_t i) {
      const AperturePattern p(pending[i]);
      try {
        results[i] = scorer_(p);
      } catch (const std::exception& e) {
        throw Error("scoring pattern " + p.bitstring() + " failed: " + e.what());
      }
      for (double v : {results[i].r_max, results[i].d_min})
        if (!std::isfinite(v)) throw Error("scoring pattern " + p.bitstring() + " gave a non-finite objective");
    });
    for (std::size_t i = 0; i < pending.size(); ++i) cache_.emplace(pending[i], results[i]);
    for (Individual& ind : pop) {
      ind.scores = cache_.at(ind.bits);
      ind.z = objectives_of(ind.scores);
    }
  }

  static void rank(std::vector<Individual>& pop) {
    for (const auto& front : non_dominated_sort(pop)) crowding_distance(pop, front);
  }

  const Individual& tournament(const std::vector<Individual>& pop) {
    std::uniform_int_distribution<std::size_t> pick(0, pop.size() - 1);
    const Individual& a = pop[pick(rng_)];
    const Individual& b = pop[pick(rng_)];
    if (a.rank != b.rank) return a.rank < b.rank ? a : b;
    return a.crowding >= b.crowding ? a : b;
  }

  std::vector<Individual> offspring(const std::vector<Individual>& parents) {
    std::vector<Individual> kids;
    kids.reserve(parents.size());
    std::uniform_real_distribution<double> u(0.0, 1.0);
    while (kids.size() < parents.size()) {
      std::uint64_t a = tournament(parents).bits;
      std::uint64_t b = tournament(parents).bits;
      if (u(rng_) < cfg_.crossover_prob) {
        std::uint64_t swap = 0;
        for (int i = 0; i < AperturePattern::kCells; ++i)
          if (coin_(rng_)) swap |= std::uint64_t{1} << i;
        const std::uint64_t diff = (a ^ b) & swap;
        a ^= diff;
        b ^= diff;
      }
      for (std::uint64_t* child : {&a, &b}) {
        for (int i = 0; i < AperturePattern::kCells; ++i)
          if (((mask_ >> i) & 1u) && u(rng_) < cfg_.mutation_prob) *child ^= std::uint64_t{1} << i;
        Individual kid;
        kid.bits = repair(*child);
        kids.push_back(kid);
      }
    }
    return kids;
  }

  // Fills the next population front by front, the last partial front by
  // descending crowding distance.
  std::vector<Individual> survivors(std::vector<Individual> merged) {
    // Repeated chromosomes go after all distinct ones and are only used when
    // there are too few distinct ones to fill the population.
    {
      std::unordered_set<std::uint64_t> seen;
      std::vector<Individual> distinct;
      std::vector<Individual> repeats;
      for (Individual& ind : merged) (seen.insert(ind.bits).second ? distinct : repeats).push_back(std::move(ind));
      if (distinct.size() < static_cast<std::size_t>(cfg_.population_size))
        distinct.insert(distinct.end(), repeats.begin(), repeats.end());
      merged = std::move(distinct);
    }
    const auto fronts = non_dominated_sort(merged);
    std::vector<Individual> next;
    next.reserve(static_cast<std::size_t>(cfg_.population_size));
    for (const auto& front : fronts) {
      crowding_distance(merged, front);
      const std::size_t room = static_cast<std::size_t>(cfg_.population_size) - next.size();
      if (front.size() <= room) {
        for (std::size_t i : front) next.push_back(merged[i]);
      } else {
        std::vector<std::size_t> order(front);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return merged[a].crowding > merged[b].crowding; });
        for (std::size_t k = 0; k < room; ++k) next.push_back(merged[order[k]]);
      }
      if (next.size() == static_cast<std::size_t>(cfg_.population_size)) break;
    }
    rank(next);
    return next;
  }

  std::vector<Individual> run(const GenerationObserver& observer) {
    std::vector<Individual> pop(static_cast<std::size_t>(cfg_.population_size));
    for (Individual& ind : pop) ind.bits = random_bits();
    score(pop);
    rank(pop);
    if (observer) observer(0, pop);
    for (int gen = 1; gen <= cfg_.generations; ++gen) {
      std::vector<Individual> merged = pop;
      std::vector<Individual> kids = offspring(pop);
      score(kids);
      merged.insert(merged.end(), kids.begin(), kids.end());
      pop = survivors(std::move(merged));
      if (observer) observer(gen, pop);
    }
    std::vector<Individual> front;
    for (const Individual& ind : pop)
      if (ind.rank == 0) front.push_back(ind);
    std::sort(front.begin(), front.end(), [](const Individual& a, const Individual& b) { return a.bits < b.bits; });
    front.erase(std::unique(front.begin(), front.end(),
                            [](const Individual& a, const Individual& b) { return a.bits == b.bits; }),
                front.end());
    return front;
  }

 private:
  const GaConfig& cfg_;
  const Scorer& scorer_;
  std::mt19937_64 rng_;
  std::bernoulli_distribution coin_{0.5};
  std::uint64_t mask_;
  std::unordered_map<std::uint64_t, PatternScores> cache_;
};

}  // namespace

std::vector<Individual> evolve(const GaConfig& cfg, const Scorer& scorer, const GenerationObserver& observer) {
  cfg.validate();
  if (!scorer) throw ConfigError("evolve: no scorer");
  Evolution evo(cfg, scorer);
  return evo.run(observer);
}

AperturePattern select_final(std::span<const Individual> front) {
  if (front.empty()) throw EmptyInputError("select_final: empty front");
  const Individual* best = &front[0];
  for (const Individual& ind : front.subspan(1)) {
    const auto& s = ind.scores;
    const auto& b = best->scores;
    if (s.d_r_min != b.d_r_min) {
      if (s.d_r_min > b.d_r_min) best = &ind;
    } else if (s.r_max != b.r_max) {
      if (s.r_max < b.r_max) best = &ind;
    } else if (ind.pattern().bitstring() < best->pattern().bitstring()) {
      best = &ind;
    }
  }
  return best->pattern();
}

}  // namespace apf
