/*
* Copyright 2026 The GEAR Authors.
*
* Licensed under the Apache License, Version 2.0 (the "License");
* you may not use this file except in compliance with the License.
* You may obtain a copy of the License at
*
*     https://www.apache.org/licenses/LICENSE-2.0
*
* Unless required by applicable law or agreed to in writing, software
* distributed under the License is distributed on an "AS IS" BASIS,
* WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
* See the License for the specific language governing permissions and
* limitations under the License.
* ============================================================================
*/
#include "gear/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "gear/error.hpp"
#include "gear/parallel.hpp"

namespace gear {

namespace {

constexpr double kBlendAlpha = 0.5;
constexpr double kCrossoverRate = 0.9;
constexpr int kTournamentSize = 3;
constexpr double kPolishJitter = 0.1;

// Stream tags for DeriveSeed.
constexpr std::uint64_t kInitStream = 0x1000;
constexpr std::uint64_t kPolishStream = 0x2000;

Eigen::VectorXd FirstAxis(Eigen::Index p) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(p);
  e(0) = 1.0;
  return e;
}

Eigen::VectorXd Normalized(const Eigen::VectorXd& raw) {
  const double norm = raw.norm();
  if (norm == 0.0 || !std::isfinite(norm)) return FirstAxis(raw.size());
  return raw / norm;
}

class Evaluator {
 public:
  explicit Evaluator(const ValueObjective& objective) : objective_(objective) {}

  double operator()(const Eigen::VectorXd& raw) const {
    const Eigen::VectorXd beta = Normalized(raw);
    return objective_(std::span<const double>(
        beta.data(), static_cast<std::size_t>(beta.size())));
  }

 private:
  const ValueObjective& objective_;
};

// Nelder-Mead maximization of f from `start`. Returns the best vertex and
// its value; `evaluations` is incremented for every call to f.
std::pair<Eigen::VectorXd, double> NelderMead(const Evaluator& f,
                                              const Eigen::VectorXd& start,
                                              double start_value,
                                              double tolerance,
                                              long& evaluations) {
  const Eigen::Index p = start.size();
  const int max_evaluations = 200 * static_cast<int>(p + 1);
  const double step = std::max(0.1 * start.norm(), 1e-3);

  std::vector<Eigen::VectorXd> simplex{start};
  std::vector<double> values{start_value};
  for (Eigen::Index j = 0; j < p; ++j) {
    Eigen::VectorXd vertex = start;
    vertex(j) += step;
    simplex.push_back(vertex);
    values.push_back(f(vertex));
    ++evaluations;
  }
  int used = static_cast<int>(p);
  std::vector<std::size_t> order(simplex.size());
  while (used < max_evaluations) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    // Descending value: order[0] best, order.back() worst.
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a,
                                                     std::size_t b) {
      return values[a] > values[b];
    });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second_worst = order[order.size() - 2];
    if (values[best] - values[worst] <= tolerance) break;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(p);
    for (std::size_t k = 0; k + 1 < order.size(); ++k) {
      centroid += simplex[order[k]];
    }
    centroid /= static_cast<double>(p);

    const Eigen::VectorXd reflected = centroid + (centroid - simplex[worst]);
    const double reflected_value = f(reflected);
    ++used;
    if (reflected_value > values[best]) {
      const Eigen::VectorXd expanded =
          centroid + 2.0 * (centroid - simplex[worst]);
      const double expanded_value = f(expanded);
      ++used;
      if (expanded_value > reflected_value) {
        simplex[worst] = expanded;
        values[worst] = expanded_value;
      } else {
        simplex[worst] = reflected;
        values[worst] = reflected_value;
      }
    } else if (reflected_value > values[second_worst]) {
      simplex[worst] = reflected;
      values[worst] = reflected_value;
    } else {
      const bool outside = reflected_value > values[worst];
      const Eigen::VectorXd contracted =
          outside ? Eigen::VectorXd(centroid + 0.5 * (reflected - centroid))
                  : Eigen::VectorXd(centroid + 0.5 * (simplex[worst] - centroid));
      const double contracted_value = f(contracted);
      ++used;
      if (contracted_value > std::max(values[worst],
                                      outside ? reflected_value : values[worst])) {
        simplex[worst] = contracted;
        values[worst] = contracted_value;
      } else {
        for (std::size_t k = 1; k < order.size(); ++k) {
          const std::size_t v = order[k];
          simplex[v] = simplex[best] + 0.5 * (simplex[v] - simplex[best]);
          values[v] = f(simplex[v]);
          ++used;
        }
      }
    }
  }
  evaluations += used - static_cast<int>(p);
  const auto best = static_cast<std::size_t>(
      std::max_element(values.begin(), values.end()) - values.begin());
  return {simplex[best], values[best]};
}

std::size_t Tournament(const std::vector<double>& values, SplitMix64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, values.size() - 1);
  std::size_t winner = pick(rng);
  for (int k = 1; k < kTournamentSize; ++k) {
    const std::size_t challenger = pick(rng);
    if (values[challenger] > values[winner] ||
        (values[challenger] == values[winner] && challenger < winner)) {
      winner = challenger;
    }
  }
  return winner;
}

}  // namespace

void SearchConfig::Validate() const {
  if (population_size < 2) {
    throw ConfigError("population_size must be at least 2");
  }
  if (generations < 1) throw ConfigError("generations must be positive");
  if (!(box > 0.0)) throw ConfigError("box must be positive");
  if (polish_restarts < 1) {
    throw ConfigError("polish_restarts must be positive");
  }
  if (!(tolerance > 0.0)) throw ConfigError("tolerance must be positive");
  if (stall_generations < 1) {
    throw ConfigError("stall_generations must be positive");
  }
  if (workers < 1) throw ConfigError("workers must be positive");
}

nlohmann::json SearchConfig::ToJson() const {
  return {{"population_size", population_size},
          {"generations", generations},
          {"box", box},
          {"polish_restarts", polish_restarts},
          {"seed", seed},
          {"tolerance", tolerance},
          {"stall_generations", stall_generations}};
}

SearchConfig SearchConfig::FromJson(const nlohmann::json& j) {
  return FromJson(j, SearchConfig());
}

SearchConfig SearchConfig::FromJson(const nlohmann::json& j,
                                    const SearchConfig& defaults) {
  SearchConfig c = defaults;
  try {
    c.population_size = j.value("population_size", c.population_size);
    c.generations = j.value("generations", c.generations);
    c.box = j.value("box", c.box);
    c.polish_restarts = j.value("polish_restarts", c.polish_restarts);
    c.seed = j.value("seed", c.seed);
    c.tolerance = j.value("tolerance", c.tolerance);
    c.stall_generations = j.value("stall_generations", c.stall_generations);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed search config: ") + e.what());
  }
  return c;
}

SearchResult SearchGear(const ValueObjective& objective,
                        const BasisSpec& rule_basis,
                        const SearchConfig& config) {
  config.Validate();
  const Eigen::Index p = objective.dim();
  if (p < 2) throw DimensionError("rule basis must have at least 2 columns");
  if (p != rule_basis.ExpandedDim()) {
    throw DimensionError("objective and rule basis widths differ");
  }
  const Evaluator f(objective);

  if (objective.flat()) {
    const Eigen::VectorXd e = FirstAxis(p);
    SearchResult flat{DecisionRule(e, rule_basis), f(e), 1, false, true, {}};
    return flat;
  }

  const auto population = static_cast<std::size_t>(config.population_size);
  const std::size_t elites = std::max<std::size_t>(1, population / 50);
  std::vector<Eigen::VectorXd> current(population);
  std::vector<double> values(population);
  long evaluations = 0;

  // Zero starting vector, normalized to the first axis.
  current[0] = FirstAxis(p);
  ParallelFor(population, config.workers, [&](std::size_t k) {
    if (k > 0) {
      SplitMix64 rng(DeriveSeed(config.seed, kInitStream, k));
      std::uniform_real_distribution<double> uniform(-config.box, config.box);
      current[k].resize(p);
      for (Eigen::Index j = 0; j < p; ++j) current[k](j) = uniform(rng);
    }
    values[k] = f(current[k]);
  });
  evaluations += static_cast<long>(population);

  auto best_index = static_cast<std::size_t>(
      std::max_element(values.begin(), values.end()) - values.begin());
  Eigen::VectorXd best = current[best_index];
  double best_value = values[best_index];

  SearchResult result{DecisionRule(Normalized(best), rule_basis), best_value,
                      0, false, false, {best_value}};

  int stall = 0;
  std::vector<std::size_t> order(population);
  std::vector<Eigen::VectorXd> next(population);
  std::vector<double> next_values(population);
  for (int g = 1; g < config.generations; ++g) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       return values[a] > values[b];
                     });
    for (std::size_t e = 0; e < elites; ++e) {
      next[e] = current[order[e]];
      next_values[e] = values[order[e]];
    }
    // Mutation shrinks over the run.
    const double progress =
        static_cast<double>(g) / static_cast<double>(config.generations);
    const double mutation_scale = 0.25 * (1.0 - progress) + 0.01;
    ParallelFor(population - elites, config.workers, [&](std::size_t slot) {
      const std::size_t k = slot + elites;
      SplitMix64 rng(DeriveSeed(config.seed, static_cast<std::uint64_t>(g), k));
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      const Eigen::VectorXd& first = current[Tournament(values, rng)];
      const Eigen::VectorXd& second = current[Tournament(values, rng)];
      Eigen::VectorXd child = first;
      if (unit(rng) < kCrossoverRate) {
        for (Eigen::Index j = 0; j < p; ++j) {
          const double lo = std::min(first(j), second(j));
          const double hi = std::max(first(j), second(j));
          const double spread = kBlendAlpha * (hi - lo);
          child(j) = lo - spread + unit(rng) * (hi - lo + 2.0 * spread);
        }
      }
      const double sd = mutation_scale * std::max(child.norm(), 1e-12);
      std::normal_distribution<double> noise(0.0, sd);
      const double rate = 1.0 / static_cast<double>(p);
      bool mutated = false;
      for (Eigen::Index j = 0; j < p; ++j) {
        if (unit(rng) < rate) {
          child(j) += noise(rng);
          mutated = true;
        }
      }
      if (!mutated) {
        std::uniform_int_distribution<Eigen::Index> coord(0, p - 1);
        child(coord(rng)) += noise(rng);
      }
      child = child.cwiseMax(-config.box).cwiseMin(config.box);
      next[k] = std::move(child);
      next_values[k] = f(next[k]);
    });
    evaluations += static_cast<long>(population - elites);
    std::swap(current, next);
    std::swap(values, next_values);

    const double generation_best =
        *std::max_element(values.begin(), values.end());
    if (generation_best > best_value) {
      // Among tied maximizers prefer the one nearest the previous best.
      std::size_t chosen = population;
      double chosen_distance = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < population; ++k) {
        if (values[k] != generation_best) continue;
        const double distance = (current[k] - best).norm();
        if (distance < chosen_distance) {
          chosen = k;
          chosen_distance = distance;
        }
      }
      stall = generation_best - best_value > config.tolerance ? 0 : stall + 1;
      best = current[chosen];
      best_value = generation_best;
    } else {
      ++stall;
    }
    result.best_by_generation.push_back(best_value);
    if (stall >= config.stall_generations) {
      result.converged = true;
      break;
    }
  }

  // Simplex polish from the best point and jittered copies of it.
  for (int restart = 0; restart < config.polish_restarts; ++restart) {
    Eigen::VectorXd start = best;
    if (restart > 0) {
      SplitMix64 rng(DeriveSeed(config.seed, kPolishStream,
                                static_cast<std::uint64_t>(restart)));
      std::normal_distribution<double> jitter(0.0,
                                              kPolishJitter * best.norm());
      for (Eigen::Index j = 0; j < p; ++j) start(j) += jitter(rng);
    }
    const double start_value = restart == 0 ? best_value : f(start);
    if (restart > 0) ++evaluations;
    auto [point, value] =
        NelderMead(f, start, start_value, 1e-12, evaluations);
    if (value > best_value) {
      best = point;
      best_value = value;
    }
  }

  result.rule = DecisionRule(Normalized(best), rule_basis);
  result.value = f(best);
  result.evaluations = evaluations;
  return result;
}

SearchResult SearchGear(const ExperimentalSample& experimental,
                        const Eigen::VectorXd& imputed,
                        const PropensityFit& propensity,
                        const AugmentedFit& augmented,
                        const BasisSpec& rule_basis,
                        const SearchConfig& config) {
  const ValueObjective objective = MakeAipwObjective(
      experimental, imputed, propensity, augmented, rule_basis);
  SearchResult result = SearchGear(objective, rule_basis, config);
  result.value =
      AipwValue(result.rule, experimental, imputed, propensity, augmented)
          .value;
  return result;
}

}  // namespace gear
