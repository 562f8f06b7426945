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

#include "gear/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <limits>
#include <random>
#include <span>
#include <utility>

#include "gear/error.hpp"
#include "gear/kernels.hpp"
#include "gear/parallel.hpp"

namespace gear {

namespace {

// Stream tags for DeriveSeed.
constexpr std::uint64_t kCovariateStream = 11;
constexpr std::uint64_t kTreatmentStream = 12;
constexpr std::uint64_t kIntermediateStream = 13;
constexpr std::uint64_t kOutcomeStream = 14;
constexpr std::uint64_t kTruthStream = 0xFFFFFFFFULL;

kernels::ColumnMajorView View(const Eigen::MatrixXd& m) {
  return {m.data(), static_cast<std::size_t>(m.rows()),
          static_cast<std::size_t>(m.cols()),
          static_cast<std::size_t>(m.rows())};
}

std::span<const double> Span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

double Square(double v) { return v * v; }

// S6 contamination added to the recorded first intermediate.
double Contamination(const ScenarioSpec& spec, const double* x, double a) {
  if (spec.id != ScenarioId::kS6) return 0.0;
  return a * (1.0 - spec.contamination_l) * (-0.5 + 0.4 * x[0]);
}

}  // namespace

std::string NoiseParamName(NoiseParam noise) {
  return noise == NoiseParam::kVariance ? "variance" : "sd";
}

NoiseParam ParseNoiseParam(const std::string& name) {
  if (name == "variance") return NoiseParam::kVariance;
  if (name == "sd") return NoiseParam::kSd;
  throw ConfigError("unknown noise_param '" + name +
                    "' (expected variance or sd)");
}

std::string TruthModeName(TruthMode mode) {
  return mode == TruthMode::kStochastic ? "stochastic" : "plug_in";
}

TruthMode ParseTruthMode(const std::string& name) {
  if (name == "stochastic") return TruthMode::kStochastic;
  if (name == "plug_in") return TruthMode::kPlugIn;
  throw ConfigError("unknown truth mode '" + name +
                    "' (expected stochastic or plug_in)");
}

double ScenarioSpec::noise_sd() const {
  if (noiseless) return 0.0;
  return noise == NoiseParam::kVariance ? std::sqrt(0.5) : 0.5;
}

std::string ScenarioSpec::name() const {
  return "S" + std::to_string(static_cast<int>(id));
}

void ScenarioSpec::Validate() const {
  if (!(contamination_l >= 0.0 && contamination_l <= 1.0)) {
    throw ConfigError("contamination_l must lie in [0, 1]");
  }
}

ScenarioSpec ScenarioSpec::Parse(const std::string& name) {
  std::string key = name;
  if (!key.empty() && (key[0] == 's' || key[0] == 'S')) key = key.substr(1);
  if (key.size() == 1 && key[0] >= '1' && key[0] <= '6') {
    ScenarioSpec spec;
    spec.id = static_cast<ScenarioId>(key[0] - '0');
    return spec;
  }
  throw ConfigError("unknown scenario '" + name + "' (expected S1..S6)");
}

nlohmann::json ScenarioSpec::ToJson() const {
  return {{"id", name()},
          {"r", r()},
          {"s", s()},
          {"contamination_l", contamination_l},
          {"noise_param", NoiseParamName(noise)},
          {"noise_sd", noise_sd()}};
}

Eigen::Vector2d IntermediateBaseline(const ScenarioSpec& spec,
                                     const double* x) {
  switch (spec.id) {
    case ScenarioId::kS2:
      return {Square(x[0]) * x[2] + std::sin(x[3]),
              x[0] * x[0] * x[0] - Square(x[1] - x[3])};
    case ScenarioId::kS6:
      return {0.0, x[0]};
    default:
      return {x[2], x[0]};
  }
}

Eigen::Vector2d IntermediateEffect(const ScenarioSpec& spec, const double* x) {
  if (spec.id == ScenarioId::kS6) {
    return {-0.5 + 0.4 * x[0] - 0.6 * x[1], 0.5 + 0.6 * x[0] - 0.4 * x[1]};
  }
  return {4.0 * (x[0] - x[1]), 4.0 * (x[3] - x[2])};
}

double OutcomeBaseline(const ScenarioSpec& spec, const double* x) {
  switch (spec.id) {
    case ScenarioId::kS1:
    case ScenarioId::kS2:
      return -1.0 + x[1] + x[3];
    case ScenarioId::kS3:
      return (x[0] + x[2]) * Square(x[0]) + std::sin(x[3]) -
             Square(x[1] - x[3]);
    case ScenarioId::kS4:
      return x[0] * x[0] * x[0] + Square(x[1]) + x[2];
    case ScenarioId::kS5:
      return x[1] - Square(x[3]);
    case ScenarioId::kS6:
      return x[1];
  }
  return 0.0;
}

double OutcomeEffect(const ScenarioSpec& spec, const double* x,
                     const Eigen::Vector2d& m) {
  switch (spec.id) {
    case ScenarioId::kS4:
      return m(0) + x[3] * m(1);
    case ScenarioId::kS5:
      return 0.25 * Square(m(0) - x[2]) + m(1);
    default:
      return m(0) + m(1);
  }
}

double ConditionalOutcomeMean(const ScenarioSpec& spec, const double* x,
                              int action, TruthMode mode) {
  Eigen::Vector2d m = IntermediateBaseline(spec, x);
  if (action != 0) m += IntermediateEffect(spec, x);
  double mean = OutcomeBaseline(spec, x) + OutcomeEffect(spec, x, m);
  if (mode == TruthMode::kStochastic && spec.id == ScenarioId::kS5) {
    mean += 0.25 * Square(spec.noise_sd());
  }
  return mean;
}

double TreatmentEffect(const ScenarioSpec& spec, const double* x) {
  return ConditionalOutcomeMean(spec, x, 1, TruthMode::kPlugIn) -
         ConditionalOutcomeMean(spec, x, 0, TruthMode::kPlugIn);
}

Eigen::MatrixXd DrawCovariates(const ScenarioSpec& spec, Eigen::Index n,
                               std::uint64_t seed) {
  std::mt19937_64 rng(DeriveSeed(seed, kCovariateStream));
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  // Row-major fill keeps a row's draws together regardless of n.
  Eigen::MatrixXd x(n, spec.r());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int k = 0; k < spec.r(); ++k) x(i, k) = unif(rng);
  }
  return x;
}

IntermediateDraw DrawIntermediates(const ScenarioSpec& spec,
                                   const Eigen::MatrixXd& covariates,
                                   const Eigen::VectorXd& actions,
                                   std::uint64_t seed) {
  const Eigen::Index n = covariates.rows();
  const Eigen::MatrixXd rows = covariates.transpose();
  std::mt19937_64 rng(DeriveSeed(seed, kIntermediateStream));
  std::normal_distribution<double> noise(0.0, 1.0);
  const double sd = spec.noise_sd();
  IntermediateDraw out{Eigen::MatrixXd(n, 2), Eigen::MatrixXd(n, 2)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const double* x = rows.col(i).data();
    Eigen::Vector2d m =
        IntermediateBaseline(spec, x) + actions(i) * IntermediateEffect(spec, x);
    const double e0 = noise(rng);
    const double e1 = noise(rng);
    m(0) += sd * e0;
    m(1) += sd * e1;
    out.actual.row(i) = m.transpose();
    out.recorded(i, 0) = m(0) + Contamination(spec, x, actions(i));
    out.recorded(i, 1) = m(1);
  }
  return out;
}

namespace {

Eigen::VectorXd DrawTreatments(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(DeriveSeed(seed, kTreatmentStream));
  std::bernoulli_distribution coin(0.5);
  Eigen::VectorXd a(n);
  for (Eigen::Index i = 0; i < n; ++i) a(i) = coin(rng) ? 1.0 : 0.0;
  return a;
}

// Y given covariates and the uncontaminated intermediates.
Eigen::VectorXd DrawOutcomes(const ScenarioSpec& spec,
                             const Eigen::MatrixXd& covariates,
                             const Eigen::MatrixXd& intermediates,
                             std::uint64_t seed) {
  const Eigen::Index n = covariates.rows();
  const Eigen::MatrixXd rows = covariates.transpose();
  std::mt19937_64 rng(DeriveSeed(seed, kOutcomeStream));
  std::normal_distribution<double> noise(0.0, 1.0);
  const double sd = spec.noise_sd();
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double* x = rows.col(i).data();
    const Eigen::Vector2d m = intermediates.row(i).transpose();
    y(i) = OutcomeBaseline(spec, x) + OutcomeEffect(spec, x, m) +
           sd * noise(rng);
  }
  return y;
}

}  // namespace

ExperimentalSample GenerateExperimental(const ScenarioSpec& spec,
                                        Eigen::Index n, std::uint64_t seed) {
  spec.Validate();
  if (n < 1) throw ConfigError("sample size must be at least 1");
  Eigen::MatrixXd x = DrawCovariates(spec, n, seed);
  Eigen::VectorXd a = DrawTreatments(n, seed);
  IntermediateDraw m = DrawIntermediates(spec, x, a, seed);
  return ExperimentalSample(std::move(x), std::move(a), std::move(m.recorded));
}

AuxiliarySample GenerateAuxiliary(const ScenarioSpec& spec, Eigen::Index n,
                                  std::uint64_t seed) {
  spec.Validate();
  if (n < 1) throw ConfigError("sample size must be at least 1");
  Eigen::MatrixXd x = DrawCovariates(spec, n, seed);
  const Eigen::VectorXd a = DrawTreatments(n, seed);
  IntermediateDraw m = DrawIntermediates(spec, x, a, seed);
  Eigen::VectorXd y = DrawOutcomes(spec, x, m.actual, seed);
  return AuxiliarySample(std::move(x), std::move(m.recorded), std::move(y));
}

Policy Policy::Rule(DecisionRule rule) {
  Policy p;
  p.rule_.emplace(std::move(rule));
  return p;
}

Policy Policy::Optimal() { return Policy(); }

Decisions Policy::Decide(const ScenarioSpec& spec,
                         const Eigen::MatrixXd& covariates) const {
  if (rule_) {
    return gear::Decide(*rule_, Expand(rule_->basis(), covariates).values);
  }
  const Eigen::MatrixXd rows = covariates.transpose();
  Decisions d(static_cast<std::size_t>(covariates.rows()));
  for (Eigen::Index i = 0; i < covariates.rows(); ++i) {
    d[static_cast<std::size_t>(i)] = TreatmentEffect(spec, rows.col(i).data()) > 0.0;
  }
  return d;
}

double TrueValue(const ScenarioSpec& spec, const Policy& policy,
                 Eigen::Index mc_size, std::uint64_t seed, TruthMode mode) {
  if (mc_size < 1) throw ConfigError("mc_size must be at least 1");
  ScenarioSpec model = spec;
  if (mode == TruthMode::kPlugIn) model.noiseless = true;
  const Eigen::MatrixXd x = DrawCovariates(model, mc_size, seed);
  const Decisions d = policy.Decide(model, x);
  Eigen::VectorXd a(mc_size);
  for (Eigen::Index i = 0; i < mc_size; ++i) {
    a(i) = d[static_cast<std::size_t>(i)];
  }
  const IntermediateDraw m = DrawIntermediates(model, x, a, seed);
  return DrawOutcomes(model, x, m.actual, seed).mean();
}

std::optional<Eigen::VectorXd> ReferenceBeta(const ScenarioSpec& spec) {
  switch (spec.id) {
    case ScenarioId::kS1:
    case ScenarioId::kS2:
    case ScenarioId::kS3: {
      Eigen::VectorXd beta(5);
      beta << 0.0, 0.5, -0.5, -0.5, 0.5;
      return beta;
    }
    case ScenarioId::kS6: {
      Eigen::VectorXd beta(3);
      beta << 0.0, 1.0, -1.0;
      return beta / std::sqrt(2.0);
    }
    default:
      return std::nullopt;
  }
}

namespace {

Policy ReferencePolicy(const ScenarioSpec& spec) {
  if (auto beta = ReferenceBeta(spec)) {
    return Policy::Rule(DecisionRule(*beta, BasisSpec::Identity(spec.r())));
  }
  return Policy::Optimal();
}

}  // namespace

TruthSpec MakeTruth(const ScenarioSpec& spec, Eigen::Index mc_size,
                    std::uint64_t seed, TruthMode mode) {
  TruthSpec truth;
  truth.reference = ReferencePolicy(spec);
  truth.beta0 = ReferenceBeta(spec);
  truth.mc_size = mc_size;
  truth.mode = mode;
  truth.true_value = TrueValue(spec, truth.reference, mc_size, seed, mode);
  return truth;
}

double RateCorrectDecision(const ScenarioSpec& spec, const DecisionRule& rule,
                           const TruthSpec& truth, Eigen::Index mc_size,
                           std::uint64_t seed) {
  if (mc_size < 1) throw ConfigError("mc_size must be at least 1");
  const Eigen::MatrixXd x = DrawCovariates(spec, mc_size, seed);
  const Decisions d = Decide(rule, Expand(rule.basis(), x).values);
  const Decisions ref = truth.reference.Decide(spec, x);
  Eigen::Index agree = 0;
  for (std::size_t i = 0; i < d.size(); ++i) agree += d[i] == ref[i];
  return static_cast<double>(agree) / static_cast<double>(mc_size);
}

TruthTable::TruthTable(const ScenarioSpec& spec, const BasisSpec& rule_basis,
                       const Policy& reference, Eigen::Index size,
                       std::uint64_t seed, TruthMode mode)
    : rule_basis_(rule_basis) {
  if (size < 1) throw ConfigError("truth table size must be at least 1");
  const Eigen::MatrixXd x = DrawCovariates(spec, size, seed);
  basis_ = Expand(rule_basis, x).values;
  const Eigen::MatrixXd rows = x.transpose();
  effect_.resize(size);
  double base_sum = 0.0;
  for (Eigen::Index i = 0; i < size; ++i) {
    const double* xi = rows.col(i).data();
    const double y0 = ConditionalOutcomeMean(spec, xi, 0, mode);
    const double y1 = ConditionalOutcomeMean(spec, xi, 1, mode);
    base_sum += y0;
    effect_(i) = y1 - y0;
  }
  const double n = static_cast<double>(size);
  base_mean_ = base_sum / n;
  const Decisions ref = reference.Decide(spec, x);
  agreement_.resize(size);
  double treated = 0.0;
  double gain = 0.0;
  for (Eigen::Index i = 0; i < size; ++i) {
    const bool r = ref[static_cast<std::size_t>(i)] != 0;
    agreement_(i) = r ? 1.0 : -1.0;
    if (r) {
      treated += 1.0;
      gain += effect_(i);
    }
  }
  reference_treated_ = treated;
  reference_value_ = base_mean_ + gain / n;
}

double TruthTable::Value(const DecisionRule& rule) const {
  if (!(rule.basis() == rule_basis_)) {
    throw DimensionError("rule basis differs from the truth table basis");
  }
  const double gain =
      kernels::PositiveScoreSum(View(basis_), Span(rule.beta()), Span(effect_));
  return base_mean_ + gain / static_cast<double>(size());
}

double TruthTable::RateCorrectDecision(const DecisionRule& rule) const {
  if (!(rule.basis() == rule_basis_)) {
    throw DimensionError("rule basis differs from the truth table basis");
  }
  const double n = static_cast<double>(size());
  const double agree =
      n - reference_treated_ +
      kernels::PositiveScoreSum(View(basis_), Span(rule.beta()),
                                Span(agreement_));
  return agree / n;
}

ReplicationSeeds SeedsFor(std::uint64_t seed, int rep) {
  const auto r = static_cast<std::uint64_t>(rep);
  return {DeriveSeed(seed, r, 1), DeriveSeed(seed, r, 2),
          DeriveSeed(seed, r, 3), DeriveSeed(seed, r, 4)};
}

namespace {

BasisSpec RuleBasisFor(const AnalysisOptions& options, int r) {
  if (options.rule_basis) return *options.rule_basis;
  if (options.method == Method::kGearLinear) return BasisSpec::Identity(r);
  return BasisSpec::Polynomial(r, options.rule_degree,
                               options.continuous_covariates);
}

// Reference coefficients laid out in the rule basis. Identity and
// polynomial bases share the leading (1, x) block; higher powers get zero.
std::optional<Eigen::VectorXd> EmbedReference(
    const std::optional<Eigen::VectorXd>& beta0, const BasisSpec& basis) {
  if (!beta0 || basis.kind == BasisKind::kBspline) return std::nullopt;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(basis.ExpandedDim());
  out.head(beta0->size()) = *beta0;
  return out;
}

}  // namespace

ReplicationRecord RunReplication(const ScenarioSpec& spec, Eigen::Index n_e,
                                 Eigen::Index n_u, int rep,
                                 const ReplicationOptions& options,
                                 const TruthTable& truth,
                                 const std::optional<Eigen::VectorXd>& beta0,
                                 std::uint64_t seed) {
  const ReplicationSeeds seeds = SeedsFor(seed, rep);
  AnalysisOptions analysis = options.analysis;
  analysis.search.seed = seeds.search;
  analysis.search.workers = 1;
  analysis.cv_seed = seeds.cv;
  ReplicationRecord record;
  try {
    const ExperimentalSample experimental =
        GenerateExperimental(spec, n_e, seeds.experimental);
    const AuxiliarySample auxiliary =
        GenerateAuxiliary(spec, n_u, seeds.auxiliary);
    const Analysis result = RunAnalysis(experimental, auxiliary, analysis);
    if (result.fatal) {
      for (const auto& flag : result.flags) {
        record.failure += record.failure.empty() ? flag : "," + flag;
      }
      return record;
    }
    const RuleEvaluation& eval = result.evaluation;
    const double truth_value = truth.ReferenceValue();
    record.value_hat = eval.value;
    record.sigma_hat = eval.sigma;
    record.sigma_hat_alternate = eval.sigma_ratio_weight;
    record.covered = eval.interval.lower <= truth_value &&
                     truth_value <= eval.interval.upper;
    const ConfidenceInterval alt = MakeConfidenceInterval(
        eval.value, eval.sigma_ratio_weight, n_e, analysis.ci_level);
    record.covered_alternate =
        alt.lower <= truth_value && truth_value <= alt.upper;
    record.value_of_rule = truth.Value(eval.rule);
    record.rcd = truth.RateCorrectDecision(eval.rule);
    const auto reference = EmbedReference(beta0, eval.rule.basis());
    record.l2_loss = reference
                         ? FoldedDistance(eval.rule.beta(), *reference)
                         : std::numeric_limits<double>::quiet_NaN();
    record.beta = eval.rule.beta();
    record.ok = true;
  } catch (const Error& e) {
    record.failure = e.what();
  }
  return record;
}

ReplicationReport Aggregate(const ScenarioSpec& spec, Method method,
                            Eigen::Index n_e, Eigen::Index n_u,
                            double true_value,
                            std::vector<ReplicationRecord> records) {
  ReplicationReport report;
  report.spec = spec;
  report.method = method;
  report.n_e = n_e;
  report.n_u = n_u;
  report.true_value = true_value;
  std::vector<const ReplicationRecord*> ok;
  for (const auto& r : records) {
    if (r.ok) {
      ok.push_back(&r);
    } else {
      ++report.excluded;
    }
  }
  report.replications = static_cast<int>(ok.size());
  if (!ok.empty()) {
    const double k = static_cast<double>(ok.size());
    auto mean = [&](auto field) {
      double sum = 0.0;
      for (const auto* r : ok) sum += field(*r);
      return sum / k;
    };
    report.mean_value_hat = mean([](const auto& r) { return r.value_hat; });
    if (ok.size() > 1) {
      double ss = 0.0;
      for (const auto* r : ok) ss += Square(r->value_hat - report.mean_value_hat);
      report.se_value_hat = std::sqrt(ss / (k - 1.0));
    }
    const double root_n = std::sqrt(static_cast<double>(n_e));
    report.mean_sigma_raw = mean([](const auto& r) { return r.sigma_hat; });
    report.mean_sigma_hat = report.mean_sigma_raw / root_n;
    report.mean_sigma_hat_alternate =
        mean([](const auto& r) { return r.sigma_hat_alternate; }) / root_n;
    report.value_of_rule = mean([](const auto& r) { return r.value_of_rule; });
    report.coverage = mean([](const auto& r) { return r.covered ? 1.0 : 0.0; });
    report.coverage_alternate =
        mean([](const auto& r) { return r.covered_alternate ? 1.0 : 0.0; });
    report.rcd = mean([](const auto& r) { return r.rcd; });
    report.l2_loss = mean([](const auto& r) { return r.l2_loss; });
    std::vector<double> losses;
    for (const auto* r : ok) losses.push_back(r->l2_loss);
    std::sort(losses.begin(), losses.end());
    const std::size_t mid = losses.size() / 2;
    report.median_l2_loss = losses.size() % 2 == 1
                                ? losses[mid]
                                : 0.5 * (losses[mid - 1] + losses[mid]);
  }
  report.records = std::move(records);
  return report;
}

ReplicationReport RunReplications(const ScenarioSpec& spec, Eigen::Index n_e,
                                  Eigen::Index n_u, int reps,
                                  const ReplicationOptions& options,
                                  std::uint64_t seed) {
  if (reps < 1) throw ConfigError("reps must be at least 1");
  spec.Validate();
  options.analysis.Validate();
  const BasisSpec rule_basis = RuleBasisFor(options.analysis, spec.r());
  const TruthTable truth(spec, rule_basis, ReferencePolicy(spec),
                         options.truth_size, DeriveSeed(seed, kTruthStream),
                         options.truth_mode);
  const auto beta0 = ReferenceBeta(spec);
  std::vector<ReplicationRecord> records(static_cast<std::size_t>(reps));
  ParallelFor(records.size(), options.workers, [&](std::size_t i) {
    records[i] = RunReplication(spec, n_e, n_u, static_cast<int>(i), options,
                                truth, beta0, seed);
  });
  return Aggregate(spec, options.analysis.method, n_e, n_u,
                   truth.ReferenceValue(), std::move(records));
}

std::vector<ReplicationReport> SensitivitySweep(std::vector<double> l_values,
                                                Eigen::Index n_e,
                                                Eigen::Index n_u, int reps,
                                                const ReplicationOptions& options,
                                                std::uint64_t seed,
                                                NoiseParam noise) {
  for (double l : l_values) {
    if (!(l >= 0.0 && l <= 1.0)) {
      throw ConfigError("contamination level must lie in [0, 1]");
    }
  }
  std::sort(l_values.begin(), l_values.end());
  std::vector<ReplicationReport> reports;
  for (double l : l_values) {
    ScenarioSpec spec;
    spec.id = ScenarioId::kS6;
    spec.contamination_l = l;
    spec.noise = noise;
    reports.push_back(RunReplications(spec, n_e, n_u, reps, options, seed));
  }
  return reports;
}

void WriteReportsCsv(std::ostream& out,
                     const std::vector<ReplicationReport>& reports) {
  out << "scenario,l,method,n_e,n_u,reps,excluded,true_value,value_hat,"
         "se_value_hat,sigma_hat,value_of_rule,coverage,rcd,l2_loss,"
         "median_l2_loss,sigma_hat_ratio_weight,coverage_ratio_weight\n";
  for (const auto& r : reports) {
    out << r.spec.name() << ',' << r.spec.contamination_l << ','
        << MethodName(r.method) << ',' << r.n_e << ',' << r.n_u << ','
        << r.replications << ',' << r.excluded << ',' << r.true_value << ','
        << r.mean_value_hat << ',' << r.se_value_hat << ','
        << r.mean_sigma_hat << ',' << r.value_of_rule << ',' << r.coverage
        << ',' << r.rcd << ',' << r.l2_loss << ',' << r.median_l2_loss << ','
        << r.mean_sigma_hat_alternate << ',' << r.coverage_alternate << '\n';
  }
}

nlohmann::json ToJson(const ReplicationReport& report) {
  nlohmann::json j;
  j["scenario"] = report.spec.ToJson();
  j["method"] = MethodName(report.method);
  j["n_e"] = report.n_e;
  j["n_u"] = report.n_u;
  j["true_value"] = report.true_value;
  j["mean_value_hat"] = report.mean_value_hat;
  j["se_value_hat"] = report.se_value_hat;
  j["mean_sigma_hat"] = report.mean_sigma_hat;
  j["mean_sigma_raw"] = report.mean_sigma_raw;
  j["mean_sigma_hat_ratio_weight"] = report.mean_sigma_hat_alternate;
  j["value_of_rule"] = report.value_of_rule;
  j["coverage"] = report.coverage;
  j["coverage_ratio_weight"] = report.coverage_alternate;
  j["rcd"] = report.rcd;
  j["l2_loss"] = report.l2_loss;
  j["median_l2_loss"] = report.median_l2_loss;
  j["replications"] = report.replications;
  j["excluded"] = report.excluded;
  nlohmann::json failures = nlohmann::json::array();
  for (std::size_t i = 0; i < report.records.size(); ++i) {
    if (!report.records[i].ok) {
      failures.push_back({{"rep", i}, {"reason", report.records[i].failure}});
    }
  }
  j["failures"] = std::move(failures);
  return j;
}

}  // namespace gear
