#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "bdperiod/chain_model.hpp"
#include "bdperiod/period_engine.hpp"
#include "bdperiod/q_polynomials.hpp"
#include "bdperiod/series_analysis.hpp"
#include "bdperiod/simulator.hpp"

namespace bdperiod {

std::string_view version_string();

/// Where the Qbar sequence ended: its last value, or the saturation index.
struct QSummary {
  std::uint64_t n = 0;
  double qbar_n = 0.0;
  std::optional<std::uint64_t> saturated_at;
  Verdict verdict;  ///< overall growth verdict
  friend bool operator==(const QSummary&, const QSummary&) = default;
};

struct SeriesSummary {
  std::uint64_t horizon = 0;
  Verdict k, l, aperiodicity, prod_p, rp;
  friend bool operator==(const SeriesSummary&, const SeriesSummary&) = default;
};

/// Analytic period against the simulated signatures of a fleet.
struct EmpiricalAgreement {
  std::size_t runs = 0;
  std::size_t agreeing = 0;
  std::size_t inconclusive = 0;
  friend bool operator==(const EmpiricalAgreement&, const EmpiricalAgreement&) = default;
};

struct SimulationEcho {
  std::uint64_t seed = 0;
  std::uint64_t fleet = 0;
  State x0 = 0;
  std::uint64_t steps = 0;
  std::uint64_t burn_in = 0;
  std::vector<std::uint32_t> moduli;
  friend bool operator==(const SimulationEcho&, const SimulationEcho&) = default;
};

struct AnalysisBundle {
  std::string version;
  ProbePolicy policy;
  nlohmann::json chain;
  PeriodReport period_report;
  QSummary qbar;
  SeriesSummary series;
  std::optional<SimulationEcho> simulation;
  std::vector<EmpiricalReport> empirical;
  std::optional<ReturnStatistics> return_statistics;
  std::optional<EmpiricalAgreement> empirical_agreement;

  friend bool operator==(const AnalysisBundle&, const AnalysisBundle&) = default;
};

struct CrossValidateOptions {
  /// Fleet size; 0 skips the simulator.
  std::uint64_t fleet = 0;
  SimulationConfig simulation;
  /// Test hook: tampers with the series verdicts before the report is
  /// assembled.
  std::function<void(SeriesProbe&)> fault;
};

/**
 * Runs the series, Q-polynomial and (optionally) simulation analyses and
 * joins them. Throws ContradictionDetected when decided analytic verdicts
 * disagree: the growth of Qbar against aperiodicity, the three Qbar routes on
 * their common unsaturated range, or any period invariant. The simulated
 * period signatures are reported as agreement counts only.
 */
AnalysisBundle cross_validate(const ChainSpec& chain, const ProbePolicy& policy,
                              const CrossValidateOptions& options = {});

bool matches(Period analytic, EmpiricalPeriod empirical);

void to_json(nlohmann::json& j, const Verdict& v);
void from_json(const nlohmann::json& j, Verdict& v);
void to_json(nlohmann::json& j, const ProbePolicy& p);
void from_json(const nlohmann::json& j, ProbePolicy& p);
void to_json(nlohmann::json& j, const Classification& c);
void from_json(const nlohmann::json& j, Classification& c);
void to_json(nlohmann::json& j, const PeriodReport& r);
void from_json(const nlohmann::json& j, PeriodReport& r);
void to_json(nlohmann::json& j, const ResidueEstimate& r);
void from_json(const nlohmann::json& j, ResidueEstimate& r);
void to_json(nlohmann::json& j, const EmpiricalReport& r);
void from_json(const nlohmann::json& j, EmpiricalReport& r);
void to_json(nlohmann::json& j, const ReturnStatistics& s);
void from_json(const nlohmann::json& j, ReturnStatistics& s);
void to_json(nlohmann::json& j, const AnalysisBundle& b);
void from_json(const nlohmann::json& j, AnalysisBundle& b);

/// Period as it appears in reports: 1 and 2 as numbers, otherwise a string.
nlohmann::json period_to_json(Period p);
Period period_from_json(const nlohmann::json& j);

/// Compact by default; indent 2 with `pretty`.
std::string dump(const nlohmann::json& j, bool pretty);

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitUndecided = 2;
inline constexpr int kExitContradiction = 3;

/// Entry point behind the `bdperiod` executable; writes JSON to `out` and
/// diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bdperiod
