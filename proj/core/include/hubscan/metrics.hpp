#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hubscan/ipchd.hpp"
#include "hubscan/simgen.hpp"

namespace hubscan {

enum class Method {
  kIpchdSample,
  kIpchdScreened,
  kIpchdThresholded,
  kRawInverse,
};

std::string to_string(Method method);
Method method_from_string(const std::string& name);

enum class HubStrength { kWeak, kStrong };

std::string to_string(HubStrength strength);
HubStrength strength_from_string(const std::string& name);

/// One simulation replicate. When `error` is non-empty the metric fields are
/// meaningless and are emitted as empty/null.
struct ExperimentRecord {
  SimConfig config;  // cell parameters; config.seed is the replicate seed
  long n = 0;
  Method method = Method::kIpchdThresholded;
  int replicate = 0;
  std::uint64_t seed = 0;
  double tpr = 0.0;
  double fpr = 0.0;
  double wall_time_ms = 0.0;
  int s_hat = 0;
  bool fallback = false;
  std::string error;
};

/// The replicated experiment grid of the simulation study.
struct GridSpec {
  std::vector<int> p_values{100};
  std::vector<double> t_fractions{1.0};
  std::vector<double> n_fractions{1.0};
  std::vector<double> delta_values{5.0};
  std::vector<HubStrength> hub_strengths{HubStrength::kStrong};
  std::vector<Method> methods{Method::kIpchdThresholded};
  int r = 5;
  int replicates = 50;
  std::uint64_t base_seed = 0;

  double xi = 0.65;                // thresholded-estimator tuning parameter
  std::optional<int> screen_size;  // screened method; default min(p/2, n)
  SMode s_mode = SMode::kOverEstimated;
  double ratio_factor = 1.5;

  bool measure_time = true;  // off: wall_time_ms = 0, output fully seeded
  int threads = 0;           // replicate-level parallelism; 0 = auto

  void validate() const;
};

/// |H ∩ Ĥ| / |H|. Throws EmptyTruthError when H is empty.
double tpr(std::span<const int> true_hubs, std::span<const int> est_hubs);

/// |Hᶜ ∩ Ĥ| / |Hᶜ|. Throws NoNonHubsError when H covers all p variables.
double fpr(std::span<const int> true_hubs, std::span<const int> est_hubs,
           int p);

/// Run every (cell x method x replicate); one record each, in deterministic
/// order. Replicate seeds derive from (base_seed, cell, replicate) so all
/// methods in a cell see identical data. Individual failures become
/// error-tagged records; the grid never aborts.
std::vector<ExperimentRecord> run_grid(const GridSpec& spec);

struct SummaryRow {
  SimConfig config;
  long n = 0;
  Method method = Method::kIpchdThresholded;
  int count = 0;   // records with metrics
  int errors = 0;  // error-tagged records
  double mean_tpr = 0.0, sd_tpr = 0.0;
  double mean_fpr = 0.0, sd_fpr = 0.0;
  double mean_time_ms = 0.0, sd_time_ms = 0.0;
};

/// Mean and sample sd of each metric grouped by (cell, method), in first-
/// appearance order. Error records are counted but excluded from the moments.
std::vector<SummaryRow> summarize(const std::vector<ExperimentRecord>& records);

std::string records_to_csv(const std::vector<ExperimentRecord>& records);
std::string records_to_jsonl(const std::vector<ExperimentRecord>& records);
std::string summary_to_csv(const std::vector<SummaryRow>& rows);

}  // namespace hubscan
