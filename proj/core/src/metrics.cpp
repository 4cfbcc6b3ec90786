#include "hubscan/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <thread>
#include <tuple>
#include <unordered_set>

#include <json.hpp>

#include "hubscan/pipeline.hpp"
#include "hubscan/rng.hpp"

namespace hubscan {

std::string to_string(Method method) {
  switch (method) {
    case Method::kIpchdSample: return "ipchd_sample";
    case Method::kIpchdScreened: return "ipchd_screened";
    case Method::kIpchdThresholded: return "ipchd_thresholded";
    case Method::kRawInverse: return "raw_inverse";
  }
  return "unknown";
}

Method method_from_string(const std::string& name) {
  if (name == "ipchd_sample") return Method::kIpchdSample;
  if (name == "ipchd_screened") return Method::kIpchdScreened;
  if (name == "ipchd_thresholded") return Method::kIpchdThresholded;
  if (name == "raw_inverse") return Method::kRawInverse;
  throw InvalidArgumentError("method_from_string",
                             "unknown method '" + name + "'");
}

std::string to_string(HubStrength strength) {
  return strength == HubStrength::kWeak ? "weak" : "strong";
}

HubStrength strength_from_string(const std::string& name) {
  if (name == "weak") return HubStrength::kWeak;
  if (name == "strong") return HubStrength::kStrong;
  throw InvalidArgumentError("strength_from_string",
                             "unknown hub strength '" + name + "'");
}

void GridSpec::validate() const {
  if (p_values.empty() || t_fractions.empty() || n_fractions.empty() ||
      delta_values.empty() || hub_strengths.empty() || methods.empty()) {
    throw InvalidArgumentError("GridSpec", "value lists must be nonempty");
  }
  if (replicates < 1) {
    throw InvalidArgumentError("GridSpec", "replicates must be >= 1");
  }
  if (r < 1) {
    throw InvalidArgumentError("GridSpec", "r must be >= 1");
  }
  for (int p : p_values) {
    if (p < 2) throw InvalidArgumentError("GridSpec", "p must be >= 2");
  }
  for (double f : t_fractions) {
    if (!(f > 0.0) || f > 1.0) {
      throw InvalidArgumentError("GridSpec", "t fractions must be in (0, 1]");
    }
  }
  for (double f : n_fractions) {
    if (!(f > 0.0)) {
      throw InvalidArgumentError("GridSpec", "n fractions must be > 0");
    }
  }
  for (double d : delta_values) {
    if (!(d > 0.0)) {
      throw InvalidArgumentError("GridSpec", "delta must be > 0");
    }
  }
  if (!(xi >= 0.0)) {
    throw InvalidArgumentError("GridSpec", "xi must be >= 0");
  }
  if (screen_size.has_value() && *screen_size < 1) {
    throw InvalidArgumentError("GridSpec", "screen_size must be >= 1");
  }
  if (!(ratio_factor > 1.0)) {
    throw InvalidArgumentError("GridSpec", "ratio_factor must be > 1");
  }
  if (threads < 0) {
    throw InvalidArgumentError("GridSpec", "threads must be >= 0");
  }
}

namespace {

std::unordered_set<int> as_set(std::span<const int> v) {
  return std::unordered_set<int>(v.begin(), v.end());
}

}  // namespace

double tpr(std::span<const int> true_hubs, std::span<const int> est_hubs) {
  if (true_hubs.empty()) {
    throw EmptyTruthError("tpr", "true hub set is empty");
  }
  const auto truth = as_set(true_hubs);
  long hit = 0;
  for (int k : as_set(est_hubs)) {
    if (truth.count(k)) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(truth.size());
}

double fpr(std::span<const int> true_hubs, std::span<const int> est_hubs,
           int p) {
  const auto truth = as_set(true_hubs);
  const long non_hubs = p - static_cast<long>(truth.size());
  if (non_hubs <= 0) {
    throw NoNonHubsError("fpr", "every variable is a true hub");
  }
  long false_hits = 0;
  for (int k : as_set(est_hubs)) {
    if (!truth.count(k)) ++false_hits;
  }
  return static_cast<double>(false_hits) / static_cast<double>(non_hubs);
}

namespace {

struct CellParams {
  SimConfig config;  // seed filled per replicate
  long n = 0;
};

struct GridTask {
  CellParams cell;
  Method method;
  int replicate;
  std::uint64_t seed;
};

std::uint64_t replicate_seed(const GridSpec& spec, const CellParams& cell,
                             int replicate) {
  // The method tag is deliberately absent: all methods in a cell share data.
  std::uint64_t s = mix_seed(spec.base_seed, 0x6c65636c);
  s = mix_seed(s, static_cast<std::uint64_t>(cell.config.p));
  s = mix_seed(s, static_cast<std::uint64_t>(cell.config.t));
  s = mix_seed(s, static_cast<std::uint64_t>(cell.n));
  s = mix_seed(s, static_cast<std::uint64_t>(
                      std::llround(cell.config.delta * 1e6)));
  s = mix_seed(s, static_cast<std::uint64_t>(
                      std::llround(cell.config.p_hub * 1e6)));
  s = mix_seed(s, static_cast<std::uint64_t>(replicate));
  return s;
}

ExperimentRecord run_one(const GridSpec& spec, const GridTask& task) {
  ExperimentRecord rec;
  rec.config = task.cell.config;
  rec.config.seed = task.seed;
  rec.n = task.cell.n;
  rec.method = task.method;
  rec.replicate = task.replicate;
  rec.seed = task.seed;
  rec.tpr = std::numeric_limits<double>::quiet_NaN();
  rec.fpr = std::numeric_limits<double>::quiet_NaN();

  try {
    const GroundTruthModel model = generate_precision(rec.config);
    const DataMatrix data = sample_gaussian(model, task.cell.n, task.seed);

    IpchdConfig icfg;
    icfg.kappa_mode = KappaMode::kTwoSd;
    icfg.s_mode = spec.s_mode;
    icfg.ratio_factor = spec.ratio_factor;

    const auto started = std::chrono::steady_clock::now();
    std::vector<int> est_hubs;
    switch (task.method) {
      case Method::kIpchdSample: {
        const HubResult hr = detect(sample_correlation(data), icfg);
        est_hubs = hr.hubs;
        rec.s_hat = hr.s_hat;
        rec.fallback = hr.fallback;
        break;
      }
      case Method::kIpchdThresholded: {
        const SymmetricMatrix r = sample_correlation(data);
        const Mask m = threshold_mask(r, spec.xi, task.cell.n);
        const HubResult hr = detect(apply_mask(m, r), icfg);
        est_hubs = hr.hubs;
        rec.s_hat = hr.s_hat;
        rec.fallback = hr.fallback;
        break;
      }
      case Method::kIpchdScreened: {
        const SymmetricMatrix r = sample_correlation(data);
        const int p = rec.config.p;
        // Corollary-2 style constraint: keep T <= n inside the grid.
        int t_screen = spec.screen_size.value_or(std::max(1, p / 2));
        t_screen = static_cast<int>(std::min<long>(
            {static_cast<long>(t_screen), task.cell.n,
             static_cast<long>(p)}));
        t_screen = std::max(1, t_screen);
        const ScreenSelection sel = screen_variables(r, t_screen);
        const HubResult hr = detect(sel.submatrix, icfg);
        for (int h : hr.hubs) est_hubs.push_back(sel.selected[h]);
        std::sort(est_hubs.begin(), est_hubs.end());
        rec.s_hat = hr.s_hat;
        rec.fallback = hr.fallback;
        break;
      }
      case Method::kRawInverse: {
        std::optional<int> screen_t;
        if (rec.config.p >= task.cell.n) {
          screen_t = static_cast<int>(
              std::min(task.cell.n / 2, static_cast<long>(rec.config.p)));
        }
        const RawInverseResult rr = raw_inverse_baseline(data, screen_t);
        est_hubs = rr.hubs;
        break;
      }
    }
    const auto stopped = std::chrono::steady_clock::now();

    rec.tpr = tpr(model.hub_set, est_hubs);
    rec.fpr = fpr(model.hub_set, est_hubs, rec.config.p);
    rec.wall_time_ms =
        spec.measure_time
            ? std::chrono::duration<double, std::milli>(stopped - started)
                  .count()
            : 0.0;
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
  return rec;
}

}  // namespace

std::vector<ExperimentRecord> run_grid(const GridSpec& spec) {
  spec.validate();

  std::vector<GridTask> tasks;
  for (int p : spec.p_values) {
    for (double tf : spec.t_fractions) {
      for (double nf : spec.n_fractions) {
        for (double delta : spec.delta_values) {
          for (HubStrength strength : spec.hub_strengths) {
            CellParams cell;
            cell.config.p = p;
            cell.config.t = std::clamp(
                static_cast<int>(std::llround(tf * p)), 1, p);
            cell.config.r = spec.r;
            cell.config.p_hub =
                strength == HubStrength::kStrong ? 0.8 : 0.4;
            cell.config.p_nonhub = 0.05;
            cell.config.p_nonsignal = 0.005;
            cell.config.delta = delta;
            cell.n = std::max<long>(1, std::llround(nf * p));
            for (Method method : spec.methods) {
              for (int rep = 0; rep < spec.replicates; ++rep) {
                tasks.push_back(GridTask{cell, method, rep,
                                         replicate_seed(spec, cell, rep)});
              }
            }
          }
        }
      }
    }
  }

  std::vector<ExperimentRecord> records(tasks.size());
  unsigned threads = spec.threads > 0
                         ? static_cast<unsigned>(spec.threads)
                         : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads,
                               static_cast<unsigned>(tasks.size()));
  if (threads <= 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      records[i] = run_one(spec, tasks[i]);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= tasks.size()) return;
          records[i] = run_one(spec, tasks[i]);
        }
      });
    }
    for (std::thread& th : pool) th.join();
  }
  return records;
}

std::vector<SummaryRow> summarize(
    const std::vector<ExperimentRecord>& records) {
  if (records.empty()) {
    throw InvalidArgumentError("summarize", "no records to summarize");
  }
  using Key = std::tuple<int, int, int, long, double, double, double, double,
                         int>;
  std::map<Key, std::size_t> index;
  std::vector<SummaryRow> rows;
  std::vector<std::vector<double>> tprs, fprs, times;

  for (const ExperimentRecord& rec : records) {
    const Key key{rec.config.p,        rec.config.t,
                  rec.config.r,        rec.n,
                  rec.config.delta,    rec.config.p_hub,
                  rec.config.p_nonhub, rec.config.p_nonsignal,
                  static_cast<int>(rec.method)};
    auto [it, inserted] = index.try_emplace(key, rows.size());
    if (inserted) {
      SummaryRow row;
      row.config = rec.config;
      row.config.seed = 0;
      row.n = rec.n;
      row.method = rec.method;
      rows.push_back(row);
      tprs.emplace_back();
      fprs.emplace_back();
      times.emplace_back();
    }
    const std::size_t g = it->second;
    if (rec.error.empty()) {
      tprs[g].push_back(rec.tpr);
      fprs[g].push_back(rec.fpr);
      times[g].push_back(rec.wall_time_ms);
    } else {
      ++rows[g].errors;
    }
  }

  const auto mean_sd = [](const std::vector<double>& v) {
    if (v.empty()) return std::pair<double, double>{0.0, 0.0};
    const double mean =
        std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    if (v.size() == 1) return std::pair<double, double>{mean, 0.0};
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::pair<double, double>{
        mean, std::sqrt(ss / static_cast<double>(v.size() - 1))};
  };

  for (std::size_t g = 0; g < rows.size(); ++g) {
    rows[g].count = static_cast<int>(tprs[g].size());
    std::tie(rows[g].mean_tpr, rows[g].sd_tpr) = mean_sd(tprs[g]);
    std::tie(rows[g].mean_fpr, rows[g].sd_fpr) = mean_sd(fprs[g]);
    std::tie(rows[g].mean_time_ms, rows[g].sd_time_ms) = mean_sd(times[g]);
  }
  return rows;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string records_to_csv(const std::vector<ExperimentRecord>& records) {
  std::string out =
      "p,t,r,n,delta,p_hub,p_nonhub,p_nonsignal,method,replicate,seed,tpr,"
      "fpr,wall_time_ms,s_hat,fallback,error\n";
  for (const ExperimentRecord& rec : records) {
    const bool ok = rec.error.empty();
    out += std::to_string(rec.config.p) + ',';
    out += std::to_string(rec.config.t) + ',';
    out += std::to_string(rec.config.r) + ',';
    out += std::to_string(rec.n) + ',';
    out += format_double(rec.config.delta) + ',';
    out += format_double(rec.config.p_hub) + ',';
    out += format_double(rec.config.p_nonhub) + ',';
    out += format_double(rec.config.p_nonsignal) + ',';
    out += to_string(rec.method) + ',';
    out += std::to_string(rec.replicate) + ',';
    out += std::to_string(rec.seed) + ',';
    out += (ok ? format_double(rec.tpr) : std::string()) + ',';
    out += (ok ? format_double(rec.fpr) : std::string()) + ',';
    out += (ok ? format_double(rec.wall_time_ms) : std::string()) + ',';
    out += (ok ? std::to_string(rec.s_hat) : std::string()) + ',';
    out += (ok ? (rec.fallback ? "true" : "false") : "") + std::string(",");
    out += csv_escape(rec.error) + '\n';
  }
  return out;
}

std::string records_to_jsonl(const std::vector<ExperimentRecord>& records) {
  std::string out;
  for (const ExperimentRecord& rec : records) {
    const bool ok = rec.error.empty();
    nlohmann::ordered_json j;
    j["p"] = rec.config.p;
    j["t"] = rec.config.t;
    j["r"] = rec.config.r;
    j["n"] = rec.n;
    j["delta"] = rec.config.delta;
    j["p_hub"] = rec.config.p_hub;
    j["p_nonhub"] = rec.config.p_nonhub;
    j["p_nonsignal"] = rec.config.p_nonsignal;
    j["method"] = to_string(rec.method);
    j["replicate"] = rec.replicate;
    j["seed"] = rec.seed;
    if (ok) {
      j["tpr"] = rec.tpr;
      j["fpr"] = rec.fpr;
      j["wall_time_ms"] = rec.wall_time_ms;
      j["s_hat"] = rec.s_hat;
      j["fallback"] = rec.fallback;
    } else {
      j["tpr"] = nullptr;
      j["fpr"] = nullptr;
      j["wall_time_ms"] = nullptr;
      j["s_hat"] = nullptr;
      j["fallback"] = nullptr;
    }
    j["error"] = rec.error;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::string summary_to_csv(const std::vector<SummaryRow>& rows) {
  std::string out =
      "p,t,r,n,delta,p_hub,p_nonhub,p_nonsignal,method,count,errors,"
      "mean_tpr,sd_tpr,mean_fpr,sd_fpr,mean_time_ms,sd_time_ms\n";
  for (const SummaryRow& row : rows) {
    out += std::to_string(row.config.p) + ',';
    out += std::to_string(row.config.t) + ',';
    out += std::to_string(row.config.r) + ',';
    out += std::to_string(row.n) + ',';
    out += format_double(row.config.delta) + ',';
    out += format_double(row.config.p_hub) + ',';
    out += format_double(row.config.p_nonhub) + ',';
    out += format_double(row.config.p_nonsignal) + ',';
    out += to_string(row.method) + ',';
    out += std::to_string(row.count) + ',';
    out += std::to_string(row.errors) + ',';
    out += format_double(row.mean_tpr) + ',';
    out += format_double(row.sd_tpr) + ',';
    out += format_double(row.mean_fpr) + ',';
    out += format_double(row.sd_fpr) + ',';
    out += format_double(row.mean_time_ms) + ',';
    out += format_double(row.sd_time_ms) + '\n';
  }
  return out;
}

}  // namespace hubscan
