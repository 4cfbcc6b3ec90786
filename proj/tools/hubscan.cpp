// hubscan: hub detection in Gaussian graphical models from the spectral tail
// of a covariance/correlation estimate, plus the simulation harness around it.
//
// Machine-readable output goes to stdout (or --output/--records files);
// everything human-oriented goes to stderr. Exit codes: 0 success, 2
// parse/validation error, 3 numerical failure.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hubscan/metrics.hpp"
#include "hubscan/pipeline.hpp"
#include "hubscan/version.hpp"

namespace {

using hubscan::DataMatrix;
using hubscan::EstimatorKind;
using hubscan::EstimatorSpec;
using hubscan::IpchdConfig;
using hubscan::KappaMode;
using hubscan::Mask;
using hubscan::RhoMode;
using hubscan::SMode;
using hubscan::SymmetricMatrix;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string iso_timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw hubscan::InvalidArgumentError("read_file",
                                        "cannot open '" + path + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

void write_output(const std::string& target, const std::string& content) {
  if (target.empty() || target == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(target, std::ios::binary);
  if (!out) {
    throw hubscan::InvalidArgumentError("write_output",
                                        "cannot write '" + target + "'");
  }
  out << content;
}

// --- CSV ingestion ---------------------------------------------------------

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& field, std::size_t line_no,
                    std::size_t col_no) {
  const std::string t = trim(field);
  double value = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), value);
  if (res.ec != std::errc{} || res.ptr != t.data() + t.size()) {
    throw hubscan::InvalidArgumentError(
        "csv", "line " + std::to_string(line_no) + ", column " +
                   std::to_string(col_no) + ": '" + t + "' is not a number");
  }
  if (!std::isfinite(value)) {
    throw hubscan::InvalidArgumentError(
        "csv", "line " + std::to_string(line_no) + ", column " +
                   std::to_string(col_no) + ": non-finite value");
  }
  return value;
}

struct CsvTable {
  std::vector<std::string> names;
  Eigen::MatrixXd values;
};

CsvTable read_csv_data(const std::string& path, bool header) {
  std::ifstream in(path);
  if (!in) {
    throw hubscan::InvalidArgumentError("csv", "cannot open '" + path + "'");
  }
  std::string line;
  std::vector<std::vector<double>> rows;
  CsvTable table;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (table.names.empty() && rows.empty()) {
      width = fields.size();
      if (header) {
        for (const auto& f : fields) table.names.push_back(trim(f));
        continue;
      }
    }
    if (fields.size() != width) {
      throw hubscan::InvalidArgumentError(
          "csv", "line " + std::to_string(line_no) + ": expected " +
                     std::to_string(width) + " fields, got " +
                     std::to_string(fields.size()));
    }
    std::vector<double> row(fields.size());
    for (std::size_t j = 0; j < fields.size(); ++j) {
      row[j] = parse_number(fields[j], line_no, j + 1);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw hubscan::InvalidArgumentError("csv",
                                        "'" + path + "' holds no data rows");
  }
  if (table.names.empty()) {
    for (std::size_t j = 0; j < width; ++j) {
      table.names.push_back("V" + std::to_string(j + 1));
    }
  }
  table.values.resize(static_cast<long>(rows.size()),
                      static_cast<long>(width));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      table.values(static_cast<long>(i), static_cast<long>(j)) = rows[i][j];
    }
  }
  return table;
}

Eigen::MatrixXd read_square_csv(const std::string& path) {
  const CsvTable t = read_csv_data(path, false);
  if (t.values.rows() != t.values.cols()) {
    throw hubscan::InvalidArgumentError(
        "csv", "'" + path + "' is not square (" +
                   std::to_string(t.values.rows()) + "x" +
                   std::to_string(t.values.cols()) + ")");
  }
  return t.values;
}

std::string matrix_to_csv(const Eigen::MatrixXd& m) {
  std::string out;
  for (long i = 0; i < m.rows(); ++i) {
    for (long j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

std::string data_to_csv(const DataMatrix& x) {
  std::string out;
  for (int j = 0; j < x.p(); ++j) {
    if (j) out += ',';
    out += x.variable_names().empty() ? "V" + std::to_string(j + 1)
                                      : x.variable_names()[j];
  }
  out += '\n';
  out += matrix_to_csv(x.values());
  return out;
}

// --- ingestion + preprocessing ---------------------------------------------

struct IngestOptions {
  std::string input;
  bool no_header = false;
  bool log_shift = false;
  std::optional<double> log_shift_const;
  std::vector<std::string> covariates;
  std::optional<int> top_variance;
};

struct Ingested {
  DataMatrix data;
  long raw_n = 0;
  int raw_p = 0;
  std::string content_hash;
};

void add_ingest_flags(CLI::App* cmd, IngestOptions& opt) {
  cmd->add_option("--input", opt.input,
                  "Input CSV; rows = observations, columns = variables, "
                  "first row = header")
      ->required();
  cmd->add_flag("--no-header", opt.no_header,
                "Input has no header row; variables are named V1..Vp");
  cmd->add_flag("--log-shift", opt.log_shift,
                "Apply log(x + c) per column with c = max(0, 1 - min)");
  cmd->add_option("--log-shift-const", opt.log_shift_const,
                  "Override the per-column shift constant c");
  cmd->add_option("--covariates", opt.covariates,
                  "Columns to residualize out of every variable and drop "
                  "from the analysis (comma separated names)")
      ->delimiter(',');
  cmd->add_option("--top-variance", opt.top_variance,
                  "Keep only the K columns with the largest variances "
                  "(applied after --log-shift and --covariates)");
}

Ingested load_and_preprocess(const IngestOptions& opt) {
  const std::string bytes = read_file(opt.input);
  CsvTable table = read_csv_data(opt.input, !opt.no_header);

  Ingested out{DataMatrix(table.values, table.names),
               table.values.rows(), static_cast<int>(table.values.cols()),
               fnv1a_hex(bytes)};
  Eigen::MatrixXd values = table.values;
  std::vector<std::string> names = table.names;

  if (opt.log_shift) {
    for (long j = 0; j < values.cols(); ++j) {
      const double min = values.col(j).minCoeff();
      const double c =
          opt.log_shift_const.value_or(std::max(0.0, -min + 1.0));
      if (min + c <= 0.0) {
        throw hubscan::InvalidArgumentError(
            "log-shift", "column '" + names[j] + "': min + c = " +
                             format_double(min + c) + " is not positive");
      }
      values.col(j) = (values.col(j).array() + c).log();
    }
  }

  if (!opt.covariates.empty()) {
    std::vector<int> cov_idx;
    std::vector<bool> is_cov(names.size(), false);
    for (const std::string& name : opt.covariates) {
      const auto it = std::find(names.begin(), names.end(), name);
      if (it == names.end()) {
        throw hubscan::InvalidArgumentError(
            "covariates", "no column named '" + name + "' in the input");
      }
      const int idx = static_cast<int>(it - names.begin());
      if (!is_cov[idx]) {
        is_cov[idx] = true;
        cov_idx.push_back(idx);
      }
    }
    const long n = values.rows();
    Eigen::MatrixXd design(n, cov_idx.size() + 1);
    design.col(0).setOnes();
    for (std::size_t k = 0; k < cov_idx.size(); ++k) {
      design.col(static_cast<long>(k + 1)) = values.col(cov_idx[k]);
    }
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);

    Eigen::MatrixXd kept(n, values.cols() - cov_idx.size());
    std::vector<std::string> kept_names;
    long out_col = 0;
    for (long j = 0; j < values.cols(); ++j) {
      if (is_cov[static_cast<std::size_t>(j)]) continue;
      const Eigen::VectorXd y = values.col(j);
      kept.col(out_col) = y - design * qr.solve(y);
      kept_names.push_back(names[j]);
      ++out_col;
    }
    values = std::move(kept);
    names = std::move(kept_names);
  }

  if (opt.top_variance.has_value()) {
    const int k = *opt.top_variance;
    if (k < 1 || k > values.cols()) {
      throw hubscan::InvalidArgumentError(
          "top-variance",
          "K must be in [1, " + std::to_string(values.cols()) + "]");
    }
    const long n = values.rows();
    if (n < 2) {
      throw hubscan::InvalidArgumentError("top-variance",
                                          "need n >= 2 observations");
    }
    std::vector<double> var(values.cols());
    for (long j = 0; j < values.cols(); ++j) {
      const double mean = values.col(j).mean();
      var[j] = (values.col(j).array() - mean).square().sum() /
               static_cast<double>(n - 1);
    }
    std::vector<int> order(values.cols());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return var[a] > var[b]; });
    std::vector<int> keep(order.begin(), order.begin() + k);
    std::sort(keep.begin(), keep.end());
    Eigen::MatrixXd sub(n, k);
    std::vector<std::string> sub_names;
    for (int j = 0; j < k; ++j) {
      sub.col(j) = values.col(keep[j]);
      sub_names.push_back(names[keep[j]]);
    }
    values = std::move(sub);
    names = std::move(sub_names);
  }

  out.data = DataMatrix(values, names);
  return out;
}

// --- shared estimator / detector flags --------------------------------------

struct EstimatorOptions {
  std::string estimator;  // empty = auto
  std::optional<int> screen_size;
  double xi = 1.0;
  bool signed_threshold = false;
  std::string mask_file;
  bool use_correlation = false;
};

void add_estimator_flags(CLI::App* cmd, EstimatorOptions& opt) {
  cmd->add_option("--estimator", opt.estimator,
                  "sample | screened | thresholded | masked "
                  "(default: sample when n > p, thresholded otherwise)")
      ->check(CLI::IsMember({"sample", "screened", "thresholded", "masked"}));
  cmd->add_option("--screen-size", opt.screen_size,
                  "Screening size T for --estimator screened (requires "
                  "T <= n)");
  cmd->add_option("--xi", opt.xi,
                  "Threshold multiplier; mask keeps |s_ij| >= "
                  "xi*sqrt(log(p)/n)");
  cmd->add_flag("--signed-threshold", opt.signed_threshold,
                "Threshold on s_ij instead of |s_ij| (drops negative "
                "dependencies)");
  cmd->add_option("--mask-file", opt.mask_file,
                  "CSV holding a symmetric 0/1 mask with unit diagonal");
  cmd->add_flag("--use-correlation", opt.use_correlation,
                "Estimate the correlation matrix instead of the covariance");
}

EstimatorSpec resolve_estimator(const EstimatorOptions& opt, long n, int p) {
  EstimatorSpec spec;
  spec.use_correlation = opt.use_correlation;
  std::string kind = opt.estimator;
  if (kind.empty()) {
    kind = n > p ? "sample" : "thresholded";
  }
  if (kind == "sample") {
    spec.kind = EstimatorKind::kSample;
  } else if (kind == "screened") {
    spec.kind = EstimatorKind::kScreened;
    if (!opt.screen_size.has_value()) {
      throw hubscan::InvalidArgumentError(
          "estimator", "--estimator screened requires --screen-size");
    }
    spec.screen_size = *opt.screen_size;
    if (spec.screen_size > n) {
      throw hubscan::InvalidSizeError("estimator",
                                      "screen size must satisfy T <= n");
    }
  } else if (kind == "thresholded") {
    spec.kind = EstimatorKind::kThresholded;
    spec.xi = opt.xi;
    spec.signed_threshold = opt.signed_threshold;
  } else {
    spec.kind = EstimatorKind::kMasked;
    if (opt.mask_file.empty()) {
      throw hubscan::InvalidArgumentError(
          "estimator", "--estimator masked requires --mask-file");
    }
    spec.mask = Mask::from_indicator(read_square_csv(opt.mask_file));
  }
  return spec;
}

struct DetectorOptions {
  std::string s_mode = "data-driven";
  int fixed_s = 1;
  std::string rho = "auto";
  std::string kappa = "auto-2s-over-p";
  double ratio_factor = 1.5;
};

void add_detector_flags(CLI::App* cmd, DetectorOptions& opt,
                        bool with_kappa = true) {
  cmd->add_option("--s-mode", opt.s_mode,
                  "Spike-count rule: data-driven | over | fixed")
      ->check(CLI::IsMember({"data-driven", "over", "fixed"}));
  cmd->add_option("--fixed-s", opt.fixed_s, "Spike count for --s-mode fixed");
  cmd->add_option("--rho", opt.rho,
                  "Eigenvalue-ratio regularizer: 'auto' or a number >= 0");
  if (with_kappa) {
    cmd->add_option("--kappa", opt.kappa,
                    "Hub threshold: auto-2s-over-p | auto-2sd | a number in "
                    "(0,1]");
  }
  cmd->add_option("--ratio-factor", opt.ratio_factor,
                  "Dominance factor of the data-driven spike rule");
}

double parse_flag_number(const std::string& text, const std::string& flag) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw hubscan::InvalidArgumentError(
        "flags", flag + ": '" + text + "' is not a number");
  }
  return v;
}

IpchdConfig resolve_detector(const DetectorOptions& opt) {
  IpchdConfig cfg;
  if (opt.s_mode == "data-driven") {
    cfg.s_mode = SMode::kDataDriven;
  } else if (opt.s_mode == "over") {
    cfg.s_mode = SMode::kOverEstimated;
  } else {
    cfg.s_mode = SMode::kFixed;
    cfg.fixed_s = opt.fixed_s;
  }
  if (opt.rho == "auto") {
    cfg.rho_mode = RhoMode::kAuto;
  } else {
    cfg.rho_mode = RhoMode::kFixed;
    cfg.rho = parse_flag_number(opt.rho, "--rho");
  }
  if (opt.kappa == "auto-2s-over-p") {
    cfg.kappa_mode = KappaMode::kTwoSOverP;
  } else if (opt.kappa == "auto-2sd") {
    cfg.kappa_mode = KappaMode::kTwoSd;
  } else {
    cfg.kappa_mode = KappaMode::kFixed;
    cfg.kappa = parse_flag_number(opt.kappa, "--kappa");
  }
  cfg.ratio_factor = opt.ratio_factor;
  return cfg;
}

nlohmann::ordered_json manifest_json(const std::string& command,
                                     const Ingested& in,
                                     const IngestOptions& ingest,
                                     nlohmann::ordered_json parameters) {
  nlohmann::ordered_json m;
  m["tool"] = "hubscan";
  m["version"] = hubscan::kVersion;
  m["command"] = command;
  parameters["no_header"] = ingest.no_header;
  parameters["log_shift"] = ingest.log_shift;
  if (ingest.log_shift_const.has_value()) {
    parameters["log_shift_const"] = *ingest.log_shift_const;
  } else {
    parameters["log_shift_const"] = nullptr;
  }
  parameters["covariates"] = ingest.covariates;
  if (ingest.top_variance.has_value()) {
    parameters["top_variance"] = *ingest.top_variance;
  } else {
    parameters["top_variance"] = nullptr;
  }
  m["parameters"] = std::move(parameters);
  m["input"] = {{"path", ingest.input},
                {"n", in.raw_n},
                {"p", in.raw_p},
                {"content_hash", in.content_hash}};
  m["timestamp"] = iso_timestamp_utc();
  return m;
}

// --- detect ------------------------------------------------------------------

struct DetectArgs {
  IngestOptions ingest;
  EstimatorOptions estimator;
  DetectorOptions detector;
  std::string output = "-";
};

int run_detect(const DetectArgs& args) {
  const Ingested in = load_and_preprocess(args.ingest);
  const EstimatorSpec est =
      resolve_estimator(args.estimator, in.data.n(), in.data.p());
  const IpchdConfig cfg = resolve_detector(args.detector);
  const hubscan::PipelineResult pipe =
      hubscan::detect_pipeline(in.data, est, cfg);
  const hubscan::HubResult& res = pipe.result;

  nlohmann::ordered_json params;
  params["estimator"] = to_string(est.kind);
  params["use_correlation"] = est.use_correlation;
  if (est.kind == EstimatorKind::kScreened) {
    params["screen_size"] = est.screen_size;
  } else {
    params["screen_size"] = nullptr;
  }
  if (est.kind == EstimatorKind::kThresholded) {
    params["xi"] = est.xi;
    params["signed_threshold"] = est.signed_threshold;
  } else {
    params["xi"] = nullptr;
    params["signed_threshold"] = nullptr;
  }
  params["mask_file"] = args.estimator.mask_file.empty()
                            ? nlohmann::ordered_json(nullptr)
                            : nlohmann::ordered_json(args.estimator.mask_file);
  params["s_mode"] = args.detector.s_mode;
  params["rho"] = args.detector.rho;
  params["kappa"] = args.detector.kappa;
  params["ratio_factor"] = args.detector.ratio_factor;

  nlohmann::ordered_json doc;
  doc["manifest"] = manifest_json("detect", in, args.ingest, std::move(params));
  doc["p"] = res.p;
  doc["n"] = in.data.n();
  doc["estimator"] = to_string(est.kind);
  doc["s_hat"] = res.s_hat;
  doc["s_mode_used"] = res.s_mode_used;
  doc["fallback"] = res.fallback;
  doc["rho_used"] = res.rho_used;
  doc["kappa_used"] = res.kappa_used;
  doc["eigenvalues"] = res.eigenvalues;
  doc["ratios"] = res.ratios;
  doc["influence"] = res.influence;
  doc["hubs"] = res.hubs;
  doc["original_indices"] =
      res.original_indices.has_value()
          ? nlohmann::ordered_json(*res.original_indices)
          : nlohmann::ordered_json(nullptr);
  doc["variable_names"] = in.data.variable_names();

  write_output(args.output, doc.dump(2) + "\n");
  return 0;
}

// --- scree -------------------------------------------------------------------

struct ScreeArgs {
  IngestOptions ingest;
  EstimatorOptions estimator;
  std::string rho = "auto";
  std::string output = "-";
};

int run_scree(const ScreeArgs& args) {
  const Ingested in = load_and_preprocess(args.ingest);
  const EstimatorSpec est =
      resolve_estimator(args.estimator, in.data.n(), in.data.p());
  std::optional<hubscan::ScreenSelection> screen;
  const SymmetricMatrix estimate =
      hubscan::build_estimate(in.data, est, &screen);

  const hubscan::EigenDecomposition eig = symmetric_eigen(estimate);
  const int p = estimate.dim();
  std::vector<double> gammas(eig.eigenvalues.data(),
                             eig.eigenvalues.data() + p);
  double rho = 0.0;
  if (args.rho == "auto") {
    std::vector<double> sorted = gammas;
    std::sort(sorted.begin(), sorted.end());
    const double median =
        p % 2 == 1 ? sorted[p / 2]
                   : 0.5 * (sorted[p / 2 - 1] + sorted[p / 2]);
    rho = std::max(0.0, -sorted.front()) + 0.05 * median;
  } else {
    rho = parse_flag_number(args.rho, "--rho");
  }
  const std::vector<double> ratios =
      p >= 2 ? hubscan::eigenvalue_ratios(gammas, rho) : std::vector<double>{};

  std::string csv = "i,gamma_desc,delta_rho\n";
  for (int i = 1; i <= p; ++i) {
    csv += std::to_string(i) + ',' + format_double(gammas[i - 1]) + ',';
    if (i <= static_cast<int>(ratios.size())) {
      csv += format_double(ratios[i - 1]);
    }
    csv += '\n';
  }
  write_output(args.output, csv);
  return 0;
}

// --- generate ----------------------------------------------------------------

struct GenerateArgs {
  hubscan::SimConfig cfg;
  std::optional<long> n;
  bool use_correlation = false;
  std::uint64_t data_seed = 0;
  bool data_seed_set = false;
  std::string output = "-";
  std::string data_output;
  std::string theta_csv, sigma_csv, corr_csv, inv_corr_csv;
};

int run_generate(const GenerateArgs& args) {
  args.cfg.validate();
  const hubscan::GroundTruthModel model = generate_precision(args.cfg);
  write_output(args.output, model_to_json(model) + "\n");

  if (!args.theta_csv.empty()) {
    write_output(args.theta_csv, matrix_to_csv(model.theta.mat()));
  }
  if (!args.sigma_csv.empty()) {
    write_output(args.sigma_csv, matrix_to_csv(model.sigma.mat()));
  }
  if (!args.corr_csv.empty()) {
    write_output(args.corr_csv, matrix_to_csv(model.corr.mat()));
  }
  if (!args.inv_corr_csv.empty()) {
    write_output(args.inv_corr_csv, matrix_to_csv(model.inv_corr.mat()));
  }

  if (args.n.has_value()) {
    if (args.data_output.empty()) {
      throw hubscan::InvalidArgumentError("generate",
                                          "--n requires --data-output");
    }
    const std::uint64_t seed =
        args.data_seed_set ? args.data_seed : args.cfg.seed;
    const DataMatrix x =
        sample_gaussian(model, *args.n, seed, args.use_correlation);
    write_output(args.data_output, data_to_csv(x));
  } else if (!args.data_output.empty()) {
    throw hubscan::InvalidArgumentError("generate",
                                        "--data-output requires --n");
  }
  return 0;
}

// --- simulate ----------------------------------------------------------------

struct SimulateArgs {
  hubscan::GridSpec spec;
  std::vector<int> t_values, n_values;
  std::vector<double> t_fracs, n_fracs;
  std::vector<std::string> strengths{"strong"};
  std::vector<std::string> methods{"ipchd_thresholded"};
  std::string s_mode = "over";
  std::string records = "-";
  std::string jsonl;
  std::string summary;
  bool timing = false;
  int threads = -1;  // -1: use HUBSCAN_THREADS or auto
};

int run_simulate(SimulateArgs& args) {
  hubscan::GridSpec& spec = args.spec;

  const auto to_fractions = [&](const std::vector<int>& absolute,
                                const std::vector<double>& fracs,
                                const char* what) -> std::vector<double> {
    if (!absolute.empty() && !fracs.empty()) {
      throw hubscan::InvalidArgumentError(
          "simulate", std::string("give either --") + what + " or --" +
                          what + "-frac, not both");
    }
    if (!fracs.empty()) return fracs;
    if (absolute.empty()) return {1.0};
    if (spec.p_values.size() != 1) {
      throw hubscan::InvalidArgumentError(
          "simulate", std::string("absolute --") + what +
                          " needs a single --p; use --" + what + "-frac");
    }
    std::vector<double> out;
    for (int v : absolute) {
      out.push_back(static_cast<double>(v) /
                    static_cast<double>(spec.p_values.front()));
    }
    return out;
  };
  spec.t_fractions = to_fractions(args.t_values, args.t_fracs, "t");
  spec.n_fractions = to_fractions(args.n_values, args.n_fracs, "n");

  spec.hub_strengths.clear();
  for (const auto& s : args.strengths) {
    spec.hub_strengths.push_back(hubscan::strength_from_string(s));
  }
  spec.methods.clear();
  for (const auto& m : args.methods) {
    spec.methods.push_back(hubscan::method_from_string(m));
  }
  spec.s_mode = args.s_mode == "data-driven" ? SMode::kDataDriven
                                             : SMode::kOverEstimated;
  spec.measure_time = args.timing;

  if (args.threads >= 0) {
    spec.threads = args.threads;
  } else if (const char* env = std::getenv("HUBSCAN_THREADS")) {
    spec.threads = static_cast<int>(
        parse_flag_number(env, "HUBSCAN_THREADS"));
  }
  spec.validate();

  const std::size_t cells = spec.p_values.size() * spec.t_fractions.size() *
                            spec.n_fractions.size() *
                            spec.delta_values.size() *
                            spec.hub_strengths.size();
  std::cerr << "hubscan simulate: " << cells << " cell(s) x "
            << spec.methods.size() << " method(s) x " << spec.replicates
            << " replicate(s)\n";

  const auto records = run_grid(spec);
  write_output(args.records, records_to_csv(records));
  if (!args.jsonl.empty()) {
    write_output(args.jsonl, records_to_jsonl(records));
  }
  if (!args.summary.empty()) {
    write_output(args.summary, summary_to_csv(summarize(records)));
  }
  int errors = 0;
  for (const auto& rec : records) {
    if (!rec.error.empty()) ++errors;
  }
  std::cerr << "hubscan simulate: wrote " << records.size() << " records ("
            << errors << " with errors)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hub detection in Gaussian graphical models via inverse "
               "principal components"};
  app.set_version_flag("--version", hubscan::kVersion);
  app.require_subcommand(1);

  DetectArgs detect_args;
  CLI::App* detect = app.add_subcommand(
      "detect",
      "Detect hub variables in a dataset. Preprocessing runs in the fixed "
      "order: --log-shift, then --covariates residualization, then "
      "--top-variance selection.");
  add_ingest_flags(detect, detect_args.ingest);
  add_estimator_flags(detect, detect_args.estimator);
  add_detector_flags(detect, detect_args.detector);
  detect->add_option("--output", detect_args.output,
                     "Result JSON destination ('-' = stdout)");

  ScreeArgs scree_args;
  CLI::App* scree = app.add_subcommand(
      "scree",
      "Emit the descending eigenvalues and regularized eigenvalue ratios of "
      "the configured estimate as CSV (columns i, gamma_desc, delta_rho)");
  add_ingest_flags(scree, scree_args.ingest);
  add_estimator_flags(scree, scree_args.estimator);
  scree->add_option("--rho", scree_args.rho,
                    "Ratio regularizer: 'auto' or a number >= 0");
  scree->add_option("--output", scree_args.output, "CSV destination");

  GenerateArgs gen_args;
  CLI::App* generate = app.add_subcommand(
      "generate", "Generate a planted-hub precision matrix (and optionally "
                  "Gaussian samples from it)");
  generate->add_option("--p", gen_args.cfg.p, "Total dimension")->required();
  generate->add_option("--t", gen_args.cfg.t,
                       "Signal-block size (default: p)");
  generate->add_option("--r", gen_args.cfg.r, "Number of hubs");
  generate->add_option("--p-hub", gen_args.cfg.p_hub,
                       "Hub connection probability");
  generate->add_option("--p-nonhub", gen_args.cfg.p_nonhub,
                       "Non-hub connection probability");
  generate->add_option("--p-nonsignal", gen_args.cfg.p_nonsignal,
                       "Non-signal connection probability");
  generate->add_option("--delta", gen_args.cfg.delta,
                       "Smallest eigenvalue of the generated matrix");
  generate->add_option("--weight-low", gen_args.cfg.weight_low,
                       "Edge weight magnitude lower bound");
  generate->add_option("--weight-high", gen_args.cfg.weight_high,
                       "Edge weight magnitude upper bound");
  generate->add_option("--seed", gen_args.cfg.seed, "Generator seed");
  generate->add_option("--n", gen_args.n, "Also sample n observations");
  generate->add_flag("--use-correlation", gen_args.use_correlation,
                     "Sample on the correlation scale N(0, R)");
  auto* data_seed_opt = generate->add_option(
      "--data-seed", gen_args.data_seed,
      "Sampling seed (default: the generator seed)");
  generate->add_option("--output", gen_args.output,
                       "Model JSON destination ('-' = stdout)");
  generate->add_option("--data-output", gen_args.data_output,
                       "Sampled data CSV destination (requires --n)");
  generate->add_option("--theta-csv", gen_args.theta_csv,
                       "Also export the precision matrix as CSV");
  generate->add_option("--sigma-csv", gen_args.sigma_csv,
                       "Also export the covariance matrix as CSV");
  generate->add_option("--corr-csv", gen_args.corr_csv,
                       "Also export the correlation matrix as CSV");
  generate->add_option("--inv-corr-csv", gen_args.inv_corr_csv,
                       "Also export the inverse correlation matrix as CSV");

  SimulateArgs sim_args;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Run the replicated hub-recovery experiment grid; records "
                  "CSV goes to stdout unless --records is given");
  simulate->add_option("--p", sim_args.spec.p_values, "Dimensions")
      ->delimiter(',');
  simulate->add_option("--t", sim_args.t_values,
                       "Signal-block sizes (absolute; single --p only)")
      ->delimiter(',');
  simulate->add_option("--t-frac", sim_args.t_fracs,
                       "Signal-block sizes as fractions of p")
      ->delimiter(',');
  simulate->add_option("--n", sim_args.n_values,
                       "Sample sizes (absolute; single --p only)")
      ->delimiter(',');
  simulate->add_option("--n-frac", sim_args.n_fracs,
                       "Sample sizes as fractions of p")
      ->delimiter(',');
  simulate->add_option("--delta", sim_args.spec.delta_values,
                       "Spectrum floors")
      ->delimiter(',');
  simulate->add_option("--strength", sim_args.strengths,
                       "Hub strengths: weak (p_hub 0.4) and/or strong (0.8)")
      ->delimiter(',');
  simulate->add_option("--r", sim_args.spec.r, "Number of hubs");
  simulate->add_option("--replicates", sim_args.spec.replicates,
                       "Replicates per cell and method");
  simulate->add_option("--methods", sim_args.methods,
                       "ipchd_sample | ipchd_screened | ipchd_thresholded | "
                       "raw_inverse")
      ->delimiter(',');
  simulate->add_option("--seed", sim_args.spec.base_seed, "Base seed");
  simulate->add_option("--xi", sim_args.spec.xi,
                       "Threshold multiplier for ipchd_thresholded");
  simulate->add_option("--screen-size", sim_args.spec.screen_size,
                       "Screening size for ipchd_screened (default "
                       "min(p/2, n))");
  simulate->add_option("--s-mode", sim_args.s_mode,
                       "Spike-count rule: over | data-driven")
      ->check(CLI::IsMember({"over", "data-driven"}));
  simulate->add_option("--ratio-factor", sim_args.spec.ratio_factor,
                       "Dominance factor of the data-driven rule");
  simulate->add_option("--records", sim_args.records,
                       "Records CSV destination ('-' = stdout)");
  simulate->add_option("--jsonl", sim_args.jsonl,
                       "Also write the records as JSON lines");
  simulate->add_option("--summary", sim_args.summary,
                       "Also write the per-cell summary CSV");
  simulate->add_flag("--timing", sim_args.timing,
                     "Measure wall time (makes record files "
                     "non-reproducible across runs)");
  simulate->add_option("--threads", sim_args.threads,
                       "Replicate-level parallelism (0 = auto; overrides "
                       "HUBSCAN_THREADS)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "hubscan: " << e.what() << "\n";
    return 2;
  }

  gen_args.data_seed_set = data_seed_opt->count() > 0;
  if (generate->parsed() && generate->get_option("--t")->count() == 0) {
    gen_args.cfg.t = gen_args.cfg.p;
  }

  try {
    if (detect->parsed()) return run_detect(detect_args);
    if (scree->parsed()) return run_scree(scree_args);
    if (generate->parsed()) return run_generate(gen_args);
    if (simulate->parsed()) return run_simulate(sim_args);
  } catch (const hubscan::ValidationError& e) {
    std::cerr << "hubscan: " << e.what() << "\n";
    return 2;
  } catch (const hubscan::NumericError& e) {
    std::cerr << "hubscan: numerical failure in " << e.op() << ": "
              << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "hubscan: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
