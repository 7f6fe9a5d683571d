// experiment.hpp
// The sweep harness: plans, seeded replications over parameter grids,
// aggregation, and CSV/JSON persistence.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "penmf/dataset.hpp"
#include "penmf/factorization.hpp"
#include "penmf/recognition.hpp"

namespace penmf {

enum class Algorithm { Nmf, Cnmf, Znmf, Tnmf };

std::string algorithm_name(Algorithm a);
Algorithm parse_algorithm(const std::string& name);
PenaltyFamily algorithm_family(Algorithm a);

struct ExperimentPlan {
  std::string dataset_path;
  std::string dataset_name;
  Algorithm algorithm = Algorithm::Nmf;
  std::vector<int> ranks;
  std::vector<double> alpha_grid{0.0};
  std::vector<double> beta_grid;  // used only when link_alpha_beta is off
  std::vector<double> rho_grid;   // tnmf
  std::vector<double> g_grid;     // znmf
  bool link_alpha_beta = true;    // beta = 1 - alpha
  int replications = 5;
  std::uint64_t base_seed = 0;
  int train_per_subject = 1;
  int target_w = 0;  // 0 = keep native resolution
  int target_h = 0;
  SolverConfig solver;
  Metric metric = Metric::Cosine;
  std::string output_path;
  int jobs = 1;
  ToeplitzKind toeplitz_kind = ToeplitzKind::Geometric;
  double nu = 1.0;

  void validate() const;
};

// One cell of the sweep, before replication.
struct GridSetting {
  int k = 0;
  double alpha = 0.0;
  double beta = 0.0;
  std::optional<double> rho;  // tnmf
  std::optional<double> g;    // znmf
};

struct ResultRecord {
  std::string dataset;
  std::string algorithm;
  int k = 0;
  double alpha = 0.0;
  double beta = 0.0;
  std::optional<double> rho;
  std::optional<double> g;
  int replication = 0;
  std::uint64_t seed = 0;
  double accuracy = 0.0;
  double final_cost = 0.0;
  int iterations = 0;
  std::uint64_t clamp_warnings = 0;
  double wall_time_s = 0.0;
};

// Cartesian product of ranks and the active parameter grids, in sorted
// enumeration order (k, alpha, beta, rho, g).
std::vector<GridSetting> enumerate_settings(const ExperimentPlan& plan);

// hash_mix chain over (base_seed, k, alpha, beta, rho?, g?, rep); absence of
// rho/g is mixed in as a presence tag so grids never alias. Adding grid
// points to a plan never changes the seeds of existing cells.
std::uint64_t replication_seed(std::uint64_t base_seed, const GridSetting& setting, int rep);

// One replication: split, train, project, classify. Deterministic in
// (plan, dataset, setting, rep) up to wall time.
ResultRecord run_replication(const ExperimentPlan& plan, const ImageDataset& dataset,
                             const GridSetting& setting, int rep);

struct GridOutcome {
  std::vector<ResultRecord> records;  // sorted by (k, alpha, beta, rho, g, replication)
  std::vector<std::string> failures;  // one message per failed cell
};

// Every (setting, replication) cell exactly once, distributed over
// plan.jobs workers; failed cells are collected, not fatal. Values are
// independent of the worker count.
GridOutcome run_grid(const ExperimentPlan& plan, const ImageDataset& dataset);
GridOutcome run_grid(const ExperimentPlan& plan);  // loads plan.dataset_path

struct SummaryRow {
  std::string dataset;
  std::string algorithm;
  int k = 0;
  double alpha = 0.0;
  double beta = 0.0;
  std::optional<double> rho;
  std::optional<double> g;
  int replications = 0;
  double mean_accuracy = 0.0;
  std::optional<double> sd_accuracy;  // absent when replications < 2
  double mean_wall_time_s = 0.0;
};

// Per-setting means and sample standard deviations, sorted by
// (dataset, algorithm, k, alpha, beta, rho, g).
std::vector<SummaryRow> aggregate(const std::vector<ResultRecord>& records);

// Best row per (dataset, algorithm, k) by mean accuracy; ties keep the
// first row in summary order.
std::vector<SummaryRow> argmax_rows(const std::vector<SummaryRow>& summaries);

// Records CSV: fixed header, RFC 4180 quoting, LF endings, floats at six
// significant digits, absent rho/g as empty fields.
extern const char* const kResultCsvHeader;
std::string records_to_csv(const std::vector<ResultRecord>& records);
std::string records_to_json(const std::vector<ResultRecord>& records);
std::string summaries_to_csv(const std::vector<SummaryRow>& rows);
std::string summaries_to_json(const std::vector<SummaryRow>& rows);
std::vector<ResultRecord> parse_results_csv(const std::string& text);
std::vector<ResultRecord> parse_results_json(const std::string& text);
std::vector<ResultRecord> load_results(const std::filesystem::path& path);

enum class EmitFormat { Csv, Json };
void emit(const std::vector<ResultRecord>& records, EmitFormat format,
          const std::filesystem::path& path);
void emit(const std::vector<SummaryRow>& rows, EmitFormat format,
          const std::filesystem::path& path);

// Plan files: flat "key = value" lines, '#' comments, lists comma-separated.
// Keys follow the ExperimentPlan field names; see the shipped examples.
ExperimentPlan parse_plan(const std::filesystem::path& path);

// Dataset-free stand-in for the face databases: images are built from
// n_parts disjoint horizontal bands. Each subject owns one signature band at
// full weight and mixes in unowned bands with seeded sparse weights; every
// image is its subject template plus uniform noise on [0, noise], clipped
// to [0, 1]. The resulting matrix factors exactly at rank n_parts when
// noise is zero.
ImageDataset generate_synthetic_parts(int n_parts, int part_size, int subjects,
                                      int images_per_subject, double noise, std::uint64_t seed);

}  // namespace penmf
