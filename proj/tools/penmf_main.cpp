// penmf_main.cpp
// Command line front end: factorize | recognize | grid | synth | inspect.
// Exit codes: 0 success, 1 usage error, 2 input/parse error, 3 numerical
// failure (including failed sweep cells).
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include "penmf/experiment.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace penmf;

namespace {

struct AlgorithmOptions {
  std::string algorithm = "nmf";
  int rank = 0;
  double alpha = 0.0;
  double beta = 0.0;
  double rho = 0.0;
  double nu = 1.0;
  std::string toeplitz_kind = "geometric";
  std::optional<double> g;
  std::string g_preset;  // "max-n-p2"

  void add_to(CLI::App* cmd, bool rank_required) {
    cmd->add_option("--algorithm", algorithm, "Factorization variant")
        ->check(CLI::IsMember({"nmf", "cnmf", "znmf", "tnmf"}));
    auto* rank_opt = cmd->add_option("--rank", rank, "Factorization rank k");
    if (rank_required) rank_opt->required();
    cmd->add_option("--alpha", alpha, "Penalty weight on W, in [0, 1]");
    cmd->add_option("--beta", beta, "Penalty weight on H, in [0, 1]");
    cmd->add_option("--rho", rho, "Toeplitz correlation parameter, in [0, 1]");
    cmd->add_option("--nu", nu, "Damping exponent of the damped-alternating kind");
    cmd->add_option("--toeplitz-kind", toeplitz_kind, "Toeplitz structure kind")
        ->check(CLI::IsMember({"geometric", "damped-alternating"}));
    auto* g_opt = cmd->add_option("--g", g, "Zellner g value (znmf)");
    cmd->add_option("--g-preset", g_preset, "Named g preset")
        ->check(CLI::IsMember({"max-n-p2"}))
        ->excludes(g_opt);
  }

  double resolve_g(Index n, Index p) const {
    if (g_preset == "max-n-p2") return zellner_g_preset(n, p);
    if (g.has_value()) return *g;
    throw ParameterError("znmf requires --g or --g-preset max-n-p2");
  }

  PenaltyConfig make_config(Index n, Index p) const {
    switch (algorithm_family(parse_algorithm(algorithm))) {
      case PenaltyFamily::None:
        return PenaltyConfig::none();
      case PenaltyFamily::Frobenius:
        return PenaltyConfig::frobenius(alpha, beta);
      case PenaltyFamily::Zellner:
        return PenaltyConfig::zellner(alpha, beta, resolve_g(n, p));
      case PenaltyFamily::Toeplitz:
        return PenaltyConfig::toeplitz(alpha, beta, parse_toeplitz_kind(toeplitz_kind), rho, nu,
                                       n, p);
    }
    return PenaltyConfig::none();
  }
};

struct SolverOptions {
  SolverConfig solver;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--max-iters", solver.max_iters, "Maximum update sweeps");
    cmd->add_option("--tol", solver.rel_tol, "Relative cost-change stopping tolerance");
    cmd->add_option("--eps", solver.eps, "Denominator floor");
    cmd->add_option("--check-every", solver.check_every, "Iterations between cost checkpoints");
    cmd->add_option("--seed", solver.seed, "Seed (base seed for recognize)");
  }
};

std::pair<int, int> parse_resolution(const std::string& value) {
  const std::size_t x = value.find('x');
  if (x == std::string::npos) {
    throw ParameterError("--resize expects WxH, got '" + value + "'");
  }
  try {
    const int w = std::stoi(value.substr(0, x));
    const int h = std::stoi(value.substr(x + 1));
    if (w < 1 || h < 1) throw std::invalid_argument("nonpositive");
    return {w, h};
  } catch (const std::exception&) {
    throw ParameterError("--resize expects WxH, got '" + value + "'");
  }
}

DenseMatrix load_matrix_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<double> values;
  Index rows = 0;
  Index cols = -1;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string cell;
    Index row_cols = 0;
    while (std::getline(ss, cell, ',')) {
      try {
        values.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ParseError(path.string() + ":" + std::to_string(lineno) + ": bad number '" + cell +
                         "'");
      }
      ++row_cols;
    }
    if (cols < 0) cols = row_cols;
    if (row_cols != cols) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                       std::to_string(cols) + " columns, got " + std::to_string(row_cols));
    }
    ++rows;
  }
  if (rows == 0) throw ParseError(path.string() + ": empty matrix");
  return DenseMatrix::from_values(rows, cols, std::move(values));
}

// A matrix input is either a CSV of numbers or an image dataset
// (directory layout or manifest file).
DenseMatrix load_input_matrix(const std::string& input, const std::optional<std::pair<int, int>>& resize) {
  const fs::path path(input);
  if (fs::is_regular_file(path) && path.extension() == ".csv") {
    if (resize) throw ParameterError("--resize applies to image datasets, not CSV matrices");
    return load_matrix_csv(path);
  }
  ImageDataset ds = load_dataset(path);
  if (resize) ds = resize_dataset(ds, resize->first, resize->second);
  return build_matrix(ds);
}

json matrix_to_json(const DenseMatrix& m) {
  json o;
  o["rows"] = m.rows();
  o["cols"] = m.cols();
  o["values"] = std::vector<double>(m.values().begin(), m.values().end());
  return o;
}

EmitFormat format_for(const fs::path& path) {
  return path.extension() == ".json" ? EmitFormat::Json : EmitFormat::Csv;
}

int run_factorize(const std::string& input, const std::optional<std::string>& resize,
                  const AlgorithmOptions& alg, const SolverOptions& sol,
                  const std::string& out) {
  std::optional<std::pair<int, int>> target;
  if (resize) target = parse_resolution(*resize);
  const DenseMatrix x = load_input_matrix(input, target);

  const PenaltyConfig config = alg.make_config(x.rows(), x.cols());
  const FactorizationModel model = run(x, alg.rank, config, sol.solver);

  std::printf("%s: %ldx%ld at rank %d: final cost %.6g after %d iterations (%llu clamped)\n",
              alg.algorithm.c_str(), static_cast<long>(x.rows()), static_cast<long>(x.cols()),
              alg.rank, model.cost_history.back(), model.iterations_run,
              static_cast<unsigned long long>(model.clamp_count));

  if (!out.empty()) {
    const fs::path out_path(out);
    if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
    json o;
    o["algorithm"] = alg.algorithm;
    o["rank"] = alg.rank;
    o["alpha"] = alg.alpha;
    o["beta"] = alg.beta;
    o["rho"] = config.family == PenaltyFamily::Toeplitz ? json(alg.rho) : json(nullptr);
    o["g"] = config.family == PenaltyFamily::Zellner ? json(config.g) : json(nullptr);
    o["seed"] = sol.solver.seed;
    o["iterations"] = model.iterations_run;
    o["final_cost"] = model.cost_history.back();
    o["clamp_warnings"] = model.clamp_count;
    o["cost_history"] = model.cost_history;
    o["w"] = matrix_to_json(model.w);
    o["h"] = matrix_to_json(model.h);
    std::ofstream os(out, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot write " + out);
    os << o.dump(2) << "\n";
  }
  return 0;
}

int run_recognize(const std::string& input, const std::optional<std::string>& resize,
                  const AlgorithmOptions& alg, const SolverOptions& sol, int train_per_subject,
                  const std::string& metric, int replication, const std::string& out) {
  ExperimentPlan plan;
  plan.dataset_path = input;
  plan.algorithm = parse_algorithm(alg.algorithm);
  plan.ranks = {alg.rank};
  plan.alpha_grid = {alg.alpha};
  plan.link_alpha_beta = false;
  plan.beta_grid = {alg.beta};
  plan.replications = replication + 1;
  plan.base_seed = sol.solver.seed;
  plan.train_per_subject = train_per_subject;
  plan.metric = parse_metric(metric);
  plan.solver = sol.solver;
  plan.toeplitz_kind = parse_toeplitz_kind(alg.toeplitz_kind);
  plan.nu = alg.nu;

  ImageDataset ds = load_dataset(input);
  if (resize) {
    const auto [w, h] = parse_resolution(*resize);
    ds = resize_dataset(ds, w, h);
  }

  GridSetting setting;
  setting.k = alg.rank;
  setting.alpha = alg.alpha;
  setting.beta = alg.beta;
  const PenaltyFamily family = algorithm_family(plan.algorithm);
  if (family == PenaltyFamily::Toeplitz) {
    setting.rho = alg.rho;
    plan.rho_grid = {alg.rho};
  }
  if (family == PenaltyFamily::Zellner) {
    const Index n = static_cast<Index>(ds.width()) * ds.height();
    std::set<std::string> subjects(ds.labels.begin(), ds.labels.end());
    const Index p = static_cast<Index>(subjects.size()) * train_per_subject;
    setting.g = alg.resolve_g(n, p);
    plan.g_grid = {*setting.g};
  }

  const ResultRecord rec = run_replication(plan, ds, setting, replication);
  std::printf("%s on %s: accuracy %.4f (k=%d, cost %.6g, %d iterations, %.2fs)\n",
              rec.algorithm.c_str(), rec.dataset.c_str(), rec.accuracy, rec.k, rec.final_cost,
              rec.iterations, rec.wall_time_s);
  if (!out.empty()) emit(std::vector<ResultRecord>{rec}, format_for(out), out);
  return 0;
}

int run_grid_cmd(const std::string& plan_path, std::optional<int> replications,
                 std::optional<int> jobs, const std::string& out) {
  ExperimentPlan plan = parse_plan(plan_path);
  if (replications) plan.replications = *replications;
  if (jobs) plan.jobs = *jobs;
  if (!out.empty()) plan.output_path = out;
  if (plan.output_path.empty()) {
    throw ParameterError("grid: no output path (set output_path in the plan or pass --out)");
  }

  const GridOutcome outcome = run_grid(plan);
  emit(outcome.records, format_for(plan.output_path), plan.output_path);

  std::printf("grid: %zu records -> %s\n", outcome.records.size(), plan.output_path.c_str());
  if (!outcome.records.empty()) {
    for (const auto& row : argmax_rows(aggregate(outcome.records))) {
      std::printf("best k=%d: mean accuracy %.4f (alpha=%.4g beta=%.4g", row.k,
                  row.mean_accuracy, row.alpha, row.beta);
      if (row.rho) std::printf(" rho=%.4g", *row.rho);
      if (row.g) std::printf(" g=%.4g", *row.g);
      std::printf(") over %d replications\n", row.replications);
    }
  }
  if (!outcome.failures.empty()) {
    std::fprintf(stderr, "grid: %zu cell(s) failed:\n", outcome.failures.size());
    for (const auto& f : outcome.failures) std::fprintf(stderr, "  %s\n", f.c_str());
    return 3;
  }
  return 0;
}

int run_synth(int parts, int part_size, int subjects, int images_per_subject, double noise,
              std::uint64_t seed, const std::string& out, bool manifest) {
  const ImageDataset ds =
      generate_synthetic_parts(parts, part_size, subjects, images_per_subject, noise, seed);
  const fs::path root(out);
  fs::create_directories(root);
  std::ofstream mf;
  if (manifest) {
    mf.open(root / "manifest.txt", std::ios::binary | std::ios::trunc);
    if (!mf) throw IoError("cannot write " + (root / "manifest.txt").string());
  }
  std::size_t index = 0;
  std::string last_label;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (ds.labels[i] != last_label) {
      last_label = ds.labels[i];
      index = 0;
      fs::create_directories(root / last_label);
    }
    const std::string name = "img" + std::to_string(index++) + ".pgm";
    save_pgm(ds.images[i], root / last_label / name);
    if (manifest) mf << last_label << "/" << name << "," << last_label << "\n";
  }
  std::printf("synth: wrote %zu images (%dx%d, %d subjects) to %s\n", ds.size(), ds.width(),
              ds.height(), subjects, out.c_str());
  return 0;
}

int run_inspect(const std::string& input, bool argmax, const std::string& format,
                const std::string& out) {
  const std::vector<ResultRecord> records = load_results(input);
  if (records.empty()) throw ParseError(input + ": no records to summarize");
  std::vector<SummaryRow> rows = aggregate(records);
  if (argmax) rows = argmax_rows(rows);
  const std::string text = format == "json" ? summaries_to_json(rows) : summaries_to_csv(rows);
  if (out.empty()) {
    std::fputs(text.c_str(), stdout);
  } else {
    const fs::path out_path(out);
    if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
    std::ofstream os(out, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot write " + out);
    os << text;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Penalized nonnegative matrix factorization toolkit"};
  app.require_subcommand(1);

  // factorize
  auto* fact = app.add_subcommand("factorize", "Run one factorization and save the model");
  std::string fact_input, fact_out;
  std::optional<std::string> fact_resize;
  AlgorithmOptions fact_alg;
  SolverOptions fact_sol;
  fact->add_option("--input", fact_input, "CSV matrix, dataset directory or manifest")
      ->required();
  fact->add_option("--resize", fact_resize, "Downsample dataset images to WxH first");
  fact_alg.add_to(fact, true);
  fact_sol.add_to(fact);
  fact->add_option("--out", fact_out, "Write the model as JSON");

  // recognize
  auto* rec = app.add_subcommand("recognize", "Train and evaluate one split replication");
  std::string rec_input, rec_out, rec_metric = "cosine";
  std::optional<std::string> rec_resize;
  int rec_tps = 0;
  int rec_repl = 0;
  AlgorithmOptions rec_alg;
  SolverOptions rec_sol;
  rec->add_option("--input", rec_input, "Dataset directory or manifest")->required();
  rec->add_option("--train-per-subject", rec_tps, "Training images drawn per subject")
      ->required();
  rec->add_option("--resize", rec_resize, "Downsample images to WxH first");
  rec->add_option("--metric", rec_metric, "Nearest-neighbor metric")
      ->check(CLI::IsMember({"cosine", "euclidean"}));
  rec->add_option("--replication", rec_repl, "Replication index (default 0)");
  rec_alg.add_to(rec, true);
  rec_sol.add_to(rec);
  rec->add_option("--out", rec_out, "Append-free result file (.csv or .json)");

  // grid
  auto* grid = app.add_subcommand("grid", "Run a seeded sweep from a plan file");
  std::string grid_plan, grid_out;
  std::optional<int> grid_reps, grid_jobs;
  grid->add_option("--plan", grid_plan, "Plan file (key = value lines)")->required();
  grid->add_option("--replications", grid_reps, "Override plan replications");
  grid->add_option("--jobs", grid_jobs, "Worker threads");
  grid->add_option("--out", grid_out, "Override plan output_path (.csv or .json)");

  // synth
  auto* synth = app.add_subcommand("synth", "Write a synthetic parts dataset");
  int sy_parts = 8, sy_part_size = 12, sy_subjects = 8, sy_ipp = 10;
  double sy_noise = 0.05;
  std::uint64_t sy_seed = 0;
  std::string sy_out;
  bool sy_manifest = false;
  synth->add_option("--parts", sy_parts, "Number of disjoint parts (bands)");
  synth->add_option("--part-size", sy_part_size, "Pixels per band row");
  synth->add_option("--subjects", sy_subjects, "Number of subjects");
  synth->add_option("--images-per-subject", sy_ipp, "Images per subject");
  synth->add_option("--noise", sy_noise, "Uniform noise amplitude");
  synth->add_option("--seed", sy_seed, "Generator seed");
  synth->add_option("--out", sy_out, "Output dataset directory")->required();
  synth->add_flag("--manifest", sy_manifest, "Also write manifest.txt");

  // inspect
  auto* inspect = app.add_subcommand("inspect", "Summarize a results file");
  std::string in_input, in_format = "csv", in_out;
  bool in_argmax = false;
  inspect->add_option("results", in_input, "Results file (.csv or .json)")->required();
  inspect->add_flag("--argmax", in_argmax, "Only the best setting per (dataset, algorithm, k)");
  inspect->add_option("--format", in_format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
  inspect->add_option("--out", in_out, "Write summary here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (fact->parsed()) {
      return run_factorize(fact_input, fact_resize, fact_alg, fact_sol, fact_out);
    }
    if (rec->parsed()) {
      return run_recognize(rec_input, rec_resize, rec_alg, rec_sol, rec_tps, rec_metric,
                           rec_repl, rec_out);
    }
    if (grid->parsed()) return run_grid_cmd(grid_plan, grid_reps, grid_jobs, grid_out);
    if (synth->parsed()) {
      return run_synth(sy_parts, sy_part_size, sy_subjects, sy_ipp, sy_noise, sy_seed, sy_out,
                       sy_manifest);
    }
    if (inspect->parsed()) return run_inspect(in_input, in_argmax, in_format, in_out);
  } catch (const InputDomainError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
