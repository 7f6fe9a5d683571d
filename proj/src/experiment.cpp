// experiment.cpp
#include "penmf/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "penmf/rng.hpp"

namespace penmf {

using nlohmann::json;

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::Nmf: return "nmf";
    case Algorithm::Cnmf: return "cnmf";
    case Algorithm::Znmf: return "znmf";
    case Algorithm::Tnmf: return "tnmf";
  }
  return "unknown";
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "nmf") return Algorithm::Nmf;
  if (name == "cnmf") return Algorithm::Cnmf;
  if (name == "znmf") return Algorithm::Znmf;
  if (name == "tnmf") return Algorithm::Tnmf;
  throw ParameterError("unknown algorithm '" + name + "' (expected nmf, cnmf, znmf or tnmf)");
}

PenaltyFamily algorithm_family(Algorithm a) {
  switch (a) {
    case Algorithm::Nmf: return PenaltyFamily::None;
    case Algorithm::Cnmf: return PenaltyFamily::Frobenius;
    case Algorithm::Znmf: return PenaltyFamily::Zellner;
    case Algorithm::Tnmf: return PenaltyFamily::Toeplitz;
  }
  return PenaltyFamily::None;
}

void ExperimentPlan::validate() const {
  if (ranks.empty()) throw ParameterError("plan: ranks must be nonempty");
  for (int k : ranks) {
    if (k < 1) throw ParameterError("plan: rank " + std::to_string(k) + " must be positive");
  }
  if (replications < 1) throw ParameterError("plan: replications must be at least 1");
  if (train_per_subject < 1) throw ParameterError("plan: train_per_subject must be at least 1");
  if (jobs < 1) throw ParameterError("plan: jobs must be at least 1");
  if (!(nu > 0.0)) throw ParameterError("plan: nu must be positive");
  if ((target_w == 0) != (target_h == 0)) {
    throw ParameterError("plan: target resolution must set both dimensions or neither");
  }
  solver.validate();

  const PenaltyFamily family = algorithm_family(algorithm);
  if (family != PenaltyFamily::None) {
    if (alpha_grid.empty()) throw ParameterError("plan: alpha_grid must be nonempty");
    if (!link_alpha_beta && beta_grid.empty()) {
      throw ParameterError("plan: beta_grid required when link_alpha_beta is off");
    }
    for (double a : alpha_grid) {
      if (!(a >= 0.0 && a <= 1.0)) throw ParameterError("plan: alpha values must lie in [0, 1]");
    }
    for (double b : beta_grid) {
      if (!(b >= 0.0 && b <= 1.0)) throw ParameterError("plan: beta values must lie in [0, 1]");
    }
  }
  if (family == PenaltyFamily::Zellner) {
    if (g_grid.empty()) throw ParameterError("plan: g_grid must be nonempty for znmf");
    for (double g : g_grid) {
      if (!(g > 0.0)) throw ParameterError("plan: g values must be positive");
    }
  }
  if (family == PenaltyFamily::Toeplitz) {
    if (rho_grid.empty()) throw ParameterError("plan: rho_grid must be nonempty for tnmf");
    for (double r : rho_grid) {
      if (!(r >= 0.0 && r <= 1.0)) throw ParameterError("plan: rho values must lie in [0, 1]");
    }
  }
}

std::vector<GridSetting> enumerate_settings(const ExperimentPlan& plan) {
  const PenaltyFamily family = algorithm_family(plan.algorithm);

  std::vector<std::pair<double, double>> weight_pairs;
  if (family == PenaltyFamily::None) {
    weight_pairs.emplace_back(0.0, 0.0);
  } else if (plan.link_alpha_beta) {
    for (double a : plan.alpha_grid) weight_pairs.emplace_back(a, 1.0 - a);
  } else {
    for (double a : plan.alpha_grid) {
      for (double b : plan.beta_grid) weight_pairs.emplace_back(a, b);
    }
  }

  std::vector<GridSetting> out;
  for (int k : plan.ranks) {
    for (const auto& [alpha, beta] : weight_pairs) {
      switch (family) {
        case PenaltyFamily::None:
        case PenaltyFamily::Frobenius:
          out.push_back({k, alpha, beta, std::nullopt, std::nullopt});
          break;
        case PenaltyFamily::Zellner:
          for (double g : plan.g_grid) out.push_back({k, alpha, beta, std::nullopt, g});
          break;
        case PenaltyFamily::Toeplitz:
          for (double rho : plan.rho_grid) out.push_back({k, alpha, beta, rho, std::nullopt});
          break;
      }
    }
  }
  return out;
}

std::uint64_t replication_seed(std::uint64_t base_seed, const GridSetting& setting, int rep) {
  std::uint64_t h = base_seed;
  h = hash_mix(h, static_cast<std::uint64_t>(setting.k));
  h = hash_mix(h, std::bit_cast<std::uint64_t>(setting.alpha));
  h = hash_mix(h, std::bit_cast<std::uint64_t>(setting.beta));
  h = hash_mix(h, setting.rho.has_value() ? 1u : 0u);
  h = hash_mix(h, setting.rho ? std::bit_cast<std::uint64_t>(*setting.rho) : 0u);
  h = hash_mix(h, setting.g.has_value() ? 1u : 0u);
  h = hash_mix(h, setting.g ? std::bit_cast<std::uint64_t>(*setting.g) : 0u);
  h = hash_mix(h, static_cast<std::uint64_t>(rep));
  return h;
}

namespace {

PenaltyConfig make_penalty_config(const ExperimentPlan& plan, const GridSetting& setting,
                                  Index n, Index p) {
  switch (algorithm_family(plan.algorithm)) {
    case PenaltyFamily::None:
      return PenaltyConfig::none();
    case PenaltyFamily::Frobenius:
      return PenaltyConfig::frobenius(setting.alpha, setting.beta);
    case PenaltyFamily::Zellner:
      return PenaltyConfig::zellner(setting.alpha, setting.beta, setting.g.value());
    case PenaltyFamily::Toeplitz:
      return PenaltyConfig::toeplitz(setting.alpha, setting.beta, plan.toeplitz_kind,
                                     setting.rho.value(), plan.nu, n, p);
  }
  return PenaltyConfig::none();
}

}  // namespace

ResultRecord run_replication(const ExperimentPlan& plan, const ImageDataset& dataset,
                             const GridSetting& setting, int rep) {
  const auto t0 = std::chrono::steady_clock::now();

  const std::uint64_t rep_seed = replication_seed(plan.base_seed, setting, rep);
  const std::uint64_t split_seed = hash_mix(rep_seed, 1);
  const std::uint64_t train_seed = hash_mix(rep_seed, 2);
  const std::uint64_t project_seed = hash_mix(rep_seed, 3);

  auto [train, test] = split(dataset, SplitSpec{plan.train_per_subject, split_seed});
  const DenseMatrix x_train = build_matrix(train);
  const DenseMatrix x_test = build_matrix(test);

  const PenaltyConfig config = make_penalty_config(plan, setting, x_train.rows(), x_train.cols());
  SolverConfig train_solver = plan.solver;
  train_solver.seed = train_seed;
  const FactorizationModel model = run(x_train, setting.k, config, train_solver);

  SolverConfig project_solver = plan.solver;
  project_solver.seed = project_seed;
  std::uint64_t clamps = model.clamp_count;
  const DenseMatrix h_test = project(model.w, x_test, project_solver, &clamps);
  const std::vector<std::string> predicted =
      classify(h_test, model.h, train.labels, plan.metric);

  ResultRecord rec;
  rec.dataset = plan.dataset_name.empty() ? dataset.name : plan.dataset_name;
  rec.algorithm = algorithm_name(plan.algorithm);
  rec.k = setting.k;
  rec.alpha = setting.alpha;
  rec.beta = setting.beta;
  rec.rho = setting.rho;
  rec.g = setting.g;
  rec.replication = rep;
  rec.seed = rep_seed;
  rec.accuracy = accuracy(predicted, test.labels);
  rec.final_cost = model.cost_history.back();
  rec.iterations = model.iterations_run;
  rec.clamp_warnings = clamps;
  rec.wall_time_s =
      std::chrono::duration_cast<std::chrono::duration<double>>(std::chrono::steady_clock::now() -
                                                                t0)
          .count();
  return rec;
}

namespace {

bool record_order(const ResultRecord& a, const ResultRecord& b) {
  return std::tie(a.k, a.alpha, a.beta, a.rho, a.g, a.replication) <
         std::tie(b.k, b.alpha, b.beta, b.rho, b.g, b.replication);
}

}  // namespace

GridOutcome run_grid(const ExperimentPlan& plan, const ImageDataset& dataset) {
  plan.validate();
  const std::vector<GridSetting> settings = enumerate_settings(plan);
  const std::size_t reps = static_cast<std::size_t>(plan.replications);
  const std::size_t total = settings.size() * reps;

  std::vector<std::optional<ResultRecord>> slots(total);
  std::vector<std::string> errors(total);
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    for (;;) {
      const std::size_t cell = next.fetch_add(1);
      if (cell >= total) break;
      const GridSetting& setting = settings[cell / reps];
      const int rep = static_cast<int>(cell % reps);
      try {
        slots[cell] = run_replication(plan, dataset, setting, rep);
      } catch (const std::exception& e) {
        errors[cell] = "cell k=" + std::to_string(setting.k) +
                       " alpha=" + std::to_string(setting.alpha) + " rep=" + std::to_string(rep) +
                       ": " + e.what();
      }
    }
  };

  const std::size_t jobs = std::min<std::size_t>(std::max(plan.jobs, 1), std::max<std::size_t>(total, 1));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (std::size_t i = 0; i < jobs; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  GridOutcome outcome;
  outcome.records.reserve(total);
  for (std::size_t i = 0; i < total; ++i) {
    if (slots[i].has_value()) {
      outcome.records.push_back(std::move(*slots[i]));
    } else {
      outcome.failures.push_back(errors[i]);
    }
  }
  std::sort(outcome.records.begin(), outcome.records.end(), record_order);
  return outcome;
}

GridOutcome run_grid(const ExperimentPlan& plan) {
  plan.validate();
  ImageDataset dataset = load_dataset(plan.dataset_path, plan.dataset_name);
  if (plan.target_w > 0 && plan.target_h > 0) {
    dataset = resize_dataset(dataset, plan.target_w, plan.target_h);
  }
  return run_grid(plan, dataset);
}

std::vector<SummaryRow> aggregate(const std::vector<ResultRecord>& records) {
  if (records.empty()) throw ParameterError("aggregate: no records");

  using Key = std::tuple<std::string, std::string, int, double, double, std::optional<double>,
                         std::optional<double>>;
  struct Acc {
    int n = 0;
    double mean = 0.0;
    double m2 = 0.0;  // Welford
    double wall_sum = 0.0;
  };
  std::map<Key, Acc> groups;
  for (const auto& r : records) {
    Acc& acc = groups[Key{r.dataset, r.algorithm, r.k, r.alpha, r.beta, r.rho, r.g}];
    ++acc.n;
    const double delta = r.accuracy - acc.mean;
    acc.mean += delta / acc.n;
    acc.m2 += delta * (r.accuracy - acc.mean);
    acc.wall_sum += r.wall_time_s;
  }

  std::vector<SummaryRow> rows;
  rows.reserve(groups.size());
  for (const auto& [key, acc] : groups) {
    SummaryRow row;
    row.dataset = std::get<0>(key);
    row.algorithm = std::get<1>(key);
    row.k = std::get<2>(key);
    row.alpha = std::get<3>(key);
    row.beta = std::get<4>(key);
    row.rho = std::get<5>(key);
    row.g = std::get<6>(key);
    row.replications = acc.n;
    row.mean_accuracy = acc.mean;
    if (acc.n >= 2) row.sd_accuracy = std::sqrt(acc.m2 / (acc.n - 1));
    row.mean_wall_time_s = acc.wall_sum / acc.n;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<SummaryRow> argmax_rows(const std::vector<SummaryRow>& summaries) {
  std::vector<SummaryRow> out;
  std::size_t i = 0;
  while (i < summaries.size()) {
    std::size_t best = i;
    std::size_t j = i;
    while (j < summaries.size() && summaries[j].dataset == summaries[i].dataset &&
           summaries[j].algorithm == summaries[i].algorithm && summaries[j].k == summaries[i].k) {
      if (summaries[j].mean_accuracy > summaries[best].mean_accuracy) best = j;
      ++j;
    }
    out.push_back(summaries[best]);
    i = j;
  }
  return out;
}

namespace {

std::string fmt_g6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

std::string opt_field(const std::optional<double>& v) { return v ? fmt_g6(*v) : ""; }

// Minimal RFC 4180 reader: quoted fields, doubled quotes, LF or CRLF rows.
std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        break;
      case '\n':
        if (!field.empty() || field_started || !row.empty()) {
          row.push_back(std::move(field));
          field.clear();
          rows.push_back(std::move(row));
          row.clear();
        }
        field_started = false;
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  if (in_quotes) throw ParseError("csv: unterminated quoted field", text.size());
  if (!field.empty() || field_started || !row.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

double parse_double_field(const std::string& s, std::size_t row) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ParseError("csv row " + std::to_string(row) + ": bad number '" + s + "'");
  }
}

long long parse_int_field(const std::string& s, std::size_t row) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ParseError("csv row " + std::to_string(row) + ": bad integer '" + s + "'");
  }
}

std::uint64_t parse_u64_field(const std::string& s, std::size_t row) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ParseError("csv row " + std::to_string(row) + ": bad integer '" + s + "'");
  }
}

}  // namespace

const char* const kResultCsvHeader =
    "dataset,algorithm,k,alpha,beta,rho,g,replication,seed,accuracy,final_cost,iterations,"
    "clamp_warnings,wall_time_s";

std::string records_to_csv(const std::vector<ResultRecord>& records) {
  std::string out = kResultCsvHeader;
  out += '\n';
  for (const auto& r : records) {
    out += csv_escape(r.dataset);
    out += ',';
    out += csv_escape(r.algorithm);
    out += ',';
    out += std::to_string(r.k);
    out += ',';
    out += fmt_g6(r.alpha);
    out += ',';
    out += fmt_g6(r.beta);
    out += ',';
    out += opt_field(r.rho);
    out += ',';
    out += opt_field(r.g);
    out += ',';
    out += std::to_string(r.replication);
    out += ',';
    out += std::to_string(r.seed);
    out += ',';
    out += fmt_g6(r.accuracy);
    out += ',';
    out += fmt_g6(r.final_cost);
    out += ',';
    out += std::to_string(r.iterations);
    out += ',';
    out += std::to_string(r.clamp_warnings);
    out += ',';
    out += fmt_g6(r.wall_time_s);
    out += '\n';
  }
  return out;
}

std::string records_to_json(const std::vector<ResultRecord>& records) {
  json arr = json::array();
  for (const auto& r : records) {
    json o;
    o["dataset"] = r.dataset;
    o["algorithm"] = r.algorithm;
    o["k"] = r.k;
    o["alpha"] = r.alpha;
    o["beta"] = r.beta;
    o["rho"] = r.rho ? json(*r.rho) : json(nullptr);
    o["g"] = r.g ? json(*r.g) : json(nullptr);
    o["replication"] = r.replication;
    o["seed"] = r.seed;
    o["accuracy"] = r.accuracy;
    o["final_cost"] = r.final_cost;
    o["iterations"] = r.iterations;
    o["clamp_warnings"] = r.clamp_warnings;
    o["wall_time_s"] = r.wall_time_s;
    arr.push_back(std::move(o));
  }
  return arr.dump(2) + "\n";
}

std::string summaries_to_csv(const std::vector<SummaryRow>& rows) {
  std::string out =
      "dataset,algorithm,k,alpha,beta,rho,g,replications,mean_accuracy,sd_accuracy,"
      "mean_wall_time_s\n";
  for (const auto& r : rows) {
    out += csv_escape(r.dataset);
    out += ',';
    out += csv_escape(r.algorithm);
    out += ',';
    out += std::to_string(r.k);
    out += ',';
    out += fmt_g6(r.alpha);
    out += ',';
    out += fmt_g6(r.beta);
    out += ',';
    out += opt_field(r.rho);
    out += ',';
    out += opt_field(r.g);
    out += ',';
    out += std::to_string(r.replications);
    out += ',';
    out += fmt_g6(r.mean_accuracy);
    out += ',';
    out += opt_field(r.sd_accuracy);
    out += ',';
    out += fmt_g6(r.mean_wall_time_s);
    out += '\n';
  }
  return out;
}

std::string summaries_to_json(const std::vector<SummaryRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    json o;
    o["dataset"] = r.dataset;
    o["algorithm"] = r.algorithm;
    o["k"] = r.k;
    o["alpha"] = r.alpha;
    o["beta"] = r.beta;
    o["rho"] = r.rho ? json(*r.rho) : json(nullptr);
    o["g"] = r.g ? json(*r.g) : json(nullptr);
    o["replications"] = r.replications;
    o["mean_accuracy"] = r.mean_accuracy;
    o["sd_accuracy"] = r.sd_accuracy ? json(*r.sd_accuracy) : json(nullptr);
    o["mean_wall_time_s"] = r.mean_wall_time_s;
    arr.push_back(std::move(o));
  }
  return arr.dump(2) + "\n";
}

std::vector<ResultRecord> parse_results_csv(const std::string& text) {
  const auto rows = parse_csv(text);
  if (rows.empty()) throw ParseError("results csv: missing header");
  std::string header;
  for (std::size_t i = 0; i < rows[0].size(); ++i) {
    if (i) header += ',';
    header += rows[0][i];
  }
  if (header != kResultCsvHeader) {
    throw ParseError("results csv: unexpected header '" + header + "'");
  }

  std::vector<ResultRecord> records;
  records.reserve(rows.size() - 1);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& f = rows[i];
    if (f.size() != 14) {
      throw ParseError("results csv row " + std::to_string(i) + ": expected 14 fields, got " +
                       std::to_string(f.size()));
    }
    ResultRecord r;
    r.dataset = f[0];
    r.algorithm = f[1];
    r.k = static_cast<int>(parse_int_field(f[2], i));
    r.alpha = parse_double_field(f[3], i);
    r.beta = parse_double_field(f[4], i);
    if (!f[5].empty()) r.rho = parse_double_field(f[5], i);
    if (!f[6].empty()) r.g = parse_double_field(f[6], i);
    r.replication = static_cast<int>(parse_int_field(f[7], i));
    r.seed = parse_u64_field(f[8], i);
    r.accuracy = parse_double_field(f[9], i);
    r.final_cost = parse_double_field(f[10], i);
    r.iterations = static_cast<int>(parse_int_field(f[11], i));
    r.clamp_warnings = parse_u64_field(f[12], i);
    r.wall_time_s = parse_double_field(f[13], i);
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<ResultRecord> parse_results_json(const std::string& text) {
  json arr;
  try {
    arr = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("results json: ") + e.what());
  }
  if (!arr.is_array()) throw ParseError("results json: expected an array of records");
  std::vector<ResultRecord> records;
  records.reserve(arr.size());
  for (const auto& o : arr) {
    ResultRecord r;
    r.dataset = o.at("dataset").get<std::string>();
    r.algorithm = o.at("algorithm").get<std::string>();
    r.k = o.at("k").get<int>();
    r.alpha = o.at("alpha").get<double>();
    r.beta = o.at("beta").get<double>();
    if (!o.at("rho").is_null()) r.rho = o.at("rho").get<double>();
    if (!o.at("g").is_null()) r.g = o.at("g").get<double>();
    r.replication = o.at("replication").get<int>();
    r.seed = o.at("seed").get<std::uint64_t>();
    r.accuracy = o.at("accuracy").get<double>();
    r.final_cost = o.at("final_cost").get<double>();
    r.iterations = o.at("iterations").get<int>();
    r.clamp_warnings = o.at("clamp_warnings").get<std::uint64_t>();
    r.wall_time_s = o.at("wall_time_s").get<double>();
    records.push_back(std::move(r));
  }
  return records;
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

std::vector<ResultRecord> load_results(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  const std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '[') return parse_results_json(text);
  return parse_results_csv(text);
}

void emit(const std::vector<ResultRecord>& records, EmitFormat format,
          const std::filesystem::path& path) {
  write_file(path, format == EmitFormat::Csv ? records_to_csv(records)
                                             : records_to_json(records));
}

void emit(const std::vector<SummaryRow>& rows, EmitFormat format,
          const std::filesystem::path& path) {
  write_file(path, format == EmitFormat::Csv ? summaries_to_csv(rows)
                                             : summaries_to_json(rows));
}

namespace {

std::string trim(const std::string& s) {
  const std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(s);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ParseError(where + ": bad number '" + s + "'");
  }
}

long long to_int(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ParseError(where + ": bad integer '" + s + "'");
  }
}

bool to_bool(const std::string& s, const std::string& where) {
  if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
  if (s == "false" || s == "no" || s == "off" || s == "0") return false;
  throw ParseError(where + ": bad boolean '" + s + "'");
}

std::pair<int, int> to_resolution(const std::string& s, const std::string& where) {
  if (s == "native") return {0, 0};
  const std::size_t x = s.find('x');
  if (x == std::string::npos) throw ParseError(where + ": expected WxH or 'native', got '" + s + "'");
  const int w = static_cast<int>(to_int(s.substr(0, x), where));
  const int h = static_cast<int>(to_int(s.substr(x + 1), where));
  if (w < 1 || h < 1) throw ParseError(where + ": resolution must be positive");
  return {w, h};
}

}  // namespace

ExperimentPlan parse_plan(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open plan " + path.string());

  ExperimentPlan plan;
  plan.dataset_name.clear();
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(lineno);

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) throw ParseError(where + ": expected 'key = value'");

    if (key == "dataset_path") {
      plan.dataset_path = value;
    } else if (key == "dataset_name") {
      plan.dataset_name = value;
    } else if (key == "algorithm") {
      plan.algorithm = parse_algorithm(value);
    } else if (key == "ranks") {
      plan.ranks.clear();
      for (const auto& item : split_list(value)) {
        plan.ranks.push_back(static_cast<int>(to_int(item, where)));
      }
    } else if (key == "alpha_grid") {
      plan.alpha_grid.clear();
      for (const auto& item : split_list(value)) plan.alpha_grid.push_back(to_double(item, where));
    } else if (key == "beta_grid") {
      plan.beta_grid.clear();
      for (const auto& item : split_list(value)) plan.beta_grid.push_back(to_double(item, where));
    } else if (key == "rho_grid") {
      plan.rho_grid.clear();
      for (const auto& item : split_list(value)) plan.rho_grid.push_back(to_double(item, where));
    } else if (key == "g_grid") {
      plan.g_grid.clear();
      for (const auto& item : split_list(value)) plan.g_grid.push_back(to_double(item, where));
    } else if (key == "link_alpha_beta") {
      plan.link_alpha_beta = to_bool(value, where);
    } else if (key == "replications") {
      plan.replications = static_cast<int>(to_int(value, where));
    } else if (key == "base_seed") {
      plan.base_seed = static_cast<std::uint64_t>(to_int(value, where));
    } else if (key == "train_per_subject") {
      plan.train_per_subject = static_cast<int>(to_int(value, where));
    } else if (key == "target_resolution") {
      std::tie(plan.target_w, plan.target_h) = to_resolution(value, where);
    } else if (key == "metric") {
      plan.metric = parse_metric(value);
    } else if (key == "output_path") {
      plan.output_path = value;
    } else if (key == "jobs") {
      plan.jobs = static_cast<int>(to_int(value, where));
    } else if (key == "toeplitz_kind") {
      plan.toeplitz_kind = parse_toeplitz_kind(value);
    } else if (key == "nu") {
      plan.nu = to_double(value, where);
    } else if (key == "max_iters") {
      plan.solver.max_iters = static_cast<int>(to_int(value, where));
    } else if (key == "rel_tol") {
      plan.solver.rel_tol = to_double(value, where);
    } else if (key == "eps") {
      plan.solver.eps = to_double(value, where);
    } else if (key == "check_every") {
      plan.solver.check_every = static_cast<int>(to_int(value, where));
    } else {
      throw ParseError(where + ": unknown key '" + key + "'");
    }
  }
  return plan;
}

ImageDataset generate_synthetic_parts(int n_parts, int part_size, int subjects,
                                      int images_per_subject, double noise, std::uint64_t seed) {
  if (subjects < 2) throw ParameterError("synthetic: need at least 2 subjects");
  if (n_parts < subjects) {
    throw ParameterError("synthetic: n_parts (" + std::to_string(n_parts) +
                         ") must be at least the subject count (" + std::to_string(subjects) +
                         ")");
  }
  if (part_size < 1) throw ParameterError("synthetic: part_size must be positive");
  if (images_per_subject < 1) throw ParameterError("synthetic: images_per_subject must be positive");
  if (!(noise >= 0.0)) throw ParameterError("synthetic: noise must be nonnegative");

  Rng rng(seed);
  const int width = part_size;
  const int height = n_parts;  // one horizontal band per part

  // Fixed per-band texture in [0.5, 1] so bands are distinguishable but
  // uniformly bounded away from zero.
  std::vector<std::vector<double>> pattern(static_cast<std::size_t>(n_parts));
  for (auto& band : pattern) {
    band.resize(static_cast<std::size_t>(part_size));
    for (double& v : band) v = 0.5 + 0.5 * rng.uniform01();
  }

  // Subject s owns band s outright; bands beyond the subject range are mixed
  // in sparsely. Bands owned by other subjects stay at zero, so templates of
  // different subjects never share an owned band.
  std::vector<std::vector<double>> weights(static_cast<std::size_t>(subjects));
  for (int s = 0; s < subjects; ++s) {
    auto& w = weights[static_cast<std::size_t>(s)];
    w.assign(static_cast<std::size_t>(n_parts), 0.0);
    w[static_cast<std::size_t>(s)] = 1.0;
    for (int part = subjects; part < n_parts; ++part) {
      const bool used = rng.uniform01() < 0.5;
      const double weight = 0.2 + 0.8 * rng.uniform01();
      if (used) w[static_cast<std::size_t>(part)] = weight;
    }
  }

  ImageDataset ds;
  ds.name = "synthetic";
  std::string label_fmt = subjects > 100 ? "s%03d" : "s%02d";
  for (int s = 0; s < subjects; ++s) {
    char label[16];
    std::snprintf(label, sizeof label, label_fmt.c_str(), s);
    for (int rep = 0; rep < images_per_subject; ++rep) {
      GrayImage img;
      img.width = width;
      img.height = height;
      img.intensities.resize(static_cast<std::size_t>(width) * height);
      for (int band = 0; band < n_parts; ++band) {
        const double w = weights[static_cast<std::size_t>(s)][static_cast<std::size_t>(band)];
        for (int xcol = 0; xcol < width; ++xcol) {
          const double base = w * pattern[static_cast<std::size_t>(band)][static_cast<std::size_t>(xcol)];
          const double v = base + noise * rng.uniform01();
          img.intensities[static_cast<std::size_t>(band) * width + xcol] =
              std::clamp(v, 0.0, 1.0);
        }
      }
      ds.images.push_back(std::move(img));
      ds.labels.emplace_back(label);
    }
  }
  return ds;
}

}  // namespace penmf
