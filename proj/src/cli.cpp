#include "specrank/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "specrank/errors.hpp"
#include "specrank/sim_bench.hpp"

namespace specrank::cli {

namespace {

using nlohmann::json;

Eigen::VectorXd padded(const Eigen::VectorXd& v, Eigen::Index n) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  const Eigen::Index m = std::min(n, v.size());
  out.head(m) = v.head(m);
  return out;
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

struct InputFlags {
  std::string input;
  std::string format;
  std::string orientation = "rows";
  bool standardize = false;
};

void add_input_flags(CLI::App* cmd, InputFlags& f) {
  cmd->add_option("--input", f.input, "matrix file")->required();
  cmd->add_option("--format", f.format, "csv, tsv or mm (default: from extension)")
      ->check(CLI::IsMember({"csv", "tsv", "mm"}));
  cmd->add_option("--orientation", f.orientation, "rows: samples are rows")
      ->check(CLI::IsMember({"rows", "cols"}));
  cmd->add_flag("--standardize", f.standardize, "scale columns to unit variance");
}

DataMatrix load_input(const InputFlags& f, std::ostream& err) {
  const std::filesystem::path path(f.input);
  Format format = format_from_extension(path);
  if (f.format == "csv") format = Format::csv;
  if (f.format == "tsv") format = Format::tsv;
  if (f.format == "mm") format = Format::matrix_market;
  const Orientation orient = f.orientation == "cols" ? Orientation::samples_as_columns
                                                     : Orientation::samples_as_rows;
  DataMatrix m = load_matrix(path, format, orient);
  if (!f.standardize) return m;
  StandardizeResult s = standardize_columns(m);
  for (const auto& w : s.warnings) err << "warning: " << w << '\n';
  return std::move(s.matrix);
}

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("SPECRANK_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(raw, &used);
    if (raw[used] != '\0') throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw DomainError(std::string("SPECRANK_SEED is not an unsigned integer: ") + raw);
  }
}

// Writes to --out when given, else to the stream.
void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw InputError("cannot open '" + out_path + "' for writing");
  f << text;
}

struct EstimateFlags {
  InputFlags in;
  std::optional<Eigen::Index> n_prime;
  double delta = 0.9;
  double gamma4 = 3.0;
  std::optional<std::uint64_t> seed;
  int sweeps = 500;
  int burnin = 50;
  bool as_json = false;
  bool as_csv = false;
  std::string out;
};

int cmd_estimate(const EstimateFlags& f, std::ostream& out, std::ostream& err) {
  const DataMatrix m = load_input(f.in, err);
  RankConfig cfg;
  cfg.n_prime = f.n_prime;
  cfg.delta = f.delta;
  cfg.gamma4 = f.gamma4;
  cfg.sweeps = f.sweeps;
  cfg.burnin = f.burnin;
  cfg.seed = f.seed ? *f.seed : env_seed().value_or(0);
  const auto start = std::chrono::steady_clock::now();
  const RankDecision d = estimate_rank(m, cfg);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const CliResult r = to_result(d, elapsed);
  for (const auto& w : r.warnings) err << "warning: " << w << '\n';
  emit(f.as_csv ? to_csv(r) : to_json(r) + "\n", f.out, out);
  return kOk;
}

struct SimulateFlags {
  std::string preset;
  std::string kind;
  Eigen::Index n = 0, p = 0, k = 0;
  std::vector<double> sigmas;
  int replicates = 100;
  std::optional<std::uint64_t> seed;
  int workers = 1;
  std::string out_dir = ".";
  std::optional<Eigen::Index> n_prime;
  double delta = 0.9;
};

int cmd_simulate(const SimulateFlags& f, std::ostream& out, std::ostream&) {
  const std::uint64_t seed = f.seed ? *f.seed : env_seed().value_or(0);
  if (f.replicates < 1) throw DomainError("--replicates must be positive");
  SimSetting s;
  if (!f.preset.empty()) {
    const auto preset = table1_preset(f.preset, f.replicates, seed);
    if (!preset) throw DomainError("unknown preset '" + f.preset + "'");
    s = *preset;
  } else {
    if (f.kind.empty()) throw DomainError("either --preset or --kind is required");
    s.kind = f.kind == "x1" ? MatrixKind::x1 : MatrixKind::x2;
    s.n = f.n;
    s.p = f.p;
    s.k_true = f.k;
    s.sigmas = f.sigmas;
    s.replicates = f.replicates;
    s.seed = seed;
  }
  s.validate();
  RankConfig cfg;
  cfg.n_prime = f.n_prime;
  cfg.delta = f.delta;
  BenchOptions bo;
  bo.workers = f.workers;
  const std::vector<BenchRow> rows = run_benchmark({s}, cfg, bo);

  std::ostringstream csv;
  write_bench_csv(rows, csv);
  const std::filesystem::path dir(f.out_dir);
  std::filesystem::create_directories(dir);
  emit(csv.str(), (dir / "bench.csv").string(), out);
  emit(bench_json(rows) + "\n", (dir / "bench.json").string(), out);
  out << csv.str();
  return kOk;
}

struct SpectrumFlags {
  InputFlags in;
  std::optional<Eigen::Index> n_prime;
  std::optional<std::uint64_t> seed;
  std::string out;
};

int cmd_spectrum(const SpectrumFlags& f, std::ostream& out, std::ostream& err) {
  const DataMatrix m = load_input(f.in, err);
  RankConfig cfg;
  cfg.n_prime = f.n_prime;
  cfg.seed = f.seed ? *f.seed : env_seed().value_or(0);
  const NoiseComparison c = compare_to_noise(m, cfg);
  std::ostringstream csv;
  csv << "index,eigenvalue,mp_sample\n";
  for (Eigen::Index i = 0; i < c.spectrum.n_prime; ++i)
    csv << i + 1 << ',' << format_real(c.spectrum.eigenvalues(i)) << ','
        << format_real(c.noise_samples(i)) << '\n';
  emit(csv.str(), f.out, out);
  return kOk;
}

}  // namespace

CliResult to_result(const RankDecision& d, double runtime_s) {
  CliResult r;
  r.k = d.k;
  r.sigma2 = d.sigma2_used;
  r.n_prime = d.n_prime;
  r.eigenvalues = padded(d.eigenvalues, d.n_prime);
  r.mp_samples = padded(d.noise_samples, d.n_prime);
  r.deviation = padded(d.deviation, d.n_prime);
  r.posterior = padded(d.first_trace.probs, d.n_prime);
  r.double_posterior = padded(d.second_trace.probs, d.n_prime);
  r.candidates = d.candidates;
  r.warnings = d.warnings;
  r.runtime_s = runtime_s;
  return r;
}

std::string to_json(const CliResult& r) {
  const json j = {{"k", r.k},
                  {"sigma2", r.sigma2},
                  {"n_prime", r.n_prime},
                  {"eigenvalues", to_std(r.eigenvalues)},
                  {"mp_samples", to_std(r.mp_samples)},
                  {"deviation", to_std(r.deviation)},
                  {"posterior", to_std(r.posterior)},
                  {"double_posterior", to_std(r.double_posterior)},
                  {"candidates", r.candidates},
                  {"warnings", r.warnings},
                  {"runtime_s", r.runtime_s}};
  return j.dump(2);
}

std::string to_csv(const CliResult& r) {
  std::ostringstream csv;
  csv << "index,eigenvalue,mp_sample,deviation,posterior,double_posterior,k,sigma2\n";
  for (Eigen::Index i = 0; i < r.n_prime; ++i)
    csv << i + 1 << ',' << format_real(r.eigenvalues(i)) << ','
        << format_real(r.mp_samples(i)) << ',' << format_real(r.deviation(i)) << ','
        << format_real(r.posterior(i)) << ',' << format_real(r.double_posterior(i))
        << ',' << r.k << ',' << format_real(r.sigma2) << '\n';
  return csv.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Signal rank estimation against the Marchenko-Pastur noise law", "specrank"};
  app.require_subcommand(1);

  EstimateFlags est;
  auto* estimate = app.add_subcommand("estimate", "estimate the signal rank of a matrix");
  add_input_flags(estimate, est.in);
  estimate->add_option("--n-prime", est.n_prime, "leading eigenvalues to use");
  estimate->add_option("--delta", est.delta, "selection threshold in [0, 1]");
  estimate->add_option("--gamma4", est.gamma4, "fourth moment of standardized noise");
  estimate->add_option("--seed", est.seed, "random seed (overrides SPECRANK_SEED)");
  estimate->add_option("--sweeps", est.sweeps, "sampler sweeps after burn-in");
  estimate->add_option("--burnin", est.burnin, "sampler burn-in sweeps");
  auto* as_json = estimate->add_flag("--json", est.as_json, "JSON output (default)");
  estimate->add_flag("--csv", est.as_csv, "CSV output")->excludes(as_json);
  estimate->add_option("--out", est.out, "output file (default stdout)");

  SimulateFlags sim;
  auto* simulate = app.add_subcommand("simulate", "run a simulation benchmark");
  auto* preset = simulate->add_option("--preset", sim.preset, "table1-row1 ... table1-row18");
  simulate->add_option("--kind", sim.kind, "x1 or x2")
      ->check(CLI::IsMember({"x1", "x2"}))
      ->excludes(preset);
  simulate->add_option("--n", sim.n, "samples");
  simulate->add_option("--p", sim.p, "features");
  simulate->add_option("--k", sim.k, "true rank");
  simulate->add_option("--sigmas", sim.sigmas, "signal variances")->delimiter(',');
  simulate->add_option("--replicates", sim.replicates, "replicates per setting");
  simulate->add_option("--seed", sim.seed, "master seed (overrides SPECRANK_SEED)");
  simulate->add_option("--workers", sim.workers, "parallel workers")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--n-prime", sim.n_prime, "leading eigenvalues to use");
  simulate->add_option("--delta", sim.delta, "selection threshold in [0, 1]");
  simulate->add_option("--out-dir", sim.out_dir, "directory for bench.csv and bench.json");

  SpectrumFlags spec;
  auto* spectrum = app.add_subcommand("spectrum", "dump eigenvalues next to noise draws");
  add_input_flags(spectrum, spec.in);
  spectrum->add_option("--n-prime", spec.n_prime, "leading eigenvalues to use");
  spectrum->add_option("--seed", spec.seed, "random seed (overrides SPECRANK_SEED)");
  spectrum->add_option("--out", spec.out, "output file (default stdout)");

  std::vector<std::string> argv_store{"specrank"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kInputError;
  }

  try {
    if (estimate->parsed()) return cmd_estimate(est, out, err);
    if (simulate->parsed()) return cmd_simulate(sim, out, err);
    return cmd_spectrum(spec, out, err);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalError;
  }
}

}  // namespace specrank::cli
