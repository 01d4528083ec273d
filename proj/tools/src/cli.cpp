#include "neurocnn_tools/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "neurocnn/census.hpp"
#include "neurocnn/invariants.hpp"
#include "neurocnn/jacobian.hpp"
#include "neurocnn/serialize.hpp"
#include "neurocnn_tools/verify.hpp"

namespace neurocnn::tools {

using nlohmann::json;

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<std::string> parameter_names(const std::vector<int>& k) {
  std::vector<std::string> names;
  int total = 0;
  for (int ki : k) total += ki;
  for (std::size_t i = 0; i < k.size(); ++i) {
    for (int j = 0; j < k[i]; ++j) {
      if (total <= 26) {
        names.emplace_back(1, static_cast<char>('a' + names.size()));
      } else {
        names.push_back("w" + std::to_string(i) + "_" + std::to_string(j));
      }
    }
  }
  return names;
}

std::string format_poly(const HomoPoly<Rational>& p, const std::vector<std::string>& names) {
  if (p.is_zero()) return "0";
  std::string out;
  for (const auto& [e, c] : p.terms()) {
    Rational mag = c < 0 ? Rational(-c) : c;
    if (out.empty()) {
      if (c < 0) out += "-";
    } else {
      out += c < 0 ? " - " : " + ";
    }
    std::vector<std::string> factors;
    bool constant = true;
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      constant = false;
      factors.push_back(names[i] + (e[i] > 1 ? "^" + std::to_string(e[i]) : ""));
    }
    if (mag != 1 || constant) {
      std::string num = boost::multiprecision::numerator(mag).str();
      if (boost::multiprecision::denominator(mag) != 1) num += "/" + boost::multiprecision::denominator(mag).str();
      factors.insert(factors.begin(), num);
    }
    for (std::size_t f = 0; f < factors.size(); ++f) out += (f ? "*" : "") + factors[f];
  }
  return out;
}

namespace {

constexpr std::uint64_t kDefaultSeed = 1;
constexpr const char* kToySpec = "d0=3;k=2,2;s=1,1;r=2";
constexpr const char* kVersion = "0.1.0";

struct Context {
  std::vector<std::string> args;
  std::string manifest_path;
  std::string arch_spec;
  json seeds = json::object();
};

std::uint64_t resolve_seed(const CLI::Option* flag, std::uint64_t flag_value) {
  if (flag->count() > 0) return flag_value;
  if (const char* env = std::getenv("NEUROCNN_SEED")) {
    try {
      std::size_t used = 0;
      const std::uint64_t v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::ParseError, std::string("NEUROCNN_SEED is not an unsigned integer: '") + env + "'");
  }
  return kDefaultSeed;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

void write_manifest(const Context& ctx, const std::string& command, const std::string& output, int code) {
  std::string joined;
  for (const auto& a : ctx.args) joined += (joined.empty() ? "" : " ") + a;
  std::ostringstream digest;
  digest << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(output);
  const json manifest{{"command", command},
                      {"argv", joined},
                      {"arch", ctx.arch_spec},
                      {"seeds", ctx.seeds},
                      {"version", kVersion},
                      {"timestamp", utc_timestamp()},
                      {"exit_code", code},
                      {"outputs", json::array({json{{"stream", "stdout"}, {"bytes", output.size()}, {"fnv1a64", digest.str()}}})}};
  std::ofstream file(ctx.manifest_path);
  if (!file) throw Error(ErrorCode::ParseError, "cannot write manifest '" + ctx.manifest_path + "'");
  file << manifest.dump(2) << '\n';
}

DatasetMode parse_mode(const std::string& mode) {
  if (mode == "generic") return DatasetMode::Generic;
  if (mode == "teacher") return DatasetMode::Teacher;
  throw Error(ErrorCode::ParseError, "dataset mode must be generic or teacher, got '" + mode + "'");
}

json big_json(const BigInt& v) {
  if (v >= 0 && v <= std::numeric_limits<std::uint64_t>::max()) return json(v.convert_to<std::uint64_t>());
  return json(v.str());
}

int cmd_invariants(Context& ctx, std::ostream& out, bool formula_only) {
  const Architecture arch = parse_architecture(ctx.arch_spec);
  if (formula_only) {
    std::vector<int> p;
    for (int k : arch.k) p.push_back(k - 1);
    out << json{{"ged", big_json(ged_neuromanifold(arch))}, {"m", arch.filter_degrees()}, {"p", p}}.dump() << '\n';
    return kOk;
  }
  out << to_json(invariant_report(arch)) << '\n';
  return kOk;
}

int cmd_table1(std::ostream& out, bool check, bool canary) {
  const auto table = computed_table1(canary);
  out << "r,k2,k3,k4,k5,k6\n";
  for (std::size_t r = 0; r < table.size(); ++r) {
    out << r + 1;
    for (auto v : table[r]) out << ',' << v;
    out << '\n';
  }
  if (check && table != reference_table1()) return kPropertyFailure;
  return kOk;
}

int cmd_verify(Context& ctx, std::ostream& out, const std::string& suite, std::uint64_t seed, bool canary) {
  VerifyOptions opts;
  opts.seed = seed;
  opts.canary = canary;
  if (!ctx.arch_spec.empty()) opts.arch = parse_architecture(ctx.arch_spec);
  std::vector<SuiteResult> results;
  if (suite == "all") {
    for (const auto& name : suite_names()) results.push_back(run_suite(name, opts));
  } else {
    results.push_back(run_suite(suite, opts));
  }
  out << to_json(results, opts) << '\n';
  for (const auto& r : results) {
    if (!r.passed()) return kPropertyFailure;
  }
  return kOk;
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot read dataset '" + path + "'");
  return read_jsonl(in);
}

int cmd_gen_dataset(Context& ctx, std::ostream& out, const DatasetSpec& spec, const std::string& path) {
  const Architecture arch = parse_architecture(ctx.arch_spec);
  const Dataset data = generate_dataset(arch, spec);
  if (path.empty()) {
    write_jsonl(out, data);
  } else {
    std::ofstream file(path);
    if (!file) throw Error(ErrorCode::ParseError, "cannot write dataset '" + path + "'");
    write_jsonl(file, data);
    out << json{{"path", path}, {"pairs", data.size()}}.dump() << '\n';
  }
  return kOk;
}

int cmd_census(Context& ctx, std::ostream& out, const CensusOptions& opts, const std::string& dataset_path,
               const DatasetSpec& spec) {
  const Architecture arch = parse_architecture(ctx.arch_spec);
  const Dataset data = dataset_path.empty() ? generate_dataset(arch, spec) : load_dataset(dataset_path);
  const CensusReport report = census(arch, data, opts);
  out << to_json(report) << '\n';
  return report.bound_ok ? kOk : kPropertyFailure;
}

int cmd_toy(std::ostream& out, const CensusOptions& opts, const DatasetSpec& spec) {
  const Architecture arch = parse_architecture(kToySpec);
  const InvariantReport inv = invariant_report(arch);
  const auto names = parameter_names(arch.k);
  const auto coefficients = symbolic_coefficients(arch);
  const MonomialBasis basis = output_basis(arch);
  json phi = json::array();
  for (std::size_t i = 0; i < basis.size(); ++i) {
    std::string monomial;
    const auto& e = basis.exponent(i);
    for (std::size_t j = 0; j < e.size(); ++j) {
      if (e[j] == 0) continue;
      monomial += (monomial.empty() ? "" : "*") + std::string("x") + std::to_string(j) +
                  (e[j] > 1 ? "^" + std::to_string(e[j]) : "");
    }
    phi.push_back(json{{"monomial", monomial}, {"coefficient", format_poly(coefficients[0][i], names)}});
  }
  // Kernel directions written in the filter symbols.
  json kernel = json::array();
  std::vector<std::size_t> offsets{0};
  for (int k : arch.k) offsets.push_back(offsets.back() + static_cast<std::size_t>(k));
  for (int t = arch.layers() - 2; t >= 0; --t) {
    json v = json::array();
    for (int i = 0; i < arch.layers(); ++i) {
      for (std::size_t j = offsets[static_cast<std::size_t>(i)]; j < offsets[static_cast<std::size_t>(i) + 1]; ++j) {
        if (i == t) {
          v.push_back(names[j]);
        } else if (i == t + 1) {
          v.push_back("-" + std::to_string(arch.r) + "*" + names[j]);
        } else {
          v.push_back("0");
        }
      }
    }
    kernel.push_back(std::move(v));
  }
  const CensusReport report = census(arch, generate_dataset(arch, spec), opts);
  out << json{{"arch", kToySpec},
              {"dim", inv.dim},
              {"degree", big_json(inv.degree)},
              {"ged", big_json(inv.ged)},
              {"phi", std::move(phi)},
              {"kernel_basis", std::move(kernel)},
              {"census",
               {{"starts", opts.n_starts},
                {"seed", opts.seed},
                {"dataset_seed", spec.seed},
                {"smooth_critical_points", report.smooth_count},
                {"min", report.minima},
                {"saddle", report.saddles},
                {"max", report.maxima},
                {"bound_ok", report.bound_ok}}}}
             .dump(2)
      << '\n';
  return report.bound_ok ? kOk : kPropertyFailure;
}

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::Precondition: return kPrecondition;
    case ErrorKind::Consistency: return kPropertyFailure;
    case ErrorKind::Degeneracy: return kDegeneracy;
  }
  return kPrecondition;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Context ctx;
  ctx.args = args;
  CLI::App app{"Polynomial convolutional network geometry toolkit", "neurocnn"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--manifest", ctx.manifest_path, "Write a run manifest (JSON) to this file");

  bool formula_only = false;
  auto* inv = app.add_subcommand("invariants", "Dimension, degree and gED of an architecture");
  inv->add_option("--arch", ctx.arch_spec, "Architecture, e.g. d0=3;k=2,2;s=1,1;r=2")->required();
  inv->add_flag("--formula-only", formula_only, "Only evaluate the gED formula (allowed for r = 1)");

  bool check = false;
  bool canary = false;
  auto* tab = app.add_subcommand("table1", "gED grid for L = 2, r = 1..6, k = 2..6 as CSV");
  tab->add_flag("--check", check, "Exit 3 unless the grid matches the published values");
  tab->add_flag("--canary", canary, "Use a deliberately wrong degree vector");

  std::string suite = "all";
  std::uint64_t seed_value = 0;
  auto* ver = app.add_subcommand("verify", "Run property suites");
  ver->add_option("suite", suite, "conv|jacobian|fibers|regression|invariants|all")
      ->check(CLI::IsMember({"conv", "jacobian", "fibers", "regression", "invariants", "all"}));
  auto* ver_seed = ver->add_option("--seed", seed_value, "Root seed");
  ver->add_option("--arch", ctx.arch_spec, "Restrict suites to one architecture");
  ver->add_flag("--canary", canary, "Inject a wrong degree formula into the invariants suite");

  DatasetSpec spec;
  std::string mode = "generic";
  std::string dataset_out;
  auto* gen = app.add_subcommand("gen-dataset", "Write a synthetic dataset as JSON lines");
  gen->add_option("--arch", ctx.arch_spec, "Architecture")->required();
  gen->add_option("--n", spec.n, "Number of pairs (default N + 5)");
  gen->add_option("--mode", mode, "generic|teacher");
  gen->add_option("--noise", spec.noise, "Teacher noise standard deviation");
  auto* gen_seed = gen->add_option("--seed", seed_value, "Dataset seed");
  gen->add_option("--out", dataset_out, "Output file (default stdout)");

  CensusOptions copts;
  std::string dataset_path;
  std::uint64_t gen_seed_value = 0;
  auto* cen = app.add_subcommand("census", "Multi-start critical point census");
  std::string census_arch = kToySpec;
  cen->add_option("--arch", census_arch, "Architecture")->capture_default_str();
  cen->add_option("--starts", copts.n_starts, "Number of random starts")->default_val(2000);
  auto* cen_seed = cen->add_option("--seed", seed_value, "Root seed of the starts");
  cen->add_option("--dataset", dataset_path, "JSON lines dataset");
  auto* cen_gen_seed = cen->add_option("--gen-seed", gen_seed_value, "Seed of the generated dataset");
  cen->add_option("--n", spec.n, "Generated dataset size (default N + 5)");
  cen->add_option("--mode", mode, "generic|teacher");
  cen->add_option("--noise", spec.noise, "Teacher noise standard deviation");
  cen->add_option("--tol", copts.grad_tol, "Gradient norm tolerance");
  cen->add_option("--threads", copts.threads, "Worker cap (0: hardware)");

  auto* toy = app.add_subcommand("toy", "Full pipeline on d0=3;k=2,2;s=1,1;r=2");
  toy->add_option("--starts", copts.n_starts, "Census starts")->default_val(2000);
  auto* toy_seed = toy->add_option("--seed", seed_value, "Root seed");
  toy->add_option("--threads", copts.threads, "Worker cap (0: hardware)");

  std::ostringstream buffer;
  int code = kOk;
  std::string command;
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    if (*inv) {
      command = "invariants";
      code = cmd_invariants(ctx, buffer, formula_only);
    } else if (*tab) {
      command = "table1";
      code = cmd_table1(buffer, check, canary);
    } else if (*ver) {
      command = "verify";
      const std::uint64_t seed = resolve_seed(ver_seed, seed_value);
      ctx.seeds["seed"] = seed;
      code = cmd_verify(ctx, buffer, suite, seed, canary);
    } else if (*gen) {
      command = "gen-dataset";
      spec.seed = resolve_seed(gen_seed, seed_value);
      spec.mode = parse_mode(mode);
      ctx.seeds["seed"] = spec.seed;
      code = cmd_gen_dataset(ctx, buffer, spec, dataset_out);
    } else if (*cen) {
      command = "census";
      ctx.arch_spec = census_arch;
      copts.seed = resolve_seed(cen_seed, seed_value);
      spec.seed = cen_gen_seed->count() ? gen_seed_value : copts.seed;
      spec.mode = parse_mode(mode);
      ctx.seeds["seed"] = copts.seed;
      if (dataset_path.empty()) ctx.seeds["gen_seed"] = spec.seed;
      code = cmd_census(ctx, buffer, copts, dataset_path, spec);
    } else if (*toy) {
      command = "toy";
      ctx.arch_spec = kToySpec;
      copts.seed = resolve_seed(toy_seed, seed_value);
      spec.seed = copts.seed;
      ctx.seeds["seed"] = copts.seed;
      code = cmd_toy(buffer, copts, spec);
    }
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kOk : kPrecondition;
  } catch (const Error& e) {
    out << buffer.str();
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  out << buffer.str();
  if (!ctx.manifest_path.empty()) {
    try {
      write_manifest(ctx, command, buffer.str(), code);
    } catch (const Error& e) {
      err << "error: " << e.what() << '\n';
      return kPrecondition;
    }
  }
  return code;
}

}  // namespace neurocnn::tools
