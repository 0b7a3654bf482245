#include "cli.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "liposim/engine.hpp"
#include "liposim/error.hpp"
#include "liposim/population.hpp"
#include "liposim/serialize_json.hpp"
#include "liposim/speclang/lower.hpp"
#include "liposim/speclang/parser.hpp"
#include "liposim/trace.hpp"

#ifndef LIPOSIM_VERSION
#define LIPOSIM_VERSION "0.0.0"
#endif

namespace liposim::cli {

namespace {

using nlohmann::json;
namespace lj = liposim::json;

// Carries an exit code out of a subcommand.
struct Exit {
  int code;
};

std::string read_file(const std::string& path, std::ostream& err) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    err << "liposim: cannot read '" << path << "'\n";
    throw Exit{kIoError};
  }
  std::ostringstream ss;
  ss << f.rdbuf();
  if (f.bad()) {
    err << "liposim: error while reading '" << path << "'\n";
    throw Exit{kIoError};
  }
  return ss.str();
}

// Writes to `path`, or to `out` when the path is empty or "-".
void write_output(const std::string& path, const std::string& data, std::ostream& out, std::ostream& err) {
  if (path.empty() || path == "-") {
    out << data;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f || !(f << data) || !f.flush()) {
    err << "liposim: cannot write '" << path << "'\n";
    throw Exit{kIoError};
  }
}

json meta(std::string_view command, std::uint64_t seed, const std::optional<std::string>& input,
          const std::optional<std::string>& input_bytes) {
  json m{{"tool", "liposim"}, {"version", LIPOSIM_VERSION}, {"command", command}, {"seed", seed}};
  m["input"] = input ? json(*input) : json(nullptr);
  m["input_sha256"] = input_bytes ? json(sha256_hex(*input_bytes)) : json(nullptr);
  return m;
}

std::string morphology_summary(const std::vector<Mvl>& mvls) {
  std::map<Morphology, std::size_t> counts;
  for (const auto& m : mvls) ++counts[m.morphology];
  std::string s = std::to_string(mvls.size()) + " MVLs:";
  for (auto m : {Morphology::T1a, Morphology::T1b, Morphology::T2, Morphology::T3}) {
    s += " " + std::string(to_string(m)) + "=" + std::to_string(counts[m]);
  }
  return s;
}

// --- generate -----------------------------------------------------------------

struct GenerateOptions {
  std::size_t n = 0;
  std::optional<std::uint64_t> seed;
  std::string params_path;
  std::string family;
  std::string out_path;
  unsigned jobs = 1;
};

int cmd_generate(const GenerateOptions& o, std::ostream& out, std::ostream& err) {
  GeneratorParams params;
  std::optional<std::string> params_bytes;
  if (!o.params_path.empty()) {
    params_bytes = read_file(o.params_path, err);
    try {
      params = lj::generator_params_from_json(nlohmann::json::parse(*params_bytes));
    } catch (const std::exception& e) {
      err << "liposim: " << o.params_path << ": " << e.what() << "\n";
      return kValidationError;
    }
  }
  if (o.seed) params.seed = *o.seed;
  if (!o.family.empty()) params.family = *parse_distribution_family(o.family);
  try {
    params.validate();
  } catch (const std::exception& e) {
    err << "liposim: " << e.what() << "\n";
    return kValidationError;
  }

  std::vector<Mvl> mvls;
  try {
    mvls = sample_population(params, o.n, params.seed, o.jobs);
  } catch (const std::exception& e) {
    err << "liposim: generation failed: " << e.what() << "\n";
    return kRuntimeError;
  }
  json m = meta("generate", params.seed, o.params_path.empty() ? std::nullopt : std::optional(o.params_path),
                params_bytes);
  m["n"] = o.n;
  m["params"] = lj::generator_params_to_json(params);
  const SpeciesTable no_species;
  write_output(o.out_path, lj::population_to_json(mvls, no_species, m).dump() + "\n", out, err);
  std::ostream& info = (o.out_path.empty() || o.out_path == "-") ? err : out;
  info << "generated " << morphology_summary(mvls) << "\n";
  return kOk;
}

// --- stats --------------------------------------------------------------------

struct StatsOptions {
  std::string input;
  std::string format = "text";
};

int cmd_stats(const StatsOptions& o, std::istream& in, std::ostream& out, std::ostream& err) {
  std::string text;
  if (o.input == "-") {
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  } else {
    text = read_file(o.input, err);
  }
  PopulationStats stats;
  try {
    SpeciesTable species;
    const auto mvls = lj::population_from_json(nlohmann::json::parse(text), species);
    stats = population_stats(mvls);
  } catch (const std::exception& e) {
    err << "liposim: " << (o.input == "-" ? "<stdin>" : o.input) << ": " << e.what() << "\n";
    return kValidationError;
  }
  if (o.format == "json") {
    out << lj::stats_to_json(stats).dump(2) << "\n";
  } else {
    out << format_stats_table(stats);
  }
  return kOk;
}

// --- validate / run -------------------------------------------------------------

struct Loaded {
  std::string source;
  speclang::ScenarioAst ast;
};

void print_diagnostics(const std::vector<speclang::Diagnostic>& diags, const std::string& path, std::ostream& err) {
  for (const auto& d : diags) err << speclang::format_diagnostic(d, path) << "\n";
}

Loaded load(const std::string& path, std::ostream& err) {
  Loaded l;
  l.source = read_file(path, err);
  auto parsed = speclang::parse(l.source);
  if (!parsed.ok()) {
    print_diagnostics(parsed.diagnostics, path, err);
    throw Exit{kValidationError};
  }
  l.ast = std::move(*parsed.ast);
  return l;
}

speclang::Scenario lower_or_exit(const Loaded& l, const std::string& path, std::ostream& err) {
  auto lowered = speclang::lower(l.ast, l.source);
  print_diagnostics(lowered.diagnostics, path, err);
  if (!lowered.scenario) throw Exit{kValidationError};
  return std::move(*lowered.scenario);
}

int cmd_validate(const std::string& path, std::ostream& out, std::ostream& err) {
  const Loaded l = load(path, err);
  const speclang::Scenario s = lower_or_exit(l, path, err);
  out << path << ": ok (" << l.ast.name << ", " << to_string(s.state.mode) << ", " << s.state.mvls.size()
      << " MVLs, " << s.state.rules.size() << " rules, " << s.schedule.size() << " interventions)\n";
  return kOk;
}

struct RunOptions {
  std::string input;
  std::string out_path;
  std::string format = "csv";
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
  std::optional<std::uint64_t> steps;
  std::optional<std::uint64_t> sample_every;
};

json audit_json(const AuditReport& a) {
  json tags = json::object();
  for (std::size_t i = 0; i < a.tags.size(); ++i) {
    tags[a.tags[i]] = json{{"initial", a.initial[i]},
                           {"final", a.final_totals[i]},
                           {"max_relative_deviation", a.max_relative_deviation[i]}};
  }
  return tags;
}

int cmd_run(const RunOptions& o, std::ostream& out, std::ostream& err) {
  Loaded l = load(o.input, err);
  if (o.seed || o.dt || o.steps || o.sample_every) {
    if (!l.ast.run) l.ast.run = speclang::RunDecl{};
    if (o.seed) l.ast.run->seed = *o.seed;
    if (o.dt) l.ast.run->dt = *o.dt;
    if (o.steps) l.ast.run->steps = *o.steps;
    if (o.sample_every) l.ast.run->sample_every = *o.sample_every;
  }
  speclang::Scenario s = lower_or_exit(l, o.input, err);

  Trace trace;
  try {
    trace = engine::run(s.state, s.config, s.schedule, s.atoms);
  } catch (const std::exception& e) {
    err << "liposim: run failed: " << e.what() << "\n";
    return kRuntimeError;
  }

  json m = meta("run", s.state.rng_seed, o.input, l.source);
  m["scenario"] = l.ast.name;
  m["mode"] = to_string(s.state.mode);
  if (s.state.mode == Mode::Kinetic) {
    m["dt"] = s.config.kinetic.dt;
    m["solver"] = engine::to_string(s.config.kinetic.diffusion_solver);
  }
  m["max_steps"] = s.state.mode == Mode::Kinetic ? s.config.kinetic.max_steps : s.config.abstract.max_steps;
  m["sample_every"] = s.config.sample_every;

  const std::size_t events = trace.events.size() - trace.count_events(EventKind::Halt);
  std::ostringstream body;
  if (o.format == "json") {
    json doc{{"meta", m},
             {"halt", to_string(trace.halt)},
             {"steps", trace.steps},
             {"time_s", s.state.clock},
             {"events", lj::events_to_json(trace.events, s.state.species)},
             {"audit", audit_json(trace.audit)},
             {"reaction_clamps", trace.reaction_clamps},
             {"diffusion_clamps", trace.diffusion_clamps},
             {"rows", trace_rows_json(trace)}};
    body << doc.dump(1) << "\n";
  } else {
    write_trace_csv(body, trace, "meta " + m.dump());
  }
  write_output(o.out_path, body.str(), out, err);

  std::ostream& info = (o.out_path.empty() || o.out_path == "-") ? err : out;
  for (const auto& w : trace.warnings) info << "warning: " << w << "\n";
  info << "halt: " << to_string(trace.halt) << " after " << trace.steps << " steps (t = " << format_number(s.state.clock)
       << (s.state.mode == Mode::Kinetic ? " s" : "") << ")\n";
  info << "events: " << events << " (burst " << trace.count_events(EventKind::Burst) << ", dc_lysis "
       << trace.count_events(EventKind::DcLysis) << ")\n";
  if (s.state.mode == Mode::Abstract) {
    info << "final total count: " << format_number(trace.samples.back().total_objects()) << "\n";
  }
  for (std::size_t i = 0; i < trace.audit.tags.size(); ++i) {
    info << "audit " << trace.audit.tags[i] << ": max relative deviation "
         << format_number(trace.audit.max_relative_deviation[i]) << "\n";
  }
  return kOk;
}

}  // namespace

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

int cli_main(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multivesicular liposome P-system simulator", "liposim"};
  app.set_version_flag("--version", LIPOSIM_VERSION);
  app.require_subcommand(1);

  GenerateOptions gen;
  auto* generate = app.add_subcommand("generate", "Sample an MVL population as JSON");
  generate->add_option("-n,--count", gen.n, "Number of MVLs")->required()->check(CLI::Range(1, 10000000));
  generate->add_option("--seed", gen.seed, "Random seed (default: params file, else 0)");
  generate->add_option("--params", gen.params_path, "Generator parameters (JSON)");
  generate->add_option("--family", gen.family, "Diameter distribution family")
      ->check(CLI::IsMember({"normal", "lognormal"}));
  generate->add_option("--out", gen.out_path, "Output path (default: stdout)");
  generate->add_option("--jobs", gen.jobs, "Worker threads; output does not depend on it")
      ->check(CLI::Range(1u, 256u));

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario and write its trace");
  run_cmd->add_option("scenario", run.input, "Scenario file (.psys)")->required();
  run_cmd->add_option("--out", run.out_path, "Trace path (default: stdout)");
  run_cmd->add_option("--format", run.format, "Trace format")->check(CLI::IsMember({"csv", "json"}));
  run_cmd->add_option("--seed", run.seed, "Override the scenario seed");
  run_cmd->add_option("--dt", run.dt, "Override the time step (s)")->check(CLI::PositiveNumber);
  run_cmd->add_option("--steps", run.steps, "Override the step limit")->check(CLI::PositiveNumber);
  run_cmd->add_option("--sample-every", run.sample_every, "Record every k-th step")->check(CLI::PositiveNumber);

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Parse and check a scenario without running it");
  validate->add_option("scenario", validate_path, "Scenario file (.psys)")->required();

  StatsOptions stats;
  auto* stats_cmd = app.add_subcommand("stats", "Summarize a population JSON file");
  stats_cmd->add_option("population", stats.input, "Population JSON, or - for stdin")->required();
  stats_cmd->add_option("--format", stats.format, "Report format")->check(CLI::IsMember({"text", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << LIPOSIM_VERSION << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "liposim: " << e.what() << "\n";
    err << "run 'liposim --help' for usage\n";
    return kValidationError;
  }

  try {
    if (generate->parsed()) return cmd_generate(gen, out, err);
    if (run_cmd->parsed()) return cmd_run(run, out, err);
    if (validate->parsed()) return cmd_validate(validate_path, out, err);
    if (stats_cmd->parsed()) return cmd_stats(stats, in, out, err);
  } catch (const Exit& e) {
    return e.code;
  } catch (const std::exception& e) {
    err << "liposim: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kValidationError;
}

}  // namespace liposim::cli
