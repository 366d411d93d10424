// Command-line interface over the circuit-model sweep library. Every
// subcommand emits one table (CSV or JSON) with a full `key=value` provenance
// echo: rerunning with the echo as --config reproduces the output byte for
// byte (the timestamp honors SOURCE_DATE_EPOCH). Physical parameters have no
// silent defaults — only truncation/presentation knobs do. Exit codes:
// 0 success, 2 configuration error, 3 convergence failure (table still
// written, failed rows marked in the error column), 4 file I/O failure.
#include <CLI11.hpp>
#include <json.hpp>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <functional>
#include <numbers>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "uscqed/format.hpp"
#include "uscqed/io.hpp"
#include "uscqed/models.hpp"
#include "uscqed/spectral.hpp"
#include "uscqed/sweep.hpp"
#include "uscqed/types.hpp"

namespace {

using nlohmann::json;
using namespace uscqed;

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNotConverged = 3;
constexpr int kIoFailure = 4;

// ------- value parsing -------

// Flux literals: "pi", "-pi", "0.75pi", or a plain number in radians.
double parse_flux(const std::string& text) {
  std::string t;
  for (const char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) t += c;
  double scale = 1.0;
  bool has_pi = false;
  if (t.size() >= 2 && t.compare(t.size() - 2, 2, "pi") == 0) {
    has_pi = true;
    t.erase(t.size() - 2);
    if (t.empty()) return std::numbers::pi;
    if (t == "-") return -std::numbers::pi;
    if (t == "+") return std::numbers::pi;
    scale = std::numbers::pi;
  }
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size())
    throw DomainError("invalid flux value '" + text + "' (use radians or e.g. 0.9pi)");
  (void)has_pi;
  return v * scale;
}

// Truncation dimensions: "60x60", "60", or a JSON array of integers.
std::vector<int> parse_dims(const std::string& text) {
  std::vector<int> dims;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t next = text.find('x', pos);
    const std::string part = text.substr(pos, next == std::string::npos ? next : next - pos);
    char* end = nullptr;
    const long v = std::strtol(part.c_str(), &end, 10);
    if (part.empty() || end != part.c_str() + part.size())
      throw DomainError("invalid truncation dims '" + text + "' (use e.g. 60x60)");
    dims.push_back(static_cast<int>(v));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return dims;
}

double number_from_json(const json& v, const std::string& key) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    char* end = nullptr;
    const double d = std::strtod(s.c_str(), &end);
    if (!s.empty() && end == s.c_str() + s.size()) return d;
  }
  throw DomainError("config key '" + key + "' must be a number");
}

bool bool_from_json(const json& v, const std::string& key) {
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
  }
  throw DomainError("config key '" + key + "' must be a boolean");
}

const char* bool_text(bool b) { return b ? "true" : "false"; }

// ------- option registry: flag/config merge -------

// Every option is declared once with its command-line flag and its config
// key. After parsing, finalize() fills unset options from the config file
// (explicit flags win), rejects unknown config keys, and answers which
// parameters were provided at all — required physical parameters are then
// checked per subcommand, so nothing physical ever defaults silently.
class OptionRegistry {
 public:
  explicit OptionRegistry(CLI::App* app) : app_(app) {}

  void number(const std::string& flag, const std::string& key, double* target,
              const std::string& help) {
    CLI::Option* opt = app_->add_option(flag, *target, help);
    add(key, opt, [target, key](const json& v) { *target = number_from_json(v, key); });
  }

  void integer(const std::string& flag, const std::string& key, int* target,
               const std::string& help) {
    CLI::Option* opt = app_->add_option(flag, *target, help);
    add(key, opt, [target, key](const json& v) {
      *target = static_cast<int>(number_from_json(v, key));
    });
  }

  void unsigned64(const std::string& flag, const std::string& key, std::uint64_t* target,
                  const std::string& help) {
    CLI::Option* opt = app_->add_option(flag, *target, help);
    add(key, opt, [target, key](const json& v) {
      *target = static_cast<std::uint64_t>(number_from_json(v, key));
    });
  }

  void text(const std::string& flag, const std::string& key, std::string* target,
            const std::string& help) {
    CLI::Option* opt = app_->add_option(flag, *target, help);
    add(key, opt, [target, key](const json& v) {
      if (!v.is_string()) throw DomainError("config key '" + key + "' must be a string");
      *target = v.get<std::string>();
    });
  }

  // Accepts "pi" literals on the command line and in the config.
  void flux(const std::string& flag, const std::string& key, double* target,
            const std::string& help) {
    raw_.emplace_back();
    std::string* raw = &raw_.back();
    CLI::Option* opt = app_->add_option(flag, *raw, help);
    add(
        key, opt,
        [target, key](const json& v) {
          *target = v.is_string() ? parse_flux(v.get<std::string>())
                                  : number_from_json(v, key);
        },
        [target, raw] { *target = parse_flux(*raw); });
  }

  void boolean(const std::string& flag, const std::string& key, bool* target,
               const std::string& help) {
    CLI::Option* opt = app_->add_flag(flag, *target, help);
    add(key, opt, [target, key](const json& v) { *target = bool_from_json(v, key); });
  }

  // Accepts "60x60" on the command line; "60x60" or an array in the config.
  void dims(const std::string& flag, const std::string& key, std::vector<int>* target,
            const std::string& help) {
    raw_.emplace_back();
    std::string* raw = &raw_.back();
    CLI::Option* opt = app_->add_option(flag, *raw, help);
    add(
        key, opt,
        [target, key](const json& v) {
          if (v.is_string()) {
            *target = parse_dims(v.get<std::string>());
          } else if (v.is_array()) {
            target->clear();
            for (const auto& e : v)
              target->push_back(static_cast<int>(number_from_json(e, key)));
          } else {
            throw DomainError("config key '" + key + "' must be \"AxB\" or an array");
          }
        },
        [target, raw] { *target = parse_dims(*raw); });
  }

  // Accept a config key this command implies but does not consume.
  void allow(const std::string& key) { allowed_.insert(key); }

  void finalize(const json& cfg) {
    for (Entry& e : entries_) {
      if (e.opt->count() > 0) {
        if (e.post) e.post();
        e.provided = true;
      } else if (cfg.contains(e.key)) {
        e.apply(cfg.at(e.key));
        e.provided = true;
      }
    }
    static const std::set<std::string> kInformational = {"version", "generated", "command",
                                                         "converged"};
    for (const auto& [key, value] : cfg.items()) {
      (void)value;
      if (kInformational.count(key) > 0 || allowed_.count(key) > 0) continue;
      bool known = false;
      for (const Entry& e : entries_) known = known || e.key == key;
      if (!known) throw DomainError("unknown config key '" + key + "'");
    }
  }

  bool provided(const std::string& key) const {
    for (const Entry& e : entries_)
      if (e.key == key) return e.provided;
    return false;
  }

  // Throws naming every missing physical parameter at once.
  void require(const std::vector<std::string>& keys) const {
    std::string missing;
    for (const std::string& k : keys)
      if (!provided(k)) missing += (missing.empty() ? "" : ", ") + k;
    if (!missing.empty())
      throw DomainError("missing required parameter(s): " + missing);
  }

 private:
  struct Entry {
    std::string key;
    CLI::Option* opt;
    std::function<void(const json&)> apply;
    std::function<void()> post;  // convert raw text after command-line parse
    bool provided = false;
  };

  void add(const std::string& key, CLI::Option* opt, std::function<void(const json&)> apply,
           std::function<void()> post = nullptr) {
    entries_.push_back({key, opt, std::move(apply), std::move(post)});
  }

  CLI::App* app_;
  std::vector<Entry> entries_;
  std::set<std::string> allowed_;
  std::deque<std::string> raw_;  // stable storage for text-typed options
};

// ------- shared subcommand state -------

struct SubCommand {
  CLI::App* app = nullptr;
  OptionRegistry* reg = nullptr;  // owned via registry list in main
  std::string name;

  std::string config_path;
  std::string format = "csv";
  std::string output_path;
  std::string precision = "double";

  sweep::SweepSpec spec;
  std::function<int()> run;

  void add_common() {
    app->add_option("--config", config_path,
                    "JSON config file; explicit flags override its keys");
    app->add_option("--output", output_path, "output file (default: stdout)");
    reg->text("--format", "format", &format, "output format: csv or json");
    reg->text("--precision", "precision", &precision,
              "eigensolver precision: double or long-double");
    reg->dims("--trunc-start", "truncation_start", &spec.policy.start_dims,
              "starting truncation dims, e.g. 60x60");
    reg->dims("--trunc-max", "truncation_max", &spec.policy.max_dims,
              "maximum truncation dims, e.g. 200x200");
    reg->integer("--trunc-step", "truncation_step", &spec.policy.step,
                 "truncation growth step per round");
    reg->integer("--trunc-k", "truncation_k", &spec.policy.k,
                 "eigenpairs the truncation controller converges (default: the printed levels)");
    reg->number("--trunc-tol", "truncation_tol", &spec.policy.tol,
                "eigenvalue drift tolerance, GHz");
    // Echoed by every table; consumed only where they vary per command.
    reg->allow("axis");
    reg->allow("model");
  }

  void apply_precision() {
    if (precision == "double")
      spec.policy.solver.precision = spectral::Precision::Double;
    else if (precision == "long-double")
      spec.policy.solver.precision = spectral::Precision::LongDouble;
    else
      throw DomainError("precision must be 'double' or 'long-double'");
  }

  io::Format parse_format() const {
    if (format == "csv") return io::Format::Csv;
    if (format == "json") return io::Format::Json;
    throw DomainError("format must be 'csv' or 'json'");
  }

  // Serializes and writes the table; returns the process exit code.
  int emit(const sweep::SweepTable& table, io::Provenance extra = {}) const {
    io::Provenance envelope = {{"version", kVersion},
                               {"generated", io::timestamp_utc()},
                               {"command", name},
                               {"format", format}};
    envelope.insert(envelope.end(), extra.begin(), extra.end());
    const std::string text = io::serialize(table, envelope, parse_format());
    if (output_path.empty())
      std::fwrite(text.data(), 1, text.size(), stdout);
    else
      io::write_file(output_path, text);
    return table.all_converged ? kOk : kNotConverged;
  }
};

// Single-point runs sweep a degenerate [v, v] range; collapse the duplicate.
void dedup_single_point(sweep::SweepTable& table) {
  if (table.rows.size() == 2 && table.rows[0].axis == table.rows[1].axis)
    table.rows.pop_back();
}

// Resolves --from/--to/--points against a single-point shortcut value.
void resolve_range(sweep::SweepSpec& spec, bool single_given, double single_value,
                   const OptionRegistry& reg, const std::string& single_flag) {
  const bool from_given = reg.provided("from");
  const bool to_given = reg.provided("to");
  if (single_given && (from_given || to_given))
    throw DomainError("give either " + single_flag + " or --from/--to, not both");
  if (single_given) {
    spec.from = spec.to = single_value;
    spec.points = 2;
  } else if (!from_given || !to_given) {
    throw DomainError("missing sweep range: give --from and --to (or " + single_flag +
                      " for a single point)");
  }
}

// Truncation defaults are per model: oscillator bases start at 60 levels,
// while the charge basis (dimension 2*n_cut + 1) confines hard and needs far
// fewer states. Unless pinned with --trunc-k, the controller converges
// exactly the levels the table prints.
void apply_truncation_defaults(SubCommand& c, sweep::Model model) {
  if (!c.reg->provided("truncation_k")) c.spec.policy.k = 2;
  if (model != sweep::Model::CPB) return;
  if (!c.reg->provided("truncation_start")) c.spec.policy.start_dims = {6, 40};
  if (!c.reg->provided("truncation_max")) c.spec.policy.max_dims = {20, 200};
}

io::Provenance outputs_echo(const sweep::SweepSpec& spec, bool with_overlays,
                            bool with_parity) {
  io::Provenance p = {{"k", std::to_string(spec.outputs.k)},
                      {"levels", bool_text(spec.outputs.levels)},
                      {"photon_number", bool_text(spec.outputs.photon_number)},
                      {"entanglement", bool_text(spec.outputs.entanglement)}};
  if (with_parity) p.emplace_back("parity", bool_text(spec.outputs.parity));
  if (with_overlays) {
    p.emplace_back("rabi_overlay", bool_text(spec.outputs.rabi_overlay));
    p.emplace_back("capshunt_overlay", bool_text(spec.outputs.capshunt_overlay));
  }
  return p;
}

// ------- subcommand setup -------

models::Gauge parse_gauge(const std::string& text) {
  if (text == "flux") return models::Gauge::Flux;
  if (text == "charge") return models::Gauge::Charge;
  throw DomainError("gauge must be 'flux' or 'charge'");
}

struct CoupledLcCmd : SubCommand {
  double x_single = 0.0;
  std::string gauge = "flux";

  void setup() {
    reg->number("--omega1", "omega1", &spec.lc.omega1, "parallel-mode frequency, GHz");
    reg->number("--omega2", "omega2", &spec.lc.omega2, "series-mode frequency, GHz");
    reg->text("--gauge", "gauge", &gauge, "flux or charge (default flux)");
    reg->number("--from", "from", &spec.from, "coupling range start");
    reg->number("--to", "to", &spec.to, "coupling range end");
    reg->integer("--points", "points", &spec.points, "grid points (default 21)");
    reg->number("--x", "x_fixed", &x_single, "evaluate a single coupling value");
    reg->integer("--k", "k", &spec.outputs.k, "transition columns w01..w0k");
    reg->boolean("--levels", "levels", &spec.outputs.levels, "absolute level columns");
    reg->boolean("--photon-number", "photon_number", &spec.outputs.photon_number,
                 "series-mode occupation of the ground state");
    reg->boolean("--entanglement", "entanglement", &spec.outputs.entanglement,
                 "leading Schmidt weights of the ground state");
    reg->boolean("--parity", "parity", &spec.outputs.parity,
                 "reflection parity of the lowest doublet");

    run = [this] {
      apply_precision();
      reg->require({"omega1", "omega2"});
      spec.gauge = parse_gauge(gauge);
      spec.model = sweep::Model::CoupledLC;
      spec.axis = sweep::Axis::X;
      apply_truncation_defaults(*this, spec.model);
      resolve_range(spec, reg->provided("x_fixed"), x_single, *reg, "--x");
      sweep::SweepTable table = sweep::run_sweep(spec);
      dedup_single_point(table);
      return emit(table, outputs_echo(spec, false, true));
    };
  }
};

struct FluxoniumCmd : SubCommand {
  std::string axis = "x";
  double x_value = 0.0;
  double flux_from = 0.0, flux_to = 0.0;

  void setup() {
    reg->number("--ej", "e_j", &spec.fluxonium.e_j, "Josephson energy, GHz");
    reg->number("--ec1", "e_c1", &spec.fluxonium.e_c1, "atom charging energy, GHz");
    reg->number("--el1", "e_l1", &spec.fluxonium.e_l1, "shunt inductive energy, GHz");
    reg->flux("--flux", "theta_ext", &spec.fluxonium.theta_ext,
              "external flux in radians; accepts pi literals (e.g. pi, 0.9pi)");
    reg->number("--omega-r", "omega_r", &spec.omega_r, "photon frequency, GHz");
    reg->text("--axis", "axis", &axis, "sweep axis: x or theta_ext (default x)");
    reg->flux("--from", "from", &flux_from, "range start (pi literals on theta_ext)");
    reg->flux("--to", "to", &flux_to, "range end");
    reg->integer("--points", "points", &spec.points, "grid points (default 21)");
    reg->number("--x", "x_fixed", &x_value,
                "single coupling value (axis x) or the fixed coupling (axis theta_ext)");
    reg->integer("--k", "k", &spec.outputs.k, "transition columns w01..w0k");
    reg->boolean("--levels", "levels", &spec.outputs.levels, "absolute level columns");
    reg->boolean("--photon-number", "photon_number", &spec.outputs.photon_number,
                 "ground-state photon number");
    reg->boolean("--entanglement", "entanglement", &spec.outputs.entanglement,
                 "leading Schmidt weights of the ground state");
    reg->boolean("--parity", "parity", &spec.outputs.parity,
                 "reflection parity of the lowest doublet");
    reg->boolean("--rabi-overlay", "rabi_overlay", &spec.outputs.rabi_overlay,
                 "two-level-truncation transition columns");
    reg->boolean("--capshunt-overlay", "capshunt_overlay", &spec.outputs.capshunt_overlay,
                 "zero-shared-inductance transition columns");

    run = [this] {
      apply_precision();
      reg->require({"e_j", "e_c1", "e_l1", "omega_r"});
      spec.model = sweep::Model::Fluxonium;
      apply_truncation_defaults(*this, spec.model);
      if (axis == "x") {
        reg->require({"theta_ext"});
        spec.axis = sweep::Axis::X;
        spec.from = flux_from;
        spec.to = flux_to;
        resolve_range(spec, reg->provided("x_fixed"), x_value, *reg, "--x");
      } else if (axis == "theta_ext") {
        spec.axis = sweep::Axis::ThetaExt;
        reg->require({"x_fixed", "from", "to"});
        spec.x_fixed = x_value;
        spec.from = flux_from;
        spec.to = flux_to;
      } else {
        throw DomainError("axis must be 'x' or 'theta_ext'");
      }
      sweep::SweepTable table = sweep::run_sweep(spec);
      dedup_single_point(table);
      return emit(table, outputs_echo(spec, true, true));
    };
  }
};

struct CpbCmd : SubCommand {
  std::string axis;
  double x_value = 0.0;

  void setup() {
    reg->number("--ej", "e_j", &spec.cpb.e_j, "Josephson energy, GHz");
    reg->number("--ec1", "e_c1", &spec.cpb.e_c1, "island charging energy, GHz");
    reg->number("--ng", "ng", &spec.cpb.ng, "offset charge in [-1, 1] (fixed on axis x2)");
    reg->number("--ec2", "e_c2", &spec.e_c2, "resonator charging energy, GHz");
    reg->number("--el2", "e_l2", &spec.e_l2, "resonator inductive energy (axis ng)");
    reg->text("--axis", "axis", &axis, "sweep axis: ng or x2");
    reg->number("--from", "from", &spec.from, "range start");
    reg->number("--to", "to", &spec.to, "range end");
    reg->integer("--points", "points", &spec.points, "grid points (default 21)");
    reg->number("--x", "x_fixed", &x_value,
                "single coupling value (axis x2) or the fixed coupling (axis ng)");
    reg->integer("--k", "k", &spec.outputs.k, "transition columns w01..w0k");
    reg->boolean("--levels", "levels", &spec.outputs.levels, "absolute level columns");
    reg->boolean("--photon-number", "photon_number", &spec.outputs.photon_number,
                 "ground-state photon number");
    reg->boolean("--entanglement", "entanglement", &spec.outputs.entanglement,
                 "leading Schmidt weights of the ground state");
    reg->boolean("--rabi-overlay", "rabi_overlay", &spec.outputs.rabi_overlay,
                 "two-level-truncation transition columns");

    run = [this] {
      apply_precision();
      reg->require({"e_j", "e_c1", "e_c2", "axis"});
      spec.model = sweep::Model::CPB;
      apply_truncation_defaults(*this, spec.model);
      if (axis == "ng") {
        spec.axis = sweep::Axis::Ng;
        if (!reg->provided("from") && !reg->provided("to")) {
          spec.from = -1.0;  // full period is the canonical picture
          spec.to = 1.0;
        } else {
          reg->require({"from", "to"});
        }
        if (reg->provided("x_fixed")) spec.x_fixed = x_value;
      } else if (axis == "x2" || axis == "x_squared") {
        spec.axis = sweep::Axis::XSquared;
        reg->require({"ng"});
        resolve_range(spec, reg->provided("x_fixed"), x_value * x_value, *reg, "--x");
      } else {
        throw DomainError("axis must be 'ng' or 'x2'");
      }
      sweep::SweepTable table = sweep::run_sweep(spec);
      dedup_single_point(table);
      return emit(table, outputs_echo(spec, true, false));
    };
  }
};

// Per-model required physical parameters, shared by ground-state and converge.
struct ModelParams {
  std::string model;
  std::string gauge = "flux";
  double x_value = 0.0;
  double g = 0.0;

  void setup(SubCommand& c) {
    OptionRegistry* reg = c.reg;
    sweep::SweepSpec& spec = c.spec;
    reg->text("--model", "model", &model,
              "coupled-lc, fluxonium, cpb, rabi, or capshunt");
    reg->number("--omega1", "omega1", &spec.lc.omega1, "coupled-lc: parallel mode, GHz");
    reg->number("--omega2", "omega2", &spec.lc.omega2, "coupled-lc: series mode, GHz");
    reg->text("--gauge", "gauge", &gauge, "coupled-lc: flux or charge (default flux)");
    reg->number("--ej", "e_j", &spec.fluxonium.e_j, "Josephson energy, GHz");
    reg->number("--ec1", "e_c1", &spec.fluxonium.e_c1, "atom charging energy, GHz");
    reg->number("--el1", "e_l1", &spec.fluxonium.e_l1, "shunt inductive energy, GHz");
    reg->flux("--flux", "theta_ext", &spec.fluxonium.theta_ext,
              "external flux; accepts pi literals");
    reg->number("--ng", "ng", &spec.cpb.ng, "cpb offset charge in [-1, 1]");
    reg->number("--ec2", "e_c2", &spec.e_c2, "cpb resonator charging energy, GHz");
    reg->number("--omega-r", "omega_r", &spec.omega_r, "photon frequency, GHz");
    reg->number("--omega-a", "omega_a", &spec.rabi.omega_a, "rabi two-level splitting, GHz");
    reg->number("--g", "g", &g, "rabi coupling, GHz");
    reg->number("--x", "x_fixed", &x_value, "dimensionless coupling");
    reg->number("--from", "from", &spec.from, "coupling range start (optional)");
    reg->number("--to", "to", &spec.to, "coupling range end");
    reg->integer("--points", "points", &spec.points, "grid points");
  }

  // Fills model/axis and the range; throws for missing parameters.
  void resolve(SubCommand& c) {
    OptionRegistry* reg = c.reg;
    sweep::SweepSpec& spec = c.spec;
    reg->require({"model"});
    spec.axis = sweep::Axis::X;
    if (model == "coupled-lc") {
      spec.model = sweep::Model::CoupledLC;
      reg->require({"omega1", "omega2"});
      spec.gauge = parse_gauge(gauge);
    } else if (model == "fluxonium") {
      spec.model = sweep::Model::Fluxonium;
      reg->require({"e_j", "e_c1", "e_l1", "theta_ext", "omega_r"});
    } else if (model == "cpb") {
      spec.model = sweep::Model::CPB;
      reg->require({"e_j", "e_c1", "e_c2", "ng"});
      spec.cpb.e_j = spec.fluxonium.e_j;
      spec.cpb.e_c1 = spec.fluxonium.e_c1;
    } else if (model == "rabi") {
      spec.model = sweep::Model::Rabi;
      reg->require({"omega_r", "omega_a"});
      spec.rabi.omega_r = spec.omega_r;
      if (reg->provided("g")) {
        spec.from = spec.to = g / spec.omega_r;
        spec.points = 2;
        if (reg->provided("from") || reg->provided("to"))
          throw DomainError("give either --g or --from/--to, not both");
        return;
      }
    } else if (model == "capshunt") {
      spec.model = sweep::Model::Capshunt;
      reg->require({"e_j", "e_c1", "e_l1", "theta_ext", "omega_r"});
    } else {
      throw DomainError(
          "model must be one of coupled-lc, fluxonium, cpb, rabi, capshunt");
    }
    resolve_range(spec, reg->provided("x_fixed"), x_value, *reg, "--x");
  }

  // Physical-parameter echo for tables built outside run_sweep.
  io::Provenance echo(const sweep::SweepSpec& spec) const {
    io::Provenance p = {{"model", model}};
    if (model == "coupled-lc") {
      p.emplace_back("omega1", format_exact(spec.lc.omega1));
      p.emplace_back("omega2", format_exact(spec.lc.omega2));
      p.emplace_back("gauge", gauge);
    } else if (model == "fluxonium" || model == "capshunt") {
      p.emplace_back("e_j", format_exact(spec.fluxonium.e_j));
      p.emplace_back("e_c1", format_exact(spec.fluxonium.e_c1));
      p.emplace_back("e_l1", format_exact(spec.fluxonium.e_l1));
      p.emplace_back("theta_ext", format_exact(spec.fluxonium.theta_ext));
      p.emplace_back("omega_r", format_exact(spec.omega_r));
    } else if (model == "cpb") {
      p.emplace_back("e_j", format_exact(spec.cpb.e_j));
      p.emplace_back("e_c1", format_exact(spec.cpb.e_c1));
      p.emplace_back("ng", format_exact(spec.cpb.ng));
      p.emplace_back("e_c2", format_exact(spec.e_c2));
    } else if (model == "rabi") {
      p.emplace_back("omega_r", format_exact(spec.omega_r));
      p.emplace_back("omega_a", format_exact(spec.rabi.omega_a));
    }
    return p;
  }
};

// Truncation-policy echo for tables built outside run_sweep.
void append_policy_echo(const SubCommand& c, io::Provenance& p) {
  const auto dims_text = [](const std::vector<int>& dims) {
    std::string s;
    for (std::size_t i = 0; i < dims.size(); ++i) {
      if (i > 0) s += 'x';
      s += std::to_string(dims[i]);
    }
    return s;
  };
  p.emplace_back("truncation_start", dims_text(c.spec.policy.start_dims));
  p.emplace_back("truncation_max", dims_text(c.spec.policy.max_dims));
  p.emplace_back("truncation_step", std::to_string(c.spec.policy.step));
  p.emplace_back("truncation_k", std::to_string(c.spec.policy.k));
  p.emplace_back("truncation_tol", format_exact(c.spec.policy.tol));
  p.emplace_back("precision", c.precision);
}

struct GroundStateCmd : SubCommand {
  ModelParams params;

  void setup() {
    params.setup(*this);
    spec.outputs.k = 3;
    reg->integer("--k", "k", &spec.outputs.k, "transition columns w01..w0k (default 3)");
    // The observable set is derived from the model; the echo keys are
    // informative only, so a fed-back config must not trip the unknown-key check.
    for (const char* key : {"levels", "photon_number", "entanglement", "parity"})
      reg->allow(key);

    run = [this] {
      apply_precision();
      params.resolve(*this);
      apply_truncation_defaults(*this, spec.model);
      spec.outputs.levels = true;
      const bool two_factor = spec.model != sweep::Model::Capshunt;
      spec.outputs.photon_number = two_factor;
      spec.outputs.entanglement = two_factor;
      spec.outputs.parity = spec.model == sweep::Model::CoupledLC ||
                            spec.model == sweep::Model::Fluxonium ||
                            spec.model == sweep::Model::Rabi;
      sweep::SweepTable table = sweep::run_sweep(spec);
      dedup_single_point(table);
      return emit(table, outputs_echo(spec, false, spec.outputs.parity));
    };
  }
};

struct ConvergeCmd : SubCommand {
  ModelParams params;

  void setup() {
    params.setup(*this);

    run = [this] {
      apply_precision();
      params.resolve(*this);
      apply_truncation_defaults(*this, spec.model);
      if (spec.from != spec.to)
        throw DomainError("converge evaluates a single point: give --x (or --g)");
      const double v = spec.from;
      const auto result = sweep::converge_point(spec, v);

      // History table: one row per truncation round.
      sweep::SweepTable table;
      table.axis_name = "round";
      const std::size_t knobs = result.history.front().dims.size();
      for (std::size_t d = 0; d < knobs; ++d)
        table.columns.push_back("dim" + std::to_string(d + 1));
      table.columns.push_back("drift");
      for (int i = 0; i < result.eigenvalues.size(); ++i)
        table.columns.push_back("e" + std::to_string(i));
      for (std::size_t rnd = 0; rnd < result.history.size(); ++rnd) {
        const auto& rec = result.history[rnd];
        sweep::SweepRow row;
        row.axis = static_cast<double>(rnd);
        for (const int d : rec.dims) row.values.push_back(d);
        row.values.push_back(rec.drift);  // inf on round 0 prints as empty
        for (int i = 0; i < rec.eigenvalues.size(); ++i)
          row.values.push_back(rec.eigenvalues(i));
        table.rows.push_back(std::move(row));
      }
      table.all_converged = result.converged;
      if (!result.converged)
        table.rows.back().error = "not converged within the truncation caps";

      io::Provenance extra = params.echo(spec);
      extra.emplace_back("x_fixed", format_exact(v));
      append_policy_echo(*this, extra);
      extra.emplace_back("converged", bool_text(result.converged));
      return emit(table, extra);
    };
  }
};

struct FitRenormCmd : SubCommand {
  double x_value = 0.0;
  double flux_from = 0.9 * std::numbers::pi;
  double flux_to = 1.1 * std::numbers::pi;
  int n_transitions = 3;
  double init_e_j = 0.0, init_e_c1 = 0.0, init_e_l1 = 0.0;
  sweep::FitOptions fit;

  void setup() {
    reg->number("--ej", "e_j", &spec.fluxonium.e_j, "bare Josephson energy, GHz");
    reg->number("--ec1", "e_c1", &spec.fluxonium.e_c1, "bare charging energy, GHz");
    reg->number("--el1", "e_l1", &spec.fluxonium.e_l1, "bare inductive energy, GHz");
    reg->number("--omega-r", "omega_r", &spec.omega_r, "photon frequency, GHz");
    reg->number("--x", "x_fixed", &x_value, "coupling of the target spectra");
    reg->flux("--from", "from", &flux_from, "flux range start (default 0.9pi)");
    reg->flux("--to", "to", &flux_to, "flux range end (default 1.1pi)");
    reg->integer("--points", "points", &spec.points, "flux grid points (default 11)");
    reg->integer("--n-transitions", "n_transitions", &n_transitions,
                 "transition curves fitted (default 3)");
    reg->number("--init-ej", "init_e_j", &init_e_j, "fit start (default: bare e_j)");
    reg->number("--init-ec1", "init_e_c1", &init_e_c1, "fit start (default: bare e_c1)");
    reg->number("--init-el1", "init_e_l1", &init_e_l1, "fit start (default: bare e_l1)");
    reg->integer("--fit-levels", "fit_levels", &fit.n_levels,
                 "bare-atom basis size inside the fit");
    reg->integer("--max-iterations", "max_iterations", &fit.max_iterations,
                 "simplex iterations per start");
    reg->integer("--restarts", "restarts", &fit.restarts, "perturbed restarts");
    reg->number("--fit-tol", "fit_tol", &fit.tol, "simplex spread tolerance");
    reg->unsigned64("--seed", "seed", &fit.seed, "restart-perturbation seed");
    reg->allow("model");      // implied: the fit target is always fluxonium
    reg->allow("theta_ext");  // echoed by the target sweep; the axis overrides it
    spec.points = 11;

    run = [this] {
      apply_precision();
      reg->require({"e_j", "e_c1", "e_l1", "omega_r", "x_fixed"});
      spec.model = sweep::Model::Fluxonium;
      apply_truncation_defaults(*this, spec.model);
      spec.axis = sweep::Axis::ThetaExt;
      spec.x_fixed = x_value;
      spec.from = flux_from;
      spec.to = flux_to;
      spec.outputs.k = n_transitions;
      const sweep::SweepTable target = sweep::run_sweep(spec);

      models::FluxoniumParams init = spec.fluxonium;
      if (reg->provided("init_e_j")) init.e_j = init_e_j;
      if (reg->provided("init_e_c1")) init.e_c1 = init_e_c1;
      if (reg->provided("init_e_l1")) init.e_l1 = init_e_l1;
      init.theta_ext = 0.0;
      const auto result = sweep::fit_renormalized_fluxonium(target, n_transitions, init, fit);

      sweep::SweepTable table;
      table.axis_name = "x";
      table.columns = {"e_j_star",      "e_c_star",   "e_l_star",     "residual_rms",
                       "residual_init", "iterations", "fit_converged"};
      table.provenance = target.provenance;
      sweep::SweepRow row;
      row.axis = x_value;
      row.values = {result.e_j_star,
                    result.e_c_star,
                    result.e_l_star,
                    result.residual,
                    result.residual_init,
                    static_cast<double>(result.iterations),
                    result.converged ? 1.0 : 0.0};
      row.converged = result.converged && target.all_converged;
      if (!row.converged) row.error = "fit or target sweep did not converge";
      table.rows.push_back(row);
      table.all_converged = row.converged;

      io::Provenance extra = {
          {"n_transitions", std::to_string(n_transitions)},
          {"init_e_j", format_exact(init.e_j)},
          {"init_e_c1", format_exact(init.e_c1)},
          {"init_e_l1", format_exact(init.e_l1)},
          {"fit_levels", std::to_string(fit.n_levels)},
          {"max_iterations", std::to_string(fit.max_iterations)},
          {"restarts", std::to_string(fit.restarts)},
          {"fit_tol", format_exact(fit.tol)},
          {"seed", std::to_string(fit.seed)}};
      return emit(table, extra);
    };
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "uscqed: circuit models of an atom strongly coupled to a photon mode.\n"
      "Tables carry a provenance echo; rerunning with it as --config is\n"
      "byte-identical (set SOURCE_DATE_EPOCH to pin the timestamp). The\n"
      "tensor-dimension guard honors the USC_MAX_DIM environment variable."};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  CoupledLcCmd coupled;
  FluxoniumCmd fluxonium;
  CpbCmd cpb;
  GroundStateCmd ground;
  FitRenormCmd fitcmd;
  ConvergeCmd converge;

  const auto wire = [&app](SubCommand& c, const char* name, const char* help) {
    c.app = app.add_subcommand(name, help);
    c.name = name;
    c.reg = new OptionRegistry(c.app);  // lives for the process
    c.add_common();
  };
  wire(coupled, "coupled-lc", "two coupled linear circuits: numeric and exact modes vs x");
  wire(fluxonium, "fluxonium-spectrum",
       "flux-tunneling atom + photon: transitions vs x or external flux");
  wire(cpb, "cpb-spectrum", "charge-tunneling atom + photon: transitions vs ng or x^2");
  wire(ground, "ground-state",
       "single-point ground-state report: levels, photons, parity, entanglement");
  wire(fitcmd, "fit-renorm",
       "fit bare-atom parameters to coupled transition spectra vs flux");
  wire(converge, "converge", "print the truncation-convergence history at one point");

  coupled.setup();
  fluxonium.setup();
  cpb.setup();
  ground.setup();
  fitcmd.setup();
  converge.setup();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  SubCommand* cmds[] = {&coupled, &fluxonium, &cpb, &ground, &fitcmd, &converge};
  for (SubCommand* c : cmds) {
    if (!c->app->parsed()) continue;
    try {
      json cfg = json::object();
      if (!c->config_path.empty()) {
        try {
          cfg = json::parse(io::read_file(c->config_path));
        } catch (const json::parse_error& e) {
          std::fprintf(stderr, "uscqed: config %s: %s\n", c->config_path.c_str(), e.what());
          return kConfigError;
        }
        if (!cfg.is_object()) {
          std::fprintf(stderr, "uscqed: config %s must be a JSON object\n",
                       c->config_path.c_str());
          return kConfigError;
        }
      }
      c->reg->finalize(cfg);
      return c->run();
    } catch (const ResourceError& e) {
      std::fprintf(stderr, "uscqed: %s\n", e.what());
      return kNotConverged;
    } catch (const ResonanceError& e) {
      std::fprintf(stderr, "uscqed: %s\n", e.what());
      return kNotConverged;
    } catch (const IoError& e) {
      std::fprintf(stderr, "uscqed: %s\n", e.what());
      return kIoFailure;
    } catch (const std::exception& e) {
      std::fprintf(stderr, "uscqed: %s\n", e.what());
      return kConfigError;
    }
  }
  return kConfigError;
}
