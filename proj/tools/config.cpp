#include "config.hpp"

#include <fstream>
#include <sstream>

#include "andersonlab/fourier.hpp"

namespace andersonlab::cli {

const std::vector<DefaultEntry>& default_table() {
  static const std::vector<DefaultEntry> table = {
      {"dim", 2, "torus dimension, 2 or 3"},
      {"M", 128, "grid side per axis, power of two"},
      {"eps", 0.03125, "mollifier scale"},
      {"mollifier", "sharp", "sharp | smooth (raised cosine)"},
      {"amplitude", 1.0, "noise amplitude, 0 gives the noise-free operator"},
      {"seed", 1, "noise seed"},
      {"data_seed", 7, "seed of random initial data"},
      {"K", 24.0, "Galerkin band radius |k| <= K"},
      {"band", "ball", "ball | box (box keeps the whole grid, required by nls)"},
      {"N", 0, "paracontrolled cutoff, 0 selects the smallest contracting N"},
      {"method", "dense", "dense | krylov (2d propagation)"},
      {"krylov_dim", 30, "Krylov subspace size"},
      {"T", 1.0, "final time"},
      {"dt", 1e-3, "time step (nls)"},
      {"steps", 100, "time samples on [0, T] (propagate)"},
      {"snapshot_stride", 0, "write a field snapshot every n samples, 0 = none"},
      {"duhamel_t", 0.0, "if > 0, propagate also checks the Duhamel identity at this time"},
      {"s", 0.6, "Sobolev index of data and ledger norms"},
      {"sigma", 0.55, "derivative index of the L^4 W^{sigma,4} norms"},
      {"scheme", "strang", "strang | picard"},
      {"experiment", "run", "run | lwp | gwp (nls)"},
      {"delta", 1e-6, "perturbation size (lwp)"},
      {"data_amplitude", 1.0, "initial data norm (nls)"},
      {"data_width", 3.0, "Gaussian spectral width of smooth initial data"},
      {"picard_iter", 30, "maximal Picard iterations"},
      {"panels", 64, "Picard time panels"},
      {"ledger_stride", 10, "ledger row every n steps"},
      {"generator", "laplacian", "laplacian | short-time | anderson2d | anderson3d"},
      {"p", 4.0, "time integrability exponent (q = p for the diagonal norms)"},
      {"N_list", json::array({8, 16, 32, 64, 128}), "frequency shells"},
      {"seeds", 20, "ensemble size"},
      {"seed0", 1, "first ensemble seed"},
      {"n_t", 128, "time samples of space-time norms"},
      {"tolerance", 0.2, "slope tolerance"},
      {"two_sided", false, "slope must lie within tolerance on both sides of theory"},
      {"profile", "full", "verify profile: full | noise-zero | an acceptance profile"},
      {"out", "andersonlab-out", "output directory"},
  };
  return table;
}

namespace {

json strichartz(const char* generator, int dim, double p, int M, json N_list, double tol, bool two_sided) {
  return {{"generator", generator}, {"dim", dim}, {"p", p}, {"M", M}, {"N_list", std::move(N_list)},
          {"tolerance", tol}, {"two_sided", two_sided}, {"sigma", 0.0}};
}

json verify_profile(const char* name) { return {{"profile", name}}; }

}  // namespace

const std::vector<Preset>& preset_table() {
  static const std::vector<Preset> table = {
      {"free-d2-p4", "strichartz", strichartz("laplacian", 2, 4.0, 256, {8, 16, 32, 64, 128}, 0.2, false),
       "free group, d = 2, p = 4, slope <= 0.2"},
      {"free-d2-p8", "strichartz", strichartz("laplacian", 2, 8.0, 256, {8, 16, 32, 64}, 0.2, true),
       "free group, d = 2, p = 8 against the loss 1/2"},
      {"free-d3-p10_3", "strichartz", strichartz("laplacian", 3, 10.0 / 3.0, 64, {2, 4, 8, 16}, 0.25, false),
       "free group, d = 3, p = 10/3, slope <= 0.25"},
      {"short-time-d2-p4", "strichartz", strichartz("short-time", 2, 4.0, 256, {8, 16, 32, 64, 128}, 0.2, true),
       "free group on [0, 1/N], slope within 0.2 of -1/4"},
      {"anderson2d-r4", "strichartz",
       [] {
         json j = strichartz("anderson2d", 2, 4.0, 64, {3, 6, 12, 24}, 0.25, false);
         j.update({{"eps", 0.0625}, {"K", 24.0}, {"seed", 5}});
         return j;
       }(),
       "sharpened 2d group, data in H^{1-4/r}, slope <= 0.25"},
      {"anderson3d-p10_3", "strichartz",
       [] {
         json j = strichartz("anderson3d", 3, 10.0 / 3.0, 64, {2, 3, 4, 6, 8}, 0.35, false);
         j.update({{"eps", 0.0625}, {"K", 8.0}, {"seed", 5}});
         return j;
       }(),
       "sharpened 3d group, data in H^{2-5/p}, slope <= 0.35"},
      {"spectrum-2d", "spectrum", {{"dim", 2}, {"M", 128}, {"K", 24.0}, {"eps", 0.03125}},
       "2d spectrum, lowest eigenvalue of the shifted operator"},
      {"propagate-2d", "propagate", {{"dim", 2}, {"M", 128}, {"K", 24.0}, {"eps", 0.03125}, {"T", 1.0}},
       "2d trajectory with mass and energy ledger"},
      {"duhamel-2d", "propagate",
       {{"dim", 2}, {"M", 128}, {"K", 24.0}, {"eps", 0.03125}, {"T", 0.005}, {"steps", 4}, {"duhamel_t", 0.005}},
       "Duhamel identity residuals under quadrature refinement"},
      {"nls-strang", "nls",
       {{"M", 32}, {"eps", 0.125}, {"seed", 21}, {"band", "box"}, {"T", 0.1}, {"dt", 1e-4}, {"ledger_stride", 100}},
       "Strang splitting run with conserved-quantity ledger"},
      {"nls-picard", "nls",
       {{"M", 32}, {"eps", 0.125}, {"seed", 21}, {"band", "box"}, {"T", 0.05}, {"scheme", "picard"}},
       "Picard iteration of the mild formulation in sharp coordinates"},
      {"nls-lwp", "nls",
       {{"M", 32}, {"eps", 0.125}, {"seed", 21}, {"band", "box"}, {"T", 0.05}, {"dt", 1e-3}, {"experiment", "lwp"},
        {"seeds", 10}},
       "Lipschitz quotients of the solution map in H^s"},
      {"nls-gwp", "nls",
       {{"M", 32}, {"eps", 0.125}, {"seed", 21}, {"band", "box"}, {"T", 5.0}, {"dt", 1e-3}, {"experiment", "gwp"}},
       "energy-space run to T = 5"},
      {"verify-noise-zero", "verify", verify_profile("noise-zero"), "degenerate identities without noise"},
      {"verify-full", "verify", verify_profile("full"), "fast invariant suite"},
      {"accept-reconstruction", "verify", verify_profile("reconstruction"), "paraproduct reconstruction"},
      {"accept-bernstein", "verify", verify_profile("bernstein"), "single-mode derivative ratios"},
      {"accept-renormalization", "verify", verify_profile("renormalization"), "renormalization constants"},
      {"accept-noise-cauchy", "verify", verify_profile("noise-cauchy"), "enhanced-noise Cauchy property"},
      {"accept-gamma", "verify", verify_profile("gamma"), "2d Gamma map"},
      {"accept-norm-equivalence", "verify", verify_profile("norm-equivalence"), "norm equivalences"},
      {"accept-perturbation", "verify", verify_profile("perturbation"), "perturbation scalings"},
      {"accept-conservation", "verify", verify_profile("conservation"), "unitarity and conservation"},
      {"accept-duhamel", "verify", verify_profile("duhamel"), "Duhamel identity"},
      {"accept-strichartz", "verify", verify_profile("strichartz"), "Strichartz slopes"},
      {"accept-nls", "verify", verify_profile("nls"), "NLS experiments"},
  };
  return table;
}

const Preset* find_preset(const std::string& name) {
  for (const auto& p : preset_table())
    if (name == p.name) return &p;
  return nullptr;
}

namespace {

const DefaultEntry* find_default(const std::string& key) {
  for (const auto& e : default_table())
    if (key == e.key) return &e;
  return nullptr;
}

bool same_kind(const json& want, const json& got) {
  if (want.is_number_float()) return got.is_number();
  if (want.is_number_integer()) return got.is_number_integer();
  if (want.is_array()) {
    if (!got.is_array()) return false;
    for (const auto& v : got)
      if (!v.is_number_integer()) return false;
    return true;
  }
  return want.type() == got.type();
}

void merge(json& cfg, const json& src, const std::string& origin) {
  for (auto it = src.begin(); it != src.end(); ++it) {
    const DefaultEntry* e = find_default(it.key());
    if (!e) throw ConfigError("unknown config key '" + it.key() + "' in " + origin);
    if (!same_kind(e->value, it.value()))
      throw ConfigError("config key '" + it.key() + "' in " + origin + " has the wrong type");
    cfg[it.key()] = e->value.is_number_float() ? json(it.value().get<double>()) : it.value();
  }
}

}  // namespace

json parse_flag_value(const std::string& key, const std::string& text) {
  const DefaultEntry* e = find_default(key);
  if (!e) throw ConfigError("unknown option '" + key + "'");
  try {
    std::size_t pos = 0;
    if (e->value.is_number_float()) {
      double v = std::stod(text, &pos);
      if (pos != text.size()) throw std::invalid_argument(text);
      return v;
    }
    if (e->value.is_number_integer()) {
      long long v = std::stoll(text, &pos);
      if (pos != text.size()) throw std::invalid_argument(text);
      return v;
    }
    if (e->value.is_boolean()) {
      if (text == "true" || text == "1") return true;
      if (text == "false" || text == "0") return false;
      throw std::invalid_argument(text);
    }
    if (e->value.is_array()) {
      json arr = json::array();
      std::stringstream ss(text);
      std::string item;
      while (std::getline(ss, item, ',')) {
        long long v = std::stoll(item, &pos);
        if (pos != item.size()) throw std::invalid_argument(text);
        arr.push_back(v);
      }
      return arr;
    }
  } catch (const std::logic_error&) {
    throw ConfigError("cannot parse --" + key + " '" + text + "'");
  }
  return text;
}

json resolve_config(const std::string& command, const std::string& config_path, const std::string& preset,
                    const std::map<std::string, std::string>& flags) {
  json cfg = json::object();
  for (const auto& e : default_table()) cfg[e.key] = e.value;
  if (!preset.empty()) {
    const Preset* p = find_preset(preset);
    if (!p) throw ConfigError("unknown preset '" + preset + "'");
    if (command != p->command)
      throw ConfigError("preset '" + preset + "' belongs to the " + p->command + " command");
    merge(cfg, p->values, "preset " + preset);
  }
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot open config file " + config_path);
    json file;
    try {
      file = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError("config file " + config_path + " is not valid JSON: " + e.what());
    }
    if (!file.is_object()) throw ConfigError("config file must hold a JSON object");
    if (!file.contains("schema") || file["schema"] != kSchema)
      throw ConfigError(std::string("config file must declare \"schema\": \"") + kSchema + "\"");
    file.erase("schema");
    if (file.contains("command")) {
      if (file["command"] != command) throw ConfigError("config file is for the " + file["command"].dump() + " command");
      file.erase("command");
    }
    merge(cfg, file, config_path);
  }
  json from_flags = json::object();
  for (const auto& [k, v] : flags) from_flags[k] = parse_flag_value(k, v);
  merge(cfg, from_flags, "flags");

  int dim = cfg["dim"];
  int M = cfg["M"];
  if (dim != 2 && dim != 3) throw ConfigError("dim must be 2 or 3");
  if (!is_power_of_two(M) || M < 8) throw ConfigError("M must be a power of two >= 8");
  if (cfg["eps"].get<double>() <= 0.0) throw ConfigError("eps must be positive");
  if (cfg["seeds"].get<int>() < 1) throw ConfigError("seeds must be positive");
  return cfg;
}

double get_double(const json& cfg, const char* key) { return cfg.at(key).get<double>(); }
int get_int(const json& cfg, const char* key) { return cfg.at(key).get<int>(); }
std::uint64_t get_seed(const json& cfg, const char* key) {
  long long v = cfg.at(key).get<long long>();
  if (v < 0) throw ConfigError(std::string(key) + " must be nonnegative");
  return std::uint64_t(v);
}
bool get_bool(const json& cfg, const char* key) { return cfg.at(key).get<bool>(); }
std::string get_string(const json& cfg, const char* key) { return cfg.at(key).get<std::string>(); }
std::vector<int> get_int_list(const json& cfg, const char* key) { return cfg.at(key).get<std::vector<int>>(); }

std::vector<std::uint64_t> seed_list(const json& cfg) {
  std::uint64_t s0 = get_seed(cfg, "seed0");
  int n = get_int(cfg, "seeds");
  std::vector<std::uint64_t> out;
  for (int i = 0; i < n; ++i) out.push_back(s0 + std::uint64_t(i));
  return out;
}

std::string defaults_markdown() {
  std::ostringstream os;
  os << "| key | default | meaning |\n|---|---|---|\n";
  for (const auto& e : default_table()) {
    std::string doc;
    for (const char* c = e.doc; *c; ++c) doc += *c == '|' ? std::string("\\|") : std::string(1, *c);
    os << "| `" << e.key << "` | `" << e.value.dump() << "` | " << doc << " |\n";
  }
  return os.str();
}

}  // namespace andersonlab::cli
