#include "turbocs/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace turbocs {

namespace {

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "model",        "max_turbo",    "turbo_tol",     "max_amp",       "amp_tol",
      "c_init_factor", "llr_clamp",   "seed",          "noise_a",       "noise_b",
      "level_a",      "level_b",      "level_a_large", "level_b_large", "level_a_small",
      "level_b_small", "root_c",      "root_d",        "approx_c",      "approx_d",
      "trans11_c",    "trans11_d",    "trans00_c",     "trans00_d",     "flat_a",
      "flat_b",       "flat_c",       "flat_d"};
  return keys;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_list(const std::string& value, size_t expected, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(trim(item)));
  if (out.size() != expected) {
    throw std::runtime_error("config: key '" + key + "' needs " + std::to_string(expected) +
                             " comma-separated values, got " + std::to_string(out.size()));
  }
  return out;
}

std::string join(const std::vector<double>& v) {
  std::ostringstream os;
  os.precision(17);
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) os << ",";
    os << v[i];
  }
  return os.str();
}

}  // namespace

KeyValueMap parse_kv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  KeyValueMap kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("config: " + path + ":" + std::to_string(lineno) +
                               ": expected key=value");
    }
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

void apply_env_overrides(KeyValueMap& kv) {
  for (const auto& key : known_keys()) {
    std::string env_name = "TURBOCS_";
    for (char c : key) env_name.push_back(static_cast<char>(std::toupper(c)));
    if (const char* value = std::getenv(env_name.c_str())) {
      kv[key] = value;
    }
  }
}

TurboConfig make_config(const QuadTreeIndex& tree, const KeyValueMap& kv) {
  TurboConfig cfg;
  cfg.hyper = default_hyperparams(tree);

  for (const auto& [key, raw] : kv) {
    const std::string& v = raw;
    const size_t n_levels = static_cast<size_t>(tree.n_levels) + 1;
    const size_t n_trans = static_cast<size_t>(std::max(tree.n_levels - 1, 0));
    if (key == "model") {
      if (v == "bg") cfg.model = Model::bg;
      else if (v == "gm") cfg.model = Model::gm;
      else throw std::runtime_error("config: model must be 'bg' or 'gm'");
    } else if (key == "max_turbo") cfg.max_turbo = std::stoi(v);
    else if (key == "turbo_tol") cfg.turbo_tol = std::stod(v);
    else if (key == "max_amp") cfg.max_amp = std::stoi(v);
    else if (key == "amp_tol") cfg.amp_tol = std::stod(v);
    else if (key == "c_init_factor") cfg.c_init_factor = std::stod(v);
    else if (key == "llr_clamp") cfg.llr_clamp = std::stod(v);
    else if (key == "seed") cfg.seed = std::stoull(v);
    else if (key == "noise_a") cfg.hyper.noise_a = std::stod(v);
    else if (key == "noise_b") cfg.hyper.noise_b = std::stod(v);
    else if (key == "level_a") cfg.hyper.level_a = parse_list(v, n_levels, key);
    else if (key == "level_b") cfg.hyper.level_b = parse_list(v, n_levels, key);
    else if (key == "level_a_large") cfg.hyper.level_a_large = parse_list(v, n_levels, key);
    else if (key == "level_b_large") cfg.hyper.level_b_large = parse_list(v, n_levels, key);
    else if (key == "level_a_small") cfg.hyper.level_a_small = parse_list(v, n_levels, key);
    else if (key == "level_b_small") cfg.hyper.level_b_small = parse_list(v, n_levels, key);
    else if (key == "root_c") cfg.hyper.root_c = std::stod(v);
    else if (key == "root_d") cfg.hyper.root_d = std::stod(v);
    else if (key == "approx_c") cfg.hyper.approx_c = std::stod(v);
    else if (key == "approx_d") cfg.hyper.approx_d = std::stod(v);
    else if (key == "trans11_c") cfg.hyper.trans11_c = parse_list(v, n_trans, key);
    else if (key == "trans11_d") cfg.hyper.trans11_d = parse_list(v, n_trans, key);
    else if (key == "trans00_c") cfg.hyper.trans00_c = parse_list(v, n_trans, key);
    else if (key == "trans00_d") cfg.hyper.trans00_d = parse_list(v, n_trans, key);
    else if (key == "flat_a") cfg.flat_a = std::stod(v);
    else if (key == "flat_b") cfg.flat_b = std::stod(v);
    else if (key == "flat_c") cfg.flat_c = std::stod(v);
    else if (key == "flat_d") cfg.flat_d = std::stod(v);
    else throw std::runtime_error("config: unknown key '" + key + "'");
  }
  if (cfg.max_turbo < 1 || cfg.max_amp < 1) {
    throw std::runtime_error("config: iteration caps must be >= 1");
  }
  if (cfg.turbo_tol <= 0 || cfg.amp_tol <= 0) {
    throw std::runtime_error("config: tolerances must be > 0");
  }
  return cfg;
}

std::string format_config(const TurboConfig& cfg) {
  std::ostringstream os;
  os.precision(17);
  os << "model=" << (cfg.model == Model::bg ? "bg" : "gm") << "\n";
  os << "max_turbo=" << cfg.max_turbo << "\n";
  os << "turbo_tol=" << cfg.turbo_tol << "\n";
  os << "max_amp=" << cfg.max_amp << "\n";
  os << "amp_tol=" << cfg.amp_tol << "\n";
  os << "c_init_factor=" << cfg.c_init_factor << "\n";
  os << "llr_clamp=" << cfg.llr_clamp << "\n";
  os << "seed=" << cfg.seed << "\n";
  os << "noise_a=" << cfg.hyper.noise_a << "\n";
  os << "noise_b=" << cfg.hyper.noise_b << "\n";
  os << "level_a=" << join(cfg.hyper.level_a) << "\n";
  os << "level_b=" << join(cfg.hyper.level_b) << "\n";
  os << "level_a_large=" << join(cfg.hyper.level_a_large) << "\n";
  os << "level_b_large=" << join(cfg.hyper.level_b_large) << "\n";
  os << "level_a_small=" << join(cfg.hyper.level_a_small) << "\n";
  os << "level_b_small=" << join(cfg.hyper.level_b_small) << "\n";
  os << "root_c=" << cfg.hyper.root_c << "\n";
  os << "root_d=" << cfg.hyper.root_d << "\n";
  os << "approx_c=" << cfg.hyper.approx_c << "\n";
  os << "approx_d=" << cfg.hyper.approx_d << "\n";
  os << "trans11_c=" << join(cfg.hyper.trans11_c) << "\n";
  os << "trans11_d=" << join(cfg.hyper.trans11_d) << "\n";
  os << "trans00_c=" << join(cfg.hyper.trans00_c) << "\n";
  os << "trans00_d=" << join(cfg.hyper.trans00_d) << "\n";
  return os.str();
}

}  // namespace turbocs
