// Command-line harness: synthetic compressive-imaging experiments,
// reconstruction from saved measurements, and directory benchmarks.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "turbocs/config.hpp"
#include "turbocs/image_io.hpp"
#include "turbocs/measurement.hpp"
#include "turbocs/turbo.hpp"
#include "turbocs/wavelet.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kGeneratorName = "mt19937_64/box-muller";
constexpr const char* kCsvHeader =
    "image_id,m,model,nmse_db,turbo_iters,total_amp_iters,wall_time_s,seed";

struct CommonOptions {
  std::string input;
  std::string out_dir = ".";
  std::string config_path;
  std::vector<std::string> models;
  int m = 0;
  double sigma2 = 0.0;
  std::uint64_t seed = 1;
  int levels = 4;
  bool crop = false;
  bool trace = false;
  int max_turbo = 0;  // 0: keep config default
  int max_amp = 0;
};

struct MetricsRow {
  std::string image_id;
  int m = 0;
  std::string model;
  double nmse_db = 0.0;
  bool has_nmse = false;
  int turbo_iters = 0;
  int total_amp_iters = 0;
  double wall_time_s = 0.0;
  std::uint64_t seed = 0;
};

std::string format_row(const MetricsRow& r) {
  char buf[64];
  std::string nmse = "nan";
  if (r.has_nmse) {
    std::snprintf(buf, sizeof(buf), "%.2f", r.nmse_db);
    nmse = buf;
  }
  std::snprintf(buf, sizeof(buf), "%.3f", r.wall_time_s);
  return r.image_id + "," + std::to_string(r.m) + "," + r.model + "," + nmse + "," +
         std::to_string(r.turbo_iters) + "," + std::to_string(r.total_amp_iters) + "," + buf +
         "," + std::to_string(r.seed);
}

void write_csv(const std::string& path, const std::vector<MetricsRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << kCsvHeader << "\n";
  for (const auto& r : rows) out << format_row(r) << "\n";
}

turbocs::TurboConfig load_config(const turbocs::QuadTreeIndex& tree, const CommonOptions& opt,
                                 const std::string& model) {
  turbocs::KeyValueMap kv;
  if (!opt.config_path.empty()) kv = turbocs::parse_kv_file(opt.config_path);
  turbocs::apply_env_overrides(kv);
  kv["model"] = model;
  turbocs::TurboConfig cfg = turbocs::make_config(tree, kv);
  cfg.seed = opt.seed;
  if (opt.max_turbo > 0) cfg.max_turbo = opt.max_turbo;
  if (opt.max_amp > 0) cfg.max_amp = opt.max_amp;
  return cfg;
}

void write_trace(const std::string& path, const turbocs::ReconstructionReport& report) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  int t = 0;
  for (const auto& round : report.rounds) {
    json rec;
    rec["turbo_iter"] = ++t;
    rec["amp_iters"] = round.amp_iters;
    rec["delta_mu"] = round.delta_mu;
    rec["c"] = round.c;
    rec["sigma2_noise"] = round.sigma2_noise;
    rec["level_variances"] = round.level_variances;
    if (!round.level_variances_small.empty()) {
      rec["level_variances_small"] = round.level_variances_small;
    }
    rec["k_counts"] = round.k_counts;
    rec["pi_root"] = round.hmt.pi_root;
    rec["pi_approx"] = round.hmt.pi_approx;
    rec["pi11"] = round.hmt.pi11;
    rec["pi00"] = round.hmt.pi00;
    out << rec.dump() << "\n";
  }
}

void save_measurements(const std::string& path, const turbocs::MeasurementOperator& op,
                       const turbocs::Observation& obs, std::uint64_t noise_seed) {
  json doc;
  doc["format"] = "turbocs-measurements-v1";
  doc["operator"] = {{"kind", "gaussian"}, {"m", op.m},          {"n", op.n},
                     {"side", op.side},    {"levels", op.levels}, {"seed", op.seed},
                     {"generator", kGeneratorName}};
  doc["sigma2"] = obs.sigma2;
  doc["noise_seed"] = noise_seed;
  doc["y"] = std::vector<double>(obs.y.data(), obs.y.data() + obs.y.size());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << doc.dump(2) << "\n";
}

int total_amp_iters(const turbocs::ReconstructionReport& report) {
  int total = 0;
  for (int k : report.amp_iters_per_turbo) total += k;
  return total;
}

MetricsRow run_one_model(const std::string& image_id, const turbocs::Observation& obs,
                         const turbocs::MeasurementOperator& op,
                         const turbocs::QuadTreeIndex& tree, const CommonOptions& opt,
                         const std::string& model, const std::optional<Eigen::MatrixXd>& truth,
                         const std::string& out_prefix) {
  const turbocs::TurboConfig cfg = load_config(tree, opt, model);
  const turbocs::ReconstructionReport report = turbocs::reconstruct(obs, op, tree, cfg, truth);
  if (report.diverged) {
    std::cerr << "warning: " << image_id << " [" << model
              << "]: " << report.divergence_message << "\n";
  }
  if (!out_prefix.empty()) {
    turbocs::save_pgm(report.image_hat, out_prefix + "_" + model + ".pgm");
    if (opt.trace) write_trace(out_prefix + "_" + model + "_trace.jsonl", report);
  }
  MetricsRow row;
  row.image_id = image_id;
  row.m = op.m;
  row.model = model;
  row.has_nmse = report.nmse_db.has_value();
  row.nmse_db = report.nmse_db.value_or(0.0);
  row.turbo_iters = report.turbo_iters;
  row.total_amp_iters = total_amp_iters(report);
  row.wall_time_s = report.wall_time_s;
  row.seed = opt.seed;
  return row;
}

std::vector<std::string> resolve_models(const CommonOptions& opt) {
  if (opt.models.empty()) return {"bg", "gm"};
  for (const auto& m : opt.models) {
    if (m != "bg" && m != "gm") {
      throw CLI::ValidationError("--model must be 'bg' or 'gm', got '" + m + "'");
    }
  }
  return opt.models;
}

int cmd_synth(const CommonOptions& opt, bool save_meas) {
  const Eigen::MatrixXd image = turbocs::load_pgm(opt.input, opt.crop);
  const int side = static_cast<int>(image.rows());
  const int n = side * side;
  if (opt.m < 1 || opt.m > n) {
    throw std::runtime_error("m must be in [1, " + std::to_string(n) + "] for a " +
                             std::to_string(side) + "x" + std::to_string(side) + " image");
  }
  const turbocs::QuadTreeIndex tree = turbocs::build_tree_index(side, opt.levels);
  const turbocs::MeasurementOperator op =
      turbocs::gen_wavelet_operator(opt.m, side, opt.levels, opt.seed);
  const std::uint64_t noise_seed = opt.seed + 1;
  const turbocs::Observation obs = turbocs::measure(op, image, opt.sigma2, noise_seed);

  fs::create_directories(opt.out_dir);
  const std::string image_id = fs::path(opt.input).stem().string();
  if (save_meas) {
    save_measurements(opt.out_dir + "/" + image_id + "_measurements.json", op, obs, noise_seed);
  }

  std::vector<MetricsRow> rows;
  for (const std::string& model : resolve_models(opt)) {
    rows.push_back(run_one_model(image_id, obs, op, tree, opt, model, image,
                                 opt.out_dir + "/" + image_id));
  }
  write_csv(opt.out_dir + "/metrics.csv", rows);
  for (const auto& r : rows) std::cout << format_row(r) << "\n";
  return 0;
}

int cmd_reconstruct(const CommonOptions& opt) {
  std::ifstream in(opt.input);
  if (!in) throw std::runtime_error("cannot open " + opt.input);
  json doc = json::parse(in);
  if (doc.value("format", "") != "turbocs-measurements-v1") {
    throw std::runtime_error(opt.input + ": not a turbocs measurements file");
  }
  const auto& jop = doc.at("operator");
  const std::string generator = jop.value("generator", "");
  if (generator != kGeneratorName) {
    throw std::runtime_error("unsupported generator '" + generator + "' (expected " +
                             std::string(kGeneratorName) + ")");
  }
  const int side = jop.at("side").get<int>();
  const int levels = jop.at("levels").get<int>();
  const turbocs::MeasurementOperator op = turbocs::gen_wavelet_operator(
      jop.at("m").get<int>(), side, levels, jop.at("seed").get<std::uint64_t>());

  turbocs::Observation obs;
  obs.sigma2 = doc.value("sigma2", 0.0);
  const std::vector<double> y = doc.at("y").get<std::vector<double>>();
  if (static_cast<int>(y.size()) != op.m) {
    throw std::runtime_error("measurement vector length does not match operator m");
  }
  obs.y = Eigen::Map<const Eigen::VectorXd>(y.data(), y.size());

  const turbocs::QuadTreeIndex tree = turbocs::build_tree_index(side, levels);
  CommonOptions local = opt;
  local.levels = levels;
  local.seed = jop.at("seed").get<std::uint64_t>();

  fs::create_directories(opt.out_dir);
  const std::string image_id = fs::path(opt.input).stem().string();
  std::vector<MetricsRow> rows;
  for (const std::string& model : resolve_models(local)) {
    rows.push_back(run_one_model(image_id, obs, op, tree, local, model, std::nullopt,
                                 opt.out_dir + "/" + image_id));
  }
  write_csv(opt.out_dir + "/metrics.csv", rows);
  for (const auto& r : rows) std::cout << format_row(r) << "\n";
  return 0;
}

int cmd_benchmark(const CommonOptions& opt, int jobs) {
  std::vector<fs::path> files;
  if (!fs::is_directory(opt.input)) {
    throw std::runtime_error(opt.input + " is not a directory");
  }
  for (const auto& entry : fs::directory_iterator(opt.input)) {
    if (entry.is_regular_file() && entry.path().extension() == ".pgm") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw std::runtime_error("no .pgm files in " + opt.input);

  const std::vector<std::string> models = resolve_models(opt);
  fs::create_directories(opt.out_dir);

  struct Job {
    fs::path path;
    Eigen::MatrixXd image;
  };
  std::vector<Job> jobs_list;
  // Pre-build one operator per distinct image size; images load serially so
  // unreadable files produce warnings in a stable order.
  std::map<int, turbocs::MeasurementOperator> ops;
  std::map<int, turbocs::QuadTreeIndex> trees;
  for (const auto& path : files) {
    try {
      Eigen::MatrixXd image = turbocs::load_pgm(path.string(), opt.crop);
      const int side = static_cast<int>(image.rows());
      const int n = side * side;
      if (opt.m < 1 || opt.m > n) {
        throw std::runtime_error("m=" + std::to_string(opt.m) + " out of range for side " +
                                 std::to_string(side));
      }
      if (!ops.count(side)) {
        ops.emplace(side, turbocs::gen_wavelet_operator(opt.m, side, opt.levels, opt.seed));
        trees.emplace(side, turbocs::build_tree_index(side, opt.levels));
      }
      jobs_list.push_back({path, std::move(image)});
    } catch (const std::exception& e) {
      std::cerr << "warning: skipping " << path << ": " << e.what() << "\n";
    }
  }
  if (jobs_list.empty()) throw std::runtime_error("all input images failed to load");

  const auto run_image = [&](size_t idx) {
    const Job& job = jobs_list[idx];
    const int side = static_cast<int>(job.image.rows());
    const auto& op = ops.at(side);
    const auto& tree = trees.at(side);
    CommonOptions local = opt;
    const turbocs::Observation obs =
        turbocs::measure(op, job.image, opt.sigma2, opt.seed + 1 + idx);
    std::vector<MetricsRow> rows;
    for (const std::string& model : models) {
      rows.push_back(run_one_model(job.path.stem().string(), obs, op, tree, local, model,
                                   job.image, ""));
    }
    return rows;
  };

  std::vector<std::vector<MetricsRow>> per_image(jobs_list.size());
  if (jobs <= 1) {
    for (size_t i = 0; i < jobs_list.size(); ++i) per_image[i] = run_image(i);
  } else {
    std::vector<std::future<void>> pending;
    std::atomic<size_t> next{0};
    for (int w = 0; w < jobs; ++w) {
      pending.push_back(std::async(std::launch::async, [&] {
        for (size_t i = next.fetch_add(1); i < jobs_list.size(); i = next.fetch_add(1)) {
          per_image[i] = run_image(i);
        }
      }));
    }
    for (auto& f : pending) f.get();
  }

  std::vector<MetricsRow> rows;
  for (const auto& image_rows : per_image) {
    rows.insert(rows.end(), image_rows.begin(), image_rows.end());
  }
  // One summary row per model: mean NMSE and mean runtime, image_id "MEAN".
  for (const std::string& model : models) {
    MetricsRow mean;
    mean.image_id = "MEAN";
    mean.m = opt.m;
    mean.model = model;
    mean.seed = opt.seed;
    int count = 0;
    for (const auto& r : rows) {
      if (r.model != model) continue;
      mean.nmse_db += r.nmse_db;
      mean.wall_time_s += r.wall_time_s;
      mean.turbo_iters += r.turbo_iters;
      mean.total_amp_iters += r.total_amp_iters;
      ++count;
    }
    mean.has_nmse = count > 0;
    if (count > 0) {
      mean.nmse_db /= count;
      mean.wall_time_s /= count;
    }
    rows.push_back(mean);
  }
  write_csv(opt.out_dir + "/benchmark.csv", rows);
  for (const auto& r : rows) std::cout << format_row(r) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Turbo-AMP compressive imaging"};
  app.require_subcommand(1);

  CommonOptions opt;
  bool save_meas = false;
  int jobs = 1;

  const auto add_common = [&](CLI::App* cmd, bool needs_m) {
    cmd->add_option("--input", opt.input, "input path")->required();
    cmd->add_option("--out", opt.out_dir, "output directory");
    cmd->add_option("--config", opt.config_path, "key=value config file");
    cmd->add_option("--model", opt.models, "model: bg or gm (repeatable; default both)");
    cmd->add_option("--seed", opt.seed, "operator seed");
    cmd->add_option("--sigma2", opt.sigma2, "measurement noise variance");
    cmd->add_option("--levels", opt.levels, "wavelet levels J");
    cmd->add_flag("--crop", opt.crop, "center-crop to a power-of-two square");
    cmd->add_flag("--trace", opt.trace, "write per-round trace files");
    cmd->add_option("--max-turbo", opt.max_turbo, "override turbo iteration cap");
    cmd->add_option("--max-amp", opt.max_amp, "override AMP iteration cap");
    if (needs_m) cmd->add_option("--m", opt.m, "measurement count")->required();
  };

  CLI::App* synth = app.add_subcommand("synth", "measure a PGM image and reconstruct it");
  add_common(synth, true);
  synth->add_flag("--save-measurements", save_meas, "persist operator header and y");

  CLI::App* recon = app.add_subcommand("reconstruct", "reconstruct from saved measurements");
  add_common(recon, false);

  CLI::App* bench = app.add_subcommand("benchmark", "run a directory of PGM images");
  add_common(bench, true);
  bench->add_option("--jobs", jobs, "parallel image-level workers");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // usage errors exit 1
  }

  try {
    if (synth->parsed()) return cmd_synth(opt, save_meas);
    if (recon->parsed()) return cmd_reconstruct(opt);
    if (bench->parsed()) return cmd_benchmark(opt, jobs);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
