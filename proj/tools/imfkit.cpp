// imfkit command-line front end: estimate, apply, sweep, stitch, synthgen.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "imfkit/imfkit.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

/// Bad flag values detected after parsing.
struct UsageError : imfkit::Error {
  using imfkit::Error::Error;
};

std::vector<std::string> channel_names(int channels) {
  if (channels == 1) return {"gray"};
  return {"r", "g", "b"};
}

void write_tables(const imfkit::ChannelTables& tables, const fs::path& dir) {
  fs::create_directories(dir);
  const auto names = channel_names(static_cast<int>(tables.size()));
  for (std::size_t c = 0; c < tables.size(); ++c)
    imfkit::save_table_csv(tables[c], dir / ("imf_" + names[c] + ".csv"));
  imfkit::save_tables_json(tables, dir / "imf.json");
}

/// Tables from a JSON bundle or from a directory of per-channel CSV files.
imfkit::ChannelTables read_tables(const fs::path& where, int channels) {
  if (fs::is_regular_file(where)) return imfkit::load_tables_json(where);
  if (!fs::is_directory(where))
    throw imfkit::IoError("table source not found: " + where.string());
  imfkit::ChannelTables tables;
  for (const auto& name : channel_names(channels))
    tables.push_back(imfkit::load_table_csv(where / ("imf_" + name + ".csv")));
  return tables;
}

json fusion_constants(const imfkit::FusionOptions& f, int width, int height) {
  return {{"well_exposed_sigma", f.well_exposed_sigma},
          {"measure_floor", f.measure_floor},
          {"pyramid_levels", imfkit::fusion_levels(width, height, f)},
          {"kernel", "binomial 1-4-6-4-1"}};
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto comma = s.find(',', pos);
    const std::string item = s.substr(pos, comma == std::string::npos ? s.npos : comma - pos);
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("not an integer list: '" + s + "'");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::vector<double> parse_real_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw UsageError("not a number list: '" + s + "'");
    }
  }
  return out;
}

// ---------------------------------------------------------------- estimate

struct EstimateArgs {
  std::string method = "wha";
  fs::path src;
  fs::path ref;
  fs::path out;
  int nc = 0;
  bool raw = false;
};

int run_estimate(const EstimateArgs& a) {
  const auto src = imfkit::decode_image(a.src);
  const auto ref = imfkit::decode_image(a.ref);
  if (!src.same_shape(ref)) throw imfkit::InvalidArgument("--src and --ref differ in shape");
  const auto [os, orf] = imfkit::simulate_overlap(src, ref, a.nc);
  const auto method = imfkit::parse_method(a.method);
  const auto tables = a.raw ? imfkit::estimate_raw(method, os, orf)
                            : imfkit::estimate_complete(method, os, orf, a.nc);
  write_tables(tables, a.out);
  return kExitOk;
}

// ------------------------------------------------------------------- apply

struct ApplyArgs {
  fs::path tables;
  fs::path in;
  fs::path out;
};

int run_apply(const ApplyArgs& a) {
  const auto img = imfkit::decode_image(a.in);
  const auto tables = read_tables(a.tables, img.channels());
  imfkit::encode_png(imfkit::apply_imf(img, tables), a.out);
  return kExitOk;
}

// ------------------------------------------------------------------- sweep

struct SweepArgs {
  fs::path dir;
  fs::path out;
  fs::path summary;
  std::string nc_list = "0,2,4,6,8,10,12,14,16";
  std::string methods = "wha,chm,gc";
  bool no_ssim = false;
};

/// Pairs are files named <name>_a.<ext> and <name>_b.<ext>, sorted by name.
std::vector<imfkit::PairInput> discover_pairs(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw UsageError("not a directory: " + dir.string());
  std::map<std::string, fs::path> a_files;
  std::map<std::string, fs::path> b_files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = entry.path().extension().string();
    if (ext != ".png" && ext != ".jpg" && ext != ".jpeg") continue;
    const auto stem = entry.path().stem().string();
    if (stem.size() < 3) continue;
    const auto tail = stem.substr(stem.size() - 2);
    if (tail == "_a") a_files[stem.substr(0, stem.size() - 2)] = entry.path();
    if (tail == "_b") b_files[stem.substr(0, stem.size() - 2)] = entry.path();
  }
  std::vector<imfkit::PairInput> pairs;
  for (const auto& [name, a] : a_files) {
    const auto b = b_files.find(name);
    if (b == b_files.end()) continue;
    pairs.push_back({name, imfkit::decode_image(a), imfkit::decode_image(b->second)});
  }
  if (pairs.empty())
    throw imfkit::InvalidArgument("no <name>_a / <name>_b image pairs in " + dir.string());
  return pairs;
}

int run_sweep(const SweepArgs& a) {
  imfkit::SweepOptions opts;
  opts.nc_list = parse_int_list(a.nc_list);
  opts.methods.clear();
  std::stringstream ss(a.methods);
  for (std::string m; std::getline(ss, m, ',');) {
    try {
      opts.methods.push_back(imfkit::parse_method(m));
    } catch (const imfkit::InvalidArgument& e) {
      throw UsageError(e.what());
    }
  }
  opts.threads = imfkit::threads_from_env();
  opts.with_ssim = !a.no_ssim;

  const auto pairs = discover_pairs(a.dir);
  const auto rows = imfkit::run_sweep(pairs, opts);

  std::string text = std::string(imfkit::kEvalCsvHeader) + "\n";
  for (const auto& r : rows) text += imfkit::to_csv_row(r.record) + "\n";
  imfkit::write_text(a.out, text);

  const auto means = imfkit::aggregate(rows);
  std::string summary = std::string(imfkit::kEvalCsvHeader) + "\n";
  for (const auto& r : means) summary += imfkit::to_csv_row(r) + "\n";
  fs::path summary_path = a.summary;
  if (summary_path.empty())
    summary_path = a.out.parent_path() / (a.out.stem().string() + "_summary.csv");
  imfkit::write_text(summary_path, summary);
  std::cout << summary;
  return kExitOk;
}

// ------------------------------------------------------------------ stitch

struct StitchArgs {
  fs::path spec;
  fs::path out;
  fs::path manifest;
  bool no_intermediates = false;
};

int run_stitch(const StitchArgs& a) {
  imfkit::StitchSpec spec;
  try {
    spec = imfkit::load_stitch_spec(a.spec);
  } catch (const imfkit::InvalidArgument& e) {
    throw UsageError(e.what());
  }
  const imfkit::FusionOptions fusion;
  const auto result = imfkit::stitch_hdr(spec, fusion);
  fs::create_directories(a.out);
  imfkit::encode_png(result.fused, a.out / "fused.png");

  json outputs = json::array({"fused.png"});
  if (!a.no_intermediates) {
    for (std::size_t l = 0; l < result.panos.size(); ++l) {
      const auto name = "benchmark_" + std::to_string(l) + ".png";
      imfkit::encode_png(result.panos[l], a.out / name);
      outputs.push_back(name);
    }
    fs::create_directories(a.out / "tables");
    for (std::size_t l = 0; l < result.chain.size(); ++l) {
      const auto fwd = "tables/imf_" + std::to_string(l) + "_to_" + std::to_string(l + 1) + ".json";
      const auto bwd = "tables/imf_" + std::to_string(l + 1) + "_to_" + std::to_string(l) + ".json";
      imfkit::save_tables_json(result.chain[l].forward, a.out / fwd);
      imfkit::save_tables_json(result.chain[l].backward, a.out / bwd);
      outputs.push_back(fwd);
      outputs.push_back(bwd);
    }
  }

  fs::path manifest = a.manifest;
  if (manifest.empty() && !a.no_intermediates) manifest = a.out / "manifest.json";
  if (!manifest.empty()) {
    json m;
    m["tool"] = "imfkit";
    m["version"] = IMFKIT_VERSION;
    m["command"] = "stitch";
    m["spec"] = imfkit::stitch_spec_to_json(spec);
    m["constants"] = {
        {"levels", imfkit::kLevels},
        {"estimator", "wha"},
        {"completion", "linear interpolation/extrapolation, clamped to [0,255]"},
        {"quantization", "round half up, once at application"},
        {"min_overlap_area", imfkit::kMinOverlapArea},
        {"seam", "linear feather centred in each overlap"},
        {"fusion", fusion_constants(fusion, result.fused.width(), result.fused.height())}};
    m["outputs"] = outputs;
    m["timings"] = {{"estimate_seconds", result.estimate_seconds},
                    {"synthesize_seconds", result.synthesize_seconds},
                    {"fuse_seconds", result.fuse_seconds}};
    imfkit::write_text(manifest, m.dump(2) + "\n");
  }
  return kExitOk;
}

// ---------------------------------------------------------------- synthgen

struct SynthArgs {
  std::uint64_t seed = 1;
  int count = 1;
  std::string kind = "pair";
  std::string curve = "gamma";
  double param = 0.0;  // 0 picks the curve's default
  double noise = 0.5;
  int size = 256;
  int grain = 2;
  double dark_max = 255.0;
  std::string gains = "0.5,1,2";
  fs::path out;
};

double default_param(imfkit::synth::CurveKind k) {
  using imfkit::synth::CurveKind;
  switch (k) {
    case CurveKind::gamma: return 0.5;
    case CurveKind::sigmoid: return 32.0;
    case CurveKind::shift: return 40.0;
    case CurveKind::affine: return 2.0;
  }
  return 1.0;
}

std::string numbered(const std::string& prefix, int i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%04d", prefix.c_str(), i);
  return buf;
}

int run_synthgen(const SynthArgs& a) {
  namespace synth = imfkit::synth;
  if (a.count < 1) throw UsageError("--count must be positive");
  if (a.size < 16) throw UsageError("--size must be at least 16");
  fs::create_directories(a.out);
  synth::Rng rng(a.seed);
  json manifest = {{"tool", "imfkit"}, {"version", IMFKIT_VERSION}, {"command", "synthgen"},
                   {"seed", a.seed}, {"count", a.count}, {"kind", a.kind},
                   {"noise", a.noise}, {"grain", a.grain}};
  if (a.kind == "pair") {
    synth::CurveKind kind;
    try {
      kind = synth::parse_curve(a.curve);
    } catch (const imfkit::InvalidArgument& e) {
      throw UsageError(e.what());
    }
    const double param = a.param != 0.0 ? a.param : default_param(kind);
    const auto curve = synth::make_curve(kind, param);
    synth::PairOptions po;
    po.hi = a.dark_max;
    po.noise = a.noise;
    for (int i = 0; i < a.count; ++i) {
      synth::SceneOptions so;
      so.width = so.height = a.size;
      so.grain = a.grain;
      const auto scene = synth::make_scene(so, rng);
      const auto pair = synth::make_pair(scene, curve, po, rng);
      const auto name = numbered("pair", i);
      imfkit::encode_png(pair.dark, a.out / (name + "_a.png"));
      imfkit::encode_png(pair.bright, a.out / (name + "_b.png"));
      imfkit::save_table_csv(pair.curve, a.out / (name + "_curve.csv"));
    }
    manifest["curve"] = a.curve;
    manifest["param"] = param;
    manifest["size"] = a.size;
    manifest["dark_max"] = a.dark_max;
  } else if (a.kind == "stitch") {
    synth::StitchOptions so;
    so.gains = parse_real_list(a.gains);
    so.noise = a.noise;
    so.grain = a.grain;
    if (so.gains.size() < 2) throw UsageError("--gains needs at least two exposures");
    for (int i = 0; i < a.count; ++i) {
      const int n = static_cast<int>(so.gains.size());
      synth::SceneOptions sc;
      sc.width = (n - 1) * (so.tile_width - so.overlap) + so.tile_width;
      sc.height = so.height;
      sc.grain = a.grain;
      auto scene = synth::make_scene(sc, rng);
      for (auto& ch : scene.channels)
        for (auto& v : ch) v = 0.02 + 0.9 * v;
      const auto set = synth::make_stitch_set(scene, so, rng);
      const fs::path dir = a.count == 1 ? a.out : a.out / numbered("stitch", i);
      fs::create_directories(dir);
      imfkit::StitchSpec spec;
      spec.feather = 16;
      for (int l = 0; l < n; ++l) {
        const auto name = "sub" + std::to_string(l) + ".png";
        imfkit::encode_png(set.images[l], dir / name);
        spec.inputs.push_back(name);
        if (l + 1 < n) {
          spec.overlaps.push_back({set.a_rects[l], set.b_rects[l]});
          imfkit::save_table_csv(
              synth::exposure_curve(so.gains[l], so.gains[l + 1]),
              dir / ("curve_" + std::to_string(l) + "_to_" + std::to_string(l + 1) + ".csv"));
        }
      }
      imfkit::write_text(dir / "spec.json", imfkit::stitch_spec_to_json(spec).dump(2) + "\n");
    }
    manifest["gains"] = so.gains;
  } else {
    throw UsageError("--kind must be pair or stitch");
  }
  imfkit::write_text(a.out / "synthgen.json", manifest.dump(2) + "\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"imfkit: intensity mapping functions between differently exposed images"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(IMFKIT_VERSION));

  EstimateArgs est;
  auto* cmd_est = app.add_subcommand("estimate", "Estimate per-channel IMF tables src -> ref");
  cmd_est->add_option("--method", est.method, "wha, chm or gc")
      ->check(CLI::IsMember({"wha", "chm", "gc"}));
  cmd_est->add_option("--src", est.src, "Image to be corrected")->required();
  cmd_est->add_option("--ref", est.ref, "Reference exposure")->required();
  cmd_est->add_option("--out", est.out, "Output directory")->required();
  cmd_est->add_option("--nc", est.nc, "Simulated misalignment in pixels")->check(CLI::NonNegativeNumber);
  cmd_est->add_flag("--raw", est.raw, "Write raw tables without filling empty bins");

  ApplyArgs app_args;
  auto* cmd_apply = app.add_subcommand("apply", "Map an image through IMF tables");
  cmd_apply->add_option("--tables", app_args.tables, "imf.json file or directory of imf_*.csv")->required();
  cmd_apply->add_option("--in", app_args.in, "Input image")->required();
  cmd_apply->add_option("--out", app_args.out, "Output PNG")->required();

  SweepArgs sw;
  auto* cmd_sweep = app.add_subcommand("sweep", "Simulated-misalignment evaluation over image pairs");
  cmd_sweep->add_option("--dir", sw.dir, "Directory of <name>_a / <name>_b pairs")->required();
  cmd_sweep->add_option("--out", sw.out, "Records CSV")->required();
  cmd_sweep->add_option("--summary", sw.summary, "Per (method, n_c) means CSV");
  cmd_sweep->add_option("--nc-list", sw.nc_list, "Comma-separated n_c values");
  cmd_sweep->add_option("--methods", sw.methods, "Comma-separated estimators");
  cmd_sweep->add_flag("--no-ssim", sw.no_ssim, "Skip SSIM (reported as 0)");

  StitchArgs st;
  auto* cmd_stitch = app.add_subcommand("stitch", "Differently exposed panoramas fused into one image");
  cmd_stitch->add_option("--spec", st.spec, "Stitch spec JSON")->required();
  cmd_stitch->add_option("--out", st.out, "Output directory")->required();
  cmd_stitch->add_option("--manifest", st.manifest, "Run manifest path");
  cmd_stitch->add_flag("--no-intermediates", st.no_intermediates, "Write only fused.png");

  SynthArgs sy;
  auto* cmd_synth = app.add_subcommand("synthgen", "Generate synthetic exposure pairs or stitch sets");
  cmd_synth->add_option("--seed", sy.seed, "Random seed")->required();
  cmd_synth->add_option("--count", sy.count, "Number of pairs / sets");
  cmd_synth->add_option("--kind", sy.kind, "pair or stitch")->check(CLI::IsMember({"pair", "stitch"}));
  cmd_synth->add_option("--curve", sy.curve, "gamma, sigmoid, shift or affine")
      ->check(CLI::IsMember({"gamma", "sigmoid", "shift", "affine"}));
  cmd_synth->add_option("--param", sy.param, "Curve parameter (gamma, slope, offset, gain)");
  cmd_synth->add_option("--noise", sy.noise, "Gaussian noise sigma in levels")->check(CLI::NonNegativeNumber);
  cmd_synth->add_option("--size", sy.size, "Pair image side in pixels");
  cmd_synth->add_option("--grain", sy.grain, "Texture blur radius")->check(CLI::NonNegativeNumber);
  cmd_synth->add_option("--dark-max", sy.dark_max, "Upper level of the dark exposure")->check(CLI::Range(1.0, 255.0));
  cmd_synth->add_option("--gains", sy.gains, "Exposure gains for --kind stitch");
  cmd_synth->add_option("--out", sy.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*cmd_est) return run_estimate(est);
    if (*cmd_apply) return run_apply(app_args);
    if (*cmd_sweep) return run_sweep(sw);
    if (*cmd_stitch) return run_stitch(st);
    if (*cmd_synth) return run_synthgen(sy);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
