// Copyright 2026 The endogeo Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <ostream>

#include <CLI11.hpp>

#include "endogeo/calibration_io.hpp"
#include "endogeo/cli.hpp"
#include "endogeo/depth_pipeline.hpp"
#include "endogeo/drift_correction.hpp"
#include "endogeo/error.hpp"
#include "endogeo/losses.hpp"
#include "endogeo/metrics.hpp"
#include "endogeo/raster_io.hpp"
#include "endogeo/sim.hpp"
#include "endogeo/trajectory.hpp"

namespace endogeo::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Shared helpers

bool wildcard_match(std::string_view pattern, std::string_view text) {
  std::size_t p = 0, t = 0, star = std::string_view::npos, mark = 0;
  while (t < text.size()) {
    if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == text[t])) {
      ++p;
      ++t;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = t;
    } else if (star != std::string_view::npos) {
      p = star + 1;
      t = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

// Expands `*` and `?` in the file-name component; other paths pass through.
std::vector<std::string> expand_paths(const std::vector<std::string>& patterns) {
  std::vector<std::string> out;
  for (const auto& pattern : patterns) {
    const fs::path p(pattern);
    const std::string name = p.filename().string();
    if (name.find_first_of("*?") == std::string::npos) {
      out.push_back(pattern);
      continue;
    }
    const fs::path dir = p.has_parent_path() ? p.parent_path() : fs::path(".");
    std::vector<std::string> hits;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
      if (entry.is_regular_file() && wildcard_match(name, entry.path().filename().string())) {
        hits.push_back(entry.path().string());
      }
    }
    if (ec) throw Error(ErrorCode::kIo, "cannot list directory " + dir.string());
    if (hits.empty()) throw Error(ErrorCode::kIo, "no files match " + pattern);
    std::sort(hits.begin(), hits.end());
    out.insert(out.end(), hits.begin(), hits.end());
  }
  return out;
}

std::vector<std::string> list_files(const std::string& dir, const std::string& extension) {
  std::error_code ec;
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == extension) {
      names.push_back(entry.path().filename().string());
    }
  }
  if (ec) throw Error(ErrorCode::kIo, "cannot list directory " + dir);
  std::sort(names.begin(), names.end());
  return names;
}

void ensure_parent(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

void write_json(const std::string& path, const json& j) {
  ensure_parent(path);
  write_binary_file(path, j.dump(2) + "\n");
}

void emit_json(const std::string& path, const json& j, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << j.dump(2) << "\n";
  } else {
    write_json(path, j);
  }
}

std::string frame_file(const std::string& dir, const char* prefix, FrameIndex frame,
                       const char* extension) {
  char name[64];
  std::snprintf(name, sizeof(name), "%s_%04lld%s", prefix, static_cast<long long>(frame),
                extension);
  return (fs::path(dir) / name).string();
}

json mat_to_json(const Mat3& m) {
  json rows = json::array();
  for (int r = 0; r < 3; ++r) rows.push_back({m(r, 0), m(r, 1), m(r, 2)});
  return rows;
}

// ---------------------------------------------------------------------------
// Commands

struct Command {
  std::string name;
  std::string description;
  ParamSet params;
  CLI::App* app = nullptr;
  std::string config_path;
  std::map<std::string, std::string> flag_text;
  std::map<std::string, CLI::Option*> flag_options;
  std::function<void(Command&, std::ostream&, std::ostream&)> run;

  Command(std::string n, std::string d, std::vector<ParamSpec> specs)
      : name(std::move(n)), description(std::move(d)), params(std::move(specs)) {}
};

std::string default_text(const ParamSpec& s) {
  if (s.default_value.is_null()) return "required";
  if (s.default_value.is_string()) return s.default_value.get<std::string>();
  return s.default_value.dump();
}

void bind(Command& cmd, CLI::App& root) {
  cmd.app = root.add_subcommand(cmd.name, cmd.description);
  cmd.app->add_option("--config", cmd.config_path,
                      "JSON file with any of the parameters below (flags win)");
  for (const auto& s : cmd.params.specs()) {
    cmd.flag_options[s.key] = cmd.app->add_option(
        flag_name(s.key), cmd.flag_text[s.key], s.help + " [" + default_text(s) + "]");
  }
}

void resolve(Command& cmd) {
  if (!cmd.config_path.empty()) cmd.params.merge_file(cmd.config_path);
  for (const auto& [key, option] : cmd.flag_options) {
    if (option->count() > 0) cmd.params.set_from_text(key, cmd.flag_text[key]);
  }
  cmd.params.require_complete();
}

// correct ------------------------------------------------------------------

struct CorrectArgs {
  std::string anchors;
  std::vector<std::string> segments;
  std::string out;
};

std::vector<LocalSegment> load_segments(const std::vector<std::string>& files,
                                        const AnchorSet& anchors) {
  const Trajectory& a = anchors.trajectory();
  std::vector<LocalSegment> out;
  for (const auto& file : files) {
    const Trajectory t = read_tum_file(file);
    t.require_non_empty(file.c_str());
    const FrameIndex first = t.front().frame, last = t.back().frame;
    if (a.find(first) == Trajectory::npos || a.find(last) == Trajectory::npos) {
      throw Error(ErrorCode::kCoverage, "segment " + file + " spans frames [" +
                                            std::to_string(first) + ", " +
                                            std::to_string(last) +
                                            "], which do not both lie on anchor frames");
    }
    // A file may cover several consecutive anchor gaps.
    const AnchorSet covered(a.slice(first, last), anchors.stride());
    if (covered.size() < 2) {
      throw Error(ErrorCode::kCoverage, "segment " + file + " covers no anchor gap");
    }
    for (auto& s : split_into_segments(t, covered)) out.push_back(std::move(s));
  }
  std::stable_sort(out.begin(), out.end(), [](const LocalSegment& x, const LocalSegment& y) {
    return x.start_anchor_frame < y.start_anchor_frame;
  });
  return out;
}

void run_correct(Command& cmd, const CorrectArgs& args, std::ostream& err) {
  const FrameIndex stride = cmd.params.integer("stride");
  const AnchorSet anchors(read_tum_file(args.anchors), stride);
  const auto segments = load_segments(expand_paths(args.segments), anchors);
  const CorrectionResult result = correct_long_trajectory(anchors, segments);

  fs::create_directories(args.out);
  write_tum_file((fs::path(args.out) / "corrected.tum").string(), result.trajectory);

  json segs = json::array();
  for (const auto& s : result.report.segments) {
    segs.push_back({{"start_frame", s.start_frame},
                    {"end_frame", s.end_frame},
                    {"drift_rotation_rad", s.rotation_rad},
                    {"drift_translation_mm", s.translation_mm}});
  }
  json residuals = json::array();
  double max_rot = 0.0, max_trans = 0.0;
  for (const auto& r : result.report.anchor_residuals) {
    residuals.push_back({{"frame", r.frame},
                         {"rotation_rad", r.rotation_rad},
                         {"translation_mm", r.translation_mm}});
    max_rot = std::max(max_rot, r.rotation_rad);
    max_trans = std::max(max_trans, r.translation_mm);
  }
  const json report = {{"frames", result.trajectory.size()},
                       {"anchors", anchors.size()},
                       {"segments", segs},
                       {"anchor_residuals", residuals},
                       {"max_anchor_residual_rad", max_rot},
                       {"max_anchor_residual_mm", max_trans},
                       {"config_echo", cmd.params.echo()}};
  write_json((fs::path(args.out) / "report.json").string(), report);
  err << "correct: " << segments.size() << " segments, " << result.trajectory.size()
      << " frames -> " << args.out << "\n";
}

// eval-traj ----------------------------------------------------------------

struct EvalTrajArgs {
  std::string pred, gt, out;
};

void run_eval_traj(Command& cmd, const EvalTrajArgs& args, std::ostream& out) {
  const AlignMode mode = parse_align_mode(cmd.params.string("align"));
  const long long window = cmd.params.integer("window");
  if (window <= 0) throw Error(ErrorCode::kConfig, "--window must be positive");
  const std::string format = cmd.params.string("format");
  if (format != "json" && format != "table") {
    throw Error(ErrorCode::kConfig, "--format must be json or table");
  }
  const Trajectory pred = read_tum_file(args.pred);
  const Trajectory gt = read_tum_file(args.gt);
  const double ate_mm = ate(pred, gt, mode);
  const RteResult r = rte(pred, gt, static_cast<std::size_t>(window));
  const json metrics = {{"ate_mm", ate_mm},
                        {"rte_mm", r.rte_mm},
                        {"rre_rad", r.rre_rad},
                        {"rte_pairs", r.pairs},
                        {"frames", gt.size()}};
  if (format == "table") {
    const std::string table = format_table(metrics);
    if (args.out.empty() || args.out == "-") {
      out << table;
    } else {
      ensure_parent(args.out);
      write_binary_file(args.out, table);
    }
    return;
  }
  json report = metrics;
  report["config_echo"] = cmd.params.echo();
  emit_json(args.out, report, out);
}

// eval-depth ---------------------------------------------------------------

struct EvalDepthArgs {
  std::string pred_dir, gt_dir, out;
};

json metrics_json(const DepthMetrics& m) {
  return {{"abs_rel", m.abs_rel}, {"sq_rel", m.sq_rel},         {"rmse", m.rmse},
          {"rmse_log", m.rmse_log}, {"delta_1_25", m.delta_1_25}, {"pixels", m.pixels},
          {"scale", m.scale}};
}

void run_eval_depth(Command& cmd, const EvalDepthArgs& args, std::ostream& out,
                    std::ostream& err) {
  DepthEvalConfig cfg;
  cfg.eval_width = static_cast<int>(cmd.params.integer("eval_width"));
  cfg.eval_height = static_cast<int>(cmd.params.integer("eval_height"));
  cfg.depth_min = cmd.params.number("depth_min");
  cfg.depth_max = cmd.params.number("depth_max");
  cfg.median_scaling = cmd.params.boolean("median_scaling");
  cfg.validate();

  const auto names = list_files(args.gt_dir, ".pfm");
  if (names.empty()) throw Error(ErrorCode::kEmptySet, "no .pfm files in " + args.gt_dir);
  json frames = json::array();
  DepthMetrics sum;
  for (const auto& name : names) {
    const std::string pred_path = (fs::path(args.pred_dir) / name).string();
    if (!fs::exists(pred_path)) {
      throw Error(ErrorCode::kIo, "missing prediction " + pred_path);
    }
    const DepthMap gt = read_depth_pfm((fs::path(args.gt_dir) / name).string());
    const DepthMap pred = read_depth_pfm(pred_path);
    const DepthMetrics m = depth_metrics(pred, gt, cfg);
    json entry = metrics_json(m);
    entry["file"] = name;
    frames.push_back(entry);
    sum.abs_rel += m.abs_rel;
    sum.sq_rel += m.sq_rel;
    sum.rmse += m.rmse;
    sum.rmse_log += m.rmse_log;
    sum.delta_1_25 += m.delta_1_25;
    sum.pixels += m.pixels;
  }
  const double n = static_cast<double>(names.size());
  const json report = {{"abs_rel", sum.abs_rel / n},
                       {"sq_rel", sum.sq_rel / n},
                       {"rmse", sum.rmse / n},
                       {"rmse_log", sum.rmse_log / n},
                       {"delta_1_25", sum.delta_1_25 / n},
                       {"pixels", sum.pixels},
                       {"frames", frames},
                       {"config_echo", cmd.params.echo()}};
  emit_json(args.out, report, out);
  err << "eval-depth: " << names.size() << " frames\n";
}

// disparity2depth / rectify-maps ------------------------------------------

struct StereoArgs {
  std::string calib, in, out;
};

void run_disparity2depth(const StereoArgs& args, std::ostream& err) {
  const StereoCalibration calib = read_calibration_file(args.calib);
  const RectificationGeometry geo = compute_rectification(calib);
  const DisparityMap disparity = read_scalar_pfm<DisparityTag>(args.in, false);
  const DepthMap depth = disparity_to_depth(disparity, geo.baseline, geo.rectified.fx);
  ensure_parent(args.out);
  write_scalar_pfm(args.out, depth);
  err << "disparity2depth: " << depth.valid_count() << "/" << depth.size()
      << " valid pixels -> " << args.out << "\n";
}

void write_map(const std::string& prefix, const char* side, const CoordinateMap& map) {
  ScalarRaster x(map.width(), map.height(), 0.0, true);
  ScalarRaster y(map.width(), map.height(), 0.0, true);
  for (std::size_t i = 0; i < map.size(); ++i) {
    x.values()[i] = map.values()[i].x();
    y.values()[i] = map.values()[i].y();
  }
  write_pfm(prefix + "_" + side + "_x.pfm", to_pfm(x));
  write_pfm(prefix + "_" + side + "_y.pfm", to_pfm(y));
}

void run_rectify_maps(const StereoArgs& args, std::ostream& err) {
  const StereoCalibration calib = read_calibration_file(args.calib);
  const RectifyMaps maps = compute_rectify_maps(calib);
  ensure_parent(args.out);
  write_map(args.out, "left", maps.left);
  write_map(args.out, "right", maps.right);
  const json info = {{"rectified", intrinsics_to_json(maps.geometry.rectified)},
                     {"baseline_mm", maps.geometry.baseline},
                     {"left_rotation", mat_to_json(maps.geometry.left_rotation)},
                     {"right_rotation", mat_to_json(maps.geometry.right_rotation)}};
  write_json(args.out + "_rectified.json", info);
  err << "rectify-maps: " << maps.left.width() << "x" << maps.left.height() << " -> "
      << args.out << "_*\n";
}

// eval-consistency ----------------------------------------------------------

struct ConsistencyArgs {
  std::string depth_dir, flow_dir, poses, calib, prior_dir, out;
};

LossConfig loss_config(const ParamSet& p) {
  LossConfig cfg;
  cfg.lambda_consist = p.number("lambda_consist");
  cfg.w_flow = p.number("w_flow");
  cfg.w_temp = p.number("w_temp");
  cfg.w_prior = p.number("w_prior");
  cfg.w_si = p.number("w_si");
  cfg.w_grad = p.number("w_grad");
  cfg.w_normal = p.number("w_normal");
  cfg.uncertainty_constant = p.number("uncertainty_constant");
  cfg.validate();
  return cfg;
}

void run_eval_consistency(Command& cmd, const ConsistencyArgs& args, std::ostream& out,
                          std::ostream& err) {
  const LossConfig cfg = loss_config(cmd.params);
  const CameraIntrinsics k = read_calibration_file(args.calib).left.intrinsics;
  const Trajectory poses = read_tum_file(args.poses);

  std::vector<std::pair<FrameIndex, FrameIndex>> pairs;
  for (const auto& name : list_files(args.flow_dir, ".flo")) {
    long long i = 0, j = 0;
    char tail = 0;
    if (std::sscanf(name.c_str(), "flow_%lld_%lld.fl%c", &i, &j, &tail) == 3 && tail == 'o') {
      pairs.emplace_back(i, j);
    }
  }
  if (pairs.empty()) {
    throw Error(ErrorCode::kEmptySet, "no flow_<i>_<j>.flo files in " + args.flow_dir);
  }

  const auto pose_of = [&](FrameIndex f) {
    const std::size_t idx = poses.find(f);
    if (idx == Trajectory::npos) {
      throw Error(ErrorCode::kCoverage, "no pose for frame " + std::to_string(f));
    }
    return poses[idx].pose;
  };

  json per_pair = json::array();
  ConsistencyBreakdown sum;
  for (const auto& [i, j] : pairs) {
    const DepthMap depth_i = read_depth_pfm(frame_file(args.depth_dir, "depth", i, ".pfm"));
    const DepthMap depth_j = read_depth_pfm(frame_file(args.depth_dir, "depth", j, ".pfm"));
    char flow_name[64];
    std::snprintf(flow_name, sizeof(flow_name), "flow_%04lld_%04lld.flo",
                  static_cast<long long>(i), static_cast<long long>(j));
    const FlowField flow = read_flo((fs::path(args.flow_dir) / flow_name).string());
    std::optional<DepthMap> reference;
    if (!args.prior_dir.empty()) {
      reference = read_depth_pfm(frame_file(args.prior_dir, "depth", i, ".pfm"));
    }
    const ConsistencyInputs in{depth_i, depth_j, k, k,
                               compose(inverse(pose_of(j)), pose_of(i)), flow,
                               reference ? &*reference : nullptr};
    const ConsistencyEvaluation e = evaluate_consistency(in, cfg);
    const ConsistencyBreakdown& b = e.breakdown;
    per_pair.push_back({{"i", i},
                        {"j", j},
                        {"c_flow", b.terms.c_flow},
                        {"c_temp", b.terms.c_temp},
                        {"c_prior", b.terms.c_prior},
                        {"c_si", e.prior.c_si},
                        {"c_grad", e.prior.c_grad},
                        {"c_normal", e.prior.c_normal},
                        {"weighted_flow", b.weighted_flow},
                        {"weighted_temp", b.weighted_temp},
                        {"weighted_prior", b.weighted_prior},
                        {"total", b.total},
                        {"flow_pixels", e.flow_pixels},
                        {"temp_pixels", e.temp_pixels}});
    sum.terms.c_flow += b.terms.c_flow;
    sum.terms.c_temp += b.terms.c_temp;
    sum.terms.c_prior += b.terms.c_prior;
    sum.weighted_flow += b.weighted_flow;
    sum.weighted_temp += b.weighted_temp;
    sum.weighted_prior += b.weighted_prior;
    sum.total += b.total;
  }
  const double n = static_cast<double>(pairs.size());
  const json aggregate = {{"c_flow", sum.terms.c_flow / n},
                          {"c_temp", sum.terms.c_temp / n},
                          {"c_prior", sum.terms.c_prior / n},
                          {"weighted_flow", sum.weighted_flow / n},
                          {"weighted_temp", sum.weighted_temp / n},
                          {"weighted_prior", sum.weighted_prior / n},
                          {"total", sum.total / n},
                          {"weighted_total", cfg.lambda_consist * sum.total / n},
                          {"pairs", pairs.size()}};
  const json report = {{"aggregate", aggregate},
                       {"pairs", per_pair},
                       {"config_echo", cmd.params.echo()}};
  emit_json(args.out, report, out);
  err << "eval-consistency: " << pairs.size() << " pairs\n";
}

// simulate -----------------------------------------------------------------

SimulationSpec simulation_spec(const ParamSet& p) {
  SimulationSpec s;
  const auto seed = static_cast<std::uint64_t>(p.integer("seed"));
  s.scene.kind = parse_scene_kind(p.string("scene"));
  s.scene.distance = p.number("scene_distance");
  s.scene.extent = p.number("scene_extent");
  s.scene.radius = p.number("scene_radius");
  s.scene.amplitude = p.number("scene_amplitude");
  s.scene.seed = seed;
  s.path.kind = parse_path_kind(p.string("path"));
  s.path.n_frames = static_cast<int>(p.integer("n_frames"));
  s.path.seed = seed;
  s.path.center = p.vec3("path_center");
  s.path.target = p.vec3("path_target");
  s.path.radius = p.number("path_radius");
  s.path.turns = p.number("path_turns");
  s.path.step = p.vec3("path_step");
  s.path.spread = p.number("path_spread");
  s.path.controls = static_cast<int>(p.integer("path_controls"));
  s.drift.sigma_rot = p.number("sigma_rot");
  s.drift.sigma_trans = p.number("sigma_trans");
  s.drift.seed = seed;
  s.anchor_stride = p.integer("anchor_stride");
  s.camera.fx = p.number("fx");
  s.camera.fy = p.number("fy");
  s.camera.cx = p.number("cx");
  s.camera.cy = p.number("cy");
  s.camera.width = static_cast<int>(p.integer("width"));
  s.camera.height = static_cast<int>(p.integer("height"));
  s.stereo_baseline = p.number("stereo_baseline");
  s.flow_step = static_cast<int>(p.integer("flow_step"));
  s.validate();
  return s;
}

void run_simulate(Command& cmd, const std::string& out_dir, std::ostream& err) {
  const SimulationSpec spec = simulation_spec(cmd.params);
  const json manifest = write_dataset(spec, out_dir);
  err << "simulate: " << manifest["files"].size() << " files -> " << out_dir << "\n";
}

// ---------------------------------------------------------------------------

ParamSpec f(std::string key, double def, std::string help) {
  return {std::move(key), ParamType::kFloat, def, std::move(help)};
}
ParamSpec i(std::string key, json def, std::string help) {
  return {std::move(key), ParamType::kInt, std::move(def), std::move(help)};
}
ParamSpec s(std::string key, std::string def, std::string help) {
  return {std::move(key), ParamType::kString, std::move(def), std::move(help)};
}
ParamSpec b(std::string key, bool def, std::string help) {
  return {std::move(key), ParamType::kBool, def, std::move(help)};
}
ParamSpec v(std::string key, const Vec3& def, std::string help) {
  return {std::move(key), ParamType::kVec3, json{def.x(), def.y(), def.z()}, std::move(help)};
}

std::vector<ParamSpec> loss_params() {
  const LossConfig d;
  return {f("lambda_consist", d.lambda_consist, "weight of the consistency composite"),
          f("w_flow", d.w_flow, "flow-consistency weight"),
          f("w_temp", d.w_temp, "temporal depth-consistency weight"),
          f("w_prior", d.w_prior, "geometric-prior weight"),
          f("w_si", d.w_si, "scale-invariant prior sub-weight"),
          f("w_grad", d.w_grad, "gradient-matching prior sub-weight"),
          f("w_normal", d.w_normal, "normal-consistency prior sub-weight"),
          f("uncertainty_constant", d.uncertainty_constant,
            "constant uncertainty factor on the flow and temporal terms")};
}

std::vector<ParamSpec> simulate_params() {
  const SimulationSpec d;
  return {s("scene", to_string(d.scene.kind), "scene kind: plane|sphere|heightfield"),
          f("scene_distance", d.scene.distance, "mm, surface depth along +z"),
          f("scene_extent", d.scene.extent, "mm, surface half-width"),
          f("scene_radius", d.scene.radius, "mm, sphere radius"),
          f("scene_amplitude", d.scene.amplitude, "mm, height-field relief"),
          s("path", to_string(d.path.kind), "camera path: orbit|spline|linear"),
          i("n_frames", d.path.n_frames, "number of frames"),
          v("path_center", d.path.center, "mm, orbit center / path start (x,y,z)"),
          v("path_target", d.path.target, "mm, look-at target (x,y,z)"),
          f("path_radius", d.path.radius, "mm, orbit radius"),
          f("path_turns", d.path.turns, "orbit revolutions"),
          v("path_step", d.path.step, "mm per frame for the linear path (x,y,z)"),
          f("path_spread", d.path.spread, "mm, spline control-point spread"),
          i("path_controls", d.path.controls, "spline control points"),
          f("sigma_rot", d.drift.sigma_rot, "rad, per-frame rotation drift"),
          f("sigma_trans", d.drift.sigma_trans, "mm, per-frame translation drift"),
          i("seed", 0, "seed for scene, path and drift"),
          i("anchor_stride", d.anchor_stride, "frames between anchors"),
          f("fx", d.camera.fx, "px"),
          f("fy", d.camera.fy, "px"),
          f("cx", d.camera.cx, "px"),
          f("cy", d.camera.cy, "px"),
          i("width", d.camera.width, "px"),
          i("height", d.camera.height, "px"),
          f("stereo_baseline", d.stereo_baseline, "mm, baseline in calib.json"),
          i("flow_step", d.flow_step, "flow written for frame pairs (k, k + step)")};
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("endogeo: trajectory drift correction, stereo depth and evaluation tools",
               "endogeo");
  app.require_subcommand(1);

  std::vector<std::unique_ptr<Command>> commands;
  const auto add = [&](std::string name, std::string desc, std::vector<ParamSpec> specs) {
    commands.push_back(
        std::make_unique<Command>(std::move(name), std::move(desc), std::move(specs)));
    bind(*commands.back(), app);
    return commands.back().get();
  };

  CorrectArgs correct_args;
  Command* correct = add("correct", "Anchor-guided drift correction of local segments",
                         {i("stride", nullptr, "anchor stride in frames")});
  correct->app->add_option("--anchors", correct_args.anchors, "anchor trajectory (TUM)")
      ->required();
  correct->app
      ->add_option("--segments", correct_args.segments,
                   "segment files (TUM); '*' and '?' expand in the file name")
      ->required();
  correct->app->add_option("--out", correct_args.out, "output directory")->required();
  correct->run = [&](Command& c, std::ostream&, std::ostream& e) {
    run_correct(c, correct_args, e);
  };

  EvalTrajArgs traj_args;
  Command* eval_traj = add("eval-traj", "ATE and RTE of a trajectory against ground truth",
                           {s("align", "sim3", "ATE alignment: sim3|se3"),
                            i("window", 16, "RTE frame window"),
                            s("format", "json", "output format: json|table")});
  eval_traj->app->add_option("--pred", traj_args.pred, "predicted trajectory (TUM)")
      ->required();
  eval_traj->app->add_option("--gt", traj_args.gt, "ground-truth trajectory (TUM)")
      ->required();
  eval_traj->app->add_option("--out", traj_args.out, "output file [stdout]");
  eval_traj->run = [&](Command& c, std::ostream& o, std::ostream&) {
    run_eval_traj(c, traj_args, o);
  };

  EvalDepthArgs depth_args;
  const DepthEvalConfig dd;
  Command* eval_depth =
      add("eval-depth", "Depth metrics over matching PFM files of two directories",
          {i("eval_width", dd.eval_width, "evaluation width (px)"),
           i("eval_height", dd.eval_height, "evaluation height (px)"),
           f("depth_min", dd.depth_min, "mm, smallest evaluated ground-truth depth"),
           f("depth_max", dd.depth_max, "mm, largest evaluated ground-truth depth"),
           b("median_scaling", dd.median_scaling, "per-frame median scaling (true|false)")});
  eval_depth->app->add_option("--pred-dir", depth_args.pred_dir, "predicted depth PFMs")
      ->required();
  eval_depth->app->add_option("--gt-dir", depth_args.gt_dir, "ground-truth depth PFMs")
      ->required();
  eval_depth->app->add_option("--out", depth_args.out, "output file [stdout]");
  eval_depth->run = [&](Command& c, std::ostream& o, std::ostream& e) {
    run_eval_depth(c, depth_args, o, e);
  };

  StereoArgs d2d_args;
  Command* d2d = add("disparity2depth", "Convert a rectified disparity PFM to depth", {});
  d2d->app->add_option("--calib", d2d_args.calib, "stereo calibration (JSON)")->required();
  d2d->app->add_option("--in", d2d_args.in, "disparity map (PFM, px)")->required();
  d2d->app->add_option("--out", d2d_args.out, "depth map (PFM, mm)")->required();
  d2d->run = [&](Command&, std::ostream&, std::ostream& e) { run_disparity2depth(d2d_args, e); };

  StereoArgs maps_args;
  Command* maps = add("rectify-maps", "Write stereo rectification lookup maps", {});
  maps->app->add_option("--calib", maps_args.calib, "stereo calibration (JSON)")->required();
  maps->app->add_option("--out-prefix", maps_args.out, "output path prefix")->required();
  maps->run = [&](Command&, std::ostream&, std::ostream& e) { run_rectify_maps(maps_args, e); };

  ConsistencyArgs cons_args;
  Command* cons = add("eval-consistency",
                      "Consistency loss terms for every flow pair of a sequence", loss_params());
  cons->app->add_option("--depth-dir", cons_args.depth_dir, "depth_<frame>.pfm files")
      ->required();
  cons->app->add_option("--flow-dir", cons_args.flow_dir, "flow_<i>_<j>.flo files")
      ->required();
  cons->app->add_option("--poses", cons_args.poses, "camera-to-world poses (TUM)")->required();
  cons->app->add_option("--calib", cons_args.calib, "calibration JSON (left intrinsics used)")
      ->required();
  cons->app->add_option("--prior-dir", cons_args.prior_dir,
                        "reference depth_<frame>.pfm files enabling the prior term");
  cons->app->add_option("--out", cons_args.out, "output file [stdout]");
  cons->run = [&](Command& c, std::ostream& o, std::ostream& e) {
    run_eval_consistency(c, cons_args, o, e);
  };

  std::string sim_out;
  Command* sim = add("simulate", "Generate a synthetic dataset directory", simulate_params());
  sim->app->add_option("--out", sim_out, "output directory")->required();
  sim->run = [&](Command& c, std::ostream&, std::ostream& e) { run_simulate(c, sim_out, e); };

  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.push_back("endogeo");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : storage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    const CLI::App* target = &app;
    for (const auto& c : commands) {
      if (c->app->parsed()) target = c->app;
    }
    out << target->help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  for (auto& c : commands) {
    if (!c->app->parsed()) continue;
    try {
      resolve(*c);
      c->run(*c, out, err);
      return 0;
    } catch (const Error& e) {
      err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
      return exit_code(e.code());
    } catch (const fs::filesystem_error& e) {
      err << "error [io]: " << e.what() << "\n";
      return 2;
    } catch (const std::exception& e) {
      err << "error [internal]: " << e.what() << "\n";
      return 4;
    }
  }
  return 2;
}

}  // namespace endogeo::cli
