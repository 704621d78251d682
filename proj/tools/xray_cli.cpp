// Command-line front end over the C API.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "xray/xray.h"

namespace {

struct CliFailure {
  std::string status;
  std::string message;
};

void check(xray_status s) {
  if (s != XRAY_OK) throw CliFailure{xray_status_name(s), xray_last_error()};
}

[[noreturn]] void usage(const std::string& message) { throw CliFailure{"invalid_argument", message}; }

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using SeqPtr = std::unique_ptr<xray_sequence, Deleter<xray_sequence, xray_sequence_free>>;
using TracksPtr = std::unique_ptr<xray_tracks, Deleter<xray_tracks, xray_tracks_free>>;
using TensorPtr = std::unique_ptr<xray_tensor, Deleter<xray_tensor, xray_tensor_free>>;
using StrPtr = std::unique_ptr<char, Deleter<char, xray_string_free>>;

SeqPtr load_sequence(const std::string& dir) {
  xray_sequence* s = nullptr;
  check(xray_sequence_read(dir.c_str(), &s));
  return SeqPtr(s);
}

TracksPtr load_tracks(const std::string& path) {
  xray_tracks* t = nullptr;
  check(xray_tracks_read(path.c_str(), &t));
  return TracksPtr(t);
}

TensorPtr load_tensor(const std::string& path) {
  xray_tensor* t = nullptr;
  check(xray_tensor_read(path.c_str(), &t));
  return TensorPtr(t);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw CliFailure{"io_error", "cannot write " + path.string()};
}

double parse_factor(const std::string& text) {
  if (text == "inf" || text == "infinity") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    usage("--subsample-factor: not a number: " + text);
  }
  if (used != text.size()) usage("--subsample-factor: not a number: " + text);
  return v;
}

std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"xray: object-complete point cloud sequences"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  std::string config, out, in, mode = "greedy", tracks_path, strategy = "geometry", factor = "1.5";
  std::uint64_t seed = 0;
  auto* sim = app.add_subcommand("simulate", "Generate a scene and its ground truth");
  sim->add_option("--config", config, "Scene config JSON")->required();
  sim->add_option("--out", out, "Output directory")->required();

  auto* track = app.add_subcommand("track", "Associate instances into tracks");
  track->add_option("--in", in, "Sequence directory")->required();
  track->add_option("--mode", mode, "greedy or ids")->check(CLI::IsMember({"greedy", "ids"}));
  track->add_option("--out", out, "Tracks file")->required();

  int icp_iters = 50;
  double icp_tol = 1e-4, icp_dist = 0.5;
  auto* fuse = app.add_subcommand("fuse", "Build Object-Complete frames");
  fuse->add_option("--in", in, "Sequence directory")->required();
  fuse->add_option("--tracks", tracks_path, "Tracks file")->required();
  fuse->add_option("--strategy", strategy, "geometry or icp")->check(CLI::IsMember({"geometry", "icp"}));
  fuse->add_option("--subsample-factor", factor, "Budget factor, or inf");
  fuse->add_option("--seed", seed, "Subsampling seed");
  fuse->add_option("--icp-max-iterations", icp_iters)->check(CLI::PositiveNumber);
  fuse->add_option("--icp-tol", icp_tol)->check(CLI::NonNegativeNumber);
  fuse->add_option("--icp-max-dist", icp_dist)->check(CLI::PositiveNumber);
  fuse->add_option("--out", out, "Output directory")->required();

  std::string fused, truth;
  double radius = 0.1;
  auto* eval = app.add_subcommand("eval", "Score a sequence against ground truth");
  eval->add_option("--fused", fused, "Sequence directory")->required();
  eval->add_option("--truth", truth, "Ground-truth directory")->required();
  eval->add_option("--coverage-radius", radius, "Coverage radius in metres");
  eval->add_option("--tracks", tracks_path, "Predicted tracks to score");
  eval->add_option("--out", out, "Report file")->required();

  std::string t_cls, s_cls, t_reg, s_reg, t_feat, s_feat, proj_w, proj_b;
  double l_det = 0.0;
  xray_distill_config dcfg;
  xray_distill_config_init(&dcfg);
  bool compact = false;
  auto* losses = app.add_subcommand("losses", "Compute distillation losses");
  losses->add_option("--teacher-cls", t_cls)->required();
  losses->add_option("--student-cls", s_cls)->required();
  losses->add_option("--teacher-reg", t_reg)->required();
  losses->add_option("--student-reg", s_reg)->required();
  losses->add_option("--teacher-feat", t_feat)->required();
  losses->add_option("--student-feat", s_feat)->required();
  losses->add_option("--l-det", l_det);
  losses->add_option("--alpha1", dcfg.alpha1);
  losses->add_option("--alpha2", dcfg.alpha2);
  losses->add_option("--lambda1", dcfg.lambda1);
  losses->add_option("--lambda2", dcfg.lambda2);
  losses->add_option("--lambda3", dcfg.lambda3);
  losses->add_flag("--compact-pairing", compact, "alpha1 weighs the regression term");
  losses->add_option("--proj-weights", proj_w, "Projection weights tensor [C_t, C_s]");
  losses->add_option("--proj-bias", proj_b, "Projection bias tensor [C_t]");

  std::size_t frame = 0;
  bool highlight = false;
  auto* ply = app.add_subcommand("export-ply", "Write one frame as ASCII PLY");
  ply->add_option("--in", in, "Sequence directory")->required();
  ply->add_option("--frame", frame)->required();
  ply->add_option("--out", out, "PLY file")->required();
  ply->add_flag("--highlight-added", highlight);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: invalid_argument: " << one_line(e.what()) << "\n";
    return 2;
  }

  try {
    if (*sim) {
      check(xray_simulate(config.c_str(), out.c_str()));
    } else if (*track) {
      auto seq = load_sequence(in);
      xray_tracks* t = nullptr;
      check(xray_track(seq.get(), mode == "ids" ? XRAY_TRACK_INSTANCE_IDS : XRAY_TRACK_GREEDY, &t));
      TracksPtr tracks(t);
      check(xray_tracks_write(tracks.get(), out.c_str()));
    } else if (*fuse) {
      auto seq = load_sequence(in);
      auto tracks = load_tracks(tracks_path);
      xray_fusion_config cfg;
      xray_fusion_config_init(&cfg);
      cfg.strategy = strategy == "icp" ? XRAY_MERGE_ICP : XRAY_MERGE_GEOMETRY;
      cfg.subsample_factor = parse_factor(factor);
      cfg.seed = seed;
      cfg.icp_max_iterations = icp_iters;
      cfg.icp_convergence_tol = icp_tol;
      cfg.icp_max_correspondence_dist = icp_dist;
      xray_sequence* f = nullptr;
      char* report = nullptr;
      check(xray_fuse(seq.get(), tracks.get(), &cfg, &f, &report));
      SeqPtr fused_seq(f);
      StrPtr report_text(report);
      check(xray_sequence_write(fused_seq.get(), out.c_str()));
      write_text(std::filesystem::path(out) / "fusion_report.json", report_text.get());
    } else if (*eval) {
      auto seq = load_sequence(fused);
      TracksPtr tracks;
      if (!tracks_path.empty()) tracks = load_tracks(tracks_path);
      char* report = nullptr;
      check(xray_evaluate(seq.get(), truth.c_str(), radius, tracks.get(), &report));
      StrPtr text(report);
      write_text(out, text.get());
      const auto doc = nlohmann::json::parse(text.get());
      for (const auto& o : doc["objects"]) {
        std::printf("object %lld: coverage min %.4f mean %.4f max %.4f\n", o["instance_id"].get<long long>(),
                    o["coverage_min"].get<double>(), o["coverage_mean"].get<double>(), o["coverage_max"].get<double>());
      }
      if (doc.contains("tracking")) {
        std::printf("tracking: precision %.4f recall %.4f\n", doc["tracking"]["precision"].get<double>(),
                    doc["tracking"]["recall"].get<double>());
      }
    } else if (*losses) {
      dcfg.compact_pairing = compact ? 1 : 0;
      auto tc = load_tensor(t_cls), sc = load_tensor(s_cls);
      auto tr = load_tensor(t_reg), sr = load_tensor(s_reg);
      auto tf = load_tensor(t_feat), sf = load_tensor(s_feat);
      if (proj_w.empty() != proj_b.empty()) usage("--proj-weights and --proj-bias must be given together");
      if (!proj_w.empty()) {
        auto w = load_tensor(proj_w), b = load_tensor(proj_b);
        xray_tensor* p = nullptr;
        check(xray_project_channels(sf.get(), w.get(), b.get(), &p));
        sf.reset(p);
      }
      xray_loss_breakdown b{};
      check(xray_distillation_losses(sc.get(), tc.get(), sr.get(), tr.get(), sf.get(), tf.get(), l_det, &dcfg, &b));
      nlohmann::ordered_json doc{{"l_kd_cls", b.l_kd_cls}, {"l_kd_reg", b.l_kd_reg}, {"l_heads", b.l_heads},
                                 {"l_feat", b.l_feat},     {"l_det", b.l_det},       {"total", b.total}};
      std::cout << doc.dump(2) << "\n";
    } else if (*ply) {
      auto seq = load_sequence(in);
      check(xray_export_ply(seq.get(), frame, out.c_str(), highlight ? 1 : 0));
    }
  } catch (const CliFailure& f) {
    std::cerr << "error: " << f.status << ": " << one_line(f.message) << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal_error: " << one_line(e.what()) << "\n";
    return 1;
  }
  return 0;
}
