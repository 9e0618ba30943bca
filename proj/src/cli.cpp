#include "wayfarer/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "wayfarer/agents.hpp"
#include "wayfarer/analytics.hpp"
#include "wayfarer/error.hpp"
#include "wayfarer/features.hpp"
#include "wayfarer/intent.hpp"
#include "wayfarer/locomotion.hpp"
#include "wayfarer/questionnaire.hpp"
#include "wayfarer/service.hpp"
#include "wayfarer/stats.hpp"

namespace wayfarer {
namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Pose parse_pose(const std::string& text) {
  std::vector<double> v;
  std::stringstream in(text);
  std::string field;
  while (std::getline(in, field, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(field, &used));
      if (used != field.size()) throw UsageError("");
    } catch (const std::exception&) {
      throw UsageError("--pose: expected X,Y,Z,YAW");
    }
  }
  if (v.size() != 4) throw UsageError("--pose: expected X,Y,Z,YAW");
  Pose p{{v[0], v[1], v[2]}, v[3]};
  if (!p.position.finite() || !std::isfinite(p.yaw)) throw UsageError("--pose: values must be finite");
  return p;
}

TownLayout scene_or_default(const std::string& path) {
  return load_scene(path.empty() ? default_scene_path() : std::filesystem::path(path));
}

void write_or_print(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path);
  f << text;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Language-driven locomotion simulator and gaze analytics", "wayfarer"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Replay a scripted or agent-driven session");
  std::string sim_scene, sim_technique, sim_script, sim_out, sim_backend = "mock";
  bool sim_agent = false;
  sim->add_option("--scene", sim_scene, "Scene file (default bundled scene)");
  sim->add_option("--technique", sim_technique, "teleport | steering | llm")->required();
  auto* script_opt = sim->add_option("--script", sim_script, "Timed input script (JSON)");
  sim->add_flag("--agent", sim_agent, "Use the built-in scripted agent")->excludes(script_opt);
  sim->add_option("--out", sim_out, "Trace output (JSONL); stdout when omitted");
  sim->add_option("--backend", sim_backend, "mock | remote");

  // resolve
  auto* res = app.add_subcommand("resolve", "Resolve one free-form command");
  std::string res_scene, res_pose, res_command, res_backend = "mock";
  res->add_option("--scene", res_scene, "Scene file");
  res->add_option("--pose", res_pose, "X,Y,Z,YAW")->required();
  res->add_option("--command", res_command, "Transcript")->required();
  res->add_option("--backend", res_backend, "mock | remote");

  // gaze features
  auto* gaze_cmd = app.add_subcommand("gaze", "Gaze processing");
  gaze_cmd->require_subcommand(1);
  auto* feat = gaze_cmd->add_subcommand("features", "Windowed feature extraction");
  std::string feat_log, feat_out, feat_label = "unlabeled";
  double feat_window = 20.0;
  feat->add_option("--log", feat_log, "Gaze log CSV")->required();
  feat->add_option("--window", feat_window, "Window length (s)")->check(CLI::PositiveNumber);
  feat->add_option("--out", feat_out, "Feature matrix CSV; stdout when omitted");
  feat->add_option("--label", feat_label, "Label written on every row");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Classification and statistics");
  analyze->require_subcommand(1);
  auto* classify = analyze->add_subcommand("classify", "Baseline, k-NN and permutation importance");
  std::string cls_features, cls_report;
  std::uint64_t cls_seed = 42;
  double cls_fraction = 0.2;
  int cls_k = 5, cls_repeats = 30;
  classify->add_option("--features", cls_features, "Feature matrix CSV")->required();
  classify->add_option("--seed", cls_seed, "Random seed");
  classify->add_option("--test-fraction", cls_fraction, "Held-out fraction")->check(CLI::Range(0.0, 1.0));
  classify->add_option("--k", cls_k, "Neighbours for the reported model");
  classify->add_option("--repeats", cls_repeats, "Permutation repeats")->check(CLI::PositiveNumber);
  classify->add_option("--report", cls_report, "Write the full report (JSON)");
  auto* stats_cmd = analyze->add_subcommand("stats", "Per-feature ANOVA and Kruskal-Wallis");
  std::string st_features, st_group = "label";
  stats_cmd->add_option("--features", st_features, "Feature matrix CSV")->required();
  stats_cmd->add_option("--group-by", st_group, "Grouping column")->check(CLI::IsMember({"label"}));

  // score
  auto* score = app.add_subcommand("score", "Questionnaire scoring");
  std::string sc_kind, sc_input, sc_map;
  score->add_option("--questionnaire", sc_kind, "sus | ipq | csqvr | tlx")
      ->required()
      ->check(CLI::IsMember({"sus", "ipq", "csqvr", "tlx"}));
  score->add_option("--input", sc_input, "Responses CSV, one respondent per line")->required();
  score->add_option("--ipq-map", sc_map, "IPQ item mapping (JSON)");

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "Run the session service");
  std::string sv_scene, sv_host = "127.0.0.1", sv_backend = "mock";
  int sv_port = 0;
  serve_cmd->add_option("--port", sv_port, "Port (default $WAYFARER_PORT or 8080)");
  serve_cmd->add_option("--host", sv_host, "Bind address");
  serve_cmd->add_option("--scene", sv_scene, "Scene file");
  serve_cmd->add_option("--backend", sv_backend, "Default backend for new sessions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*sim) {
      const TownLayout layout = scene_or_default(sim_scene);
      const Technique technique = parse_technique(sim_technique);
      SimConfig cfg;
      std::vector<ScriptInput> script;
      if (sim_agent) {
        script = agent_script(layout, technique, cfg);
      } else if (!sim_script.empty()) {
        script = load_script(sim_script);
      } else {
        throw UsageError("simulate: give --script or --agent");
      }
      auto backend = make_backend(sim_backend);
      const SessionRun run = run_session(layout, technique, script, backend.get(), cfg);
      write_or_print(sim_out, to_jsonl(run.trace), out);
      if (!sim_out.empty()) {
        nlohmann::json summary = {{"technique", to_string(technique)},
                                  {"done", run.final_state.done},
                                  {"sim_time", run.final_state.t},
                                  {"events", run.trace.size()}};
        summary["completion_time"] = run.completion_time ? nlohmann::json(*run.completion_time) : nlohmann::json();
        out << summary.dump() << '\n';
      }
    } else if (*res) {
      const TownLayout layout = scene_or_default(res_scene);
      const Pose pose = parse_pose(res_pose);
      auto backend = make_backend(res_backend);
      const Resolution r = resolve_command(res_command, pose, layout, ResolverConfig{}, *backend, 0.0);
      nlohmann::json j = {{"outcome", to_string(r.outcome)},
                          {"response_text", r.response_text},
                          {"stt_s", r.stt_latency_s},
                          {"llm_s", r.llm_latency_s},
                          {"total_s", r.stt_latency_s + r.llm_latency_s}};
      if (r.schedule) {
        j["target"] = vec_json(r.schedule->target);
        j["execute_at"] = r.schedule->execute_at;
      }
      if (!r.error.empty()) j["error"] = r.error;
      out << j.dump() << '\n';
    } else if (*feat) {
      const auto samples = gaze::read_gaze_log(feat_log);
      gaze::PipelineConfig cfg;
      cfg.window_s = feat_window;
      const auto rows = gaze::process_recording(samples, feat_label, cfg);
      write_or_print(feat_out, gaze::format_feature_matrix(rows), out);
      if (!feat_out.empty()) out << fmt::format("{} windows written to {}\n", rows.size(), feat_out);
    } else if (*classify) {
      using namespace analytics;
      const Dataset ds = read_feature_matrix(cls_features);
      ds.validate(true);
      const Split split = stratified_split(ds, {cls_fraction, cls_seed, true});
      const Dataset train = ds.subset(split.train);
      const Dataset test = ds.subset(split.test);

      ClassifierConfig ccfg;
      ccfg.k = cls_k;
      ccfg.seed = cls_seed;
      const double baseline = majority_baseline(train.labels, test.labels);
      const KnnResult knn = knn_fit_predict(train, test, ccfg);
      const CrossValidation cv = cross_validate(train, ccfg);
      KnnClassifier model(cls_k);
      model.fit(train.matrix, train.labels);
      const auto importance = permutation_importance(model, test, cls_repeats, cls_seed);

      std::map<std::string, int> test_counts;
      for (const auto& l : test.labels) ++test_counts[l];
      out << fmt::format("rows {} (train {}, test {})\n", ds.rows(), train.rows(), test.rows());
      for (const auto& [l, c] : test_counts) out << fmt::format("test {} {}\n", l, c);
      out << fmt::format("majority_baseline {:.4f}\n", baseline);
      out << fmt::format("knn_k{}_accuracy {:.4f}\n", cls_k, knn.accuracy);
      for (const auto& [k, m] : cv.mean_accuracy) out << fmt::format("cv_k{} {:.4f}\n", k, m);
      out << fmt::format("cv_best_k {}\n", cv.best_k);
      for (std::size_t i = 0; i < std::min<std::size_t>(5, importance.size()); ++i) {
        out << fmt::format("importance {} {:.4f}\n", importance[i].name, importance[i].mean_drop);
      }

      if (!cls_report.empty()) {
        nlohmann::json report = {{"rows", ds.rows()},
                                 {"train", train.rows()},
                                 {"test", test.rows()},
                                 {"test_counts", test_counts},
                                 {"seed", cls_seed},
                                 {"majority_baseline", baseline},
                                 {"knn", {{"k", cls_k}, {"accuracy", knn.accuracy}}},
                                 {"cross_validation", {{"best_k", cv.best_k}}}};
        for (const auto& [k, m] : cv.mean_accuracy) report["cross_validation"]["mean_accuracy"][std::to_string(k)] = m;
        nlohmann::json imp = nlohmann::json::array();
        for (const auto& i : importance) imp.push_back({{"feature", i.name}, {"mean_drop", i.mean_drop}, {"std_drop", i.std_drop}});
        report["importance"] = std::move(imp);
        write_or_print(cls_report, report.dump(2) + "\n", out);
      }
    } else if (*stats_cmd) {
      const auto ds = analytics::read_feature_matrix(st_features);
      out << fmt::format("{:<28} {:>10} {:>6} {:>6} {:>8} {:>10}\n", "feature", "F", "df_b", "df_w", "eta2", "H");
      for (const auto& fs : stats::per_feature_stats(ds)) {
        const std::string f = fs.anova_defined ? fmt::format("{:.4f}", fs.anova.F) : "undef";
        out << fmt::format("{:<28} {:>10} {:>6} {:>6} {:>8.4f} {:>10.4f}\n", fs.feature, f, fs.anova.df_between,
                           fs.anova.df_within, fs.anova.eta_squared, fs.kruskal.H);
      }
    } else if (*score) {
      using namespace questionnaire;
      const Kind kind = parse_kind(sc_kind);
      std::optional<IpqMapping> mapping;
      if (kind == Kind::Ipq) mapping = load_ipq_mapping(sc_map.empty() ? default_ipq_mapping_path() : std::filesystem::path(sc_map));
      const auto rows = parse_responses(read_text(sc_input));
      out << score_all(kind, rows, mapping ? &*mapping : nullptr).dump() << '\n';
    } else if (*serve_cmd) {
      if (sv_port == 0) {
        const char* env = std::getenv("WAYFARER_PORT");
        sv_port = env ? std::atoi(env) : 8080;
      }
      if (sv_port <= 0 || sv_port > 65535) throw UsageError("serve: bad port");
      make_backend(sv_backend);  // fail fast on a bad selector or missing remote settings
      service::SessionManager manager(scene_or_default(sv_scene));
      err << fmt::format("listening on http://{}:{}\n", sv_host, sv_port);
      service::serve(manager, sv_host, sv_port);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace wayfarer
