#include "cic/cli/commands.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "cic/contrastive/skills.hpp"
#include "cic/core/errors.hpp"
#include "cic/io/checkpoint.hpp"
#include "cic/io/config_file.hpp"
#include "cic/io/csv.hpp"
#include "cic/io/svg.hpp"
#include "cic/stats/stats.hpp"
#include "cic/trainer/gridworld_study.hpp"
#include "cic/trainer/persistence.hpp"
#include "cic/trainer/probes.hpp"
#include "cic/trainer/trainer.hpp"

namespace cic::cli {

namespace fs = std::filesystem;
using nn::Vector;

namespace {

struct Common {
  bool deterministic = false;
  std::size_t jobs = 1;
};

std::string run_root() {
  const char* env = std::getenv("CIC_RUN_DIR");
  return env && *env ? std::string(env) : std::string("runs");
}

std::optional<std::string> stamp(const Common& c) {
  if (c.deterministic) return std::nullopt;
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return std::string(buf);
}

// Collects "--section.key=value" flags left over by the parser.
io::ConfigFile overrides_from(const std::vector<std::string>& extras) {
  io::ConfigFile file;
  for (const auto& e : extras) {
    if (e.rfind("--", 0) != 0 || e.find('.') == std::string::npos || e.find('=') == std::string::npos) {
      throw ConfigError("unrecognized argument '" + e + "' (overrides look like --section.key=value)");
    }
    file.apply_override(e);
  }
  return file;
}

io::ConfigFile merged_config(const std::string& path, const io::ConfigFile& overrides) {
  io::ConfigFile file = path.empty() ? io::ConfigFile{} : io::ConfigFile::load(path);
  for (const auto& [name, value] : overrides.values()) {
    const auto dot = name.find('.');
    file.set(name.substr(0, dot), name.substr(dot + 1), value);
  }
  return file;
}

std::string write_log(const std::string& path, const trainer::TrainLog& log, const Common& common) {
  std::string text;
  if (const auto ts = stamp(common)) {
    text += nlohmann::json({{"step", 0}, {"event", "run_start"}, {"timestamp", *ts}}).dump() + "\n";
  }
  text += log.to_jsonl();
  io::write_file(path, text);
  return path;
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = io::trim(item);
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(std::string(what) + ": cannot parse '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError(std::string(what) + ": empty list");
  return out;
}

nlohmann::json trajectory_json(const trainer::TrajectoryStep& s) {
  const auto vec = [](const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  return {{"episode", s.episode}, {"step", s.step},     {"obs", vec(s.obs)},
          {"action", vec(s.action)}, {"reward", s.reward}, {"skill", vec(s.skill)}};
}

int cmd_pretrain(const std::string& config_path, const std::string& name, const io::ConfigFile& overrides,
                 const Common& common, std::ostream& out) {
  const trainer::RunConfig cfg = trainer::resolve_config(merged_config(config_path, overrides));
  const std::string run_name = name.empty() ? "pretrain-" + trainer::to_string(cfg.agent.kind) + "-seed" +
                                                  std::to_string(cfg.train.seed)
                                            : name;
  const fs::path dir = fs::path(run_root()) / run_name;
  fs::create_directories(dir);
  io::write_file((dir / "config.ini").string(), trainer::config_echo(cfg));
  trainer::TrainLog log;
  const trainer::Agent agent = trainer::pretrain(cfg, &log);
  io::write_checkpoint((dir / "checkpoint.cick").string(), trainer::make_checkpoint(agent));
  write_log((dir / "log.jsonl").string(), log, common);
  out << dir.string() << "\n";
  return kExitOk;
}

int cmd_finetune(const std::string& ckpt_path, const std::string& task, const std::string& csv_path,
                 const std::string& name, io::ConfigFile overrides, const Common& common, std::ostream& out) {
  const io::Checkpoint ckpt = io::read_checkpoint(ckpt_path);
  if (!task.empty()) overrides.set("env", "task", task);
  auto loaded = trainer::load_agent(ckpt, overrides);
  const auto& cfg = loaded.config;
  const std::string run_name =
      name.empty() ? "finetune-" + cfg.env.task + "-seed" + std::to_string(cfg.train.seed) : name;
  const fs::path dir = fs::path(run_root()) / run_name;
  fs::create_directories(dir);
  io::write_file((dir / "config.ini").string(), trainer::config_echo(cfg));
  trainer::TrainLog log;
  const auto result = trainer::finetune(loaded.agent, cfg, &log);
  io::write_checkpoint((dir / "checkpoint.cick").string(),
                       trainer::make_checkpoint(result.agent, result.sweep.best_skill));
  write_log((dir / "log.jsonl").string(), log, common);
  const std::string csv = csv_path.empty() ? (fs::path(run_root()) / "scores.csv").string() : csv_path;
  io::append_csv_row(csv, {"task", "seed", "phase", "score"},
                     {cfg.env.task, std::to_string(cfg.train.seed), "finetune", io::format_number(result.score)});
  out << nlohmann::json({{"run_dir", dir.string()},
                         {"task", cfg.env.task},
                         {"seed", cfg.train.seed},
                         {"skill_value", result.sweep.best_value},
                         {"zero_shot", result.zero_shot},
                         {"score", result.score}})
             .dump()
      << "\n";
  return kExitOk;
}

int cmd_eval(const std::string& ckpt_path, const std::string& task, std::optional<double> skill_value,
             std::size_t episodes, const std::string& dump, io::ConfigFile overrides, std::ostream& out) {
  const io::Checkpoint ckpt = io::read_checkpoint(ckpt_path);
  if (!task.empty()) overrides.set("env", "task", task);
  auto loaded = trainer::load_agent(ckpt, overrides);
  Vector z;
  if (skill_value) {
    z = contrastive::constant_skill(*skill_value, loaded.agent.skill_dim());
  } else if (loaded.selected_skill) {
    z = *loaded.selected_skill;
  } else {
    throw ConfigError("eval needs --skill for a checkpoint without a selected skill");
  }
  const std::size_t n = episodes ? episodes : loaded.config.train.eval_episodes;
  std::string dump_text;
  trainer::TrajectorySink sink;
  if (!dump.empty()) sink = [&](const trainer::TrajectoryStep& s) { dump_text += trajectory_json(s).dump() + "\n"; };
  const Rng eval_rng = Rng(loaded.config.train.seed).split("eval").split("env");
  const auto res = trainer::evaluate(loaded.agent, loaded.config.env, z, n, eval_rng, sink);
  if (!dump.empty()) io::write_file(dump, dump_text);
  out << nlohmann::json({{"task", loaded.config.env.task}, {"mean", res.mean}, {"returns", res.returns}}).dump()
      << "\n";
  return kExitOk;
}

int cmd_plot_flow(const std::string& ckpt_path, const std::string& skills, int grid, int horizon,
                  const std::string& out_path, const std::string& dump, const Common& common, std::ostream& out) {
  const io::Checkpoint ckpt = io::read_checkpoint(ckpt_path);
  auto loaded = trainer::load_agent(ckpt);
  if (loaded.config.env.kind != envs::EnvKind::pointmass) throw ConfigError("plot-flow needs a pointmass checkpoint");
  std::string dump_text;
  trainer::TrajectorySink sink;
  if (!dump.empty()) sink = [&](const trainer::TrajectoryStep& s) { dump_text += trajectory_json(s).dump() + "\n"; };
  const auto panels =
      trainer::flow_field(loaded.agent, loaded.config.env, parse_list(skills, "--skills"), grid, horizon, sink);
  io::write_file(out_path, io::flow_svg(panels, stamp(common)));
  if (!dump.empty()) io::write_file(dump, dump_text);
  out << out_path << "\n";
  return kExitOk;
}

int cmd_report(const std::vector<std::string>& csvs, const std::string& expert_path, const std::string& out_path,
               const std::string& svg_path, std::size_t resamples, double level, std::uint64_t seed,
               const Common& common, std::ostream& out) {
  stats::ScoreTable table;
  const io::CsvTable expert = io::read_csv(expert_path);
  const auto et = expert.column("task");
  const auto ee = expert.column("expert");
  for (const auto& row : expert.rows) {
    double v = 0.0;
    try {
      v = std::stod(row.fields[ee]);
    } catch (const std::exception&) {
      throw ConfigError(expert_path + ":" + std::to_string(row.line) + ": malformed expert score");
    }
    if (!(v > 0.0)) throw ConfigError(expert_path + ":" + std::to_string(row.line) + ": expert score must be > 0");
    table.expert[row.fields[et]] = v;
  }
  for (const auto& path : csvs) {
    const io::CsvTable t = io::read_csv(path);
    const auto ct = t.column("task");
    const auto cs = t.column("seed");
    const auto cv = t.column("score");
    for (const auto& row : t.rows) {
      stats::ScoreEntry e;
      e.task = row.fields[ct];
      try {
        std::size_t used = 0;
        e.seed = std::stoull(row.fields[cs], &used);
        if (used != row.fields[cs].size()) throw std::invalid_argument("seed");
        e.score = std::stod(row.fields[cv], &used);
        if (used != row.fields[cv].size()) throw std::invalid_argument("score");
      } catch (const std::exception&) {
        throw ConfigError(path + ":" + std::to_string(row.line) + ": malformed score row");
      }
      if (!table.expert.count(e.task)) {
        throw ConfigError(path + ":" + std::to_string(row.line) + ": no expert reference for task '" + e.task + "'");
      }
      table.entries.push_back(e);
    }
  }
  try {
    table.validate();
  } catch (const ContractError& e) {
    throw ConfigError(e.what());
  }
  const std::vector<std::pair<std::string, stats::Statistic>> statistics = {
      {"iqm", [](std::span<const double> s) { return stats::iqm(s); }},
      {"median", [](std::span<const double> s) { return stats::median(s); }},
      {"mean", [](std::span<const double> s) { return stats::mean(s); }},
      {"optimality_gap", [](std::span<const double> s) { return stats::optimality_gap(s); }},
  };
  std::vector<io::IntervalRow> rows;
  std::string text = io::csv_line({"statistic", "point", "lo", "hi", "scale"});
  const Rng root(seed);
  for (const auto& [label, fn] : statistics) {
    stats::Interval iv;
    try {
      iv = stats::stratified_bootstrap_ci(table, fn, resamples, level, root.split(label));
    } catch (const ContractError& e) {
      throw ConfigError(std::string("report: ") + e.what());
    }
    rows.push_back({label, iv.point, iv.lo, iv.hi});
    text += io::csv_line(
        {label, io::format_number(iv.point), io::format_number(iv.lo), io::format_number(iv.hi), "desk"});
  }
  io::write_file(out_path, text);
  if (!svg_path.empty()) io::write_file(svg_path, io::interval_svg(rows, stamp(common)));
  out << text;
  return kExitOk;
}

int cmd_gridworld_study(const std::string& config_path, const io::ConfigFile& overrides, std::int64_t steps,
                        const std::string& seeds, const std::string& ks, const std::string& out_path,
                        const Common& common, std::ostream& out) {
  io::ConfigFile file = merged_config(config_path, overrides);
  if (!file.has("env", "kind")) file.set("env", "kind", "gridworld");
  if (!file.has("env", "task")) file.set("env", "task", "reach_corner");
  const trainer::RunConfig cfg = trainer::resolve_config(file);
  trainer::StudyOptions opt;
  opt.steps = steps;
  opt.jobs = common.jobs;
  opt.seeds.clear();
  for (double s : parse_list(seeds, "--seeds")) opt.seeds.push_back(static_cast<std::uint64_t>(s));
  opt.diayn_ks.clear();
  for (double k : parse_list(ks, "--ks")) opt.diayn_ks.push_back(static_cast<std::size_t>(k));
  const auto rows = trainer::gridworld_study(cfg, opt);
  std::string text = io::csv_line({"agent", "K", "seed", "steps", "coverage"});
  for (const auto& r : rows) {
    text += io::csv_line({r.agent, std::to_string(r.k), std::to_string(r.seed), std::to_string(r.steps),
                          io::format_number(r.coverage)});
  }
  if (!out_path.empty()) io::write_file(out_path, text);
  out << text;
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Contrastive skill discovery on toy environments"};
  app.require_subcommand(1);
  Common common;
  app.add_flag("--deterministic", common.deterministic, "Omit timestamps from logs and plots");
  app.add_option("--jobs", common.jobs, "Worker threads for independent runs")->check(CLI::PositiveNumber);

  std::string config_path, name, ckpt, task, csv, dump, out_path, svg, expert, skills = "0,0.25,0.5,0.75,1";
  std::string seeds = "1,2,3,4,5", ks = "4,16,100";
  std::optional<double> skill;
  std::size_t episodes = 0, resamples = 2000;
  double level = 0.95;
  std::uint64_t stats_seed = 7;
  int grid = 9, horizon = 20;
  std::int64_t steps = 50000;
  std::vector<std::string> csvs;

  auto* pre = app.add_subcommand("pretrain", "Reward-free skill pretraining");
  pre->add_option("--config", config_path, "Config file")->required();
  pre->add_option("--name", name, "Run directory name under CIC_RUN_DIR");
  pre->allow_extras();

  auto* fin = app.add_subcommand("finetune", "Skill sweep and extrinsic finetuning");
  fin->add_option("--checkpoint", ckpt)->required();
  fin->add_option("--task", task);
  fin->add_option("--csv", csv, "Score CSV to append to");
  fin->add_option("--name", name);
  fin->allow_extras();

  auto* ev = app.add_subcommand("eval", "Noise-free evaluation rollouts");
  ev->add_option("--checkpoint", ckpt)->required();
  ev->add_option("--task", task);
  ev->add_option("--skill", skill, "Constant skill value v (z = v * 1)");
  ev->add_option("--episodes", episodes);
  ev->add_option("--dump", dump, "Trajectory JSONL output");
  ev->allow_extras();

  auto* flow = app.add_subcommand("plot-flow", "Pointmass behaviour flow field");
  flow->add_option("--checkpoint", ckpt)->required();
  flow->add_option("--skills", skills, "Comma-separated skill values");
  flow->add_option("--grid", grid);
  flow->add_option("--horizon", horizon);
  flow->add_option("--out", out_path)->required();
  flow->add_option("--dump", dump);

  auto* rep = app.add_subcommand("report", "Aggregate statistics with bootstrap intervals");
  rep->add_option("--csv", csvs)->required();
  rep->add_option("--expert", expert)->required();
  rep->add_option("--out", out_path)->required();
  rep->add_option("--svg", svg);
  rep->add_option("--resamples", resamples);
  rep->add_option("--level", level);
  rep->add_option("--seed", stats_seed);

  auto* grid_cmd = app.add_subcommand("gridworld-study", "Coverage of DIAYN and CIC skills on the gridworld");
  grid_cmd->add_option("--config", config_path);
  grid_cmd->add_option("--steps", steps);
  grid_cmd->add_option("--seeds", seeds);
  grid_cmd->add_option("--ks", ks);
  grid_cmd->add_option("--out", out_path);
  grid_cmd->allow_extras();

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (pre->parsed()) return cmd_pretrain(config_path, name, overrides_from(pre->remaining()), common, out);
    if (fin->parsed()) return cmd_finetune(ckpt, task, csv, name, overrides_from(fin->remaining()), common, out);
    if (ev->parsed()) return cmd_eval(ckpt, task, skill, episodes, dump, overrides_from(ev->remaining()), out);
    if (flow->parsed()) return cmd_plot_flow(ckpt, skills, grid, horizon, out_path, dump, common, out);
    if (rep->parsed()) {
      return cmd_report(csvs, expert, out_path, svg, resamples, level, stats_seed, common, out);
    }
    if (grid_cmd->parsed()) {
      return cmd_gridworld_study(config_path, overrides_from(grid_cmd->remaining()), steps, seeds, ks, out_path,
                                 common, out);
    }
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const TrainingError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const CorruptionError& e) {
    err << "corrupt input: " << e.what() << "\n";
    return kExitCorruption;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitConfig;
}

}  // namespace cic::cli
