// mtkit — multilingual corpus curation, mixing and MT-evaluation toolkit.
//
// Subcommands: clean | analyze-tokenizer | plan | mix | build-sft |
//              make-prompts | score | report
//
// Exit codes: 0 success, 1 validation/usage error, 2 runtime error. Every
// run writes a config echo next to its primary output so results are
// reproducible from the echo alone.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <thread>

#include "mtkit/bleu.h"
#include "mtkit/cleaning.h"
#include "mtkit/corpus_io.h"
#include "mtkit/eval.h"
#include "mtkit/icl.h"
#include "mtkit/language.h"
#include "mtkit/length_ratio.h"
#include "mtkit/mixer.h"
#include "mtkit/sft.h"
#include "mtkit/shards.h"
#include "mtkit/tokenizer.h"
#include "mtkit/util.h"
#include "mtkit/worker_pool.h"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mtkit;

namespace {

struct GlobalOpts {
  uint64_t seed = 0;
  unsigned jobs = std::thread::hardware_concurrency();
  std::string config_path;
  json config;  // parsed --config file, may be null
};

// Fills option values from the --config JSON for flags not given on the
// command line: explicit flags win, then the subcommand's section, then
// top-level keys.
class ConfigMerge {
 public:
  ConfigMerge(CLI::App* sub, const json& config) : sub_(sub) {
    if (config.is_object()) {
      top_ = config;
      std::string name = sub->get_name();
      if (config.contains(name) && config.at(name).is_object())
        section_ = config.at(name);
    }
  }

  template <typename T>
  void merge(const std::string& flag, T& value) const {
    if (sub_->count("--" + flag) > 0) return;
    if (section_.contains(flag))
      value = section_.at(flag).get<T>();
    else if (top_.contains(flag))
      value = top_.at(flag).get<T>();
  }

 private:
  CLI::App* sub_;
  json top_ = json::object();
  json section_ = json::object();
};

void write_config_echo(const fs::path& beside, const std::string& subcommand,
                       json opts) {
  opts["subcommand"] = subcommand;
  std::ofstream out(beside, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write config echo: " + beside.string());
  out << opts.dump(2) << '\n';
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(strip_trailing_cr(std::move(line)));
  return lines;
}

int report_line_errors(const std::vector<LineError>& errors, const std::string& path) {
  for (const auto& e : errors)
    std::cerr << path << ":" << e.line_no << ": " << e.message << "\n";
  return static_cast<int>(errors.size());
}

// ---------------------------------------------------------------- clean ---

struct CleanArgs {
  std::string in, format = "jsonl", second, src_lang, tgt_lang;
  std::string sim_sidecar;
  double min_sim = 0.75, max_sim = 0.99;
  std::string on_missing = "error";
  double min_conf = 0.5;
  int64_t min_chars = 1, max_chars = 4096;
  double max_char_ratio = 9.0;
  bool no_reject_copy = false;
  bool no_langid = false;
  std::string out, report;
};

void setup_clean(CLI::App& app, GlobalOpts& g) {
  auto args = std::make_shared<CleanArgs>();
  auto* sub = app.add_subcommand("clean", "Run the cleaning cascade over a parallel corpus");
  sub->add_option("--in", args->in, "input corpus")->required();
  sub->add_option("--format", args->format, "jsonl | tsv | moses-pair");
  sub->add_option("--second", args->second, "target-side file (moses-pair)");
  sub->add_option("--src-lang", args->src_lang, "source language (moses-pair)");
  sub->add_option("--tgt-lang", args->tgt_lang, "target language (moses-pair)");
  sub->add_option("--sim-sidecar", args->sim_sidecar, "JSONL {index, similarity} sidecar");
  sub->add_option("--min-sim", args->min_sim, "similarity band lower bound (inclusive)");
  sub->add_option("--max-sim", args->max_sim, "similarity band upper bound (inclusive)");
  sub->add_option("--on-missing", args->on_missing, "error | drop for unscored records");
  sub->add_option("--min-conf", args->min_conf, "language-id confidence floor");
  sub->add_option("--min-chars", args->min_chars, "minimum codepoints per side");
  sub->add_option("--max-chars", args->max_chars, "maximum codepoints per side");
  sub->add_option("--max-char-ratio", args->max_char_ratio, "length ratio cap");
  sub->add_flag("--no-reject-copy", args->no_reject_copy, "keep src==tgt copies");
  sub->add_flag("--no-langid", args->no_langid, "skip the language-id stage");
  sub->add_option("--out", args->out, "survivor JSONL")->required();
  sub->add_option("--report", args->report, "report JSON")->required();

  sub->callback([args, sub, &g] {
    ConfigMerge cfg(sub, g.config);
    cfg.merge("min-sim", args->min_sim);
    cfg.merge("max-sim", args->max_sim);
    cfg.merge("min-conf", args->min_conf);
    cfg.merge("min-chars", args->min_chars);
    cfg.merge("max-chars", args->max_chars);
    cfg.merge("max-char-ratio", args->max_char_ratio);
    cfg.merge("on-missing", args->on_missing);

    CleaningConfig config;
    config.heuristic = {args->min_chars, args->max_chars, args->max_char_ratio,
                        !args->no_reject_copy};
    config.min_confidence = args->min_conf;
    config.similarity.min = args->min_sim;
    config.similarity.max = args->max_sim;
    if (args->on_missing == "error")
      config.similarity.on_missing = MissingSimilarity::Error;
    else if (args->on_missing == "drop")
      config.similarity.on_missing = MissingSimilarity::Drop;
    else
      throw CLI::ValidationError("--on-missing must be error or drop");

    std::vector<LineError> errors;
    auto stream = open_parallel(
        args->in, corpus_format_from_string(args->format),
        [&errors](const LineError& e) { errors.push_back(e); }, args->second,
        args->src_lang, args->tgt_lang);

    std::map<size_t, double> sidecar;
    if (!args->sim_sidecar.empty()) sidecar = load_similarity_sidecar(args->sim_sidecar);

    std::ofstream out(args->out, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write: " + args->out);
    NgramLangScorer scorer;
    auto report = run_pipeline(
        *stream, config, args->no_langid ? nullptr : &scorer,
        [&out](const ParallelRecord& r) { out << parallel_to_json_line(r) << '\n'; },
        args->sim_sidecar.empty() ? nullptr : &sidecar);
    report_line_errors(errors, args->in);

    std::ofstream rep(args->report, std::ios::binary);
    if (!rep) throw std::runtime_error("cannot write: " + args->report);
    rep << report.to_json(config) << '\n';

    write_config_echo(args->out + ".config.json", "clean",
                      {{"in", args->in},
                       {"format", args->format},
                       {"second", args->second},
                       {"src-lang", args->src_lang},
                       {"tgt-lang", args->tgt_lang},
                       {"sim-sidecar", args->sim_sidecar},
                       {"min-sim", args->min_sim},
                       {"max-sim", args->max_sim},
                       {"on-missing", args->on_missing},
                       {"min-conf", args->min_conf},
                       {"min-chars", args->min_chars},
                       {"max-chars", args->max_chars},
                       {"max-char-ratio", args->max_char_ratio},
                       {"reject-copy", !args->no_reject_copy},
                       {"langid", !args->no_langid},
                       {"out", args->out},
                       {"report", args->report}});
  });
}

// ---------------------------------------------------- analyze-tokenizer ---

struct AnalyzeArgs {
  std::string pairs, format = "jsonl", tokenizer = "whitespace";
  std::string averaging = "mean";
  std::string out, csv;
};

void setup_analyze(CLI::App& app, GlobalOpts& g) {
  auto args = std::make_shared<AnalyzeArgs>();
  auto* sub = app.add_subcommand("analyze-tokenizer",
                                 "Per-language token length ratios over an English-centric corpus");
  sub->add_option("--pairs", args->pairs, "English-source parallel corpus")->required();
  sub->add_option("--format", args->format, "jsonl | tsv");
  sub->add_option("--tokenizer", args->tokenizer, "whitespace | char | vocab:PATH");
  sub->add_option("--averaging", args->averaging, "mean (per-sentence) | sum (token totals)");
  sub->add_option("--out", args->out, "report JSON")->required();
  sub->add_option("--csv", args->csv, "optional (lang, mean_ratio) CSV");

  sub->callback([args, sub, &g] {
    ConfigMerge cfg(sub, g.config);
    cfg.merge("tokenizer", args->tokenizer);
    cfg.merge("averaging", args->averaging);

    RatioAveraging averaging;
    if (args->averaging == "mean")
      averaging = RatioAveraging::MeanOfRatios;
    else if (args->averaging == "sum")
      averaging = RatioAveraging::SumOfTokens;
    else
      throw CLI::ValidationError("--averaging must be mean or sum");

    std::vector<LineError> errors;
    auto stream = open_parallel(args->pairs, corpus_format_from_string(args->format),
                                [&errors](const LineError& e) { errors.push_back(e); });
    auto records = read_all(*stream);
    report_line_errors(errors, args->pairs);

    auto tok = make_tokenizer(args->tokenizer);
    auto report = analyze_corpus(records, *tok, averaging);

    std::ofstream out(args->out, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write: " + args->out);
    out << report.to_json() << '\n';
    if (!args->csv.empty()) {
      std::ofstream csv(args->csv, std::ios::binary);
      if (!csv) throw std::runtime_error("cannot write: " + args->csv);
      csv << report.to_csv();
    }
    write_config_echo(args->out + ".config.json", "analyze-tokenizer",
                      {{"pairs", args->pairs},
                       {"format", args->format},
                       {"tokenizer", args->tokenizer},
                       {"averaging", args->averaging},
                       {"out", args->out},
                       {"csv", args->csv}});
  });
}

// ----------------------------------------------------------------- plan ---

struct PlanArgs {
  std::string avail;
  int64_t budget = 2000000000;
  std::string strategy = "pfms";
  std::string out;
};

void setup_plan(CLI::App& app, GlobalOpts& g) {
  auto args = std::make_shared<PlanArgs>();
  auto* sub = app.add_subcommand("plan", "Split per-language token budgets across sources");
  sub->add_option("--avail", args->avail, "availability manifest JSON")->required();
  sub->add_option("--budget", args->budget, "tokens per language");
  sub->add_option("--strategy", args->strategy, "mono | parallel | pfms | ratio:M:P");
  sub->add_option("--out", args->out, "plan JSON")->required();

  sub->callback([args, sub, &g] {
    ConfigMerge cfg(sub, g.config);
    cfg.merge("budget", args->budget);
    cfg.merge("strategy", args->strategy);

    auto strategy = MixStrategy::parse(args->strategy);
    auto avails = load_availability(args->avail);
    auto plans = plan_all(avails, args->budget, strategy);
    save_plans(args->out, plans);
    write_config_echo(args->out + ".config.json", "plan",
                      {{"avail", args->avail},
                       {"budget", args->budget},
                       {"strategy", strategy.str()},
                       {"out", args->out}});
  });
}

// ------------------------------------------------------------------ mix ---

struct MixArgs {
  std::string plan, lang;
  std::string mono, mono_format = "jsonl";
  std::string pairs, pairs_format = "jsonl";
  int64_t shard_size = 100000;
  int64_t sep_cost = 0;
  std::string tokenizer = "whitespace";
  bool gzip = false;
  std::string out;
};

void setup_mix(CLI::App& app, GlobalOpts& g) {
  auto args = std::make_shared<MixArgs>();
  auto* sub = app.add_subcommand("mix", "Emit deterministic training shards for one plan row");
  sub->add_option("--plan", args->plan, "plan JSON from `plan`")->required();
  sub->add_option("--lang", args->lang, "which plan row (default: sole row)");
  sub->add_option("--mono", args->mono, "monolingual corpus")->required();
  sub->add_option("--mono-format", args->mono_format, "jsonl | tsv");
  sub->add_option("--pairs", args->pairs, "parallel corpus")->required();
  sub->add_option("--pairs-format", args->pairs_format, "jsonl | tsv");
  sub->add_option("--shard-size", args->shard_size, "samples per shard");
  sub->add_option("--sep-cost", args->sep_cost, "token cost charged per pair separator");
  sub->add_option("--tokenizer", args->tokenizer, "budget tokenizer spec");
  sub->add_flag("--gzip", args->gzip, "gzip shards");
  sub->add_option("--out", args->out, "output directory")->required();

  sub->callback([args, sub, &g] {
    ConfigMerge cfg(sub, g.config);
    cfg.merge("shard-size", args->shard_size);
    cfg.merge("sep-cost", args->sep_cost);
    cfg.merge("tokenizer", args->tokenizer);

    auto plans = load_plans(args->plan);
    const AllocationPlan* plan = nullptr;
    if (!args->lang.empty()) {
      for (const auto& p : plans)
        if (p.lang == args->lang) plan = &p;
      if (!plan)
        throw CLI::ValidationError("plan file has no row for " + args->lang);
    } else if (plans.size() == 1) {
      plan = &plans.front();
    } else {
      throw CLI::ValidationError("plan file has " + std::to_string(plans.size()) +
                                 " rows; pick one with --lang");
    }

    std::vector<LineError> mono_errors, pair_errors;
    auto mono = open_mono(args->mono, corpus_format_from_string(args->mono_format),
                          [&mono_errors](const LineError& e) { mono_errors.push_back(e); });
    auto pairs = open_parallel(args->pairs, corpus_format_from_string(args->pairs_format),
                               [&pair_errors](const LineError& e) { pair_errors.push_back(e); });

    MixOptions options;
    options.seed = g.seed;
    options.shard_size = args->shard_size;
    options.separator_cost = args->sep_cost;
    options.gzip = args->gzip;
    options.tokenizer_spec = args->tokenizer;
    WorkerPool pool(g.jobs);
    emit_shards(*mono, *pairs, *plan, options, args->out, &pool);
    report_line_errors(mono_errors, args->mono);
    report_line_errors(pair_errors, args->pairs);

    write_config_echo(fs::path(args->out) / "config.json", "mix",
                      {{"plan", args->plan},
                       {"lang", plan->lang},
                       {"mono", args->mono},
                       {"mono-format", args->mono_format},
                       {"pairs", args->pairs},
                       {"pairs-format", args->pairs_format},
                       {"seed", g.seed},
                       {"shard-size", args->shard_size},
                       {"sep-cost", args->sep_cost},
                       {"tokenizer", args->tokenizer},
                       {"gzip", args->gzip},
                       {"out", args->out}});
  });
}

// ------------------------------------------------------------ build-sft ---

struct BuildSftArgs {
  std::string plan;
  std::vector<std::string> sources;
  int64_t sample_noneng = 0;
  int64_t per_direction = 100;
  bool leading_space = false;
  std::string out, report;
};

void setup_build_sft(CLI::App& app, GlobalOpts& g) {
  auto args = std::make_shared<BuildSftArgs>();
  auto* sub = app.add_subcommand("build-sft", "Assemble the instruction-finetuning dataset");
  sub->add_option("--plan", args->plan, "sft plan JSON")->required();
  sub->add_option("--sources", args->sources,
                  "tagged sources: TAG:PATH[:QUALITY_SIDECAR], tags: "
                  "curated|dev|web|noneng")
      ->required()
      ->expected(-1);
  sub->add_option("--sample-directions", args->sample_noneng,
                  "append N seeded non-English direction quotas to the plan");
  sub->add_option("--per-direction", args->per_direction,
                  "quota per sampled direction");
  sub->add_flag("--leading-space", args->leading_space,
                "completion carries one leading space");
  sub->add_option("--out", args->out, "dataset JSONL")->required();
  sub->add_option("--report", args->report, "composition report JSON")->required();

  sub->callback([args, sub, &g] {
    ConfigMerge cfg(sub, g.config);
    cfg.merge("per-direction", args->per_direction);

    auto plan = SftPlan::from_json_file(args->plan);
    if (plan.seed == 0) plan.seed = g.seed;
    if (args->sample_noneng > 0) {
      auto sampled =
          sample_directions(args->sample_noneng, args->per_direction, plan.seed);
      plan.quotas.insert(plan.quotas.end(), sampled.begin(), sampled.end());
    }

    std::vector<TaggedSource> sources;
    for (const auto& spec : args->sources) {
      auto parts = split(spec, ':');
      if (parts.size() < 2 || parts.size() > 3)
        throw CLI::ValidationError("source spec must be TAG:PATH[:SIDECAR]: " + spec);
      TaggedSource src;
      src.tag = source_tag_from_string(std::string(parts[0]));
      std::vector<LineError> errors;
      std::string path(parts[1]);
      auto stream = open_parallel(path, CorpusFormat::Jsonl,
                                  [&errors](const LineError& e) { errors.push_back(e); });
      src.records = read_all(*stream);
      report_line_errors(errors, path);
      if (parts.size() == 3)
        src.quality = load_quality_sidecar(std::string(parts[2]));
      sources.push_back(std::move(src));
    }

    RenderOptions render;
    render.completion_leading_space = args->leading_space;
    auto dataset = build_sft(plan, sources, render);
    write_sft_jsonl(args->out, dataset.records);
    std::ofstream rep(args->report, std::ios::binary);
    if (!rep) throw std::runtime_error("cannot write: " + args->report);
    rep << dataset.composition.to_json() << '\n';

    write_config_echo(args->out + ".config.json", "build-sft",
                      {{"plan", args->plan},
                       {"sources", args->sources},
                       {"sample-directions", args->sample_noneng},
                       {"per-direction", args->per_direction},
                       {"leading-space", args->leading_space},
                       {"seed", plan.seed},
                       {"quality-threshold", plan.quality_threshold},
                       {"out", args->out},
                       {"report", args->report}});
  });
}

// ----------------------------------------------------------- make-prompts ---

struct MakePromptsArgs {
  std::string test, dev, format = "jsonl";
  size_t shots = 5;
  std::string out;
};

void setup_make_prompts(CLI::App& app, GlobalOpts& g) {
  auto args = std::make_shared<MakePromptsArgs>();
  auto* sub = app.add_subcommand("make-prompts",
                                 "Render in-context prompts for each test direction");
  sub->add_option("--test", args->test, "test parallel corpus")->required();
  sub->add_option("--dev", args->dev, "exemplar pool corpus")->required();
  sub->add_option("--format", args->format, "jsonl | tsv");
  sub->add_option("--k", args->shots, "exemplars per prompt");
  sub->add_option("--out", args->out, "prompts JSONL")->required();

  sub->callback([args, sub, &g] {
    ConfigMerge cfg(sub, g.config);
    cfg.merge("k", args->shots);

    std::vector<LineError> errors;
    auto fmt = corpus_format_from_string(args->format);
    auto test_stream = open_parallel(args->test, fmt, [&errors](const LineError& e) {
      errors.push_back(e);
    });
    auto dev_stream = open_parallel(args->dev, fmt, [&errors](const LineError& e) {
      errors.push_back(e);
    });
    auto tasks = make_eval_tasks(read_all(*test_stream), read_all(*dev_stream));
    report_line_errors(errors, args->test + "," + args->dev);

    std::ofstream out(args->out, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write: " + args->out);
    for (const auto& task : tasks) {
      auto exemplars = select_exemplars(
          task.dev_pairs, args->shots,
          SeededRng::derive(g.seed, task.direction.str()).next());
      for (const auto& [src, ref] : task.test_pairs) {
        auto prompt = build_icl_prompt(exemplars, src);
        json j = {{"src_lang", task.direction.src},
                  {"tgt_lang", task.direction.tgt},
                  {"prompt", prompt.rendered},
                  {"ref", ref}};
        out << j.dump() << '\n';
      }
    }
    write_config_echo(args->out + ".config.json", "make-prompts",
                      {{"test", args->test},
                       {"dev", args->dev},
                       {"format", args->format},
                       {"k", args->shots},
                       {"seed", g.seed},
                       {"out", args->out}});
  });
}

// ---------------------------------------------------------------- score ---

struct ScoreArgs {
  std::string hyps, refs, tokenizer = "whitespace";
  std::string smoothing = "none";
  double floor = 0.01;
  std::string out;
};

void setup_score(CLI::App& app, GlobalOpts& g) {
  auto args = std::make_shared<ScoreArgs>();
  auto* sub = app.add_subcommand("score", "Corpus BLEU of hypotheses against references");
  sub->add_option("--hyps", args->hyps, "hypotheses, one per line")->required();
  sub->add_option("--refs", args->refs, "references, one per line")->required();
  sub->add_option("--tokenizer", args->tokenizer, "whitespace | char | vocab:PATH");
  sub->add_option("--smoothing", args->smoothing, "none | floor");
  sub->add_option("--floor", args->floor, "floor value for zero precisions");
  sub->add_option("--out", args->out, "result JSON (default stdout)");

  sub->callback([args, sub, &g] {
    ConfigMerge cfg(sub, g.config);
    cfg.merge("tokenizer", args->tokenizer);
    cfg.merge("smoothing", args->smoothing);

    BleuOptions options;
    if (args->smoothing == "none")
      options.smoothing = BleuSmoothing::None;
    else if (args->smoothing == "floor")
      options.smoothing = BleuSmoothing::Floor;
    else
      throw CLI::ValidationError("--smoothing must be none or floor");
    options.floor = args->floor;

    auto hyps = read_lines(args->hyps);
    auto refs = read_lines(args->refs);
    auto tok = make_tokenizer(args->tokenizer);
    auto result = corpus_bleu(hyps, refs, *tok, options);
    if (args->out.empty()) {
      std::cout << result.to_json() << "\n";
    } else {
      std::ofstream out(args->out, std::ios::binary);
      if (!out) throw std::runtime_error("cannot write: " + args->out);
      out << result.to_json() << '\n';
      write_config_echo(args->out + ".config.json", "score",
                        {{"hyps", args->hyps},
                         {"refs", args->refs},
                         {"tokenizer", args->tokenizer},
                         {"smoothing", args->smoothing},
                         {"floor", args->floor},
                         {"out", args->out}});
    }
  });
}

// --------------------------------------------------------------- report ---

struct ReportArgs {
  std::string in;
  std::string metrics;
  std::string out;
};

void setup_report(CLI::App& app, GlobalOpts& g) {
  auto args = std::make_shared<ReportArgs>();
  auto* sub = app.add_subcommand("report",
                                 "Aggregate direction reports into group and resource-class means");
  sub->add_option("--in", args->in, "reports JSONL file, or directory of *reports.jsonl")
      ->required();
  sub->add_option("--metrics", args->metrics, "external metric sidecar JSONL");
  sub->add_option("--out", args->out, "summary JSON")->required();

  sub->callback([args, sub, &g] {
    (void)g;
    (void)sub;
    std::vector<DirectionReport> reports;
    if (fs::is_directory(args->in)) {
      std::vector<fs::path> files;
      for (const auto& entry : fs::directory_iterator(args->in)) {
        auto name = entry.path().filename().string();
        if (name.size() >= 13 && name.substr(name.size() - 13) == "reports.jsonl")
          files.push_back(entry.path());
      }
      std::sort(files.begin(), files.end());
      if (files.empty())
        throw CLI::ValidationError("no *reports.jsonl files under " + args->in);
      for (const auto& f : files) {
        auto part = load_reports(f.string());
        reports.insert(reports.end(), part.begin(), part.end());
      }
    } else {
      reports = load_reports(args->in);
    }
    if (!args->metrics.empty()) apply_metric_sidecar(args->metrics, reports);
    auto summary = aggregate(reports);
    std::ofstream out(args->out, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write: " + args->out);
    out << summary.to_json() << '\n';
    write_config_echo(args->out + ".config.json", "report",
                      {{"in", args->in}, {"metrics", args->metrics}, {"out", args->out}});
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multilingual corpus curation, mixing and MT-evaluation toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOpts g;
  app.add_option("--seed", g.seed, "seed recorded in all outputs")
      ->envname("MTKIT_SEED");
  app.add_option("--jobs", g.jobs, "worker threads")->envname("MTKIT_JOBS");
  app.add_option("--config", g.config_path, "JSON config merged under explicit flags")
      ->envname("MTKIT_CONFIG");

  setup_clean(app, g);
  setup_analyze(app, g);
  setup_plan(app, g);
  setup_mix(app, g);
  setup_build_sft(app, g);
  setup_make_prompts(app, g);
  setup_score(app, g);
  setup_report(app, g);

  // Subcommand callbacks fire during parse, so the --config file has to be
  // loaded up front; scan argv for it directly.
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    std::string value;
    if (a == "--config" && i + 1 < argc) value = argv[i + 1];
    else if (a.rfind("--config=", 0) == 0) value = a.substr(9);
    else continue;
    std::ifstream in(value, std::ios::binary);
    if (!in) {
      std::cerr << "cannot open config: " << value << "\n";
      return 1;
    }
    g.config = json::parse(in, nullptr, false);
    if (g.config.is_discarded()) {
      std::cerr << "config is not valid JSON: " << value << "\n";
      return 1;
    }
  }
  if (g.config.is_null() && std::getenv("MTKIT_CONFIG")) {
    std::ifstream in(std::getenv("MTKIT_CONFIG"), std::ios::binary);
    if (in) g.config = json::parse(in, nullptr, false);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
