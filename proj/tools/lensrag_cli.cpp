#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "lensrag/answerer.hpp"
#include "lensrag/evalharness.hpp"
#include "lensrag/live_backends.hpp"
#include "lensrag/mock_backends.hpp"
#include "lensrag/retriever.hpp"
#include "lensrag/text_util.hpp"

namespace fs = std::filesystem;
using namespace lensrag;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

// Thrown for bad command-line or configuration input.
struct UsageError : Error {
  using Error::Error;
};

struct CommonOptions {
  std::string config_path;
  int jobs = 0;
  std::string cache_dir;
  std::string mock_dir;
  std::string retrieval;
  std::vector<std::string> branches;
  bool no_detector = false;
  bool no_decoupler = false;
  std::string prompt_dir;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "JSON pipeline configuration");
  cmd->add_option("--jobs", o.jobs, "Parallelism bound");
  cmd->add_option("--cache-dir", o.cache_dir, "Directory holding the persistent cache");
  cmd->add_option("--mock-backends", o.mock_dir, "Serve every backend from this fixture directory");
  cmd->add_option("--retrieval", o.retrieval, "none | mandatory | adaptive");
  cmd->add_option("--branches", o.branches, "visual,textual")->delimiter(',');
  cmd->add_flag("--no-detector", o.no_detector, "Disable the object detector");
  cmd->add_flag("--no-decoupler", o.no_decoupler, "Disable the query decoupler");
  cmd->add_option("--prompts", o.prompt_dir, "Directory with prompt template overrides");
}

PipelineConfig build_config(const CommonOptions& o) {
  PipelineConfig cfg;
  try {
    if (!o.config_path.empty()) {
      auto j = json::parse(read_file(o.config_path), nullptr, false);
      if (j.is_discarded()) throw UsageError("config file is not valid JSON: " + o.config_path);
      from_json(j, cfg);
    }
    if (o.jobs > 0) cfg.parallelism = o.jobs;
    if (!o.retrieval.empty()) cfg.retrieval_mode = parse_enum<RetrievalMode>(o.retrieval);
    if (!o.branches.empty()) {
      cfg.branches.clear();
      for (const auto& b : o.branches) cfg.branches.insert(parse_enum<Branch>(b));
    }
    if (o.no_detector) cfg.use_object_detector = false;
    if (o.no_decoupler) cfg.use_query_decoupler = false;
  } catch (const UsageError&) {
    throw;
  } catch (const DatasetError& e) {
    throw UsageError(e.what());
  } catch (const std::exception& e) {
    throw UsageError(std::string("invalid configuration: ") + e.what());
  }
  return validated(cfg);
}

std::string cache_file(const CommonOptions& o) { return (fs::path(o.cache_dir) / "cache.bin").string(); }

PipelineContext build_context(const CommonOptions& o) {
  PipelineContext ctx;
  ctx.cfg = build_config(o);
  try {
    if (!o.mock_dir.empty()) {
      ctx.backends = make_mock_backends(o.mock_dir);
    } else {
      LiveConfig live = LiveConfig::from_env();
      live.timeout_ms = ctx.cfg.fetch_timeout_ms;
      live.max_in_flight = ctx.cfg.parallelism;
      ctx.backends = make_live_backends(live);
    }
    if (!o.prompt_dir.empty()) ctx.prompts = PromptSet::with_overrides(o.prompt_dir);
  } catch (const InvalidParams& e) {
    throw UsageError(e.what());
  }
  if (!o.cache_dir.empty()) {
    fs::create_directories(o.cache_dir);
    ctx.cache->load(cache_file(o));
  }
  return ctx;
}

void save_cache(const CommonOptions& o, const PipelineContext& ctx) {
  if (!o.cache_dir.empty()) ctx.cache->save(cache_file(o));
}

std::shared_ptr<ChatBackend> judge_backend(const CommonOptions& o, PipelineContext& ctx) {
  if (!o.mock_dir.empty()) return std::make_shared<MockJudge>();
  return ctx.backends.chat;
}

std::string dataset_dir(const std::string& dataset) { return fs::path(dataset).parent_path().string(); }

std::vector<QueryTask> load_tasks(const std::string& path) {
  auto d = load_dataset(path);
  for (const auto& r : d.rejections) std::cerr << "rejected " << r << "\n";
  return d.tasks;
}

void write_meta(const std::string& out, const json& meta) { write_file(out + ".meta.json", meta.dump(2) + "\n"); }

void write_report_files(const std::string& prefix, const EvalReport& rep) {
  write_file(prefix + ".json", report_to_json(rep).dump(2) + "\n");
  write_file(prefix + ".txt", report_to_table(rep));
  write_file(prefix + ".csv", report_to_csv(rep));
}

void print_record(const AnswerRecord& r, bool trace) {
  if (trace) {
    std::cout << record_to_json(r).dump(2) << "\n";
    return;
  }
  std::cout << "answer: " << r.answer << "\n";
  std::cout << "mode: " << to_string(r.mode) << "\n";
  std::cout << "domain: " << r.predicted_domain << "\n";
  if (!r.flags.empty()) {
    std::cout << "flags:";
    for (const auto& f : r.flags) std::cout << " " << f;
    std::cout << "\n";
  }
  if (r.error) std::cout << "error: " << *r.error << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Demand-adaptive multimodal retrieval-augmented question answering"};
  app.require_subcommand(1);
  CommonOptions common;

  // ask
  auto* ask = app.add_subcommand("ask", "Answer one question about an image");
  std::string image, question, location;
  bool trace = false;
  ask->add_option("image", image, "Image path")->required();
  ask->add_option("question", question, "Question")->required();
  ask->add_option("--location", location, "Where the image was taken");
  ask->add_flag("--trace", trace, "Print the full answer record");
  add_common(ask, common);

  // run
  auto* run = app.add_subcommand("run", "Answer every task of a dataset");
  std::string dataset, out, system = "lensrag";
  run->add_option("dataset", dataset, "Dataset JSONL")->required();
  run->add_option("-o,--out", out, "Records JSONL")->required();
  run->add_option("--system", system, "lensrag | direct | textrag | imagerag | multimodalrag");
  add_common(run, common);

  // judge
  auto* jcmd = app.add_subcommand("judge", "Judge answer records against gold answers");
  std::string records_path;
  jcmd->add_option("dataset", dataset, "Dataset JSONL")->required();
  jcmd->add_option("records", records_path, "Records JSONL")->required();
  jcmd->add_option("-o,--out", out, "Judgments JSONL")->required();
  add_common(jcmd, common);

  // report
  auto* rep = app.add_subcommand("report", "Aggregate judged records into a report");
  std::string judgments_path, baseline_path, label;
  rep->add_option("dataset", dataset, "Dataset JSONL")->required();
  rep->add_option("records", records_path, "Records JSONL")->required();
  rep->add_option("judgments", judgments_path, "Judgments JSONL")->required();
  rep->add_option("-o,--out", out, "Output prefix for .json/.txt/.csv");
  rep->add_option("--baseline", baseline_path, "Judgments JSONL of the baseline run");
  rep->add_option("--label", label, "Run label");

  // ablate
  auto* abl = app.add_subcommand("ablate", "Run the component ablation table");
  abl->add_option("dataset", dataset, "Dataset JSONL")->required();
  abl->add_option("-o,--out", out, "Output prefix for .json/.txt");
  add_common(abl, common);

  // cache stats
  auto* cache = app.add_subcommand("cache", "Inspect the persistent cache");
  auto* cache_stats = cache->add_subcommand("stats", "Print cache counters and sizes");
  cache->require_subcommand(1);
  std::string stats_cache_dir;
  cache_stats->add_option("--cache-dir", stats_cache_dir, "Cache directory")->required();

  // read-url
  auto* read = app.add_subcommand("read-url", "Fetch a page and print the cleaned document");
  std::string url;
  read->add_option("url", url, "Page URL")->required();
  add_common(read, common);

  // retrieve --dry-run
  auto* retr = app.add_subcommand("retrieve", "Show the retrieval plan and URL set for a question");
  bool dry_run = false;
  retr->add_option("image", image, "Image path")->required();
  retr->add_option("question", question, "Question")->required();
  retr->add_flag("--dry-run", dry_run, "Stop before fetching pages")->required();
  add_common(retr, common);

  // stats
  auto* st = app.add_subcommand("stats", "Dataset statistics");
  bool as_json = false;
  st->add_option("dataset", dataset, "Dataset JSONL")->required();
  st->add_flag("--json", as_json, "Print JSON");

  // overlap
  auto* ov = app.add_subcommand("overlap", "Overlap of correct answers between runs");
  std::vector<std::string> runs;
  ov->add_option("judgments", runs, "Two or more judgments JSONL files")->required()->expected(2, -1);

  // errors
  auto* err = app.add_subcommand("errors", "Classify incorrect answers against annotated search logs");
  err->add_option("dataset", dataset, "Dataset JSONL")->required();
  err->add_option("records", records_path, "Records JSONL")->required();
  err->add_option("judgments", judgments_path, "Judgments JSONL")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*ask) {
      auto ctx = build_context(common);
      bool resized = false;
      const ImageBuf img = ingest_image(image, ctx.cfg, &resized);
      std::optional<std::string> loc;
      if (!location.empty()) loc = location;
      AnswerRecord r = answer_image("ask", img, question, loc, ctx);
      if (resized) r.flags.insert(r.flags.begin(), "resized");
      save_cache(common, ctx);
      print_record(r, trace);
      return r.error ? kExitRuntime : 0;
    }

    if (*run) {
      auto ctx = build_context(common);
      const auto d = load_dataset(dataset);
      for (const auto& r : d.rejections) std::cerr << "rejected " << r << "\n";
      std::vector<AnswerRecord> records;
      if (normalize_query(system) == "lensrag") records = answer_all(d.tasks, ctx, dataset_dir(dataset));
      else records = run_baseline(parse_baseline_kind(system), d.tasks, ctx, dataset_dir(dataset));
      write_records_jsonl(out, records);
      save_cache(common, ctx);
      std::size_t failed = 0;
      for (const auto& r : records) failed += r.error ? 1 : 0;
      write_meta(out, json{{"dataset", dataset},
                           {"system", system},
                           {"tasks", records.size()},
                           {"failed", failed},
                           {"rejections", d.rejections},
                           {"config", json(ctx.cfg)},
                           {"cache", json(ctx.cache->stats())}});
      std::cout << "wrote " << records.size() << " records to " << out;
      if (failed) std::cout << " (" << failed << " with errors)";
      std::cout << "\n";
      return 0;
    }

    if (*jcmd) {
      auto ctx = build_context(common);
      const auto tasks = load_tasks(dataset);
      const auto records = read_records_jsonl(records_path);
      auto backend = judge_backend(common, ctx);
      const auto judgments = judge_all(tasks, records, *backend, ctx.cfg.parallelism, ctx.prompts);
      write_judgments_jsonl(out, judgments);
      std::size_t correct = 0;
      for (const auto& j : judgments) correct += j.accuracy ? 1 : 0;
      std::cout << "judged " << judgments.size() << " records, " << correct << " correct\n";
      return 0;
    }

    if (*rep) {
      const auto tasks = load_tasks(dataset);
      const auto records = read_records_jsonl(records_path);
      const auto judgments = read_judgments_jsonl(judgments_path);
      EvalReport report = aggregate(judgments, tasks, records, label.empty() ? fs::path(records_path).stem().string() : label);
      const std::string meta_path = records_path + ".meta.json";
      if (fs::exists(meta_path)) {
        auto meta = json::parse(read_file(meta_path), nullptr, false);
        if (!meta.is_discarded() && meta.contains("config")) report.config = meta["config"];
      }
      if (!baseline_path.empty()) {
        const auto base = read_judgments_jsonl(baseline_path);
        EvalReport b;
        b.run_label = fs::path(baseline_path).stem().string();
        for (const auto& j : base) {
          ++b.overall.total;
          b.overall.correct += j.accuracy ? 1 : 0;
        }
        apply_baseline(report, b);
      }
      if (!out.empty()) write_report_files(out, report);
      std::cout << report_to_table(report);
      return 0;
    }

    if (*abl) {
      auto ctx = build_context(common);
      const auto tasks = load_tasks(dataset);
      auto backend = judge_backend(common, ctx);
      const auto rows = run_ablations(tasks, ctx, *backend, dataset_dir(dataset));
      save_cache(common, ctx);
      if (!out.empty()) {
        write_file(out + ".json", ablation_json(rows).dump(2) + "\n");
        write_file(out + ".txt", ablation_table(rows));
      }
      std::cout << ablation_table(rows);
      return 0;
    }

    if (*cache_stats) {
      TwoLayerCache c;
      const std::string path = (fs::path(stats_cache_dir) / "cache.bin").string();
      if (!fs::exists(path)) throw UsageError("no cache file at " + path);
      c.load(path);
      std::cout << json(c.stats()).dump(2) << "\n";
      return 0;
    }

    if (*read) {
      auto ctx = build_context(common);
      const std::string raw = with_retries(ctx.cfg.fetch_retries, [&] { return ctx.backends.fetcher->fetch_page(url); });
      const CleanDoc doc = ctx.backends.reader->read(raw, url);
      std::cout << json(doc).dump(2) << "\n";
      return 0;
    }

    if (*retr) {
      auto ctx = build_context(common);
      const ImageBuf img = ingest_image(image, ctx.cfg);
      const DryRun dr = retrieve_dry_run(ctx, img, question);
      save_cache(common, ctx);
      json j{{"plan", dr.plan}, {"sub_queries", dr.sub_queries}, {"regions", dr.regions}, {"urls", dr.urls}, {"flags", dr.trace.flags}};
      std::cout << j.dump(2) << "\n";
      return 0;
    }

    if (*st) {
      const auto s = dataset_stats(load_tasks(dataset));
      std::cout << (as_json ? stats_to_json(s).dump(2) + "\n" : stats_to_table(s));
      return 0;
    }

    if (*ov) {
      std::vector<std::vector<Judgment>> all;
      for (const auto& r : runs) all.push_back(read_judgments_jsonl(r));
      std::size_t w = 0;
      for (const auto& r : runs) w = std::max(w, fs::path(r).stem().string().size());
      std::cout << "Jaccard overlap of correct answers (%)\n" << std::string(w, ' ');
      for (const auto& r : runs) std::cout << "  " << fs::path(r).stem().string();
      std::cout << "\n";
      for (std::size_t i = 0; i < all.size(); ++i) {
        const std::string name = fs::path(runs[i]).stem().string();
        std::cout << name << std::string(w - name.size(), ' ');
        for (std::size_t k = 0; k < all.size(); ++k) {
          const std::string cell = format_fixed(round_half_up(overlap(all[i], all[k]), 2), 2);
          const std::size_t cw = fs::path(runs[k]).stem().string().size();
          std::cout << "  " << std::string(cw > cell.size() ? cw - cell.size() : 0, ' ') << cell;
        }
        std::cout << "\n";
      }
      return 0;
    }

    if (*err) {
      const auto tasks = load_tasks(dataset);
      std::map<std::string, AnswerRecord> recs;
      for (auto& r : read_records_jsonl(records_path)) recs[r.task_id] = std::move(r);
      std::map<std::string, Judgment> judg;
      for (auto& j : read_judgments_jsonl(judgments_path)) judg[j.task_id] = std::move(j);
      std::map<std::string, std::size_t> counts;
      for (const auto& t : tasks) {
        if (!recs.contains(t.id) || !judg.contains(t.id)) continue;
        if (judg.at(t.id).accuracy) continue;
        if (!t.search_log) {
          std::cout << t.id << "  (no search log)\n";
          continue;
        }
        const ErrorLabel l = classify_error(t, recs.at(t.id), judg.at(t.id));
        ++counts[std::string(to_string(l.type))];
        std::cout << t.id << "  " << to_string(l.type) << (l.low_confidence ? "  (low confidence)" : "") << "\n";
      }
      std::cout << "\n";
      for (const auto& [k, v] : counts) std::cout << k << ": " << v << "\n";
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error:\n";
    for (const auto& v : e.violations()) std::cerr << "  " << v.field << ": " << v.message << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
