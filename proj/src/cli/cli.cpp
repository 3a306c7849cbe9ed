// Copyright 2026 The ptrkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ptr/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "ptr/corpus.hpp"
#include "ptr/error.hpp"
#include "ptr/evalkit.hpp"
#include "ptr/kernels.hpp"
#include "ptr/prompt.hpp"
#include "ptr/rng.hpp"
#include "ptr/rule_dsl.hpp"
#include "ptr/scoring.hpp"
#include "ptr/trainer.hpp"

#ifndef PTR_VERSION
#define PTR_VERSION "0.0.0"
#endif

namespace ptr::cli {

namespace {

namespace fs = std::filesystem;

constexpr std::uint64_t kInitStream = 2;  // same stream the sweep uses for model init

struct Io {
  std::ostream& out;
  std::ostream& err;
};

// Options shared by commands that read a run profile.
struct ProfileOptions {
  std::string profile = "desk";
  std::string config_path;

  void add_to(CLI::App* app) {
    app->add_option("--profile", profile, "Built-in profile: desk or paper")->capture_default_str();
    app->add_option("--config", config_path, "TOML file overriding the chosen profile");
  }

  config::RunConfig resolve() const {
    const config::RunConfig base = config::builtin_profile(profile);
    if (config_path.empty()) return base;
    std::ifstream in(config_path, std::ios::binary);
    if (!in) throw DataError("cannot read config " + config_path);
    std::ostringstream text;
    text << in.rdbuf();
    return config::parse_config(text.str(), config_path, base);
  }
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
std::vector<T> parse_number_list(const std::string& text, std::string_view flag) {
  std::vector<T> out;
  for (const auto& item : split_list(text)) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size() || v < 0) throw std::invalid_argument(item);
      out.push_back(static_cast<T>(v));
    } catch (const std::exception&) {
      throw UsageError(std::string(flag) + " expects comma-separated non-negative integers, got '" + text + "'");
    }
  }
  if (out.empty()) throw UsageError(std::string(flag) + " is empty");
  return out;
}

prompt::PromptSchema compile_spec(const dsl::TaskSpec& spec, const Io& io) {
  const auto report = dsl::validate(spec);
  for (const auto& f : report.findings) {
    if (f.severity == dsl::Finding::Severity::kWarning) io.err << "warning [" << f.code << "] " << f.message << "\n";
  }
  return prompt::compile(spec);
}

corpus::Dataset load_data(const std::string& path, const std::vector<std::string>& classes) {
  corpus::Dataset data = corpus::load_jsonl(path);
  corpus::check_labels(data, classes);
  return data;
}

std::vector<Instance> gather(std::initializer_list<const corpus::Dataset*> sets) {
  std::vector<Instance> out;
  for (const auto* d : sets) {
    if (d) out.insert(out.end(), d->instances.begin(), d->instances.end());
  }
  return out;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string history_csv(const trainer::TrainHistory& h) {
  std::string out = "step,lr,loss\n";
  for (const auto& s : h.steps) out += std::to_string(s.step) + "," + exact(s.lr) + "," + exact(s.loss) + "\n";
  return out;
}

std::string epochs_csv(const trainer::TrainHistory& h) {
  std::string out = "epoch,train_loss,dev_f1\n";
  for (const auto& e : h.epochs) out += std::to_string(e.epoch) + "," + exact(e.train_loss) + "," + exact(e.dev_f1) + "\n";
  return out;
}

std::string predictions_tsv(const corpus::Dataset& data, const std::vector<std::string>& preds) {
  std::string out = "id\tgold\tpredicted\n";
  for (std::size_t i = 0; i < preds.size(); ++i) {
    out += data.instances[i].id + "\t" + data.instances[i].label + "\t" + preds[i] + "\n";
  }
  return out;
}

std::vector<std::string> golds_of(const corpus::Dataset& data) {
  std::vector<std::string> out;
  for (const auto& inst : data.instances) out.push_back(inst.label);
  return out;
}

void write_out(const std::string& path, const std::string& text, const Io& io) {
  if (path.empty() || path == "-") {
    io.out << text;
  } else {
    evalkit::write_text(path, text);
  }
}

// ---------------------------------------------------------------- compile

struct CompileOptions {
  std::string spec;
  std::string out;
};

int cmd_compile(const CompileOptions& o, const Io& io) {
  const auto schema = compile_spec(dsl::load_task_spec(o.spec), io);
  write_out(o.out, prompt::schema_to_json(schema).dump(2) + "\n", io);
  return kExitOk;
}

// ---------------------------------------------------------------- inspect

struct InspectOptions {
  std::string path;
};

bool is_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path);
  char magic[8] = {};
  in.read(magic, sizeof magic);
  return in.gcount() == 8 && std::string_view(magic, 8) == "PTRMODEL";
}

int cmd_inspect(const InspectOptions& o, const Io& io) {
  if (is_checkpoint(o.path)) {
    const auto loaded = mlm::TinyMLM::load(o.path);
    const auto& m = loaded.model;
    const auto& c = m.config();
    io.out << "checkpoint: " << o.path << "\n"
           << "objective: " << mlm::objective_name(loaded.objective) << "\n"
           << "model: d_model=" << c.d_model << " n_layers=" << c.n_layers << " n_heads=" << c.n_heads
           << " d_ff=" << c.d_ff << " max_len=" << c.max_len << "\n"
           << "vocabulary: " << m.vocab().size() << " entries, " << m.vocab().learnable_count()
           << " learnable tokens\n"
           << "parameters: " << m.params().count() << "\n"
           << "classes: " << m.class_labels().size() << "\n";
    if (loaded.schema) io.out << "\n" << prompt::inspect(*loaded.schema);
    return kExitOk;
  }
  const fs::path p(o.path);
  if (p.extension() == ".json") {
    std::ifstream in(p, std::ios::binary);
    nlohmann::ordered_json doc;
    try {
      doc = nlohmann::ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(o.path + ": " + e.what());
    }
    io.out << prompt::inspect(prompt::schema_from_json(doc));
    return kExitOk;
  }
  io.out << prompt::inspect(compile_spec(dsl::load_task_spec(o.path), io));
  return kExitOk;
}

// ---------------------------------------------------------------- reverse

struct ReverseOptions {
  std::string spec;
  std::string classes;
  bool all = false;
  std::string out;
  std::string render;
  std::size_t limit = 3;
};

int cmd_reverse(const ReverseOptions& o, const Io& io) {
  const auto spec = dsl::load_task_spec(o.spec);
  std::set<std::string> subset;
  if (o.all == !o.classes.empty()) throw UsageError("reverse: give exactly one of --classes or --all");
  if (o.all) {
    for (const auto& rule : spec.rules) {
      const bool binary = std::any_of(rule.conjuncts.begin(), rule.conjuncts.end(), [&](const dsl::Conjunct& c) {
        const auto* p = spec.find_predicate(c.predicate);
        return p && p->arity() == 2;
      });
      if (binary && rule.class_label != spec.negative_class) subset.insert(rule.class_label);
    }
  } else {
    for (const auto& c : split_list(o.classes)) subset.insert(c);
  }
  const auto reversed = prompt::reverse_relations(spec, subset);
  if (o.render.empty()) {
    write_out(o.out, dsl::print_task_spec(reversed), io);
    return kExitOk;
  }
  const auto forward_schema = compile_spec(spec, io);
  const auto reversed_schema = compile_spec(reversed, io);
  const auto data = corpus::load_jsonl(o.render);
  std::string text;
  for (std::size_t i = 0; i < std::min(o.limit, data.size()); ++i) {
    const auto& inst = data.instances[i];
    const auto cls = reversed_schema.class_index(inst.label);
    const bool rev = cls && reversed_schema.classes[*cls].reversed;
    text += inst.id + " (" + inst.label + (rev ? ", reversed" : "") + ")\n";
    text += "  forward:  " + prompt::to_display(prompt::render(forward_schema, inst)) + "\n";
    text += "  reversed: " + prompt::to_display(prompt::render(reversed_schema, inst, prompt::Orientation::kReversed)) +
            "\n";
  }
  write_out(o.out, text, io);
  return kExitOk;
}

// ---------------------------------------------------------------- gen

struct GenOptions {
  ProfileOptions profile;
  std::string spec;
  std::optional<std::size_t> n;
  std::optional<std::uint64_t> seed;
  std::optional<double> noise;
  std::optional<double> distractor_rate;
  std::string out;
};

int cmd_gen(const GenOptions& o, const Io& io) {
  const auto cfg = o.profile.resolve();
  const auto spec = dsl::load_task_spec(o.spec);
  compile_spec(spec, io);  // reject specs whose corpus could not be rendered
  corpus::SurfaceOptions surface;
  surface.distractor_rate = o.distractor_rate.value_or(cfg.synthetic.distractor_rate);
  if (!(surface.distractor_rate >= 0.0 && surface.distractor_rate <= 1.0)) {
    throw UsageError("--distractor-rate must lie in [0, 1]");
  }
  const double noise = o.noise.value_or(cfg.synthetic.noise_rate);
  if (!(noise >= 0.0 && noise < 1.0)) throw UsageError("--noise must lie in [0, 1)");
  const auto data = corpus::generate_synthetic(spec, o.n.value_or(cfg.synthetic.n_per_class),
                                               resolve_seed(o.seed, cfg.train.seed), noise, surface);
  write_out(o.out, corpus::to_jsonl(data), io);
  return kExitOk;
}

// ---------------------------------------------------------------- init-model

struct InitOptions {
  ProfileOptions profile;
  std::string spec;
  std::vector<std::string> data;
  std::optional<std::uint64_t> seed;
  std::string objective;
  std::string out;
};

int cmd_init(const InitOptions& o, const Io& io) {
  const auto cfg = o.profile.resolve();
  const auto schema = compile_spec(dsl::load_task_spec(o.spec), io);
  std::vector<Instance> instances;
  for (const auto& path : o.data) {
    const auto d = load_data(path, schema.class_labels());
    instances.insert(instances.end(), d.instances.begin(), d.instances.end());
  }
  const auto objective = o.objective.empty() ? cfg.train.objective : mlm::parse_objective(o.objective);
  mlm::TinyMLM model(cfg.model, mlm::build_vocab(schema, instances), schema.class_labels());
  const std::uint64_t seed = resolve_seed(o.seed, cfg.train.seed);
  model.initialize(derive_seed(seed, kInitStream));
  model.save(o.out, objective, &schema);
  io.out << "wrote " << o.out << ": " << model.params().count() << " parameters, vocabulary "
         << model.vocab().size() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- train

struct TrainOptions {
  ProfileOptions profile;
  std::string spec;
  std::string data;
  std::string dev;
  std::string test;
  std::optional<std::uint64_t> seed;
  std::string objective;
  std::string out;
  std::string manifest;
};

InputFile input_file(const std::string& path) {
  return {fs::absolute(path).lexically_normal().string(), file_sha256(path)};
}

// Runs the training described by m (inputs, config, seed) into out_dir and
// completes m with the output digests.
int execute_train(RunManifest& m, const fs::path& out_dir, const Io& io) {
  const auto& in = m.inputs;
  const auto schema = compile_spec(dsl::load_task_spec(in.at("spec").path), io);
  const auto labels = schema.class_labels();
  const auto train_set = load_data(in.at("train").path, labels);
  corpus::Dataset dev_set;
  dev_set.split = "dev";
  dev_set.classes = labels;
  if (in.count("dev")) dev_set = load_data(in.at("dev").path, labels);
  std::optional<corpus::Dataset> test_set;
  if (in.count("test")) test_set = load_data(in.at("test").path, labels);

  const auto vocab = mlm::build_vocab(schema, gather({&train_set, &dev_set, test_set ? &*test_set : nullptr}));
  mlm::TinyMLM model(m.config.model, vocab, labels);
  model.initialize(derive_seed(m.seed, kInitStream));
  trainer::TrainConfig tcfg = m.config.train;
  tcfg.seed = m.seed;
  const auto result = trainer::train(model, schema, train_set, dev_set, tcfg);

  fs::create_directories(out_dir);
  std::map<std::string, std::string> files;
  files["history.csv"] = history_csv(result.history);
  files["epochs.csv"] = epochs_csv(result.history);
  if (test_set) {
    const auto preds = trainer::predict_all(result.best, schema, *test_set, tcfg.objective);
    const auto report = evalkit::micro_f1(preds, golds_of(*test_set), schema.negative_class);
    files["predictions.tsv"] = predictions_tsv(*test_set, preds);
    files["report.json"] = evalkit::report_to_json(report).dump(2) + "\n";
    io.out << "test micro-F1 " << evalkit::percent(report.micro_f1) << " on " << test_set->size() << " instances\n";
  }
  for (const auto& [name, text] : files) {
    evalkit::write_text(out_dir / name, text);
    m.outputs[name] = sha256_hex(text);
  }
  result.best.save(out_dir / "model.ckpt", tcfg.objective, &schema);
  m.outputs["model.ckpt"] = file_sha256(out_dir / "model.ckpt");
  evalkit::write_text(out_dir / "manifest.json", manifest_to_json(m).dump(2) + "\n");

  const auto& h = result.history;
  io.out << "trained " << h.steps.size() << " steps over " << h.epochs.size() << " epochs; loss "
         << exact(h.initial_loss) << " -> " << exact(h.final_loss) << "; best epoch " << h.best_epoch
         << (h.dev_empty ? " (no dev set)" : "") << "\n"
         << "run directory " << out_dir.string() << "\n";
  return kExitOk;
}

int cmd_train(const TrainOptions& o, CLI::App* sub, const Io& io) {
  if (o.out.empty()) {
    io.err << sub->help();
    throw UsageError("train: --out is required");
  }
  RunManifest m;
  if (!o.manifest.empty()) {
    if (!o.spec.empty() || !o.data.empty() || !o.dev.empty() || !o.test.empty() ||
        !o.profile.config_path.empty()) {
      throw UsageError("train: --manifest replaces --spec, --data, --dev, --test and --config");
    }
    std::ifstream in(o.manifest, std::ios::binary);
    if (!in) throw DataError("cannot read manifest " + o.manifest);
    try {
      m = manifest_from_json(nlohmann::ordered_json::parse(in));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(o.manifest + ": " + e.what());
    }
    if (m.command != "train") throw DataError(o.manifest + ": not a train manifest");
    for (const auto& [role, file] : m.inputs) {
      if (file_sha256(file.path) != file.sha256) {
        throw DataError("input '" + role + "' (" + file.path + ") changed since the manifest was written");
      }
    }
    try {
      kernels::select(kernels::parse_backend(m.kernel_backend));
    } catch (const UsageError& e) {
      throw DataError(std::string("cannot repeat the run bit for bit: ") + e.what());
    }
    m.outputs.clear();
  } else {
    if (o.spec.empty() || o.data.empty()) {
      io.err << sub->help();
      throw UsageError("train: --spec and --data are required (or --manifest)");
    }
    m.config = o.profile.resolve();
    if (!o.objective.empty()) m.config.train.objective = mlm::parse_objective(o.objective);
    m.seed = resolve_seed(o.seed, m.config.train.seed);
    m.config.train.seed = m.seed;
    m.inputs["spec"] = input_file(o.spec);
    m.inputs["train"] = input_file(o.data);
    if (!o.dev.empty()) m.inputs["dev"] = input_file(o.dev);
    if (!o.test.empty()) m.inputs["test"] = input_file(o.test);
    m.kernel_backend = std::string(kernels::backend_name(kernels::active_backend()));
  }
  m.tool_version = PTR_VERSION;
  m.command = "train";
  m.created_utc = utc_now();
  return execute_train(m, o.out, io);
}

// ---------------------------------------------------------------- eval

struct EvalOptions {
  std::string model;
  std::string data;
  std::string spec;
  std::string report = "json";
  std::string out;
  std::string predictions;
  bool map_unknown = false;
};

int cmd_eval(const EvalOptions& o, const Io& io) {
  if (o.report != "json" && o.report != "csv") throw UsageError("--report must be json or csv");
  auto loaded = mlm::TinyMLM::load(o.model);
  std::optional<prompt::PromptSchema> schema = loaded.schema;
  if (!o.spec.empty()) schema = compile_spec(dsl::load_task_spec(o.spec), io);
  if (!schema) throw DataError(o.model + " stores no schema; pass --spec");
  if (schema->class_labels() != loaded.model.class_labels()) {
    throw DataError("spec classes differ from the classes the model was trained on");
  }
  mlm::TinyMLM model = loaded.model;
  if (o.map_unknown) {
    mlm::ModelConfig cfg = model.config();
    cfg.map_unknown = true;
    mlm::TinyMLM mapped(cfg, model.vocab(), model.class_labels());
    mapped.params() = model.params();
    model = std::move(mapped);
  }
  const auto data = load_data(o.data, schema->class_labels());
  const auto preds = trainer::predict_all(model, *schema, data, loaded.objective);
  const auto report = evalkit::micro_f1(preds, golds_of(data), schema->negative_class);
  write_out(o.out, o.report == "json" ? evalkit::report_to_json(report).dump(2) + "\n" : evalkit::report_csv(report),
            io);
  if (!o.predictions.empty()) evalkit::write_text(o.predictions, predictions_tsv(data, preds));
  return kExitOk;
}

// ---------------------------------------------------------------- sweep

struct SweepOptions {
  ProfileOptions profile;
  std::string spec;
  std::string train_pool;
  std::string dev_pool;
  std::string test;
  std::string fewshot;  // K list override
  std::string seeds;    // seed list override
  std::string methods = "ptr,cls-baseline";
  std::string out;
  std::string std_out;
  std::string cells;
};

std::string default_std_path(const std::string& out) {
  fs::path p(out);
  return (p.parent_path() / (p.stem().string() + "_std" + p.extension().string())).string();
}

int cmd_sweep(const SweepOptions& o, const Io& io) {
  auto cfg = o.profile.resolve();
  if (!o.fewshot.empty()) cfg.fewshot.ks = parse_number_list<int>(o.fewshot, "--fewshot");
  if (!o.seeds.empty()) cfg.fewshot.seeds = parse_number_list<std::uint64_t>(o.seeds, "--seeds");
  std::vector<mlm::Objective> methods;
  for (const auto& name : split_list(o.methods)) methods.push_back(mlm::parse_objective(name));
  if (methods.empty()) throw UsageError("--methods is empty");

  const auto schema = compile_spec(dsl::load_task_spec(o.spec), io);
  const auto labels = schema.class_labels();
  const evalkit::SweepData data{load_data(o.train_pool, labels), load_data(o.dev_pool, labels),
                                load_data(o.test, labels)};
  std::vector<evalkit::SweepRow> rows;
  std::string cells = "method,K,seed,f1,error\n";
  for (const auto objective : methods) {
    trainer::TrainConfig tcfg = cfg.fewshot_train();
    tcfg.objective = objective;
    const std::string method(mlm::objective_name(objective));
    rows.push_back(evalkit::sweep_fewshot(schema, data, cfg.model, cfg.fewshot, tcfg, [&](const evalkit::SweepCell& c) {
      io.err << method << " K=" << c.k << " seed=" << c.seed << ": "
             << (c.error ? "failed: " + *c.error : evalkit::percent(c.f1)) << "\n";
      cells += method + "," + std::to_string(c.k) + "," + std::to_string(c.seed) + "," +
               (c.error ? "" : exact(c.f1)) + "," + (c.error ? "\"" + *c.error + "\"" : "") + "\n";
    }));
  }
  const std::string table = evalkit::sweep_csv(rows);
  evalkit::write_text(o.out, table);
  evalkit::write_text(o.std_out.empty() ? default_std_path(o.out) : o.std_out, evalkit::sweep_std_csv(rows));
  if (!o.cells.empty()) evalkit::write_text(o.cells, cells);
  io.out << table;
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const Io io{out, err};
  CLI::App app{"ptr: prompt tuning with rules on a desk-scale masked language model", "ptr"};
  app.set_version_flag("--version", PTR_VERSION);
  app.require_subcommand(1);

  CompileOptions compile;
  auto* c = app.add_subcommand("compile", "Validate a rule spec and write its prompt schema as JSON");
  c->add_option("spec", compile.spec, "Rule-language file (.ptr)")->required();
  c->add_option("--out", compile.out, "Schema JSON path (stdout when omitted)");

  InspectOptions inspect;
  auto* i = app.add_subcommand("inspect", "Show the template and verbalizer table of a spec, schema or checkpoint");
  i->add_option("path", inspect.path, "Spec (.ptr), schema (.json) or checkpoint")->required();

  ReverseOptions reverse;
  auto* r = app.add_subcommand("reverse", "Print a spec with relations reversed, or show reversed renderings");
  r->add_option("spec", reverse.spec, "Rule-language file")->required();
  r->add_option("--classes", reverse.classes, "Comma-separated classes to reverse");
  r->add_flag("--all", reverse.all, "Reverse every non-negative class with a binary predicate");
  r->add_option("--render", reverse.render, "JSONL file whose first instances are shown in both orientations");
  r->add_option("--limit", reverse.limit, "Instances to show with --render")->capture_default_str();
  r->add_option("--out", reverse.out, "Output path (stdout when omitted)");

  GenOptions gen;
  auto* g = app.add_subcommand("gen", "Generate a synthetic JSONL corpus for a spec");
  gen.profile.add_to(g);
  g->add_option("--spec", gen.spec, "Rule-language file")->required();
  g->add_option("--n", gen.n, "Instances per class (profile [synthetic].n_per_class)");
  g->add_option("--seed", gen.seed, "Generator seed (PTR_SEED overrides)");
  g->add_option("--noise", gen.noise, "Fraction of relabelled instances");
  g->add_option("--distractor-rate", gen.distractor_rate, "Probability of a distractor clause");
  g->add_option("--out", gen.out, "JSONL path (stdout when omitted)");

  InitOptions init;
  auto* im = app.add_subcommand("init-model", "Write a freshly initialized checkpoint");
  init.profile.add_to(im);
  im->add_option("--spec", init.spec, "Rule-language file")->required();
  im->add_option("--data", init.data, "JSONL files whose words enter the vocabulary")->required();
  im->add_option("--seed", init.seed, "Base seed; weights use a stream derived from it (PTR_SEED overrides)");
  im->add_option("--objective", init.objective, "ptr or cls-baseline (profile default)");
  im->add_option("--out", init.out, "Checkpoint path")->required();

  TrainOptions train;
  auto* t = app.add_subcommand("train", "Train a model and write a run directory with its manifest");
  train.profile.add_to(t);
  t->add_option("--spec", train.spec, "Rule-language file");
  t->add_option("--data", train.data, "Training JSONL");
  t->add_option("--dev", train.dev, "Dev JSONL used for checkpoint selection");
  t->add_option("--test", train.test, "Test JSONL; writes predictions and a report");
  t->add_option("--seed", train.seed, "Training seed (PTR_SEED overrides)");
  t->add_option("--objective", train.objective, "ptr or cls-baseline (profile default)");
  t->add_option("--out", train.out, "Run directory");
  t->add_option("--manifest", train.manifest, "Repeat the run recorded in this manifest.json");

  EvalOptions eval;
  auto* e = app.add_subcommand("eval", "Evaluate a checkpoint on a JSONL file");
  e->add_option("--model", eval.model, "Checkpoint")->required();
  e->add_option("--data", eval.data, "JSONL to evaluate")->required();
  e->add_option("--spec", eval.spec, "Spec overriding the schema stored in the checkpoint");
  e->add_option("--report", eval.report, "json or csv")->capture_default_str();
  e->add_option("--out", eval.out, "Report path (stdout when omitted)");
  e->add_option("--predictions", eval.predictions, "Write id/gold/predicted TSV here");
  e->add_flag("--map-unknown", eval.map_unknown, "Map out-of-vocabulary words to [UNK]");

  SweepOptions sweep;
  auto* s = app.add_subcommand("sweep", "Few-shot sweep over K values and seeds for each method");
  sweep.profile.add_to(s);
  s->add_option("--spec", sweep.spec, "Rule-language file")->required();
  s->add_option("--train-pool", sweep.train_pool, "JSONL pool the K training shots are drawn from")->required();
  s->add_option("--dev-pool", sweep.dev_pool, "JSONL pool the K dev shots are drawn from")->required();
  s->add_option("--test", sweep.test, "Test JSONL")->required();
  s->add_option("--fewshot", sweep.fewshot, "Comma-separated K values (profile [fewshot].ks)");
  s->add_option("--seeds", sweep.seeds, "Comma-separated seeds (profile [fewshot].seeds)");
  s->add_option("--methods", sweep.methods, "Comma-separated objectives")->capture_default_str();
  s->add_option("--out", sweep.out, "Mean F1 table CSV")->required();
  s->add_option("--std-out", sweep.std_out, "Std table CSV (default <out>_std.csv)");
  s->add_option("--cells", sweep.cells, "Per-cell CSV");

  try {
    std::vector<std::string> reversed_args(args.rbegin(), args.rend());
    app.parse(reversed_args);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (c->parsed()) return cmd_compile(compile, io);
    if (i->parsed()) return cmd_inspect(inspect, io);
    if (r->parsed()) return cmd_reverse(reverse, io);
    if (g->parsed()) return cmd_gen(gen, io);
    if (im->parsed()) return cmd_init(init, io);
    if (t->parsed()) return cmd_train(train, t, io);
    if (e->parsed()) return cmd_eval(eval, io);
    if (s->parsed()) return cmd_sweep(sweep, io);
    return kExitUsage;
  } catch (const UsageError& ex) {
    err << "ptr: " << ex.what() << "\n";
    return kExitUsage;
  } catch (const NumericError& ex) {
    err << "ptr: numeric failure: " << ex.what() << "\n";
    return kExitNumeric;
  } catch (const Error& ex) {
    err << "ptr: " << ex.what() << "\n";
    return kExitData;
  } catch (const fs::filesystem_error& ex) {
    err << "ptr: " << ex.what() << "\n";
    return kExitData;
  }
}

}  // namespace ptr::cli
