// disjax: enrich an ontology's class hierarchy with disjointness axioms.
//
// Subcommands: closure, enrich, prune, eval, render-prompt. Summaries go to
// stdout, logs to stderr, machine-readable outputs only to files.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "disjax/algorithm1.hpp"
#include "disjax/closure.hpp"
#include "disjax/config.hpp"
#include "disjax/enrichment.hpp"
#include "disjax/errors.hpp"
#include "disjax/http_backend.hpp"
#include "disjax/knowledge_base.hpp"
#include "disjax/metrics.hpp"
#include "disjax/ntriples.hpp"
#include "disjax/oracle.hpp"
#include "disjax/pair_matrix.hpp"
#include "disjax/prompt.hpp"
#include "disjax/reports.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitParse = 2;
constexpr int kExitOracle = 3;
constexpr int kExitInternal = 4;

struct CliArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  bool dry_run = false;

  std::string ontology;
  std::string endpoint_url;
  std::string model_name;
  std::string cache_path;
  std::string strategy;
  std::string qa_mode;
  std::string selection;
  std::string assume_nonempty;

  std::string mock_gold;
  std::string mock_default = "not_disjoint";
  std::string gold;
  std::string matrix_path;
  std::string axioms_path;
  bool only_labeled = false;
  bool parse_report = false;
  std::uint64_t abort_after = 0;

  std::string rp_strategy;
  std::string rp_qa;
  std::string rp_label_a;
  std::string rp_label_b;
};

disjax::Config effective_config(const CliArgs& args) {
  disjax::Config cfg;
  if (!args.config_path.empty()) {
    cfg = disjax::load_config_file(args.config_path);
  }
  if (!args.ontology.empty()) cfg.ontology = args.ontology;
  if (!args.endpoint_url.empty()) cfg.endpoint_url = args.endpoint_url;
  if (!args.model_name.empty()) cfg.model_name = args.model_name;
  if (!args.cache_path.empty()) cfg.cache_path = args.cache_path;
  if (!args.strategy.empty()) {
    disjax::apply_config_entry(cfg, "strategy", args.strategy);
  }
  if (!args.qa_mode.empty()) {
    disjax::apply_config_entry(cfg, "qa_mode", args.qa_mode);
  }
  if (!args.selection.empty()) {
    disjax::apply_config_entry(cfg, "selection", args.selection);
  }
  if (!args.assume_nonempty.empty()) {
    disjax::apply_config_entry(cfg, "assume_nonempty", args.assume_nonempty);
  }
  if (args.seed) cfg.seed = *args.seed;
  return cfg;
}

disjax::KnowledgeBase load_ontology(const disjax::Config& cfg,
                                    disjax::ParseReport* report = nullptr) {
  if (cfg.ontology.empty()) {
    throw disjax::ConfigError(
        "no ontology given (config key `ontology` or --ontology)");
  }
  std::ifstream in(cfg.ontology, std::ios::binary);
  if (!in) {
    throw disjax::ConfigError("cannot open ontology file: " + cfg.ontology);
  }
  return disjax::parse_ntriples(in, disjax::VocabularyMap::defaults(), report);
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) {
    throw disjax::ConfigError("cannot write file: " + path.string());
  }
  out << content;
}

std::shared_ptr<disjax::ChatBackend> make_backend(const disjax::Config& cfg,
                                                  const CliArgs& args) {
  if (!args.mock_gold.empty()) {
    std::ifstream gold(args.mock_gold);
    if (!gold) {
      throw disjax::ConfigError("cannot open gold file: " + args.mock_gold);
    }
    const auto fallback = disjax::parse_label_token(args.mock_default);
    if (!fallback || (*fallback != disjax::PairLabel::Disjoint &&
                      *fallback != disjax::PairLabel::NotDisjoint)) {
      throw disjax::ConfigError(
          "--mock-default must be disjoint or not_disjoint");
    }
    const auto verdict = *fallback == disjax::PairLabel::Disjoint
                             ? disjax::VerdictValue::Disjoint
                             : disjax::VerdictValue::NotDisjoint;
    return std::make_shared<disjax::MockGoldBackend>(
        disjax::MockGoldBackend::from_tsv(gold, verdict));
  }
  if (!cfg.endpoint_url.empty()) {
    return std::make_shared<disjax::HttpChatBackend>(
        disjax::oracle_config_from(cfg));
  }
  throw disjax::ConfigError(
      "no oracle configured: set endpoint_url or pass --mock-gold");
}

int cmd_closure(const CliArgs& args) {
  const disjax::Config cfg = effective_config(args);
  disjax::ParseReport report;
  const disjax::KnowledgeBase kb = load_ontology(cfg, &report);
  std::cerr << "parsed " << report.total_statements << " statements ("
            << report.ignored << " ignored)\n";
  const auto cl = disjax::SubclassClosure::compute(kb);
  const auto result =
      disjax::run_algorithm1(kb, cl, {cfg.assume_nonempty});
  const disjax::PairMatrix& m = result.matrix;

  if (!args.dry_run) {
    fs::create_directories(args.out_dir);
    {
      std::ofstream out(fs::path(args.out_dir) / "matrix.tsv",
                        std::ios::trunc | std::ios::binary);
      m.export_tsv(out, kb, args.only_labeled);
    }
    write_text_file(fs::path(args.out_dir) / "diagnostics.json",
                    disjax::diagnostics_to_json(result.diagnostics, kb)
                            .dump(2) +
                        "\n");
    if (args.parse_report) {
      write_text_file(fs::path(args.out_dir) / "parse_report.json",
                      disjax::parse_report_to_json(report).dump(2) + "\n");
    }
  }

  std::cout << "classes: " << kb.class_count() << "\n"
            << "asserted_disjoint: " << kb.asserted_disjoint().size() << "\n"
            << "pairs: " << m.pair_count() << "\n"
            << "disjoint: " << m.count(disjax::PairLabel::Disjoint) << "\n"
            << "not_disjoint: " << m.count(disjax::PairLabel::NotDisjoint)
            << "\n"
            << "unknown: " << m.unknown_count() << "\n"
            << "conflicts: " << m.count(disjax::PairLabel::Conflict) << "\n";
  return kExitOk;
}

int cmd_enrich(const CliArgs& args) {
  disjax::Config cfg = effective_config(args);
  const disjax::KnowledgeBase kb = load_ontology(cfg);
  const auto cl = disjax::SubclassClosure::compute(kb);
  const disjax::PromptSpec spec{cfg.strategy, cfg.qa_mode};
  const disjax::SelectionPolicy policy{cfg.selection, cfg.seed};
  const std::string model =
      cfg.model_name.empty() ? "mock" : cfg.model_name;

  fs::create_directories(args.out_dir);
  const fs::path state_path = fs::path(args.out_dir) / "enrich_state.json";
  const fs::path events_path = fs::path(args.out_dir) / "events.jsonl";
  const fs::path matrix_path = fs::path(args.out_dir) / "matrix.tsv";
  const fs::path axioms_path = fs::path(args.out_dir) / "axioms.nt";

  disjax::PairMatrix matrix = disjax::PairMatrix::build(kb);
  disjax::EnrichStats stats;
  std::uint64_t start_ordinal = 0;

  if (auto loaded = disjax::load_enrich_state(state_path, kb)) {
    const disjax::EnrichState& st = loaded->state;
    if (st.policy.kind != policy.kind || st.policy.seed != policy.seed ||
        st.spec.strategy != spec.strategy || st.spec.qa_mode != spec.qa_mode ||
        st.model_name != model) {
      throw disjax::ConfigError(
          "existing state file " + state_path.string() +
          " was produced with different settings; delete it or match them");
    }
    matrix = loaded->matrix;
    stats = st.stats;
    start_ordinal = st.ordinal;
    std::cerr << "resuming after " << start_ordinal << " verdicts ("
              << matrix.unknown_count() << " unknown remain)\n";
  } else if (!args.matrix_path.empty()) {
    std::ifstream in(args.matrix_path);
    if (!in) {
      throw disjax::ConfigError("cannot open matrix file: " +
                                args.matrix_path);
    }
    matrix = disjax::PairMatrix::import_tsv(in, kb);
  } else {
    auto result = disjax::run_algorithm1(kb, cl, {cfg.assume_nonempty});
    matrix = std::move(result.matrix);
  }

  if (args.dry_run) {
    std::cout << "unknown: " << matrix.unknown_count() << "\n";
    return kExitOk;
  }

  if (cfg.cache_path.empty()) {
    cfg.cache_path = (fs::path(args.out_dir) / "transcript.jsonl").string();
  }
  disjax::OracleConfig oracle_cfg = disjax::oracle_config_from(cfg);
  oracle_cfg.model_name = model;
  disjax::LlmOracle oracle(make_backend(cfg, args), oracle_cfg);

  std::ofstream events(events_path, std::ios::app);
  if (!events) {
    throw disjax::ConfigError("cannot open event log: " +
                              events_path.string());
  }

  disjax::RunControl control;
  control.max_verdicts = args.abort_after;
  control.on_verdict = [&](const disjax::VerdictEvent& event,
                           const disjax::EnrichStats& live_stats) {
    events << disjax::event_log_line(event, kb) << '\n';
    events.flush();
    disjax::EnrichState st{policy, spec, model, live_stats,
                           event.ordinal + 1};
    disjax::save_enrich_state(state_path, kb, matrix, st);
  };

  const disjax::EnrichmentRun run = disjax::run_algorithm2(
      matrix, kb, cl, oracle, spec, policy, stats, start_ordinal, control);

  if (!run.completed) {
    std::cout << "interrupted: " << run.next_ordinal << " verdicts applied, "
              << matrix.unknown_count() << " unknown remain\n";
    return kExitOk;
  }

  // Completed runs land a final snapshot even when no verdict was needed.
  disjax::save_enrich_state(
      state_path, kb, matrix,
      {policy, spec, model, run.stats, run.next_ordinal});
  {
    std::ofstream out(matrix_path, std::ios::trunc | std::ios::binary);
    matrix.export_tsv(out, kb);
  }
  write_text_file(axioms_path,
                  disjax::emit_axioms(disjax::axioms_from_matrix(matrix), kb));

  std::cout << "pairs: " << matrix.pair_count() << "\n"
            << "initially_labeled: " << run.stats.initially_labeled << "\n"
            << "oracle_calls: " << run.stats.oracle_calls << "\n"
            << "propagated_disjoint: " << run.stats.propagated_disjoint << "\n"
            << "propagated_not_disjoint: "
            << run.stats.propagated_not_disjoint << "\n"
            << "overridden_verdicts: " << run.stats.overridden_verdicts << "\n"
            << "conflicts: " << run.stats.conflicts << "\n"
            << "disjoint: " << matrix.count(disjax::PairLabel::Disjoint)
            << "\n"
            << "not_disjoint: "
            << matrix.count(disjax::PairLabel::NotDisjoint) << "\n";
  return kExitOk;
}

int cmd_prune(const CliArgs& args) {
  const disjax::Config cfg = effective_config(args);
  const disjax::KnowledgeBase kb = load_ontology(cfg);
  const auto cl = disjax::SubclassClosure::compute(kb);

  if (args.axioms_path.empty() == args.matrix_path.empty()) {
    throw disjax::ConfigError(
        "prune needs exactly one of --axioms FILE.nt or --matrix FILE.tsv");
  }

  disjax::AxiomSet input;
  if (!args.axioms_path.empty()) {
    std::ifstream in(args.axioms_path, std::ios::binary);
    if (!in) {
      throw disjax::ConfigError("cannot open axiom file: " + args.axioms_path);
    }
    const disjax::KnowledgeBase axiom_kb =
        disjax::parse_ntriples(in, disjax::VocabularyMap::defaults());
    for (const auto& [a, b] : axiom_kb.asserted_disjoint()) {
      const auto ka = kb.find(axiom_kb.iri_of(a));
      const auto kb_b = kb.find(axiom_kb.iri_of(b));
      if (!ka || !kb_b) {
        throw disjax::InputError("axiom references a class missing from the "
                                 "ontology: <" +
                                 (ka ? axiom_kb.iri_of(b) : axiom_kb.iri_of(a)) +
                                 ">");
      }
      input.pairs.emplace_back(*ka, *kb_b);
    }
  } else {
    std::ifstream in(args.matrix_path);
    if (!in) {
      throw disjax::ConfigError("cannot open matrix file: " +
                                args.matrix_path);
    }
    const disjax::PairMatrix m = disjax::PairMatrix::import_tsv(in, kb);
    input = disjax::axioms_from_matrix(m);
  }

  const disjax::AxiomSet pruned = disjax::prune(input, kb, cl);
  if (!args.dry_run) {
    fs::create_directories(args.out_dir);
    write_text_file(fs::path(args.out_dir) / "axioms_pruned.nt",
                    disjax::emit_axioms(pruned, kb));
  }

  const std::size_t before = input.pairs.size();
  const std::size_t after = pruned.pairs.size();
  const long reduction =
      before == 0
          ? 0
          : std::lround(100.0 * static_cast<double>(before - after) /
                        static_cast<double>(before));
  std::cout << "pruned " << before << " -> " << after << " axioms ("
            << reduction << "% reduction)\n";
  return kExitOk;
}

int cmd_eval(const CliArgs& args) {
  disjax::Config cfg = effective_config(args);
  const disjax::KnowledgeBase kb = load_ontology(cfg);
  if (args.gold.empty()) {
    throw disjax::ConfigError("eval needs --gold FILE.tsv");
  }
  std::ifstream gold_in(args.gold);
  if (!gold_in) {
    throw disjax::ConfigError("cannot open gold file: " + args.gold);
  }
  const disjax::PairMatrix gold = disjax::PairMatrix::import_tsv(gold_in, kb);

  const disjax::PromptSpec spec{cfg.strategy, cfg.qa_mode};
  const std::string model = cfg.model_name.empty() ? "mock" : cfg.model_name;
  disjax::OracleConfig oracle_cfg = disjax::oracle_config_from(cfg);
  oracle_cfg.model_name = model;
  disjax::LlmOracle oracle(make_backend(cfg, args), oracle_cfg);

  const disjax::MetricsReport r = disjax::report(kb, gold, oracle, spec);
  const std::string row = disjax::metrics_tsv_row(r, model, spec);

  if (!args.dry_run) {
    fs::create_directories(args.out_dir);
    write_text_file(fs::path(args.out_dir) / "metrics.json",
                    disjax::metrics_to_json(r, model, spec).dump(2) + "\n");
    write_text_file(fs::path(args.out_dir) / "metrics.tsv", row + "\n");
  }
  std::cout << row << "\n";
  return kExitOk;
}

int cmd_render_prompt(const CliArgs& args) {
  const auto strategy = disjax::parse_strategy_token(args.rp_strategy);
  if (!strategy) {
    throw disjax::ConfigError("unknown strategy \"" + args.rp_strategy +
                              "\" (naive|task|fewshot)");
  }
  const auto qa = disjax::parse_qa_mode_token(args.rp_qa);
  if (!qa) {
    throw disjax::ConfigError("unknown qa mode \"" + args.rp_qa +
                              "\" (positive|negative)");
  }
  const auto rendered = disjax::render_prompt({*strategy, *qa},
                                              args.rp_label_a, args.rp_label_b);
  std::cout << rendered.instruction << "\n" << rendered.question << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Enrich an ontology's class hierarchy with disjointness "
               "axioms derived logically and from a yes/no language-model "
               "oracle."};
  app.require_subcommand(1);

  CliArgs args;
  app.add_option("--config", args.config_path, "Key = value config file");
  app.add_option("--out", args.out_dir, "Output directory (default: out)");
  app.add_option("--seed", args.seed, "Selection seed override");
  app.add_flag("--dry-run", args.dry_run, "Plan only; write nothing");

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--ontology", args.ontology, "Ontology file (.nt)");
  };
  auto add_oracle_opts = [&](CLI::App* cmd) {
    cmd->add_option("--endpoint", args.endpoint_url,
                    "Chat-completions endpoint URL");
    cmd->add_option("--model", args.model_name, "Model name");
    cmd->add_option("--cache", args.cache_path, "Transcript cache path");
    cmd->add_option("--strategy", args.strategy,
                    "Prompt strategy: naive|task|fewshot");
    cmd->add_option("--qa", args.qa_mode, "QA mode: positive|negative");
    cmd->add_option("--mock-gold", args.mock_gold,
                    "Answer from this gold TSV instead of an endpoint");
    cmd->add_option("--mock-default", args.mock_default,
                    "Mock verdict for unlisted pairs");
  };

  CLI::App* closure = app.add_subcommand(
      "closure", "Derive every pair label that follows from the ontology");
  add_common(closure);
  closure->add_option("--assume-nonempty", args.assume_nonempty,
                      "true|false: treat named classes as non-empty");
  closure->add_flag("--only-labeled", args.only_labeled,
                    "Export only non-unknown pairs");
  closure->add_flag("--parse-report", args.parse_report,
                    "Also write parse_report.json");

  CLI::App* enrich = app.add_subcommand(
      "enrich", "Resolve all unknown pairs through the oracle");
  add_common(enrich);
  add_oracle_opts(enrich);
  enrich->add_option("--selection", args.selection,
                     "Pair selection: random|lex");
  enrich->add_option("--assume-nonempty", args.assume_nonempty,
                     "true|false: treat named classes as non-empty");
  enrich->add_option("--matrix", args.matrix_path,
                     "Start from this pair-matrix TSV");
  enrich->add_option("--abort-after", args.abort_after,
                     "Stop after N verdicts (state stays resumable)");

  CLI::App* prune = app.add_subcommand(
      "prune", "Reduce a disjointness set to a minimal equivalent subset");
  add_common(prune);
  prune->add_option("--axioms", args.axioms_path, "Axiom N-Triples input");
  prune->add_option("--matrix", args.matrix_path, "Pair-matrix TSV input");

  CLI::App* eval = app.add_subcommand(
      "eval", "Score an oracle against gold labels");
  add_common(eval);
  add_oracle_opts(eval);
  eval->add_option("--gold", args.gold, "Gold pair-matrix TSV");

  CLI::App* render = app.add_subcommand(
      "render-prompt", "Print the instruction and question for one pair");
  render->add_option("strategy", args.rp_strategy, "naive|task|fewshot")
      ->required();
  render->add_option("qa", args.rp_qa, "positive|negative")->required();
  render->add_option("label_a", args.rp_label_a, "First class label")
      ->required();
  render->add_option("label_b", args.rp_label_b, "Second class label")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (closure->parsed()) return cmd_closure(args);
    if (enrich->parsed()) return cmd_enrich(args);
    if (prune->parsed()) return cmd_prune(args);
    if (eval->parsed()) return cmd_eval(args);
    if (render->parsed()) return cmd_render_prompt(args);
    throw disjax::ConfigError("no subcommand given");
  } catch (const disjax::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const disjax::TransportError& e) {
    std::cerr << "oracle transport error: " << e.what() << "\n";
    return kExitOracle;
  } catch (const disjax::ProtocolError& e) {
    std::cerr << "oracle protocol error: " << e.what() << "\n";
    return kExitOracle;
  } catch (const disjax::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const disjax::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const disjax::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const disjax::ContractViolation& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
