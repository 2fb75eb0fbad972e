// Copyright 2026 The geocorpus Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// geocorpus: command-line driver for every pipeline stage.
//
// Exit status: 0 success, 1 runtime failure, 2 usage error. Failures print a
// single JSON line on stderr.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "geocorpus/corpus_model.h"
#include "geocorpus/eval_set.h"
#include "geocorpus/generation.h"
#include "geocorpus/ingest.h"
#include "geocorpus/judge.h"
#include "geocorpus/masking.h"
#include "geocorpus/numeric.h"
#include "geocorpus/review.h"
#include "geocorpus/review_server.h"
#include "geocorpus/run_manifest.h"
#include "geocorpus/scoring.h"
#include "geocorpus/self_instruct.h"
#include "geocorpus/slicing.h"
#include "geocorpus/text_util.h"
#include "geocorpus/train_config.h"

namespace {

using namespace geocorpus;
namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string out = "out";
  int jobs = 4;
  std::optional<uint64_t> seed;
  std::string stub;
  std::string endpoint;
  std::string model;
  std::string token_env = "GEOCORPUS_API_TOKEN";
  std::string token_file;
  std::string cache;
  int retries = 3;
};

uint64_t RequireSeed(const Common& c, const std::string& why) {
  if (!c.seed) throw UsageError("--seed is required " + why);
  return *c.seed;
}

std::string OutPath(const Common& c, const std::string& name) {
  return (fs::path(c.out) / name).string();
}

void WriteOutput(RunManifest& m, const std::string& path, const std::string& contents) {
  WriteFile(path, contents);
  m.AddOutput(path);
}

template <typename T>
std::string JsonLines(const std::vector<T>& items) {
  std::string out;
  for (const T& item : items) out += ToJson(item).dump() + "\n";
  return out;
}

std::string SkipLines(const std::vector<SkipRecord>& skips) {
  std::string out;
  for (const SkipRecord& s : skips) {
    out += OrderedJson{{"source_id", s.source_id}, {"reason", s.reason}}.dump() + "\n";
  }
  return out;
}

struct GenStack {
  std::unique_ptr<GenerationClient> client;
  std::unique_ptr<GenerationCache> cache;
  std::unique_ptr<GenerationService> service;
};

GenStack MakeGeneration(const Common& c, RunManifest& m) {
  GenStack g;
  std::string cache_path = c.cache;
  if (!c.stub.empty()) {
    g.client = StubGenerationClient::FromFile(c.stub);
    m.AddInput(c.stub);
    m.SetOption("stub", c.stub);
  } else if (!c.endpoint.empty()) {
    HttpClientConfig config;
    config.url = c.endpoint;
    config.model = c.model;
    config.token = ResolveToken(c.token_env, c.token_file);
    g.client = std::make_unique<HttpGenerationClient>(config);
    m.SetOption("endpoint", c.endpoint);
    m.SetOption("model", c.model);
    if (cache_path.empty()) cache_path = OutPath(c, "generation_cache.jsonl");
  } else {
    throw UsageError("this command calls a generation model; pass --stub or --endpoint");
  }
  if (!cache_path.empty()) g.cache = std::make_unique<GenerationCache>(cache_path);
  RetryPolicy retry;
  retry.max_attempts = std::max(1, c.retries);
  g.service = std::make_unique<GenerationService>(*g.client, g.cache.get(), retry, c.jobs);
  return g;
}

Corpus LoadCorpusDir(const std::string& dir, RunManifest& m) {
  if (!fs::is_directory(dir)) throw std::runtime_error("corpus directory not found: " + dir);
  Corpus corpus;
  auto load = [&](const char* name, DocumentKind kind, auto& into) {
    const fs::path p = fs::path(dir) / name;
    if (!fs::exists(p)) return;
    m.AddInput(p.string());
    using T = typename std::decay_t<decltype(into)>::value_type;
    for (Document& d : ReadCorpusJsonl(p.string(), kind)) into.push_back(std::get<T>(std::move(d)));
  };
  load("code.jsonl", DocumentKind::kCode, corpus.code);
  load("operator.jsonl", DocumentKind::kOperator, corpus.operators);
  load("dataset.jsonl", DocumentKind::kDataset, corpus.datasets);
  load("encyclopedic.jsonl", DocumentKind::kEncyclopedic, corpus.encyclopedic);
  return corpus;
}

std::vector<Document> CorpusDocuments(const Corpus& corpus, DocumentKind kind) {
  std::vector<Document> out;
  switch (kind) {
    case DocumentKind::kCode: out.assign(corpus.code.begin(), corpus.code.end()); break;
    case DocumentKind::kOperator:
      out.assign(corpus.operators.begin(), corpus.operators.end());
      break;
    case DocumentKind::kDataset: out.assign(corpus.datasets.begin(), corpus.datasets.end()); break;
    case DocumentKind::kEncyclopedic:
      out.assign(corpus.encyclopedic.begin(), corpus.encyclopedic.end());
      break;
  }
  return out;
}

std::vector<TaskKind> ParseTaskKinds(const std::vector<std::string>& names) {
  std::vector<TaskKind> out;
  for (const std::string& n : names) {
    auto k = ParseTaskKind(n);
    if (!k) throw UsageError("unknown task kind: " + n);
    out.push_back(*k);
  }
  return out;
}

// Keeps each triple with probability `ratio`, decided per triple id.
std::vector<InstructionTriple> SampleTriples(std::vector<InstructionTriple> triples,
                                             double ratio, uint64_t seed) {
  if (ratio >= 1.0) return triples;
  std::vector<InstructionTriple> out;
  for (InstructionTriple& t : triples) {
    DeterministicRng rng(MixSeed(seed, t.triple_id));
    if (rng.Unit() < ratio) out.push_back(std::move(t));
  }
  return out;
}

// ---------------------------------------------------------------------------

struct IngestArgs {
  std::string manifest;
};

int RunIngest(const Common& c, const IngestArgs& a) {
  RunManifest m("ingest", c.out);
  m.AddInput(a.manifest);
  const CorpusManifest manifest = LoadManifest(a.manifest);
  for (const ManifestEntry& e : manifest.entries) m.AddInput(e.path);
  m.SetSeed(manifest.seed);
  const IngestResult result = IngestSources(manifest, c.jobs);
  for (const std::string& p : WriteIngestOutputs(result, c.out)) m.AddOutput(p);
  m.Write();
  std::cout << result.report.ToTable();
  std::cout << "accepted " << result.corpus.size() << " documents, rejected "
            << result.rejects.size() << " records\n";
  return 0;
}

struct SliceArgs {
  std::string corpus;
  std::string templates;
  std::vector<std::string> tasks;
  double sample_ratio = 1.0;
};

int RunSlice(const Common& c, const SliceArgs& a) {
  RunManifest m("slice", c.out);
  if (a.sample_ratio <= 0.0 || a.sample_ratio > 1.0) {
    throw UsageError("--sample-ratio must be in (0, 1]");
  }
  uint64_t seed = 0;
  if (a.sample_ratio < 1.0) seed = RequireSeed(c, "when --sample-ratio is below 1");
  if (c.seed) m.SetSeed(*c.seed);
  m.SetOption("sample_ratio", FormatFixed3(a.sample_ratio));
  const Corpus corpus = LoadCorpusDir(a.corpus, m);
  SliceTemplateSet templates = SliceTemplateSet::Defaults();
  if (!a.templates.empty()) {
    templates = SliceTemplateSet::LoadDirectory(a.templates);
    m.AddInput(a.templates);
  }
  std::vector<InstructionTriple> triples;
  auto append = [&](std::vector<InstructionTriple> more) {
    for (InstructionTriple& t : more) triples.push_back(std::move(t));
  };
  if (!corpus.operators.empty()) append(SliceTableRows(OperatorTable(corpus.operators), templates));
  for (const DatasetDocument& d : corpus.datasets) {
    append(SliceRecord(Json::parse(ToJson(Document(d)).dump()), templates,
                       DatasetRecordOptions(d)));
  }
  if (!corpus.code.empty()) append(SliceTableRows(CodeAttributeTable(corpus.code), templates));
  if (!a.tasks.empty()) {
    const auto kinds = ParseTaskKinds(a.tasks);
    std::erase_if(triples, [&](const InstructionTriple& t) {
      return std::find(kinds.begin(), kinds.end(), t.task_kind) == kinds.end();
    });
    m.SetOption("tasks", Join(a.tasks, ","));
  }
  triples = SampleTriples(std::move(triples), a.sample_ratio, seed);
  WriteOutput(m, OutPath(c, "slice.jsonl"), TriplesToJsonl(triples));
  m.Write();
  std::cout << "wrote " << triples.size() << " triples to " << OutPath(c, "slice.jsonl") << "\n";
  return 0;
}

struct MaskArgs {
  std::string corpus;
  std::string templates;
  double sample_ratio = 1.0;
};

int RunMask(const Common& c, const MaskArgs& a) {
  RunManifest m("mask", c.out);
  if (a.sample_ratio <= 0.0 || a.sample_ratio > 1.0) {
    throw UsageError("--sample-ratio must be in (0, 1]");
  }
  MaskOptions options;
  options.sample_ratio = a.sample_ratio;
  if (a.sample_ratio < 1.0) options.seed = RequireSeed(c, "when --sample-ratio is below 1");
  if (c.seed) m.SetSeed(*c.seed);
  m.SetOption("sample_ratio", FormatFixed3(a.sample_ratio));
  const Corpus corpus = LoadCorpusDir(a.corpus, m);
  MaskTemplates templates;
  if (!a.templates.empty()) {
    templates = MaskTemplates::LoadDirectory(a.templates);
    m.AddInput(a.templates);
  }
  std::vector<InstructionTriple> triples;
  std::string rejects;
  for (const CodeDocument& d : corpus.code) {
    MaskResult r = MaskCode(d, templates, options);
    if (!r.reject_reason.empty()) {
      rejects += OrderedJson{{"source_id", d.code_id}, {"reason", r.reject_reason}}.dump() + "\n";
    }
    for (InstructionTriple& t : r.triples) triples.push_back(std::move(t));
  }
  WriteOutput(m, OutPath(c, "mask.jsonl"), TriplesToJsonl(triples));
  WriteOutput(m, OutPath(c, "mask_rejects.jsonl"), rejects);
  m.Write();
  std::cout << "wrote " << triples.size() << " triples to " << OutPath(c, "mask.jsonl") << "\n";
  return 0;
}

struct SelfInstructArgs {
  std::string corpus;
  std::string mode = "summary";
  std::string prompts;
  std::string exemplar;
  std::string kind;
  std::string source = "encyclopedic";
  size_t max_documents = 0;
  double max_failure_rate = 0.5;
};

int RunSelfInstruct(const Common& c, const SelfInstructArgs& a) {
  RunManifest m("self-instruct", c.out);
  m.SetOption("mode", a.mode);
  const Corpus corpus = LoadCorpusDir(a.corpus, m);
  GenStack gen = MakeGeneration(c, m);
  SelfInstructResult result;
  if (a.mode == "summary") {
    SummaryPairsConfig config;
    if (!a.prompts.empty()) {
      config.templates = SummaryPromptTemplates::LoadDirectory(a.prompts);
      m.AddInput(a.prompts);
    }
    config.max_failure_rate = a.max_failure_rate;
    if (a.max_documents > 0) {
      config.max_documents = a.max_documents;
      config.seed = RequireSeed(c, "when --max-documents samples the corpus");
      m.SetOption("max_documents", std::to_string(a.max_documents));
    }
    result = GenerateSummaryPairs(corpus.code, *gen.service, config);
  } else if (a.mode == "oneshot") {
    if (a.exemplar.empty()) throw UsageError("--exemplar is required for --mode oneshot");
    m.AddInput(a.exemplar);
    const InstructionTriple exemplar = TripleFromJson(Json::parse(ReadFile(a.exemplar)));
    TaskKind kind = exemplar.task_kind;
    if (!a.kind.empty()) kind = ParseTaskKinds({a.kind}).front();
    auto source = ParseDocumentKind(a.source);
    if (!source) throw UsageError("unknown --source: " + a.source);
    OneShotConfig config;
    if (!a.prompts.empty()) {
      const fs::path p = fs::path(a.prompts) / "oneshot_prompt.txt";
      if (fs::exists(p)) {
        config = OneShotConfig::LoadFile(p.string());
        m.AddInput(p.string());
      }
    }
    config.max_failure_rate = a.max_failure_rate;
    m.SetOption("kind", std::string(ToString(kind)));
    m.SetOption("source", std::string(ToString(*source)));
    result = GenerateOneShotInstructions(CorpusDocuments(corpus, *source), exemplar, kind,
                                         *gen.service, config);
  } else {
    throw UsageError("--mode must be summary or oneshot");
  }
  WriteOutput(m, OutPath(c, "self_instruct.jsonl"), TriplesToJsonl(result.triples));
  WriteOutput(m, OutPath(c, "self_instruct_skips.jsonl"), SkipLines(result.skips));
  m.Write();
  std::cout << "wrote " << result.triples.size() << " triples, skipped "
            << result.skips.size() << " documents\n";
  return 0;
}

struct AssembleArgs {
  // name=path or name=path:take
  std::vector<std::string> parts;
};

int RunAssemble(const Common& c, const AssembleArgs& a) {
  RunManifest m("assemble-sft", c.out);
  const uint64_t seed = RequireSeed(c, "to sample and shuffle the mix");
  m.SetSeed(seed);
  std::vector<SftPart> parts;
  for (const std::string& spec : a.parts) {
    const size_t eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw UsageError("--part expects name=path[:take], got " + spec);
    }
    SftPart part;
    part.name = spec.substr(0, eq);
    std::string path = spec.substr(eq + 1);
    if (const size_t colon = path.rfind(':'); colon != std::string::npos) {
      const std::string take = path.substr(colon + 1);
      if (!take.empty() && take.find_first_not_of("0123456789") == std::string::npos) {
        part.take = std::stoull(take);
        path = path.substr(0, colon);
      }
    }
    m.AddInput(path);
    part.triples = ReadTriplesJsonl(path);
    m.SetOption("part." + part.name, part.take ? std::to_string(*part.take) : "all");
    parts.push_back(std::move(part));
  }
  const std::vector<InstructionTriple> sft = AssembleSftCorpus(parts, seed);
  WriteOutput(m, OutPath(c, "sft.jsonl"), TriplesToJsonl(sft));
  m.Write();
  std::cout << "wrote " << sft.size() << " triples to " << OutPath(c, "sft.jsonl") << "\n";
  return 0;
}

struct BuildEvalArgs {
  std::vector<std::string> items;
  std::vector<std::string> sft;
  bool include_flagged = false;
  std::string draft_corpus;
  std::string mcq_exemplar;
  std::string draft_source = "encyclopedic";
};

int RunBuildEval(const Common& c, const BuildEvalArgs& a) {
  RunManifest m("build-eval", c.out);
  const uint64_t seed = RequireSeed(c, "to shuffle option order");
  m.SetSeed(seed);
  EvalSet set;
  for (const std::string& path : a.items) {
    m.AddInput(path);
    EvalSet part = ReadEvalSetJsonl(path);
    for (McqItem& i : part.mcq) set.mcq.push_back(std::move(i));
    for (SubjectiveTask& t : part.subjective) set.subjective.push_back(std::move(t));
  }
  std::vector<InstructionTriple> sft;
  for (const std::string& path : a.sft) {
    m.AddInput(path);
    for (InstructionTriple& t : ReadTriplesJsonl(path)) sft.push_back(std::move(t));
  }
  ExportOptions options;
  options.seed = seed;
  options.leakage = CheckLeakage(set, sft);
  options.include_flagged = a.include_flagged;
  if (a.include_flagged) m.SetOption("include_flagged", "true");
  const ExportedEvalSet exported = ExportEvalSet(set, options);
  for (const std::string& p : WriteExport(exported, c.out)) m.AddOutput(p);
  std::string leakage;
  for (const LeakageHit& h : options.leakage) {
    leakage += OrderedJson{{"item_id", h.item_id}, {"triple_id", h.triple_id}}.dump() + "\n";
  }
  WriteOutput(m, OutPath(c, "leakage.jsonl"), leakage);

  if (!a.draft_corpus.empty()) {
    if (a.mcq_exemplar.empty()) throw UsageError("--mcq-exemplar is required with --draft-corpus");
    m.AddInput(a.mcq_exemplar);
    const EvalSet exemplar_set = ReadEvalSetJsonl(a.mcq_exemplar);
    if (exemplar_set.mcq.size() != 1) {
      throw std::runtime_error("--mcq-exemplar must hold exactly one multiple-choice item");
    }
    auto source = ParseDocumentKind(a.draft_source);
    if (!source) throw UsageError("unknown --draft-source: " + a.draft_source);
    const Corpus corpus = LoadCorpusDir(a.draft_corpus, m);
    GenStack gen = MakeGeneration(c, m);
    const McqDraftResult drafts =
        DraftMcqItems(CorpusDocuments(corpus, *source), exemplar_set.mcq.front(), *gen.service);
    std::string lines;
    for (const McqItem& item : drafts.items) lines += ToJson(item).dump() + "\n";
    WriteOutput(m, OutPath(c, "mcq_drafts.jsonl"), lines);
  }
  m.Write();
  std::cout << "exported " << exported.set.size() << " items, excluded "
            << exported.excluded_item_ids.size() << " for leakage\n";
  return 0;
}

struct RunEvalArgs {
  std::string eval;
  std::vector<std::string> answers;
  std::string model_id;
  size_t sample = 0;
};

// Keeps `n` multiple-choice items chosen with `seed`, in their original
// order. Subjective tasks are kept whole.
EvalSet SampleEvalSet(const EvalSet& set, size_t n, uint64_t seed) {
  if (n >= set.mcq.size()) return set;
  std::vector<size_t> idx(set.mcq.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  DeterministicRng rng(MixSeed(seed, "run-eval-sample"));
  DeterministicShuffle(idx, rng);
  idx.resize(n);
  std::sort(idx.begin(), idx.end());
  EvalSet out;
  for (size_t i : idx) out.mcq.push_back(set.mcq[i]);
  out.subjective = set.subjective;
  return out;
}

int RunRunEval(const Common& c, const RunEvalArgs& a) {
  RunManifest m("run-eval", c.out);
  m.AddInput(a.eval);
  EvalSet set = ReadEvalSetJsonl(a.eval);
  if (a.sample > 0) {
    const uint64_t seed = RequireSeed(c, "when --sample selects items");
    m.SetSeed(seed);
    m.SetOption("sample", std::to_string(a.sample));
    set = SampleEvalSet(set, a.sample, seed);
  }
  std::vector<ModelAnswer> mcq;
  std::vector<SubjectiveOutput> outputs;
  if (!a.answers.empty()) {
    for (const std::string& path : a.answers) {
      m.AddInput(path);
      for (ModelAnswer& ans : ReadAnswersJsonl(path)) {
        if (set.FindSubjective(ans.item_id) != nullptr) {
          outputs.push_back({ans.item_id, ans.model_id, ans.raw_text});
        } else if (set.FindMcq(ans.item_id) != nullptr) {
          mcq.push_back(std::move(ans));
        } else if (a.sample == 0) {
          throw ScoringError("answer references unknown item: " + ans.item_id);
        }
      }
    }
  } else {
    if (a.model_id.empty()) throw UsageError("pass --answers, or --model-id to query a model");
    m.SetOption("model_id", a.model_id);
    GenStack gen = MakeGeneration(c, m);
    std::vector<GenerationRequest> requests;
    for (const McqItem& item : set.mcq) requests.push_back({McqPrompt(item), 64, 0.0, 0});
    for (const SubjectiveTask& t : set.subjective) requests.push_back({t.prompt, 2048, 0.0, 0});
    const auto results = gen.service->GenerateAll(requests);
    for (size_t i = 0; i < set.mcq.size(); ++i) {
      mcq.push_back({set.mcq[i].item_id, a.model_id, results[i].ok ? results[i].text : "",
                     OptionChoice::kUnanswered});
    }
    for (size_t i = 0; i < set.subjective.size(); ++i) {
      const auto& r = results[set.mcq.size() + i];
      outputs.push_back({set.subjective[i].item_id, a.model_id, r.ok ? r.text : ""});
    }
  }
  ParseAnswers(mcq, set);
  const std::vector<McqAccuracy> accuracy = ComputeMcqAccuracy(mcq, set);

  WriteOutput(m, OutPath(c, "answers.jsonl"), JsonLines(mcq));
  std::string output_lines;
  for (const SubjectiveOutput& o : outputs) {
    output_lines +=
        OrderedJson{{"item_id", o.item_id}, {"model_id", o.model_id}, {"raw_text", o.text}}
            .dump() +
        "\n";
  }
  WriteOutput(m, OutPath(c, "outputs.jsonl"), output_lines);
  ScoreTable scores;
  OrderedJson acc_json = OrderedJson::array();
  for (const McqAccuracy& acc : accuracy) {
    OrderedJson dims = OrderedJson::object();
    for (const DimensionAccuracy& d : acc.dimensions) {
      scores.Set(acc.model_id, std::string(ToString(d.dimension)), d.accuracy);
      dims[std::string(ToString(d.dimension))] = {
          {"correct", d.correct}, {"total", d.total}, {"accuracy", FormatFixed3(d.accuracy)}};
    }
    acc_json.push_back({{"model_id", acc.model_id},
                        {"dimensions", dims},
                        {"unweighted_average", FormatFixed3(acc.unweighted_average)},
                        {"weighted_average", FormatFixed3(acc.weighted_average)}});
  }
  WriteOutput(m, OutPath(c, "mcq_accuracy.json"), acc_json.dump(2) + "\n");
  WriteOutput(m, OutPath(c, "scores.jsonl"), scores.ToJsonl());
  m.Write();
  for (const McqAccuracy& acc : accuracy) {
    std::cout << acc.model_id << ": unweighted " << FormatFixed3(acc.unweighted_average)
              << ", weighted " << FormatFixed3(acc.weighted_average) << "\n";
  }
  return 0;
}

struct JudgeArgs {
  std::string eval;
  std::string outputs;
  std::string summary_template;
  std::string generation_template;
  int repetitions = 1;
};

int RunJudge(const Common& c, const JudgeArgs& a) {
  RunManifest m("judge", c.out);
  m.AddInput(a.eval);
  m.AddInput(a.outputs);
  const EvalSet set = ReadEvalSetJsonl(a.eval);
  const auto outputs = SubjectiveOutputsFromJsonl(ReadFile(a.outputs));
  JudgeConfig config;
  if (!a.summary_template.empty()) {
    config.summary_template = ReadFile(a.summary_template);
    m.AddInput(a.summary_template);
  }
  if (!a.generation_template.empty()) {
    config.generation_template = ReadFile(a.generation_template);
    m.AddInput(a.generation_template);
  }
  if (a.repetitions < 1) throw UsageError("--repetitions must be at least 1");
  config.repetitions = a.repetitions;
  m.SetOption("repetitions", std::to_string(a.repetitions));
  GenStack gen = MakeGeneration(c, m);
  const JudgeRun run = JudgeOutputs(outputs, set, *gen.service, config);

  WriteOutput(m, OutPath(c, "judgements.jsonl"), JsonLines(run.items));
  ScoreTable summary;
  ScoreTable generation;
  for (const JudgeAggregate& agg : AggregateJudgeRun(run)) {
    for (const auto& [metric, value] : agg.metrics) {
      if (agg.kind == SubjectiveKind::kCodeSummarization) {
        summary.Set(agg.model_id, metric, value);
      } else {
        // Reported as the "Accuracy" column of the generation table.
        generation.Set(agg.model_id, "Accuracy", value);
      }
    }
  }
  WriteOutput(m, OutPath(c, "summarization_scores.jsonl"), summary.ToJsonl());
  WriteOutput(m, OutPath(c, "generation_scores.jsonl"), generation.ToJsonl());
  m.Write();
  size_t unscored = 0;
  for (const JudgedItem& item : run.items) unscored += item.scored ? 0 : 1;
  std::cout << "judged " << run.items.size() << " outputs, " << unscored << " unscored\n";
  return 0;
}

struct ReportArgs {
  std::vector<std::string> scores;
  std::string review_export;
  std::string reference;
  std::vector<std::string> columns;
};

int RunReport(const Common& c, const ReportArgs& a) {
  RunManifest m("report", c.out);
  m.SetOption("reference", a.reference);
  ScoreTable merged;
  for (const std::string& path : a.scores) {
    m.AddInput(path);
    const ScoreTable t = ScoreTable::ReadJsonl(path);
    for (const std::string& model : t.models()) {
      for (const std::string& column : t.columns()) {
        if (auto v = t.Get(model, column)) merged.Set(model, column, *v);
      }
    }
  }
  if (!a.review_export.empty()) {
    m.AddInput(a.review_export);
    const UnblindedExport review = UnblindedExport::FromJson(Json::parse(ReadFile(a.review_export)));
    const ReadabilityResult readability = ReadabilityFromRanks(review.rankings);
    if (!readability.rejected.empty()) {
      throw ScoringError("review export has an invalid ranking: " +
                         readability.rejected.front().reason);
    }
    for (const ReadabilityAggregate& r : readability.models) {
      merged.Set(r.model_id, "Readability", r.score);
    }
    const ExecutabilityResult exec = ExecutabilityScore(review.verdicts);
    if (!exec.rejected.empty()) throw ScoringError(exec.rejected.front().reason);
    for (const ExecutabilityAggregate& e : exec.models) {
      merged.Set(e.model_id, "Executability", e.score);
    }
  }
  ScoreTable table;
  const std::vector<std::string>& columns = a.columns.empty() ? merged.columns() : a.columns;
  for (const std::string& model : merged.models()) {
    for (const std::string& column : columns) {
      auto v = merged.Get(model, column);
      if (!v) throw ScoringError("missing metric for model " + model + ": " + column);
      table.Set(model, column, *v);
    }
  }
  if (!a.columns.empty()) m.SetOption("columns", Join(a.columns, ","));
  const ScoreReport report = BuildReport(table, a.reference);
  WriteOutput(m, OutPath(c, "report.txt"), report.ToText());
  WriteOutput(m, OutPath(c, "report.json"), report.ToJson().dump(2) + "\n");
  m.Write();
  std::cout << report.ToText();
  return 0;
}

struct ReviewArgs {
  std::string setup;
  std::string outputs;
  std::string eval;
  std::vector<std::string> reviewers;
  int reviews_per_item = 1;
  std::string tokens;
  std::string events;
  std::string host;
  int port = -1;
  std::string static_dir;
  bool no_serve = false;
  bool export_results = false;
  bool partial = false;
};

std::atomic<bool> g_stop{false};

void OnSignal(int) { g_stop = true; }

int RunReviewServe(const Common& c, const ReviewArgs& a) {
  RunManifest m("review-serve", c.out);
  ReviewSetup setup;
  std::string setup_path = a.setup;
  if (!a.outputs.empty()) {
    if (!a.setup.empty()) throw UsageError("pass either --setup or --outputs, not both");
    const uint64_t seed = RequireSeed(c, "to permute sample labels");
    m.SetSeed(seed);
    if (a.reviewers.empty()) throw UsageError("--reviewers is required with --outputs");
    m.AddInput(a.outputs);
    ReviewInputs inputs;
    inputs.seed = seed;
    inputs.reviewers = a.reviewers;
    inputs.reviews_per_item = a.reviews_per_item;
    std::optional<EvalSet> set;
    if (!a.eval.empty()) {
      m.AddInput(a.eval);
      set = ReadEvalSetJsonl(a.eval);
    }
    std::set<std::string> seen_items;
    std::set<std::string> seen_models;
    for (const SubjectiveOutput& o : SubjectiveOutputsFromJsonl(ReadFile(a.outputs))) {
      if (set) {
        const SubjectiveTask* task = set->FindSubjective(o.item_id);
        if (task == nullptr || task->kind != SubjectiveKind::kCodeGeneration) continue;
        inputs.prompts[o.item_id] = task->prompt;
      }
      if (seen_items.insert(o.item_id).second) inputs.item_ids.push_back(o.item_id);
      if (seen_models.insert(o.model_id).second) inputs.models.push_back(o.model_id);
      inputs.outputs[{o.item_id, o.model_id}] = o.text;
    }
    std::sort(inputs.models.begin(), inputs.models.end());
    setup = CreateReviewSetup(inputs);
    setup_path = OutPath(c, "review_setup.json");
    WriteOutput(m, setup_path, setup.ToJson().dump(2) + "\n");
  } else if (!a.setup.empty()) {
    m.AddInput(a.setup);
    setup = ReviewSetup::Load(a.setup);
  } else {
    throw UsageError("pass --setup, or --outputs with --reviewers to create one");
  }
  const std::string events = a.events.empty() ? OutPath(c, "review_events.jsonl") : a.events;
  ReviewStore store(setup, events);

  if (a.export_results) {
    const UnblindedExport exported = store.ExportUnblinded(a.partial);
    WriteOutput(m, OutPath(c, "review_export.json"), exported.ToJson().dump(2) + "\n");
  }
  m.Write();
  if (a.no_serve || a.export_results) {
    const ReviewProgress p = store.Progress();
    std::cout << "review tasks " << p.tasks << ", rankings " << p.rankings << ", verdicts "
              << p.verdicts << "\n";
    return 0;
  }

  std::string tokens_path = a.tokens;
  if (tokens_path.empty()) {
    if (const char* env = std::getenv("GEOCORPUS_REVIEW_TOKENS")) tokens_path = env;
  }
  if (tokens_path.empty()) throw UsageError("--tokens (or GEOCORPUS_REVIEW_TOKENS) is required");
  std::string host = a.host;
  if (host.empty()) {
    const char* env = std::getenv("GEOCORPUS_REVIEW_HOST");
    host = env != nullptr ? env : "127.0.0.1";
  }
  int port = a.port;
  if (port < 0) {
    const char* env = std::getenv("GEOCORPUS_REVIEW_PORT");
    port = env != nullptr ? std::atoi(env) : 8080;
  }
  ReviewServer server(store, ReviewTokens::Load(tokens_path), a.static_dir);
  std::signal(SIGINT, OnSignal);
  std::signal(SIGTERM, OnSignal);
  const int bound = server.Start(host, port);
  std::cout << "review service listening on " << host << ":" << bound << std::endl;
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(200));
  server.Stop();
  return 0;
}

struct TrainConfigArgs {
  std::string stage = "both";
};

int RunEmitTrainConfig(const Common& c, const TrainConfigArgs& a) {
  RunManifest m("emit-train-config", c.out);
  m.SetOption("stage", a.stage);
  std::vector<TrainStage> stages;
  if (a.stage == "both") {
    stages = {TrainStage::kPretrain, TrainStage::kFinetune};
  } else if (auto s = ParseTrainStage(a.stage)) {
    stages = {*s};
  } else {
    throw UsageError("--stage must be pretrain, finetune or both");
  }
  OrderedJson all = OrderedJson::object();
  for (TrainStage stage : stages) {
    const TrainStageConfig config = EmitConfig(stage);
    const ValidationResult v = ValidateConfig(config);
    if (!v.ok()) throw std::runtime_error("invalid configuration: " + Join(v.violations, "; "));
    const std::string name = ToLower(ToString(stage));
    WriteOutput(m, OutPath(c, "train_" + name + ".conf"), ToKeyValue(config));
    all[name] = ToJson(config);
    std::cout << "wrote " << OutPath(c, "train_" + name + ".conf") << "\n";
  }
  WriteOutput(m, OutPath(c, "train_config.json"), all.dump(2) + "\n");
  m.Write();
  return 0;
}

void PrintError(const std::string& kind, const std::string& subcommand,
                const std::string& message) {
  std::cerr << OrderedJson{{"status", "error"},
                           {"kind", kind},
                           {"subcommand", subcommand},
                           {"message", message}}
                   .dump()
            << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"geocorpus: geospatial code corpus and benchmark toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Common c;
  app.add_option("--out", c.out, "Output directory")->capture_default_str();
  app.add_option("--jobs", c.jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--seed", c.seed, "Seed for every sampling or shuffling step");
  app.add_option("--stub", c.stub, "Scripted generation fixture (offline)");
  app.add_option("--endpoint", c.endpoint, "OpenAI-compatible chat completions URL");
  app.add_option("--model", c.model, "Model name sent to the endpoint");
  app.add_option("--token-env", c.token_env, "Environment variable holding the API token")
      ->capture_default_str();
  app.add_option("--token-file", c.token_file, "File holding the API token");
  app.add_option("--cache", c.cache, "Generation cache (JSONL)");
  app.add_option("--retries", c.retries, "Attempts per generation request")->capture_default_str();

  IngestArgs ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Validate raw sources and write the corpus");
  ingest_cmd->add_option("--manifest", ingest.manifest, "Corpus manifest")->required();

  SliceArgs slice;
  auto* slice_cmd = app.add_subcommand("slice", "Rule-based slicing of structured records");
  slice_cmd->add_option("--corpus", slice.corpus, "Directory written by ingest")->required();
  slice_cmd->add_option("--templates", slice.templates, "Slice template directory");
  slice_cmd->add_option("--tasks", slice.tasks, "Keep only these task kinds");
  slice_cmd->add_option("--sample-ratio", slice.sample_ratio, "Fraction of triples kept");

  MaskArgs mask;
  auto* mask_cmd = app.add_subcommand("mask", "Prefix/middle/suffix masking of code");
  mask_cmd->add_option("--corpus", mask.corpus, "Directory written by ingest")->required();
  mask_cmd->add_option("--templates", mask.templates, "Mask template directory");
  mask_cmd->add_option("--sample-ratio", mask.sample_ratio, "Fraction of variants kept");

  SelfInstructArgs si;
  auto* si_cmd = app.add_subcommand("self-instruct", "Model-assisted instruction synthesis");
  si_cmd->add_option("--corpus", si.corpus, "Directory written by ingest")->required();
  si_cmd->add_option("--mode", si.mode, "summary or oneshot")->capture_default_str();
  si_cmd->add_option("--prompts", si.prompts, "Prompt template directory");
  si_cmd->add_option("--exemplar", si.exemplar, "Exemplar triple (JSON) for oneshot");
  si_cmd->add_option("--kind", si.kind, "Task kind of generated triples");
  si_cmd->add_option("--source", si.source, "Document kind used as grounding")
      ->capture_default_str();
  si_cmd->add_option("--max-documents", si.max_documents, "Sample this many code documents");
  si_cmd->add_option("--max-failure-rate", si.max_failure_rate, "Abort above this rate")
      ->capture_default_str();

  AssembleArgs assemble;
  auto* assemble_cmd = app.add_subcommand("assemble-sft", "Mix triple sets into the SFT corpus");
  assemble_cmd->add_option("--part", assemble.parts, "name=path[:take]")->required();

  BuildEvalArgs build;
  auto* build_cmd = app.add_subcommand("build-eval", "Validate and export the benchmark");
  build_cmd->add_option("--items", build.items, "Eval item JSONL files")->required();
  build_cmd->add_option("--sft", build.sft, "SFT triples checked for leakage");
  build_cmd->add_flag("--include-flagged", build.include_flagged,
                      "Keep items that overlap the SFT corpus");
  build_cmd->add_option("--draft-corpus", build.draft_corpus,
                        "Draft new multiple-choice items from this corpus");
  build_cmd->add_option("--mcq-exemplar", build.mcq_exemplar, "Exemplar item for drafting");
  build_cmd->add_option("--draft-source", build.draft_source, "Document kind to draft from")
      ->capture_default_str();

  RunEvalArgs run;
  auto* run_cmd = app.add_subcommand("run-eval", "Collect and score model answers");
  run_cmd->add_option("--eval", run.eval, "Exported eval set")->required();
  run_cmd->add_option("--answers", run.answers, "Recorded answers JSONL");
  run_cmd->add_option("--model-id", run.model_id, "Query a model under this id");
  run_cmd->add_option("--sample", run.sample, "Score a seeded sample of N items");

  JudgeArgs judge;
  auto* judge_cmd = app.add_subcommand("judge", "Score subjective outputs with a judge model");
  judge_cmd->add_option("--eval", judge.eval, "Exported eval set")->required();
  judge_cmd->add_option("--outputs", judge.outputs, "Subjective outputs JSONL")->required();
  judge_cmd->add_option("--summary-template", judge.summary_template, "Summary judge prompt");
  judge_cmd->add_option("--generation-template", judge.generation_template,
                        "Generation judge prompt");
  judge_cmd->add_option("--repetitions", judge.repetitions, "Judge calls per output")
      ->capture_default_str();

  ReportArgs report;
  auto* report_cmd = app.add_subcommand("report", "Comparison table against a reference model");
  report_cmd->add_option("--scores", report.scores, "Score JSONL files");
  report_cmd->add_option("--review-export", report.review_export, "Unblinded review export");
  report_cmd->add_option("--reference", report.reference, "Reference model id")->required();
  report_cmd->add_option("--columns", report.columns, "Metric columns in order");

  ReviewArgs review;
  auto* review_cmd = app.add_subcommand("review-serve", "Blind expert review service");
  review_cmd->add_option("--setup", review.setup, "Existing review setup");
  review_cmd->add_option("--outputs", review.outputs, "Generation outputs to review");
  review_cmd->add_option("--eval", review.eval, "Eval set supplying task prompts");
  review_cmd->add_option("--reviewers", review.reviewers, "Reviewer ids");
  review_cmd->add_option("--reviews-per-item", review.reviews_per_item, "Reviewers per item")
      ->capture_default_str();
  review_cmd->add_option("--tokens", review.tokens, "Reviewer/admin token file");
  review_cmd->add_option("--events", review.events, "Event log (default <out>/review_events.jsonl)");
  review_cmd->add_option("--host", review.host, "Bind address");
  review_cmd->add_option("--port", review.port, "Port (0 picks a free port)");
  review_cmd->add_option("--static", review.static_dir, "Static files served at /");
  review_cmd->add_flag("--no-serve", review.no_serve, "Prepare the setup and exit");
  review_cmd->add_flag("--export", review.export_results, "Write the unblinded export and exit");
  review_cmd->add_flag("--partial", review.partial, "Allow exporting an incomplete review");

  TrainConfigArgs train;
  auto* train_cmd = app.add_subcommand("emit-train-config", "Write training configurations");
  train_cmd->add_option("--stage", train.stage, "pretrain, finetune or both")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::string name;
    for (const CLI::App* sub : app.get_subcommands()) name = sub->get_name();
    PrintError("usage", name, e.what());
    std::cerr << app.help();
    return 2;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    std::filesystem::create_directories(c.out);
    if (name == "ingest") return RunIngest(c, ingest);
    if (name == "slice") return RunSlice(c, slice);
    if (name == "mask") return RunMask(c, mask);
    if (name == "self-instruct") return RunSelfInstruct(c, si);
    if (name == "assemble-sft") return RunAssemble(c, assemble);
    if (name == "build-eval") return RunBuildEval(c, build);
    if (name == "run-eval") return RunRunEval(c, run);
    if (name == "judge") return RunJudge(c, judge);
    if (name == "report") return RunReport(c, report);
    if (name == "review-serve") return RunReviewServe(c, review);
    if (name == "emit-train-config") return RunEmitTrainConfig(c, train);
  } catch (const UsageError& e) {
    PrintError("usage", name, e.what());
    return 2;
  } catch (const ScoringError& e) {
    PrintError("scoring", name, e.what());
    return 1;
  } catch (const ReviewError& e) {
    PrintError("review", name, e.what());
    return 1;
  } catch (const std::exception& e) {
    PrintError("runtime", name, e.what());
    return 1;
  }
  return 1;
}
