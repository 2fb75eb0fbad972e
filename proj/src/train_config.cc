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

#include "geocorpus/train_config.h"

#include <charconv>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "geocorpus/text_util.h"

namespace geocorpus {
namespace {

constexpr std::string_view kUnspecified = "unspecified";

std::string ShortestDouble(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed);
  return std::string(buf, end);
}

double ParseDouble(std::string_view s) {
  double v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) {
    throw std::invalid_argument("not a number: " + std::string(s));
  }
  return v;
}

int ParseInt(std::string_view s) {
  int v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) {
    throw std::invalid_argument("not an integer: " + std::string(s));
  }
  return v;
}

template <typename T, typename Fmt>
std::string Opt(const std::optional<T>& v, Fmt fmt) {
  return v ? fmt(*v) : std::string(kUnspecified);
}

struct Field {
  const char* key;
  const char* unit;
  std::function<std::string(const TrainStageConfig&)> get;
  std::function<void(TrainStageConfig&, std::string_view)> set;
};

std::string Dbl(double v) { return ShortestDouble(v); }
std::string Int(int v) { return std::to_string(v); }

template <typename T, typename Parse>
void SetOpt(std::optional<T>& field, std::string_view value, Parse parse) {
  if (value == kUnspecified) {
    field.reset();
  } else {
    field = parse(value);
  }
}

const std::vector<Field>& Fields() {
  static const std::vector<Field> kFields = {
      {"stage", "Pretrain or Finetune",
       [](const TrainStageConfig& c) { return std::string(ToString(c.stage)); },
       [](TrainStageConfig& c, std::string_view v) {
         auto s = ParseTrainStage(v);
         if (!s) throw std::invalid_argument("unknown stage: " + std::string(v));
         c.stage = *s;
       }},
      {"method", "adapter method",
       [](const TrainStageConfig& c) { return c.method; },
       [](TrainStageConfig& c, std::string_view v) { c.method = v; }},
      {"base_model", "model the adapters attach to",
       [](const TrainStageConfig& c) { return c.base_model; },
       [](TrainStageConfig& c, std::string_view v) { c.base_model = v; }},
      {"learning_rate", "initial learning rate, per optimizer step",
       [](const TrainStageConfig& c) { return Opt(c.learning_rate, Dbl); },
       [](TrainStageConfig& c, std::string_view v) { SetOpt(c.learning_rate, v, ParseDouble); }},
      {"scheduler", "learning-rate schedule after warmup",
       [](const TrainStageConfig& c) {
         return Opt(c.scheduler, [](Scheduler s) { return std::string(ToString(s)); });
       },
       [](TrainStageConfig& c, std::string_view v) {
         SetOpt(c.scheduler, v, [](std::string_view s) {
           if (s != ToString(Scheduler::kCosineDecay)) {
             throw std::invalid_argument("unknown scheduler: " + std::string(s));
           }
           return Scheduler::kCosineDecay;
         });
       }},
      {"warmup_fraction", "fraction of total steps, linear warmup",
       [](const TrainStageConfig& c) { return Opt(c.warmup_fraction, Dbl); },
       [](TrainStageConfig& c, std::string_view v) { SetOpt(c.warmup_fraction, v, ParseDouble); }},
      {"weight_decay", "decoupled weight decay factor",
       [](const TrainStageConfig& c) { return Opt(c.weight_decay, Dbl); },
       [](TrainStageConfig& c, std::string_view v) { SetOpt(c.weight_decay, v, ParseDouble); }},
      {"global_batch_size", "sequences, as stated for the stage",
       [](const TrainStageConfig& c) { return Opt(c.global_batch_size, Int); },
       [](TrainStageConfig& c, std::string_view v) { SetOpt(c.global_batch_size, v, ParseInt); }},
      {"gradient_accumulation_steps", "micro-steps per optimizer step",
       [](const TrainStageConfig& c) { return Opt(c.gradient_accumulation_steps, Int); },
       [](TrainStageConfig& c, std::string_view v) {
         SetOpt(c.gradient_accumulation_steps, v, ParseInt);
       }},
      {"effective_batch_size", "sequences per optimizer step",
       [](const TrainStageConfig& c) { return Opt(c.effective_batch_size, Int); },
       [](TrainStageConfig& c, std::string_view v) { SetOpt(c.effective_batch_size, v, ParseInt); }},
      {"max_sequence_length_tokens", "tokens",
       [](const TrainStageConfig& c) { return Opt(c.max_sequence_length_tokens, Int); },
       [](TrainStageConfig& c, std::string_view v) {
         SetOpt(c.max_sequence_length_tokens, v, ParseInt);
       }},
      {"epochs", "passes over the corpus",
       [](const TrainStageConfig& c) { return Opt(c.epochs, Int); },
       [](TrainStageConfig& c, std::string_view v) { SetOpt(c.epochs, v, ParseInt); }},
      {"quantization", "base weight precision: Int4NF4 or None",
       [](const TrainStageConfig& c) {
         return Opt(c.quantization, [](Quantization q) { return std::string(ToString(q)); });
       },
       [](TrainStageConfig& c, std::string_view v) {
         SetOpt(c.quantization, v, [](std::string_view s) {
           if (s == ToString(Quantization::kInt4NF4)) return Quantization::kInt4NF4;
           if (s == ToString(Quantization::kNone)) return Quantization::kNone;
           throw std::invalid_argument("unknown quantization: " + std::string(s));
         });
       }},
      {"adapter_rank", "low-rank dimension r",
       [](const TrainStageConfig& c) { return Opt(c.adapter_rank, Int); },
       [](TrainStageConfig& c, std::string_view v) { SetOpt(c.adapter_rank, v, ParseInt); }},
      {"adapter_scaling", "scaling factor alpha",
       [](const TrainStageConfig& c) { return Opt(c.adapter_scaling, Int); },
       [](TrainStageConfig& c, std::string_view v) { SetOpt(c.adapter_scaling, v, ParseInt); }},
      {"target_modules", "comma-separated module names",
       [](const TrainStageConfig& c) { return Join(c.target_modules, ","); },
       [](TrainStageConfig& c, std::string_view v) {
         c.target_modules.clear();
         std::string item;
         std::istringstream in{std::string(v)};
         while (std::getline(in, item, ',')) {
           if (!Trim(item).empty()) c.target_modules.emplace_back(Trim(item));
         }
       }},
      {"dropout", "adapter dropout probability",
       [](const TrainStageConfig& c) { return Opt(c.dropout, Dbl); },
       [](TrainStageConfig& c, std::string_view v) { SetOpt(c.dropout, v, ParseDouble); }},
      {"device_count", "GPUs",
       [](const TrainStageConfig& c) { return Opt(c.device_count, Int); },
       [](TrainStageConfig& c, std::string_view v) { SetOpt(c.device_count, v, ParseInt); }},
      {"device_type", "accelerator model",
       [](const TrainStageConfig& c) { return c.device_type; },
       [](TrainStageConfig& c, std::string_view v) { c.device_type = v; }},
  };
  return kFields;
}

}  // namespace

std::string_view ToString(TrainStage s) {
  return s == TrainStage::kPretrain ? "Pretrain" : "Finetune";
}

std::string_view ToString(Scheduler) { return "CosineDecay"; }

std::string_view ToString(Quantization q) {
  return q == Quantization::kInt4NF4 ? "Int4NF4" : "None";
}

std::optional<TrainStage> ParseTrainStage(std::string_view s) {
  const std::string k = ToLower(Trim(s));
  if (k == "pretrain") return TrainStage::kPretrain;
  if (k == "finetune") return TrainStage::kFinetune;
  return std::nullopt;
}

TrainStageConfig EmitConfig(TrainStage stage) {
  TrainStageConfig c;
  c.stage = stage;
  c.target_modules = {"q_proj", "v_proj", "k_proj", "o_proj", "mlp"};
  c.max_sequence_length_tokens = 4096;
  c.adapter_rank = 64;
  c.dropout = 0.05;
  c.device_count = 2;
  c.device_type = "NVIDIA A100 40GB";
  if (stage == TrainStage::kPretrain) {
    c.method = "QLoRA";
    c.base_model = "CodeLlama-7B";
    c.learning_rate = 0.0002;
    c.scheduler = Scheduler::kCosineDecay;
    c.warmup_fraction = 0.05;
    c.weight_decay = 0.1;
    c.global_batch_size = 64;
    c.gradient_accumulation_steps = 4;
    c.epochs = 1;
    c.quantization = Quantization::kInt4NF4;
    c.adapter_scaling = 128;
  } else {
    c.method = "LoRA";
    c.base_model = "pretrain stage output";
    c.learning_rate = 0.0001;
    c.global_batch_size = 32;
    c.gradient_accumulation_steps = 4;
    c.effective_batch_size = 128;
    c.quantization = Quantization::kNone;
  }
  return c;
}

ValidationResult ValidateConfig(const TrainStageConfig& c) {
  ValidationResult r;
  auto positive = [&](const char* name, const std::optional<int>& v) {
    if (v && *v <= 0) r.violations.push_back(std::string(name) + " must be positive");
  };
  if (c.learning_rate && *c.learning_rate <= 0) {
    r.violations.push_back("learning_rate must be positive");
  }
  if (c.warmup_fraction && (*c.warmup_fraction < 0 || *c.warmup_fraction >= 1)) {
    r.violations.push_back("warmup_fraction must be in [0, 1)");
  }
  if (c.dropout && (*c.dropout < 0 || *c.dropout >= 1)) {
    r.violations.push_back("dropout must be in [0, 1)");
  }
  if (c.weight_decay && *c.weight_decay < 0) {
    r.violations.push_back("weight_decay must be non-negative");
  }
  positive("global_batch_size", c.global_batch_size);
  positive("gradient_accumulation_steps", c.gradient_accumulation_steps);
  positive("effective_batch_size", c.effective_batch_size);
  positive("max_sequence_length_tokens", c.max_sequence_length_tokens);
  positive("epochs", c.epochs);
  positive("adapter_rank", c.adapter_rank);
  positive("adapter_scaling", c.adapter_scaling);
  positive("device_count", c.device_count);
  if (c.target_modules.empty()) r.violations.push_back("target_modules empty");
  if (c.stage == TrainStage::kFinetune) {
    if (!c.global_batch_size || !c.gradient_accumulation_steps || !c.effective_batch_size) {
      r.violations.push_back(
          "finetune needs global_batch_size, gradient_accumulation_steps and "
          "effective_batch_size");
    } else if (*c.global_batch_size * *c.gradient_accumulation_steps !=
               *c.effective_batch_size) {
      r.violations.push_back("global_batch_size x gradient_accumulation_steps (" +
                             std::to_string(*c.global_batch_size) + " x " +
                             std::to_string(*c.gradient_accumulation_steps) +
                             ") != effective_batch_size (" +
                             std::to_string(*c.effective_batch_size) + ")");
    }
  }
  return r;
}

std::string ToKeyValue(const TrainStageConfig& config) {
  std::string out = "# Adapter training configuration, " +
                    std::string(ToString(config.stage)) + " stage.\n";
  for (const Field& f : Fields()) {
    out += "\n# ";
    out += f.unit;
    out += "\n";
    out += f.key;
    out += " = ";
    out += f.get(config);
    out += "\n";
  }
  return out;
}

TrainStageConfig FromKeyValue(const std::string& text) {
  TrainStageConfig c;
  c.target_modules.clear();
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const std::string_view t = Trim(line);
    if (t.empty() || t.front() == '#') continue;
    const size_t eq = t.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("expected key = value: " + std::string(t));
    }
    const std::string key(Trim(t.substr(0, eq)));
    const std::string_view value = Trim(t.substr(eq + 1));
    bool known = false;
    for (const Field& f : Fields()) {
      if (key == f.key) {
        f.set(c, value);
        known = true;
        break;
      }
    }
    if (!known) throw std::invalid_argument("unknown key: " + key);
  }
  return c;
}

OrderedJson ToJson(const TrainStageConfig& config) {
  OrderedJson j = OrderedJson::object();
  for (const Field& f : Fields()) {
    const std::string v = f.get(config);
    const std::string key = f.key;
    if (key == "target_modules") {
      j[key] = config.target_modules;
    } else if (v == kUnspecified || key == "stage" || key == "method" ||
               key == "base_model" || key == "scheduler" || key == "quantization" ||
               key == "device_type") {
      j[key] = v;
    } else {
      j[key] = Json::parse(v);
    }
  }
  return j;
}

}  // namespace geocorpus
