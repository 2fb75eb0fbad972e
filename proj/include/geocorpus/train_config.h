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

// Adapter training hyperparameters for the two training stages: QLoRA
// continued pretraining and LoRA instruction fine-tuning. The values are
// emitted for an external trainer; nothing here runs training.

#ifndef GEOCORPUS_TRAIN_CONFIG_H_
#define GEOCORPUS_TRAIN_CONFIG_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "geocorpus/corpus_model.h"

namespace geocorpus {

enum class TrainStage { kPretrain, kFinetune };
enum class Scheduler { kCosineDecay };
enum class Quantization { kInt4NF4, kNone };

std::string_view ToString(TrainStage s);
std::string_view ToString(Scheduler s);
std::string_view ToString(Quantization q);
std::optional<TrainStage> ParseTrainStage(std::string_view s);

// Fields left empty are written as "unspecified".
struct TrainStageConfig {
  TrainStage stage = TrainStage::kPretrain;
  std::string method;  // "QLoRA" or "LoRA"
  std::string base_model;
  std::optional<double> learning_rate;
  std::optional<Scheduler> scheduler;
  std::optional<double> warmup_fraction;
  std::optional<double> weight_decay;
  std::optional<int> global_batch_size;
  std::optional<int> gradient_accumulation_steps;
  std::optional<int> effective_batch_size;
  std::optional<int> max_sequence_length_tokens;
  std::optional<int> epochs;
  std::optional<Quantization> quantization;
  std::optional<int> adapter_rank;
  std::optional<int> adapter_scaling;
  std::vector<std::string> target_modules;
  std::optional<double> dropout;
  std::optional<int> device_count;
  std::string device_type;

  bool operator==(const TrainStageConfig&) const = default;
};

TrainStageConfig EmitConfig(TrainStage stage);

ValidationResult ValidateConfig(const TrainStageConfig& config);

// One "key = value" line per field, each preceded by a comment giving the
// unit. Byte-identical for identical input.
std::string ToKeyValue(const TrainStageConfig& config);
// Inverse of ToKeyValue. Throws std::invalid_argument on an unknown key or
// malformed value.
TrainStageConfig FromKeyValue(const std::string& text);

OrderedJson ToJson(const TrainStageConfig& config);

}  // namespace geocorpus

#endif  // GEOCORPUS_TRAIN_CONFIG_H_
