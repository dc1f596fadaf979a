#pragma once

#include <string>

#include "upm/contrast.hpp"

namespace upm {

inline constexpr int kModelFormatVersion = 1;

// Versioned JSON document holding basis tables, learner state and pivot
// parameters. Doubles are written in shortest round-trip form, so a reloaded
// model predicts bit-identically. Custom pivots cannot be serialized.
std::string serialize_model(const ContrastModel& model);
ContrastModel deserialize_model(const std::string& text);

void save_model(const std::string& path, const ContrastModel& model);
ContrastModel load_model(const std::string& path);

std::string serialize_learner_spec(const LearnerSpec& spec);
LearnerSpec deserialize_learner_spec(const std::string& text);

}  // namespace upm
