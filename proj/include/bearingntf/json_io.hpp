// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>

#include "json.hpp"

#include "bearingntf/diagnostics.hpp"
#include "bearingntf/factorization.hpp"
#include "bearingntf/pipeline.hpp"
#include "bearingntf/signal_sim.hpp"
#include "bearingntf/spectrogram.hpp"

namespace bearingntf {

using json = nlohmann::json;

// from_json overloads only override keys that are present, so a partial
// config file layers on top of the defaults.
void to_json(json& j, const SimConfig& c);
void from_json(const json& j, SimConfig& c);
void to_json(json& j, const StftParams& p);
void from_json(const json& j, StftParams& p);
void to_json(json& j, const FitOptions& o);
void from_json(const json& j, FitOptions& o);
void to_json(json& j, const PipelineConfig& c);
void from_json(const json& j, PipelineConfig& c);

void to_json(json& j, const FitHistory& h);
void from_json(const json& j, FitHistory& h);
void to_json(json& j, const DiagnosticReport& r);
void from_json(const json& j, DiagnosticReport& r);
void to_json(json& j, const SweepRecord& r);
void from_json(const json& j, SweepRecord& r);

json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const json& j);

}  // namespace bearingntf
