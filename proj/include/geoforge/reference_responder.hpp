#pragma once

#include "geoforge/llm_gateway.hpp"
#include "geoforge/pipeline.hpp"

#include <json.hpp>

#include <map>
#include <memory>
#include <optional>
#include <string>

namespace geoforge::pipeline {

/// Faults injected into reference responses to exercise each gate.
enum class Corruption {
    semantic_verdict,   // judge says no
    wrong_length,       // annotated length off by 0.5
    degenerate_circle,  // circle through a repeated point
    overlapping_layout, // extra point crowding an existing one
    broken_plot_code,   // coder text without a balanced object
};

std::string_view corruption_name(Corruption c);
Corruption corruption_from_name(std::string_view name);
/// The gate a corruption is meant to trip.
verify::Stage intended_stage(Corruption c);

/// Attempt id -> corruption.
using CorruptionPlan = std::map<std::string, Corruption>;
CorruptionPlan corruption_plan_from_json(const nlohmann::json& j);
nlohmann::ordered_json corruption_plan_to_json(const CorruptionPlan& plan);

/// Plays every model role from the attempt's symbolic data: the question
/// restates the seed, coordinates come from the witness and proof targets
/// become zero-value expressions. Used to build transcripts offline.
class ReferenceResponder {
public:
    explicit ReferenceResponder(CorruptionPlan plan = {});

    void begin(const Attempt& a);
    std::string respond(gateway::Role role, const std::string& prompt);

private:
    std::string instructor() const;
    std::string coder() const;
    std::string question_without_annotated() const;

    CorruptionPlan plan_;
    std::optional<Attempt> current_;
    std::optional<Corruption> fault_;
};

/// Plot code the reference coder emits for an attempt, before corruption.
schema::PlotCode reference_plot_code(const Attempt& a);

struct SynthResult {
    RunResult run;
    std::shared_ptr<gateway::Transcript> transcript;
};

/// Runs the pipeline against the reference responder and records every
/// exchange. Replaying the transcript with the same config reproduces the
/// run byte for byte.
SynthResult synthesize(const PipelineConfig& cfg, const CorruptionPlan& plan = {});

}  // namespace geoforge::pipeline
