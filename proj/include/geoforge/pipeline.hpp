#pragma once

#include "geoforge/deduction.hpp"
#include "geoforge/llm_gateway.hpp"
#include "geoforge/plot_code.hpp"
#include "geoforge/renderer.hpp"
#include "geoforge/verifier.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace geoforge::pipeline {

struct Gates {
    bool semantic = true;
    bool geometric = true;
    bool image = true;
};

struct PipelineConfig {
    std::uint64_t rng_seed = 0;
    int scenes = 100;                 // N
    std::size_t subgoal_budget = 64;  // M
    double rho = 0.2;
    int seeds_per_scene = 1;
    bool pooled_selection = true;     // rank subgoals of all scenes together
    std::optional<std::vector<int>> scene_indices;  // replaces 0..scenes-1 when set
    core::SceneBudget scene_budget;
    deduction::ChainBudget chain;
    verify::ToleranceConfig tolerance;
    render::RenderStyle style;
    gateway::GatewayConfig gateway;
    std::string output_dir = "out";
    schema::SchemaMode schema_mode = schema::SchemaMode::lenient;
    Gates gates;

    /// Throws ConfigError.
    void validate() const;
    std::vector<int> indices() const;
    nlohmann::ordered_json to_json() const;
    /// Unknown keys are errors. Throws ConfigError.
    static PipelineConfig from_json(const nlohmann::json& j);
    static PipelineConfig load(const std::string& path);
};

/// Per-scene generator seed, decorrelated from neighbouring indices.
std::uint64_t scene_seed(std::uint64_t rng_seed, int index);

struct StageStats {
    std::size_t sampled = 0;        // scenes
    std::size_t seed_selected = 0;  // instantiation attempts
    std::size_t semantic_rejected = 0;
    std::size_t geometric_rejected = 0;
    std::size_t plotting_rejected = 0;
    std::size_t image_rejected = 0;
    std::size_t retained = 0;

    std::size_t rejected() const {
        return semantic_rejected + geometric_rejected + plotting_rejected + image_rejected;
    }
    bool balanced() const { return rejected() + retained == seed_selected; }
    nlohmann::ordered_json to_json() const;
};

/// rconst, eqratio and eqratio3 targets ask for a value; every other
/// relation is proved.
verify::ProblemKind route(const std::vector<core::Predicate>& targets);

struct SeedProvenance {
    std::vector<core::Predicate> premises;
    std::vector<deduction::ProofStep> steps;
    std::vector<core::Predicate> targets;

    std::vector<std::string> rule_ids() const;
    nlohmann::ordered_json to_json() const;
    static SeedProvenance from_json(const nlohmann::json& j);
};

struct DatasetRecord {
    std::string id;
    std::string question;
    std::string question_debiased;
    std::string cot;
    std::string cot_debiased;
    std::string answer;
    verify::ProblemKind kind = verify::ProblemKind::proof;
    schema::PlotCode plot_code;
    std::string diagram;  // relative to the output directory
    SeedProvenance seed;
    verify::VerificationReport report;
    std::vector<std::string> debias_flags;
    std::map<std::string, std::string> raw;  // role name -> model text

    nlohmann::ordered_json to_json() const;
    static DatasetRecord from_json(const nlohmann::json& j);
};

/// What verify_record needs, rebuilt from a persisted record alone.
verify::RecordCandidate candidate_of(const DatasetRecord& r);

struct Rejection {
    std::string id;
    verify::Stage stage;
    std::string reason;
};

/// Everything the model roles see for one attempt, plus the scene behind it.
struct Attempt {
    std::string id;
    int scene_index = 0;
    core::Scene scene;
    deduction::SeedData seed;
    deduction::SeedText text;
    verify::ProblemKind kind = verify::ProblemKind::proof;
};

struct RunHooks {
    /// Called before the first gateway request of every attempt.
    std::function<void(const Attempt&)> on_attempt;
};

struct RunResult {
    std::vector<DatasetRecord> records;
    std::vector<Rejection> rejections;
    StageStats stats;
    std::vector<std::string> svgs;  // parallel to records
};

/// Seeds for one scene: deduce, filter, sample M, select with rho.
std::vector<deduction::SeedData> seeds_for_scene(const core::Scene& scene, const PipelineConfig& cfg,
                                                 std::uint64_t seed);

struct SceneSeeds {
    int index = 0;
    std::uint64_t seed = 0;
    core::Scene scene;
    std::vector<deduction::SeedData> seeds;  // best first
};

/// Samples and deduces every configured scene, then selects with rho over the
/// pooled subgoals of all scenes (or per scene when pooled_selection is off).
/// Scenes that fail to sample or keep no seed are left out; the result is in
/// scene order.
std::vector<SceneSeeds> select_seed_pool(const PipelineConfig& cfg);

/// Natural-language rendering of annotations for the filtering prompt, e.g.
/// "Right angle annotation: angleBAC = 90degrees; Length annotations: AB = 3, AC = 6".
std::string annotations_to_text(const schema::Annotations& a);

/// Annotated literals ("90°", "AB = 3", ...) that survive verbatim in `question`.
std::vector<std::string> surviving_annotations(const std::string& question, const schema::Annotations& a);

struct Debiased {
    std::string question;
    std::string cot;
    std::vector<std::string> flags;
    std::map<std::string, std::string> raw;
};

/// Simplify, filter annotated conditions, rewrite the CoT against the plot
/// code. Step 2 is skipped when there are no annotations. Throws gateway and
/// ExtractionError.
Debiased debias(const std::string& question, const std::string& cot, const schema::PlotCode& pc,
                gateway::Gateway& gw);

/// Runs every attempt through the stage gates. Per-record failures are
/// counted, never thrown.
RunResult run(const PipelineConfig& cfg, gateway::Gateway& gw, const RunHooks& hooks = {});

struct ManifestEntry {
    std::string path;
    std::string sha256;
    std::size_t bytes = 0;
};

/// records.jsonl, rejections.jsonl, diagrams/<id>.svg, stats.json and
/// manifest.json. Removes what it wrote when an IO error occurs.
std::vector<ManifestEntry> persist(const RunResult& result, const std::string& outdir);

}  // namespace geoforge::pipeline
