#pragma once

// Mock corpora: a clean reference run picks scenes whose records all pass,
// then chosen attempts are corrupted and the exchanges recorded.

#include "geoforge/llm_gateway.hpp"
#include "geoforge/pipeline.hpp"
#include "geoforge/reference_responder.hpp"

#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace corpus {

namespace gp = geoforge::pipeline;

struct Corpus {
    gp::PipelineConfig cfg;
    gp::CorruptionPlan plan;
    std::shared_ptr<geoforge::gateway::Transcript> transcript;
    std::vector<std::string> ids;  // every attempt, in run order
};

inline gp::PipelineConfig base_config(std::uint64_t rng_seed) {
    gp::PipelineConfig cfg;
    cfg.rng_seed = rng_seed;
    cfg.seeds_per_scene = 1;
    cfg.pooled_selection = false;  // scenes stay independent when subsetting
    return cfg;
}

// `n` attempts that a clean run retains, with `faults[i]` applied to the
// attempt at position positions[i].
inline Corpus build(std::size_t n, const std::vector<std::pair<std::size_t, gp::Corruption>>& faults,
                    std::uint64_t rng_seed = 2024) {
    Corpus c;
    c.cfg = base_config(rng_seed);
    c.cfg.scenes = static_cast<int>(n * 3 + 10);
    const auto clean = gp::synthesize(c.cfg);
    // Identical questions share every prompt, and so every recorded response;
    // keep one scene per question so faults stay with their own attempt.
    std::vector<int> keep;
    std::set<std::string> questions;
    for (const auto& r : clean.run.records) {
        if (keep.size() == n || !questions.insert(r.question).second) continue;
        keep.push_back(std::stoi(r.id.substr(5, 5)));
        c.ids.push_back(r.id);
    }
    if (keep.size() < n) throw std::runtime_error("clean reference run retained too few distinct records");
    c.cfg.scene_indices = keep;
    for (const auto& [pos, fault] : faults) c.plan[c.ids.at(pos)] = fault;
    c.transcript = gp::synthesize(c.cfg, c.plan).transcript;
    return c;
}

}  // namespace corpus
