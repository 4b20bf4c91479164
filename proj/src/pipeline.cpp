#include "geoforge/pipeline.hpp"

#include "geoforge/errors.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace geoforge::pipeline {

using nlohmann::json;
using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

template <typename T>
void read_to(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

void reject_unknown(const json& j, std::initializer_list<std::string_view> known, const std::string& where) {
    for (const auto& [key, _] : j.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ConfigError("unknown key '" + key + "' in " + where);
}

render::RenderStyle style_from_json(const json& j) {
    reject_unknown(j,
                   {"canvas_px", "margin", "segment_width", "circle_width", "font_size", "point_radius",
                    "right_angle_size", "label_offset", "angle_arc_radius", "max_label_overlap", "min_separation",
                    "min_height_ratio"},
                   "style");
    render::RenderStyle s;
    read_to(j, "canvas_px", s.canvas_px);
    read_to(j, "margin", s.margin);
    read_to(j, "segment_width", s.segment_width);
    read_to(j, "circle_width", s.circle_width);
    read_to(j, "font_size", s.font_size);
    read_to(j, "point_radius", s.point_radius);
    read_to(j, "right_angle_size", s.right_angle_size);
    read_to(j, "label_offset", s.label_offset);
    read_to(j, "angle_arc_radius", s.angle_arc_radius);
    read_to(j, "max_label_overlap", s.max_label_overlap);
    read_to(j, "min_separation", s.min_separation);
    read_to(j, "min_height_ratio", s.min_height_ratio);
    return s;
}

ordered_json style_to_json(const render::RenderStyle& s) {
    return ordered_json{{"canvas_px", s.canvas_px},
                        {"margin", s.margin},
                        {"segment_width", s.segment_width},
                        {"circle_width", s.circle_width},
                        {"font_size", s.font_size},
                        {"point_radius", s.point_radius},
                        {"right_angle_size", s.right_angle_size},
                        {"label_offset", s.label_offset},
                        {"angle_arc_radius", s.angle_arc_radius},
                        {"max_label_overlap", s.max_label_overlap},
                        {"min_separation", s.min_separation},
                        {"min_height_ratio", s.min_height_ratio}};
}

std::string role_key(gateway::Role r) { return std::string(gateway::role_name(r)); }

std::string field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key) || !j[key].is_string())
        throw ExtractionError(std::string("response lacks a string \"") + key + "\"");
    return j[key].get<std::string>();
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::string triple_text(const schema::Triple& t) { return t[0] + t[1] + t[2]; }

void write_file(const fs::path& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw ConfigError("cannot write " + path.string());
}

}  // namespace

// ---------------------------------------------------------------------------
// config

void PipelineConfig::validate() const {
    if (scenes < 1) throw ConfigError("scenes (N) must be >= 1");
    if (!(rho > 0 && rho <= 1)) throw ConfigError("rho must lie in (0, 1]");
    if (subgoal_budget < 1) throw ConfigError("subgoal_budget (M) must be >= 1");
    if (seeds_per_scene < 1) throw ConfigError("seeds_per_scene must be >= 1");
    if (scene_indices)
        for (int i : *scene_indices)
            if (i < 0) throw ConfigError("scene indices must be non-negative");
    verify::validate(tolerance);
    style.validate();
}

std::vector<int> PipelineConfig::indices() const {
    if (scene_indices) return *scene_indices;
    std::vector<int> out(static_cast<std::size_t>(scenes));
    for (int i = 0; i < scenes; ++i) out[static_cast<std::size_t>(i)] = i;
    return out;
}

ordered_json PipelineConfig::to_json() const {
    ordered_json j;
    j["rng_seed"] = rng_seed;
    j["scenes"] = scenes;
    j["subgoal_budget"] = subgoal_budget;
    j["rho"] = rho;
    j["seeds_per_scene"] = seeds_per_scene;
    j["pooled_selection"] = pooled_selection;
    j["scene_indices"] = scene_indices ? ordered_json(*scene_indices) : ordered_json(nullptr);
    j["scene_budget"] = {{"max_points", scene_budget.max_points}, {"max_constructions", scene_budget.max_constructions}};
    j["chain"] = {{"max_facts", chain.max_facts}, {"max_rounds", chain.max_rounds}};
    j["tolerance"] = {{"eps_abs", tolerance.eps_abs},
                      {"eps_angle_deg", tolerance.eps_angle_deg},
                      {"eps_rel", tolerance.eps_rel}};
    j["style"] = style_to_json(style);
    j["gateway"] = gateway.to_json();
    j["output_dir"] = output_dir;
    j["schema_mode"] = schema_mode == schema::SchemaMode::strict ? "strict" : "lenient";
    j["gates"] = {{"semantic", gates.semantic}, {"geometric", gates.geometric}, {"image", gates.image}};
    return j;
}

PipelineConfig PipelineConfig::from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("pipeline config must be a JSON object");
    reject_unknown(j,
                   {"rng_seed", "scenes", "subgoal_budget", "rho", "seeds_per_scene", "pooled_selection", "scene_indices", "scene_budget",
                    "chain", "tolerance", "style", "gateway", "output_dir", "schema_mode", "gates"},
                   "pipeline config");
    PipelineConfig c;
    try {
        read_to(j, "rng_seed", c.rng_seed);
        read_to(j, "scenes", c.scenes);
        read_to(j, "subgoal_budget", c.subgoal_budget);
        read_to(j, "rho", c.rho);
        read_to(j, "seeds_per_scene", c.seeds_per_scene);
        read_to(j, "pooled_selection", c.pooled_selection);
        if (j.contains("scene_indices") && !j["scene_indices"].is_null())
            c.scene_indices = j["scene_indices"].get<std::vector<int>>();
        if (j.contains("scene_budget")) {
            reject_unknown(j["scene_budget"], {"max_points", "max_constructions"}, "scene_budget");
            read_to(j["scene_budget"], "max_points", c.scene_budget.max_points);
            read_to(j["scene_budget"], "max_constructions", c.scene_budget.max_constructions);
        }
        if (j.contains("chain")) {
            reject_unknown(j["chain"], {"max_facts", "max_rounds"}, "chain");
            read_to(j["chain"], "max_facts", c.chain.max_facts);
            read_to(j["chain"], "max_rounds", c.chain.max_rounds);
        }
        if (j.contains("tolerance")) {
            reject_unknown(j["tolerance"], {"eps_abs", "eps_angle_deg", "eps_rel"}, "tolerance");
            read_to(j["tolerance"], "eps_abs", c.tolerance.eps_abs);
            read_to(j["tolerance"], "eps_angle_deg", c.tolerance.eps_angle_deg);
            read_to(j["tolerance"], "eps_rel", c.tolerance.eps_rel);
        }
        if (j.contains("style")) c.style = style_from_json(j["style"]);
        if (j.contains("gateway")) c.gateway = gateway::GatewayConfig::from_json(j["gateway"]);
        read_to(j, "output_dir", c.output_dir);
        if (j.contains("schema_mode")) {
            const auto m = j["schema_mode"].get<std::string>();
            if (m == "strict") c.schema_mode = schema::SchemaMode::strict;
            else if (m == "lenient") c.schema_mode = schema::SchemaMode::lenient;
            else throw ConfigError("schema_mode must be strict or lenient");
        }
        if (j.contains("gates")) {
            reject_unknown(j["gates"], {"semantic", "geometric", "image"}, "gates");
            read_to(j["gates"], "semantic", c.gates.semantic);
            read_to(j["gates"], "geometric", c.gates.geometric);
            read_to(j["gates"], "image", c.gates.image);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("pipeline config: ") + e.what());
    }
    c.validate();
    return c;
}

PipelineConfig PipelineConfig::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    const json j = json::parse(ss.str(), nullptr, false);
    if (j.is_discarded()) throw ConfigError(path + " is not valid JSON");
    return from_json(j);
}

std::uint64_t scene_seed(std::uint64_t rng_seed, int index) {
    return splitmix64(rng_seed ^ splitmix64(static_cast<std::uint64_t>(index)));
}

ordered_json StageStats::to_json() const {
    ordered_json j;
    j["sampled"] = sampled;
    j["seed_selected"] = seed_selected;
    j["semantic_rejected"] = semantic_rejected;
    j["geometric_rejected"] = geometric_rejected;
    j["plotting_rejected"] = plotting_rejected;
    j["image_rejected"] = image_rejected;
    j["retained"] = retained;
    return j;
}

// ---------------------------------------------------------------------------
// records

verify::ProblemKind route(const std::vector<core::Predicate>& targets) {
    using K = core::PredicateKind;
    for (const auto& t : targets)
        if (t.kind == K::rconst || t.kind == K::eqratio || t.kind == K::eqratio3) return verify::ProblemKind::computation;
    return verify::ProblemKind::proof;
}

std::vector<std::string> SeedProvenance::rule_ids() const {
    std::set<std::string> ids;
    for (const auto& s : steps) ids.insert(s.rule_id);
    return {ids.begin(), ids.end()};
}

ordered_json SeedProvenance::to_json() const {
    auto texts = [](const std::vector<core::Predicate>& ps) {
        ordered_json a = ordered_json::array();
        for (const auto& p : ps) a.push_back(core::to_text(p));
        return a;
    };
    ordered_json j;
    j["premises"] = texts(premises);
    j["steps"] = ordered_json::array();
    for (const auto& s : steps)
        j["steps"].push_back(ordered_json{{"rule", s.rule_id}, {"inputs", texts(s.inputs)}, {"output", core::to_text(s.output)}});
    j["targets"] = texts(targets);
    j["rule_ids"] = rule_ids();
    return j;
}

SeedProvenance SeedProvenance::from_json(const json& j) {
    auto preds = [](const json& a) {
        std::vector<core::Predicate> out;
        for (const auto& t : a) out.push_back(core::parse_predicate(t.get<std::string>()));
        return out;
    };
    SeedProvenance s;
    s.premises = preds(j.at("premises"));
    for (const auto& step : j.at("steps"))
        s.steps.push_back({step.at("rule").get<std::string>(), preds(step.at("inputs")),
                           core::parse_predicate(step.at("output").get<std::string>())});
    s.targets = preds(j.at("targets"));
    return s;
}

ordered_json DatasetRecord::to_json() const {
    ordered_json j;
    j["id"] = id;
    j["kind"] = verify::kind_name(kind);
    j["question"] = question;
    j["question_debiased"] = question_debiased;
    j["cot"] = cot;
    j["cot_debiased"] = cot_debiased;
    j["answer"] = answer;
    j["plot_code"] = schema::plotcode_to_json(plot_code);
    j["diagram"] = diagram;
    j["seed"] = seed.to_json();
    j["verification"] = report.to_json();
    j["debias_flags"] = debias_flags;
    j["raw"] = ordered_json::object();
    for (const auto& [k, v] : raw) j["raw"][k] = v;
    return j;
}

DatasetRecord DatasetRecord::from_json(const json& j) {
    try {
        DatasetRecord r;
        r.id = j.at("id").get<std::string>();
        r.kind = verify::problem_kind_from_name(j.at("kind").get<std::string>());
        r.question = j.at("question").get<std::string>();
        r.question_debiased = j.at("question_debiased").get<std::string>();
        r.cot = j.at("cot").get<std::string>();
        r.cot_debiased = j.at("cot_debiased").get<std::string>();
        r.answer = j.at("answer").get<std::string>();
        r.plot_code = schema::plotcode_from_json(j.at("plot_code"), schema::SchemaMode::strict);
        r.diagram = j.at("diagram").get<std::string>();
        r.seed = SeedProvenance::from_json(j.at("seed"));
        r.report = verify::VerificationReport::from_json(j.at("verification"));
        r.debias_flags = j.at("debias_flags").get<std::vector<std::string>>();
        for (const auto& [k, v] : j.at("raw").items()) r.raw[k] = v.get<std::string>();
        return r;
    } catch (const json::exception& e) {
        throw SchemaError(std::string("dataset record: ") + e.what());
    }
}

verify::RecordCandidate candidate_of(const DatasetRecord& r) {
    verify::RecordCandidate c;
    c.plot_code = r.plot_code;
    c.declared = r.seed.premises;
    c.declared.insert(c.declared.end(), r.seed.targets.begin(), r.seed.targets.end());
    c.kind = r.kind;
    if (r.kind == verify::ProblemKind::computation) c.answer = r.answer;
    return c;
}

// ---------------------------------------------------------------------------
// stages

std::vector<deduction::SeedData> seeds_for_scene(const core::Scene& scene, const PipelineConfig& cfg,
                                                 std::uint64_t seed) {
    deduction::ChainOptions opts;
    opts.budget = cfg.chain;
    const auto graph = deduction::forward_chain(scene.predicates, scene.witness, deduction::load_rule_library(), opts);
    const auto subgoals = deduction::filter_trivial(deduction::extract_subgoals(graph));
    const auto sampled = deduction::sample_subgoals(subgoals, cfg.subgoal_budget, seed);
    return deduction::select_seeds(sampled, cfg.rho, scene.witness);
}

std::vector<SceneSeeds> select_seed_pool(const PipelineConfig& cfg) {
    cfg.validate();
    std::vector<SceneSeeds> scenes;
    std::vector<deduction::Subgoal> pool;
    std::vector<std::size_t> owner;  // pool entry -> position in `scenes`
    for (int index : cfg.indices()) {
        SceneSeeds s;
        s.index = index;
        s.seed = scene_seed(cfg.rng_seed, index);
        try {
            s.scene = core::sample_scene(s.seed, cfg.scene_budget);
        } catch (const SamplingFailed&) {
            continue;
        }
        if (!cfg.pooled_selection) {
            s.seeds = seeds_for_scene(s.scene, cfg, s.seed);
            if (!s.seeds.empty()) scenes.push_back(std::move(s));
            continue;
        }
        deduction::ChainOptions opts;
        opts.budget = cfg.chain;
        const auto graph =
            deduction::forward_chain(s.scene.predicates, s.scene.witness, deduction::load_rule_library(), opts);
        auto sampled = deduction::sample_subgoals(deduction::filter_trivial(deduction::extract_subgoals(graph)),
                                                  cfg.subgoal_budget, s.seed);
        for (auto& sg : sampled) {
            pool.push_back(std::move(sg));
            owner.push_back(scenes.size());
        }
        scenes.push_back(std::move(s));
    }
    if (cfg.pooled_selection) {
        for (std::size_t i : deduction::select_indices(pool, cfg.rho)) {
            auto& s = scenes[owner[i]];
            const auto& sg = pool[i];
            s.seeds.push_back(deduction::SeedData{sg.trace.premises, sg.trace.steps, {sg.target}, s.scene.witness});
        }
        std::erase_if(scenes, [](const SceneSeeds& s) { return s.seeds.empty(); });
    }
    return scenes;
}

std::string annotations_to_text(const schema::Annotations& a) {
    std::vector<std::string> parts;
    auto section = [&](std::string_view singular, std::string_view plural, const std::vector<std::string>& items) {
        if (items.empty()) return;
        parts.push_back(std::string(items.size() == 1 ? singular : plural) + ": " + join(items, ", "));
    };
    std::vector<std::string> rights, lengths, angles;
    for (const auto& t : a.right_angles) rights.push_back("angle" + triple_text(t) + " = 90degrees");
    for (const auto& [seg, v] : a.length_of_line) lengths.push_back(seg[0] + seg[1] + " = " + v);
    for (const auto& [tri, v] : a.measure_of_angle) angles.push_back("angle" + triple_text(tri) + " = " + v + "degrees");
    section("Right angle annotation", "Right angle annotations", rights);
    section("Length annotation", "Length annotations", lengths);
    section("Angle annotation", "Angle annotations", angles);
    return join(parts, "; ");
}

std::vector<std::string> surviving_annotations(const std::string& question, const schema::Annotations& a) {
    std::vector<std::string> probes;
    auto degree_forms = [&](const std::string& v) {
        for (const char* suffix : {"°", "^\\circ", "^{\\circ}", " degrees", "degrees"}) probes.push_back(v + suffix);
    };
    if (!a.right_angles.empty()) degree_forms("90");
    for (const auto& [tri, v] : a.measure_of_angle) degree_forms(v);
    for (const auto& [seg, v] : a.length_of_line)
        for (const auto& name : {seg[0] + seg[1], seg[1] + seg[0]})
            for (const char* eq : {"=", " = "}) probes.push_back(name + eq + v);

    std::vector<std::string> found;
    for (const auto& p : probes)
        if (question.find(p) != std::string::npos && std::find(found.begin(), found.end(), p) == found.end())
            found.push_back(p);
    return found;
}

Debiased debias(const std::string& question, const std::string& cot, const schema::PlotCode& pc,
                gateway::Gateway& gw) {
    using gateway::Role;
    Debiased d;
    const std::string step1 = gw.complete(Role::debias_step1, {{"question", question}});
    d.raw[role_key(Role::debias_step1)] = step1;
    const std::string q1 = field(gateway::extract_json(step1), "question_sanitized");

    d.question = q1;
    if (!pc.annotations.empty()) {
        const std::string step2 = gw.complete(
            Role::debias_step2, {{"question_simplified", q1}, {"annotations", annotations_to_text(pc.annotations)}});
        d.raw[role_key(Role::debias_step2)] = step2;
        d.question = field(gateway::extract_json(step2), "question_sanitized");
    }

    const std::string rewrite =
        gw.complete(Role::cot_rewrite, {{"cot", cot}, {"plotting_code", schema::canonical_serialize(pc)}});
    d.raw[role_key(Role::cot_rewrite)] = rewrite;
    d.cot = field(gateway::extract_json(rewrite), "cot");

    for (const auto& s : surviving_annotations(d.question, pc.annotations))
        d.flags.push_back("annotated literal survives: " + s);
    return d;
}

namespace {

std::string attempt_id(int scene_index, std::size_t k) {
    std::string n = std::to_string(scene_index);
    if (n.size() < 5) n.insert(0, 5 - n.size(), '0');
    return "scene" + n + "-" + std::to_string(k);
}

std::string steps_block(const deduction::SeedText& text) {
    if (text.step_texts.empty()) return "";
    std::string out = "<steps>\n";
    for (const auto& s : text.step_texts) out += s + "\n";
    return out + "</steps>";
}

struct Outcome {
    std::optional<DatasetRecord> record;
    std::string svg;
    std::optional<Rejection> rejection;
};

Outcome process(const Attempt& a, const PipelineConfig& cfg, gateway::Gateway& gw) {
    using gateway::Role;
    using verify::Stage;
    Outcome out;
    auto reject = [&](Stage stage, std::string reason) {
        out.rejection = Rejection{a.id, stage, std::move(reason)};
        return out;
    };

    DatasetRecord r;
    r.id = a.id;
    r.kind = a.kind;
    r.seed = {a.seed.premises, a.seed.steps, a.seed.targets};

    // instructor
    const Role instructor =
        a.kind == verify::ProblemKind::computation ? Role::instructor_computation : Role::instructor_proof;
    try {
        const std::string text = gw.complete(
            instructor,
            {{"problem", a.text.premise_text}, {"conclusion", a.text.target_text}, {"aux_section", steps_block(a.text)}});
        r.raw[role_key(instructor)] = text;
        const json j = gateway::extract_json(text);
        r.question = field(j, "question");
        r.cot = field(j, "cot");
        r.answer = field(j, "answer");
    } catch (const Error& e) {
        return reject(Stage::semantic, std::string("instructor: ") + e.what());
    }

    // judge
    if (cfg.gates.semantic) {
        try {
            const std::string text = gw.complete(Role::judge, {{"question", r.question}, {"cot", r.cot}, {"answer", r.answer}});
            r.raw[role_key(Role::judge)] = text;
            const auto verdict = gateway::parse_verdict(text);
            if (!verdict.passed) return reject(Stage::semantic, "judge: " + verdict.reason);
        } catch (const Error& e) {
            return reject(Stage::semantic, std::string("judge: ") + e.what());
        }
    }

    // coder
    try {
        const std::string text = gw.complete(Role::coder_plotcode, {{"question", r.question}});
        r.raw[role_key(Role::coder_plotcode)] = text;
        r.plot_code = schema::parse_plotcode(gateway::extract_object_text(text), cfg.schema_mode);
        schema::resolve_circles(r.plot_code);
    } catch (const Error& e) {
        return reject(Stage::plotting, e.what());
    }

    // geometry and answer
    r.report = verify::verify_record(candidate_of(r), cfg.tolerance);
    if (cfg.gates.geometric && !r.report.overall) {
        std::string reason = "verification failed";
        for (const auto& c : r.report.checks)
            if (!c.pass) {
                reason = c.kind + " " + c.subject + (c.reason.empty() ? "" : ": " + c.reason);
                break;
            }
        return reject(Stage::geometric, reason);
    }

    // image
    try {
        out.svg = render::render_svg(r.plot_code, cfg.style);
    } catch (const Error& e) {
        return reject(Stage::image, e.what());
    }
    if (cfg.gates.image) {
        const auto q = render::quality_check(r.plot_code, cfg.style);
        if (!q.pass) return reject(Stage::image, join(q.reasons, "; "));
    }

    // debias
    try {
        Debiased d = debias(r.question, r.cot, r.plot_code, gw);
        r.question_debiased = std::move(d.question);
        r.cot_debiased = std::move(d.cot);
        r.debias_flags = std::move(d.flags);
        r.raw.merge(d.raw);
    } catch (const Error& e) {
        return reject(Stage::semantic, std::string("debias: ") + e.what());
    }

    r.diagram = "diagrams/" + r.id + ".svg";
    out.record = std::move(r);
    return out;
}

}  // namespace

RunResult run(const PipelineConfig& cfg, gateway::Gateway& gw, const RunHooks& hooks) {
    cfg.validate();
    RunResult result;
    auto& st = result.stats;
    st.sampled = cfg.indices().size();
    for (const auto& picked : select_seed_pool(cfg)) {
        const std::size_t take = std::min(picked.seeds.size(), static_cast<std::size_t>(cfg.seeds_per_scene));
        for (std::size_t k = 0; k < take; ++k) {
            ++st.seed_selected;
            Attempt a;
            a.id = attempt_id(picked.index, k);
            a.scene_index = picked.index;
            a.scene = picked.scene;
            a.seed = picked.seeds[k];
            a.text = deduction::translate_seed(a.seed);
            a.kind = route(a.seed.targets);
            if (hooks.on_attempt) hooks.on_attempt(a);

            Outcome o = process(a, cfg, gw);
            if (o.record) {
                ++st.retained;
                result.records.push_back(std::move(*o.record));
                result.svgs.push_back(std::move(o.svg));
                continue;
            }
            switch (o.rejection->stage) {
            case verify::Stage::semantic: ++st.semantic_rejected; break;
            case verify::Stage::geometric: ++st.geometric_rejected; break;
            case verify::Stage::plotting: ++st.plotting_rejected; break;
            case verify::Stage::image: ++st.image_rejected; break;
            }
            result.rejections.push_back(std::move(*o.rejection));
        }
    }
    if (!st.balanced()) throw ConfigError("stage accounting does not balance");
    return result;
}

std::vector<ManifestEntry> persist(const RunResult& result, const std::string& outdir) {
    const fs::path root(outdir);
    std::vector<fs::path> written;
    std::vector<ManifestEntry> manifest;
    auto emit = [&](const std::string& rel, const std::string& bytes) {
        const fs::path p = root / rel;
        written.push_back(p);
        write_file(p, bytes);
        manifest.push_back({rel, gateway::sha256_hex(bytes), bytes.size()});
    };
    try {
        std::error_code ec;
        fs::create_directories(root / "diagrams", ec);
        if (ec) throw ConfigError("cannot create " + (root / "diagrams").string() + ": " + ec.message());

        std::string records;
        for (const auto& r : result.records) records += r.to_json().dump() + "\n";
        emit("records.jsonl", records);

        std::string rejections;
        for (const auto& x : result.rejections)
            rejections += ordered_json{{"id", x.id}, {"stage", verify::stage_name(x.stage)}, {"reason", x.reason}}.dump() + "\n";
        emit("rejections.jsonl", rejections);

        for (std::size_t i = 0; i < result.records.size(); ++i) emit(result.records[i].diagram, result.svgs.at(i));

        ordered_json stats = result.stats.to_json();
        stats["rejected"] = result.stats.rejected();
        emit("stats.json", stats.dump(2) + "\n");

        std::sort(manifest.begin(), manifest.end(), [](const auto& a, const auto& b) { return a.path < b.path; });
        ordered_json m;
        m["artifacts"] = ordered_json::array();
        for (const auto& e : manifest)
            m["artifacts"].push_back(ordered_json{{"path", e.path}, {"sha256", e.sha256}, {"bytes", e.bytes}});
        const fs::path mp = root / "manifest.json";
        written.push_back(mp);
        write_file(mp, m.dump(2) + "\n");
    } catch (...) {
        std::error_code ignore;
        for (const auto& p : written) fs::remove(p, ignore);
        throw;
    }
    return manifest;
}

}  // namespace geoforge::pipeline
