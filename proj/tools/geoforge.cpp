// geoforge: command-line front end for seeds, verification, rendering,
// evaluation and the end-to-end pipeline.

#include "geoforge/alignment_metrics.hpp"
#include "geoforge/deduction.hpp"
#include "geoforge/errors.hpp"
#include "geoforge/llm_gateway.hpp"
#include "geoforge/pipeline.hpp"
#include "geoforge/reference_responder.hpp"
#include "geoforge/renderer.hpp"
#include "geoforge/verifier.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace gf = geoforge;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw gf::ConfigError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw gf::ConfigError("cannot write " + path);
    out << bytes;
}

json read_json(const std::string& path) {
    json j = json::parse(read_file(path), nullptr, false);
    if (j.is_discarded()) throw gf::ConfigError(path + " is not valid JSON");
    return j;
}

std::vector<json> read_jsonl(const std::string& path) {
    std::vector<json> out;
    std::istringstream in(read_file(path));
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        out.push_back(json::parse(line, nullptr, false));
    }
    return out;
}

// A dataset record, a bare candidate {plot_code, declared, answer, kind}, or
// a plot code on its own.
gf::verify::RecordCandidate candidate_from(const json& j) {
    if (j.contains("seed")) return gf::pipeline::candidate_of(gf::pipeline::DatasetRecord::from_json(j));
    gf::verify::RecordCandidate c;
    if (!j.contains("plot_code")) {
        c.plot_code = gf::schema::plotcode_from_json(j);
        c.kind = gf::verify::ProblemKind::proof;
        return c;
    }
    c.plot_code = gf::schema::plotcode_from_json(j.at("plot_code"));
    if (j.contains("declared"))
        for (const auto& p : j["declared"]) c.declared.push_back(gf::core::parse_predicate(p.get<std::string>()));
    c.kind = gf::verify::problem_kind_from_name(j.value("kind", "computation"));
    if (j.contains("answer") && j["answer"].is_string()) c.answer = j["answer"].get<std::string>();
    return c;
}

gf::schema::PlotCode plot_code_from(const json& j) {
    return gf::schema::plotcode_from_json(j.contains("plot_code") ? j.at("plot_code") : j);
}

void print_stats(const gf::pipeline::StageStats& st) { std::cout << st.to_json().dump(2) << "\n"; }

int cmd_seed(std::uint64_t rng_seed, int scenes, double rho, std::size_t budget, const std::string& out_path) {
    gf::pipeline::PipelineConfig cfg;
    cfg.rng_seed = rng_seed;
    cfg.scenes = scenes;
    cfg.rho = rho;
    cfg.subgoal_budget = budget;
    cfg.validate();
    std::string out;
    std::size_t count = 0;
    for (const auto& picked : gf::pipeline::select_seed_pool(cfg)) {
        for (const auto& s : picked.seeds) {
            const auto text = gf::deduction::translate_seed(s);
            ordered_json j;
            j["scene"] = picked.index;
            j["seed"] = gf::pipeline::SeedProvenance{s.premises, s.steps, s.targets}.to_json();
            j["witness"] = ordered_json::object();
            for (const auto& [l, p] : s.witness.coords) j["witness"][l] = {p.x, p.y};
            j["text"] = {{"premises", text.premise_text}, {"steps", text.step_texts}, {"target", text.target_text}};
            out += j.dump() + "\n";
            ++count;
        }
    }
    write_file(out_path, out);
    std::cerr << count << " seeds from " << scenes << " scenes\n";
    return 0;
}

int cmd_verify(const std::string& in, double tol) {
    gf::verify::ToleranceConfig t;
    if (tol > 0) t.eps_abs = t.eps_angle_deg = tol;
    gf::verify::validate(t);
    const auto report = gf::verify::verify_record(candidate_from(read_json(in)), t);
    std::cout << report.to_json().dump(2) << "\n";
    return report.overall ? 0 : 1;
}

int cmd_render(const std::string& in, const std::string& out, bool png) {
    const auto pc = plot_code_from(read_json(in));
    write_file(out, gf::render::render_svg(pc));
    if (png) {
        std::filesystem::path p(out);
        p.replace_extension(".png");
        gf::render::render_png(pc, p.string());
    }
    const auto q = gf::render::quality_check(pc);
    for (const auto& r : q.reasons) std::cerr << "quality: " << r << "\n";
    return 0;
}

int cmd_eval(const std::string& pred_path, const std::string& truth_path, std::size_t bins) {
    const auto preds = read_jsonl(pred_path);
    const auto truths = read_jsonl(truth_path);
    if (preds.size() != truths.size()) throw gf::ConfigError("prediction and truth files differ in length");

    ordered_json report;
    report["samples"] = ordered_json::array();
    std::vector<gf::metrics::Sample> samples;
    std::size_t parsed = 0, fully_correct = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const auto truth = plot_code_from(truths[i]);
        const json& p = preds[i];
        std::optional<gf::schema::PlotCode> pc;
        try {
            if (p.is_object() && p.contains("text"))
                pc = gf::schema::parse_plotcode(gf::gateway::extract_object_text(p["text"].get<std::string>()));
            else if (p.is_object())
                pc = plot_code_from(p);
        } catch (const gf::Error&) {
        }
        ordered_json s;
        s["index"] = i;
        s["parsed"] = pc.has_value();
        gf::metrics::F1Report f1;
        if (pc) {
            ++parsed;
            f1 = gf::metrics::segment_f1(*pc, truth);
            const auto am = gf::metrics::annotation_match(pc->annotations, truth.annotations);
            s["annotations_fully_correct"] = am.fully_correct;
            fully_correct += am.fully_correct ? 1 : 0;
        } else {
            f1 = gf::metrics::f1_from_counts(0, 0, gf::metrics::segment_f1(truth, truth).truth);
        }
        s["precision"] = f1.precision;
        s["recall"] = f1.recall;
        s["f1"] = f1.f1;
        const bool solved = p.is_object() && p.value("solved", false);
        s["solved"] = solved;
        samples.push_back({f1.f1, solved});
        report["samples"].push_back(std::move(s));
    }
    report["parse_rate"] = preds.empty() ? 0.0 : static_cast<double>(parsed) / static_cast<double>(preds.size());
    report["annotation_fully_correct_rate"] =
        parsed == 0 ? 0.0 : static_cast<double>(fully_correct) / static_cast<double>(parsed);
    report["bins"] = ordered_json::array();
    for (const auto& b : gf::metrics::bin_by_score(samples, bins))
        report["bins"].push_back(ordered_json{{"bin", b.index},
                                              {"size", b.size},
                                              {"min_f1", b.min_score},
                                              {"max_f1", b.max_score},
                                              {"accuracy", b.accuracy}});
    std::cout << report.dump(2) << "\n";
    return 0;
}

gf::pipeline::PipelineConfig load_config(const std::string& path, const std::string& out_override) {
    auto cfg = gf::pipeline::PipelineConfig::load(path);
    if (!out_override.empty()) cfg.output_dir = out_override;
    return cfg;
}

int finish_run(const gf::pipeline::RunResult& r, const std::string& outdir) {
    gf::pipeline::persist(r, outdir);
    print_stats(r.stats);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"geoforge: synthesize and verify plane-geometry problems"};
    app.require_subcommand(1);

    std::uint64_t rng_seed = 0;
    int scenes = 100;
    double rho = 0.2;
    std::size_t budget = 64;
    std::string out, in, config, pred, truth, transcript, corrupt;
    double tol = 0.0;
    bool png = false;
    std::size_t bins = 4;

    auto* seed = app.add_subcommand("seed", "sample scenes, deduce and emit selected seeds as JSONL");
    seed->add_option("--rng-seed", rng_seed, "generator seed");
    seed->add_option("--scenes", scenes, "number of scenes (N)");
    seed->add_option("--rho", rho, "selection fraction");
    seed->add_option("--budget", budget, "subgoal budget (M)");
    seed->add_option("--out", out, "output JSONL")->required();

    auto* verify = app.add_subcommand("verify", "verify a record; exits 1 on failure");
    verify->add_option("--in", in, "record JSON")->required();
    verify->add_option("--tol", tol, "absolute and angular tolerance");

    auto* render = app.add_subcommand("render", "render plot code to SVG");
    render->add_option("--in", in, "record or plot-code JSON")->required();
    render->add_option("--out", out, "SVG path")->required();
    render->add_flag("--png", png, "also write a PNG next to the SVG");

    auto* eval = app.add_subcommand("eval", "segment F1, annotation and parse-rate report");
    eval->add_option("--pred", pred, "predictions JSONL")->required();
    eval->add_option("--truth", truth, "ground truth JSONL")->required();
    eval->add_option("--bins", bins, "score bins");

    auto* pipeline = app.add_subcommand("pipeline", "end-to-end pipeline");
    pipeline->require_subcommand(1);
    auto* run = pipeline->add_subcommand("run", "run with the configured gateway");
    run->add_option("--config", config, "pipeline config JSON")->required();
    run->add_option("--out", out, "output directory (overrides the config)");

    auto* gw = app.add_subcommand("gateway", "transcript tools");
    gw->require_subcommand(1);
    auto* record = gw->add_subcommand("record", "run against the HTTP backend and record a transcript");
    record->add_option("--config", config)->required();
    record->add_option("--transcript", transcript)->required();
    record->add_option("--out", out);
    auto* replay = gw->add_subcommand("replay", "run against a recorded transcript");
    replay->add_option("--config", config)->required();
    replay->add_option("--transcript", transcript)->required();
    replay->add_option("--out", out);
    auto* synth = gw->add_subcommand("synth", "record a transcript from the reference responder");
    synth->add_option("--config", config)->required();
    synth->add_option("--transcript", transcript)->required();
    synth->add_option("--corrupt", corrupt, "JSON map of attempt id to corruption");
    synth->add_option("--out", out);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*seed) return cmd_seed(rng_seed, scenes, rho, budget, out);
        if (*verify) return cmd_verify(in, tol);
        if (*render) return cmd_render(in, out, png);
        if (*eval) return cmd_eval(pred, truth, bins);
        if (*run) {
            const auto cfg = load_config(config, out);
            auto g = gf::gateway::make_gateway(cfg.gateway);
            return finish_run(gf::pipeline::run(cfg, *g), cfg.output_dir);
        }
        if (*record) {
            auto cfg = load_config(config, out);
            cfg.gateway.backend = gf::gateway::Backend::http;
            gf::gateway::HttpGateway http(cfg.gateway);
            auto sink = std::make_shared<gf::gateway::Transcript>();
            gf::gateway::RecordingGateway rec(http, sink);
            const auto r = gf::pipeline::run(cfg, rec);
            sink->save(transcript);
            return finish_run(r, cfg.output_dir);
        }
        if (*replay) {
            auto cfg = load_config(config, out);
            cfg.gateway.backend = gf::gateway::Backend::mock;
            cfg.gateway.transcript = transcript;
            auto g = gf::gateway::make_gateway(cfg.gateway);
            return finish_run(gf::pipeline::run(cfg, *g), cfg.output_dir);
        }
        if (*synth) {
            const auto cfg = load_config(config, out);
            gf::pipeline::CorruptionPlan plan;
            if (!corrupt.empty()) plan = gf::pipeline::corruption_plan_from_json(read_json(corrupt));
            const auto s = gf::pipeline::synthesize(cfg, plan);
            s.transcript->save(transcript);
            return finish_run(s.run, cfg.output_dir);
        }
    } catch (const gf::Error& e) {
        std::cerr << "geoforge: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
