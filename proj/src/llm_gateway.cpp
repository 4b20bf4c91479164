#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "geoforge/llm_gateway.hpp"

#include "geoforge/errors.hpp"
#include "geoforge/resources.hpp"

#include <httplib.h>
#include <openssl/evp.h>

#include <array>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

namespace geoforge::gateway {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

struct RoleInfo {
    Role role;
    std::string_view name;
    double temperature;
};

constexpr std::array<RoleInfo, 9> kRoles{{
    {Role::instructor_computation, "instructor_computation", 0.7},
    {Role::instructor_proof, "instructor_proof", 0.7},
    {Role::coder_plotcode, "coder_plotcode", 0.2},
    {Role::judge, "judge", 0.0},
    {Role::debias_step1, "debias_step1", 0.0},
    {Role::debias_step2, "debias_step2", 0.0},
    {Role::cot_rewrite, "cot_rewrite", 0.0},
    {Role::image_qc, "image_qc", 0.0},
    {Role::caption, "caption", 0.2},
}};

const RoleInfo& info(Role r) { return kRoles[static_cast<std::size_t>(r)]; }

bool ident_start(char c) { return (c >= 'a' && c <= 'z') || c == '_'; }
bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }

// Length of the placeholder name at text[i] == '{', or 0 when the brace is
// literal.
std::size_t placeholder_at(std::string_view text, std::size_t i) {
    std::size_t j = i + 1;
    if (j >= text.size() || !ident_start(text[j])) return 0;
    while (j < text.size() && ident_char(text[j])) ++j;
    if (j >= text.size() || text[j] != '}') return 0;
    return j - i - 1;
}

std::string_view strip_fence(std::string_view text) {
    const auto open = text.find("```");
    if (open == std::string_view::npos) return text;
    auto body_start = text.find('\n', open);
    if (body_start == std::string_view::npos) return text;
    ++body_start;
    const auto close = text.find("```", body_start);
    return text.substr(body_start, close == std::string_view::npos ? std::string_view::npos : close - body_start);
}

// End (exclusive) of the balanced object starting at text[i] == '{'.
std::optional<std::size_t> balanced_end(std::string_view text, std::size_t i) {
    int depth = 0;
    bool in_string = false;
    for (std::size_t k = i; k < text.size(); ++k) {
        const char c = text[k];
        if (in_string) {
            if (c == '\\') ++k;
            else if (c == '"') in_string = false;
            continue;
        }
        if (c == '"') in_string = true;
        else if (c == '{') ++depth;
        else if (c == '}' && --depth == 0) return k + 1;
    }
    return std::nullopt;
}

template <typename Visit>
bool for_each_object(std::string_view text, Visit visit) {
    for (std::string_view scope : {strip_fence(text), text}) {
        for (std::size_t i = scope.find('{'); i != std::string_view::npos; i = scope.find('{', i + 1)) {
            if (auto end = balanced_end(scope, i))
                if (visit(scope.substr(i, *end - i))) return true;
        }
    }
    return false;
}

std::pair<std::string, std::string> split_url(const std::string& url) {
    const auto scheme = url.find("://");
    if (scheme == std::string::npos) throw ConfigError("endpoint must include a scheme: " + url);
    const auto path = url.find('/', scheme + 3);
    if (path == std::string::npos) return {url, "/"};
    return {url.substr(0, path), url.substr(path)};
}

}  // namespace

const std::vector<Role>& all_roles() {
    static const std::vector<Role> roles = [] {
        std::vector<Role> out;
        for (const auto& r : kRoles) out.push_back(r.role);
        return out;
    }();
    return roles;
}

std::string_view role_name(Role r) { return info(r).name; }

Role role_from_name(std::string_view name) {
    for (const auto& r : kRoles)
        if (r.name == name) return r.role;
    throw ConfigError("unknown role '" + std::string(name) + "'");
}

std::string_view template_text(Role r) {
    const std::string name = "prompts/" + std::string(role_name(r)) + ".txt";
    const auto text = embedded_resource(name);
    if (text.empty()) throw TemplateError("no embedded template " + name);
    return text;
}

std::vector<std::string> placeholders(std::string_view text) {
    std::vector<std::string> out;
    for (std::size_t i = text.find('{'); i != std::string_view::npos; i = text.find('{', i + 1))
        if (auto n = placeholder_at(text, i)) out.emplace_back(text.substr(i + 1, n));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::string render_template(std::string_view text, const Vars& vars) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] == '{') {
            if (auto n = placeholder_at(text, i)) {
                const std::string name(text.substr(i + 1, n));
                auto it = vars.find(name);
                if (it == vars.end()) throw TemplateError("missing value for placeholder {" + name + "}");
                out += it->second;
                i += n + 2;
                continue;
            }
        }
        out += text[i++];
    }
    return out;
}

std::string sha256_hex(std::string_view bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw ConfigError("SHA-256 unavailable");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xf];
    }
    return out;
}

std::string prompt_hash(Role r, std::string_view prompt) {
    std::string data(role_name(r));
    data += '\n';
    data += prompt;
    return sha256_hex(data);
}

std::string extract_object_text(std::string_view text) {
    std::string found;
    for_each_object(text, [&](std::string_view obj) {
        found = obj;
        return true;
    });
    if (found.empty()) throw ExtractionError("no balanced JSON object in response");
    return found;
}

json extract_json(std::string_view text) {
    json value;
    const bool ok = for_each_object(text, [&](std::string_view obj) {
        value = json::parse(obj, nullptr, false);
        return !value.is_discarded();
    });
    if (!ok) throw ExtractionError("no parsable JSON object in response");
    return value;
}

double GatewayConfig::temperature_for(Role r) const {
    auto it = temperature.find(r);
    return it != temperature.end() ? it->second : info(r).temperature;
}

void GatewayConfig::validate() const {
    if (max_retries < 0) throw ConfigError("max_retries must be >= 0");
    if (concurrency < 1) throw ConfigError("concurrency must be >= 1");
    if (!(timeout_s > 0)) throw ConfigError("timeout_s must be positive");
    if (backoff_s < 0) throw ConfigError("backoff_s must be >= 0");
    if (backend == Backend::http) split_url(endpoint);
    if (backend == Backend::mock && transcript.empty()) throw ConfigError("mock backend needs a transcript path");
}

ordered_json GatewayConfig::to_json() const {
    ordered_json j;
    j["backend"] = backend == Backend::http ? "http" : "mock";
    j["endpoint"] = endpoint;
    j["model"] = model;
    j["api_key_env"] = api_key_env;
    j["system_prompt"] = system_prompt;
    j["temperature"] = ordered_json::object();
    for (const auto& [r, t] : temperature) j["temperature"][std::string(role_name(r))] = t;
    j["max_retries"] = max_retries;
    j["backoff_s"] = backoff_s;
    j["timeout_s"] = timeout_s;
    j["concurrency"] = concurrency;
    j["transcript"] = transcript;
    return j;
}

GatewayConfig GatewayConfig::from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("gateway config must be an object");
    GatewayConfig c;
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "backend") {
                const auto b = v.get<std::string>();
                if (b == "http") c.backend = Backend::http;
                else if (b == "mock") c.backend = Backend::mock;
                else throw ConfigError("unknown backend '" + b + "'");
            } else if (key == "endpoint") c.endpoint = v.get<std::string>();
            else if (key == "model") c.model = v.get<std::string>();
            else if (key == "api_key_env") c.api_key_env = v.get<std::string>();
            else if (key == "system_prompt") c.system_prompt = v.get<std::string>();
            else if (key == "temperature") {
                for (const auto& [role, t] : v.items()) c.temperature[role_from_name(role)] = t.get<double>();
            } else if (key == "max_retries") c.max_retries = v.get<int>();
            else if (key == "backoff_s") c.backoff_s = v.get<double>();
            else if (key == "timeout_s") c.timeout_s = v.get<double>();
            else if (key == "concurrency") c.concurrency = v.get<int>();
            else if (key == "transcript") c.transcript = v.get<std::string>();
            else throw ConfigError("unknown gateway key '" + key + "'");
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("gateway config: ") + e.what());
    }
    return c;
}

Transcript::Transcript(Transcript&& other) noexcept
    : entries_(std::move(other.entries_)), index_(std::move(other.index_)) {}

Transcript Transcript::parse(std::string_view jsonl) {
    Transcript t;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < jsonl.size()) {
        auto nl = jsonl.find('\n', pos);
        if (nl == std::string_view::npos) nl = jsonl.size();
        const auto line = jsonl.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
        const json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("role") || !j.contains("prompt_hash") ||
            !j.contains("response") || !j["response"].is_string())
            throw ConfigError("transcript line " + std::to_string(line_no) + " is malformed");
        t.add(role_from_name(j["role"].get<std::string>()), j["prompt_hash"].get<std::string>(),
              j["response"].get<std::string>());
    }
    return t;
}

Transcript Transcript::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read transcript " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

void Transcript::add(Role role, const std::string& hash, const std::string& response) {
    std::lock_guard lock(mu_);
    if (index_.count(hash)) return;  // first recording wins
    index_[hash] = entries_.size();
    entries_.push_back({role, hash, response});
}

std::optional<std::string> Transcript::find(const std::string& hash) const {
    std::lock_guard lock(mu_);
    auto it = index_.find(hash);
    if (it == index_.end()) return std::nullopt;
    return entries_[it->second].response;
}

std::vector<TranscriptEntry> Transcript::entries() const {
    std::lock_guard lock(mu_);
    return entries_;
}

std::size_t Transcript::size() const {
    std::lock_guard lock(mu_);
    return entries_.size();
}

std::string Transcript::to_jsonl() const {
    std::string out;
    for (const auto& e : entries()) {
        ordered_json j;
        j["role"] = role_name(e.role);
        j["prompt_hash"] = e.prompt_hash;
        j["response"] = e.response;
        out += j.dump();
        out += '\n';
    }
    return out;
}

void Transcript::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write transcript " + path);
    out << to_jsonl();
    if (!out) throw ConfigError("cannot write transcript " + path);
}

std::string Gateway::complete(Role role, const Vars& vars) {
    return respond(role, render_template(template_text(role), vars));
}

std::string Gateway::respond(Role role, const std::string& prompt) {
    return send(role, prompt, prompt_hash(role, prompt));
}

MockGateway::MockGateway(std::shared_ptr<const Transcript> transcript) : transcript_(std::move(transcript)) {}

std::string MockGateway::send(Role, const std::string&, const std::string& hash) {
    if (auto r = transcript_->find(hash)) return *r;
    throw MockMiss(hash);
}

HttpGateway::HttpGateway(GatewayConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    std::tie(base_, path_) = split_url(cfg_.endpoint);
}

std::string HttpGateway::post_once(Role role, const std::string& prompt, bool& retryable) {
    httplib::Client cli(base_);
    const auto secs = static_cast<time_t>(cfg_.timeout_s);
    const auto usecs = static_cast<time_t>((cfg_.timeout_s - static_cast<double>(secs)) * 1e6);
    cli.set_connection_timeout(secs, usecs);
    cli.set_read_timeout(secs, usecs);
    cli.set_write_timeout(secs, usecs);

    httplib::Headers headers;
    if (const char* key = std::getenv(cfg_.api_key_env.c_str()); key && *key)
        headers.emplace("Authorization", std::string("Bearer ") + key);

    ordered_json body;
    body["model"] = cfg_.model;
    body["messages"] = ordered_json::array({
        ordered_json{{"role", "system"}, {"content", cfg_.system_prompt}},
        ordered_json{{"role", "user"}, {"content", prompt}},
    });
    body["temperature"] = cfg_.temperature_for(role);

    auto res = cli.Post(path_, headers, body.dump(), "application/json");
    if (!res) {
        retryable = true;
        throw GatewayUnavailable("transport error: " + httplib::to_string(res.error()));
    }
    if (res->status == 429 || res->status >= 500) {
        retryable = true;
        throw GatewayUnavailable("HTTP " + std::to_string(res->status));
    }
    retryable = false;
    if (res->status != 200) throw GatewayUnavailable("HTTP " + std::to_string(res->status) + ": " + res->body);
    const json j = json::parse(res->body, nullptr, false);
    try {
        return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception&) {
        throw GatewayUnavailable("response has no choices[0].message.content");
    }
}

std::string HttpGateway::send(Role role, const std::string& prompt, const std::string&) {
    std::string last_error;
    for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
        if (attempt > 0) {
            const double delay = cfg_.backoff_s * static_cast<double>(1 << std::min(attempt - 1, 20));
            std::this_thread::sleep_for(std::chrono::duration<double>(delay));
        }
        {
            std::unique_lock lock(mu_);
            cv_.wait(lock, [&] { return in_flight_ < cfg_.concurrency; });
            ++in_flight_;
        }
        bool retryable = false;
        try {
            std::string out = post_once(role, prompt, retryable);
            {
                std::lock_guard lock(mu_);
                --in_flight_;
            }
            cv_.notify_one();
            return out;
        } catch (const GatewayUnavailable& e) {
            {
                std::lock_guard lock(mu_);
                --in_flight_;
            }
            cv_.notify_one();
            if (!retryable) throw;
            last_error = e.what();
        }
    }
    throw GatewayUnavailable("retries exhausted (" + last_error + ")");
}

CallbackGateway::CallbackGateway(Responder responder) : responder_(std::move(responder)) {}

std::string CallbackGateway::send(Role role, const std::string& prompt, const std::string&) {
    return responder_(role, prompt);
}

RecordingGateway::RecordingGateway(Gateway& inner, std::shared_ptr<Transcript> sink)
    : inner_(inner), sink_(std::move(sink)) {}

std::string RecordingGateway::send(Role role, const std::string& prompt, const std::string& hash) {
    std::string response = inner_.respond(role, prompt);
    sink_->add(role, hash, response);
    return response;
}

std::unique_ptr<Gateway> make_gateway(const GatewayConfig& cfg) {
    cfg.validate();
    if (cfg.backend == Backend::http) return std::make_unique<HttpGateway>(cfg);
    return std::make_unique<MockGateway>(std::make_shared<const Transcript>(Transcript::load(cfg.transcript)));
}

Verdict parse_verdict(std::string_view text) {
    json j;
    try {
        j = extract_json(text);
    } catch (const ExtractionError&) {
        return {false, "malformed verdict"};
    }
    if (!j.is_object() || !j.contains("passed") || !j["passed"].is_boolean()) return {false, "malformed verdict"};
    Verdict v{j["passed"].get<bool>(), ""};
    if (j.contains("reason") && j["reason"].is_string()) v.reason = j["reason"].get<std::string>();
    return v;
}

Verdict judge(Gateway& gw, const std::string& question, const std::string& cot, const std::string& answer) {
    return parse_verdict(gw.complete(Role::judge, {{"question", question}, {"cot", cot}, {"answer", answer}}));
}

}  // namespace geoforge::gateway
