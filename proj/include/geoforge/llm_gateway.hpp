#pragma once

#include <json.hpp>

#include <condition_variable>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace geoforge::gateway {

enum class Role {
    instructor_computation,
    instructor_proof,
    coder_plotcode,
    judge,
    debias_step1,
    debias_step2,
    cot_rewrite,
    image_qc,
    caption,
};

const std::vector<Role>& all_roles();
std::string_view role_name(Role r);
/// Throws ConfigError.
Role role_from_name(std::string_view name);

using Vars = std::map<std::string, std::string>;

/// The embedded prompt for a role.
std::string_view template_text(Role r);

/// Placeholders are `{name}` with name in [a-z_][a-z0-9_]*; every other brace
/// is literal text. Returned sorted and unique.
std::vector<std::string> placeholders(std::string_view text);

/// Throws TemplateError naming the first placeholder missing from `vars`.
std::string render_template(std::string_view text, const Vars& vars);

std::string sha256_hex(std::string_view bytes);

/// Hex SHA-256 of role name, a newline, then the rendered prompt.
std::string prompt_hash(Role r, std::string_view prompt);

/// Strips code fences and returns the text of the first balanced top-level
/// object. Throws ExtractionError.
std::string extract_object_text(std::string_view text);

/// extract_object_text, then parse; candidates that fail to parse are
/// skipped. Throws ExtractionError.
nlohmann::json extract_json(std::string_view text);

enum class Backend { http, mock };

struct GatewayConfig {
    Backend backend = Backend::mock;
    std::string endpoint = "http://127.0.0.1:8000/v1/chat/completions";
    std::string model = "gpt-oss-120b";
    std::string api_key_env = "GEOFORGE_API_KEY";
    std::string system_prompt = "You are a mathematical reasoning assistant.";
    std::map<Role, double> temperature;  // overrides of the per-role defaults
    int max_retries = 3;
    double backoff_s = 0.5;  // first retry delay, doubled each attempt
    double timeout_s = 60.0;
    int concurrency = 4;
    std::string transcript;  // mock transcript path

    double temperature_for(Role r) const;
    /// Throws ConfigError.
    void validate() const;
    nlohmann::ordered_json to_json() const;
    static GatewayConfig from_json(const nlohmann::json& j);
};

struct TranscriptEntry {
    Role role;
    std::string prompt_hash;
    std::string response;
};

/// Recorded responses keyed by prompt hash; thread-safe.
class Transcript {
public:
    Transcript() = default;
    Transcript(Transcript&& other) noexcept;
    /// Throws ConfigError on IO or format errors.
    static Transcript load(const std::string& path);
    static Transcript parse(std::string_view jsonl);

    void add(Role role, const std::string& hash, const std::string& response);
    std::optional<std::string> find(const std::string& hash) const;
    std::vector<TranscriptEntry> entries() const;
    std::string to_jsonl() const;
    void save(const std::string& path) const;
    std::size_t size() const;

private:
    mutable std::mutex mu_;
    std::vector<TranscriptEntry> entries_;
    std::map<std::string, std::size_t> index_;
};

/// A model behind the roles. Implementations must be safe to call from
/// several threads.
class Gateway {
public:
    virtual ~Gateway() = default;
    /// Renders the role template (TemplateError before any backend call)
    /// and returns the raw model text.
    std::string complete(Role role, const Vars& vars);
    /// Sends an already rendered prompt.
    std::string respond(Role role, const std::string& prompt);

protected:
    virtual std::string send(Role role, const std::string& prompt, const std::string& hash) = 0;
};

/// Replays a transcript. Throws MockMiss(hash) for unrecorded prompts.
class MockGateway : public Gateway {
public:
    explicit MockGateway(std::shared_ptr<const Transcript> transcript);

protected:
    std::string send(Role role, const std::string& prompt, const std::string& hash) override;

private:
    std::shared_ptr<const Transcript> transcript_;
};

/// Chat-completion client with a hard in-flight cap and bounded retries.
class HttpGateway : public Gateway {
public:
    explicit HttpGateway(GatewayConfig cfg);

protected:
    std::string send(Role role, const std::string& prompt, const std::string& hash) override;

private:
    std::string post_once(Role role, const std::string& prompt, bool& retryable);

    GatewayConfig cfg_;
    std::string base_;  // scheme://host[:port]
    std::string path_;
    std::mutex mu_;
    std::condition_variable cv_;
    int in_flight_ = 0;
};

/// Answers from a callable, used to synthesize transcripts offline.
class CallbackGateway : public Gateway {
public:
    using Responder = std::function<std::string(Role, const std::string& prompt)>;
    explicit CallbackGateway(Responder responder);

protected:
    std::string send(Role role, const std::string& prompt, const std::string& hash) override;

private:
    Responder responder_;
};

/// Forwards to another gateway and records every exchange.
class RecordingGateway : public Gateway {
public:
    RecordingGateway(Gateway& inner, std::shared_ptr<Transcript> sink);

protected:
    std::string send(Role role, const std::string& prompt, const std::string& hash) override;

private:
    Gateway& inner_;
    std::shared_ptr<Transcript> sink_;
};

/// Builds the configured backend. Throws ConfigError.
std::unique_ptr<Gateway> make_gateway(const GatewayConfig& cfg);

struct Verdict {
    bool passed = false;
    std::string reason;
};

/// Non-boolean `passed` or unextractable text fails with "malformed verdict".
Verdict parse_verdict(std::string_view text);
Verdict judge(Gateway& gw, const std::string& question, const std::string& cot, const std::string& answer);

}  // namespace geoforge::gateway
