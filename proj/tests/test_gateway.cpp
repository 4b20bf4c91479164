#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "geoforge/errors.hpp"
#include "geoforge/llm_gateway.hpp"

#include <gtest/gtest.h>
#include <httplib.h>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <thread>

using namespace geoforge;
using namespace geoforge::gateway;

namespace {

// A local chat-completion endpoint with a scripted status sequence.
class StubServer {
public:
    explicit StubServer(std::function<int(int call)> status, int delay_ms = 0) : status_(std::move(status)) {
        server_.Post("/v1/chat/completions", [this, delay_ms](const httplib::Request& req, httplib::Response& res) {
            const int call = calls_++;
            const int now = ++in_flight_;
            int seen = peak_.load();
            while (now > seen && !peak_.compare_exchange_weak(seen, now)) {
            }
            if (delay_ms) std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
            last_body_ = req.body;
            last_auth_ = req.get_header_value("Authorization");
            res.status = status_(call);
            const auto body = nlohmann::json::parse(req.body);
            const std::string prompt = body["messages"][1]["content"];
            res.set_content(nlohmann::json{{"choices", {{{"message", {{"content", "echo: " + prompt}}}}}}}.dump(),
                            "application/json");
            --in_flight_;
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~StubServer() {
        server_.stop();
        thread_.join();
    }

    GatewayConfig config() const {
        GatewayConfig c;
        c.backend = Backend::http;
        c.endpoint = "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
        c.backoff_s = 0.01;
        c.timeout_s = 5;
        c.api_key_env = "GEOFORGE_TEST_KEY";
        return c;
    }
    int calls() const { return calls_; }
    int peak() const { return peak_; }
    std::string last_body() const { return last_body_; }
    std::string last_auth() const { return last_auth_; }

private:
    httplib::Server server_;
    std::function<int(int)> status_;
    std::thread thread_;
    int port_ = 0;
    std::atomic<int> calls_{0};
    std::atomic<int> in_flight_{0};
    std::atomic<int> peak_{0};
    std::string last_body_;
    std::string last_auth_;
};

}  // namespace

TEST(Templates, EveryRoleHasAnEmbeddedPrompt) {
    for (Role r : all_roles()) {
        EXPECT_FALSE(template_text(r).empty()) << role_name(r);
        EXPECT_EQ(role_from_name(role_name(r)), r);
    }
    EXPECT_THROW(role_from_name("oracle"), ConfigError);
    EXPECT_EQ(placeholders(template_text(Role::judge)), (std::vector<std::string>{"answer", "cot", "question"}));
    EXPECT_EQ(placeholders(template_text(Role::debias_step2)),
              (std::vector<std::string>{"annotations", "question_simplified"}));
}

TEST(Templates, PlaceholderSyntax) {
    EXPECT_EQ(placeholders("{a} {b_2} {a} {\"k\": 1} {Upper} { x} {}"), (std::vector<std::string>{"a", "b_2"}));
    EXPECT_EQ(render_template("x={x}, json={\"x\": {x}}", {{"x", "1"}}), "x=1, json={\"x\": 1}");
    EXPECT_EQ(render_template("{v}", {{"v", "{w}"}}), "{w}");  // values are not re-expanded
    EXPECT_THROW(render_template("{x} {y}", {{"x", "1"}}), TemplateError);
}

TEST(Templates, MissingVariableFailsBeforeBackend) {
    bool called = false;
    CallbackGateway gw([&](Role, const std::string&) {
        called = true;
        return std::string("{}");
    });
    EXPECT_THROW(gw.complete(Role::judge, {{"question", "q"}}), TemplateError);
    EXPECT_FALSE(called);
}

TEST(Hashing, Sha256KnownVector) {
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    EXPECT_EQ(prompt_hash(Role::judge, "p"), sha256_hex("judge\np"));
    EXPECT_NE(prompt_hash(Role::judge, "p"), prompt_hash(Role::caption, "p"));
}

TEST(Extraction, Examples) {
    EXPECT_EQ(extract_json("```json\n{\"a\": 1}\n```")["a"], 1);
    EXPECT_EQ(extract_json("Sure! Here it is: {\"a\": {\"b\": [1, 2]}} Done.")["a"]["b"][1], 2);
    EXPECT_EQ(extract_json("{\"s\": \"brace } inside\"}")["s"], "brace } inside");
    EXPECT_EQ(extract_json("{not json} then {\"ok\": true}")["ok"], true);
    EXPECT_EQ(extract_object_text("x {\"a\": {}} y"), "{\"a\": {}}");
    EXPECT_THROW(extract_json("no object here"), ExtractionError);
    EXPECT_THROW(extract_json("{\"unbalanced\": 1"), ExtractionError);
    EXPECT_THROW(extract_object_text(""), ExtractionError);
}

TEST(Verdict, Leniency) {
    EXPECT_TRUE(parse_verdict("```json\n{\"passed\": true, \"reason\": \"ok\"}\n```").passed);
    const auto no = parse_verdict("Verdict: {\"passed\": false, \"reason\": \"step 2 is wrong\"}");
    EXPECT_FALSE(no.passed);
    EXPECT_EQ(no.reason, "step 2 is wrong");
    for (const char* bad : {"{\"passed\": \"yes\"}", "{\"verdict\": true}", "looks fine", "{\"passed\": 1}"}) {
        const auto v = parse_verdict(bad);
        EXPECT_FALSE(v.passed) << bad;
        EXPECT_EQ(v.reason, "malformed verdict") << bad;
    }
}

TEST(Mock, ReplaysRecordedExchanges) {
    auto sink = std::make_shared<Transcript>();
    CallbackGateway live([](Role r, const std::string& p) { return std::string(role_name(r)) + ":" + p; });
    RecordingGateway rec(live, sink);
    const std::string a = rec.complete(Role::judge, {{"question", "q"}, {"cot", "c"}, {"answer", "1"}});
    const std::string b = rec.respond(Role::caption, "describe");
    EXPECT_EQ(sink->size(), 2u);

    const auto reloaded = std::make_shared<const Transcript>(Transcript::parse(sink->to_jsonl()));
    MockGateway mock(reloaded);
    EXPECT_EQ(mock.complete(Role::judge, {{"question", "q"}, {"cot", "c"}, {"answer", "1"}}), a);
    EXPECT_EQ(mock.respond(Role::caption, "describe"), b);
    EXPECT_THROW(mock.respond(Role::caption, "something else"), MockMiss);
    EXPECT_THROW(mock.respond(Role::judge, "describe"), MockMiss);  // role is part of the key
}

TEST(Mock, MalformedTranscript) {
    EXPECT_THROW(Transcript::parse("{\"role\": \"judge\"}\n"), ConfigError);
    EXPECT_THROW(Transcript::parse("not json\n"), ConfigError);
    EXPECT_THROW(Transcript::load("/nonexistent/transcript.jsonl"), ConfigError);
    EXPECT_EQ(Transcript::parse("\n\n").size(), 0u);
}

TEST(Config, ValidationAndRoundTrip) {
    GatewayConfig c;
    c.temperature[Role::judge] = 0.3;
    c.concurrency = 7;
    const auto back = GatewayConfig::from_json(nlohmann::json::parse(c.to_json().dump()));
    EXPECT_EQ(back.concurrency, 7);
    EXPECT_DOUBLE_EQ(back.temperature_for(Role::judge), 0.3);
    EXPECT_DOUBLE_EQ(back.temperature_for(Role::coder_plotcode), 0.2);

    GatewayConfig bad;
    bad.concurrency = 0;
    EXPECT_THROW(bad.validate(), ConfigError);
    bad = {};
    bad.max_retries = -1;
    EXPECT_THROW(bad.validate(), ConfigError);
    EXPECT_THROW(GatewayConfig::from_json({{"bogus", 1}}), ConfigError);
}

TEST(Http, ExtractsMessageContent) {
    StubServer server([](int) { return 200; });
    ::setenv("GEOFORGE_TEST_KEY", "sk-test", 1);
    HttpGateway gw(server.config());
    EXPECT_EQ(gw.respond(Role::judge, "hello"), "echo: hello");
    ::unsetenv("GEOFORGE_TEST_KEY");
    EXPECT_EQ(server.last_auth(), "Bearer sk-test");
    const auto body = nlohmann::json::parse(server.last_body());
    EXPECT_EQ(body["model"], "gpt-oss-120b");
    EXPECT_EQ(body["messages"][0]["role"], "system");
    EXPECT_DOUBLE_EQ(body["temperature"].get<double>(), 0.0);
}

TEST(Http, RetriesTransientFailures) {
    StubServer server([](int call) { return call < 2 ? 503 : 200; });
    HttpGateway gw(server.config());
    EXPECT_EQ(gw.respond(Role::caption, "x"), "echo: x");
    EXPECT_EQ(server.calls(), 3);
}

TEST(Http, GivesUpAfterMaxRetries) {
    StubServer server([](int) { return 500; });
    auto cfg = server.config();
    cfg.max_retries = 2;
    HttpGateway gw(cfg);
    EXPECT_THROW(gw.respond(Role::caption, "x"), GatewayUnavailable);
    EXPECT_EQ(server.calls(), 3);
}

TEST(Http, ClientErrorsAreNotRetried) {
    StubServer server([](int) { return 400; });
    HttpGateway gw(server.config());
    EXPECT_THROW(gw.respond(Role::caption, "x"), GatewayUnavailable);
    EXPECT_EQ(server.calls(), 1);
}

TEST(Http, UnreachableEndpoint) {
    GatewayConfig c;
    c.backend = Backend::http;
    c.endpoint = "http://127.0.0.1:1/v1/chat/completions";
    c.max_retries = 1;
    c.backoff_s = 0.0;
    c.timeout_s = 1;
    HttpGateway gw(c);
    EXPECT_THROW(gw.respond(Role::caption, "x"), GatewayUnavailable);
}

TEST(Http, InFlightCapIsHonoured) {
    StubServer server([](int) { return 200; }, 60);
    auto cfg = server.config();
    cfg.concurrency = 2;
    HttpGateway gw(cfg);
    std::vector<std::thread> threads;
    std::atomic<int> ok{0};
    for (int i = 0; i < 6; ++i)
        threads.emplace_back([&, i] {
            if (gw.respond(Role::caption, std::to_string(i)) == "echo: " + std::to_string(i)) ++ok;
        });
    for (auto& t : threads) t.join();
    EXPECT_EQ(ok, 6);
    EXPECT_EQ(server.calls(), 6);
    EXPECT_LE(server.peak(), 2);
    EXPECT_GE(server.peak(), 1);
}
