#pragma once

#include <memory>
#include <string>

#include <json.hpp>

#include "tvf/candidates/tagger.hpp"
#include "tvf/clients/mock_backends.hpp"

namespace httplib {
class Server;
}

namespace tvf::cli {

// The mock backends behind the shared JSON envelope, so HTTP clients can be
// pointed at fixtures. One endpoint serves every role; the "role" field of the
// request picks the backend. The tagger role uses the built-in lexicon tagger.
class MockDispatcher {
public:
    explicit MockDispatcher(const clients::MockFixtures& fixtures);

    /// Envelope in, {"output", "error"} out. Never throws.
    [[nodiscard]] nlohmann::json handle(const nlohmann::json& request);

private:
    clients::MockLlm llm_;
    clients::MockNli nli_;
    clients::MockGrounding grounding_;
    clients::MockVlm vlm_;
    candidates::LexiconTagger tagger_;
};

class MockServer {
public:
    explicit MockServer(const clients::MockFixtures& fixtures);
    ~MockServer();

    MockServer(const MockServer&) = delete;
    MockServer& operator=(const MockServer&) = delete;

    bool listen(const std::string& host, int port);
    /// Returns the bound port or -1.
    int bind_any_port(const std::string& host);
    bool listen_after_bind();
    void stop();
    void wait_until_ready() const;

private:
    MockDispatcher dispatcher_;
    std::unique_ptr<httplib::Server> server_;
};

} // namespace tvf::cli
