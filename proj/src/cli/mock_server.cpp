#include "tvf/cli/mock_server.hpp"

#include <httplib.h>

#include "tvf/clients/http_client.hpp"
#include "tvf/error.hpp"

namespace tvf::cli {

namespace {

using nlohmann::json;

std::string wire_code(ErrorCode c) {
    switch (c) {
        case ErrorCode::NoDetection:     return "no_detection";
        case ErrorCode::InvalidArgument: return "invalid_argument";
        case ErrorCode::RateLimited:     return "rate_limited";
        case ErrorCode::Timeout:         return "timeout";
        default:                         return "unavailable";
    }
}

json reply_error(std::string code, const std::string& message) {
    return json{{"output", nullptr}, {"error", {{"code", std::move(code)}, {"message", message}}}};
}

DecodingParams decoding_from(const json& p) {
    DecodingParams d;
    if (!p.is_object()) return d;
    d.temperature = p.value("temperature", d.temperature);
    d.max_tokens = p.value("max_tokens", d.max_tokens);
    d.top_p = p.value("top_p", d.top_p);
    d.top_k = p.value("top_k", d.top_k);
    return d;
}

ImageRef image_from(const json& in) {
    ImageRef img;
    img.uri = in.at("image_uri").get<std::string>();
    return img;
}

} // namespace

MockDispatcher::MockDispatcher(const clients::MockFixtures& fixtures)
    : llm_(fixtures), nli_(fixtures), grounding_(fixtures), vlm_(fixtures) {}

json MockDispatcher::handle(const json& request) {
    try {
        if (!request.is_object() || !request.contains("role") || !request.contains("inputs")) {
            return reply_error("invalid_argument", "request needs 'role' and 'inputs'");
        }
        const auto role = clients::parse_role(request.at("role").get<std::string>());
        const json& in = request.at("inputs");
        json output;
        switch (role) {
            case clients::Role::llm:
                output = llm_.complete_chat(in.at("prompt").get<std::string>(),
                                            decoding_from(request.value("params", json::object())));
                break;
            case clients::Role::nli:
                output = json{{"entailment", nli_.score_entailment(in.at("premise").get<std::string>(),
                                                                   in.at("hypothesis").get<std::string>())}};
                break;
            case clients::Role::grounding:
                output = clients::boxes_to_output(
                    grounding_.detect_grounded_boxes(image_from(in), in.at("label").get<std::string>()));
                break;
            case clients::Role::vlm:
                output = json{{"answer", vlm_.query_vlm(image_from(in), in.at("question").get<std::string>())}};
                break;
            case clients::Role::tagger: {
                json tokens = json::array();
                for (const auto& t : tagger_.tag(in.at("text").get<std::string>())) {
                    tokens.push_back(json{{"text", t.text},
                                          {"pos", std::string(to_string(t.pos))},
                                          {"start", t.char_start},
                                          {"end", t.char_end}});
                }
                output = json{{"tokens", std::move(tokens)}};
                break;
            }
        }
        return json{{"output", std::move(output)}, {"error", nullptr}};
    } catch (const Error& e) {
        return reply_error(wire_code(e.code()), e.what());
    } catch (const std::exception& e) {
        return reply_error("invalid_argument", e.what());
    }
}

MockServer::MockServer(const clients::MockFixtures& fixtures)
    : dispatcher_(fixtures), server_(std::make_unique<httplib::Server>()) {
    server_->Post(R"(/.*)", [this](const httplib::Request& req, httplib::Response& res) {
        json request;
        try {
            request = json::parse(req.body);
        } catch (const json::parse_error& e) {
            res.status = 400;
            res.set_content(reply_error("invalid_argument", e.what()).dump(), "application/json");
            return;
        }
        const json reply = dispatcher_.handle(request);
        const bool bad = !reply["error"].is_null() && reply["error"]["code"] == "invalid_argument";
        res.status = bad ? 400 : 200;
        res.set_content(reply.dump(), "application/json");
    });
}

MockServer::~MockServer() = default;

bool MockServer::listen(const std::string& host, int port) { return server_->listen(host, port); }

int MockServer::bind_any_port(const std::string& host) { return server_->bind_to_any_port(host); }

bool MockServer::listen_after_bind() { return server_->listen_after_bind(); }

void MockServer::stop() { server_->stop(); }

void MockServer::wait_until_ready() const { server_->wait_until_ready(); }

} // namespace tvf::cli
