#include "tvf/review/review_server.hpp"

#include <httplib.h>

#include "tvf/core/records_json.hpp"
#include "tvf/error.hpp"

namespace tvf::review {

namespace {

using json_io::Json;

constexpr const char* kJson = "application/json";

int status_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::UnknownInstance: return 404;
        case ErrorCode::UnknownRater:    return 403;
        default:                         return 400;
    }
}

void send_json(httplib::Response& res, const Json& body, int status = 200) {
    res.status = status;
    res.set_content(body.dump(), kJson);
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
    send_json(res, {{"error", {{"code", code}, {"message", message}}}}, status);
}

template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
    return [fn](const httplib::Request& req, httplib::Response& res) {
        try {
            fn(req, res);
        } catch (const Error& e) {
            send_error(res, status_for(e.code()), error_code_name(e.code()), e.what());
        } catch (const Json::exception& e) {
            send_error(res, 400, error_code_name(ErrorCode::SchemaError), e.what());
        } catch (const std::exception& e) {
            send_error(res, 500, "Internal", e.what());
        }
    };
}

} // namespace

ReviewServer::ReviewServer(ReviewStore& store, std::optional<std::filesystem::path> static_dir)
    : store_(store), server_(std::make_unique<httplib::Server>()) {
    auto& s = *server_;

    s.Get("/api/next", guarded([this](const httplib::Request& req, httplib::Response& res) {
        if (!req.has_param("rater")) fail(ErrorCode::InvalidArgument, "missing query parameter 'rater'");
        const auto next = store_.assign_next(req.get_param_value("rater"));
        send_json(res, {{"instance", next ? json_io::to_json(*next) : Json(nullptr)}});
    }));

    s.Post("/api/verdicts", guarded([this](const httplib::Request& req, httplib::Response& res) {
        Json body;
        try {
            body = Json::parse(req.body);
        } catch (const Json::parse_error& e) {
            fail(ErrorCode::SchemaError, std::string("request body is not JSON: ") + e.what());
        }
        send_json(res, to_json(store_.submit_verdict(verdict_from_json(body))));
    }));

    s.Get("/api/agreement", guarded([this](const httplib::Request& req, httplib::Response& res) {
        if (!req.has_param("question")) fail(ErrorCode::InvalidArgument, "missing query parameter 'question'");
        const Question q = parse_question(req.get_param_value("question"));
        const auto h = store_.agreement_histogram(q);
        Json hist = Json::array();
        for (auto c : h.counts) hist.push_back(c);
        send_json(res, {{"question", to_string(q)},
                        {"histogram", hist},
                        {"n_complete", h.n_complete},
                        {"n_excluded", h.n_excluded}});
    }));

    s.Get("/api/export", guarded([this](const httplib::Request&, httplib::Response& res) {
        const auto ex = store_.export_benchmark();
        Json instances = Json::array();
        for (const auto& inst : ex.accepted) instances.push_back(json_io::to_json(inst));
        Json rejected = Json::array();
        for (const auto& inst : ex.rejected) rejected.push_back(inst.id);
        send_json(res, {{"acceptance_rate", ex.acceptance_rate},
                        {"n_instances", store_.size()},
                        {"n_accepted", ex.accepted.size()},
                        {"instances", instances},
                        {"rejected_ids", rejected}});
    }));

    s.Get(R"(/api/instances/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const std::string id = req.matches[1];
        send_json(res, {{"instance", json_io::to_json(store_.instance(id))},
                        {"aggregate", to_json(store_.aggregate(id))}});
    }));

    if (static_dir) {
        if (!s.set_mount_point("/", static_dir->string())) {
            fail(ErrorCode::ConfigError, "static directory " + static_dir->string() + " does not exist");
        }
    }

    s.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
        if (!res.body.empty()) return;
        const std::string msg = "no route for " + req.method + " " + req.path;
        const auto status = res.status;
        send_error(res, status, status == 404 ? "NotFound" : "HttpError", msg);
    });
}

ReviewServer::~ReviewServer() = default;

bool ReviewServer::listen(const std::string& host, int port) { return server_->listen(host, port); }

int ReviewServer::bind_any_port(const std::string& host) { return server_->bind_to_any_port(host); }

bool ReviewServer::listen_after_bind() { return server_->listen_after_bind(); }

void ReviewServer::stop() { server_->stop(); }

void ReviewServer::wait_until_ready() const { server_->wait_until_ready(); }

} // namespace tvf::review
