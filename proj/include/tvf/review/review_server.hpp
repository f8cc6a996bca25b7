#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "tvf/review/review_store.hpp"

namespace httplib {
class Server;
}

namespace tvf::review {

// JSON API over a ReviewStore:
//   GET  /api/next?rater=ID                     {"instance": BenchmarkInstance | null}
//   POST /api/verdicts                          ReviewVerdict in, ReviewAggregate out
//   GET  /api/agreement?question=feedback|text|visual
//                                               {"question", "histogram": [l0,l1,l2,l3], "n_complete", "n_excluded"}
//   GET  /api/export                            {"acceptance_rate", "n_instances", "n_accepted", "instances", "rejected_ids"}
//   GET  /api/instances/{id}                    {"instance", "aggregate"}
// Errors answer {"error": {"code", "message"}}: 400 for bad input, 403 for
// an unknown rater, 404 for an unknown instance or route.
class ReviewServer {
public:
    explicit ReviewServer(ReviewStore& store, std::optional<std::filesystem::path> static_dir = std::nullopt);
    ~ReviewServer();

    ReviewServer(const ReviewServer&) = delete;
    ReviewServer& operator=(const ReviewServer&) = delete;

    /// Binds and serves until stop(); returns false when binding fails.
    bool listen(const std::string& host, int port);
    /// Binds to a free port and returns it (-1 on failure); serve with listen_after_bind().
    int bind_any_port(const std::string& host);
    bool listen_after_bind();
    void stop();
    void wait_until_ready() const;

private:
    ReviewStore& store_;
    std::unique_ptr<httplib::Server> server_;
};

} // namespace tvf::review
