#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>

#include <nlohmann/json.hpp>

#include "pickmix/shape_index.hpp"

namespace httplib {
class Server;
}

namespace pickmix::service {

struct Request {
    std::string method;
    std::string path;
    std::map<std::string, std::string> params;
    std::string body;
};

struct Response {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;

    nlohmann::json json() const { return nlohmann::json::parse(body); }
};

/// Loaded index plus the mutable table of external embeddings. The index is
/// never modified; the table is guarded by a shared mutex.
class Session {
public:
    explicit Session(std::shared_ptr<const ShapeIndex> index,
                     std::optional<std::filesystem::path> persist_ext = std::nullopt);

    /// Routes one request. Never throws; errors become {code, message} bodies.
    Response handle(const Request& req);

    const ShapeIndex& index() const { return *index_; }
    std::size_t external_count() const;

private:
    Response meta() const;
    Response manifold(const std::string& part, const Request& req) const;
    Response silhouette(const std::string& id, const std::string& view, const Request& req) const;
    Response query(const Request& req) const;
    Response add_external(const Request& req);

    std::shared_ptr<const ShapeIndex> index_;
    std::optional<std::filesystem::path> persist_ext_;
    mutable std::shared_mutex ext_mutex_;
    ExternalTable external_;
};

/// Registers every route, CORS headers and the optional static mount.
void install_routes(httplib::Server& server, Session& session,
                    const std::optional<std::filesystem::path>& static_dir);

/// Blocks until `stop` becomes true or the listener fails. Returns false
/// when the port could not be bound.
bool serve(Session& session, const std::string& host, int port,
           const std::optional<std::filesystem::path>& static_dir, const std::atomic<bool>& stop,
           std::atomic<int>* bound_port = nullptr);

}  // namespace pickmix::service
