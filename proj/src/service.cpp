#include "pickmix/service.hpp"

#include <chrono>
#include <fstream>
#include <mutex>
#include <regex>
#include <thread>

#include <httplib.h>

#include "pickmix/errors.hpp"
#include "pickmix/index_store.hpp"
#include "pickmix/manifold.hpp"
#include "pickmix/rasterizer.hpp"
#include "pickmix/retrieval.hpp"

namespace pickmix::service {

namespace {

Response json_response(int status, const nlohmann::json& body) {
    return {status, "application/json", body.dump()};
}

Response error_response(int status, const std::string& code, const std::string& message) {
    return json_response(status, {{"code", code}, {"message", message}});
}

int status_for(const Error& e) {
    if (dynamic_cast<const DuplicateIdError*>(&e)) return 409;
    if (dynamic_cast<const EmptyIndexError*>(&e) || dynamic_cast<const IOError*>(&e)) return 500;
    return 400;
}

bool parse_uint(const std::string& s, unsigned long long limit, unsigned long long& out) {
    if (s.empty() || s.size() > 12 || s.find_first_not_of("0123456789") != std::string::npos)
        return false;
    out = std::stoull(s);
    return out <= limit;
}

std::string param(const Request& req, const std::string& key, const std::string& fallback = "") {
    auto it = req.params.find(key);
    return it == req.params.end() ? fallback : it->second;
}

}  // namespace

Session::Session(std::shared_ptr<const ShapeIndex> index,
                 std::optional<std::filesystem::path> persist_ext)
    : index_(std::move(index)), persist_ext_(std::move(persist_ext)) {
    if (persist_ext_ && std::filesystem::exists(*persist_ext_))
        external_ = ingest_external(*index_, *persist_ext_);
}

std::size_t Session::external_count() const {
    std::shared_lock lock(ext_mutex_);
    return external_.size();
}

Response Session::handle(const Request& req) {
    static const std::regex manifold_re(R"(^/api/manifold/([^/]+)$)");
    static const std::regex silhouette_re(R"(^/api/shape/([^/]+)/silhouette/([^/]+)$)");
    try {
        std::smatch m;
        if (req.method == "GET") {
            if (req.path == "/healthz") return json_response(200, {{"status", "ok"}});
            if (req.path == "/api/meta") return meta();
            if (std::regex_match(req.path, m, manifold_re)) return manifold(m[1], req);
            if (std::regex_match(req.path, m, silhouette_re)) return silhouette(m[1], m[2], req);
        } else if (req.method == "POST") {
            if (req.path == "/api/query") return query(req);
            if (req.path == "/api/external") return add_external(req);
        }
        return error_response(404, "NotFound", req.method + " " + req.path + " is not a route");
    } catch (const Error& e) {
        return error_response(status_for(e), e.kind(), e.what());
    } catch (const std::exception& e) {
        return error_response(500, "InternalError", e.what());
    }
}

Response Session::meta() const {
    const auto& idx = *index_;
    nlohmann::json parts = nlohmann::json::array();
    for (const auto& p : idx.parts)
        parts.push_back({{"label", p.label},
                         {"stress", p.manifold.stress},
                         {"duplicates", p.manifold.duplicate_count()},
                         {"iterations", p.manifold.iterations},
                         {"converged", p.manifold.converged}});
    nlohmann::json shapes = nlohmann::json::array();
    for (const auto& s : idx.shapes) shapes.push_back({{"id", s.id}, {"name", s.name}});
    return json_response(200, {{"parts", idx.label_set},
                               {"part_stats", parts},
                               {"shape_count", idx.size()},
                               {"shapes", shapes},
                               {"dim", idx.dim()},
                               {"views", kViewCount},
                               {"fingerprint", idx.fingerprint.to_json()}});
}

Response Session::manifold(const std::string& part, const Request& req) const {
    const auto& idx = *index_;
    if (!idx.part_position(part)) return error_response(404, "UnknownPartError", "unknown part '" + part + "'");
    const auto& table = idx.part(part);
    const auto projection = param(req, "projection", "2d");
    nlohmann::json out = nlohmann::json::array();
    if (projection == "2d") {
        const auto xy = project_2d(table.manifold);
        for (std::size_t r = 0; r < idx.size(); ++r)
            out.push_back({{"id", idx.shapes[r].id},
                           {"x", xy(Eigen::Index(r), 0)},
                           {"y", xy(Eigen::Index(r), 1)}});
    } else if (projection == "none") {
        for (std::size_t r = 0; r < idx.size(); ++r) {
            const Eigen::VectorXd row = table.manifold.coords.row(Eigen::Index(r)).transpose();
            out.push_back({{"id", idx.shapes[r].id},
                           {"coords", std::vector<double>(row.data(), row.data() + row.size())}});
        }
    } else {
        return error_response(400, "QueryError", "projection must be '2d' or 'none'");
    }
    return json_response(200, out);
}

Response Session::silhouette(const std::string& id, const std::string& view,
                             const Request& req) const {
    const auto& idx = *index_;
    unsigned long long shape_id = 0;
    unsigned long long view_index = 0;
    if (!parse_uint(id, 0xFFFFFFFFull, shape_id) || !idx.find_row(std::uint32_t(shape_id)))
        return error_response(404, "UnknownSourceError", "no shape '" + id + "'");
    if (!parse_uint(view, kViewCount - 1, view_index))
        return error_response(404, "NotFound", "view must be in 0.." + std::to_string(kViewCount - 1));
    unsigned long long resolution = 128;
    const auto res_text = param(req, "resolution");
    if (!res_text.empty() && (!parse_uint(res_text, 1024, resolution) || resolution < 8))
        return error_response(400, "ResolutionError", "resolution must be in 8..1024");

    const auto& mesh = idx.meshes[*idx.find_row(std::uint32_t(shape_id))];
    const auto vp = dodecahedron_viewpoints()[view_index];
    const auto part = param(req, "part");
    SilhouetteImage img;
    if (part.empty()) {
        img = render_silhouette(mesh.mesh, vp, int(resolution));
    } else {
        if (!idx.part_position(part))
            return error_response(404, "UnknownPartError", "unknown part '" + part + "'");
        for (const auto& [label, m] : split_parts(mesh))
            if (label == part) img = render_silhouette(m, vp, int(resolution));
    }
    return {200, "image/x-portable-graymap", to_pgm(img)};
}

Response Session::query(const Request& req) const {
    const auto q = parse_blend_query(req.body);
    std::shared_lock lock(ext_mutex_);
    const auto results = blend_retrieve(*index_, q, &external_);
    return json_response(200, results_to_json(*index_, results, true));
}

Response Session::add_external(const Request& req) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(req.body);
    } catch (const nlohmann::json::exception& e) {
        throw QueryError(std::string("malformed JSON: ") + e.what());
    }
    auto rec = parse_external_record(j, *index_);
    const auto id = rec.id;
    std::unique_lock lock(ext_mutex_);
    external_.add(std::move(rec));
    if (persist_ext_) {
        nlohmann::json all = nlohmann::json::array();
        for (const auto& [_, e] : external_.records()) all.push_back(external_to_json(e));
        const auto tmp = persist_ext_->string() + ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            out << all.dump(2);
            if (!out) throw IOError("cannot write " + tmp);
        }
        std::filesystem::rename(tmp, *persist_ext_);
    }
    return json_response(201, {{"id", id}, {"source", "ext:" + id}});
}

void install_routes(httplib::Server& server, Session& session,
                    const std::optional<std::filesystem::path>& static_dir) {
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});
    if (static_dir) server.set_mount_point("/", static_dir->string());

    auto forward = [&session](const httplib::Request& hreq, httplib::Response& hres) {
        Request req;
        req.method = hreq.method;
        req.path = hreq.path;
        for (const auto& [k, v] : hreq.params) req.params.emplace(k, v);
        req.body = hreq.body;
        const auto res = session.handle(req);
        hres.status = res.status;
        hres.set_content(res.body, res.content_type);
    };
    server.Get("/healthz", forward);
    server.Get(R"(/api/.*)", forward);
    server.Post(R"(/api/.*)", forward);
    server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
}

bool serve(Session& session, const std::string& host, int port,
           const std::optional<std::filesystem::path>& static_dir, const std::atomic<bool>& stop,
           std::atomic<int>* bound_port) {
    httplib::Server server;
    install_routes(server, session, static_dir);
    int actual = port;
    if (port == 0) {
        actual = server.bind_to_any_port(host);
        if (actual < 0) return false;
    } else if (!server.bind_to_port(host, port)) {
        return false;
    }
    if (bound_port) bound_port->store(actual);
    std::thread listener([&server] { server.listen_after_bind(); });
    while (!stop.load()) std::this_thread::sleep_for(std::chrono::milliseconds(50));
    server.stop();
    listener.join();
    return true;
}

}  // namespace pickmix::service
