#include "pavsim/http_server.hpp"

#include "httplib.h"

namespace pavsim {

namespace {

bool allowed_origin(const httplib::Request& req, const Service& service) {
    return req.has_header("Origin") && req.get_header_value("Origin") == service.config().ui_origin;
}

void add_cors(const httplib::Request& req, httplib::Response& res, const Service& service) {
    if (!allowed_origin(req, service)) return;
    res.set_header("Access-Control-Allow-Origin", service.config().ui_origin);
    res.set_header("Vary", "Origin");
}

}  // namespace

void mount(httplib::Server& server, Service& service) {
    const auto forward = [&service](const httplib::Request& req, httplib::Response& res) {
        const Reply reply = service.handle(req.method, req.path, req.body);
        res.status = reply.status;
        res.set_content(reply.body, reply.content_type);
        add_cors(req, res, service);
    };
    const char* pattern = R"(/.*)";
    server.Get(pattern, forward);
    server.Post(pattern, forward);
    server.Put(pattern, forward);
    server.Patch(pattern, forward);
    server.Delete(pattern, forward);
    server.Options(pattern, [&service](const httplib::Request& req, httplib::Response& res) {
        if (!allowed_origin(req, service)) {
            res.status = 403;
            return;
        }
        res.status = 204;
        add_cors(req, res, service);
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
        res.set_header("Access-Control-Max-Age", "600");
    });
}

}  // namespace pavsim
