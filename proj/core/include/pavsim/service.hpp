#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

namespace pavsim {

struct ServiceConfig {
    /// Requests touching more distinct stimuli (configural cues included) are refused.
    std::size_t max_stimuli = 1024;
    std::uint32_t max_random_runs = 20000;
    unsigned max_workers = 0;
    /// The one origin granted CORS access.
    std::string ui_origin = "http://127.0.0.1:5173";
};

struct Reply {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
};

/// Transport-independent handlers of the v1 HTTP API. Safe to call from
/// several threads at once.
///
///   POST /v1/simulate     simulation request -> series JSON
///   POST /v1/export       simulation request -> CSV
///   POST /v1/parse-phase  {"text": ...} -> phase JSON
///   POST /v1/parse-rw     {"text": ...} -> {"groups", "parameters", "model"}
///   POST /v1/serialize    {"experiment": ...} -> .rw text
///   GET  /v1/models       model catalogue
///   POST /v1/cancel       {"request_id": ...}
///
/// Errors are {"errors": [{"field", "message"}]} with 400 for malformed
/// bodies, 422 for invalid content, 409 for cancelled requests and 500
/// otherwise.
class Service {
public:
    explicit Service(ServiceConfig config = {});

    [[nodiscard]] Reply simulate(std::string_view body);
    [[nodiscard]] Reply export_csv(std::string_view body);
    [[nodiscard]] Reply parse_phase(std::string_view body) const;
    [[nodiscard]] Reply parse_rw(std::string_view body) const;
    [[nodiscard]] Reply serialize_rw(std::string_view body) const;
    [[nodiscard]] Reply models() const;
    [[nodiscard]] Reply cancel(std::string_view body);

    /// Routes by method and path; 404 for unknown paths, 405 for wrong methods.
    [[nodiscard]] Reply handle(std::string_view method, std::string_view path, std::string_view body);

    [[nodiscard]] const ServiceConfig& config() const noexcept { return config_; }

private:
    enum class Output { Json, Csv };
    Reply run(std::string_view body, Output output);

    ServiceConfig config_;
    std::mutex mutex_;
    std::map<std::string, std::shared_ptr<std::atomic<bool>>> in_flight_;
};

}  // namespace pavsim
