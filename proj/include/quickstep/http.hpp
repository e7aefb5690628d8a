#pragma once

#include <memory>
#include <string>

#include "quickstep/service.hpp"

namespace quickstep {

/// JSON-over-HTTP front end for a Service. Request and response bodies are
/// documented in docs/api.md.
class HttpServer {
public:
    /// A non-empty token is required in the X-Quickstep-Token header of every request.
    HttpServer(Service& service, std::string auth_token);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds without serving; port 0 picks a free port. Returns the bound port.
    int bind(const std::string& host, int port);
    /// Serves until stop(); call after bind().
    void serve();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace quickstep
