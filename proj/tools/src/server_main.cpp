#include "pavsim/http_server.hpp"

#include "CLI11.hpp"
#include "httplib.h"

#include <iostream>

int main(int argc, char** argv) {
    pavsim::ServiceConfig config;
    std::string host = "127.0.0.1";
    int port = 8765;

    CLI::App app{"Local HTTP service for pavsim simulations.", "pavsim-server"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.add_option("--host", host, "Address to bind")->capture_default_str();
    app.add_option("--port", port, "Port to listen on")->check(CLI::Range(1, 65535))->capture_default_str();
    app.add_option("--ui-origin", config.ui_origin, "Origin allowed to call the API from a browser")
        ->capture_default_str();
    app.add_option("--max-workers", config.max_workers, "Worker threads per simulation (0: all cores)")
        ->capture_default_str();
    app.add_option("--max-stimuli", config.max_stimuli, "Largest number of distinct stimuli per request")
        ->capture_default_str();
    app.add_option("--max-random-runs", config.max_random_runs, "Largest num_random_runs per request")
        ->capture_default_str();
    CLI11_PARSE(app, argc, argv);

    pavsim::Service service(config);
    httplib::Server server;
    pavsim::mount(server, service);
    if (!server.bind_to_port(host, port)) {
        std::cerr << "error: cannot listen on " << host << ':' << port << '\n';
        return 2;
    }
    std::cout << "listening on http://" << host << ':' << port << std::endl;
    return server.listen_after_bind() ? 0 : 2;
}
