#include <CLI11.hpp>

#include <iostream>

#include "dtr/service.hpp"

int main(int argc, char** argv) {
  CLI::App app{"HTTP service for interactive datatype transformations", "dtr-serve"};
  std::string host = "127.0.0.1";
  int port = 7878;
  app.add_option("--host", host, "bind address");
  app.add_option("--port", port, "bind port");
  CLI11_PARSE(app, argc, argv);

  dtr::RefactorService service;
  dtr::HttpServer server(service);
  std::cerr << "listening on " << host << ":" << port << "\n";
  if (!server.listen(host, port)) {
    std::cerr << "cannot bind " << host << ":" << port << "\n";
    return 1;
  }
  return 0;
}
