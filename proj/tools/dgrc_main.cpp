#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <iostream>
#include <string>
#include <vector>

#include "dgrc/cli.hpp"

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("dgrc"));
  const std::vector<std::string> args(argv, argv + argc);
  return dgrc::run_cli(args, std::cout, std::cerr);
}
