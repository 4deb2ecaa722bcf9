#include "refugium/verify.hpp"

#include <fmt/format.h>

#include <fstream>
#include <thread>

int main(int argc, char** argv) {
  refugium::VerifyOptions options;
  options.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const refugium::VerifyReport report = refugium::run_verify(options);
  for (const auto& c : report.criteria) {
    fmt::print("{} criterion {:2d}: {}\n", c.pass ? "PASS" : "FAIL", c.id, c.name);
    if (!c.pass)
      for (const auto& d : c.details) fmt::print("      {}\n", d);
  }
  if (argc > 1) std::ofstream(argv[1], std::ios::binary) << report.text;
  return report.all_pass() ? 0 : 1;
}
