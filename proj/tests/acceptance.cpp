// Runs every acceptance criterion and prints one line per criterion.
#include <cstdio>
#include <cstdlib>
#include <thread>

#include "qtflux/verify.hpp"

int main() {
  qtflux::verify::Options opts;
  opts.level = qtflux::verify::Level::full;
  opts.threads = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("QTFLUX_THREADS")) opts.threads = std::max(1, std::atoi(env));

  int failures = 0;
  for (int id : qtflux::verify::check_ids(opts.level)) {
    const auto r = qtflux::verify::run_check(id, opts);
    std::printf("[%s] AC-%02d %s: %s (%.2f s)\n", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(),
                r.detail.c_str(), r.seconds);
    std::fflush(stdout);
    if (!r.passed) ++failures;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(qtflux::verify::check_ids(opts.level).size()) - failures,
              qtflux::verify::check_ids(opts.level).size());
  return failures == 0 ? 0 : 1;
}
