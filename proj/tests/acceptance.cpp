// One line per acceptance criterion. Exit status 1 if any criterion fails;
// with --report-only, 1 only if a check could not be run at all.

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

#include "photosplit/validation.hpp"

int main(int argc, char** argv) {
  photosplit::ValidationOptions options;
  bool report_only = false;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--quick") == 0) options.quick = true;
    if (std::strcmp(argv[i], "--report-only") == 0) report_only = true;
  }
  int failed = 0;
  int crashed = 0;
  photosplit::run_validation(options, [&](const photosplit::CheckResult& r) {
    std::printf("%s %s (%.1f s): %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.seconds, r.detail.c_str());
    std::fflush(stdout);
    if (!r.passed) ++failed;
    if (r.detail.rfind("exception: ", 0) == 0) ++crashed;
  });
  std::printf("%d criteria failed\n", failed);
  if (report_only) return crashed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
