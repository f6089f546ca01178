// One PASS/FAIL line per acceptance criterion; exit code is the first failing index.
#include <cstdio>
#include <exception>
#include <thread>

#include "cyl/acceptance.hpp"

int main(int argc, char** argv) {
    try {
        cyl::RunConfig cfg = argc > 1 ? cyl::load_config(argv[1]) : cyl::RunConfig{};
        if (argc <= 1) cfg.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
        cfg.validate();
        int failed = 0;
        for (int i = 1; i <= cyl::acceptance_count; ++i) {
            if (!cfg.enabled(i)) continue;
            const auto r = cyl::run_check(i, cfg);
            std::printf("%s\n", cyl::format_check(r).c_str());
            std::fflush(stdout);
            if (!r.passed && !failed) failed = i;
        }
        std::printf("%s\n", failed ? "ACCEPTANCE: FAIL" : "ACCEPTANCE: PASS");
        return failed;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "acceptance: %s\n", e.what());
        return 100;
    }
}
