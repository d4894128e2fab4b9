// Acceptance gate runner: executes the named suite (or a single check) and
// prints one PASS/FAIL line per check.  Exit status is the failure count.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>

#include "klab/acceptance.hpp"

int main(int argc, char** argv) {
    std::string suite = "all";
    std::string only;
    bool list = false;
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg == "--list") {
            list = true;
        } else if (arg == "--only" && i + 1 < argc) {
            only = argv[++i];
        } else if (arg.rfind("--", 0) == 0) {
            std::fprintf(stderr, "usage: %s [suite] [--only NAME] [--list]\n", argv[0]);
            return 2;
        } else {
            suite = arg;
        }
    }
    auto checks = klab::acceptance_checks();
    if (list) {
        for (const auto& c : checks) std::printf("%s/%s\n", c.suite.c_str(), c.name.c_str());
        return 0;
    }
    bool known_suite = false;
    for (const auto& s : klab::acceptance_suites()) known_suite |= s == suite;
    if (!known_suite) {
        std::fprintf(stderr, "unknown suite '%s' (identities|lemmas|bilinear|sqfree|all)\n",
                     suite.c_str());
        return 2;
    }

    int failures = 0, ran = 0;
    for (const auto& check : checks) {
        if (suite != "all" && check.suite != suite) continue;
        if (!only.empty() && check.name.find(only) == std::string::npos) continue;
        ++ran;
        auto t0 = std::chrono::steady_clock::now();
        klab::CheckResult r;
        try {
            r = check.run();
        } catch (const std::exception& e) {
            r = {check.suite, check.name, false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("[%s] %s/%s (%.2fs): %s\n", r.pass ? "PASS" : "FAIL", r.suite.c_str(),
                    r.name.c_str(), secs, r.detail.c_str());
        std::fflush(stdout);
        if (!r.pass) ++failures;
    }
    if (ran == 0) {
        std::fprintf(stderr, "no check matched suite='%s' only='%s'\n", suite.c_str(), only.c_str());
        return 2;
    }
    std::printf("%d/%d checks passed\n", ran - failures, ran);
    return failures;
}
