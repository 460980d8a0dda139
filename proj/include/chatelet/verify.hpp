#pragma once

#include <string>
#include <vector>

#include "chatelet/parallel.hpp"

namespace chatelet {

struct CheckResult {
    std::string suite;
    std::string name;
    bool pass = false;
    std::string detail;
};

// Self-checks of the library invariants, cheap enough to run on every build.
std::vector<std::string> suite_names();
std::vector<CheckResult> run_suite(const std::string& name, const Exec& exec = {});  // "all" runs every suite

}  // namespace chatelet
