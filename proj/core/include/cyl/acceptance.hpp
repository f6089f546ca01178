#pragma once

#include <string>
#include <vector>

#include "cyl/config.hpp"

namespace cyl {

struct CheckResult {
    int index = 0;
    std::string name;
    bool passed = false;
    double value = 0.0;   // headline number of the check
    double error = 0.0;   // its error estimate (0 when exact)
    std::string detail;
    double seconds = 0.0;
};

inline constexpr int acceptance_count = 12;

std::string check_name(int index);

// Runs one criterion; numerical failures become a failed result, not an exception.
CheckResult run_check(int index, const RunConfig& cfg);

std::vector<CheckResult> run_acceptance(const RunConfig& cfg);

// 0 if every result passed, else the index of the first failure.
int exit_code(const std::vector<CheckResult>& results);

std::string format_check(const CheckResult& r);

}  // namespace cyl
