#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace octonahm {

// Central defaults for grid sizes, tolerances and thresholds.  Every CLI
// subcommand starts from one of these and applies --tol / --grid overrides.
struct RunConfig {
    int grid = 1000;                 // samples N (grid has N+1 nodes)
    double solver_tol = 1e-8;        // Kempf-Ness target on sup|F_hat|
    double predicate_tol = 1e-9;     // boolean predicates on O(1) frames
    double commute_tol = 1e-8;       // commuting-triple admission
    double eps = 1e-2;               // pole truncation
    double blowup_threshold = 1e8;   // sup-norm crossing counts as blow-up
    int max_iterations = 10000;
    std::uint64_t seed = 0;

    void validate() const {
        if (grid < 16) throw std::invalid_argument("grid size must be >= 16");
        if (solver_tol <= 0 || predicate_tol <= 0 || commute_tol <= 0)
            throw std::invalid_argument("tolerances must be positive");
        if (!(eps > 0 && eps < 0.25))
            throw std::invalid_argument("eps must lie in (0, 1/4)");
    }
};

// Exit codes used by the CLI.
enum ExitCode { exit_ok = 0, exit_domain_error = 1, exit_numerical_failure = 2 };

// Thrown when an algorithm fails numerically (as opposed to bad input).
struct NumericalFailure : std::runtime_error {
    explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace octonahm
