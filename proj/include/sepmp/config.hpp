#pragma once

#include <cstdint>
#include <string>

#include "sepmp/control.hpp"
#include "sepmp/logutility.hpp"

namespace sepmp {

// Experiment configuration, loaded from a JSON file. Coefficient and kernel
// functions are constants in the file; the C++ API accepts arbitrary
// callables. Validation failures name the offending field.
struct ExperimentConfig {
    IntensityModel model;
    MarkKernel kernel;

    // state coefficients (loglinear only in the file format)
    double state_alpha = 0.0;
    double state_vol = 0.0;
    double state_kappa = 0.0;

    double logutil_theta = 1.0;
    double logutil_x0 = 1.0;
    double logutil_pi_min = 1e-6;
    double logutil_pi_max = 1e6;

    double horizon = 1.0;
    std::size_t base_steps = 256;

    std::size_t mc_paths = 10000;
    std::size_t mc_inner_paths = 256;
    std::uint64_t master_seed = 0;

    std::string output_dir = "out";

    // kernel constants from the file (used for ShiftedExponential)
    double kernel_rate = 1.0;
    double kernel_shift = 0.0;

    static ExperimentConfig defaults();
    static ExperimentConfig load(const std::string& path);
    static ExperimentConfig parse(const std::string& json_text);

    std::string serialize() const;  // canonical form; hash-stamped into outputs
    std::uint64_t hash() const;

    void validate() const;
    ProblemSetup setup() const;
    LogUtilityConfig logutility() const;
};

}  // namespace sepmp
