#pragma once

#include "ordermc/engine.hpp"
#include "ordermc/systems.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ordermc::systems {

enum class Formulation { robust_stability, margin, performance_range, synthesis };

std::string to_string(Formulation f);

// A fully described analysis/synthesis instance as read from a model
// file: the affine state-space blocks, the parameter box with its
// sampling laws, the chosen formulation, and its scalar knobs.
struct ModelSpec {
    Formulation formulation;
    engine::ParameterSpace space;
    StateSpaceModel model;
    std::optional<double> alpha;  // synthesis decay margin
    std::optional<double> gamma0; // margin perturbation bound
    std::string name;
};

// Parse a model description. The format is JSON with the keys
//   formulation: "robust-stability" | "margin" | "performance-range" | "synthesis"
//   parameter_space: { bounds: [[lo,hi],...],
//                      laws: ["uniform" | {"type":"truncated-normal","mean":..,"stddev":..}, ...] }
//   matrices: { A|B|C|D: [[entry,...],...] } where each entry is the
//     affine coefficient list [c0, c1, ..., cn] (constant term first;
//     trailing parameter coefficients may be omitted)
//   alpha / gamma0: scalars for the formulations that need them
// Unknown keys are errors. Throws config_error on any problem.
ModelSpec parse_model(const std::string& json_text, const std::string& origin = "model");

ModelSpec load_model_file(const std::string& path);

// Built-in instances used by the CLI and the test suites. Names:
// "synthesis", "margin", "margin-empty", "performance", "stability".
ModelSpec bundled_model(const std::string& name);
std::vector<std::string> bundled_model_names();

// Instantiate the constrained problem a model spec describes.
engine::ConstrainedProblem to_problem(const ModelSpec& spec, const HinfOptions& hinf = {});

} // namespace ordermc::systems
