#ifndef MCTSI_MODEL_IO_HPP
#define MCTSI_MODEL_IO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "mctsi/bandit.hpp"
#include "mctsi/mct.hpp"

namespace mctsi {

// Model file layout:
//   { "m": 3, "cards": [2,2,2], "edges": [[1,2],[1,3]], "root": 1,
//     "root_pmf": [0.5, "0.5"], "kernels": { "2": [[...],[...]], ... } }
// Probabilities may be JSON numbers or decimal strings. The loader reports
// the first violation it meets together with a JSON-pointer-style path;
// structural problems raise ParseError, semantic ones InvariantError.
MctModel parse_model_json(const nlohmann::json& j);
MctModel load_model(const std::string& path);

// Serialization is a fixed point of the loader: serialize -> load ->
// serialize yields identical bytes (probabilities as shortest round-trip
// doubles, object keys sorted).
nlohmann::json model_to_json(const MctModel& model);
void save_model(const MctModel& model, const std::string& path);

// Experiment file layout:
//   { "model": "path.json" | {inline model}, "schedule": [128, 256, ...],
//     "trials": 500, "seed": 1, "sampling": "blocks" | "per-edge" }
// "sampling" is optional and defaults to consecutive blocks.
struct ExperimentSpec {
    MctModel model;
    std::vector<long long> schedule;
    long long trials = 0;
    std::uint64_t seed = 0;
    SamplingMode sampling = SamplingMode::kBlocks;
};

// base_dir resolves a relative "model" path reference (usually the directory
// containing the experiment file).
ExperimentSpec parse_experiment_json(const nlohmann::json& j, const std::string& base_dir);
ExperimentSpec load_experiment(const std::string& path);

}  // namespace mctsi

#endif
