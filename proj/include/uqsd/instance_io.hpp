// JSON instance files (ensemble definitions) and structured report
// serialization. Complex numbers are [re, im] pairs throughout; state
// indices are 1-based in all I/O.

#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "uqsd/discrimination.hpp"
#include "uqsd/simulate.hpp"
#include "uqsd/witness.hpp"

namespace uqsd {

inline constexpr const char* kToolVersion = "0.1.0";

struct InstanceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParsedInstance {
    StateEnsemble ensemble;
    // Raw state vectors for entries declared pure; nullopt for mixed entries.
    std::vector<std::optional<CVector>> pure_vectors;
    nlohmann::json echo;  // canonical form of the parsed instance

    bool all_pure() const;
};

ParsedInstance parse_instance(const nlohmann::json& j);
ParsedInstance load_instance(const std::string& path);

struct RunConfig {
    SearchConfig search;
    long trials = 100000;
    std::string format = "json";  // json | text
};

nlohmann::json complex_json(const cdouble& z);
nlohmann::json vector_json(const CVector& v);
nlohmann::json matrix_json(const CMatrix& m);

nlohmann::json config_json(const RunConfig& cfg);
nlohmann::json product_vector_json(const ProductVector& pv);
nlohmann::json feasibility_json(const FeasibilityReport& report);
nlohmann::json global_povm_json(const GlobalPOVM& povm);
nlohmann::json local_povm_json(const LocalPOVMSet& lp);
nlohmann::json povm_table_json(const PovmTable& table);
nlohmann::json witness_json(const WitnessOperator& wop);
nlohmann::json witness_validation_json(const WitnessValidation& val);
nlohmann::json simulation_json(const SimulationReport& report);

// Report envelope: tool/version/command/config/instance echo + results.
nlohmann::json report_envelope(const std::string& command, const RunConfig& cfg,
                               const ParsedInstance& inst, nlohmann::json results);

// Plain-text rendering of a report for --format text.
std::string to_text(const nlohmann::json& j);

// Writes to stdout when path is empty, otherwise atomically (temp + rename).
void write_output(const std::string& path, const std::string& content);

}  // namespace uqsd
