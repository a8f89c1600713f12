#pragma once

#include <string>

#include <json.hpp>

namespace qms {

// Executes a manifest of analysis tasks and collects one bundle with the
// configuration echo, per-task results and the seed. Exit codes: 0 success,
// 2 invariant violation, 3 input/output failure.
struct RunOutcome {
    int exit_code = 0;
    nlohmann::json bundle;
};

RunOutcome run_manifest(const std::string& manifest_path);
RunOutcome run_manifest_json(const nlohmann::json& manifest, const std::string& base_dir);

extern const char* kToolVersion;

}  // namespace qms
