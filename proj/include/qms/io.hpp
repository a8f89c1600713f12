#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qms/gradient.hpp"
#include "qms/space.hpp"

namespace qms {

using json = nlohmann::json;

// file-system and parse failures; the runner maps these to exit code 3
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SpaceFile {
    QuasiMetricSpace space;
    std::optional<DomainMask> omega;
};

json space_to_json(const QuasiMetricSpace& s, const std::optional<DomainMask>& omega = {});
SpaceFile space_from_json(const json& j);

SpaceFile read_space_file(const std::string& path);
void write_space_file(const std::string& path, const QuasiMetricSpace& s,
                      const std::optional<DomainMask>& omega = {});

// point function aligned with the space labels; accepts a bare array or {"u": [...]}
std::vector<double> read_function_file(const std::string& path, int expected_n);
DomainMask read_mask_file(const std::string& path, int n);

json gradient_to_json(const GradientSequence& g);

// object keys sorted, floats in shortest round-trip form, newline-terminated
std::string canonical_dump(const json& j);
void write_json_file(const std::string& path, const json& j);
json read_json_file(const std::string& path);

}  // namespace qms
