#include "qms/io.hpp"

#include <fstream>
#include <stdexcept>

namespace qms {

json space_to_json(const QuasiMetricSpace& s, const std::optional<DomainMask>& omega) {
    json j;
    j["labels"] = s.labels;
    json rows = json::array();
    for (int i = 0; i < s.size(); ++i) {
        json row = json::array();
        for (int k = 0; k < s.size(); ++k) row.push_back(s.dist.at(i, k));
        rows.push_back(std::move(row));
    }
    j["dist"] = std::move(rows);
    j["weight"] = s.weight;
    if (omega) j["omega"] = omega->indices;
    return j;
}

SpaceFile space_from_json(const json& j) {
    SpaceFile f;
    const auto& rows = j.at("dist");
    int n = static_cast<int>(rows.size());
    f.space.dist = Mat(n);
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(rows[i].size()) != n)
            throw std::invalid_argument("distance matrix is not square");
        for (int k = 0; k < n; ++k) f.space.dist.at(i, k) = rows[i][k].get<double>();
    }
    f.space.weight = j.at("weight").get<std::vector<double>>();
    if (j.contains("labels"))
        f.space.labels = j["labels"].get<std::vector<std::string>>();
    else
        for (int i = 0; i < n; ++i) f.space.labels.push_back(std::to_string(i));
    validate(f.space);
    if (j.contains("omega")) {
        DomainMask m;
        m.indices = j["omega"].get<std::vector<int>>();
        std::sort(m.indices.begin(), m.indices.end());
        for (int i : m.indices)
            if (i < 0 || i >= n) throw std::invalid_argument("domain index out of range");
        f.omega = m;
    }
    return f;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed JSON in ") + path + ": " + e.what());
    }
    return j;
}

std::string canonical_dump(const json& j) { return j.dump(2) + "\n"; }

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << canonical_dump(j);
}

SpaceFile read_space_file(const std::string& path) { return space_from_json(read_json_file(path)); }

void write_space_file(const std::string& path, const QuasiMetricSpace& s,
                      const std::optional<DomainMask>& omega) {
    write_json_file(path, space_to_json(s, omega));
}

std::vector<double> read_function_file(const std::string& path, int expected_n) {
    json j = read_json_file(path);
    if (j.is_object() && j.contains("u")) j = j["u"];
    auto v = j.get<std::vector<double>>();
    if (static_cast<int>(v.size()) != expected_n)
        throw std::invalid_argument("function length does not match the space");
    return v;
}

DomainMask read_mask_file(const std::string& path, int n) {
    json j = read_json_file(path);
    if (j.is_object() && j.contains("omega")) j = j["omega"];
    DomainMask m;
    m.indices = j.get<std::vector<int>>();
    std::sort(m.indices.begin(), m.indices.end());
    for (int i : m.indices)
        if (i < 0 || i >= n) throw std::invalid_argument("domain index out of range");
    return m;
}

json gradient_to_json(const GradientSequence& g) {
    json j = json::array();
    for (size_t l = 0; l < g.level_ids.size(); ++l)
        j.push_back({{"level", g.level_ids[l]}, {"values", g.values[l]}});
    return j;
}

}  // namespace qms
