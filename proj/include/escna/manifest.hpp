#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "json.hpp"

namespace escna::cli {

// FNV-1a 64-bit hash of a file's bytes as 16 hex digits. Throws ConfigError
// if the file cannot be read.
std::string fnv1a64_file(const std::string& path);

// Provenance record written next to every command's outputs: the command
// name, the fully resolved parameters, content hashes of the input files,
// the list of files produced, and the wall time. A manifest is written even
// when the run fails; the error message then rides along in `error`.
class RunManifest {
public:
    explicit RunManifest(std::string command);

    void set_param(const std::string& key, nlohmann::ordered_json value);
    void add_input(const std::string& path); // hash recorded as null if unreadable
    void add_output(const std::string& path);
    void set_error(const std::string& message);

    // Snapshot including the wall time elapsed since construction.
    nlohmann::ordered_json to_json() const;
    void write(const std::string& path) const;

private:
    std::string command_;
    nlohmann::ordered_json params_ = nlohmann::ordered_json::object();
    nlohmann::ordered_json inputs_ = nlohmann::ordered_json::array();
    std::vector<std::string> outputs_;
    std::string error_;
    std::chrono::steady_clock::time_point start_;
};

} // namespace escna::cli
