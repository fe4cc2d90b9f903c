#include "escna/manifest.hpp"

#include <cstdint>
#include "escna/format.hpp"
#include <fstream>

#include "escna/error.hpp"

namespace escna::cli {

std::string fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(escna::format("cannot read '{}'", path));
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    char buf[1 << 14];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            hash ^= static_cast<unsigned char>(buf[i]);
            hash *= 0x100000001b3ULL;
        }
        if (!in) break;
    }
    return escna::format("{:016x}", hash);
}

RunManifest::RunManifest(std::string command)
    : command_(std::move(command)), start_(std::chrono::steady_clock::now()) {}

void RunManifest::set_param(const std::string& key, nlohmann::ordered_json value) {
    params_[key] = std::move(value);
}

void RunManifest::add_input(const std::string& path) {
    nlohmann::ordered_json entry;
    entry["path"] = path;
    try {
        entry["fnv1a64"] = fnv1a64_file(path);
    } catch (const Error&) {
        entry["fnv1a64"] = nullptr;
    }
    inputs_.push_back(std::move(entry));
}

void RunManifest::add_output(const std::string& path) { outputs_.push_back(path); }

void RunManifest::set_error(const std::string& message) { error_ = message; }

nlohmann::ordered_json RunManifest::to_json() const {
    const auto elapsed = std::chrono::steady_clock::now() - start_;
    nlohmann::ordered_json j;
    j["command"] = command_;
    j["params"] = params_;
    j["inputs"] = inputs_;
    j["outputs"] = outputs_;
    j["wall_time_s"] = std::chrono::duration<double>(elapsed).count();
    if (error_.empty())
        j["error"] = nullptr;
    else
        j["error"] = error_;
    return j;
}

void RunManifest::write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw Error(escna::format("cannot open '{}' for writing", path));
    out << to_json().dump(2) << '\n';
    out.flush();
    if (!out) throw Error(escna::format("failed writing '{}'", path));
}

} // namespace escna::cli
