#include "cli/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <iterator>
#include <stdexcept>

#include <Eigen/Core>

namespace newsflow::cli {

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace {
std::string hex(std::uint64_t v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(v));
    return buf;
}
}  // namespace

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return "missing";
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return hex(fnv1a64(bytes));
}

std::string config_hash(const PipelineConfig& cfg) {
    std::string text;
    for (const auto& line : cfg.to_lines()) text += line + "\n";
    return hex(fnv1a64(text));
}

void write_manifest(const std::string& path, const std::string& subcommand, const PipelineConfig& cfg,
                    const std::vector<std::string>& inputs, const std::vector<std::string>& outputs) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write manifest " + path);
    out << "# newsflow run manifest; rerun with: newsflow " << subcommand << " --config " << path << '\n';
    out << "# subcommand: " << subcommand << '\n';
    out << "# version: newsflow " << kVersion << ", eigen " << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION
        << '.' << EIGEN_MINOR_VERSION << ", compiler " << __VERSION__ << '\n';
    out << "# config_hash: " << config_hash(cfg) << '\n';
    for (const auto& p : inputs) out << "# input: " << p << ' ' << file_digest(p) << '\n';
    for (const auto& p : outputs) out << "# output: " << p << ' ' << file_digest(p) << '\n';
    for (const auto& line : cfg.to_lines()) out << line << '\n';
}

}  // namespace newsflow::cli
