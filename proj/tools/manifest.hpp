#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace eivsparse::cli {

struct FileDigest
{
    std::string path;
    std::string sha256;
};

/// Everything needed to rerun a command: the subcommand, every flag value
/// (defaults included), the seed, input and output digests and the version.
struct RunManifest
{
    std::string subcommand;
    std::string version;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> flags;
    /// Flag naming the output location ("--out-dir" or "--output").
    std::string output_flag;
    std::vector<FileDigest> inputs;
    /// Paths relative to the output directory.
    std::vector<FileDigest> outputs;
};

std::string sha256_file(const std::filesystem::path& path);

void write_manifest(const std::filesystem::path& path, const RunManifest& m);
RunManifest read_manifest(const std::filesystem::path& path);

/// Rebuild the command line recorded in the manifest.
std::vector<std::string> manifest_argv(const RunManifest& m);

} // namespace eivsparse::cli
