#include "manifest.hpp"

#include <eivsparse/error.hpp>

#include <json.hpp>
#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <memory>

namespace eivsparse::cli {

using nlohmann::ordered_json;

std::string sha256_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string() + " for hashing");
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
        throw NumericalError("sha256: digest initialisation failed");
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

namespace {

ordered_json digests(const std::vector<FileDigest>& v)
{
    ordered_json a = ordered_json::array();
    for (const auto& d : v) a.push_back({{"path", d.path}, {"sha256", d.sha256}});
    return a;
}

std::vector<FileDigest> digests_of(const ordered_json& a)
{
    std::vector<FileDigest> out;
    for (const auto& d : a) out.push_back({d.at("path").get<std::string>(), d.at("sha256").get<std::string>()});
    return out;
}

} // namespace

void write_manifest(const std::filesystem::path& path, const RunManifest& m)
{
    ordered_json j;
    j["tool"] = "eivsparse";
    j["version"] = m.version;
    j["subcommand"] = m.subcommand;
    j["seed"] = m.seed;
    ordered_json flags = ordered_json::object();
    for (const auto& [k, v] : m.flags) flags[k] = v;
    j["flags"] = flags;
    j["output_flag"] = m.output_flag;
    j["inputs"] = digests(m.inputs);
    j["outputs"] = digests(m.outputs);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

RunManifest read_manifest(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open manifest " + path.string());
    try {
        const ordered_json j = ordered_json::parse(in);
        RunManifest m;
        m.version = j.at("version").get<std::string>();
        m.subcommand = j.at("subcommand").get<std::string>();
        m.seed = j.at("seed").get<std::uint64_t>();
        for (const auto& [k, v] : j.at("flags").items()) m.flags.emplace_back(k, v.get<std::string>());
        m.output_flag = j.at("output_flag").get<std::string>();
        m.inputs = digests_of(j.at("inputs"));
        m.outputs = digests_of(j.at("outputs"));
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("malformed manifest " + path.string() + ": " + e.what());
    }
}

std::vector<std::string> manifest_argv(const RunManifest& m)
{
    std::vector<std::string> argv{m.subcommand};
    for (const auto& [k, v] : m.flags) {
        if (v == "true") {
            argv.push_back(k);
        } else if (v != "false") {
            argv.push_back(k);
            argv.push_back(v);
        }
    }
    return argv;
}

} // namespace eivsparse::cli
