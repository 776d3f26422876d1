#pragma once

#include "ftrend/error.hpp"
#include "ftrend/experiments/config.hpp"
#include "ftrend/version.hpp"

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace ftrend::experiments {

/// Lower-case hex SHA-256 of a file's bytes.
[[nodiscard]] inline std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "' for checksumming");
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw std::runtime_error("SHA-256 unavailable");
    std::vector<char> buf(1 << 16);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned len = 0;
    EVP_DigestFinal_ex(ctx.get(), md, &len);
    std::ostringstream hex;
    for (unsigned i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return hex.str();
}

/// Files of a directory with the given extension, sorted by name.
[[nodiscard]] inline std::vector<std::string> list_files(const std::string& dir, const std::string& ext = ".csv") {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw DataError("'" + dir + "' is not a directory");
    std::vector<std::string> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ext) out.push_back(e.path().string());
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Checksums of every configured input that exists; directories contribute each member file.
[[nodiscard]] inline nlohmann::json input_checksums(const Inputs& in) {
    namespace fs = std::filesystem;
    nlohmann::json out = nlohmann::json::object();
    for (const auto* p : {&in.temperature, &in.forcing, &in.forcing_map, &in.scenario, &in.scenario_map}) {
        if (!p->empty() && fs::is_regular_file(*p)) out[*p] = sha256_file(*p);
    }
    if (!in.ensemble_dir.empty() && fs::is_directory(in.ensemble_dir)) {
        for (const auto& f : list_files(in.ensemble_dir)) out[f] = sha256_file(f);
    }
    return out;
}

/**
 * One experiment's output directory: config.json (the normalized config),
 * summary.json (config, seed, version, input checksums and results) and any
 * number of CSV tables. Nothing time- or host-dependent is written.
 */
class Report {
public:
    Report(const ExperimentConfig& cfg, std::string experiment)
        : dir_(cfg.output_dir), experiment_(std::move(experiment)), config_(cfg), inputs_(cfg.inputs) {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec) throw DataError("cannot create output directory '" + dir_.string() + "': " + ec.message());
        write_json("config.json", config_);
    }

    [[nodiscard]] std::ofstream table(const std::string& name) {
        tables_.push_back(name);
        std::ofstream os(dir_ / name);
        if (!os) throw DataError("cannot write '" + (dir_ / name).string() + "'");
        return os;
    }

    void finish(const nlohmann::json& results) {
        nlohmann::json s = {{"experiment", experiment_},
                            {"version", ftrend::version},
                            {"seed", config_["seed"]},
                            {"config", config_},
                            {"input_checksums", input_checksums(inputs_)},
                            {"tables", tables_},
                            {"results", results}};
        write_json("summary.json", s);
    }

    [[nodiscard]] const std::filesystem::path& dir() const noexcept { return dir_; }

private:
    void write_json(const std::string& name, const nlohmann::json& j) {
        std::ofstream os(dir_ / name);
        if (!os) throw DataError("cannot write '" + (dir_ / name).string() + "'");
        os << j.dump(2) << '\n';
    }

    std::filesystem::path dir_;
    std::string experiment_;
    nlohmann::json config_;
    Inputs inputs_;
    std::vector<std::string> tables_;
};

}  // namespace ftrend::experiments
