#pragma once

// Run artifacts: MXC1 binary snapshots, CSV tables, key=value configs and
// per-run meta.json.
//
// MXC1 layout: magic bytes "MXC1", u32 dimension count d, u32 grid size n,
// then n^d little-endian float64 values in row-major order.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "mixlab/spectral.hpp"

namespace mixlab {

void write_mxc1(const std::filesystem::path& path, const Field2D& f);
void write_mxc1(const std::filesystem::path& path, const Field6D& f);
Field2D read_mxc1_2d(const std::filesystem::path& path);
Field6D read_mxc1_6d(const std::filesystem::path& path);

/// Flat UTF-8 key=value configuration ('#' starts a comment, blank lines
/// ignored). Later assignments win.
class Config {
public:
    Config() = default;
    static Config from_file(const std::filesystem::path& path);
    static Config from_string(const std::string& text);

    bool has(const std::string& key) const { return kv_.count(key) > 0; }
    void set(const std::string& key, const std::string& value) { kv_[key] = value; }

    std::string get(const std::string& key, const std::string& fallback) const;
    double get(const std::string& key, double fallback) const;
    int get(const std::string& key, int fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;

    const std::map<std::string, std::string>& items() const { return kv_; }
    std::string serialize() const;
    std::uint64_t hash() const { return fnv1a(serialize()); }

private:
    std::map<std::string, std::string> kv_;
};

/// One CSV table, written atomically on save().
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> columns) : columns_(std::move(columns)) {}
    void add_row(const std::vector<double>& row);
    void save(const std::filesystem::path& path) const;

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<double>> rows_;
};

/// meta.json for a run directory: full config, seeds, build id, thread count.
void write_meta(const std::filesystem::path& dir, const Config& cfg,
                const std::vector<std::uint64_t>& seeds, int threads,
                const std::map<std::string, std::string>& extra = {});

std::string build_describe();

}  // namespace mixlab
