#include "mixlab/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace mixlab {

namespace {

static_assert(std::endian::native == std::endian::little,
              "MXC1 writer assumes a little-endian host");

void write_u32(std::ostream& os, std::uint32_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t read_u32(std::istream& is) {
    std::uint32_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}

void write_snapshot(const std::filesystem::path& path, std::uint32_t d, std::uint32_t n,
                    const std::vector<double>& values) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw MixlabError("cannot open " + path.string() + " for writing");
    os.write("MXC1", 4);
    write_u32(os, d);
    write_u32(os, n);
    os.write(reinterpret_cast<const char*>(values.data()),
             static_cast<std::streamsize>(values.size() * sizeof(double)));
    if (!os) throw MixlabError("short write to " + path.string());
}

std::vector<double> read_snapshot(const std::filesystem::path& path, std::uint32_t expect_d,
                                  std::uint32_t& n_out) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw MixlabError("cannot open " + path.string());
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "MXC1", 4) != 0) {
        throw MixlabError(path.string() + " is not an MXC1 snapshot");
    }
    const std::uint32_t d = read_u32(is);
    const std::uint32_t n = read_u32(is);
    if (d != expect_d) {
        throw MixlabError("snapshot dimension " + std::to_string(d) + ", expected " +
                          std::to_string(expect_d));
    }
    std::size_t count = 1;
    for (std::uint32_t i = 0; i < d; ++i) count *= n;
    std::vector<double> values(count);
    is.read(reinterpret_cast<char*>(values.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
    if (!is) throw MixlabError("short read from " + path.string());
    n_out = n;
    return values;
}

}  // namespace

void write_mxc1(const std::filesystem::path& path, const Field2D& f) {
    write_snapshot(path, 2, static_cast<std::uint32_t>(f.n), f.v);
}

void write_mxc1(const std::filesystem::path& path, const Field6D& f) {
    write_snapshot(path, 6, static_cast<std::uint32_t>(f.n), f.v);
}

Field2D read_mxc1_2d(const std::filesystem::path& path) {
    std::uint32_t n = 0;
    auto values = read_snapshot(path, 2, n);
    Field2D f(static_cast<int>(n));
    f.v = std::move(values);
    return f;
}

Field6D read_mxc1_6d(const std::filesystem::path& path) {
    std::uint32_t n = 0;
    auto values = read_snapshot(path, 6, n);
    Field6D f(static_cast<int>(n));
    f.v = std::move(values);
    return f;
}

Config Config::from_file(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw MixlabError("cannot open config " + path.string());
    std::stringstream ss;
    ss << is.rdbuf();
    return from_string(ss.str());
}

Config Config::from_string(const std::string& text) {
    Config cfg;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        const auto hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line.erase(hash_pos);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!key.empty()) cfg.kv_[key] = value;
    }
    return cfg;
}

std::string Config::get(const std::string& key, const std::string& fallback) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
}

double Config::get(const std::string& key, double fallback) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : std::stod(it->second);
}

int Config::get(const std::string& key, int fallback) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : std::stoi(it->second);
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : std::stoull(it->second);
}

std::string Config::serialize() const {
    std::ostringstream os;
    for (const auto& [k, v] : kv_) os << k << "=" << v << "\n";
    return os.str();
}

void CsvWriter::add_row(const std::vector<double>& row) {
    if (row.size() != columns_.size()) throw MixlabError("CSV row width mismatch");
    rows_.push_back(row);
}

void CsvWriter::save(const std::filesystem::path& path) const {
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp);
        if (!os) throw MixlabError("cannot open " + tmp);
        os.precision(17);
        for (std::size_t i = 0; i < columns_.size(); ++i) {
            os << (i ? "," : "") << columns_[i];
        }
        os << "\n";
        for (const auto& row : rows_) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                os << (i ? "," : "") << row[i];
            }
            os << "\n";
        }
    }
    std::filesystem::rename(tmp, path);
}

std::string build_describe() {
#ifdef MIXLAB_GIT_DESCRIBE
    return MIXLAB_GIT_DESCRIBE;
#else
    return "unknown";
#endif
}

void write_meta(const std::filesystem::path& dir, const Config& cfg,
                const std::vector<std::uint64_t>& seeds, int threads,
                const std::map<std::string, std::string>& extra) {
    nlohmann::json j;
    j["config"] = cfg.items();
    j["config_hash"] = cfg.hash();
    j["seeds"] = seeds;
    j["threads"] = threads;
    j["build"] = build_describe();
    for (const auto& [k, v] : extra) j[k] = v;
    std::ofstream os(dir / "meta.json");
    if (!os) throw MixlabError("cannot write meta.json in " + dir.string());
    os << j.dump(2) << "\n";
}

}  // namespace mixlab
