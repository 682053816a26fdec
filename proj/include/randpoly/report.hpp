#pragma once

// Result persistence: the CSV row contract, atomic file writes, and the
// calibration store (a single JSON document keyed by "j,d").

#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "randpoly/linalg.hpp"

#ifndef RANDPOLY_BUILD_ID
#define RANDPOLY_BUILD_ID "unknown"
#endif

namespace randpoly {

inline std::string build_id() { return RANDPOLY_BUILD_ID; }

struct ResultRecord {
    std::string experiment_id;
    std::string body_kind;
    int d = 0;
    int j = 0;
    std::string density_kind;
    int n = 0;
    std::string route;
    int reps = 0;
    double deficit_mean = 0.0;
    double deficit_stderr = 0.0;
    std::optional<double> predicted;
    double wall_time_s = 0.0;
    std::uint64_t master_seed = 0;
    std::string git_or_build_id;

    bool operator==(const ResultRecord&) const = default;
};

inline constexpr const char* kCsvHeader =
    "experiment_id,body_kind,d,j,density_kind,n,route,reps,deficit_mean,deficit_stderr,"
    "predicted,wall_time_s,master_seed,git_or_build_id";

namespace detail {
inline std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
}  // namespace detail

inline std::string emit_csv_row(const ResultRecord& r) {
    std::ostringstream os;
    os << r.experiment_id << ',' << r.body_kind << ',' << r.d << ',' << r.j << ','
       << r.density_kind << ',' << r.n << ',' << r.route << ',' << r.reps << ','
       << detail::fmt_double(r.deficit_mean) << ',' << detail::fmt_double(r.deficit_stderr) << ','
       << (r.predicted ? detail::fmt_double(*r.predicted) : std::string()) << ','
       << detail::fmt_double(r.wall_time_s) << ',' << r.master_seed << ',' << r.git_or_build_id;
    return os.str();
}

inline std::string emit_csv(const std::vector<ResultRecord>& records) {
    std::string out = kCsvHeader;
    out += '\n';
    for (const auto& r : records) {
        out += emit_csv_row(r);
        out += '\n';
    }
    return out;
}

inline std::vector<ResultRecord> parse_csv(const std::string& text) {
    std::vector<ResultRecord> out;
    std::istringstream is(text);
    std::string line;
    bool first = true;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (first) {
            if (line != kCsvHeader) throw std::runtime_error("parse_csv: unexpected header");
            first = false;
            continue;
        }
        std::vector<std::string> f;
        std::string cur;
        for (char c : line) {
            if (c == ',') {
                f.push_back(cur);
                cur.clear();
            } else
                cur += c;
        }
        f.push_back(cur);
        if (f.size() != 14) throw std::runtime_error("parse_csv: wrong field count");
        ResultRecord r;
        r.experiment_id = f[0];
        r.body_kind = f[1];
        r.d = std::stoi(f[2]);
        r.j = std::stoi(f[3]);
        r.density_kind = f[4];
        r.n = std::stoi(f[5]);
        r.route = f[6];
        r.reps = std::stoi(f[7]);
        r.deficit_mean = std::stod(f[8]);
        r.deficit_stderr = std::stod(f[9]);
        if (!f[10].empty()) r.predicted = std::stod(f[10]);
        r.wall_time_s = std::stod(f[11]);
        r.master_seed = std::stoull(f[12]);
        r.git_or_build_id = f[13];
        out.push_back(std::move(r));
    }
    return out;
}

// write-to-temp then rename: a killed run never leaves a half-written file
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("write_file_atomic: cannot open " + tmp.string());
        os << content;
        os.flush();
        if (!os) throw std::runtime_error("write_file_atomic: write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("read_file: cannot open " + path.string());
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

// Appends rows to an existing CSV (or creates one), atomically. A partial
// run is flagged with a trailing comment marker that parse_csv skips.
inline void append_records_atomic(const std::filesystem::path& path,
                                  const std::vector<ResultRecord>& records,
                                  bool partial = false, const std::string& note = "") {
    std::string content;
    if (std::filesystem::exists(path)) {
        content = read_file(path);
        if (!content.empty() && content.back() != '\n') content += '\n';
    }
    if (content.empty()) {
        content = kCsvHeader;
        content += '\n';
    }
    for (const auto& r : records) {
        content += emit_csv_row(r);
        content += '\n';
    }
    if (partial) content += "# partial: " + (note.empty() ? std::string("run aborted") : note) + '\n';
    write_file_atomic(path, content);
}

// ---- calibration store ----

struct CalibrationEntry {
    int j = 0;
    int d = 0;
    double c = 0.0;
    double se = 0.0;
    std::vector<int> n_grid;
    int reps = 0;
    std::string timestamp;
};

class CalibrationStore {
public:
    explicit CalibrationStore(std::filesystem::path path) : path_(std::move(path)) {
        if (std::filesystem::exists(path_)) {
            const auto root = nlohmann::json::parse(read_file(path_));
            for (auto it = root.begin(); it != root.end(); ++it) {
                const auto& v = it.value();
                CalibrationEntry e;
                e.j = v.at("j").get<int>();
                e.d = v.at("d").get<int>();
                e.c = v.at("c").get<double>();
                e.se = v.at("stderr").get<double>();
                e.n_grid = v.at("n_grid").get<std::vector<int>>();
                e.reps = v.at("reps").get<int>();
                e.timestamp = v.at("timestamp").get<std::string>();
                entries_[it.key()] = e;
            }
        }
    }

    static std::string key(int j, int d) { return std::to_string(j) + "," + std::to_string(d); }

    std::optional<CalibrationEntry> lookup(int j, int d) const {
        const auto it = entries_.find(key(j, d));
        if (it == entries_.end()) return std::nullopt;
        return it->second;
    }

    void put(const CalibrationEntry& e) { entries_[key(e.j, e.d)] = e; }

    void save() const {
        nlohmann::json root = nlohmann::json::object();
        for (const auto& [k, e] : entries_) {
            root[k] = {{"j", e.j},         {"d", e.d},       {"c", e.c},
                       {"stderr", e.se},   {"n_grid", e.n_grid}, {"reps", e.reps},
                       {"timestamp", e.timestamp}};
        }
        write_file_atomic(path_, root.dump(2) + "\n");
    }

private:
    std::filesystem::path path_;
    std::map<std::string, CalibrationEntry> entries_;
};

inline std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

}  // namespace randpoly
