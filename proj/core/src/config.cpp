#include <cctype>
#include <charconv>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>

#include "detfuse/errors.hpp"
#include "detfuse/harness.hpp"

namespace detfuse {

std::string to_string(SweepKind s) {
    return s == SweepKind::snr ? "snr" : "r";
}

SweepKind sweep_from_string(const std::string& s) {
    if (s == "snr") return SweepKind::snr;
    if (s == "r") return SweepKind::r;
    throw config_error("unknown sweep kind: " + s);
}

void ExperimentSpec::validate() const {
    if (n != 5 && n != 10) throw config_error("config: n must be 5 or 10");
    if (m != 2 && m != 4) throw config_error("config: m must be 2 or 4");
    if (grid.empty()) throw config_error("config: sweep grid is empty");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw config_error("config: sweep grid not strictly increasing");
    if (trials < 1000) throw config_error("config: trials < 1000");
    const bool stats = receiver == Receiver::noncoherent_statistics;
    if (sweep == SweepKind::r) {
        for (double v : grid) {
            if (stats) {
                if (v != 1.0)
                    throw config_error(
                        "config: statistics receiver admits only r = 1");
            } else if (!(v > 0.0 && v < 1.0)) {
                throw config_error("config: r grid must lie inside (0, 1)");
            }
        }
    } else {
        if (stats) {
            if (r != 1.0)
                throw config_error("config: statistics receiver requires r = 1");
        } else if (!(r > 0.0 && r < 1.0)) {
            throw config_error("config: r must lie inside (0, 1)");
        }
    }
    if (allocation == AllocationStrategy::statistics_extreme_point && !stats)
        throw config_error(
            "config: statistics_extreme_point needs the statistics receiver");
    if (allocation == AllocationStrategy::average_j_search &&
        receiver != Receiver::coherent)
        throw config_error("config: average_j_search is coherent only");
    if (allocation == AllocationStrategy::conditional_j_gradient && stats)
        throw config_error(
            "config: conditional_j_gradient needs an estimating receiver");
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_double(const std::string& v, const std::string& key, int line) {
    try {
        std::size_t used = 0;
        double d = std::stod(v, &used);
        if (used != v.size())
            throw parse_error("config: trailing characters in value for key '" +
                                  key + "'",
                              key, line);
        return d;
    } catch (const parse_error&) {
        throw;
    } catch (const std::exception&) {
        throw parse_error("config: bad numeric value for key '" + key + "'",
                          key, line);
    }
}

long parse_long(const std::string& v, const std::string& key, int line) {
    long out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw parse_error("config: bad integer value for key '" + key + "'",
                          key, line);
    return out;
}

std::vector<double> parse_grid(const std::string& v, const std::string& key,
                               int line) {
    std::vector<double> grid;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty())
            throw parse_error("config: empty grid element", key, line);
        grid.push_back(parse_double(item, key, line));
    }
    return grid;
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

ExperimentSpec parse_config(const std::string& text) {
    ExperimentSpec spec;
    bool saw_grid = false, saw_r = false;
    std::map<std::string, int> seen;

    std::stringstream ss(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(ss, raw)) {
        ++line_no;
        std::string line = raw;
        if (auto pos = line.find('#'); pos != std::string::npos)
            line.erase(pos);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw parse_error("config: expected key=value", "", line_no);
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw parse_error("config: empty key", key, line_no);
        if (auto it = seen.find(key); it != seen.end())
            throw parse_error("config: duplicate key '" + key +
                                  "' (first on line " +
                                  std::to_string(it->second) + ")",
                              key, line_no);
        seen[key] = line_no;

        try {
            if (key == "case_id") {
                spec.case_id = case_id_from_string(value);
            } else if (key == "n") {
                spec.n = static_cast<int>(parse_long(value, key, line_no));
            } else if (key == "m") {
                spec.m = static_cast<int>(parse_long(value, key, line_no));
            } else if (key == "receiver") {
                spec.receiver = receiver_from_string(value);
            } else if (key == "allocation") {
                spec.allocation = allocation_from_string(value);
            } else if (key == "sweep") {
                spec.sweep = sweep_from_string(value);
            } else if (key == "grid") {
                spec.grid = parse_grid(value, key, line_no);
                saw_grid = true;
            } else if (key == "trials") {
                spec.trials = parse_long(value, key, line_no);
            } else if (key == "seed") {
                long s = parse_long(value, key, line_no);
                if (s < 0)
                    throw parse_error("config: seed must be >= 0", key, line_no);
                spec.seed = static_cast<std::uint64_t>(s);
            } else if (key == "snr_db") {
                spec.snr_db = parse_double(value, key, line_no);
            } else if (key == "r") {
                spec.r = parse_double(value, key, line_no);
                saw_r = true;
            } else if (key == "out") {
                spec.out = value;
            } else {
                throw parse_error("config: unknown key '" + key + "' on line " +
                                      std::to_string(line_no),
                                  key, line_no);
            }
        } catch (const parse_error&) {
            throw;
        } catch (const config_error& e) {
            throw parse_error(std::string("config: ") + e.what() + " (key '" +
                                  key + "', line " + std::to_string(line_no) +
                                  ")",
                              key, line_no);
        }
    }

    if (!saw_grid)
        throw parse_error("config: missing required key 'grid'", "grid", 0);
    if (!saw_r && spec.receiver == Receiver::noncoherent_statistics)
        spec.r = 1.0;
    spec.validate();
    return spec;
}

std::string serialize_config(const ExperimentSpec& spec) {
    std::string s;
    s += "case_id = " + to_string(spec.case_id) + "\n";
    s += "n = " + std::to_string(spec.n) + "\n";
    s += "m = " + std::to_string(spec.m) + "\n";
    s += "receiver = " + to_string(spec.receiver) + "\n";
    s += "allocation = " + to_string(spec.allocation) + "\n";
    s += "sweep = " + to_string(spec.sweep) + "\n";
    s += "grid = ";
    for (std::size_t i = 0; i < spec.grid.size(); ++i) {
        if (i) s += ", ";
        s += fmt_double(spec.grid[i]);
    }
    s += "\n";
    s += "trials = " + std::to_string(spec.trials) + "\n";
    s += "seed = " + std::to_string(spec.seed) + "\n";
    s += "snr_db = " + fmt_double(spec.snr_db) + "\n";
    s += "r = " + fmt_double(spec.r) + "\n";
    s += "out = " + spec.out + "\n";
    return s;
}

} // namespace detfuse
