#pragma once
// File formats.
//
//   distribution file: UTF-8 text with one real per line, or a JSON array
//                      of reals.
//   data file:         one 1-based category index per line.
//   run config:        JSON object, see parse_grid_config.

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "klest/harness.hpp"

namespace klest {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::vector<double> parse_reals(const std::string& text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '[') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("malformed JSON array: ") + e.what());
        }
        if (!j.is_array()) throw ConfigError("expected a JSON array of reals");
        std::vector<double> v;
        for (const auto& x : j) {
            if (!x.is_number()) throw ConfigError("JSON array must contain only numbers");
            v.push_back(x.get<double>());
        }
        return v;
    }
    std::vector<double> v;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        const auto e = line.find_last_not_of(" \t\r");
        const std::string tok = line.substr(b, e - b + 1);
        std::size_t pos = 0;
        double x = 0.0;
        try {
            x = std::stod(tok, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != tok.size()) throw ConfigError("line " + std::to_string(lineno) + ": not a real: '" + tok + "'");
        v.push_back(x);
    }
    return v;
}

inline ProbVec load_distribution(const std::filesystem::path& path) {
    try {
        return validate_prob_vec(parse_reals(read_text_file(path)));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

// One real per line with 17 significant digits so files round-trip exactly.
inline std::string format_distribution(const ProbVec& p) {
    std::string out;
    char buf[40];
    for (double x : p) {
        std::snprintf(buf, sizeof buf, "%.17g\n", x);
        out += buf;
    }
    return out;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << text;
}

// 1-based category indices, one per line. K defaults to the largest index.
inline SampleSeq load_data(const std::filesystem::path& path, std::size_t K = 0) {
    std::istringstream in(read_text_file(path));
    std::vector<std::int64_t> items;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        const auto e = line.find_last_not_of(" \t\r");
        const std::string tok = line.substr(b, e - b + 1);
        std::size_t pos = 0;
        long long x = 0;
        try {
            x = std::stoll(tok, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != tok.size())
            throw ConfigError("line " + std::to_string(lineno) + ": not a category index: '" + tok + "'");
        items.push_back(x);
    }
    if (items.empty()) throw ConfigError(path.string() + ": no samples");
    if (K == 0) {
        const auto mx = *std::max_element(items.begin(), items.end());
        K = static_cast<std::size_t>(std::max<std::int64_t>(2, mx));
    }
    try {
        return SampleSeq::from_one_based(K, items);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Run configuration (simulate / sweep).
//
// {
//   "estimator" | "estimators": "otb" or ["mle", "laplace", "otb:0.05", ...],
//   "K" | "Ks":                 10 or [2, 10],
//   "n" | "ns":                 1000 or [500, 1000],
//   "delta" | "deltas":         0.1 or [0.1, 0.01],
//   "trials":                   10000,
//   "seed":                     1,
//   "pstar" | "pstars":         "uniform" | "heavy" | "half" | "attack" | "file:PATH"
// }
//
// Bare "adaptive" / "otb" take each cell's delta. Relative file paths are
// resolved against the config file's directory. K may be omitted when the
// file targets agree on it.

namespace detail {

template <class T>
std::vector<T> one_or_many(const nlohmann::json& obj, const char* single, const char* plural, bool required) {
    const bool has_single = obj.contains(single);
    const bool has_plural = obj.contains(plural);
    if (has_single && has_plural)
        throw ConfigError(std::string("config sets both '") + single + "' and '" + plural + "'");
    if (!has_single && !has_plural) {
        if (required) throw ConfigError(std::string("config is missing '") + single + "'");
        return {};
    }
    const auto& v = obj.at(has_single ? single : plural);
    try {
        if (v.is_array()) return v.get<std::vector<T>>();
        return {v.get<T>()};
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad value for '") + (has_single ? single : plural) + "': " + e.what());
    }
}

}  // namespace detail

inline SweepGrid parse_grid_config(const std::string& text, const std::filesystem::path& base_dir = ".") {
    nlohmann::json obj;
    try {
        obj = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!obj.is_object()) throw ConfigError("config must be a JSON object");
    static const std::set<std::string> known = {"estimator", "estimators", "K", "Ks", "n", "ns", "delta",
                                                "deltas", "trials", "seed", "pstar", "pstars"};
    for (const auto& item : obj.items())
        if (!known.count(item.key())) throw ConfigError("unknown config key '" + item.key() + "'");

    SweepGrid g;
    g.estimators = detail::one_or_many<std::string>(obj, "estimator", "estimators", true);
    g.ns = detail::one_or_many<std::size_t>(obj, "n", "ns", true);
    g.deltas = detail::one_or_many<double>(obj, "delta", "deltas", true);
    g.Ks = detail::one_or_many<std::size_t>(obj, "K", "Ks", false);
    try {
        g.trials = obj.value("trials", std::size_t{1000});
        g.seed = obj.value("seed", std::uint64_t{0});
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad trials/seed: ") + e.what());
    }
    if (g.trials < 1) throw ConfigError("trials must be >= 1");

    auto pstar_names = detail::one_or_many<std::string>(obj, "pstar", "pstars", false);
    if (pstar_names.empty()) pstar_names = {"uniform"};
    g.pstars.clear();
    std::set<std::size_t> file_Ks;
    for (const auto& name : pstar_names) {
        if (name.rfind("file:", 0) == 0) {
            std::filesystem::path path = name.substr(5);
            if (path.is_relative()) path = base_dir / path;
            auto p = load_distribution(path);
            file_Ks.insert(p.size());
            g.pstars.push_back(PStarSpec::from_file(name, std::move(p)));
        } else {
            try {
                g.pstars.push_back(PStarSpec::named(name));
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
        }
    }
    if (g.Ks.empty()) {
        if (file_Ks.size() != 1) throw ConfigError("config is missing 'K'");
        g.Ks = {*file_Ks.begin()};
    }
    for (const auto& e : g.estimators) {
        try {
            (void)resolve_estimator(e, 0.5);
        } catch (const std::invalid_argument& ex) {
            throw ConfigError(ex.what());
        }
    }
    return g;
}

inline SweepGrid load_grid_config(const std::filesystem::path& path) {
    return parse_grid_config(read_text_file(path), path.parent_path().empty() ? "." : path.parent_path());
}

// Expands the grid, mapping invalid cells to ConfigError.
inline std::vector<SweepCell> expand_grid_checked(const SweepGrid& g) {
    try {
        return expand_grid(g);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid cell: ") + e.what());
    }
}

}  // namespace klest
