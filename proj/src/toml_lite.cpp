#include "chirp/toml_lite.hpp"

#include <fstream>
#include <sstream>

#include "chirp/errors.hpp"

namespace chirp {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

} // namespace

std::map<std::string, std::string> parse_toml_lite(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        // Strip comments outside of strings.
        bool in_string = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') in_string = !in_string;
            if (line[i] == '#' && !in_string) {
                line.resize(i);
                break;
            }
        }
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ValidationError("toml line " + std::to_string(line_no) +
                                      ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("toml line " + std::to_string(line_no) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ValidationError("toml line " + std::to_string(line_no) + ": empty key or value");
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
            value = value.substr(1, value.size() - 2);
        out[section.empty() ? key : section + "." + key] = value;
    }
    return out;
}

std::map<std::string, std::string> load_toml_lite(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_toml_lite(buffer.str());
}

SamplingConfig sampling_config_from_toml(const std::string& path, int* repeats_out) {
    const auto table = load_toml_lite(path);
    SamplingConfig cfg;

    auto get = [&table](const std::string& key) -> const std::string* {
        const auto it = table.find(key);
        return it == table.end() ? nullptr : &it->second;
    };

    if (const auto* scheme = get("scheme")) {
        if (*scheme == "random")
            cfg.scheme = SamplingScheme::Random;
        else if (*scheme == "reward-shaped")
            cfg.scheme = SamplingScheme::RewardShaped;
        else
            throw ValidationError("sampling config: scheme must be random or reward-shaped");
    }
    if (const auto* v = get("n_s")) cfg.n_s = std::stoi(*v);
    if (const auto* v = get("n_t")) cfg.n_t = std::stoi(*v);
    if (const auto* v = get("seed")) cfg.seed = static_cast<std::uint64_t>(std::stoull(*v));
    if (repeats_out) {
        if (const auto* v = get("repeats")) *repeats_out = std::stoi(*v);
    }

    if (cfg.scheme == SamplingScheme::RewardShaped) {
        McceConfig mcce;
        if (const auto* v = get("mcce.population")) mcce.population = std::stoi(*v);
        if (const auto* v = get("mcce.elite_fraction")) mcce.elite_fraction = std::stod(*v);
        if (const auto* v = get("mcce.iterations")) mcce.iterations = std::stoi(*v);
        cfg.mcce = mcce;
    }
    return cfg;
}

} // namespace chirp
