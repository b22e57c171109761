#pragma once

#include "slung/sim.hpp"

#include "json.hpp"
#include <stdexcept>
#include <string>

namespace slung::cli {

/// Invalid or unreadable configuration; the message names the field.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    Scenario scenario = Scenario::nominal();
    int runs = 100;
    /// Monte-Carlo worker threads, 0 = hardware concurrency.
    unsigned threads = 0;
    std::string out_dir = "out";
};

bool operator==(const RunConfig& a, const RunConfig& b);

/// Nominal parameters.
RunConfig default_config();

/// Missing keys take Nominal parameters; unknown keys and bad values throw ConfigError.
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& c);

RunConfig load_config(const std::string& path);

/// Throws ConfigError with the field path on the first invalid value.
void validate(const RunConfig& c);

} // namespace slung::cli
