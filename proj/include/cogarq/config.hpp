#pragma once

#include <string>
#include <vector>

#include "cogarq/errors.hpp"
#include "cogarq/hmm.hpp"
#include "cogarq/io.hpp"
#include "cogarq/sim.hpp"

namespace cogarq {

/// Invalid experiment configuration; `path` is the dotted location of the offending field.
class ConfigError : public Error {
public:
    ConfigError(std::string path, const std::string& message)
        : Error(path.empty() ? message : path + ": " + message), path_(std::move(path))
    {
    }
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

/// Every recognized key with its default value. Keys whose default is null accept any value.
Json default_config();

/// Overlays `user` on `base`; keys absent from `base` raise ConfigError.
Json merge_config(const Json& base, const Json& user, const std::string& path = "");

/// Applies "a.b.c=value"; value is parsed as JSON, falling back to a plain string.
void apply_set(Json& config, const std::string& assignment);

/// Defaults, then `user`, then each --set assignment; validates the result.
Json resolve_config(const Json& user, const std::vector<std::string>& sets = {});

/// Checks types and ranges of every field used by the commands.
void validate_config(const Json& config);

ChannelModel model_from_config(const Json& model, const std::string& path = "model");

/// One model from `model`, or two from `models` when that is set.
std::vector<ChannelModel> models_from_config(const Json& config);

SolverParams solver_from_config(const Json& config);
SimConfig sim_from_config(const Json& config);
EmOptions em_from_config(const Json& config);
std::vector<double> w_grid_from_config(const Json& config);

} // namespace cogarq
