#pragma once

#include "CLI11.hpp"

namespace twinbeam::cli {

// Reads a JSON run configuration into CLI11 option values. Top-level objects
// are sections named after subcommands; their keys are long option names
// (underscores or dashes). Options given on the command line take precedence.
//
//   {"simulate": {"gamma-hz": 17.5e6, "n-bins": 400},
//    "fit-power": {"window": 13, "bootstrap": true}}
class JsonConfig : public CLI::Config {
public:
    std::string to_config(const CLI::App* app, bool default_also, bool write_description,
                          std::string prefix) const override;
    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override;
};

}  // namespace twinbeam::cli
