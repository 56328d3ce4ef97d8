#include "cli/json_config.hpp"

#include <algorithm>

#include "json.hpp"

namespace twinbeam::cli {

namespace {

using nlohmann::json;

std::string option_name(std::string key) {
    std::replace(key.begin(), key.end(), '_', '-');
    return key;
}

std::string scalar_text(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
}

void append(std::vector<CLI::ConfigItem>& items, std::vector<std::string> parents, const std::string& key,
            const json& value) {
    CLI::ConfigItem item;
    item.parents = std::move(parents);
    item.name = option_name(key);
    if (value.is_array()) {
        for (const auto& v : value) {
            if (v.is_structured()) {
                throw CLI::ConversionError("config key '" + key + "' holds a nested array or object");
            }
            item.inputs.push_back(scalar_text(v));
        }
    } else {
        item.inputs.push_back(scalar_text(value));
    }
    items.push_back(std::move(item));
}

}  // namespace

std::string JsonConfig::to_config(const CLI::App* app, bool default_also, bool, std::string) const {
    json out = json::object();
    auto dump_app = [&](const CLI::App* a, json& target) {
        for (const CLI::Option* opt : a->get_options()) {
            if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
            const auto& name = opt->get_lnames().front();
            if (opt->count() > 0) {
                const auto& res = opt->results();
                target[name] = res.size() == 1 ? json(res.front()) : json(res);
            } else if (default_also && !opt->get_default_str().empty()) {
                target[name] = opt->get_default_str();
            }
        }
    };
    dump_app(app, out);
    for (const CLI::App* sub : app->get_subcommands({})) {
        json section = json::object();
        dump_app(sub, section);
        if (!section.empty()) out[sub->get_name()] = section;
    }
    return out.dump(2) + "\n";
}

std::vector<CLI::ConfigItem> JsonConfig::from_config(std::istream& input) const {
    json doc;
    try {
        doc = json::parse(input);
    } catch (const json::parse_error& e) {
        throw CLI::ConversionError(std::string("config file is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw CLI::ConversionError("config file must hold a JSON object");
    }
    std::vector<CLI::ConfigItem> items;
    for (const auto& [key, value] : doc.items()) {
        if (value.is_object()) {
            for (const auto& [sub_key, sub_value] : value.items()) {
                if (sub_value.is_object()) {
                    throw CLI::ConversionError("config section '" + key + "' nests another object at '" + sub_key + "'");
                }
                append(items, {key}, sub_key, sub_value);
            }
        } else {
            append(items, {}, key, value);
        }
    }
    return items;
}

}  // namespace twinbeam::cli
