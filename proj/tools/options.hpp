#pragma once

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cflb/error.hpp"

namespace cflb::cli {

using json = nlohmann::json;

// Flat option set shared by the command line and JSON config files. Keys are the
// long flag names without dashes. Loading a config overwrites every listed key;
// flags given on the command line are then re-applied so they win.
class OptionSet {
public:
    template <typename T>
    CLI::Option* add(CLI::App* app, const std::string& key, T& ref, const std::string& help) {
        CLI::Option* opt = app->add_option("--" + key, ref, help);
        if constexpr (std::is_same_v<T, std::vector<int>> || std::is_same_v<T, std::vector<double>>) {
            opt->delimiter(',');
        }
        remember(key, ref, opt);
        return opt;
    }

    CLI::Option* flag(CLI::App* app, const std::string& key, bool& ref, const std::string& help) {
        CLI::Option* opt = app->add_flag("--" + key, ref, help);
        remember(key, ref, opt);
        return opt;
    }

    [[nodiscard]] bool has(const std::string& key) const {
        return std::any_of(fields_.begin(), fields_.end(), [&](const Field& f) { return f.key == key; });
    }

    /// Sets one key from a config value; the caller checks has(key) first.
    void set(const std::string& key, const json& value) {
        auto it = std::find_if(fields_.begin(), fields_.end(), [&](const Field& f) { return f.key == key; });
        try {
            it->load(value);
        } catch (const json::exception& e) {
            throw InvalidArgument("config: bad value for '" + key + "': " + e.what());
        }
    }

    /// Re-applies flags that appeared on the command line.
    void reapply_given() {
        for (const auto& f : fields_) {
            if (f.option->count() > 0) f.reapply();
        }
    }

    [[nodiscard]] json dump() const {
        json out = json::object();
        for (const auto& f : fields_) out[f.key] = f.dump();
        return out;
    }

private:
    struct Field {
        std::string key;
        CLI::Option* option;
        std::function<void(const json&)> load;
        std::function<json()> dump;
        std::function<void()> reapply;
    };

    template <typename T>
    void remember(const std::string& key, T& ref, CLI::Option* opt) {
        fields_.push_back({key, opt, [&ref](const json& v) { ref = v.get<T>(); }, [&ref] { return json(ref); },
                           [&ref, opt] { opt->results(ref); }});
    }

    std::vector<Field> fields_;
};

}  // namespace cflb::cli
