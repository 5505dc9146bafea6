#include "dpsim/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>

namespace dpsim {

namespace {

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(std::string_view key, std::string_view text)
{
    T v{};
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end)
        throw ValidationError("bad value for " + std::string(key) + ": '" + std::string(text) + "'");
    return v;
}

bool parse_bool(std::string_view key, std::string_view text)
{
    if (text == "1" || text == "true" || text == "yes" || text == "on")
        return true;
    if (text == "0" || text == "false" || text == "no" || text == "off")
        return false;
    throw ValidationError("bad boolean for " + std::string(key) + ": '" + std::string(text) + "'");
}

using Setter = std::function<void(sim::SimConfig&, std::string_view key, std::string_view)>;

template <typename T, typename Field>
Setter number(Field field)
{
    return [field](sim::SimConfig& c, std::string_view k, std::string_view v) { field(c) = parse_number<T>(k, v); };
}

template <typename Field>
Setter flag(Field field)
{
    return [field](sim::SimConfig& c, std::string_view k, std::string_view v) { field(c) = parse_bool(k, v); };
}

const std::map<std::string, Setter, std::less<>>& setters()
{
    using C = sim::SimConfig;
    static const std::map<std::string, Setter, std::less<>> table = {
        {"num_nodes", number<int>([](C& c) -> auto& { return c.num_nodes; })},
        {"payload_kb", number<double>([](C& c) -> auto& { return c.payload_kb; })},
        {"hop_ms_per_kb", number<double>([](C& c) -> auto& { return c.costs.hop_ms_per_kb; })},
        {"encrypt_ms_per_kb", number<double>([](C& c) -> auto& { return c.costs.encrypt_ms_per_kb; })},
        {"decrypt_ms_per_kb", number<double>([](C& c) -> auto& { return c.costs.decrypt_ms_per_kb; })},
        {"drop_ratio", number<double>([](C& c) -> auto& { return c.drop_ratio; })},
        {"performance_failures", flag([](C& c) -> auto& { return c.performance_failures; })},
        {"base_traffic", number<double>([](C& c) -> auto& { return c.base_traffic; })},
        {"traffic_rate", number<double>([](C& c) -> auto& { return c.traffic_rate; })},
        {"traffic_spread", number<double>([](C& c) -> auto& { return c.traffic_spread; })},
        {"forward_probability", number<double>([](C& c) -> auto& { return c.crowds.forward_probability; })},
        {"max_hops", number<int>([](C& c) -> auto& { return c.crowds.max_hops; })},
        {"crowds_crypto", flag([](C& c) -> auto& { return c.crowds.charge_crypto; })},
        {"path_length", number<int>([](C& c) -> auto& { return c.dualpath.path_length; })},
        {"change_probability", number<double>([](C& c) -> auto& { return c.dualpath.change_probability; })},
        {"disjoint_paths", flag([](C& c) -> auto& { return c.dualpath.disjoint_paths; })},
        {"max_recoveries", number<int>([](C& c) -> auto& { return c.dualpath.max_recoveries; })},
        {"timeout_factor", number<double>([](C& c) -> auto& { return c.timeout_factor; })},
        {"reps", number<int>([](C& c) -> auto& { return c.reps; })},
        {"ticks", number<int>([](C& c) -> auto& { return c.ticks; })},
        {"seed", number<std::uint64_t>([](C& c) -> auto& { return c.seed; })},
        {"threads", number<int>([](C& c) -> auto& { return c.threads; })},
        {"verify_codec", flag([](C& c) -> auto& { return c.verify_codec; })},
        // the decision ratio drives both protocols
        {"decision_ratio",
         [](C& c, std::string_view k, std::string_view v) {
             c.crowds.forward_probability = c.dualpath.change_probability = parse_number<double>(k, v);
         }},
        {"selection_mode",
         [](C& c, std::string_view k, std::string_view v) {
             if (v == "traffic_aware")
                 c.dualpath.selection = dualpath::SelectionMode::traffic_aware;
             else if (v == "uniform_random")
                 c.dualpath.selection = dualpath::SelectionMode::uniform_random;
             else
                 throw ValidationError(std::string(k) + " must be traffic_aware or uniform_random");
         }},
        {"failure_wait",
         [](C& c, std::string_view k, std::string_view v) {
             if (v == "round_trip")
                 c.dualpath.failure_wait = dualpath::FailureWait::round_trip;
             else if (v == "partial")
                 c.dualpath.failure_wait = dualpath::FailureWait::partial;
             else
                 throw ValidationError(std::string(k) + " must be round_trip or partial");
         }},
    };
    return table;
}

} // namespace

void apply_setting(sim::SimConfig& cfg, std::string_view key, std::string_view value)
{
    const auto& table = setters();
    const auto it = table.find(key);
    if (it == table.end())
        throw ValidationError("unknown setting '" + std::string(key) + "'");
    it->second(cfg, key, trim(value));
}

void apply_assignment(sim::SimConfig& cfg, std::string_view assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos)
        throw ValidationError("expected key=value, got '" + std::string(assignment) + "'");
    apply_setting(cfg, trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

void load_config_file(sim::SimConfig& cfg, const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read config file " + path.string());
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        if (trim(line).empty())
            continue;
        try {
            apply_assignment(cfg, line);
        } catch (const ValidationError& e) {
            throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
}

std::vector<std::string> setting_keys()
{
    std::vector<std::string> keys;
    for (const auto& [k, _] : setters())
        keys.push_back(k);
    return keys;
}

} // namespace dpsim
