#ifndef DPSIM_SCENARIO_HPP
#define DPSIM_SCENARIO_HPP

#include "dpsim/engine.hpp"
#include "dpsim/fit.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dpsim::harness {

/// S* compare performance, R* reliability under node failure.
enum class ScenarioId { S1, S2, S3, S4, S5, R1, R2, R3, R4 };

inline constexpr ScenarioId kAllScenarios[] = {ScenarioId::S1, ScenarioId::S2, ScenarioId::S3,
                                               ScenarioId::S4, ScenarioId::S5, ScenarioId::R1,
                                               ScenarioId::R2, ScenarioId::R3, ScenarioId::R4};

std::string_view to_string(ScenarioId id);
std::optional<ScenarioId> parse_scenario(std::string_view name);

struct ScenarioSpec
{
    ScenarioId id;
    std::string title;
    bool grow_traffic = false;
    bool sweep_payload = false;
    bool sweep_nodes = false;
    bool failures = false;
    /// Extra fits beyond the degree-1 fit every protocol gets.
    int crowds_extra_degree = 0;
    int dualpath_extra_degree = 0;

    /// Per-tick parameter values for the given config (ticks 1..cfg.ticks).
    std::vector<sim::TickParams> schedule(const sim::SimConfig& cfg) const;
};

ScenarioSpec scenario_spec(ScenarioId id);

struct ProtocolFit
{
    sim::Protocol protocol;
    PolyFit fit;
};

struct ScenarioSeries
{
    ScenarioId id;
    std::vector<int> ticks;
    std::vector<double> crowds;
    std::vector<double> dualpath;
    std::vector<double> crowds_se;
    std::vector<double> dualpath_se;
    std::vector<double> improvement;
    std::vector<ProtocolFit> fits;

    /// First fit of the given protocol and degree, if computed.
    const PolyFit* find_fit(sim::Protocol protocol, int degree) const;
};

/// (crowds - dualpath) / 100, as the comparison metric is defined.
double improvement_ratio(double crowds_delay, double dualpath_delay);

/// Conventional relative speed-up in percent: (crowds - dualpath) / crowds * 100.
double relative_improvement_percent(double crowds_delay, double dualpath_delay);

ScenarioSeries run_scenario(const ScenarioSpec& spec, const sim::SimConfig& cfg,
                            std::ostream* ledger_out = nullptr);

/// Writes <ID>.csv per scenario and summary.csv, plus report.txt and, when
/// asked, one SVG chart per scenario. Fails before writing anything if
/// `out_dir` cannot be written.
std::vector<std::filesystem::path> export_report(std::span<const ScenarioSeries> results,
                                                 const std::filesystem::path& out_dir, bool emit_svg = false);

/// The CSV text export_report writes for one scenario.
std::string series_csv(const ScenarioSeries& series);

/// Numeric CSV with a header row, as written by export_report.
struct CsvTable
{
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;

    /// Throws ValidationError if there is no such column.
    const std::vector<double>& column(std::string_view name) const;
};

/// Throws IoError if unreadable, ValidationError if malformed.
CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv(std::string_view text);

} // namespace dpsim::harness

#endif
