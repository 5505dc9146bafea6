#include "dpsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace dpsim::harness {

namespace fs = std::filesystem;

std::string_view to_string(ScenarioId id)
{
    static constexpr std::string_view names[] = {"S1", "S2", "S3", "S4", "S5", "R1", "R2", "R3", "R4"};
    return names[static_cast<int>(id)];
}

std::optional<ScenarioId> parse_scenario(std::string_view name)
{
    for (auto id : kAllScenarios)
        if (to_string(id) == name)
            return id;
    return std::nullopt;
}

ScenarioSpec scenario_spec(ScenarioId id)
{
    ScenarioSpec s{id, {}};
    switch (id) {
    case ScenarioId::S1: s.title = "static parameters"; break;
    case ScenarioId::S2:
        s.title = "increasing network traffic";
        s.grow_traffic = true;
        s.crowds_extra_degree = 2;
        break;
    case ScenarioId::S3:
        s.title = "increasing size of sending data";
        s.sweep_payload = true;
        s.crowds_extra_degree = s.dualpath_extra_degree = 2;
        break;
    case ScenarioId::S4:
        s.title = "increasing data size and network traffic";
        s.sweep_payload = s.grow_traffic = true;
        break;
    case ScenarioId::S5:
        s.title = "increasing number of nodes";
        s.sweep_nodes = true;
        break;
    case ScenarioId::R1:
        s.title = "node failure";
        s.failures = true;
        break;
    case ScenarioId::R2:
        s.title = "node failure and increasing network traffic";
        s.failures = s.grow_traffic = true;
        break;
    case ScenarioId::R3:
        s.title = "node failure and increasing data size";
        s.failures = s.sweep_payload = true;
        break;
    case ScenarioId::R4:
        s.title = "node failure, increasing data size and network traffic";
        s.failures = s.sweep_payload = s.grow_traffic = true;
        break;
    }
    return s;
}

std::vector<sim::TickParams> ScenarioSpec::schedule(const sim::SimConfig& cfg) const
{
    const int last = cfg.ticks;
    std::vector<sim::TickParams> out;
    out.reserve(static_cast<std::size_t>(last));
    for (int t = 1; t <= last; ++t) {
        sim::TickParams tp;
        tp.tick = t;
        // position along the sweep, 0 at the first tick and 1 at the last
        const double steps = last > 1 ? static_cast<double>(last - 1) : 1.0;
        tp.payload_kb = sweep_payload ? 1.0 + (t - 1) * 99.0 / steps : cfg.payload_kb;
        tp.traffic_mean = cfg.base_traffic + (grow_traffic ? cfg.traffic_rate * t : 0.0);
        tp.num_nodes = sweep_nodes ? 10 + static_cast<int>(std::ceil((t - 1) * 990.0 / steps)) : cfg.num_nodes;
        tp.drop_ratio = failures || cfg.performance_failures ? cfg.drop_ratio : 0.0;
        out.push_back(tp);
    }
    return out;
}

const PolyFit* ScenarioSeries::find_fit(sim::Protocol protocol, int degree) const
{
    for (const auto& f : fits)
        if (f.protocol == protocol && f.fit.degree == degree)
            return &f.fit;
    return nullptr;
}

double improvement_ratio(double crowds_delay, double dualpath_delay) { return (crowds_delay - dualpath_delay) / 100.0; }

double relative_improvement_percent(double crowds_delay, double dualpath_delay)
{
    return crowds_delay > 0.0 ? (crowds_delay - dualpath_delay) / crowds_delay * 100.0 : 0.0;
}

ScenarioSeries run_scenario(const ScenarioSpec& spec, const sim::SimConfig& cfg, std::ostream* ledger_out)
{
    const auto schedule = spec.schedule(cfg);
    const auto paired = sim::run_paired(schedule, cfg, static_cast<std::uint64_t>(spec.id) + 1, ledger_out);

    ScenarioSeries s{spec.id, {}, {}, {}, {}, {}, {}, {}};
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        s.ticks.push_back(schedule[i].tick);
        s.crowds.push_back(paired.crowds[i].mean_ms);
        s.dualpath.push_back(paired.dualpath[i].mean_ms);
        s.crowds_se.push_back(paired.crowds[i].std_error_ms);
        s.dualpath_se.push_back(paired.dualpath[i].std_error_ms);
        s.improvement.push_back(improvement_ratio(s.crowds.back(), s.dualpath.back()));
    }

    std::vector<double> x(s.ticks.begin(), s.ticks.end());
    auto add_fit = [&](sim::Protocol p, int degree) {
        if (degree < 1 || x.size() <= static_cast<std::size_t>(degree) || s.find_fit(p, degree))
            return;
        const auto& y = p == sim::Protocol::crowds ? s.crowds : s.dualpath;
        s.fits.push_back({p, fit_polynomial(x, y, degree)});
    };
    add_fit(sim::Protocol::crowds, 1);
    add_fit(sim::Protocol::dualpath, 1);
    add_fit(sim::Protocol::crowds, spec.crowds_extra_degree);
    add_fit(sim::Protocol::dualpath, spec.dualpath_extra_degree);
    return s;
}

namespace {

std::string fmt(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9f", v);
    return buf;
}

std::string svg_chart(const ScenarioSeries& s)
{
    constexpr double w = 640, h = 400, pad = 50;
    double ymax = 0.0;
    for (std::size_t i = 0; i < s.ticks.size(); ++i)
        ymax = std::max({ymax, s.crowds[i], s.dualpath[i]});
    if (ymax <= 0.0)
        ymax = 1.0;
    const double tmin = s.ticks.front(), tmax = std::max<double>(s.ticks.back(), tmin + 1);
    auto line = [&](const std::vector<double>& ys, const char* colour) {
        std::string pts;
        char buf[64];
        for (std::size_t i = 0; i < ys.size(); ++i) {
            const double px = pad + (s.ticks[i] - tmin) / (tmax - tmin) * (w - 2 * pad);
            const double py = h - pad - ys[i] / ymax * (h - 2 * pad);
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px, py);
            pts += buf;
        }
        return "<polyline fill=\"none\" stroke=\"" + std::string(colour) + "\" stroke-width=\"2\" points=\"" + pts +
               "\"/>\n";
    };
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<text x=\"" << pad << "\" y=\"25\" font-family=\"sans-serif\" font-size=\"14\">" << to_string(s.id) << ": "
       << scenario_spec(s.id).title << " (delay ms vs tick)</text>\n"
       << "<line x1=\"" << pad << "\" y1=\"" << h - pad << "\" x2=\"" << w - pad << "\" y2=\"" << h - pad
       << "\" stroke=\"black\"/>\n"
       << "<line x1=\"" << pad << "\" y1=\"" << pad << "\" x2=\"" << pad << "\" y2=\"" << h - pad
       << "\" stroke=\"black\"/>\n"
       << "<text x=\"5\" y=\"" << pad << "\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(ymax).substr(0, 8)
       << "</text>\n"
       << line(s.crowds, "#c0392b") << line(s.dualpath, "#2471a3")
       << "<text x=\"" << w - 170 << "\" y=\"" << pad + 10
       << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#c0392b\">Crowds</text>\n"
       << "<text x=\"" << w - 170 << "\" y=\"" << pad + 26
       << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#2471a3\">Dual-Path</text>\n"
       << "</svg>\n";
    return os.str();
}

std::string report_text(std::span<const ScenarioSeries> results)
{
    std::ostringstream os;
    char buf[256];
    for (const auto& s : results) {
        const auto n = static_cast<double>(s.ticks.size());
        const double mc = std::accumulate(s.crowds.begin(), s.crowds.end(), 0.0) / n;
        const double md = std::accumulate(s.dualpath.begin(), s.dualpath.end(), 0.0) / n;
        double pct = 0.0;
        for (std::size_t i = 0; i < s.ticks.size(); ++i)
            pct += relative_improvement_percent(s.crowds[i], s.dualpath[i]);
        std::snprintf(buf, sizeof buf,
                      "%s  %s\n  mean delay: crowds %.3f ms, dualpath %.3f ms\n"
                      "  mean improvement ratio (crowds-dualpath)/100: %.4f\n"
                      "  mean relative speed-up (crowds-dualpath)/crowds*100, not the ratio above: %.2f%%\n",
                      to_string(s.id).data(), scenario_spec(s.id).title.c_str(), mc, md,
                      std::accumulate(s.improvement.begin(), s.improvement.end(), 0.0) / n, pct / n);
        os << buf;
        for (const auto& f : s.fits) {
            std::snprintf(buf, sizeof buf, "  fit %-8s degree %d: %s  (R^2 %.4f)\n", sim::to_string(f.protocol).data(),
                          f.fit.degree, f.fit.describe(6).c_str(), f.fit.r2);
            os << buf;
        }
    }
    return os.str();
}

void write_file(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    out << text;
    if (!out.flush())
        throw IoError("write to " + path.string() + " failed");
}

} // namespace

std::string series_csv(const ScenarioSeries& s)
{
    std::string out = "tick,crowds_ms,dualpath_ms,improvement\n";
    for (std::size_t i = 0; i < s.ticks.size(); ++i)
        out += std::to_string(s.ticks[i]) + "," + fmt(s.crowds[i]) + "," + fmt(s.dualpath[i]) + "," +
               fmt(s.improvement[i]) + "\n";
    return out;
}

const std::vector<double>& CsvTable::column(std::string_view name) const
{
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name)
            return columns[i];
    throw ValidationError("no column '" + std::string(name) + "'");
}

CsvTable parse_csv(std::string_view text)
{
    CsvTable t;
    auto split = [](std::string_view line) {
        std::vector<std::string> cells;
        std::size_t start = 0;
        for (;;) {
            const auto comma = line.find(',', start);
            cells.emplace_back(line.substr(start, comma - start));
            if (comma == std::string_view::npos)
                break;
            start = comma + 1;
        }
        for (auto& c : cells)
            if (!c.empty() && c.back() == '\r')
                c.pop_back();
        return cells;
    };

    std::size_t pos = 0;
    int lineno = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos)
            nl = text.size();
        const auto line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++lineno;
        if (line.empty() || line == "\r")
            continue;
        auto cells = split(line);
        if (t.header.empty()) {
            t.header = std::move(cells);
            t.columns.resize(t.header.size());
            continue;
        }
        if (cells.size() != t.header.size())
            throw ValidationError("line " + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) +
                                  " fields, got " + std::to_string(cells.size()));
        for (std::size_t i = 0; i < cells.size(); ++i) {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(cells[i], &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == 0 || used != cells[i].size())
                throw ValidationError("line " + std::to_string(lineno) + ": '" + cells[i] + "' is not a number");
            t.columns[i].push_back(v);
        }
    }
    if (t.header.empty())
        throw ValidationError("empty CSV");
    return t;
}

CsvTable read_csv(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str());
}

std::vector<fs::path> export_report(std::span<const ScenarioSeries> results, const fs::path& out_dir, bool emit_svg)
{
    if (results.empty())
        throw ValidationError("no completed scenario to export");

    // probe writability up front so a failure leaves no partial report
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir))
        throw IoError("cannot create output directory " + out_dir.string());
    {
        const auto probe = out_dir / ".dpsim-write-probe";
        std::ofstream p(probe);
        const bool ok = static_cast<bool>(p << "");
        p.close();
        fs::remove(probe, ec);
        if (!ok || !fs::exists(out_dir))
            throw IoError("output directory " + out_dir.string() + " is not writable");
    }

    std::vector<fs::path> written;
    std::string summary = "scenario,mean_improvement,min,max\n";
    for (const auto& s : results) {
        const auto path = out_dir / (std::string(to_string(s.id)) + ".csv");
        write_file(path, series_csv(s));
        written.push_back(path);

        const auto [lo, hi] = std::minmax_element(s.improvement.begin(), s.improvement.end());
        const double mean =
            std::accumulate(s.improvement.begin(), s.improvement.end(), 0.0) / static_cast<double>(s.improvement.size());
        summary += std::string(to_string(s.id)) + "," + fmt(mean) + "," + fmt(*lo) + "," + fmt(*hi) + "\n";

        if (emit_svg) {
            const auto svg = out_dir / (std::string(to_string(s.id)) + ".svg");
            write_file(svg, svg_chart(s));
            written.push_back(svg);
        }
    }
    write_file(out_dir / "summary.csv", summary);
    written.push_back(out_dir / "summary.csv");
    write_file(out_dir / "report.txt", report_text(results));
    written.push_back(out_dir / "report.txt");
    return written;
}

} // namespace dpsim::harness
