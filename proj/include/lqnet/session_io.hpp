#pragma once

// Session persistence. Each record is a pair of files in one directory:
//
//   session_0007.csv   one row per agent and period
//   session_0007.json  format version, params, seed, treatment, shape
//
// Numbers use the shortest text that reads back to the same double, so a
// written record reads back bit for bit.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "lqnet/dynamics.hpp"
#include "lqnet/format.hpp"
#include "lqnet/json_io.hpp"

namespace lqnet {

inline constexpr int kSessionFormatVersion = 1;

inline constexpr std::string_view kSessionCsvHeader =
    "session_id,period,agent,effort,initiated_ids,neighbor_ids,degree,payoff_total,own_benefit,effort_cost,"
    "spillover,link_cost";

inline std::string session_stem(int session_id) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "session_%04d", session_id);
    return buf;
}

/// Colon-separated 1-based ids; empty for no agents.
inline std::string format_ids(AgentMask m) {
    std::string s;
    for_each_agent(m, [&](int j) {
        if (!s.empty()) s += ':';
        s += std::to_string(j + 1);
    });
    return s;
}

inline bool parse_ids(std::string_view s, int n, AgentMask& out) {
    out = 0;
    if (s.empty()) return true;
    std::size_t start = 0;
    while (start <= s.size()) {
        const std::size_t end = std::min(s.find(':', start), s.size());
        int id = 0;
        if (!parse_int(s.substr(start, end - start), id) || id < 1 || id > n) return false;
        out |= bit(id - 1);
        start = end + 1;
    }
    return true;
}

inline void write_session_csv(const SessionRecord& r, std::ostream& os) {
    os << kSessionCsvHeader << '\n';
    for (int t = 1; t <= r.period_count(); ++t) {
        const auto& p = r.periods[static_cast<std::size_t>(t - 1)];
        for (int i = 0; i < r.params.n; ++i) {
            const auto ui = static_cast<std::size_t>(i);
            const auto& pay = p.payoffs[ui];
            os << r.session_id << ',' << t << ',' << i + 1 << ',' << format_double(p.efforts[ui]) << ','
               << format_ids(p.intents.row(i)) << ',' << format_ids(p.network.neighbors(i)) << ','
               << p.network.degree(i) << ',' << format_double(pay.total) << ',' << format_double(pay.own_benefit)
               << ',' << format_double(pay.effort_cost) << ',' << format_double(pay.spillover) << ','
               << format_double(pay.link_cost) << '\n';
        }
    }
}

inline Json session_sidecar(const SessionRecord& r) {
    return Json{{"format_version", kSessionFormatVersion},
                {"session_id", r.session_id},
                {"seed", r.seed},
                {"treatment", r.treatment},
                {"periods", r.period_count()},
                {"params", to_json(r.params)}};
}

/// Writes <dir>/session_XXXX.{csv,json}; returns the CSV path.
inline std::filesystem::path write_record(const SessionRecord& r, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const auto stem = dir / session_stem(r.session_id);
    const auto csv = std::filesystem::path(stem.string() + ".csv");
    {
        std::ofstream os(csv);
        if (!os) throw Error(csv.string() + ": cannot write");
        write_session_csv(r, os);
    }
    std::ofstream js(stem.string() + ".json");
    if (!js) throw Error(stem.string() + ".json: cannot write");
    js << session_sidecar(r).dump(2) << '\n';
    return csv;
}

namespace detail {
inline std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t c = line.find(',', start);
        if (c == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, c - start));
        start = c + 1;
    }
}
}  // namespace detail

/// Reads a session from its CSV stream and parsed sidecar. `name` prefixes
/// error messages.
inline SessionRecord read_session(std::istream& csv, const Json& sidecar, const std::string& name = "session") {
    if (!sidecar.is_object() || !sidecar.contains("format_version"))
        throw ParseError(name + ": sidecar lacks format_version");
    const int version = detail::json_int(sidecar.at("format_version"), "format_version");
    if (version > kSessionFormatVersion)
        throw SchemaVersionError(name + ": format_version " + std::to_string(version) + " is newer than supported " +
                                 std::to_string(kSessionFormatVersion));
    if (version < 1) throw ParseError(name + ": bad format_version");

    SessionRecord r;
    r.session_id = detail::json_int(detail::require(sidecar, "session_id", ""), "session_id");
    const Json& seed = detail::require(sidecar, "seed", "");
    if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<std::int64_t>() >= 0))
        throw ParseError(name + ": seed must be a non-negative integer");
    r.seed = seed.get<std::uint64_t>();
    if (sidecar.contains("treatment")) r.treatment = sidecar.at("treatment").get<std::string>();
    r.params = params_from_json(detail::require(sidecar, "params", ""));
    const int periods = detail::json_int(detail::require(sidecar, "periods", ""), "periods");
    const int n = r.params.n;

    std::string line;
    if (!std::getline(csv, line) || line != kSessionCsvHeader) throw ParseError(name + ": row 1: unexpected header");
    int row = 1;
    PeriodRecord cur;
    std::vector<AgentMask> listed;  // neighbor_ids as written, per agent
    auto field_error = [&](const char* what) { return ParseError(name + ": row " + std::to_string(row) + ": bad " + what); };

    while (std::getline(csv, line)) {
        ++row;
        if (line.empty()) continue;
        const auto f = detail::split_csv(line);
        if (f.size() != 12)
            throw ParseError(name + ": row " + std::to_string(row) + ": expected 12 fields, got " + std::to_string(f.size()));
        int sid = 0, period = 0, agent = 0, degree = 0;
        if (!parse_int(f[0], sid) || sid != r.session_id) throw field_error("session_id");
        const int expect_period = r.period_count() + 1;
        const int expect_agent = static_cast<int>(cur.efforts.size()) + 1;
        if (!parse_int(f[1], period) || period != expect_period) throw field_error("period");
        if (!parse_int(f[2], agent) || agent != expect_agent) throw field_error("agent");
        if (agent == 1) {
            cur = PeriodRecord{};
            cur.intents = IntentProfile(n);
            listed.clear();
        }
        double effort = 0.0;
        if (!parse_double(f[3], effort)) throw field_error("effort");
        AgentMask initiated = 0, neighbors = 0;
        if (!parse_ids(f[4], n, initiated) || (initiated & bit(agent - 1))) throw field_error("initiated_ids");
        if (!parse_ids(f[5], n, neighbors)) throw field_error("neighbor_ids");
        if (!parse_int(f[6], degree) || degree != popcount(neighbors)) throw field_error("degree");
        PayoffBreakdown pay;
        if (!parse_double(f[7], pay.total)) throw field_error("payoff_total");
        if (!parse_double(f[8], pay.own_benefit)) throw field_error("own_benefit");
        if (!parse_double(f[9], pay.effort_cost)) throw field_error("effort_cost");
        if (!parse_double(f[10], pay.spillover)) throw field_error("spillover");
        if (!parse_double(f[11], pay.link_cost)) throw field_error("link_cost");

        cur.efforts.push_back(effort);
        cur.intents.set_row(agent - 1, initiated);
        cur.payoffs.push_back(pay);
        listed.push_back(neighbors);
        if (agent == n) {
            cur.network = realize_network(cur.intents);
            bool agree = true;
            for (int i = 0; i < n; ++i) agree = agree && listed[static_cast<std::size_t>(i)] == cur.network.neighbors(i);
            if (!agree)
                throw ParseError(name + ": row " + std::to_string(row) + ": neighbor_ids disagree with intents in period " +
                                 std::to_string(period));
            r.periods.push_back(std::move(cur));
            cur = PeriodRecord{};
        }
    }
    if (!cur.efforts.empty())
        throw ParseError(name + ": row " + std::to_string(row) + ": period " + std::to_string(r.period_count() + 1) +
                         " is truncated after agent " + std::to_string(cur.efforts.size()));
    if (r.period_count() != periods)
        throw ParseError(name + ": row " + std::to_string(row) + ": expected " + std::to_string(periods) +
                         " periods, found " + std::to_string(r.period_count()));
    return r;
}

/// Reads the record whose CSV is `csv_path`; the sidecar sits beside it.
inline SessionRecord read_record(const std::filesystem::path& csv_path) {
    auto side = csv_path;
    side.replace_extension(".json");
    const Json sidecar = read_json_file(side.string());
    std::ifstream in(csv_path);
    if (!in) throw ParseError(csv_path.string() + ": cannot open");
    return read_session(in, sidecar, csv_path.filename().string());
}

/// Every session_*.csv in `dir`, ordered by file name.
inline std::vector<SessionRecord> read_records(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw ParseError(dir.string() + ": not a directory");
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        const auto name = e.path().filename().string();
        if (name.starts_with("session_") && e.path().extension() == ".csv") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw ParseError(dir.string() + ": no session files");
    std::vector<SessionRecord> out;
    for (const auto& f : files) out.push_back(read_record(f));
    return out;
}

}  // namespace lqnet
