#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lqnet/analysis.hpp"
#include "lqnet/scenario.hpp"
#include "lqnet/session_io.hpp"

using namespace lqnet;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const auto d = fs::temp_directory_path() / ("lqnet_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::vector<SessionRecord> sample_batch() {
    const auto& p = find_treatment("N5_HighCost").params;
    AgentPolicy pol;
    pol.effort = estimated_effort_rule("N5_HighCost");
    pol.effort.noise_sd = 0.7;
    pol.effort.initial.kind = InitialEffortKind::Uniform;
    pol.links.kind = LinkRuleKind::LogisticChoice;
    pol.links.logit = link_benefit_logit(p);
    auto recs = batch_run(p, uniform_policies(5, pol), 12, 3, 500, 1);
    for (auto& r : recs) r.treatment = "N5_HighCost";
    return recs;
}

std::string write_text(const fs::path& path, const std::string& text) {
    std::ofstream(path) << text;
    return path.string();
}

std::string expect_parse_error(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const ParseError& e) {
        return e.what();
    }
    ADD_FAILURE() << "no ParseError";
    return {};
}

}  // namespace

TEST(SessionIo, IdLists) {
    EXPECT_EQ(format_ids(0), "");
    EXPECT_EQ(format_ids(bit(0) | bit(2) | bit(8)), "1:3:9");
    AgentMask m = 0;
    EXPECT_TRUE(parse_ids("1:3:9", 9, m));
    EXPECT_EQ(m, bit(0) | bit(2) | bit(8));
    EXPECT_TRUE(parse_ids("", 9, m));
    EXPECT_EQ(m, 0U);
    EXPECT_FALSE(parse_ids("0", 9, m));
    EXPECT_FALSE(parse_ids("10", 9, m));
    EXPECT_FALSE(parse_ids("1::2", 9, m));
    EXPECT_EQ(session_stem(7), "session_0007");
}

TEST(SessionIo, RoundTripIsBitExact) {
    const auto dir = scratch_dir("roundtrip");
    const auto recs = sample_batch();
    for (const auto& r : recs) write_record(r, dir);
    const auto back = read_records(dir);
    ASSERT_EQ(back.size(), recs.size());
    for (std::size_t k = 0; k < recs.size(); ++k) {
        EXPECT_EQ(back[k], recs[k]);
        EXPECT_EQ(back[k].treatment, "N5_HighCost");
    }
    fs::remove_all(dir);
}

TEST(SessionIo, AnalysisSurvivesRoundTrip) {
    const auto dir = scratch_dir("analysis");
    const auto recs = sample_batch();
    for (const auto& r : recs) write_record(r, dir);
    const auto back = read_records(dir);
    const auto& p = recs[0].params;
    const auto w = PeriodWindow::last10();
    EXPECT_EQ(efficiency_report(back, p, w).relative_efficiency, efficiency_report(recs, p, w).relative_efficiency);
    std::ostringstream a, b;
    write_summary_csv(treatment_summary(recs, p, w, "x"), a);
    write_summary_csv(treatment_summary(back, p, w, "x"), b);
    EXPECT_EQ(a.str(), b.str());
    fs::remove_all(dir);
}

TEST(SessionIo, CsvHeaderAndRows) {
    const auto rec = sample_batch()[0];
    std::ostringstream os;
    write_session_csv(rec, os);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, kSessionCsvHeader);
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 12 * 5);
}

TEST(SessionIo, TruncatedFileNamesTheRow) {
    const auto rec = sample_batch()[1];
    std::ostringstream os;
    write_session_csv(rec, os);
    std::string text = os.str();
    // drop the last three agent rows of the final period
    for (int k = 0; k < 3; ++k) text.erase(text.rfind('\n', text.size() - 2) + 1);
    std::istringstream in(text);
    const auto msg = expect_parse_error([&] { read_session(in, session_sidecar(rec), "s"); });
    EXPECT_NE(msg.find("row 58"), std::string::npos) << msg;
    EXPECT_NE(msg.find("truncated"), std::string::npos) << msg;
}

TEST(SessionIo, MissingPeriodIsReported) {
    const auto rec = sample_batch()[0];
    std::ostringstream os;
    write_session_csv(rec, os);
    std::string text = os.str();
    for (int k = 0; k < 5; ++k) text.erase(text.rfind('\n', text.size() - 2) + 1);
    std::istringstream in(text);
    const auto msg = expect_parse_error([&] { read_session(in, session_sidecar(rec), "s"); });
    EXPECT_NE(msg.find("expected 12 periods"), std::string::npos) << msg;
}

TEST(SessionIo, MalformedFieldsNameRowAndColumn) {
    const auto rec = sample_batch()[0];
    std::ostringstream os;
    write_session_csv(rec, os);
    const std::string good = os.str();

    auto replace_row = [&](int row, const std::string& content) {
        std::istringstream in(good);
        std::string line, out;
        for (int r = 1; std::getline(in, line); ++r) out += (r == row ? content : line) + "\n";
        return out;
    };
    struct Case {
        std::string row;
        std::string needle;
    };
    const std::vector<Case> cases = {
        {"0,1,1,abc,,,0,0,0,0,0,0", "bad effort"},
        {"0,1,1,2.5,1,,0,0,0,0,0,0", "bad initiated_ids"},
        {"0,1,1,2.5,,,3,0,0,0,0,0", "bad degree"},
        {"0,1,2,2.5,,,0,0,0,0,0,0", "bad agent"},
        {"9,1,1,2.5,,,0,0,0,0,0,0", "bad session_id"},
        {"0,1,1,2.5,,,0,0,0,0,0", "expected 12 fields"},
    };
    for (const auto& c : cases) {
        std::istringstream in(replace_row(2, c.row));
        const auto msg = expect_parse_error([&] { read_session(in, session_sidecar(rec), "s"); });
        EXPECT_NE(msg.find("row 2"), std::string::npos) << msg;
        EXPECT_NE(msg.find(c.needle), std::string::npos) << msg;
    }
}

TEST(SessionIo, NeighborListMustMatchIntents) {
    GameParams p;
    SessionRecord r;
    r.params = p;
    PeriodRecord per;
    per.intents = IntentProfile(5);
    per.intents.set(0, 1);
    per.network = realize_network(per.intents);
    per.efforts.assign(5, 2.5);
    for (int i = 0; i < 5; ++i) per.payoffs.push_back(payoff(p, per.efforts, per.intents, per.network, i));
    r.periods.push_back(per);
    std::ostringstream os;
    write_session_csv(r, os);
    std::string text = os.str();
    // agent 3 claims agent 4 as a neighbor
    const auto pos = text.find("\n0,1,3,2.5,,,0,");
    ASSERT_NE(pos, std::string::npos);
    text.replace(pos, 15, "\n0,1,3,2.5,,4,1,");
    std::istringstream in(text);
    const auto msg = expect_parse_error([&] { read_session(in, session_sidecar(r), "s"); });
    EXPECT_NE(msg.find("neighbor_ids disagree"), std::string::npos) << msg;
}

TEST(SessionIo, NewerFormatVersionIsRejected) {
    const auto rec = sample_batch()[0];
    std::ostringstream os;
    write_session_csv(rec, os);
    Json side = session_sidecar(rec);
    side["format_version"] = 2;
    std::istringstream in(os.str());
    EXPECT_THROW(read_session(in, side), SchemaVersionError);
    side.erase("format_version");
    std::istringstream in2(os.str());
    EXPECT_THROW(read_session(in2, side), ParseError);
}

TEST(SessionIo, EmptyDirectoryIsAnError) {
    const auto dir = scratch_dir("empty");
    EXPECT_THROW(read_records(dir), ParseError);
    EXPECT_THROW(read_records(dir / "missing"), ParseError);
    fs::remove_all(dir);
}

TEST(JsonIo, NetworkAndProfileRoundTrip) {
    const Network g = Network::from_edges(6, {{0, 1}, {1, 2}, {4, 5}});
    const Json j = to_json(g);
    EXPECT_EQ(j.dump(), R"({"n":6,"edges":[[1,2],[2,3],[5,6]]})");
    EXPECT_EQ(network_from_json(j), g);

    StrategyProfile s{EffortProfile{1.5, 0.1, 3.0}, IntentProfile(3)};
    s.intents.set(2, 0);
    s.intents.set(0, 1);
    EXPECT_EQ(to_json(s.intents).dump(), R"({"n":3,"intents":[[1,2],[3,1]]})");
    EXPECT_EQ(intents_from_json(to_json(s.intents)), s.intents);
    const StrategyProfile back = profile_from_json(Json::parse(to_json(s).dump()));
    EXPECT_EQ(back.efforts, s.efforts);
    EXPECT_EQ(back.intents, s.intents);
}

TEST(JsonIo, ErrorsCarryFieldPaths) {
    auto msg_of = [](const std::function<void()>& fn) {
        try {
            fn();
        } catch (const Error& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    EXPECT_NE(msg_of([] { network_from_json(Json::parse(R"({"n":3,"edges":[[1,4]]})")); }).find("edges[0][1]"),
              std::string::npos);
    EXPECT_NE(msg_of([] { network_from_json(Json::parse(R"({"n":3,"edges":[[2,1]]})")); }).find("edges[0]"),
              std::string::npos);
    EXPECT_NE(msg_of([] { intents_from_json(Json::parse(R"({"n":3,"intents":[[2,2]]})")); }).find("intents[0]"),
              std::string::npos);
    EXPECT_NE(msg_of([] { params_from_json(Json::parse(R"({"kapa":1})")); }).find("params.kapa"), std::string::npos);
    EXPECT_NE(msg_of([] { params_from_json(Json::parse(R"({"beta":-1})")); }).find("params.beta"), std::string::npos);
    EXPECT_NE(msg_of([] { profile_from_json(Json::parse(R"({"n":2,"efforts":[1,"x"]})")); }).find("efforts[1]"),
              std::string::npos);
}

TEST(Scenario, TreatmentWithOverrides) {
    const auto cfg = parse_scenario(YAML::Load("treatment: N9_HighCost\n"));
    EXPECT_EQ(cfg.params, find_treatment("N9_HighCost").params);
    EXPECT_EQ(cfg.policies.size(), 9U);

    const auto zero = parse_scenario(YAML::Load("treatment: N9_HighCost\nparams: {kappa: 0}\n"));
    EXPECT_DOUBLE_EQ(zero.params.kappa, 0.0);
    EXPECT_DOUBLE_EQ(zero.params.lambda, 0.25);

    EXPECT_THROW(parse_scenario(YAML::Load("treatment: N7_Whatever\n")), UnknownTreatment);
    const auto over = parse_scenario(YAML::Load("treatment: N9_HighCost\n"), std::string("N5_LowCost"));
    EXPECT_EQ(over.params.n, 5);
}

TEST(Scenario, PoliciesAndAgents) {
    const auto cfg = parse_scenario(YAML::Load(R"(
treatment: N5_HighCost
periods: 12
replications: 4
seed: 99
policy:
  effort: {preset: estimated, noise_sd: 0.5, initial: {kind: uniform}}
  links: {rule: logistic, preset: link_benefit}
agents:
  - id: 2
    links: {rule: rank_top, k: 2}
  - id: 5
    effort: {preset: best_response}
    links: {rule: fixed, targets: [1, 3]}
)"));
    EXPECT_EQ(cfg.periods, 12);
    EXPECT_EQ(cfg.replications, 4);
    EXPECT_EQ(cfg.seed, 99U);
    EXPECT_DOUBLE_EQ(cfg.policies[0].effort.b1, 0.900);
    EXPECT_EQ(cfg.policies[0].links.kind, LinkRuleKind::LogisticChoice);
    EXPECT_EQ(cfg.policies[1].links.kind, LinkRuleKind::RankTop);
    EXPECT_EQ(cfg.policies[1].links.rank_k, 2);
    EXPECT_DOUBLE_EQ(cfg.policies[1].effort.noise_sd, 0.5);
    EXPECT_DOUBLE_EQ(cfg.policies[4].effort.b1, 1.0);
    EXPECT_EQ(cfg.policies[4].links.fixed_targets, bit(0) | bit(2));
}

TEST(Scenario, ErrorsNameTheField) {
    auto msg_of = [](const char* text) {
        try {
            parse_scenario(YAML::Load(text));
        } catch (const Error& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    EXPECT_NE(msg_of("treatment: N5_LowCost\nperiod: 3\n").find("period: unknown field"), std::string::npos);
    EXPECT_NE(msg_of("treatment: N5_LowCost\nparams: {kappa: abc}\n").find("params.kappa"), std::string::npos);
    EXPECT_NE(msg_of("treatment: N5_LowCost\npolicy: {links: {rule: rank_top}}\n").find("policy.links.k"),
              std::string::npos);
    EXPECT_NE(msg_of("treatment: N5_LowCost\npolicy: {links: {rule: rank_top, k: 7}}\n").find("policy.links.k"),
              std::string::npos);
    EXPECT_NE(msg_of("treatment: N5_LowCost\nagents: [{id: 6}]\n").find("agents[0].id"), std::string::npos);
    EXPECT_NE(msg_of("treatment: N5_LowCost\npolicy: {effort: {noise_sd: -1}}\n").find("policy.effort"),
              std::string::npos);
    EXPECT_NE(msg_of("params: {n: 5}\nseed: x\n").find("seed"), std::string::npos);
}

TEST(Scenario, LoadsFromFile) {
    const auto dir = scratch_dir("scenario");
    const auto path = write_text(dir / "s.yaml", "treatment: N5_LowCost\nperiods: 3\n");
    EXPECT_EQ(load_scenario(path).periods, 3);
    EXPECT_THROW(load_scenario((dir / "none.yaml").string()), ParseError);
    const auto bad = write_text(dir / "bad.yaml", "treatment: [unclosed\n");
    EXPECT_THROW(load_scenario(bad), ParseError);
    // JSON is a YAML subset
    const auto js = write_text(dir / "s.json", R"({"treatment": "N9_LowCost2", "replications": 2})");
    EXPECT_EQ(load_scenario(js).replications, 2);
    fs::remove_all(dir);
}

TEST(Scenario, ShippedTreatmentTableMatchesBuiltIns) {
    const auto table = load_treatment_table(std::string(LQNET_SOURCE_DIR) + "/data/treatments.yaml");
    const auto& builtin = treatments();
    ASSERT_EQ(table.size(), builtin.size());
    for (std::size_t k = 0; k < table.size(); ++k) {
        EXPECT_EQ(table[k].name, builtin[k].name);
        EXPECT_EQ(table[k].params, builtin[k].params);
        EXPECT_EQ(table[k].equilibrium_networks, builtin[k].equilibrium_networks);
    }
}
