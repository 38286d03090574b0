#include "decern/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "json.hpp"

#include "decern/error.hpp"

namespace decern {

using ordered_json = nlohmann::ordered_json;

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

namespace {

std::uint64_t parse_hex64(const std::string& s) {
    if (s.size() != 16) throw SchemaError("pool_hash must be 16 hex digits");
    std::uint64_t v = 0;
    for (char ch : s) {
        v <<= 4;
        if (ch >= '0' && ch <= '9') {
            v |= static_cast<std::uint64_t>(ch - '0');
        } else if (ch >= 'a' && ch <= 'f') {
            v |= static_cast<std::uint64_t>(ch - 'a' + 10);
        } else {
            throw SchemaError("pool_hash has a non-hex digit");
        }
    }
    return v;
}

ordered_json cycle_to_json(const CycleReport& c) {
    ordered_json j;
    j["cycle"] = c.cycle;
    j["accuracy"] = c.accuracy;
    j["imbalance"] = c.imbalance;
    j["labeled"] = c.labeled;
    j["oracle_reveals"] = c.oracle_reveals;
    j["pool_hash"] = hex64(c.pool_hash);
    j["selected"] = c.selected;
    if (c.scores) {
        const ScoreSummary& s = *c.scores;
        j["scores"] = ordered_json{{"mean", s.mean},     {"std", s.std},   {"skewness", s.skewness},
                                   {"lambda", s.lambda}, {"zeta", s.zeta}, {"candidates", s.candidates},
                                   {"fallback", s.fallback}};
    } else {
        j["scores"] = nullptr;
    }
    j["wall_ms"] = ordered_json{{"select", c.timing.select_ms}, {"train", c.timing.train_ms}, {"eval", c.timing.eval_ms}};
    return j;
}

CycleReport cycle_from_json(const ordered_json& j) {
    CycleReport c;
    c.cycle = j.at("cycle").get<std::size_t>();
    c.accuracy = j.at("accuracy").get<double>();
    c.imbalance = j.at("imbalance").get<double>();
    c.labeled = j.at("labeled").get<std::size_t>();
    c.oracle_reveals = j.at("oracle_reveals").get<std::size_t>();
    c.pool_hash = parse_hex64(j.at("pool_hash").get<std::string>());
    c.selected = j.at("selected").get<std::vector<std::size_t>>();
    const auto& s = j.at("scores");
    if (!s.is_null()) {
        c.scores = ScoreSummary{s.at("mean").get<double>(),     s.at("std").get<double>(),
                                s.at("skewness").get<double>(), s.at("lambda").get<double>(),
                                s.at("zeta").get<double>(),     s.at("candidates").get<std::size_t>(),
                                s.at("fallback").get<bool>()};
    }
    const auto& w = j.at("wall_ms");
    c.timing = {w.at("select").get<double>(), w.at("train").get<double>(), w.at("eval").get<double>()};
    return c;
}

std::string pm(double mean, double std) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f +- %.4f", mean, std);
    return buf;
}

}  // namespace

std::string report_to_json(const Report& report) {
    ordered_json doc;
    doc["schema"] = kReportSchema;
    doc["schema_version"] = kReportSchemaVersion;
    doc["artifact_version"] = kArtifactVersion;
    ordered_json cfg = ordered_json::object();
    for (const auto& [k, v] : report.config) cfg[k] = v;
    doc["config"] = std::move(cfg);
    ordered_json runs = ordered_json::array();
    for (const SeedRun& r : report.result.runs) {
        ordered_json run;
        run["strategy"] = to_string(r.strategy);
        run["seed"] = r.seed;
        ordered_json cycles = ordered_json::array();
        for (const CycleReport& c : r.cycles) cycles.push_back(cycle_to_json(c));
        run["cycles"] = std::move(cycles);
        runs.push_back(std::move(run));
    }
    doc["runs"] = std::move(runs);
    return doc.dump(2) + "\n";
}

Report report_from_json(std::string_view text) {
    const ordered_json doc = ordered_json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw SchemaError("report is not valid JSON");
    try {
        if (doc.at("schema").get<std::string>() != kReportSchema) throw SchemaError("not a decern report");
        const int version = doc.at("schema_version").get<int>();
        if (version != kReportSchemaVersion) {
            throw SchemaError("report schema version " + std::to_string(version) + " is not supported (expected " +
                              std::to_string(kReportSchemaVersion) + ")");
        }
        Report report;
        for (const auto& [k, v] : doc.at("config").items()) report.config[k] = v.get<std::string>();
        for (const auto& run : doc.at("runs")) {
            SeedRun r;
            r.strategy = parse_strategy(run.at("strategy").get<std::string>());
            r.seed = run.at("seed").get<std::uint64_t>();
            for (const auto& c : run.at("cycles")) r.cycles.push_back(cycle_from_json(c));
            report.result.runs.push_back(std::move(r));
        }
        return report;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("malformed report: ") + e.what());
    } catch (const SchemaError&) {
        throw;
    } catch (const Error& e) {
        throw SchemaError(std::string("malformed report: ") + e.what());
    }
}

std::string curves_csv(const ExperimentResult& result) {
    std::string out = "cycle,strategy,seed,accuracy,imbalance,candidates,lambda,zeta,wall_ms,pool_hash\n";
    for (const SeedRun& r : result.runs) {
        for (const CycleReport& c : r.cycles) {
            out += std::to_string(c.cycle) + ',' + std::string(to_string(r.strategy)) + ',' + std::to_string(r.seed) +
                   ',' + format_double(c.accuracy) + ',' + format_double(c.imbalance) + ',';
            if (c.scores) {
                out += std::to_string(c.scores->candidates) + ',' + format_double(c.scores->lambda) + ',' +
                       format_double(c.scores->zeta) + ',';
            } else {
                out += ",,,";
            }
            out += format_double(c.timing.total()) + ',' + hex64(c.pool_hash) + '\n';
        }
    }
    return out;
}

std::string summary_table(const ExperimentResult& result) {
    std::ostringstream out;
    for (StrategyKind k : strategies_in(result)) {
        const auto runs = runs_for(result, k);
        out << "strategy " << to_string(k) << " (" << runs.size() << " seed" << (runs.size() == 1 ? "" : "s")
            << ")\n";
        out << "  cycle  labeled  accuracy            imbalance\n";
        const auto rows = aggregate(runs);
        for (std::size_t t = 0; t < rows.size(); ++t) {
            char line[160];
            std::snprintf(line, sizeof(line), "  %5zu  %7zu  %-18s  %s\n", rows[t].cycle, runs.front()[t].labeled,
                          pm(rows[t].accuracy_mean, rows[t].accuracy_std).c_str(),
                          pm(rows[t].imbalance_mean, rows[t].imbalance_std).c_str());
            out << line;
        }
    }
    return out.str();
}

std::string comparison_table(const ExperimentResult& result) {
    std::ostringstream out;
    out << "strategy   final accuracy      final imbalance\n";
    for (StrategyKind k : strategies_in(result)) {
        const auto rows = aggregate(runs_for(result, k));
        const AggregateRow& last = rows.back();
        char line[160];
        std::snprintf(line, sizeof(line), "%-9s  %-18s  %s\n", std::string(to_string(k)).c_str(),
                      pm(last.accuracy_mean, last.accuracy_std).c_str(),
                      pm(last.imbalance_mean, last.imbalance_std).c_str());
        out << line;
    }
    return out.str();
}

std::string score_dump_csv(const CycleReport& cycle) {
    if (!cycle.score_table) throw Error("cycle has no score table");
    const ScoreTable& t = *cycle.score_table;
    const std::unordered_set<std::size_t> picked(cycle.selected.begin(), cycle.selected.end());
    std::string out = "index,S,selected\n";
    for (std::size_t r = 0; r < t.indices.size(); ++r) {
        out += std::to_string(t.indices[r]) + ',' + format_double(t.scores[r]) + ',' +
               (picked.contains(t.indices[r]) ? "1" : "0") + '\n';
    }
    return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) throw Error("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error("cannot move " + tmp.string() + " to " + path.string());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace decern
