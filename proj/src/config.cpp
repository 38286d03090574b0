#include "decern/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "decern/error.hpp"

namespace decern {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::string unquote(std::string v) {
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
    return v;
}

std::vector<std::string> split_list(std::string_view v) {
    std::vector<std::string> out;
    std::stringstream ss{std::string(v)};
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) throw Error("config " + key + ": '" + v + "' is not a number");
    return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        throw Error("config " + key + ": '" + v + "' is not a non-negative integer");
    }
    return out;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw Error("config " + key + ": '" + v + "' is not a boolean");
}

void check_known(const std::string& key) {
    const auto& keys = known_config_keys();
    if (std::ranges::find(keys, key) == keys.end()) throw Error("unknown config key '" + key + "'");
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

const std::vector<std::string>& known_config_keys() {
    static const std::vector<std::string> keys = {
        "dataset.source",  "dataset.path",    "dataset.split_seed", "dataset.test_fraction",
        "dataset.classes", "dataset.per_class", "dataset.dim",      "dataset.spread",
        "dataset.noise",   "dataset.overlap", "dataset.seed",       "strategy",
        "strategies",      "decern.R",        "decern.xi",          "decern.lambda",
        "decern.weighted_term", "budget.K",   "cycles",             "seeds",
        "train.lr",        "train.batch",     "train.epochs",       "train.cosine",
        "train.hidden",    "pool_subsample",  "output.dir",      "output.timing",      "output.dump_scores",
    };
    return keys;
}

ConfigMap parse_config_text(std::string_view text) {
    ConfigMap out;
    std::string section;
    std::stringstream in{std::string(text)};
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        // Comments: '#' outside quotes.
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') quoted = !quoted;
            if (line[i] == '#' && !quoted) {
                line.resize(i);
                break;
            }
        }
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw Error("config line " + std::to_string(line_no) + ": unterminated section");
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw Error("config line " + std::to_string(line_no) + ": expected key = value");
        std::string key = trim(std::string_view(line).substr(0, eq));
        if (key.empty()) throw Error("config line " + std::to_string(line_no) + ": empty key");
        if (!section.empty()) key = section + "." + key;
        out[key] = unquote(trim(std::string_view(line).substr(eq + 1)));
    }
    return out;
}

ConfigMap load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        const auto doc = nlohmann::json::parse(text, nullptr, false);
        if (doc.is_discarded() || !doc.contains("config") || !doc["config"].is_object()) {
            throw SchemaError("JSON config " + path.string() + " has no \"config\" object");
        }
        ConfigMap out;
        for (const auto& [k, v] : doc["config"].items()) {
            if (!v.is_string()) throw SchemaError("config value for '" + k + "' is not a string");
            out[k] = v.get<std::string>();
        }
        return out;
    }
    return parse_config_text(text);
}

void apply_override(ConfigMap& cfg, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) throw Error("override '" + std::string(assignment) + "' is not key=value");
    const std::string key = trim(assignment.substr(0, eq));
    check_known(key);
    cfg[key] = unquote(trim(assignment.substr(eq + 1)));
}

RunConfig resolve_config(const ConfigMap& cfg) {
    for (const auto& [k, v] : cfg) check_known(k);
    RunConfig rc;
    auto get = [&](const std::string& key) -> const std::string* {
        const auto it = cfg.find(key);
        return it == cfg.end() ? nullptr : &it->second;
    };
    auto num = [&](const std::string& key, double& out) {
        if (const auto* v = get(key)) out = to_double(key, *v);
    };
    auto count = [&](const std::string& key, auto& out) {
        if (const auto* v = get(key)) out = static_cast<std::remove_reference_t<decltype(out)>>(to_u64(key, *v));
    };
    auto flag = [&](const std::string& key, bool& out) {
        if (const auto* v = get(key)) out = to_bool(key, *v);
    };

    SyntheticSpec& syn = rc.dataset.synthetic;
    if (const auto* v = get("dataset.source")) {
        if (*v == "synthetic") {
            rc.dataset.kind = DatasetSource::Kind::synthetic;
        } else if (*v == "file") {
            rc.dataset.kind = DatasetSource::Kind::file;
        } else {
            throw Error("config dataset.source: expected synthetic or file, got '" + *v + "'");
        }
    }
    if (const auto* v = get("dataset.path")) rc.dataset.path = *v;
    count("dataset.split_seed", rc.dataset.split_seed);
    num("dataset.test_fraction", rc.dataset.test_fraction);
    syn.test_fraction = rc.dataset.test_fraction;
    count("dataset.classes", syn.num_classes);
    count("dataset.per_class", syn.per_class);
    count("dataset.dim", syn.dim);
    num("dataset.spread", syn.spread);
    num("dataset.noise", syn.noise);
    num("dataset.overlap", syn.overlap);
    count("dataset.seed", syn.seed);
    if (rc.dataset.kind == DatasetSource::Kind::file && rc.dataset.path.empty()) {
        throw Error("config dataset.path is required when dataset.source = file");
    }
    if (rc.dataset.kind == DatasetSource::Kind::synthetic) syn.validate();

    if (const auto* v = get("strategy")) rc.strategy.kind = parse_strategy(*v);
    if (const auto* v = get("strategies")) {
        for (const auto& name : split_list(*v)) rc.sweep.push_back(parse_strategy(name));
    }
    num("decern.R", rc.strategy.fusion.mask_fraction);
    num("decern.xi", rc.strategy.xi);
    if (const auto* v = get("decern.lambda")) {
        if (*v == "dynamic") {
            rc.strategy.fusion.fixed_lambda.reset();
        } else {
            rc.strategy.fusion.fixed_lambda = to_double("decern.lambda", *v);
        }
    }
    if (const auto* v = get("decern.weighted_term")) {
        if (*v == "inside") {
            rc.strategy.fusion.weighted_term = WeightedTermPlacement::inside_average;
        } else if (*v == "outside") {
            rc.strategy.fusion.weighted_term = WeightedTermPlacement::outside_average;
        } else {
            throw Error("config decern.weighted_term: expected inside or outside, got '" + *v + "'");
        }
    }
    count("budget.K", rc.budget_multiplier);
    count("cycles", rc.cycles);
    if (const auto* v = get("seeds")) {
        rc.seeds.clear();
        for (const auto& s : split_list(*v)) rc.seeds.push_back(to_u64("seeds", s));
    }
    num("train.lr", rc.train.learning_rate);
    count("train.batch", rc.train.batch_size);
    count("train.epochs", rc.train.epochs);
    flag("train.cosine", rc.train.cosine_decay);
    count("train.hidden", rc.hidden_width);
    count("pool_subsample", rc.pool_subsample);
    if (const auto* v = get("output.dir")) rc.output_dir = *v;
    flag("output.timing", rc.record_timing);
    flag("output.dump_scores", rc.dump_scores);

    rc.validate();
    return rc;
}

ConfigMap echo_config(const RunConfig& rc) {
    const SyntheticSpec& syn = rc.dataset.synthetic;
    ConfigMap out;
    out["dataset.source"] = rc.dataset.kind == DatasetSource::Kind::synthetic ? "synthetic" : "file";
    out["dataset.path"] = rc.dataset.path.string();
    out["dataset.split_seed"] = std::to_string(rc.dataset.split_seed);
    out["dataset.test_fraction"] = format_double(rc.dataset.test_fraction);
    out["dataset.classes"] = std::to_string(syn.num_classes);
    out["dataset.per_class"] = std::to_string(syn.per_class);
    out["dataset.dim"] = std::to_string(syn.dim);
    out["dataset.spread"] = format_double(syn.spread);
    out["dataset.noise"] = format_double(syn.noise);
    out["dataset.overlap"] = format_double(syn.overlap);
    out["dataset.seed"] = std::to_string(syn.seed);
    out["strategy"] = std::string(to_string(rc.strategy.kind));
    std::string list;
    for (StrategyKind k : rc.sweep) list += (list.empty() ? "" : ",") + std::string(to_string(k));
    out["strategies"] = list;
    out["decern.R"] = format_double(rc.strategy.fusion.mask_fraction);
    out["decern.xi"] = format_double(rc.strategy.xi);
    out["decern.lambda"] =
        rc.strategy.fusion.fixed_lambda ? format_double(*rc.strategy.fusion.fixed_lambda) : std::string("dynamic");
    out["decern.weighted_term"] =
        rc.strategy.fusion.weighted_term == WeightedTermPlacement::inside_average ? "inside" : "outside";
    out["budget.K"] = std::to_string(rc.budget_multiplier);
    out["cycles"] = std::to_string(rc.cycles);
    std::string seeds;
    for (std::uint64_t s : rc.seeds) seeds += (seeds.empty() ? "" : ",") + std::to_string(s);
    out["seeds"] = seeds;
    out["train.lr"] = format_double(rc.train.learning_rate);
    out["train.batch"] = std::to_string(rc.train.batch_size);
    out["train.epochs"] = std::to_string(rc.train.epochs);
    out["train.cosine"] = rc.train.cosine_decay ? "true" : "false";
    out["train.hidden"] = std::to_string(rc.hidden_width);
    out["pool_subsample"] = std::to_string(rc.pool_subsample);
    out["output.timing"] = rc.record_timing ? "true" : "false";
    out["output.dump_scores"] = rc.dump_scores ? "true" : "false";
    return out;
}

}  // namespace decern
