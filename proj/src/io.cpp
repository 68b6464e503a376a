#include "schelling/io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "schelling/errors.hpp"

namespace schelling {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

void require_known_keys(const json& j, const std::set<std::string>& known,
                        const std::string& where, std::vector<std::string>& errors) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!known.contains(key)) errors.push_back("unknown field '" + where + key + "'");
    }
}

ordered_json pair_to_json(const Pair& p) {
    return ordered_json::array(
        {ordered_json::array({p.a.row, p.a.col}), ordered_json::array({p.b.row, p.b.col})});
}

} // namespace

RunConfig run_config_from_json(const json& j) {
    std::vector<std::string> errors;
    if (!j.is_object()) throw ValidationError({"run config must be a JSON object"});

    require_known_keys(j,
                       {"n", "red_count", "r", "beta", "eps", "scheduler", "initial", "steps",
                        "seed", "record_every"},
                       "", errors);

    RunConfig config;
    auto read_number = [&](const char* key, auto& out, bool required) {
        if (!j.contains(key)) {
            if (required) errors.push_back(std::string("missing required field '") + key + "'");
            return;
        }
        if (!j[key].is_number()) {
            errors.push_back(std::string("field '") + key + "' must be a number");
            return;
        }
        out = j[key].get<std::decay_t<decltype(out)>>();
    };

    read_number("n", config.n, true);
    read_number("red_count", config.red_count, true);
    read_number("r", config.r, false);
    read_number("beta", config.beta, false);
    read_number("steps", config.steps, false);
    read_number("seed", config.seed, false);
    read_number("record_every", config.record_every, false);

    if (j.contains("eps")) {
        if (!j["eps"].is_array()) {
            errors.push_back("field 'eps' must be an array of numbers");
        } else {
            for (const auto& v : j["eps"]) {
                if (!v.is_number()) {
                    errors.push_back("field 'eps' must contain only numbers");
                    break;
                }
                config.eps.push_back(v.get<double>());
            }
        }
    }

    if (j.contains("scheduler")) {
        const json& s = j["scheduler"];
        if (!s.is_object() || !s.contains("kind") || !s["kind"].is_string()) {
            errors.push_back("field 'scheduler' must be an object with a 'kind' string");
        } else {
            std::string kind = s["kind"].get<std::string>();
            if (kind == "uniform") {
                require_known_keys(s, {"kind"}, "scheduler.", errors);
                config.scheduler.family = SchedulerFamily::UniformAll;
            } else if (kind == "contagion") {
                require_known_keys(s, {"kind", "self_weight"}, "scheduler.", errors);
                config.scheduler.family = SchedulerFamily::Contagion;
                if (s.contains("self_weight")) {
                    if (!s["self_weight"].is_number())
                        errors.push_back("scheduler.self_weight must be a number");
                    else config.scheduler.self_weight = s["self_weight"].get<double>();
                }
            } else if (kind == "custom") {
                require_known_keys(s, {"kind", "file"}, "scheduler.", errors);
                config.scheduler.family = SchedulerFamily::Custom;
                if (!s.contains("file") || !s["file"].is_string())
                    errors.push_back("scheduler.file must be a string path");
                else config.scheduler.custom_file = s["file"].get<std::string>();
            } else {
                errors.push_back("scheduler.kind must be one of uniform|contagion|custom");
            }
        }
    }

    if (j.contains("initial")) {
        const json& s = j["initial"];
        if (!s.is_object() || !s.contains("kind") || !s["kind"].is_string()) {
            errors.push_back("field 'initial' must be an object with a 'kind' string");
        } else {
            std::string kind = s["kind"].get<std::string>();
            if (kind == "random") {
                require_known_keys(s, {"kind", "seed"}, "initial.", errors);
                config.initial.kind = InitialSpec::Kind::Random;
                if (s.contains("seed")) {
                    if (!s["seed"].is_number())
                        errors.push_back("initial.seed must be a number");
                    else config.initial.seed = s["seed"].get<uint64_t>();
                }
            } else if (kind == "explicit") {
                require_known_keys(s, {"kind", "colors"}, "initial.", errors);
                config.initial.kind = InitialSpec::Kind::Explicit;
                if (!s.contains("colors") || !s["colors"].is_string())
                    errors.push_back("initial.colors must be a '+'/'-' string");
                else config.initial.colors = s["colors"].get<std::string>();
            } else {
                errors.push_back("initial.kind must be one of random|explicit");
            }
        }
    }

    if (!errors.empty()) throw ValidationError(std::move(errors));
    config.validate();
    return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file: " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return run_config_from_json(j);
}

ordered_json run_config_to_json(const RunConfig& config) {
    ordered_json j;
    j["n"] = config.n;
    j["red_count"] = config.red_count;
    j["r"] = config.r;
    j["beta"] = config.beta;
    j["eps"] = config.eps.empty() ? std::vector<double>(config.n * config.n, 0.0) : config.eps;
    ordered_json sched;
    switch (config.scheduler.family) {
        case SchedulerFamily::UniformAll:
            sched["kind"] = "uniform";
            break;
        case SchedulerFamily::Contagion:
            sched["kind"] = "contagion";
            sched["self_weight"] = config.scheduler.self_weight
                                       ? *config.scheduler.self_weight
                                       : 1.0 / (2.0 * config.n * config.n - 3.0);
            break;
        case SchedulerFamily::Custom:
            sched["kind"] = "custom";
            sched["file"] = config.scheduler.custom_file;
            break;
    }
    j["scheduler"] = sched;
    ordered_json init;
    if (config.initial.kind == InitialSpec::Kind::Random) {
        init["kind"] = "random";
        if (config.initial.seed) init["seed"] = *config.initial.seed;
    } else {
        init["kind"] = "explicit";
        init["colors"] = config.initial.colors;
    }
    j["initial"] = init;
    j["steps"] = config.steps;
    j["seed"] = config.seed;
    j["record_every"] = config.record_every;
    return j;
}

ordered_json summary_to_json(const RunSummary& summary) {
    ordered_json j;
    j["steps"] = summary.steps;
    j["mean_potential"] = summary.mean_potential;
    j["mean_bichromatic_edges"] = summary.mean_bichromatic;
    j["final_colors"] = configuration_to_string(summary.final_state.config);
    j["final_last_pair"] = pair_to_json(summary.final_state.last_pair);
    ordered_json visits = ordered_json::array();
    for (const auto& [mask, count] : summary.config_visits)
        visits.push_back(ordered_json::array({mask, count}));
    j["config_visits"] = visits;
    return j;
}

ordered_json trace_record_to_json(const TraceRecord& record) {
    ordered_json j;
    j["step"] = record.step;
    j["pair"] = pair_to_json(record.scheduled_pair);
    j["outcome"] = record.outcome == MoveKind::Swap ? "swap" : "stay";
    j["potential"] = record.potential;
    j["bichromatic_edges"] = record.bichromatic_edges;
    return j;
}

ordered_json stable_report_to_json(const StableReport& report, const StateSpace& space,
                                   double r) {
    ordered_json j;
    j["min_resistance"] = report.min_total_resistance;
    j["min_resistance_units"] = report.min_total_units;
    j["r"] = r;
    j["stable_state_count"] = report.stable_states.size();

    // Group the stable states by configuration, listing each one's pairs.
    ordered_json stable = ordered_json::array();
    std::size_t idx = 0;
    for (uint32_t mask : report.stable_config_masks) {
        ordered_json entry;
        entry["config"] =
            configuration_to_string(configuration_from_mask(space.grid, mask));
        ordered_json pairs = ordered_json::array();
        for (std::size_t s : report.stable_states) {
            auto [ci, e] = space.decompose(s);
            if (space.config_masks[ci] == mask) pairs.push_back(pair_to_json(space.pairs[e]));
        }
        entry["pair_count"] = pairs.size();
        entry["all_pairs"] = pairs.size() == space.pairs.size();
        if (pairs.size() != space.pairs.size()) entry["pairs"] = pairs;
        stable.push_back(entry);
        ++idx;
    }
    j["stable_configurations"] = stable;
    j["subset_of_max_segregated"] = report.subset_of_max_segregated;
    j["equals_max_segregated_product"] = report.equals_max_segregated_product;
    ordered_json cert;
    cert["min_bichromatic_edges"] = report.max_segregated.min_bichromatic_edges;
    cert["argmin_count"] = report.max_segregated.config_masks.size();
    j["max_segregated_certificate"] = cert;
    return j;
}

ordered_json sweep_to_json(const std::vector<BetaSweepEntry>& table, const TorusGrid& grid) {
    ordered_json rows = ordered_json::array();
    for (const auto& entry : table) {
        ordered_json row;
        row["beta"] = entry.beta;
        row["mass_on_q"] = entry.mass_on_q;
        row["residual"] = entry.residual;
        ordered_json top = ordered_json::array();
        for (const auto& [mask, p] : entry.top_configs) {
            ordered_json t;
            t["config"] = configuration_to_string(configuration_from_mask(grid, mask));
            t["mask"] = mask;
            t["probability"] = p;
            top.push_back(t);
        }
        row["top_configs"] = top;
        rows.push_back(row);
    }
    ordered_json j;
    j["rows"] = rows;
    return j;
}

std::string sweep_to_csv(const std::vector<BetaSweepEntry>& table, int top_k) {
    std::ostringstream os;
    os << "beta,mass_on_q";
    for (int k = 1; k <= top_k; ++k) os << ",config_" << k << ",p_" << k;
    os << "\n";
    os.precision(17);
    for (const auto& entry : table) {
        os << entry.beta << "," << entry.mass_on_q;
        for (int k = 0; k < top_k; ++k) {
            if (k < static_cast<int>(entry.top_configs.size()))
                os << "," << entry.top_configs[k].first << "," << entry.top_configs[k].second;
            else
                os << ",,";
        }
        os << "\n";
    }
    return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

void write_json(const std::filesystem::path& path, const ordered_json& j) {
    write_text(path, j.dump(2) + "\n");
}

void write_trace_jsonl(const std::filesystem::path& path, const std::vector<TraceRecord>& trace) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (const TraceRecord& record : trace) out << trace_record_to_json(record).dump() << "\n";
}

void write_manifest(const std::filesystem::path& out_dir, const std::string& command,
                    const ordered_json& payload) {
    ordered_json j;
    j["tool"] = kToolName;
    j["version"] = kToolVersion;
    j["command"] = command;
    for (const auto& [key, value] : payload.items()) j[key] = value;
    write_json(out_dir / "manifest.json", j);
}

void write_ppm(const std::filesystem::path& path, const TorusGrid& grid,
               const Configuration& config) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "P6\n" << grid.side() << " " << grid.side() << "\n255\n";
    for (int i = 0; i < grid.num_vertices(); ++i) {
        unsigned char rgb[3] = {0, 0, 0};
        if (config.colors[i] > 0) rgb[0] = 255;
        else rgb[2] = 255;
        out.write(reinterpret_cast<const char*>(rgb), 3);
    }
}

std::vector<double> parse_beta_list(const std::string& text) {
    std::vector<double> out;
    std::string s = text;
    if (s.rfind("geometric(", 0) == 0 && s.back() == ')') {
        std::string inner = s.substr(10, s.size() - 11);
        std::istringstream is(inner);
        double start, stop;
        long long count;
        char c1, c2;
        if (!(is >> start >> c1 >> stop >> c2 >> count) || c1 != ',' || c2 != ',' ||
            (is >> std::ws, !is.eof()))
            throw ParseError("expected geometric(start,stop,count): " + text);
        if (!(start > 0.0) || !(stop > 0.0) || count < 1)
            throw ParseError("geometric() needs positive endpoints and count >= 1");
        if (count == 1) return {start};
        double ratio = std::pow(stop / start, 1.0 / static_cast<double>(count - 1));
        for (long long i = 0; i < count; ++i) out.push_back(start * std::pow(ratio, i));
        return out;
    }
    std::istringstream is(s);
    std::string item;
    while (std::getline(is, item, ',')) {
        try {
            size_t used = 0;
            double v = std::stod(item, &used);
            while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used])))
                ++used;
            if (used != item.size()) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw ParseError("bad beta value '" + item + "' in list: " + text);
        }
    }
    if (out.empty()) throw ParseError("empty beta list: " + text);
    return out;
}

} // namespace schelling
