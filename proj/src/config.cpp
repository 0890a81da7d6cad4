#include "subsim/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include "subsim/errors.hpp"
#include "subsim/model.hpp"

namespace subsim {

using nlohmann::json;

namespace {

template <typename T>
T get_field(const json& doc, const std::string& key, const std::string& path) {
    try {
        return doc.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(path, "wrong type (" + std::string(doc.at(key).type_name()) + ")");
    }
}

std::size_t get_count(const json& doc, const std::string& key, const std::string& path) {
    const json& v = doc.at(key);
    if (!v.is_number_integer() && !(v.is_number_float() && std::floor(v.get<double>()) == v.get<double>())) {
        throw ConfigError(path, "expected a non-negative integer");
    }
    if (v.is_number_integer() && v.get<std::int64_t>() < 0) throw ConfigError(path, "must not be negative");
    if (v.is_number_float() && v.get<double>() < 0.0) throw ConfigError(path, "must not be negative");
    return v.is_number_float() ? static_cast<std::size_t>(v.get<double>()) : v.get<std::size_t>();
}

void reject_unknown(const json& doc, const std::set<std::string>& known, const std::string& prefix) {
    for (const auto& [key, _] : doc.items()) {
        if (!known.contains(key)) throw ConfigError(prefix + key, "unknown key");
    }
}

void apply_model(ModelConfig& model, const json& doc) {
    if (!doc.is_object()) throw ConfigError("model", "expected an object");
    if (doc.contains("correlation") || doc.contains("dependent_inputs")) {
        throw ConfigError("model.correlation",
                          "dependent inputs are not supported; only independent marginals can be standardized");
    }
    reject_unknown(doc, {"name", "dim"}, "model.");
    if (doc.contains("name")) model.name = get_field<std::string>(doc, "name", "model.name");
    if (doc.contains("dim")) model.dim = get_count(doc, "dim", "model.dim");
}

void apply_proposal(ProposalSpec& proposal, const json& doc) {
    if (!doc.is_object()) throw ConfigError("proposal", "expected an object");
    reject_unknown(doc, {"kind", "spread"}, "proposal.");
    if (doc.contains("kind")) {
        const auto kind = get_field<std::string>(doc, "kind", "proposal.kind");
        if (kind == "gaussian") {
            proposal.kind = ProposalKind::gaussian;
        } else if (kind == "uniform") {
            proposal.kind = ProposalKind::uniform;
        } else {
            throw ConfigError("proposal.kind", "expected \"gaussian\" or \"uniform\", got \"" + kind + "\"");
        }
    }
    if (doc.contains("spread")) {
        const json& s = doc.at("spread");
        if (s.is_number()) {
            proposal.spread = {s.get<double>()};
        } else if (s.is_array() && !s.empty()) {
            proposal.spread = get_field<std::vector<double>>(doc, "spread", "proposal.spread");
        } else {
            throw ConfigError("proposal.spread", "expected a number or a non-empty array");
        }
    }
}

void apply_sweep(SweepConfig& sweep, const json& doc) {
    if (!doc.is_object()) throw ConfigError("sweep", "expected an object");
    reject_unknown(doc, {"y_min", "y_max", "points"}, "sweep.");
    if (doc.contains("y_min")) sweep.y_min = get_field<double>(doc, "y_min", "sweep.y_min");
    if (doc.contains("y_max")) sweep.y_max = get_field<double>(doc, "y_max", "sweep.y_max");
    if (doc.contains("points")) sweep.points = get_count(doc, "points", "sweep.points");
}

std::string describe_p(const RunConfig& c) {
    std::ostringstream s;
    s << "got n=" << c.ss.samples_per_level << ", p=" << c.ss.level_probability;
    return s.str();
}

}  // namespace

std::string_view to_string(Command c) noexcept {
    switch (c) {
        case Command::estimate: return "estimate";
        case Command::sweep: return "sweep";
        case Command::trace: return "trace";
        case Command::selftest: return "selftest";
    }
    return "estimate";
}

std::string_view to_string(Method m) noexcept {
    switch (m) {
        case Method::ss: return "ss";
        case Method::dmc: return "dmc";
        case Method::both: return "both";
    }
    return "ss";
}

std::optional<Command> parse_command(std::string_view s) noexcept {
    for (auto c : {Command::estimate, Command::sweep, Command::trace, Command::selftest}) {
        if (to_string(c) == s) return c;
    }
    return std::nullopt;
}

std::optional<Method> parse_method(std::string_view s) noexcept {
    for (auto m : {Method::ss, Method::dmc, Method::both}) {
        if (to_string(m) == s) return m;
    }
    return std::nullopt;
}

void apply_config(RunConfig& c, const json& doc) {
    if (!doc.is_object()) throw ConfigError("", "configuration must be a JSON object");
    reject_unknown(doc,
                   {"command", "model", "y_star", "p_target", "method", "level_probability", "samples_per_level",
                    "proposal", "adapt", "max_levels", "keep_samples", "replicates", "dmc_samples", "seed",
                    "output_dir", "quick", "sweep"},
                   "");

    if (doc.contains("command")) {
        const auto s = get_field<std::string>(doc, "command", "command");
        auto cmd = parse_command(s);
        if (!cmd) throw ConfigError("command", "unknown command \"" + s + "\"");
        c.command = *cmd;
    }
    if (doc.contains("model")) apply_model(c.model, doc.at("model"));
    if (doc.contains("y_star")) c.y_star = get_field<double>(doc, "y_star", "y_star");
    if (doc.contains("p_target")) c.p_target = get_field<double>(doc, "p_target", "p_target");
    if (doc.contains("method")) {
        const auto s = get_field<std::string>(doc, "method", "method");
        auto m = parse_method(s);
        if (!m) throw ConfigError("method", "expected ss, dmc or both, got \"" + s + "\"");
        c.method = *m;
    }
    if (doc.contains("level_probability")) {
        c.ss.level_probability = get_field<double>(doc, "level_probability", "level_probability");
    }
    if (doc.contains("samples_per_level")) {
        c.ss.samples_per_level = get_count(doc, "samples_per_level", "samples_per_level");
    }
    if (doc.contains("proposal")) apply_proposal(c.ss.proposal, doc.at("proposal"));
    if (doc.contains("adapt")) c.ss.adapt = get_field<bool>(doc, "adapt", "adapt");
    if (doc.contains("max_levels")) c.ss.max_levels = get_count(doc, "max_levels", "max_levels");
    if (doc.contains("keep_samples")) c.ss.keep_samples = get_field<bool>(doc, "keep_samples", "keep_samples");
    if (doc.contains("replicates")) c.replicates = get_count(doc, "replicates", "replicates");
    if (doc.contains("dmc_samples")) c.dmc_samples = get_count(doc, "dmc_samples", "dmc_samples");
    if (doc.contains("seed")) c.seed = get_field<std::uint64_t>(doc, "seed", "seed");
    if (doc.contains("output_dir")) c.output_dir = get_field<std::string>(doc, "output_dir", "output_dir");
    if (doc.contains("quick")) c.quick = get_field<bool>(doc, "quick", "quick");
    if (doc.contains("sweep")) apply_sweep(c.sweep, doc.at("sweep"));
}

RunConfig parse_config(std::string_view text) {
    json doc;
    // Keys seen so far in each open object, innermost last.
    std::vector<std::set<std::string>> open_objects;
    const json::parser_callback_t reject_duplicates = [&](int, json::parse_event_t event, json& parsed) {
        if (event == json::parse_event_t::object_start) {
            open_objects.emplace_back();
        } else if (event == json::parse_event_t::object_end) {
            open_objects.pop_back();
        } else if (event == json::parse_event_t::key) {
            const auto key = parsed.get<std::string>();
            if (!open_objects.back().insert(key).second) throw ConfigError(key, "duplicate key");
        }
        return true;
    };
    try {
        doc = json::parse(text.begin(), text.end(), reject_duplicates);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("parse error: ") + e.what());
    }
    RunConfig c;
    apply_config(c, doc);
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open configuration file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return parse_config(buf.str());
    } catch (const ConfigError& e) {
        throw ConfigError(e.field(), std::string(e.what()) + " [" + path + "]");
    }
}

void RunConfig::validate() const {
    if (model.name != "linear_sum") throw ConfigError("model.name", "unknown model \"" + model.name + "\"");
    if (model.dim == 0) throw ConfigError("model.dim", "must be at least 1");

    const bool needs_threshold = command == Command::estimate || command == Command::trace;
    if (y_star && p_target) throw ConfigError("y_star", "y_star and p_target are mutually exclusive; give one");
    if (needs_threshold && !y_star && !p_target) throw ConfigError("y_star", "one of y_star or p_target is required");
    if (y_star && !std::isfinite(*y_star)) throw ConfigError("y_star", "must be finite");
    if (p_target && !(*p_target > 0.0 && *p_target < 1.0)) throw ConfigError("p_target", "must lie in (0, 1)");

    const double p = ss.level_probability;
    if (!(p > 0.0 && p < 1.0)) throw ConfigError("level_probability", "must lie in (0, 1); " + describe_p(*this));
    const double np = static_cast<double>(ss.samples_per_level) * p;
    const bool np_ok = std::abs(np - std::round(np)) <= 1e-9 * std::max(1.0, np);
    const double inv = 1.0 / p;
    const bool inv_ok = std::abs(inv - std::round(inv)) <= 1e-9 * inv;
    if (!np_ok && !inv_ok) throw ConfigError("level_probability", "n*p and 1/p must be integers; " + describe_p(*this));
    if (!np_ok) throw ConfigError("samples_per_level", "n*p must be an integer; " + describe_p(*this));
    if (!inv_ok) throw ConfigError("level_probability", "1/p must be an integer; " + describe_p(*this));
    if (std::round(np) < 1.0 || std::round(np) >= static_cast<double>(ss.samples_per_level)) {
        throw ConfigError("samples_per_level", "need 1 <= n*p < n; " + describe_p(*this));
    }
    if (ss.max_levels < 1) throw ConfigError("max_levels", "must be at least 1");
    try {
        ss.proposal.validate(model.dim);
    } catch (const DomainError& e) {
        throw ConfigError("proposal.spread", e.what());
    }
    if (replicates && *replicates == 0) throw ConfigError("replicates", "must be at least 1");
    if (dmc_samples && *dmc_samples == 0) throw ConfigError("dmc_samples", "must be at least 1");
    if (command == Command::sweep) {
        if (sweep.points == 0) throw ConfigError("sweep.points", "must be at least 1");
        if (!(sweep.y_min <= sweep.y_max)) throw ConfigError("sweep.y_min", "must not exceed sweep.y_max");
    }
    if (output_dir.empty()) throw ConfigError("output_dir", "must not be empty");
}

double RunConfig::critical_threshold() const {
    if (y_star) return *y_star;
    if (p_target) return threshold_for_probability(model.dim, *p_target);
    throw ConfigError("y_star", "one of y_star or p_target is required");
}

std::size_t RunConfig::effective_replicates() const {
    if (replicates) return *replicates;
    if (command == Command::sweep) return quick ? kQuickReplicates : kDefaultSweepReplicates;
    return 1;
}

SsConfig RunConfig::ss_config() const {
    SsConfig out = ss;
    out.seed = seed;
    return out;
}

json to_json(const RunConfig& c) {
    json proposal = {{"kind", c.ss.proposal.kind == ProposalKind::gaussian ? "gaussian" : "uniform"}};
    if (c.ss.proposal.spread.size() == 1) {
        proposal["spread"] = c.ss.proposal.spread.front();
    } else {
        proposal["spread"] = c.ss.proposal.spread;
    }
    json doc = {
        {"command", to_string(c.command)},
        {"model", {{"name", c.model.name}, {"dim", c.model.dim}}},
        {"method", to_string(c.method)},
        {"level_probability", c.ss.level_probability},
        {"samples_per_level", c.ss.samples_per_level},
        {"proposal", proposal},
        {"adapt", c.ss.adapt},
        {"max_levels", c.ss.max_levels},
        {"keep_samples", c.ss.keep_samples},
        {"replicates", c.effective_replicates()},
        {"seed", c.seed},
        {"output_dir", c.output_dir},
        {"quick", c.quick},
        {"sweep", {{"y_min", c.sweep.y_min}, {"y_max", c.sweep.y_max}, {"points", c.sweep.points}}},
    };
    if (c.y_star) doc["y_star"] = *c.y_star;
    if (c.p_target) doc["p_target"] = *c.p_target;
    if (c.dmc_samples) doc["dmc_samples"] = *c.dmc_samples;
    return doc;
}

}  // namespace subsim
