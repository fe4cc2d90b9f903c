#include "escna/system.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace escna::model {

namespace {

constexpr int kSmallDim = 15;

double ipow(double base, int n) {
    double r = 1.0;
    double b = base;
    for (int e = n; e > 0; e >>= 1) {
        if (e & 1) r *= b;
        if (e > 1) b *= b;
    }
    return r;
}

void check_channel_dims(const std::vector<PolyChannel>& channels, int dim, const char* which) {
    std::set<int> seen;
    for (const auto& ch : channels) {
        if (ch.power_index < 0)
            throw ConfigError(std::string(which) + " channel power index must be nonnegative");
        if (!seen.insert(ch.power_index).second)
            throw ConfigError(std::string("duplicate ") + which + " channel power index " +
                              std::to_string(ch.power_index));
        if (static_cast<int>(ch.g.size()) != dim)
            throw ConfigError(std::string(which) + " channel expression count does not match dim");
    }
}

} // namespace

NonAffineSystem::NonAffineSystem(int dim, std::string name, std::vector<expr::ExprPtr> drift,
                                 std::vector<PolyChannel> odd, std::vector<PolyChannel> even,
                                 double eps, std::vector<NonlinearChannel> nonlinear,
                                 std::optional<expr::ExprPtr> output, double blowup_cutoff)
    : dim_(dim),
      name_(std::move(name)),
      drift_(std::move(drift)),
      odd_(std::move(odd)),
      even_(std::move(even)),
      eps_(eps),
      nonlinear_(std::move(nonlinear)),
      output_(std::move(output)),
      blowup_cutoff_(blowup_cutoff),
      vars_(expr::VariableSet::state_time(dim)) {
    if (dim_ < 1) throw ConfigError("system dim must be at least 1");
    if (static_cast<int>(drift_.size()) != dim_)
        throw ConfigError("drift expression count does not match dim");
    check_channel_dims(odd_, dim_, "odd");
    check_channel_dims(even_, dim_, "even");
    for (const auto& ch : nonlinear_)
        if (static_cast<int>(ch.g.size()) != dim_)
            throw ConfigError("nonlinear channel expression count does not match dim");
    if (!(blowup_cutoff_ > 0.0)) throw ConfigError("blowup cutoff must be positive");
}

const expr::ExprPtr& NonAffineSystem::output_map() const {
    if (!output_) throw ConfigError("system '" + name_ + "' has no output map");
    return *output_;
}

int NonAffineSystem::max_odd_index() const {
    if (odd_.empty())
        throw ConfigError("system '" + name_ + "' has no odd polynomial channels");
    int best = 0;
    for (const auto& ch : odd_) best = std::max(best, ch.power_index);
    return best;
}

int NonAffineSystem::max_even_index() const {
    if (even_.empty()) throw ConfigError("system '" + name_ + "' has no even channels");
    int best = 0;
    for (const auto& ch : even_) best = std::max(best, ch.power_index);
    return best;
}

void NonAffineSystem::eval_slots(double t, std::span<const double> x,
                                 std::span<double> slots) const {
    slots[0] = t;
    for (int i = 0; i < dim_; ++i) slots[static_cast<std::size_t>(i) + 1] = x[static_cast<std::size_t>(i)];
}

void NonAffineSystem::rhs(double t, std::span<const double> x, double u,
                          std::span<double> out) const {
    double small[kSmallDim + 1];
    std::vector<double> big;
    std::span<double> slots;
    if (dim_ <= kSmallDim) {
        slots = std::span<double>(small, static_cast<std::size_t>(dim_) + 1);
    } else {
        big.resize(static_cast<std::size_t>(dim_) + 1);
        slots = big;
    }
    eval_slots(t, x, slots);

    for (int i = 0; i < dim_; ++i)
        out[static_cast<std::size_t>(i)] = expr::eval_expr(*drift_[static_cast<std::size_t>(i)], slots);
    for (const auto& ch : odd_) {
        const double up = ipow(u, 2 * ch.power_index) * u;
        for (int i = 0; i < dim_; ++i)
            out[static_cast<std::size_t>(i)] +=
                expr::eval_expr(*ch.g[static_cast<std::size_t>(i)], slots) * up;
    }
    if (eps_ != 0.0) {
        for (const auto& ch : even_) {
            const double up = eps_ * ipow(u, 2 * ch.power_index);
            for (int i = 0; i < dim_; ++i)
                out[static_cast<std::size_t>(i)] +=
                    expr::eval_expr(*ch.g[static_cast<std::size_t>(i)], slots) * up;
        }
    }
    for (const auto& ch : nonlinear_) {
        const double hu = ch.h(u);
        for (int i = 0; i < dim_; ++i)
            out[static_cast<std::size_t>(i)] +=
                expr::eval_expr(*ch.g[static_cast<std::size_t>(i)], slots) * hu;
    }
}

void NonAffineSystem::drift_at(double t, std::span<const double> x, std::span<double> out) const {
    double small[kSmallDim + 1];
    std::vector<double> big;
    std::span<double> slots;
    if (dim_ <= kSmallDim) {
        slots = std::span<double>(small, static_cast<std::size_t>(dim_) + 1);
    } else {
        big.resize(static_cast<std::size_t>(dim_) + 1);
        slots = big;
    }
    eval_slots(t, x, slots);
    for (int i = 0; i < dim_; ++i)
        out[static_cast<std::size_t>(i)] = expr::eval_expr(*drift_[static_cast<std::size_t>(i)], slots);
}

double NonAffineSystem::output(double t, std::span<const double> x) const {
    double small[kSmallDim + 1];
    std::vector<double> big;
    std::span<double> slots;
    if (dim_ <= kSmallDim) {
        slots = std::span<double>(small, static_cast<std::size_t>(dim_) + 1);
    } else {
        big.resize(static_cast<std::size_t>(dim_) + 1);
        slots = big;
    }
    eval_slots(t, x, slots);
    return expr::eval_expr(*output_map(), slots);
}

// ---------------------------------------------------------------------------
// JSON loading
// ---------------------------------------------------------------------------

namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& message) {
    throw ConfigError("system config: " + message);
}

const json& require_key(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) schema_error(std::string("missing required key '") + key + "'");
    return *it;
}

int require_int(const json& v, const char* what) {
    if (!v.is_number_integer()) schema_error(std::string(what) + " must be an integer");
    return v.get<int>();
}

double require_number(const json& v, const char* what) {
    if (!v.is_number()) schema_error(std::string(what) + " must be a number");
    return v.get<double>();
}

std::string require_string(const json& v, const char* what) {
    if (!v.is_string()) schema_error(std::string(what) + " must be a string");
    return v.get<std::string>();
}

expr::ExprPtr parse_in_context(const std::string& source, const expr::VariableSet& vars,
                               const std::string& where) {
    try {
        return expr::parse_expr(source, vars);
    } catch (const ParseError& e) {
        throw ConfigError("system config: " + where + ": " + e.what());
    }
}

std::vector<expr::ExprPtr> parse_expr_array(const json& arr, int dim,
                                            const expr::VariableSet& vars,
                                            const std::string& where) {
    if (!arr.is_array()) schema_error(where + " must be an array of expression strings");
    if (static_cast<int>(arr.size()) != dim)
        schema_error(where + " must have exactly " + std::to_string(dim) + " entries");
    std::vector<expr::ExprPtr> out;
    out.reserve(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i)
        out.push_back(parse_in_context(require_string(arr[i], (where + " entry").c_str()), vars,
                                       where + "[" + std::to_string(i) + "]"));
    return out;
}

std::vector<PolyChannel> parse_channels(const json& arr, int dim, const expr::VariableSet& vars,
                                        const std::string& where) {
    if (!arr.is_array()) schema_error(where + " must be an array");
    std::vector<PolyChannel> out;
    out.reserve(arr.size());
    for (const auto& item : arr) {
        if (!item.is_object()) schema_error(where + " entries must be objects");
        for (const auto& [key, value] : item.items()) {
            (void)value;
            if (key != "power_index" && key != "exprs")
                schema_error(where + ": unknown key '" + key + "'");
        }
        PolyChannel ch;
        ch.power_index = require_int(require_key(item, "power_index"), "power_index");
        ch.g = parse_expr_array(require_key(item, "exprs"), dim, vars, where + ".exprs");
        out.push_back(std::move(ch));
    }
    return out;
}

} // namespace

NonAffineSystem load_system(const json& config) {
    if (!config.is_object()) schema_error("top level must be an object");
    static const std::set<std::string> known{"name",          "dim",    "drift",
                                            "odd_channels",  "even_channels", "output",
                                            "blowup_cutoff"};
    for (const auto& [key, value] : config.items()) {
        (void)value;
        if (!known.count(key)) schema_error("unknown key '" + key + "'");
    }

    const int dim = require_int(require_key(config, "dim"), "dim");
    if (dim < 1) schema_error("dim must be at least 1");
    const expr::VariableSet vars = expr::VariableSet::state_time(dim);

    std::string name = "config";
    if (auto it = config.find("name"); it != config.end()) name = require_string(*it, "name");

    std::vector<expr::ExprPtr> drift =
        parse_expr_array(require_key(config, "drift"), dim, vars, "drift");

    std::vector<PolyChannel> odd;
    if (auto it = config.find("odd_channels"); it != config.end())
        odd = parse_channels(*it, dim, vars, "odd_channels");

    std::vector<PolyChannel> even;
    double eps = 0.0;
    if (auto it = config.find("even_channels"); it != config.end()) {
        if (!it->is_object()) schema_error("even_channels must be an object");
        for (const auto& [key, value] : it->items()) {
            (void)value;
            if (key != "strength" && key != "items")
                schema_error("even_channels: unknown key '" + key + "'");
        }
        eps = require_number(require_key(*it, "strength"), "even_channels.strength");
        even = parse_channels(require_key(*it, "items"), dim, vars, "even_channels.items");
    }

    std::optional<expr::ExprPtr> output;
    if (auto it = config.find("output"); it != config.end())
        output = parse_in_context(require_string(*it, "output"), vars, "output");

    double cutoff = kDefaultBlowupCutoff;
    if (auto it = config.find("blowup_cutoff"); it != config.end())
        cutoff = require_number(*it, "blowup_cutoff");

    return NonAffineSystem(dim, std::move(name), std::move(drift), std::move(odd),
                           std::move(even), eps, {}, std::move(output), cutoff);
}

NonAffineSystem load_system_from_string(const std::string& text) {
    json config;
    try {
        config = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("system config: invalid JSON: ") + e.what());
    }
    return load_system(config);
}

NonAffineSystem load_system_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open system config '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return load_system_from_string(buffer.str());
}

// ---------------------------------------------------------------------------
// Builtins
// ---------------------------------------------------------------------------

namespace {

NonAffineSystem make_example1() {
    const expr::VariableSet vars = expr::VariableSet::state_time(1);
    std::vector<expr::ExprPtr> drift{expr::parse_expr("0.5*cos(2*t)*x1^2", vars)};
    NonlinearChannel channel{{expr::parse_expr("2*cos(20*t)", vars)},
                             ScalarNonlinearity::deadzone()};
    return NonAffineSystem(1, "example1", std::move(drift), {}, {}, 0.0, {std::move(channel)},
                           std::nullopt);
}

NonAffineSystem make_example1_approx() {
    return load_system_from_string(R"js({
      "name": "example1_approx",
      "dim": 1,
      "drift": ["0.5*cos(2*t)*x1^2"],
      "odd_channels": [
        {"power_index": 0, "exprs": ["0.1*cos(20*t)"]},
        {"power_index": 1, "exprs": ["0.5*cos(20*t)"]}
      ]
    })js");
}

NonAffineSystem make_uu(double eps) {
    json config = json::parse(R"({
      "name": "uu",
      "dim": 1,
      "drift": ["x1"],
      "odd_channels": [
        {"power_index": 0, "exprs": ["0.1"]},
        {"power_index": 1, "exprs": ["0.1"]},
        {"power_index": 2, "exprs": ["0.1"]}
      ],
      "even_channels": {
        "strength": 0.0,
        "items": [
          {"power_index": 1, "exprs": ["1"]},
          {"power_index": 2, "exprs": ["1"]}
        ]
      }
    })");
    config["even_channels"]["strength"] = eps;
    return load_system(config);
}

NonAffineSystem make_evenpow(double eps) {
    json config = json::parse(R"({
      "name": "evenpow",
      "dim": 1,
      "drift": ["0"],
      "odd_channels": [
        {"power_index": 0, "exprs": ["0.1"]},
        {"power_index": 1, "exprs": ["0.1"]}
      ],
      "even_channels": {
        "strength": 0.0,
        "items": [
          {"power_index": 2, "exprs": ["1"]}
        ]
      }
    })");
    config["even_channels"]["strength"] = eps;
    return load_system(config);
}

NonAffineSystem make_nonlfinal(double eps) {
    const expr::VariableSet vars = expr::VariableSet::state_time(1);
    std::vector<expr::ExprPtr> drift{expr::parse_expr("x1", vars)};
    NonlinearChannel channel{{expr::parse_expr("1", vars)},
                             ScalarNonlinearity::deadzone_plus_even(eps)};
    return NonAffineSystem(1, "nonlfinal", std::move(drift), {}, {}, 0.0, {std::move(channel)},
                           std::nullopt);
}

} // namespace

std::vector<std::string> builtin_names() {
    return {"example1", "example1_approx", "uu", "evenpow", "nonlfinal"};
}

bool is_builtin(std::string_view name) {
    for (const auto& candidate : builtin_names())
        if (candidate == name) return true;
    return false;
}

NonAffineSystem builtin(std::string_view name, double eps) {
    if (name == "uu") return make_uu(eps);
    if (name == "evenpow") return make_evenpow(eps);
    if (name == "nonlfinal") return make_nonlfinal(eps);
    if (name == "example1" || name == "example1_approx") {
        if (eps != 0.0)
            throw ConfigError("builtin '" + std::string(name) + "' does not take an eps parameter");
        return name == "example1" ? make_example1() : make_example1_approx();
    }
    throw ConfigError("unknown builtin '" + std::string(name) + "'");
}

} // namespace escna::model
