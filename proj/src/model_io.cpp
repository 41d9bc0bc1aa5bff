#include "gwlife/model_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "gwlife/errors.hpp"

namespace gwlife {

namespace {

using nlohmann::json;

const json& field(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ModelError(where + ": missing field \"" + key + "\"");
    return *it;
}

double number(const json& obj, const char* key, const std::string& where) {
    const json& v = field(obj, key, where);
    if (!v.is_number()) throw ModelError(where + ": \"" + key + "\" must be a number");
    return v.get<double>();
}

std::vector<double> number_array(const json& obj, const char* key, const std::string& where) {
    const json& v = field(obj, key, where);
    if (!v.is_array()) throw ModelError(where + ": \"" + key + "\" must be an array");
    std::vector<double> out;
    out.reserve(v.size());
    for (const json& x : v) {
        if (!x.is_number()) throw ModelError(where + ": \"" + key + "\" must contain numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

std::string kind_of(const json& obj, const std::string& where) {
    if (!obj.is_object()) throw ModelError(where + " must be an object");
    const json& k = field(obj, "kind", where);
    if (!k.is_string()) throw ModelError(where + ": \"kind\" must be a string");
    return k.get<std::string>();
}

// NaN marks a mean to be resolved against the lifetime law.
constexpr double kCritical = std::numeric_limits<double>::quiet_NaN();

double offspring_mean(const json& obj, const std::string& where) {
    const json& v = field(obj, "mean", where);
    if (v.is_string() && v.get<std::string>() == "critical") return kCritical;
    if (!v.is_number()) throw ModelError(where + ": \"mean\" must be a number or \"critical\"");
    return v.get<double>();
}

OffspringSpec parse_offspring(const json& obj) {
    const std::string where = "offspring";
    const std::string kind = kind_of(obj, where);
    if (kind == "pmf") return offspring::Pmf{number_array(obj, "p", where)};
    if (kind == "geometric") return offspring::Geometric{offspring_mean(obj, where)};
    if (kind == "poisson") return offspring::Poisson{offspring_mean(obj, where)};
    if (kind == "point") {
        const json& j = field(obj, "j", where);
        if (!j.is_number_integer()) throw ModelError(where + ": \"j\" must be an integer");
        return offspring::Point{j.get<std::int64_t>()};
    }
    throw ModelError(where + ": unknown kind \"" + kind + "\"");
}

LifetimeSpec parse_lifetime(const json& obj) {
    const std::string where = "lifetime";
    const std::string kind = kind_of(obj, where);
    if (kind == "pmf") return lifetime::Pmf{number_array(obj, "h", where)};
    if (kind == "geometric") return lifetime::Geometric{number(obj, "mean", where)};
    if (kind == "power_tilt") return lifetime::PowerTilt{number(obj, "a", where), number(obj, "b", where)};
    throw ModelError(where + ": unknown kind \"" + kind + "\"");
}

} // namespace

ModelSpec parse_model_spec(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ModelError("model spec must be a JSON object");
    for (const auto& [key, _] : doc.items()) {
        if (key != "offspring" && key != "lifetime") throw ModelError("unknown top-level key \"" + key + "\"");
    }
    return ModelSpec{parse_offspring(field(doc, "offspring", "model spec")),
                     parse_lifetime(field(doc, "lifetime", "model spec"))};
}

ModelSpec parse_model_spec(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ModelError(std::string("malformed JSON: ") + e.what());
    }
    return parse_model_spec(doc);
}

ModelSpec load_model_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ModelError("cannot read spec file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model_spec(std::string_view(buf.str()));
}

Model build_model(const ModelSpec& spec) {
    LifetimeModel life = make_lifetime(spec.lifetime);
    OffspringSpec off = spec.offspring;
    std::visit(
        [&](auto& s) {
            if constexpr (requires { s.mean; }) {
                if (std::isnan(s.mean)) s.mean = 1.0 / life.mean();
            }
        },
        off);
    return Model{make_offspring(off), std::move(life)};
}

nlohmann::ordered_json to_json(const ModelSpec& spec) {
    nlohmann::ordered_json out;
    auto mean_value = [](double m) -> nlohmann::ordered_json {
        if (std::isnan(m)) return "critical";
        return m;
    };
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            nlohmann::ordered_json o;
            if constexpr (std::is_same_v<T, offspring::Pmf>) {
                o["kind"] = "pmf";
                o["p"] = s.p;
            } else if constexpr (std::is_same_v<T, offspring::Geometric>) {
                o["kind"] = "geometric";
                o["mean"] = mean_value(s.mean);
            } else if constexpr (std::is_same_v<T, offspring::Poisson>) {
                o["kind"] = "poisson";
                o["mean"] = mean_value(s.mean);
            } else {
                o["kind"] = "point";
                o["j"] = s.j;
            }
            out["offspring"] = std::move(o);
        },
        spec.offspring);
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            nlohmann::ordered_json o;
            if constexpr (std::is_same_v<T, lifetime::Pmf>) {
                o["kind"] = "pmf";
                o["h"] = s.h;
            } else if constexpr (std::is_same_v<T, lifetime::Geometric>) {
                o["kind"] = "geometric";
                o["mean"] = s.mean;
            } else {
                o["kind"] = "power_tilt";
                o["a"] = s.a;
                o["b"] = s.b;
            }
            out["lifetime"] = std::move(o);
        },
        spec.lifetime);
    return out;
}

} // namespace gwlife
