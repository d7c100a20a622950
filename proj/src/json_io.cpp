#include "debias/json_io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>
#include <string>

namespace debias {

namespace {

void reject_unknown(const Json& j, const std::set<std::string>& allowed, const char* what) {
    if (!j.is_object()) throw std::invalid_argument(std::string(what) + ": expected a JSON object");
    for (const auto& [key, _] : j.items())
        if (!allowed.count(key)) throw std::invalid_argument(std::string(what) + ": unknown field '" + key + "'");
}

const Json& field(const Json& j, const char* name, const char* what) {
    auto it = j.find(name);
    if (it == j.end()) throw std::invalid_argument(std::string(what) + ": missing field '" + name + "'");
    return *it;
}

double number(const Json& j, const char* what) {
    if (!j.is_number()) throw std::invalid_argument(std::string(what) + ": expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + ": non-finite number");
    return v;
}

Vector numbers(const Json& j, const char* what) {
    if (!j.is_array()) throw std::invalid_argument(std::string(what) + ": expected an array");
    Vector v;
    for (const Json& e : j) v.push_back(number(e, what));
    return v;
}

}  // namespace

ActionSet action_set_from_json(const Json& j) {
    reject_unknown(j, {"d", "actions"}, "action set");
    const Json& d = field(j, "d", "action set");
    if (!d.is_number_integer() || d.get<long long>() < 1)
        throw std::invalid_argument("action set: 'd' must be a positive integer");
    ActionSet a;
    a.d = d.get<std::size_t>();
    const Json& acts = field(j, "actions", "action set");
    if (!acts.is_array()) throw std::invalid_argument("action set: 'actions' must be an array");
    for (const Json& e : acts) {
        reject_unknown(e, {"x", "z"}, "action");
        Action act;
        act.x = numbers(field(e, "x", "action"), "action x");
        const Json& z = field(e, "z", "action");
        if (!z.is_number_integer() || (z.get<int>() != 1 && z.get<int>() != -1))
            throw std::invalid_argument("action: 'z' must be -1 or +1");
        act.z = z.get<int>();
        a.actions.push_back(std::move(act));
    }
    return a;
}

Json to_json(const ActionSet& a) {
    Json j;
    j["d"] = a.d;
    Json acts = Json::array();
    for (const Action& act : a.actions) acts.push_back(Json{{"x", act.x}, {"z", act.z}});
    j["actions"] = std::move(acts);
    return j;
}

Parameter parameter_from_json(const Json& j) {
    reject_unknown(j, {"gamma", "omega"}, "parameter");
    Parameter p;
    p.gamma = numbers(field(j, "gamma", "parameter"), "parameter gamma");
    p.omega = number(field(j, "omega", "parameter"), "parameter omega");
    return p;
}

Json to_json(const Parameter& p) { return Json{{"gamma", p.gamma}, {"omega", p.omega}}; }

Json to_json(const RunResult& r) {
    Json j;
    j["checkpoints"] = r.checkpoints;
    j["cum_regret"] = r.cum_regret;
    Json phases = Json::array();
    for (const PhaseRecord& p : r.phases) {
        Json ph;
        ph["l"] = p.l;
        ph["eps"] = p.eps;
        ph["rounds_g_pos"] = p.rounds_g_pos;
        ph["rounds_g_neg"] = p.rounds_g_neg;
        ph["rounds_delta"] = p.rounds_delta;
        ph["kappa_hat"] = p.kappa_hat ? Json(*p.kappa_hat) : Json(nullptr);
        ph["z_hat"] = p.z_hat;
        phases.push_back(std::move(ph));
    }
    j["phases"] = std::move(phases);
    j["recovery_entered_at"] = r.recovery_entered_at ? Json(*r.recovery_entered_at) : Json(nullptr);
    j["seed"] = r.seed;
    return j;
}

Json to_json(const InstanceMeta& m) {
    Json j;
    j["family"] = m.family;
    j["kappa"] = m.kappa;
    j["d"] = m.d;
    j["alternative"] = m.alternative;
    auto opt = [&](const char* key, const auto& v) { j[key] = v ? Json(*v) : Json(nullptr); };
    opt("delta_min", m.delta_min);
    opt("delta_neq", m.delta_neq);
    opt("T", m.horizon);
    opt("rho", m.rho);
    opt("case", m.small_d_case);
    return j;
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw std::invalid_argument(path.string() + ": " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("error writing " + path.string());
}

}  // namespace debias
