#include "debias/harness.hpp"

#include "debias/baselines.hpp"
#include "debias/rng.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace debias {

namespace {

void reject_unknown(const Json& j, const std::set<std::string>& allowed, const std::string& what) {
    if (!j.is_object()) throw std::invalid_argument(what + ": expected a JSON object");
    for (const auto& [key, _] : j.items())
        if (!allowed.count(key)) throw std::invalid_argument(what + ": unknown field '" + key + "'");
}

double get_number(const Json& j, const char* key, const std::string& what) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_number()) throw std::invalid_argument(what + ": '" + key + "' must be a number");
    return it->get<double>();
}

std::int64_t get_integer(const Json& j, const char* key, const std::string& what) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_number_integer())
        throw std::invalid_argument(what + ": '" + key + "' must be an integer");
    return it->get<std::int64_t>();
}

std::optional<double> opt_number(const Json& j, const char* key, const std::string& what) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return get_number(j, key, what);
}

}  // namespace

ExperimentConfig config_from_json(const Json& j, const std::filesystem::path& base_dir) {
    const std::string what = "config";
    reject_unknown(j, {"instance", "algorithm", "T", "delta", "reps", "seed", "checkpoints", "noise_std", "workers"},
                   what);
    ExperimentConfig c;
    c.base_dir = base_dir;
    if (!j.contains("instance")) throw std::invalid_argument("config: missing 'instance'");
    c.instance = j.at("instance");
    if (!c.instance.is_object() && !c.instance.is_string())
        throw std::invalid_argument("config: 'instance' must be an object or a file path");
    if (j.contains("algorithm")) {
        if (!j.at("algorithm").is_string()) throw std::invalid_argument("config: 'algorithm' must be a string");
        c.algorithm = j.at("algorithm").get<std::string>();
    }
    if (!is_policy(c.algorithm)) throw std::invalid_argument("config: unknown algorithm '" + c.algorithm + "'");
    c.horizon = get_integer(j, "T", what);
    if (c.horizon < 1) throw std::invalid_argument("config: T must be at least 1");
    if (j.contains("delta")) {
        const Json& d = j.at("delta");
        if (d.is_string()) {
            if (d.get<std::string>() != "1/T") throw std::invalid_argument("config: 'delta' must be a number or \"1/T\"");
        } else {
            c.delta = get_number(j, "delta", what);
            if (!(*c.delta > 0.0 && *c.delta < 1.0)) throw std::invalid_argument("config: delta must lie in (0, 1)");
        }
    }
    if (j.contains("reps")) c.reps = static_cast<int>(get_integer(j, "reps", what));
    if (c.reps < 1) throw std::invalid_argument("config: reps must be at least 1");
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned()) throw std::invalid_argument("config: 'seed' must be a nonnegative integer");
        c.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("checkpoints")) {
        if (j.at("checkpoints") != "pow2") throw std::invalid_argument("config: only \"pow2\" checkpoints are supported");
    }
    if (j.contains("noise_std")) c.noise_std = get_number(j, "noise_std", what);
    if (!(c.noise_std >= 0.0) || !std::isfinite(c.noise_std))
        throw std::invalid_argument("config: noise_std must be nonnegative");
    if (j.contains("workers")) c.workers = static_cast<int>(get_integer(j, "workers", what));
    if (c.workers < 1) throw std::invalid_argument("config: workers must be at least 1");
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    return config_from_json(read_json_file(path), path.parent_path());
}

Json config_to_json(const ExperimentConfig& c) {
    Json j;
    j["instance"] = c.instance;
    j["algorithm"] = c.algorithm;
    j["T"] = c.horizon;
    j["delta"] = c.delta ? Json(*c.delta) : Json("1/T");
    j["reps"] = c.reps;
    j["seed"] = c.seed;
    j["checkpoints"] = c.checkpoints;
    j["noise_std"] = c.noise_std;
    j["workers"] = c.workers;
    return j;
}

std::uint64_t config_hash(const ExperimentConfig& c) {
    Json j = config_to_json(c);
    j.erase("workers");
    // nlohmann::json keeps keys sorted, which makes the dump canonical.
    const std::string canonical = nlohmann::json::parse(j.dump()).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : canonical) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

ProblemInstance resolve_instance(const Json& spec_in, std::int64_t horizon, const std::filesystem::path& base_dir) {
    Json spec = spec_in;
    if (spec.is_string()) spec = read_json_file(base_dir / spec.get<std::string>());
    const std::string what = "instance";
    if (!spec.is_object()) throw std::invalid_argument("instance: expected an object");
    if (spec.contains("family")) {
        const std::string family = spec.at("family").get<std::string>();
        if (family == "worst-case") {
            reject_unknown(spec, {"family", "kappa", "d", "T", "alt"}, what);
            const std::int64_t t = spec.contains("T") ? get_integer(spec, "T", what) : horizon;
            const int alt = spec.contains("alt") ? static_cast<int>(get_integer(spec, "alt", what)) : 1;
            if (alt != 1 && alt != 2) throw std::invalid_argument("instance: worst-case alt must be 1 or 2");
            auto pair = worst_case_instance(get_number(spec, "kappa", what),
                                            static_cast<std::size_t>(get_integer(spec, "d", what)), t);
            return alt == 1 ? pair.first : pair.second;
        }
        if (family == "gap") {
            reject_unknown(spec, {"family", "kappa", "d", "delta_min", "delta_neq", "alt"}, what);
            const int alt = spec.contains("alt") ? static_cast<int>(get_integer(spec, "alt", what)) : 1;
            return gap_instance(get_number(spec, "kappa", what), static_cast<std::size_t>(get_integer(spec, "d", what)),
                                get_number(spec, "delta_min", what), get_number(spec, "delta_neq", what), alt);
        }
        if (family == "small-d") {
            reject_unknown(spec, {"family", "kappa", "d", "case", "delta_min", "delta_neq"}, what);
            return small_d_gap_instance(static_cast<std::size_t>(get_integer(spec, "d", what)),
                                        static_cast<int>(get_integer(spec, "case", what)),
                                        get_number(spec, "kappa", what), opt_number(spec, "delta_min", what),
                                        opt_number(spec, "delta_neq", what));
        }
        throw std::invalid_argument("instance: unknown family '" + family + "'");
    }
    reject_unknown(spec, {"actions", "parameter"}, what);
    auto load = [&](const char* key) {
        if (!spec.contains(key)) throw std::invalid_argument(std::string("instance: missing '") + key + "'");
        const Json& v = spec.at(key);
        return v.is_string() ? read_json_file(base_dir / v.get<std::string>()) : v;
    };
    ProblemInstance p;
    p.actions = action_set_from_json(load("actions"));
    p.theta = parameter_from_json(load("parameter"));
    p.meta.family = "file";
    p.meta.d = p.actions.d;
    if (p.theta.gamma.size() != p.actions.d)
        throw std::invalid_argument("instance: parameter dimension does not match the action set");
    require_valid(p.actions);
    return p;
}

Aggregate aggregate(std::vector<std::pair<int, Vector>> rows) {
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    Aggregate g;
    if (rows.empty()) return g;
    const std::size_t m = rows.front().second.size();
    const double n = static_cast<double>(rows.size());
    g.mean.assign(m, 0.0);
    g.sd.assign(m, 0.0);
    for (const auto& [_, r] : rows) {
        if (r.size() != m) throw std::invalid_argument("aggregate: ragged rows");
        for (std::size_t c = 0; c < m; ++c) g.mean[c] += r[c];
    }
    for (double& v : g.mean) v /= n;
    if (rows.size() > 1) {
        for (const auto& [_, r] : rows)
            for (std::size_t c = 0; c < m; ++c) g.sd[c] += (r[c] - g.mean[c]) * (r[c] - g.mean[c]);
        for (double& v : g.sd) v = std::sqrt(v / (n - 1.0));
    }
    g.ci_low.resize(m);
    g.ci_high.resize(m);
    for (std::size_t c = 0; c < m; ++c) {
        const double half = 1.96 * g.sd[c] / std::sqrt(n);
        g.ci_low[c] = g.mean[c] - half;
        g.ci_high[c] = g.mean[c] + half;
    }
    return g;
}

SimulationResult simulate(const ExperimentConfig& cfg) {
    return simulate(cfg, resolve_instance(cfg.instance, cfg.horizon, cfg.base_dir));
}

SimulationResult simulate(const ExperimentConfig& cfg, const ProblemInstance& instance) {
    if (cfg.reps < 1 || cfg.horizon < 1) throw std::invalid_argument("simulate: reps and T must be positive");
    if (!is_policy(cfg.algorithm)) throw std::invalid_argument("simulate: unknown algorithm '" + cfg.algorithm + "'");
    SimulationResult out;
    out.config = cfg;
    out.config_hash = config_hash(cfg);
    out.checkpoints = pow2_checkpoints(cfg.horizon);
    out.runs.resize(static_cast<std::size_t>(cfg.reps));

    RunOptions opt;
    opt.horizon = cfg.horizon;
    opt.delta = cfg.delta;

    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        while (true) {
            const int rep = next.fetch_add(1);
            if (rep >= cfg.reps) return;
            try {
                const std::uint64_t seed = replication_seed(cfg.seed, static_cast<std::uint64_t>(rep));
                Environment env(instance.actions, instance.theta, cfg.noise_std, seed);
                RunResult r = run_policy(cfg.algorithm, env, opt);
                r.seed = seed;
                out.runs[static_cast<std::size_t>(rep)] = std::move(r);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(cfg.reps);
            }
        }
    };
    const int nthreads = std::max(1, std::min(cfg.workers, cfg.reps));
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    std::vector<std::pair<int, Vector>> rows;
    for (int rep = 0; rep < cfg.reps; ++rep) rows.emplace_back(rep, out.runs[static_cast<std::size_t>(rep)].cum_regret);
    out.stats = aggregate(std::move(rows));
    return out;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw std::invalid_argument("not a number: '" + std::string(s) + "'");
    return v;
}

std::string regret_csv(const SimulationResult& r) {
    std::string out = "rep,checkpoint,cum_regret\n";
    for (std::size_t rep = 0; rep < r.runs.size(); ++rep) {
        const RunResult& run = r.runs[rep];
        for (std::size_t c = 0; c < run.checkpoints.size(); ++c) {
            out += std::to_string(rep);
            out += ',';
            out += std::to_string(run.checkpoints[c]);
            out += ',';
            out += format_double(run.cum_regret[c]);
            out += '\n';
        }
    }
    return out;
}

void write_regret_csv(const std::filesystem::path& path, const SimulationResult& r) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << regret_csv(r);
    if (!out) throw std::runtime_error("error writing " + path.string());
}

std::vector<RegretRow> parse_regret_csv(std::string_view text) {
    std::vector<RegretRow> rows;
    std::size_t pos = 0;
    bool header = true;
    std::size_t line_no = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        if (header) {
            if (line != "rep,checkpoint,cum_regret")
                throw std::invalid_argument("regret CSV: expected header rep,checkpoint,cum_regret");
            header = false;
            continue;
        }
        const std::size_t c1 = line.find(',');
        const std::size_t c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
        if (c2 == std::string_view::npos)
            throw std::invalid_argument("regret CSV: malformed line " + std::to_string(line_no));
        RegretRow row;
        const std::string_view f0 = line.substr(0, c1);
        const std::string_view f1 = line.substr(c1 + 1, c2 - c1 - 1);
        auto r0 = std::from_chars(f0.data(), f0.data() + f0.size(), row.rep);
        auto r1 = std::from_chars(f1.data(), f1.data() + f1.size(), row.checkpoint);
        if (r0.ec != std::errc() || r0.ptr != f0.data() + f0.size() || r1.ec != std::errc() ||
            r1.ptr != f1.data() + f1.size())
            throw std::invalid_argument("regret CSV: malformed line " + std::to_string(line_no));
        row.cum_regret = parse_double(line.substr(c2 + 1));
        rows.push_back(row);
    }
    if (header) throw std::invalid_argument("regret CSV: missing header");
    return rows;
}

std::vector<RegretRow> read_regret_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_regret_csv(ss.str());
}

std::vector<std::pair<std::int64_t, double>> mean_by_checkpoint(std::span<const RegretRow> rows) {
    // Sum per checkpoint in replication order.
    std::vector<RegretRow> sorted(rows.begin(), rows.end());
    std::stable_sort(sorted.begin(), sorted.end(), [](const RegretRow& a, const RegretRow& b) {
        return a.checkpoint != b.checkpoint ? a.checkpoint < b.checkpoint : a.rep < b.rep;
    });
    std::vector<std::pair<std::int64_t, double>> out;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        double sum = 0.0;
        while (j < sorted.size() && sorted[j].checkpoint == sorted[i].checkpoint) sum += sorted[j++].cum_regret;
        out.emplace_back(sorted[i].checkpoint, sum / static_cast<double>(j - i));
        i = j;
    }
    return out;
}

void write_simulation(const SimulationResult& r, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_regret_csv(dir / "regret.csv", r);
    Json s;
    s["config"] = config_to_json(r.config);
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(r.config_hash));
    s["config_hash"] = hash;
    s["rng"] = kRngAlgorithm;
    s["reps"] = r.runs.size();
    s["checkpoints"] = r.checkpoints;
    s["mean"] = r.stats.mean;
    s["sd"] = r.stats.sd;
    s["ci_low"] = r.stats.ci_low;
    s["ci_high"] = r.stats.ci_high;
    Json runs = Json::array();
    for (const RunResult& run : r.runs) runs.push_back(to_json(run));
    s["runs"] = std::move(runs);
    write_json_file(dir / "summary.json", s);
}

SlopeFit fit_slope(std::span<const double> t, std::span<const double> r) {
    if (t.size() != r.size()) throw std::invalid_argument("fit_slope: length mismatch");
    if (t.size() < 3) throw std::invalid_argument("fit_slope: need at least 3 points");
    const std::size_t n = t.size();
    Vector x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(t[i] > 0.0) || !(r[i] > 0.0)) throw std::invalid_argument("fit_slope: values must be positive");
        x[i] = std::log(t[i]);
        y[i] = std::log(r[i]);
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_slope: all abscissae are equal");
    SlopeFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return f;
}

Comparison compare(const std::vector<ExperimentConfig>& cfgs) {
    if (cfgs.empty()) throw std::invalid_argument("compare: no configs");
    const ExperimentConfig& first = cfgs.front();
    const ProblemInstance instance = resolve_instance(first.instance, first.horizon, first.base_dir);
    Comparison out;
    std::map<std::string, int> seen;
    for (const ExperimentConfig& c : cfgs) {
        if (c.horizon != first.horizon || c.reps != first.reps || c.noise_std != first.noise_std)
            throw std::invalid_argument("compare: configs differ in T, reps or noise_std");
        const ProblemInstance other = resolve_instance(c.instance, c.horizon, c.base_dir);
        if (to_json(other.actions) != to_json(instance.actions) || to_json(other.theta) != to_json(instance.theta))
            throw std::invalid_argument("compare: configs use different instances");
        ExperimentConfig paired = c;
        paired.seed = first.seed;
        const SimulationResult r = simulate(paired, instance);
        const int k = seen[c.algorithm]++;
        out.names.push_back(k == 0 ? c.algorithm : c.algorithm + "#" + std::to_string(k + 1));
        out.checkpoints = r.checkpoints;
        out.mean.push_back(r.stats.mean);
    }
    return out;
}

std::string comparison_csv(const Comparison& c) {
    std::string out = "checkpoint";
    for (const std::string& n : c.names) out += "," + n;
    out += '\n';
    for (std::size_t i = 0; i < c.checkpoints.size(); ++i) {
        out += std::to_string(c.checkpoints[i]);
        for (const Vector& col : c.mean) out += "," + format_double(col[i]);
        out += '\n';
    }
    return out;
}

}  // namespace debias
