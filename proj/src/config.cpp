#include "sparsekit/config.hpp"

#include "sparsekit/errors.hpp"
#include "sparsekit/problem_io.hpp"

#include <fstream>
#include <istream>
#include <set>
#include <sstream>

namespace sparsekit {

namespace {

const std::set<std::string> kSolverKeys{"k",           "population",  "elite_ratio", "alpha",        "max_iters",
                                        "inner_iters", "outer_iters", "eps",         "eps_relative", "lambda"};
const std::set<std::string> kSweepKeys{"n",       "axis",   "values", "m",      "k",     "algorithms",
                                       "matrices", "vectors", "seed",   "signed", "import", "scale"};

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return "";
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_value(const std::string& key, const std::string& text) {
    std::istringstream in(text);
    T value{};
    if (!(in >> value) || !(in >> std::ws).eof()) {
        throw ParseError("bad value `" + text + "` for key `" + key + "`");
    }
    return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "1" || text == "true" || text == "yes") return true;
    if (text == "0" || text == "false" || text == "no") return false;
    throw ParseError("bad boolean `" + text + "` for key `" + key + "`");
}

template <typename T>
void emit(std::ostringstream& out, const std::string& key, const std::optional<T>& value) {
    if (value) {
        out << key << " = ";
        if constexpr (std::is_same_v<T, double>) {
            out << format_double(*value);
        } else if constexpr (std::is_same_v<T, bool>) {
            out << (*value ? 1 : 0);
        } else {
            out << *value;
        }
        out << '\n';
    }
}

}  // namespace

KeyValues parse_key_values(std::istream& in) {
    KeyValues kv;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const std::string text = trim(line);
        if (text.empty() || text.front() == '#') {
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos) {
            throw ParseError("line " + std::to_string(number) + ": expected key = value");
        }
        const std::string key = trim(text.substr(0, eq));
        if (key.empty()) {
            throw ParseError("line " + std::to_string(number) + ": empty key");
        }
        kv[key] = trim(text.substr(eq + 1));
    }
    return kv;
}

KeyValues load_key_values(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    return parse_key_values(in);
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> values;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        values.push_back(parse_value<int>("list", trim(item)));
    }
    if (values.empty()) {
        throw ParseError("empty list");
    }
    return values;
}

void apply_solver_keys(SolverOverrides& o, const KeyValues& kv, const std::string& prefix) {
    auto get = [&](const char* name) -> const std::string* {
        const auto it = kv.find(prefix + name);
        return it == kv.end() ? nullptr : &it->second;
    };
    if (auto v = get("k")) o.k = parse_value<int>("k", *v);
    if (auto v = get("population")) o.population = parse_value<int>("population", *v);
    if (auto v = get("elite_ratio")) o.elite_ratio = parse_value<double>("elite_ratio", *v);
    if (auto v = get("alpha")) o.alpha = parse_value<double>("alpha", *v);
    if (auto v = get("max_iters")) o.max_iters = parse_value<int>("max_iters", *v);
    if (auto v = get("inner_iters")) o.inner_iters = parse_value<int>("inner_iters", *v);
    if (auto v = get("outer_iters")) o.outer_iters = parse_value<int>("outer_iters", *v);
    if (auto v = get("eps")) o.eps = parse_value<double>("eps", *v);
    if (auto v = get("eps_relative")) o.eps_relative = parse_bool("eps_relative", *v);
    if (auto v = get("lambda")) o.lambda = parse_value<double>("lambda", *v);
}

SweepConfig sweep_config_from(const KeyValues& kv) {
    for (const auto& [key, value] : kv) {
        const auto dot = key.find('.');
        if (dot == std::string::npos) {
            if (!kSweepKeys.contains(key) && !kSolverKeys.contains(key)) {
                throw ParseError("unknown key `" + key + "`");
            }
            continue;
        }
        try {
            parse_algorithm(key.substr(0, dot));
        } catch (const InvalidArgument&) {
            throw ParseError("unknown algorithm prefix in key `" + key + "`");
        }
        if (!kSolverKeys.contains(key.substr(dot + 1))) {
            throw ParseError("unknown solver key `" + key + "`");
        }
    }

    SweepConfig cfg;
    auto get = [&](const char* name) -> const std::string* {
        const auto it = kv.find(name);
        return it == kv.end() ? nullptr : &it->second;
    };
    if (auto v = get("n")) cfg.n = parse_value<int>("n", *v);
    if (auto v = get("axis")) {
        if (*v == "m") cfg.axis = SweepAxis::m;
        else if (*v == "k") cfg.axis = SweepAxis::k;
        else throw ParseError("axis must be m or k");
    }
    if (cfg.axis == SweepAxis::k) {
        cfg.values = {4, 8, 16, 24, 32};
        cfg.fixed = 1024;
    }
    if (auto v = get("values")) cfg.values = parse_int_list(*v);
    if (cfg.axis == SweepAxis::m) {
        if (auto v = get("k")) cfg.fixed = parse_value<int>("k", *v);
    } else {
        if (auto v = get("m")) cfg.fixed = parse_value<int>("m", *v);
    }
    if (auto v = get("algorithms")) {
        cfg.algorithms.clear();
        std::stringstream stream(*v);
        std::string item;
        while (std::getline(stream, item, ',')) {
            try {
                cfg.algorithms.push_back(parse_algorithm(trim(item)));
            } catch (const InvalidArgument& e) {
                throw ParseError(e.what());
            }
        }
    }
    if (auto v = get("matrices")) cfg.matrices_per_point = parse_value<int>("matrices", *v);
    if (auto v = get("vectors")) cfg.vectors_per_matrix = parse_value<int>("vectors", *v);
    if (auto v = get("seed")) cfg.base_seed = parse_value<std::uint64_t>("seed", *v);
    if (auto v = get("signed")) cfg.signed_values = parse_bool("signed", *v);

    // Bare `k` is the sweep's fixed K, not a solver override.
    KeyValues bare = kv;
    bare.erase("k");
    apply_solver_keys(cfg.common, bare);
    for (Algorithm a : {Algorithm::mp, Algorithm::omp, Algorithm::sp, Algorithm::ce, Algorithm::sce}) {
        SolverOverrides o;
        apply_solver_keys(o, kv, std::string(algorithm_name(a)) + ".");
        cfg.per_algorithm[a] = o;
    }
    try {
        cfg.validate();
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what());
    }
    return cfg;
}

std::string describe(const SolverOverrides& o, const std::string& prefix) {
    std::ostringstream out;
    emit(out, prefix + "k", o.k);
    emit(out, prefix + "population", o.population);
    emit(out, prefix + "elite_ratio", o.elite_ratio);
    emit(out, prefix + "alpha", o.alpha);
    emit(out, prefix + "max_iters", o.max_iters);
    emit(out, prefix + "inner_iters", o.inner_iters);
    emit(out, prefix + "outer_iters", o.outer_iters);
    emit(out, prefix + "eps", o.eps);
    emit(out, prefix + "eps_relative", o.eps_relative);
    emit(out, prefix + "lambda", o.lambda);
    return out.str();
}

std::string describe(const SweepConfig& cfg) {
    std::ostringstream out;
    out << "n = " << cfg.n << '\n' << "axis = " << axis_name(cfg.axis) << '\n' << "values = ";
    for (std::size_t i = 0; i < cfg.values.size(); ++i) {
        out << (i ? "," : "") << cfg.values[i];
    }
    out << '\n' << (cfg.axis == SweepAxis::m ? "k = " : "m = ") << cfg.fixed << '\n' << "algorithms = ";
    for (std::size_t i = 0; i < cfg.algorithms.size(); ++i) {
        out << (i ? "," : "") << algorithm_name(cfg.algorithms[i]);
    }
    out << '\n'
        << "matrices = " << cfg.matrices_per_point << '\n'
        << "vectors = " << cfg.vectors_per_matrix << '\n'
        << "seed = " << cfg.base_seed << '\n'
        << "signed = " << (cfg.signed_values ? 1 : 0) << '\n';

    // Resolved per-algorithm parameters, defaults included.
    for (Algorithm a : cfg.algorithms) {
        const std::string prefix = std::string(algorithm_name(a)) + ".";
        const SolverOverrides o = cfg.overrides_for(a);
        SolverOverrides resolved;
        switch (a) {
            case Algorithm::mp:
            case Algorithm::omp:
            case Algorithm::sp: {
                const PursuitConfig p = pursuit_config(cfg.k_at(0), o);
                resolved.max_iters = p.max_iters;
                resolved.eps = p.residual_tol;
                break;
            }
            case Algorithm::ce: {
                const CEConfig c = ce_config(cfg.k_at(0), o);
                resolved.population = c.population;
                resolved.elite_ratio = c.elite_ratio;
                resolved.alpha = c.step_size;
                resolved.max_iters = c.max_iters;
                resolved.eps = c.stop_eps;
                resolved.eps_relative = c.eps_relative;
                resolved.lambda = c.lambda;
                break;
            }
            case Algorithm::sce: {
                const SCEConfig s = sce_config(cfg.k_at(0), o);
                resolved.population = s.inner.population;
                resolved.elite_ratio = s.inner.elite_ratio;
                resolved.alpha = s.inner.step_size;
                resolved.inner_iters = s.inner.max_iters;
                resolved.outer_iters = s.outer_iters;
                resolved.eps = s.inner.stop_eps;
                resolved.eps_relative = s.inner.eps_relative;
                resolved.lambda = s.inner.lambda;
                break;
            }
        }
        resolved.k = o.k;
        out << describe(resolved, prefix);
    }
    return out.str();
}

}  // namespace sparsekit
