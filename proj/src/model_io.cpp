#include "mctsi/model_io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <queue>
#include <sstream>

#include "mctsi/errors.hpp"

namespace mctsi {

namespace {

using nlohmann::json;

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what());
    }
}

const json& require_key(const json& j, const char* key, const std::string& path) {
    if (!j.is_object()) throw ParseError(path + ": expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw ParseError(path + "/" + key + ": missing");
    return *it;
}

long long require_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw ParseError(path + ": expected an integer");
    return j.get<long long>();
}

// Accepts a JSON number or a decimal string such as "0.25".
double prob_value(const json& j, const std::string& path) {
    double v = 0.0;
    if (j.is_number()) {
        v = j.get<double>();
    } else if (j.is_string()) {
        const std::string s = j.get<std::string>();
        errno = 0;
        char* end = nullptr;
        v = std::strtod(s.c_str(), &end);
        if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) {
            throw ParseError(path + ": '" + s + "' is not a decimal number");
        }
    } else {
        throw ParseError(path + ": expected a number or a decimal string");
    }
    if (!std::isfinite(v)) throw ParseError(path + ": probability must be finite");
    if (v < 0.0) throw InvariantError(path + ": probability is negative");
    return v;
}

std::vector<double> prob_vector(const json& j, const std::string& path) {
    if (!j.is_array()) throw ParseError(path + ": expected an array");
    std::vector<double> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        out.push_back(prob_value(j[i], path + "/" + std::to_string(i)));
    }
    return out;
}

void check_sums_to_one(const std::vector<double>& v, const std::string& path) {
    NeumaierSum s;
    for (double x : v) s.add(x);
    if (std::abs(s.value() - 1.0) > 1e-12) {
        std::ostringstream msg;
        msg.precision(17);
        msg << path << ": sums to " << s.value() << " (must be 1 within 1e-12)";
        throw InvariantError(msg.str());
    }
}

}  // namespace

MctModel parse_model_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError(": model must be a JSON object");

    const long long m = require_int(require_key(j, "m", ""), "/m");
    if (m < 1) throw InvariantError("/m: vertex count must be at least 1");

    const json& jcards = require_key(j, "cards", "");
    if (!jcards.is_array()) throw ParseError("/cards: expected an array");
    if (static_cast<long long>(jcards.size()) != m) {
        throw InvariantError("/cards: expected " + std::to_string(m) + " entries");
    }
    std::vector<int> cards;
    cards.reserve(jcards.size());
    for (std::size_t i = 0; i < jcards.size(); ++i) {
        const std::string path = "/cards/" + std::to_string(i);
        const long long c = require_int(jcards[i], path);
        if (c < 1) throw InvariantError(path + ": cardinality must be at least 1");
        cards.push_back(static_cast<int>(c));
    }

    const json& jedges = require_key(j, "edges", "");
    if (!jedges.is_array()) throw ParseError("/edges: expected an array");
    if (static_cast<long long>(jedges.size()) != m - 1) {
        throw InvariantError("/edges: not a tree: expected " + std::to_string(m - 1) +
                             " edges on " + std::to_string(m) + " vertices");
    }
    std::vector<Edge> edges;
    edges.reserve(jedges.size());
    for (std::size_t i = 0; i < jedges.size(); ++i) {
        const std::string path = "/edges/" + std::to_string(i);
        const json& je = jedges[i];
        if (!je.is_array() || je.size() != 2) {
            throw ParseError(path + ": expected a pair [i, j]");
        }
        const long long a = require_int(je[0], path + "/0");
        const long long b = require_int(je[1], path + "/1");
        if (a < 1 || a > m || b < 1 || b > m) {
            throw InvariantError(path + ": endpoint outside 1.." + std::to_string(m));
        }
        if (a == b) throw InvariantError(path + ": self-loop at vertex " + std::to_string(a));
        edges.push_back(make_edge(static_cast<int>(a), static_cast<int>(b)));
    }
    Tree tree = [&] {
        try {
            return Tree(static_cast<int>(m), edges);
        } catch (const InvariantError& e) {
            throw InvariantError("/edges: not a tree: " + std::string(e.what()));
        }
    }();

    const long long root = require_int(require_key(j, "root", ""), "/root");
    if (root < 1 || root > m) {
        throw InvariantError("/root: outside 1.." + std::to_string(m));
    }

    std::vector<double> root_pmf = prob_vector(require_key(j, "root_pmf", ""), "/root_pmf");
    if (static_cast<long long>(root_pmf.size()) != cards[static_cast<std::size_t>(root - 1)]) {
        throw InvariantError("/root_pmf: expected " +
                             std::to_string(cards[static_cast<std::size_t>(root - 1)]) +
                             " entries for the root alphabet");
    }
    check_sums_to_one(root_pmf, "/root_pmf");

    // Rooted orientation, for kernel shape checks with useful paths.
    std::vector<int> parent(static_cast<std::size_t>(m) + 1, 0);
    {
        std::vector<char> seen(static_cast<std::size_t>(m) + 1, 0);
        std::queue<int> q;
        q.push(static_cast<int>(root));
        seen[static_cast<std::size_t>(root)] = 1;
        while (!q.empty()) {
            const int v = q.front();
            q.pop();
            for (int w : tree.neighbors(v)) {
                if (!seen[static_cast<std::size_t>(w)]) {
                    seen[static_cast<std::size_t>(w)] = 1;
                    parent[static_cast<std::size_t>(w)] = v;
                    q.push(w);
                }
            }
        }
    }

    const json& jkernels = require_key(j, "kernels", "");
    if (!jkernels.is_object()) throw ParseError("/kernels: expected an object");
    std::vector<Kernel> kernels(static_cast<std::size_t>(m) + 1);
    std::vector<char> have(static_cast<std::size_t>(m) + 1, 0);
    for (const auto& [key, jmat] : jkernels.items()) {
        const std::string path = "/kernels/" + key;
        long long v = 0;
        try {
            std::size_t used = 0;
            v = std::stoll(key, &used);
            if (used != key.size()) throw std::invalid_argument(key);
        } catch (const std::exception&) {
            throw ParseError(path + ": key is not a vertex id");
        }
        if (v < 1 || v > m) {
            throw InvariantError(path + ": vertex outside 1.." + std::to_string(m));
        }
        if (v == root) throw InvariantError(path + ": the root carries no kernel");
        const int rows = cards[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)]) - 1];
        const int cols = cards[static_cast<std::size_t>(v - 1)];
        if (!jmat.is_array() || static_cast<int>(jmat.size()) != rows) {
            throw InvariantError(path + ": expected " + std::to_string(rows) +
                                 " rows (parent alphabet)");
        }
        Kernel k;
        k.rows = rows;
        k.cols = cols;
        k.v.reserve(static_cast<std::size_t>(rows) * cols);
        for (int r = 0; r < rows; ++r) {
            const std::string row_path = path + "/" + std::to_string(r);
            std::vector<double> row = prob_vector(jmat[static_cast<std::size_t>(r)], row_path);
            if (static_cast<int>(row.size()) != cols) {
                throw InvariantError(row_path + ": expected " + std::to_string(cols) +
                                     " entries (vertex alphabet)");
            }
            check_sums_to_one(row, row_path);
            k.v.insert(k.v.end(), row.begin(), row.end());
        }
        kernels[static_cast<std::size_t>(v)] = std::move(k);
        have[static_cast<std::size_t>(v)] = 1;
    }
    for (long long v = 1; v <= m; ++v) {
        if (v != root && !have[static_cast<std::size_t>(v)]) {
            throw InvariantError("/kernels: missing kernel for vertex " + std::to_string(v));
        }
    }

    return MctModel(std::move(tree), static_cast<int>(root), std::move(cards),
                    std::move(root_pmf), std::move(kernels));
}

MctModel load_model(const std::string& path) {
    try {
        return parse_model_json(read_json_file(path));
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    } catch (const InvariantError& e) {
        throw InvariantError(path + ": " + e.what());
    }
}

nlohmann::json model_to_json(const MctModel& model) {
    json j;
    const int m = model.vertex_count();
    j["m"] = m;
    j["cards"] = model.cards();
    json jedges = json::array();
    for (const Edge& e : model.tree().edges()) {
        jedges.push_back(json::array({e.first, e.second}));
    }
    j["edges"] = std::move(jedges);
    j["root"] = model.root();
    j["root_pmf"] = model.root_pmf();
    json jkernels = json::object();
    for (int v = 1; v <= m; ++v) {
        if (v == model.root()) continue;
        const Kernel& k = model.kernel(v);
        json rows = json::array();
        for (int r = 0; r < k.rows; ++r) {
            json row = json::array();
            for (int c = 0; c < k.cols; ++c) {
                row.push_back(k.at(r, c));
            }
            rows.push_back(std::move(row));
        }
        jkernels[std::to_string(v)] = std::move(rows);
    }
    j["kernels"] = std::move(jkernels);
    return j;
}

void save_model(const MctModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << model_to_json(model).dump(2) << '\n';
    if (!out) throw IoError("write failed for " + path);
}

ExperimentSpec parse_experiment_json(const nlohmann::json& j, const std::string& base_dir) {
    if (!j.is_object()) throw ParseError(": experiment must be a JSON object");

    const json& jmodel = require_key(j, "model", "");
    MctModel model = [&] {
        if (jmodel.is_string()) {
            std::filesystem::path p(jmodel.get<std::string>());
            if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
            return load_model(p.string());
        }
        if (jmodel.is_object()) return parse_model_json(jmodel);
        throw ParseError("/model: expected a path string or an inline model object");
    }();

    const json& jsched = require_key(j, "schedule", "");
    if (!jsched.is_array() || jsched.empty()) {
        throw ParseError("/schedule: expected a nonempty array of budgets");
    }
    std::vector<long long> schedule;
    schedule.reserve(jsched.size());
    for (std::size_t i = 0; i < jsched.size(); ++i) {
        const std::string path = "/schedule/" + std::to_string(i);
        const long long n = require_int(jsched[i], path);
        if (n < 1) throw InvariantError(path + ": budget must be positive");
        schedule.push_back(n);
    }

    const long long trials = require_int(require_key(j, "trials", ""), "/trials");
    if (trials < 0) throw InvariantError("/trials: must be nonnegative");

    const json& jseed = require_key(j, "seed", "");
    if (!jseed.is_number_integer()) throw ParseError("/seed: expected an integer");
    const std::uint64_t seed = jseed.get<std::uint64_t>();

    SamplingMode sampling = SamplingMode::kBlocks;
    if (auto it = j.find("sampling"); it != j.end()) {
        if (!it->is_string()) throw ParseError("/sampling: expected a string");
        const std::string s = it->get<std::string>();
        if (s == "blocks") {
            sampling = SamplingMode::kBlocks;
        } else if (s == "per-edge") {
            sampling = SamplingMode::kPerEdge;
        } else {
            throw ParseError("/sampling: expected 'blocks' or 'per-edge'");
        }
    }

    return ExperimentSpec{std::move(model), std::move(schedule), trials, seed, sampling};
}

ExperimentSpec load_experiment(const std::string& path) {
    const std::string dir = std::filesystem::path(path).parent_path().string();
    try {
        return parse_experiment_json(read_json_file(path), dir);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    } catch (const InvariantError& e) {
        throw InvariantError(path + ": " + e.what());
    }
}

}  // namespace mctsi
