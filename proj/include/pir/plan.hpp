#pragma once

// Value types shared by the planner, the simulator and the verifiers:
// bit references, GF(2) query equations, the prefetch assignment and the
// complete round-structured query plan, plus their JSON wire forms.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pir/rational.hpp"

namespace pir {

class PlanError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DecodeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One bit of one message; both coordinates are 1-based.
struct BitRef {
    int message = 0;
    long index = 0;

    friend bool operator==(const BitRef&, const BitRef&) = default;
    friend auto operator<=>(const BitRef&, const BitRef&) = default;
};

/// GF(2) sum of bits, at most one per message; terms stay sorted by message.
struct Equation {
    std::vector<BitRef> terms;

    int order() const { return static_cast<int>(terms.size()); }

    bool contains_message(int message) const {
        return find_term(message) != nullptr;
    }

    const BitRef* find_term(int message) const {
        for (const BitRef& t : terms) {
            if (t.message == message) return &t;
        }
        return nullptr;
    }

    void sort_terms() {
        std::sort(terms.begin(), terms.end());
    }

    friend bool operator==(const Equation&, const Equation&) = default;
};

/// Prefetch assignment: which indices of which message were cached from
/// which database. Index sets are disjoint across databases.
struct CachePlan {
    int k = 0;
    int n = 0;
    long length = 0;
    // indices[db-1][message-1] -> sorted cached indices
    std::vector<std::vector<std::vector<long>>> indices;

    static CachePlan empty(int k, int n, long length) {
        CachePlan c;
        c.k = k;
        c.n = n;
        c.length = length;
        c.indices.assign(static_cast<size_t>(n),
                         std::vector<std::vector<long>>(static_cast<size_t>(k)));
        return c;
    }

    const std::vector<long>& of(int db, int message) const {
        return indices[static_cast<size_t>(db - 1)][static_cast<size_t>(message - 1)];
    }
    std::vector<long>& of(int db, int message) {
        return indices[static_cast<size_t>(db - 1)][static_cast<size_t>(message - 1)];
    }

    bool is_cached_at(int db, int message, long index) const {
        const auto& v = of(db, message);
        return std::binary_search(v.begin(), v.end(), index);
    }

    bool is_cached(int message, long index) const {
        for (int db = 1; db <= n; ++db) {
            if (is_cached_at(db, message, index)) return true;
        }
        return false;
    }

    /// Database that served this cached bit, or 0 if it is not cached.
    int owner(int message, long index) const {
        for (int db = 1; db <= n; ++db) {
            if (is_cached_at(db, message, index)) return db;
        }
        return 0;
    }

    long cached_count(int message) const {
        long total = 0;
        for (int db = 1; db <= n; ++db) {
            total += static_cast<long>(of(db, message).size());
        }
        return total;
    }

    std::vector<long> uncached_indices(int message) const {
        std::vector<char> cached(static_cast<size_t>(length) + 1, 0);
        for (int db = 1; db <= n; ++db) {
            for (long idx : of(db, message)) cached[static_cast<size_t>(idx)] = 1;
        }
        std::vector<long> out;
        out.reserve(static_cast<size_t>(length) - static_cast<size_t>(cached_count(message)));
        for (long i = 1; i <= length; ++i) {
            if (!cached[static_cast<size_t>(i)]) out.push_back(i);
        }
        return out;
    }
};

/// Queries of one round destined for one database.
struct RoundBlock {
    int t = 0;
    int db = 0;
    std::vector<Equation> equations;

    friend bool operator==(const RoundBlock&, const RoundBlock&) = default;
};

struct QueryPlan {
    int k = 0;
    int n = 0;
    std::optional<int> s;  // unset for memory-shared composites
    Rational r;
    int theta = 0;
    long length = 0;
    uint64_t seed = 0;  // 0 marks the canonical (unshuffled) plan
    CachePlan cache;
    std::vector<RoundBlock> rounds;

    long total_equations() const {
        long total = 0;
        for (const RoundBlock& b : rounds) total += static_cast<long>(b.equations.size());
        return total;
    }

    long equations_at(int db) const {
        long total = 0;
        for (const RoundBlock& b : rounds) {
            if (b.db == db) total += static_cast<long>(b.equations.size());
        }
        return total;
    }
};

// ---------------------------------------------------------------------------
// JSON wire format.
//
// {"params":{"k":K,"n":N,"s":S,"theta":T,"l":L,"r":"p/q"},
//  "prefetch":[{"db":n,"message":k,"indices":[...]}],
//  "rounds":[{"t":t,"db":n,"equations":[[{"m":k,"b":i},...],...]}],
//  "seed":u64}
//
// "s" is null for memory-shared composite plans; indices are 1-based.
// ---------------------------------------------------------------------------

inline nlohmann::json plan_to_json(const QueryPlan& plan) {
    nlohmann::json j;
    j["params"]["k"] = plan.k;
    j["params"]["n"] = plan.n;
    if (plan.s.has_value()) {
        j["params"]["s"] = *plan.s;
    } else {
        j["params"]["s"] = nullptr;
    }
    j["params"]["theta"] = plan.theta;
    j["params"]["l"] = plan.length;
    j["params"]["r"] = plan.r.str();
    j["prefetch"] = nlohmann::json::array();
    for (int db = 1; db <= plan.n; ++db) {
        for (int msg = 1; msg <= plan.k; ++msg) {
            nlohmann::json entry;
            entry["db"] = db;
            entry["message"] = msg;
            entry["indices"] = plan.cache.of(db, msg);
            j["prefetch"].push_back(std::move(entry));
        }
    }
    j["rounds"] = nlohmann::json::array();
    for (const RoundBlock& block : plan.rounds) {
        nlohmann::json jb;
        jb["t"] = block.t;
        jb["db"] = block.db;
        jb["equations"] = nlohmann::json::array();
        for (const Equation& eq : block.equations) {
            nlohmann::json je = nlohmann::json::array();
            for (const BitRef& term : eq.terms) {
                je.push_back({{"m", term.message}, {"b", term.index}});
            }
            jb["equations"].push_back(std::move(je));
        }
        j["rounds"].push_back(std::move(jb));
    }
    j["seed"] = plan.seed;
    return j;
}

inline QueryPlan plan_from_json(const nlohmann::json& j) {
    QueryPlan plan;
    const auto& params = j.at("params");
    plan.k = params.at("k").get<int>();
    plan.n = params.at("n").get<int>();
    if (!params.at("s").is_null()) {
        plan.s = params.at("s").get<int>();
    }
    plan.theta = params.at("theta").get<int>();
    plan.length = params.at("l").get<long>();
    plan.r = Rational::parse(params.at("r").get<std::string>());
    plan.seed = j.at("seed").get<uint64_t>();
    plan.cache = CachePlan::empty(plan.k, plan.n, plan.length);
    for (const auto& entry : j.at("prefetch")) {
        int db = entry.at("db").get<int>();
        int msg = entry.at("message").get<int>();
        auto idx = entry.at("indices").get<std::vector<long>>();
        std::sort(idx.begin(), idx.end());
        plan.cache.of(db, msg) = std::move(idx);
    }
    for (const auto& jb : j.at("rounds")) {
        RoundBlock block;
        block.t = jb.at("t").get<int>();
        block.db = jb.at("db").get<int>();
        for (const auto& je : jb.at("equations")) {
            Equation eq;
            for (const auto& jt : je) {
                eq.terms.push_back(BitRef{jt.at("m").get<int>(), jt.at("b").get<long>()});
            }
            eq.sort_terms();
            block.equations.push_back(std::move(eq));
        }
        plan.rounds.push_back(std::move(block));
    }
    return plan;
}

}  // namespace pir
