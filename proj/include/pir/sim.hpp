#pragma once

// Two-phase session execution against simulated database nodes: prefetch
// delivery, GF(2) query answering, user-side decoding and download
// metering. Decoding works from the plan alone (no hidden bookkeeping):
// a desired-bearing equation is cancelled either against cached bits or
// against the undesired equation with the same side-information terms,
// so shuffled and relabeled plans decode identically.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "pir/params.hpp"
#include "pir/plan.hpp"
#include "pir/planner.hpp"
#include "pir/rng.hpp"

namespace pir::sim {

class MessageStore {
public:
    static MessageStore random(int k, long length, uint64_t seed) {
        MessageStore store;
        store.k_ = k;
        store.length_ = length;
        store.bits_.assign(static_cast<size_t>(k), {});
        Rng rng(seed);
        uint64_t word = 0;
        int left = 0;
        for (auto& msg : store.bits_) {
            msg.resize(static_cast<size_t>(length));
            for (auto& b : msg) {
                if (left == 0) {
                    word = rng();
                    left = 64;
                }
                b = static_cast<uint8_t>(word & 1u);
                word >>= 1u;
                --left;
            }
        }
        return store;
    }

    int messages() const { return k_; }
    long length() const { return length_; }

    uint8_t bit(int message, long index) const {
        if (message < 1 || message > k_ || index < 1 || index > length_) {
            throw std::out_of_range("MessageStore: bit reference out of range");
        }
        return bits_[static_cast<size_t>(message - 1)][static_cast<size_t>(index - 1)];
    }

    const std::vector<uint8_t>& message(int msg) const {
        return bits_[static_cast<size_t>(msg - 1)];
    }

private:
    int k_ = 0;
    long length_ = 0;
    std::vector<std::vector<uint8_t>> bits_;
};

/// One database node: a replica reference plus knowledge of the cache
/// indices it served itself (and nothing about the other databases').
struct DatabaseNode {
    int id = 0;
    const MessageStore* replica = nullptr;
    std::vector<std::vector<long>> known_cache_indices;  // per message
};

inline std::vector<DatabaseNode> make_nodes(const MessageStore& store, const CachePlan& cache) {
    std::vector<DatabaseNode> nodes(static_cast<size_t>(cache.n));
    for (int db = 1; db <= cache.n; ++db) {
        DatabaseNode& node = nodes[static_cast<size_t>(db - 1)];
        node.id = db;
        node.replica = &store;
        node.known_cache_indices.reserve(static_cast<size_t>(cache.k));
        for (int msg = 1; msg <= cache.k; ++msg) {
            node.known_cache_indices.push_back(cache.of(db, msg));
        }
    }
    return nodes;
}

/// Answers one query list: the GF(2) sum of the referenced bits, one
/// answer bit per equation, in query order.
inline std::vector<uint8_t> answer(const DatabaseNode& node, const std::vector<Equation>& queries) {
    std::vector<uint8_t> out;
    out.reserve(queries.size());
    for (const Equation& eq : queries) {
        if (eq.terms.empty()) {
            throw std::invalid_argument("answer: empty equation");
        }
        uint8_t bit = 0;
        int last_message = 0;
        for (const BitRef& term : eq.terms) {
            if (term.message == last_message) {
                throw std::invalid_argument("answer: duplicate message in equation");
            }
            last_message = term.message;
            bit ^= node.replica->bit(term.message, term.index);
        }
        out.push_back(bit);
    }
    return out;
}

/// User-side cache: exact bit values at the prefetched indices.
class UserCache {
public:
    UserCache(int k, long length) : values_(static_cast<size_t>(k)), length_(length) {}

    void put(int message, long index, uint8_t value) {
        values_[static_cast<size_t>(message - 1)][index] = value;
    }
    bool has(int message, long index) const {
        const auto& m = values_[static_cast<size_t>(message - 1)];
        return m.find(index) != m.end();
    }
    uint8_t value(int message, long index) const {
        const auto& m = values_[static_cast<size_t>(message - 1)];
        auto it = m.find(index);
        if (it == m.end()) {
            throw std::out_of_range("UserCache: bit not cached");
        }
        return it->second;
    }
    long size() const {
        long total = 0;
        for (const auto& m : values_) total += static_cast<long>(m.size());
        return total;
    }
    long length() const { return length_; }

private:
    std::vector<std::unordered_map<long, uint8_t>> values_;
    long length_ = 0;
};

/// Prefetch phase: copy the planned indices out of the store.
inline UserCache prefetch(const MessageStore& store, const CachePlan& cache) {
    if (cache.length != store.length()) {
        throw std::invalid_argument("prefetch: cache plan length does not match store");
    }
    UserCache user(cache.k, cache.length);
    for (int db = 1; db <= cache.n; ++db) {
        for (int msg = 1; msg <= cache.k; ++msg) {
            for (long idx : cache.of(db, msg)) {
                user.put(msg, idx, store.bit(msg, idx));
            }
        }
    }
    return user;
}

namespace detail {

inline std::string terms_key(const std::vector<BitRef>& terms) {
    std::string key;
    for (const BitRef& t : terms) {
        key += std::to_string(t.message);
        key += ':';
        key += std::to_string(t.index);
        key += ',';
    }
    return key;
}

}  // namespace detail

/// Reconstructs all L bits of the target message from cached bits and the
/// answer bits (answers[i] aligned with plan.rounds[i].equations). Throws
/// DecodeError if any desired bit cannot be resolved exactly once.
inline std::vector<uint8_t> decode(const UserCache& user, const QueryPlan& plan,
                                   const std::vector<std::vector<uint8_t>>& answers) {
    if (answers.size() != plan.rounds.size()) {
        throw DecodeError("decode: answer blocks do not match plan rounds");
    }
    for (size_t i = 0; i < answers.size(); ++i) {
        if (answers[i].size() != plan.rounds[i].equations.size()) {
            throw DecodeError("decode: answer length mismatch in round block");
        }
    }

    // Values of undesired equations, keyed by their exact term set.
    std::unordered_map<std::string, uint8_t> side_values;
    for (size_t i = 0; i < plan.rounds.size(); ++i) {
        const RoundBlock& block = plan.rounds[i];
        for (size_t j = 0; j < block.equations.size(); ++j) {
            const Equation& eq = block.equations[j];
            if (!eq.contains_message(plan.theta)) {
                side_values[detail::terms_key(eq.terms)] = answers[i][j];
            }
        }
    }

    std::vector<int8_t> bits(static_cast<size_t>(plan.length) + 1, -1);
    long resolved = 0;
    auto assign = [&](long index, uint8_t value) {
        int8_t& slot = bits[static_cast<size_t>(index)];
        if (slot != -1) {
            throw DecodeError("decode: desired bit resolved twice");
        }
        slot = static_cast<int8_t>(value);
        ++resolved;
    };

    for (int db = 1; db <= plan.n; ++db) {
        for (long idx : plan.cache.of(db, plan.theta)) {
            assign(idx, user.value(plan.theta, idx));
        }
    }

    for (size_t i = 0; i < plan.rounds.size(); ++i) {
        const RoundBlock& block = plan.rounds[i];
        for (size_t j = 0; j < block.equations.size(); ++j) {
            const Equation& eq = block.equations[j];
            const BitRef* target = eq.find_term(plan.theta);
            if (target == nullptr) continue;
            uint8_t value = answers[i][j];
            std::vector<BitRef> side;
            side.reserve(eq.terms.size() - 1);
            for (const BitRef& t : eq.terms) {
                if (t.message != plan.theta) side.push_back(t);
            }
            bool all_cached = true;
            for (const BitRef& t : side) {
                if (!user.has(t.message, t.index)) {
                    all_cached = false;
                    break;
                }
            }
            if (all_cached) {
                for (const BitRef& t : side) value ^= user.value(t.message, t.index);
            } else {
                auto it = side_values.find(detail::terms_key(side));
                if (it == side_values.end()) {
                    throw DecodeError("decode: unresolvable desired bit (no side information)");
                }
                value ^= it->second;
            }
            assign(target->index, value);
        }
    }

    if (resolved != plan.length) {
        throw DecodeError("decode: " + std::to_string(plan.length - resolved) +
                          " desired bits unresolved");
    }
    std::vector<uint8_t> out(static_cast<size_t>(plan.length));
    for (long i = 1; i <= plan.length; ++i) {
        out[static_cast<size_t>(i - 1)] = static_cast<uint8_t>(bits[static_cast<size_t>(i)]);
    }
    return out;
}

struct SessionReport {
    int k = 0;
    int n = 0;
    std::optional<int> s;
    Rational r;
    int theta = 0;
    uint64_t seed = 0;
    long downloaded = 0;
    Rational cost;
    bool decode_ok = false;
    std::vector<long> per_db;
};

/// Executes answer/decode for an already-built plan against a store.
inline SessionReport run_planned_session(const QueryPlan& plan, const MessageStore& store,
                                         uint64_t seed = 0) {
    SessionReport report;
    report.k = plan.k;
    report.n = plan.n;
    report.s = plan.s;
    report.r = plan.r;
    report.theta = plan.theta;
    report.seed = seed;
    report.per_db.assign(static_cast<size_t>(plan.n), 0);

    auto nodes = make_nodes(store, plan.cache);
    UserCache user = prefetch(store, plan.cache);

    std::vector<std::vector<uint8_t>> answers;
    answers.reserve(plan.rounds.size());
    for (const RoundBlock& block : plan.rounds) {
        answers.push_back(answer(nodes[static_cast<size_t>(block.db - 1)], block.equations));
        long bits = static_cast<long>(answers.back().size());
        report.downloaded += bits;
        report.per_db[static_cast<size_t>(block.db - 1)] += bits;
    }
    report.cost = Rational(Bigint(report.downloaded), Bigint(plan.length));

    try {
        std::vector<uint8_t> decoded = decode(user, plan, answers);
        report.decode_ok = decoded == store.message(plan.theta);
    } catch (const DecodeError&) {
        report.decode_ok = false;
    }
    return report;
}

/// Full seeded session: random store, seeded plan, execution, metering.
inline SessionReport run_session(const PirParams& params, int theta, uint64_t seed) {
    QueryPlan plan = planner::plan_for_params(params, theta, derive_seed(seed, 0x51));
    MessageStore store = MessageStore::random(params.k, plan.length, derive_seed(seed, 0x52));
    return run_planned_session(plan, store, seed);
}

// SessionReport wire form:
// {"k":,"n":,"s":,"r":"p/q","theta":,"seed":,"downloaded":,"cost":"p/q",
//  "decode_ok":,"per_db":[...]}
inline nlohmann::json report_to_json(const SessionReport& r) {
    nlohmann::json j;
    j["k"] = r.k;
    j["n"] = r.n;
    if (r.s.has_value()) {
        j["s"] = *r.s;
    } else {
        j["s"] = nullptr;
    }
    j["r"] = r.r.str();
    j["theta"] = r.theta;
    j["seed"] = r.seed;
    j["downloaded"] = r.downloaded;
    j["cost"] = r.cost.str();
    j["decode_ok"] = r.decode_ok;
    j["per_db"] = r.per_db;
    return j;
}

inline SessionReport report_from_json(const nlohmann::json& j) {
    SessionReport r;
    r.k = j.at("k").get<int>();
    r.n = j.at("n").get<int>();
    if (!j.at("s").is_null()) r.s = j.at("s").get<int>();
    r.r = Rational::parse(j.at("r").get<std::string>());
    r.theta = j.at("theta").get<int>();
    r.seed = j.at("seed").get<uint64_t>();
    r.downloaded = j.at("downloaded").get<long>();
    r.cost = Rational::parse(j.at("cost").get<std::string>());
    r.decode_ok = j.at("decode_ok").get<bool>();
    r.per_db = j.at("per_db").get<std::vector<long>>();
    return r;
}

}  // namespace pir::sim
