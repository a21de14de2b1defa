#pragma once

// Deterministic construction of prefetch assignments and round-structured
// GF(2) query plans.
//
// Canonical plans are fully deterministic: cached indices are the leading
// block of each message (database-major), fresh bits are allocated in
// ascending index order, rounds are processed in increasing t, databases in
// increasing order, message subsets lexicographically, and in the first
// retrieval round all cached side-information bits of one equation come
// from a single source database. Seeded plans draw the prefetch choice,
// a per-message bit relabeling and the per-block query order from the seed;
// randomize() never changes the canonical structure, only labels and order.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pir/bounds.hpp"
#include "pir/combinatorics.hpp"
#include "pir/params.hpp"
#include "pir/plan.hpp"
#include "pir/rng.hpp"

namespace pir::planner {

namespace detail {

constexpr long kMaxPlanLength = 1L << 24;  // refuse absurd memory-share blowups

inline long to_plan_length(const Bigint& value, const char* what) {
    if (value > kMaxPlanLength) {
        throw PlanError(std::string(what) + ": plan would need message length " +
                        value.str() + " bits");
    }
    return value.convert_to<long>();
}

struct FreshPool {
    std::vector<long> pool;  // ascending
    size_t pos = 0;

    long take() {
        if (pos >= pool.size()) {
            throw PlanError("planner: fresh bit pool exhausted");
        }
        return pool[pos++];
    }
    size_t remaining() const { return pool.size() - pos; }
};

using SegmentCache = std::vector<std::vector<std::vector<long>>>;  // [db][msg] -> indices

/// Cached indices of one corner instance over [lo, lo+len-1]:
/// per message, database db holds the db-th run of `per_db` indices.
inline SegmentCache canonical_segment_cache(int k, int n, long per_db, long lo) {
    SegmentCache cache(static_cast<size_t>(n),
                       std::vector<std::vector<long>>(static_cast<size_t>(k)));
    for (int db = 0; db < n; ++db) {
        for (int msg = 0; msg < k; ++msg) {
            auto& slot = cache[static_cast<size_t>(db)][static_cast<size_t>(msg)];
            slot.reserve(static_cast<size_t>(per_db));
            for (long i = 0; i < per_db; ++i) {
                slot.push_back(lo + db * per_db + i);
            }
        }
    }
    return cache;
}

/// Uniform choice of n*per_db indices per message from the segment,
/// uniformly partitioned across databases.
inline SegmentCache sampled_segment_cache(int k, int n, long per_db, long lo, long len,
                                          Rng& rng) {
    SegmentCache cache(static_cast<size_t>(n),
                       std::vector<std::vector<long>>(static_cast<size_t>(k)));
    std::vector<long> pool(static_cast<size_t>(len));
    for (long i = 0; i < len; ++i) pool[static_cast<size_t>(i)] = lo + i;
    for (int msg = 0; msg < k; ++msg) {
        auto picks = sample_without_replacement(pool, static_cast<size_t>(n) * per_db, rng);
        for (int db = 0; db < n; ++db) {
            auto& slot = cache[static_cast<size_t>(db)][static_cast<size_t>(msg)];
            slot.assign(picks.begin() + db * per_db, picks.begin() + (db + 1) * per_db);
            std::sort(slot.begin(), slot.end());
        }
    }
    return cache;
}

inline void merge_segment_cache(CachePlan& into, const SegmentCache& seg) {
    for (int db = 1; db <= into.n; ++db) {
        for (int msg = 1; msg <= into.k; ++msg) {
            const auto& src = seg[static_cast<size_t>(db - 1)][static_cast<size_t>(msg - 1)];
            auto& dst = into.of(db, msg);
            dst.insert(dst.end(), src.begin(), src.end());
        }
    }
}

/// Appends the rounds of one corner-s instance running over the message
/// segment [lo, lo+len-1]. s = 0 is the no-side-information scheme (empty
/// mixtures in round 1). Round t = s+1 mixes s cached bits from a single
/// source database with one fresh desired bit; later rounds pair every
/// undesired equation produced elsewhere in round t-1 with a fresh desired
/// bit. Each round closes with fresh undesired equations for message
/// symmetry.
inline void build_corner_instance(QueryPlan& plan, int k, int n, int s, int theta,
                                  long lo, long len, const SegmentCache& seg_cache) {
    std::vector<int> others;
    others.reserve(static_cast<size_t>(k) - 1);
    for (int m = 1; m <= k; ++m) {
        if (m != theta) others.push_back(m);
    }

    std::vector<FreshPool> fresh(static_cast<size_t>(k) + 1);
    {
        std::vector<std::vector<char>> cached(
            static_cast<size_t>(k) + 1, std::vector<char>(static_cast<size_t>(len), 0));
        for (int db = 0; db < n; ++db) {
            for (int msg = 1; msg <= k; ++msg) {
                for (long idx : seg_cache[static_cast<size_t>(db)][static_cast<size_t>(msg - 1)]) {
                    cached[static_cast<size_t>(msg)][static_cast<size_t>(idx - lo)] = 1;
                }
            }
        }
        for (int msg = 1; msg <= k; ++msg) {
            auto& pool = fresh[static_cast<size_t>(msg)].pool;
            for (long off = 0; off < len; ++off) {
                if (!cached[static_cast<size_t>(msg)][static_cast<size_t>(off)]) {
                    pool.push_back(lo + off);
                }
            }
        }
    }

    std::vector<std::vector<Equation>> prev(static_cast<size_t>(n) + 1);
    for (int t = s + 1; t <= k; ++t) {
        std::vector<std::vector<Equation>> cur(static_cast<size_t>(n) + 1);
        const auto desired_subsets = lex_subsets(others, s);
        const auto undesired_subsets = lex_subsets(others, t);
        const long copies = long_pow(n - 1, static_cast<unsigned>(t - s));
        for (int db = 1; db <= n; ++db) {
            RoundBlock block;
            block.t = t;
            block.db = db;
            if (t == s + 1) {
                for (int src = 1; src <= n; ++src) {
                    if (src == db) continue;
                    std::vector<size_t> used(static_cast<size_t>(k) + 1, 0);
                    for (const auto& subset : desired_subsets) {
                        Equation eq;
                        eq.terms.push_back(BitRef{theta, fresh[static_cast<size_t>(theta)].take()});
                        for (int u : subset) {
                            const auto& slots =
                                seg_cache[static_cast<size_t>(src - 1)][static_cast<size_t>(u - 1)];
                            if (used[static_cast<size_t>(u)] >= slots.size()) {
                                throw PlanError("planner: cached slot pool exhausted");
                            }
                            eq.terms.push_back(BitRef{u, slots[used[static_cast<size_t>(u)]++]});
                        }
                        eq.sort_terms();
                        block.equations.push_back(std::move(eq));
                    }
                }
            } else {
                for (int src = 1; src <= n; ++src) {
                    if (src == db) continue;
                    for (const Equation& produced : prev[static_cast<size_t>(src)]) {
                        Equation eq = produced;
                        eq.terms.push_back(BitRef{theta, fresh[static_cast<size_t>(theta)].take()});
                        eq.sort_terms();
                        block.equations.push_back(std::move(eq));
                    }
                }
            }
            for (const auto& subset : undesired_subsets) {
                for (long c = 0; c < copies; ++c) {
                    Equation eq;
                    for (int u : subset) {
                        eq.terms.push_back(BitRef{u, fresh[static_cast<size_t>(u)].take()});
                    }
                    eq.sort_terms();
                    block.equations.push_back(eq);
                    cur[static_cast<size_t>(db)].push_back(std::move(eq));
                }
            }
            plan.rounds.push_back(std::move(block));
        }
        prev = std::move(cur);
    }

    if (fresh[static_cast<size_t>(theta)].remaining() != 0) {
        throw PlanError("planner: desired fresh bits not fully consumed");
    }
}

inline void validate_theta(int k, int theta) {
    if (theta < 1 || theta > k) {
        throw std::invalid_argument("planner: target message index out of range");
    }
}

/// Message length handled by one instance of the corner-s scheme, where
/// s = 0 is the no-cache scheme and s = k the fully-cached endpoint.
inline Bigint instance_length(int k, int n, int s) {
    if (s == 0) return bounds::classical_message_length(k, n);
    if (s == k) return Bigint(n);
    return bounds::message_length(k, n, s);
}

inline long per_db_cached(int k, int n, int s) {
    if (s == 0) return 0;
    if (s == k) return 1;  // instance length n, everything cached
    return binomial(k - 2, s - 1).convert_to<long>();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Relabeling and shuffling.
// ---------------------------------------------------------------------------

/// Per-message bit relabelings; perms[msg][idx] is the new index (1-based).
using Relabeling = std::vector<std::vector<long>>;

inline Relabeling identity_relabeling(const QueryPlan& plan) {
    Relabeling perms(static_cast<size_t>(plan.k) + 1);
    for (int msg = 1; msg <= plan.k; ++msg) {
        auto& p = perms[static_cast<size_t>(msg)];
        p.resize(static_cast<size_t>(plan.length) + 1);
        for (long i = 0; i <= plan.length; ++i) p[static_cast<size_t>(i)] = i;
    }
    return perms;
}

/// Uniform relabeling respecting the cache structure: cached indices only
/// permute within their own database's cached set, uncached within the
/// uncached complement. Any other mapping would either leak or break
/// decodability.
inline Relabeling sample_relabeling(const QueryPlan& plan, Rng& rng) {
    Relabeling perms = identity_relabeling(plan);
    for (int msg = 1; msg <= plan.k; ++msg) {
        auto& p = perms[static_cast<size_t>(msg)];
        auto permute_class = [&](const std::vector<long>& members) {
            auto sigma = random_permutation(members.size(), rng);
            for (size_t i = 0; i < members.size(); ++i) {
                p[static_cast<size_t>(members[i])] = members[sigma[i]];
            }
        };
        for (int db = 1; db <= plan.n; ++db) {
            permute_class(plan.cache.of(db, msg));
        }
        permute_class(plan.cache.uncached_indices(msg));
    }
    return perms;
}

/// Applies a per-message relabeling; the cache plan is unchanged as a set
/// family, so the result queries the same physical prefetch.
inline QueryPlan relabel(QueryPlan plan, const Relabeling& perms) {
    for (RoundBlock& block : plan.rounds) {
        for (Equation& eq : block.equations) {
            for (BitRef& term : eq.terms) {
                term.index = perms[static_cast<size_t>(term.message)][static_cast<size_t>(term.index)];
            }
        }
    }
    return plan;
}

/// Seeded privacy randomization: uniform per-message relabeling within
/// cache classes followed by a uniform shuffle of each block's equations.
inline QueryPlan randomize(const QueryPlan& plan, uint64_t seed) {
    Rng rng(seed);
    QueryPlan out = relabel(plan, sample_relabeling(plan, rng));
    for (RoundBlock& block : out.rounds) {
        shuffle_in_place(block.equations, rng);
    }
    out.seed = seed;
    return out;
}

// ---------------------------------------------------------------------------
// Plan construction.
// ---------------------------------------------------------------------------

/// Seeded prefetch choice for corner s: N*C(k-2, s-1) uniformly chosen
/// indices per message, evenly and uniformly split across databases.
inline CachePlan plan_prefetch(int k, int n, int s, uint64_t seed) {
    bounds::validate_corner(k, n, s);
    if (s < 1) {
        throw std::invalid_argument("plan_prefetch: corner index must lie in 1..k-1");
    }
    long length = detail::to_plan_length(bounds::message_length(k, n, s), "plan_prefetch");
    Rng rng(derive_seed(seed, 0x11));
    CachePlan cache = CachePlan::empty(k, n, length);
    detail::merge_segment_cache(
        cache, detail::sampled_segment_cache(k, n, detail::per_db_cached(k, n, s), 1, length, rng));
    return cache;
}

namespace detail {

inline QueryPlan corner_plan_over(int k, int n, int s, int theta, const SegmentCache& seg,
                                  long length) {
    QueryPlan plan;
    plan.k = k;
    plan.n = n;
    plan.s = s;
    plan.r = s == 0 ? Rational(0) : bounds::corner_ratio(k, n, s);
    plan.theta = theta;
    plan.length = length;
    plan.seed = 0;
    plan.cache = CachePlan::empty(k, n, length);
    merge_segment_cache(plan.cache, seg);
    build_corner_instance(plan, k, n, s, theta, 1, length, seg);
    return plan;
}

}  // namespace detail

/// Canonical corner plan (contiguous cache, ascending fresh bits, no
/// shuffling); reproduces the worked query tables verbatim.
inline QueryPlan plan_corner_canonical(int k, int n, int s, int theta) {
    bounds::validate_corner(k, n, s);
    if (s < 1) {
        throw std::invalid_argument("plan_corner: corner index must lie in 1..k-1");
    }
    detail::validate_theta(k, theta);
    long length = detail::to_plan_length(bounds::message_length(k, n, s), "plan_corner");
    auto seg = detail::canonical_segment_cache(k, n, detail::per_db_cached(k, n, s), 1);
    return detail::corner_plan_over(k, n, s, theta, seg, length);
}

/// Seeded corner plan: random prefetch, relabeled and shuffled.
inline QueryPlan plan_corner(int k, int n, int s, int theta, uint64_t seed) {
    bounds::validate_corner(k, n, s);
    if (s < 1) {
        throw std::invalid_argument("plan_corner: corner index must lie in 1..k-1");
    }
    detail::validate_theta(k, theta);
    long length = detail::to_plan_length(bounds::message_length(k, n, s), "plan_corner");
    Rng cache_rng(derive_seed(seed, 0x11));
    auto seg = detail::sampled_segment_cache(k, n, detail::per_db_cached(k, n, s), 1, length,
                                             cache_rng);
    QueryPlan plan = detail::corner_plan_over(k, n, s, theta, seg, length);
    plan = randomize(plan, derive_seed(seed, 0x22));
    plan.seed = seed;
    return plan;
}

/// No-cache plan realizing the classical cost (r = 0 endpoint). k = 1 is
/// permitted: with a single message the scheme degenerates to downloading
/// it outright.
inline QueryPlan plan_classical_canonical(int k, int n, int theta) {
    if (k < 1) throw std::invalid_argument("plan_classical: need k >= 1");
    if (n < 2) throw std::invalid_argument("plan_classical: need n >= 2");
    detail::validate_theta(k, theta);
    long length =
        detail::to_plan_length(bounds::classical_message_length(k, n), "plan_classical");
    detail::SegmentCache seg(static_cast<size_t>(n),
                             std::vector<std::vector<long>>(static_cast<size_t>(k)));
    return detail::corner_plan_over(k, n, 0, theta, seg, length);
}

inline QueryPlan plan_classical(int k, int n, int theta, uint64_t seed) {
    QueryPlan plan = plan_classical_canonical(k, n, theta);
    plan = randomize(plan, derive_seed(seed, 0x22));
    plan.seed = seed;
    return plan;
}

/// r = 1 endpoint: everything prefetched, nothing queried.
inline QueryPlan plan_full_cache(int k, int n, int theta, uint64_t seed) {
    bounds::validate_kn(k, n);
    detail::validate_theta(k, theta);
    QueryPlan plan;
    plan.k = k;
    plan.n = n;
    plan.s = k;
    plan.r = Rational(1);
    plan.theta = theta;
    plan.length = n;
    plan.seed = seed;
    plan.cache = CachePlan::empty(k, n, n);
    Rng rng(derive_seed(seed, 0x11));
    auto seg = seed == 0 ? detail::canonical_segment_cache(k, n, 1, 1)
                         : detail::sampled_segment_cache(k, n, 1, 1, n, rng);
    detail::merge_segment_cache(plan.cache, seg);
    return plan;
}

namespace detail {

struct ShareSplit {
    int s_low = 0;       // lower corner (0 = classical endpoint)
    Rational alpha;      // weight on the lower corner
    long copies_low = 0;
    long copies_high = 0;
    long len_low = 0;    // instance lengths
    long len_high = 0;
};

inline ShareSplit share_split(int k, int n, const Rational& r) {
    int s = 0;
    while (s + 1 <= k - 1 && bounds::corner_ratio(k, n, s + 1) < r) ++s;
    Rational r_lo = bounds::corner_ratio(k, n, s);
    Rational r_hi = s + 1 == k ? Rational(1) : bounds::corner_ratio(k, n, s + 1);

    ShareSplit split;
    split.s_low = s;
    split.alpha = (r_hi - r) / (r_hi - r_lo);
    split.len_low = to_plan_length(instance_length(k, n, s), "plan_memory_share");
    split.len_high = to_plan_length(instance_length(k, n, s + 1), "plan_memory_share");

    // Smallest block multiples whose lengths realize r exactly:
    // copies_low*len_low : copies_high*len_high = alpha : (1 - alpha).
    Bigint an = split.alpha.num();
    Bigint ad = split.alpha.den();
    Bigint l1(split.len_low);
    Bigint l2(split.len_high);
    Bigint g1 = l1 / boost::multiprecision::gcd(an, l1);
    Bigint g2 = l2 / boost::multiprecision::gcd(ad - an, l2);
    Bigint g = g1 / boost::multiprecision::gcd(g1, g2) * g2;
    split.copies_low = to_plan_length(an * g / l1, "plan_memory_share");
    split.copies_high = to_plan_length((ad - an) * g / l2, "plan_memory_share");
    to_plan_length(Bigint(split.copies_low) * split.len_low +
                       Bigint(split.copies_high) * split.len_high,
                   "plan_memory_share");
    return split;
}

}  // namespace detail

/// Memory-shared plan for a ratio strictly between two adjacent corners
/// (the classical r = 0 and fully-cached r = 1 endpoints included). Each
/// message splits into two blocks of copies_low/copies_high scheme
/// instances; the composite cost is exactly the corner interpolation.
inline QueryPlan plan_memory_share(int k, int n, const Rational& r, int theta, uint64_t seed) {
    bounds::validate_kn(k, n);
    bounds::validate_ratio(r);
    detail::validate_theta(k, theta);
    PirParams params = PirParams::from_ratio(k, n, r);
    if (params.s.has_value()) {
        throw std::invalid_argument(
            "plan_memory_share: ratio is a corner; use the corner plan instead");
    }

    detail::ShareSplit split = detail::share_split(k, n, r);
    long total_length = split.copies_low * split.len_low + split.copies_high * split.len_high;

    QueryPlan plan;
    plan.k = k;
    plan.n = n;
    plan.s = std::nullopt;
    plan.r = r;
    plan.theta = theta;
    plan.length = total_length;
    plan.seed = 0;
    plan.cache = CachePlan::empty(k, n, total_length);

    Rng cache_rng(derive_seed(seed, 0x11));
    const bool canonical = seed == 0;
    long offset = 1;
    auto add_instances = [&](int s_inst, long copies, long len) {
        long per_db = detail::per_db_cached(k, n, s_inst);
        for (long c = 0; c < copies; ++c) {
            detail::SegmentCache seg =
                canonical ? detail::canonical_segment_cache(k, n, per_db, offset)
                          : detail::sampled_segment_cache(k, n, per_db, offset, len, cache_rng);
            detail::merge_segment_cache(plan.cache, seg);
            if (s_inst < k) {
                detail::build_corner_instance(plan, k, n, s_inst, theta, offset, len, seg);
            }
            offset += len;
        }
    };
    add_instances(split.s_low, split.copies_low, split.len_low);
    add_instances(split.s_low + 1, split.copies_high, split.len_high);

    // The block sizing must land the cached fraction on r exactly.
    Bigint cached(plan.cache.cached_count(1));
    if (Rational(cached, Bigint(total_length)) != r) {
        throw PlanError("plan_memory_share: cached fraction does not match the ratio");
    }

    if (!canonical) {
        plan = randomize(plan, derive_seed(seed, 0x22));
        plan.seed = seed;
    }
    return plan;
}

/// Builds the plan a resolved parameter set calls for.
inline QueryPlan plan_for_params(const PirParams& params, int theta, uint64_t seed) {
    if (params.s.has_value()) {
        if (*params.s == 0) return plan_classical(params.k, params.n, theta, seed);
        if (*params.s == params.k) return plan_full_cache(params.k, params.n, theta, seed);
        return plan_corner(params.k, params.n, *params.s, theta, seed);
    }
    return plan_memory_share(params.k, params.n, params.r, theta, seed);
}

// ---------------------------------------------------------------------------
// Structural audit.
// ---------------------------------------------------------------------------

/// Label-blind census of one database's queries: how many equations of
/// each order touch each message. Identical tables across all targets are
/// the structural face of the privacy constraint.
struct DbAudit {
    int db = 0;
    std::map<int, std::vector<long>> order_message_counts;  // order -> count per message
    long total_equations = 0;
    long desired_bearing = 0;
    long undesired = 0;

    friend bool operator==(const DbAudit&, const DbAudit&) = default;
};

struct AuditTable {
    int k = 0;
    int n = 0;
    std::vector<DbAudit> dbs;
    long total_equations = 0;
    long distinct_fresh_desired_bits = 0;
    long cached_bit_uses = 0;
    long consumed_equation_uses = 0;

    friend bool operator==(const AuditTable&, const AuditTable&) = default;
};

inline AuditTable structural_audit(const QueryPlan& plan) {
    AuditTable table;
    table.k = plan.k;
    table.n = plan.n;
    table.dbs.resize(static_cast<size_t>(plan.n));
    for (int db = 1; db <= plan.n; ++db) {
        table.dbs[static_cast<size_t>(db - 1)].db = db;
    }
    std::vector<char> theta_seen(static_cast<size_t>(plan.length) + 1, 0);
    for (const RoundBlock& block : plan.rounds) {
        DbAudit& audit = table.dbs[static_cast<size_t>(block.db - 1)];
        for (const Equation& eq : block.equations) {
            ++audit.total_equations;
            ++table.total_equations;
            auto& counts = audit.order_message_counts[eq.order()];
            counts.resize(static_cast<size_t>(plan.k), 0);
            bool desired = false;
            bool all_side_cached = true;
            for (const BitRef& term : eq.terms) {
                ++counts[static_cast<size_t>(term.message - 1)];
                if (term.message == plan.theta) {
                    desired = true;
                    if (!theta_seen[static_cast<size_t>(term.index)]) {
                        theta_seen[static_cast<size_t>(term.index)] = 1;
                        ++table.distinct_fresh_desired_bits;
                    }
                } else {
                    if (plan.cache.is_cached(term.message, term.index)) {
                        ++table.cached_bit_uses;
                    } else {
                        all_side_cached = false;
                    }
                }
            }
            if (desired) {
                ++audit.desired_bearing;
                if (!all_side_cached && eq.order() > 1) {
                    ++table.consumed_equation_uses;
                }
            } else {
                ++audit.undesired;
            }
        }
    }
    return table;
}

}  // namespace pir::planner
