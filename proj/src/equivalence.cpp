#include "wscfi/equivalence.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "wscfi/joins.hpp"

namespace wscfi {

namespace {

// Relation membership, dense when small.
struct Member {
    int arity = 0;
    int n = 0;
    std::vector<std::uint64_t> bits;
    std::unordered_set<std::uint64_t> sparse;
    bool dense = true;

    void init(int ar, int size)
    {
        arity = ar;
        n = size;
        double cells = std::pow(static_cast<double>(std::max(n, 1)), arity);
        dense = cells <= double(1 << 26);
        if (dense)
            bits.assign(static_cast<std::size_t>(cells) / 64 + 1, 0);
    }
    std::uint64_t code(const int* t) const
    {
        std::uint64_t c = 0;
        for (int i = arity - 1; i >= 0; --i)
            c = c * static_cast<std::uint64_t>(n) + static_cast<std::uint64_t>(t[i]);
        return c;
    }
    void add(const int* t)
    {
        auto c = code(t);
        if (dense)
            bits[c / 64] |= std::uint64_t{1} << (c % 64);
        else
            sparse.insert(c);
    }
    bool has(const int* t) const
    {
        auto c = code(t);
        return dense ? (bits[c / 64] >> (c % 64)) & 1 : sparse.count(c) > 0;
    }
};

// Structure flattened for the oracles; relation slots aligned between the structures compared.
struct Flat {
    int n = 0;
    std::vector<int> color, indiv;  // class index, individualization position or -1
    std::vector<Member> rels;
};

std::vector<std::pair<std::string, int>> relation_slots(const std::vector<const RelStructure*>& ss)
{
    std::map<std::string, int> ar;
    for (auto* s : ss)
        for (const auto& [name, r] : s->relations) {
            auto [it, fresh] = ar.emplace(name, r.arity);
            if (!fresh && it->second != r.arity)
                throw Error(ErrorKind::ArityMismatch, "relation " + name + " has different arities");
        }
    return {ar.begin(), ar.end()};
}

// Lays out the given structures one after another in a single universe.
Flat flatten(const std::vector<const RelStructure*>& ss)
{
    auto slots = relation_slots(ss);
    Flat f;
    for (auto* s : ss)
        f.n += s->n;
    f.color.assign(f.n, -1);
    f.indiv.assign(f.n, -1);
    f.rels.resize(slots.size());
    for (std::size_t r = 0; r < slots.size(); ++r)
        f.rels[r].init(slots[r].second, f.n);
    int off = 0;
    for (auto* s : ss) {
        auto col = s->color_of();
        for (int v = 0; v < s->n; ++v)
            f.color[off + v] = col[v];
        for (std::size_t i = 0; i < s->indiv.size(); ++i)
            f.indiv[off + s->indiv[i]] = static_cast<int>(i);
        for (std::size_t r = 0; r < slots.size(); ++r) {
            auto it = s->relations.find(slots[r].first);
            if (it == s->relations.end())
                continue;
            std::vector<int> t(slots[r].second);
            for (const auto& tu : it->second.tuples) {
                for (std::size_t i = 0; i < tu.size(); ++i)
                    t[i] = tu[i] + off;
                f.rels[r].add(t.data());
            }
        }
        off += s->n;
    }
    return f;
}

// Atomic type of a tuple as a flat key: equalities, labels, all relation patterns.
void atomic_type(const Flat& f, const int* t, int m, std::vector<int>& key)
{
    key.clear();
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            key.push_back(t[i] == t[j]);
    for (int i = 0; i < m; ++i) {
        key.push_back(f.color[t[i]]);
        key.push_back(f.indiv[t[i]]);
    }
    int buf[16];
    for (const auto& rel : f.rels) {
        int r = rel.arity;
        if (r > 16)
            throw Error(ErrorKind::BudgetExceeded, "relation arity too large");
        std::uint64_t combos = 1;
        for (int i = 0; i < r; ++i)
            combos *= static_cast<std::uint64_t>(m);
        for (std::uint64_t c = 0; c < combos; ++c) {
            std::uint64_t x = c;
            for (int i = 0; i < r; ++i) {
                buf[i] = t[x % m];
                x /= m;
            }
            key.push_back(rel.has(buf));
        }
    }
}

struct VecHash {
    std::size_t operator()(const std::vector<int>& v) const
    {
        std::size_t h = 1469598103934665603ULL;
        for (int x : v)
            h = (h ^ static_cast<std::size_t>(x + 0x9e3779b9)) * 1099511628211ULL;
        return h;
    }
};

// Canonical ids: the distinct keys sorted, id = rank.
std::vector<int> rank_keys(const std::vector<std::vector<int>>& keys)
{
    std::vector<int> order(keys.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return keys[a] < keys[b]; });
    std::vector<int> id(keys.size());
    int next = -1;
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (i == 0 || keys[order[i]] != keys[order[i - 1]])
            ++next;
        id[order[i]] = next;
    }
    return id;
}

std::uint64_t ipow(std::uint64_t b, int e)
{
    std::uint64_t r = 1;
    for (int i = 0; i < e; ++i) {
        if (b && r > std::numeric_limits<std::uint64_t>::max() / b)
            return std::numeric_limits<std::uint64_t>::max();
        r *= b;
    }
    return r;
}

StableColoring refine_flat(const Flat& f, int d, const WlLimits& lim)
{
    if (d < 1)
        throw Error(ErrorKind::InvalidStructure, "WL dimension must be at least 1");
    const int n = f.n;
    const std::uint64_t tuples = ipow(n, d);
    if (tuples > lim.max_tuples || ipow(n, d + 1) > lim.max_tuples * 64)
        throw Error(ErrorKind::BudgetExceeded, "WL tuple space too large");
    StableColoring out;
    out.d = d;
    out.n = n;
    auto decode = [&](std::uint64_t idx, int* t) {
        for (int i = 0; i < d; ++i) {
            t[i] = static_cast<int>(idx % n);
            idx /= n;
        }
    };
    std::vector<int> pw(d, 1);
    for (int i = 1; i < d; ++i)
        pw[i] = pw[i - 1] * n;

    // initial colors and the atomic type of every extension (u, w)
    std::vector<int> key;
    std::vector<std::vector<int>> init_keys(tuples);
    std::unordered_map<std::vector<int>, int, VecHash> ext_ids;
    std::vector<std::vector<int>> ext_keys;
    std::vector<int> ext(tuples * n);
    int t[17];
    for (std::uint64_t i = 0; i < tuples; ++i) {
        decode(i, t);
        atomic_type(f, t, d, key);
        init_keys[i] = key;
        for (int w = 0; w < n; ++w) {
            t[d] = w;
            atomic_type(f, t, d + 1, key);
            auto [it, fresh] = ext_ids.emplace(key, static_cast<int>(ext_keys.size()));
            if (fresh)
                ext_keys.push_back(key);
            ext[i * n + w] = it->second;
        }
    }
    auto ext_rank = rank_keys(ext_keys);
    for (auto& e : ext)
        e = ext_rank[e];
    ext_keys.clear();
    ext_ids.clear();

    std::vector<int> color = rank_keys(init_keys);
    init_keys.clear();
    int classes = color.empty() ? 0 : *std::max_element(color.begin(), color.end()) + 1;

    std::uint64_t work = 0;
    for (;;) {
        work += tuples * n;
        if (work > lim.max_work)
            throw Error(ErrorKind::BudgetExceeded, "WL work budget exhausted");
        std::vector<std::vector<int>> sig(tuples);
        std::vector<std::array<int, 17>> items(n);
        for (std::uint64_t i = 0; i < tuples; ++i) {
            decode(i, t);
            for (int w = 0; w < n; ++w) {
                auto& it = items[w];
                it.fill(0);
                it[0] = ext[i * n + w];
                for (int p = 0; p < d; ++p) {
                    std::uint64_t j = i + static_cast<std::uint64_t>(w - t[p]) * pw[p];
                    it[p + 1] = color[j];
                }
            }
            std::sort(items.begin(), items.end());
            auto& s = sig[i];
            s.reserve(1 + n * (d + 1));
            s.push_back(color[i]);
            for (const auto& it : items)
                s.insert(s.end(), it.begin(), it.begin() + d + 1);
        }
        auto next = rank_keys(sig);
        ++out.rounds;
        int next_classes = next.empty() ? 0 : *std::max_element(next.begin(), next.end()) + 1;
        color = std::move(next);
        if (next_classes == classes)
            break;
        classes = next_classes;
    }
    out.color = std::move(color);
    out.histogram.assign(classes, 0);
    for (int c : out.color)
        ++out.histogram[c];
    return out;
}

}  // namespace

StableColoring wl_refine(const RelStructure& s, int d, const WlLimits& lim)
{
    return refine_flat(flatten({&s}), d, lim);
}

bool ck_equivalent(const RelStructure& a, const RelStructure& b, int k, const WlLimits& lim)
{
    if (k < 2)
        throw Error(ErrorKind::KTooSmall, "C^k equivalence needs k >= 2");
    if (a.n != b.n)
        return false;
    if (a.indiv.size() != b.indiv.size())
        return false;
    const int d = k - 1;
    auto st = refine_flat(flatten({&a, &b}), d, lim);
    const int n = st.n;
    std::map<int, std::int64_t> ha, hb;
    std::vector<int> t(d);
    for (std::size_t i = 0; i < st.color.size(); ++i) {
        std::size_t x = i;
        bool in_a = true, in_b = true;
        for (int p = 0; p < d; ++p) {
            int v = static_cast<int>(x % n);
            x /= n;
            in_a &= v < a.n;
            in_b &= v >= a.n;
        }
        if (in_a)
            ++ha[st.color[i]];
        else if (in_b)
            ++hb[st.color[i]];
    }
    return ha == hb;
}

int hopcroft_karp(int left, int right, const std::vector<std::vector<int>>& adj, std::vector<int>* match_left)
{
    const int inf = std::numeric_limits<int>::max();
    std::vector<int> ml(left, -1), mr(right, -1), dist(left);
    auto bfs = [&] {
        std::deque<int> q;
        bool found = false;
        for (int u = 0; u < left; ++u) {
            dist[u] = ml[u] < 0 ? 0 : inf;
            if (ml[u] < 0)
                q.push_back(u);
        }
        while (!q.empty()) {
            int u = q.front();
            q.pop_front();
            for (int v : adj[u]) {
                int w = mr[v];
                if (w < 0)
                    found = true;
                else if (dist[w] == inf) {
                    dist[w] = dist[u] + 1;
                    q.push_back(w);
                }
            }
        }
        return found;
    };
    std::function<bool(int)> dfs = [&](int u) {
        for (int v : adj[u]) {
            int w = mr[v];
            if (w < 0 || (dist[w] == dist[u] + 1 && dfs(w))) {
                ml[u] = v;
                mr[v] = u;
                return true;
            }
        }
        dist[u] = inf;
        return false;
    };
    int size = 0;
    while (bfs())
        for (int u = 0; u < left; ++u)
            if (ml[u] < 0 && dfs(u))
                ++size;
    if (match_left)
        *match_left = ml;
    return size;
}

namespace {

constexpr int kMaxPebbles = 4;
constexpr std::uint16_t kNone = 0xFFFF;

// Positions are sets of at most k pairs (u,v), coded u*n+v, kept sorted in a 64-bit key.
struct Position {
    std::array<std::uint16_t, kMaxPebbles> p;
    int size = 0;
};

std::uint64_t key_of(const std::uint16_t* p, int size)
{
    std::uint64_t k = 0;
    for (int i = 0; i < kMaxPebbles; ++i)
        k = (k << 16) | (i < size ? p[i] : kNone);
    return k;
}

class PebbleGame {
public:
    // a and b are flattened together: A is [0,n), B is [n,2n).
    PebbleGame(const Flat& f, int n, const std::vector<std::pair<int, int>>& constants, int k, const GameLimits& lim)
        : f_(f), n_(n), k_(k)
    {
        if (k < 1 || k > kMaxPebbles)
            throw Error(ErrorKind::BudgetExceeded, "pebble count outside the supported range");
        if (static_cast<std::uint64_t>(n) * n >= kNone)
            throw Error(ErrorKind::BudgetExceeded, "structures too large for the game solver");
        for (auto [x, y] : constants)
            if (!extend_ok(dom_, x, y + n_)) {
                consistent_ = false;
                return;
            } else {
                dom_.emplace_back(x, y + n_);
            }
        // single pairs compatible with the constants
        for (int u = 0; u < n; ++u)
            for (int v = 0; v < n; ++v) {
                auto d = dom_;
                if (extend_ok(d, u, v + n))
                    singles_.push_back(static_cast<std::uint16_t>(u * n + v));
            }
        Position empty{};
        empty.p.fill(kNone);
        add_position(empty);
        enumerate(empty, 0, lim);
    }

    bool consistent() const { return consistent_; }
    std::size_t size() const { return pos_.size(); }

    // -1 if the pair set is not a local isomorphism
    int find(std::vector<std::uint16_t> pairs) const
    {
        std::sort(pairs.begin(), pairs.end());
        pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
        if (static_cast<int>(pairs.size()) > k_)
            return -1;
        auto it = index_.find(key_of(pairs.data(), static_cast<int>(pairs.size())));
        return it == index_.end() ? -1 : it->second;
    }

    // Backward fixpoint over bases: a base is a pebble set Spoiler may keep before placing
    // a pebble, broken once its safe extensions admit no perfect matching. A position is
    // lost for Duplicator once one of its bases is broken. seed marks positions Spoiler wins
    // outright (depth 1). Stops early once `watch` is decided for Spoiler.
    void solve(const std::vector<char>* seed = nullptr, int watch = -1)
    {
        const int np = static_cast<int>(pos_.size());
        win_.assign(np, -1);
        if (seed)
            for (int i = 0; i < np; ++i)
                if ((*seed)[i])
                    win_[i] = 1;
        // bases of each position
        std::vector<std::array<int, kMaxPebbles + 1>> opts(np);
        std::vector<int> nopt(np, 0);
        std::vector<char> is_base(np, 0);
        for (int s = 0; s < np; ++s) {
            const Position& P = pos_[s];
            if (P.size < k_) {
                opts[s][nopt[s]++] = s;
                is_base[s] = 1;
            }
            for (int drop = 0; drop < P.size; ++drop) {
                std::uint16_t q[kMaxPebbles];
                int m = 0;
                for (int i = 0; i < P.size; ++i)
                    if (i != drop)
                        q[m++] = P.p[i];
                opts[s][nopt[s]++] = index_.at(key_of(q, m));
            }
        }
        std::vector<char> broken(np, 0);
        std::vector<std::vector<int>> adj(n_);
        for (int round = seed ? 2 : 1;; ++round) {
            if (watch >= 0 && win_[watch] >= 0)
                return;
            std::vector<int> newly;
            for (int s = 0; s < np; ++s) {
                if (!is_base[s] || broken[s])
                    continue;
                const Position& P = pos_[s];
                bool perfect = true;
                for (int u = 0; u < n_ && perfect; ++u) {
                    adj[u].clear();
                    for (int v = 0; v < n_; ++v) {
                        int t = successor(P.p.data(), P.size, static_cast<std::uint16_t>(u * n_ + v));
                        if (t >= 0 && win_[t] < 0)
                            adj[u].push_back(v);
                    }
                    perfect = !adj[u].empty();
                }
                if (perfect)
                    perfect = hopcroft_karp(n_, n_, adj) == n_;
                if (!perfect)
                    newly.push_back(s);
            }
            if (newly.empty())
                return;
            for (int s : newly)
                broken[s] = 1;
            for (int s = 0; s < np; ++s) {
                if (win_[s] >= 0)
                    continue;
                for (int i = 0; i < nopt[s]; ++i)
                    if (broken[opts[s][i]]) {
                        win_[s] = round;
                        break;
                    }
            }
        }
    }

    int spoiler_depth(int s) const { return win_[s]; }

private:
    int successor(const std::uint16_t* base, int m, std::uint16_t add) const
    {
        std::uint16_t q[kMaxPebbles + 1];
        int j = 0;
        bool placed = false;
        for (int i = 0; i < m; ++i) {
            if (!placed && add <= base[i]) {
                if (add != base[i])
                    q[j++] = add;
                placed = true;
            }
            q[j++] = base[i];
        }
        if (!placed)
            q[j++] = add;
        if (j > k_)
            return -1;
        auto it = index_.find(key_of(q, j));
        return it == index_.end() ? -1 : it->second;
    }

    // Adds (x,y) to the partial map dom; false if the result is no local isomorphism.
    bool extend_ok(std::vector<std::pair<int, int>>& dom, int x, int y) const
    {
        for (auto [a, b] : dom) {
            if ((a == x) != (b == y))
                return false;
            if (a == x)
                return true;
        }
        if (f_.color[x] != f_.color[y] || f_.indiv[x] != f_.indiv[y])
            return false;
        dom.emplace_back(x, y);
        const int m = static_cast<int>(dom.size());
        int ta[16], tb[16];
        for (const auto& rel : f_.rels) {
            const int r = rel.arity;
            std::uint64_t combos = ipow(m, r);
            for (std::uint64_t c = 0; c < combos; ++c) {
                std::uint64_t z = c;
                bool uses_new = false;
                for (int i = 0; i < r; ++i) {
                    int idx = static_cast<int>(z % m);
                    z /= m;
                    uses_new |= idx == m - 1;
                    ta[i] = dom[idx].first;
                    tb[i] = dom[idx].second;
                }
                if (uses_new && rel.has(ta) != rel.has(tb)) {
                    dom.pop_back();
                    return false;
                }
            }
        }
        return true;
    }

    int add_position(const Position& P)
    {
        int id = static_cast<int>(pos_.size());
        index_.emplace(key_of(P.p.data(), P.size), id);
        pos_.push_back(P);
        return id;
    }

    void enumerate(const Position& P, std::size_t from, const GameLimits& lim)
    {
        std::vector<std::pair<int, int>> dom = dom_;
        enumerate(P, from, dom, lim);
    }

    void enumerate(const Position& P, std::size_t from, std::vector<std::pair<int, int>>& dom, const GameLimits& lim)
    {
        if (P.size == k_)
            return;
        for (std::size_t i = from; i < singles_.size(); ++i) {
            std::uint16_t pr = singles_[i];
            std::size_t before = dom.size();
            if (!extend_ok(dom, pr / n_, pr % n_ + n_))
                continue;
            Position Q = P;
            Q.p[Q.size++] = pr;
            if (pos_.size() >= lim.max_positions)
                throw Error(ErrorKind::BudgetExceeded, "game position budget exhausted");
            add_position(Q);
            enumerate(Q, i + 1, dom, lim);
            dom.resize(before);
        }
    }

    const Flat& f_;
    int n_, k_;
    bool consistent_ = true;
    std::vector<std::pair<int, int>> dom_;
    std::vector<std::uint16_t> singles_;
    std::vector<Position> pos_;
    std::unordered_map<std::uint64_t, int> index_;
    std::vector<int> win_;
};

std::vector<std::pair<int, int>> indiv_pairs(const RelStructure& a, const RelStructure& b)
{
    std::vector<std::pair<int, int>> c;
    for (std::size_t i = 0; i < a.indiv.size(); ++i)
        c.emplace_back(a.indiv[i], b.indiv[i]);
    return c;
}

std::vector<std::uint16_t> pin_pairs(const std::vector<Vertex>& ap, const std::vector<Vertex>& bp, int n)
{
    std::vector<std::uint16_t> out;
    for (std::size_t i = 0; i < ap.size(); ++i)
        out.push_back(static_cast<std::uint16_t>(ap[i] * n + bp[i]));
    return out;
}

}  // namespace

GameVerdict bijective_game_decide(const RelStructure& a, const std::vector<Vertex>& apins, const RelStructure& b,
                                  const std::vector<Vertex>& bpins, int k, const GameLimits& lim)
{
    if (apins.size() != bpins.size() || static_cast<int>(apins.size()) > k)
        throw Error(ErrorKind::InvalidStructure, "pin tuples must have equal length at most k");
    if (a.n != b.n || a.indiv.size() != b.indiv.size())
        return {Winner::Spoiler, 0};
    for (std::size_t i = 0; i < apins.size(); ++i)
        if (apins[i] < 0 || apins[i] >= a.n || bpins[i] < 0 || bpins[i] >= b.n)
            throw Error(ErrorKind::InvalidStructure, "pin outside the universe");
    Flat f = flatten({&a, &b});
    PebbleGame game(f, a.n, indiv_pairs(a, b), k, lim);
    if (!game.consistent())
        return {Winner::Spoiler, 0};
    int start = game.find(pin_pairs(apins, bpins, a.n));
    if (start < 0)
        return {Winner::Spoiler, 0};
    game.solve(nullptr, start);
    int d = game.spoiler_depth(start);
    if (d >= 0)
        return {Winner::Spoiler, d};
    return {Winner::Duplicator, std::nullopt};
}

GameVerdict pk_game_decide(const RelStructure& a, const std::vector<int>& a_labels, const RelStructure& b,
                           const std::vector<int>& b_labels, int k, const GameLimits& lim)
{
    if (k < 3)
        throw Error(ErrorKind::KTooSmall, "the P^k game needs k >= 3");
    if (static_cast<int>(a_labels.size()) != a.n || static_cast<int>(b_labels.size()) != b.n)
        throw Error(ErrorKind::SizeMismatch, "part labels must cover the universe");
    if (a.n != b.n || a.indiv.size() != b.indiv.size())
        return {Winner::Spoiler, 0};
    const int n = a.n;
    Flat f = flatten({&a, &b});
    PebbleGame outer(f, n, indiv_pairs(a, b), k, lim);
    if (!outer.consistent())
        return {Winner::Spoiler, 0};

    // Enumerate positions grouped by pebbled parts on either side.
    std::map<std::pair<std::vector<Vertex>, std::vector<Vertex>>, std::vector<std::vector<std::uint16_t>>> groups;
    {
        std::vector<std::uint16_t> cur;
        std::function<void(int)> rec = [&](int from) {
            std::vector<Vertex> ua, vb;
            for (auto p : cur) {
                ua.push_back(p / n);
                vb.push_back(p % n);
            }
            if (outer.find(cur) >= 0)
                groups[{pebbled_part_vertices(a_labels, ua), pebbled_part_vertices(b_labels, vb)}].push_back(cur);
            if (static_cast<int>(cur.size()) == k)
                return;
            for (int p = from; p < n * n; ++p) {
                cur.push_back(static_cast<std::uint16_t>(p));
                if (outer.find(cur) >= 0)
                    rec(p + 1);
                cur.pop_back();
            }
        };
        rec(0);
    }

    std::vector<char> pwin(outer.size(), 0);
    std::uint64_t games = 0;
    for (const auto& [sets, members] : groups) {
        const auto& [sa, sb] = sets;
        if (sa.size() != sb.size()) {
            for (const auto& P : members)
                pwin[outer.find(P)] = 1;
            continue;
        }
        // The game after the P-move only sees which pebbled-part vertex is matched with which,
        // so both quantifier orders reduce to: Spoiler wins against every colour-preserving bijection.
        auto ca = a.color_of(), cb = b.color_of();
        std::map<int, std::pair<std::vector<Vertex>, std::vector<Vertex>>> by_color;
        for (Vertex v : sa)
            by_color[ca[v]].first.push_back(v);
        for (Vertex v : sb)
            by_color[cb[v]].second.push_back(v);
        bool balanced = true;
        for (const auto& [c, pr] : by_color)
            balanced &= pr.first.size() == pr.second.size();
        std::vector<char> alive(members.size(), balanced ? 1 : 0);
        if (balanced) {
            std::vector<std::vector<Vertex>> images;
            std::vector<Vertex> order_a;
            for (auto& [c, pr] : by_color) {
                images.push_back(pr.second);
                order_a.insert(order_a.end(), pr.first.begin(), pr.first.end());
            }
            std::size_t live = members.size();
            std::function<void(std::size_t)> each = [&](std::size_t ci) {
                if (live == 0)
                    return;
                if (ci < images.size()) {
                    auto& img = images[ci];
                    std::sort(img.begin(), img.end());
                    do
                        each(ci + 1);
                    while (live > 0 && std::next_permutation(img.begin(), img.end()));
                    return;
                }
                if (++games > lim.max_games)
                    throw Error(ErrorKind::BudgetExceeded, "too many post-P-move games");
                std::vector<Vertex> order_b;
                for (const auto& img : images)
                    order_b.insert(order_b.end(), img.begin(), img.end());
                auto ia = individualize(a, order_a);
                auto ib = individualize(b, order_b);
                Flat fi = flatten({&ia, &ib});
                PebbleGame g(fi, n, indiv_pairs(ia, ib), k, lim);
                if (!g.consistent())
                    return;
                g.solve();
                for (std::size_t m = 0; m < members.size(); ++m) {
                    if (!alive[m])
                        continue;
                    int s = g.find(members[m]);
                    if (s >= 0 && g.spoiler_depth(s) < 0) {
                        alive[m] = 0;
                        --live;
                    }
                }
            };
            each(0);
        }
        for (std::size_t m = 0; m < members.size(); ++m)
            if (alive[m] || !balanced)
                pwin[outer.find(members[m])] = 1;
    }
    int start = outer.find({});
    outer.solve(&pwin, start);
    int d = outer.spoiler_depth(start);
    if (d >= 0)
        return {Winner::Spoiler, d};
    return {Winner::Duplicator, std::nullopt};
}

}  // namespace wscfi
