#include "wscfi/cli.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <deque>
#include <filesystem>
#include <functional>
#include <future>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "wscfi/cfi.hpp"
#include "wscfi/equivalence.hpp"
#include "wscfi/gluing.hpp"
#include "wscfi/joins.hpp"
#include "wscfi/multipede.hpp"
#include "wscfi/search.hpp"
#include "wscfi/wsc.hpp"

namespace wscfi {

using ojson = nlohmann::ordered_json;

namespace {

void require_graph(const RelStructure& s, const char* what)
{
    if (!is_colored_graph(s))
        throw Error(ErrorKind::NonGraphInput,
                    std::string(what) + " export needs a colored graph with a single symmetric relation E; "
                                        "structures with other relations (e.g. a gluing's ternary R) cannot be "
                                        "exported, run `glue extract` first to get the CFI graph");
}

double uniform53(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

std::string export_dimacs(const ColoredGraph& g)
{
    require_graph(g, "DIMACS");
    auto edges = graph_edges(g);
    auto col = g.color_of();
    std::ostringstream o;
    o << "p edge " << g.n << ' ' << edges.size() << '\n';
    for (int v = 0; v < g.n; ++v)
        o << "n " << v + 1 << ' ' << col[v] << '\n';
    for (auto [u, v] : edges)
        o << "e " << u + 1 << ' ' << v + 1 << '\n';
    return o.str();
}

ColoredGraph import_dimacs(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    int n = -1;
    std::vector<std::pair<Vertex, Vertex>> edges;
    std::map<int, std::vector<Vertex>> bycolor;
    std::vector<int> col;
    auto bad = [&](const std::string& why) { throw Error(ErrorKind::InvalidStructure, "DIMACS: " + why + ": " + line); };
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag == "c")
            continue;
        if (tag == "p") {
            std::string kind;
            long m = 0;
            if (!(ls >> kind >> n >> m) || n < 0)
                bad("bad header");
            col.assign(n, 0);
        } else if (tag == "n" || tag == "e") {
            int a = 0, b = 0;
            if (n < 0 || !(ls >> a >> b))
                bad("malformed line");
            if (a < 1 || a > n)
                bad("vertex out of range");
            if (tag == "n") {
                col[a - 1] = b;
            } else {
                if (b < 1 || b > n || a == b)
                    bad("bad edge");
                edges.emplace_back(a - 1, b - 1);
            }
        } else {
            bad("unknown line");
        }
    }
    if (n < 0)
        throw Error(ErrorKind::InvalidStructure, "DIMACS: missing header");
    for (int v = 0; v < n; ++v)
        bycolor[col[v]].push_back(v);
    std::vector<std::vector<Vertex>> classes;
    for (auto& [c, vs] : bycolor)
        classes.push_back(std::move(vs));
    return make_graph(n, edges, classes);
}

std::string export_dreadnaut(const ColoredGraph& g)
{
    require_graph(g, "dreadnaut");
    auto adj = adjacency(g);
    std::ostringstream o;
    o << "n=" << g.n << " $=0 g\n";
    for (int v = 0; v < g.n; ++v) {
        bool first = true;
        for (Vertex w : adj[v])
            if (w > v) {
                o << (first ? "" : " ") << w;
                first = false;
            }
        o << (v + 1 == g.n ? ".\n" : ";\n");
    }
    if (g.n == 0)
        o << ".\n";
    o << "f=[";
    for (std::size_t c = 0; c < g.colors.size(); ++c) {
        if (c)
            o << '|';
        for (std::size_t i = 0; i < g.colors[c].size(); ++i)
            o << (i ? "," : "") << g.colors[c][i];
    }
    o << "]\n";
    return o.str();
}

ColoredGraph base_family(const std::string& name, int n)
{
    std::vector<std::pair<Vertex, Vertex>> e;
    if (name == "cycle") {
        if (n < 3)
            throw Error(ErrorKind::Usage, "cycle needs n >= 3");
        for (int i = 0; i < n; ++i)
            e.emplace_back(std::min(i, (i + 1) % n), std::max(i, (i + 1) % n));
        return make_graph(n, e);
    }
    if (name == "complete") {
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v)
                e.emplace_back(u, v);
        return make_graph(n, e);
    }
    if (name == "path") {
        for (int i = 0; i + 1 < n; ++i)
            e.emplace_back(i, i + 1);
        return make_graph(n, e);
    }
    if (name == "star") {
        for (int i = 1; i < n; ++i)
            e.emplace_back(0, i);
        return make_graph(n, e);
    }
    if (name == "prism") {
        if (n < 3)
            throw Error(ErrorKind::Usage, "prism needs n >= 3");
        for (int i = 0; i < n; ++i) {
            int j = (i + 1) % n;
            e.emplace_back(std::min(i, j), std::max(i, j));
            e.emplace_back(n + std::min(i, j), n + std::max(i, j));
            e.emplace_back(i, n + i);
        }
        return make_graph(2 * n, e);
    }
    throw Error(ErrorKind::Usage, "unknown family '" + name + "' (cycle, complete, path, star, prism)");
}

ColoredGraph random_colored_graph(int n, double p, int colors, std::uint64_t seed)
{
    if (n < 0 || colors < 1)
        throw Error(ErrorKind::Usage, "need n >= 0 and colors >= 1");
    std::mt19937_64 rng(seed);
    std::vector<std::pair<Vertex, Vertex>> e;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (uniform53(rng) < p)
                e.emplace_back(u, v);
    std::vector<std::vector<Vertex>> cls(colors);
    for (int v = 0; v < n; ++v)
        cls[rng() % static_cast<std::uint64_t>(colors)].push_back(v);
    std::erase_if(cls, [](const auto& c) { return c.empty(); });
    return make_graph(n, e, cls);
}

std::string sha256_hex(const std::string& bytes)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw Error(ErrorKind::IoError, "SHA-256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

namespace {

struct Shared {
    std::uint64_t seed = 0;
    std::uint64_t budget_nodes = 0;
    std::uint64_t budget_bytes = 0;
    std::string out;
    std::string format = "json";
};

// State of one command run: inputs read (for the manifest) and the result.
struct Run {
    Shared sh;
    std::vector<std::pair<std::string, std::string>> parents;  // path, sha256
    std::string construction;
    std::string text;
    bool manifest = true;
    int code = 0;

    nlohmann::json load(const std::string& path)
    {
        auto t = read_text(path);
        parents.emplace_back(path, sha256_hex(t));
        try {
            return nlohmann::json::parse(t);
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::InvalidStructure, path + ": " + e.what());
        }
    }
    RelStructure structure(const std::string& path) { return structure_from_json(load(path)); }

    SearchLimits search() const
    {
        SearchLimits l;
        if (sh.budget_nodes)
            l.max_nodes = sh.budget_nodes;
        return l;
    }
    WlLimits wl() const
    {
        WlLimits l;
        if (sh.budget_nodes)
            l.max_work = sh.budget_nodes;
        if (sh.budget_bytes)
            l.max_tuples = std::max<std::uint64_t>(1, sh.budget_bytes / 8);
        return l;
    }
    GameLimits game() const
    {
        GameLimits l;
        if (sh.budget_nodes)
            l.max_positions = sh.budget_nodes;
        if (sh.budget_bytes)
            l.max_positions = std::min<std::uint64_t>(l.max_positions, std::max<std::uint64_t>(1, sh.budget_bytes / 64));
        return l;
    }

    void emit_json(const ojson& j) { text = j.dump() + "\n"; }
    void emit_json_only(const ojson& j)
    {
        if (sh.format != "json")
            throw Error(ErrorKind::Usage, "--format " + sh.format + " applies to graph outputs only");
        emit_json(j);
    }
    void emit_structure(const ojson& j, const RelStructure& s)
    {
        if (sh.format == "json")
            emit_json(j);
        else if (sh.format == "dimacs")
            text = export_dimacs(s);
        else if (sh.format == "dreadnaut")
            text = export_dreadnaut(s);
        else
            throw Error(ErrorKind::Usage, "unknown format " + sh.format);
    }
};

std::vector<int> int_list(const std::string& s)
{
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) {
            try {
                std::size_t used = 0;
                out.push_back(std::stoi(item, &used));
                if (used != item.size())
                    throw std::invalid_argument(item);
            } catch (const std::exception&) {
                throw Error(ErrorKind::Usage, "not an integer list: " + s);
            }
        }
    return out;
}

ojson recovered_json(const RecoveredBase& r)
{
    ojson j;
    j["base"] = to_json(r.base);
    ojson ind = ojson::array();
    for (auto [u, v] : r.individualized)
        ind.push_back({u, v});
    j["individualized"] = ind;
    ojson orig = ojson::array();
    for (const auto& o : r.origin) {
        const char* kind = o.kind == Origin::Kind::Gadget ? "g" : (o.kind == Origin::Kind::DirectedEdge ? "d" : "u");
        orig.push_back({kind, o.u, o.v, o.bits});
    }
    j["origin"] = orig;
    return j;
}

ojson parity_suite(const ColoredGraph& base, CfiVariant variant, const SearchLimits& lim, bool& ok)
{
    auto m = graph_edges(base).size();
    if (m > 20)
        throw Error(ErrorKind::BudgetExceeded, "parity suite limited to 20 base edges");
    auto ref = build_cfi(base, Twist(m, 0), variant);
    ojson verdicts = ojson::array();
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
        Twist f(m);
        for (std::size_t i = 0; i < m; ++i)
            f[i] = static_cast<std::uint8_t>((mask >> i) & 1);
        auto c = build_cfi(base, f, variant);
        bool iso = isomorphic(ref.graph, c.graph, lim).has_value();
        bool expect = parity(f) == 0;
        ok = ok && iso == expect;
        verdicts.push_back({{"twist", twist_bits(f)}, {"isomorphic", iso}, {"expected", expect}});
    }
    return verdicts;
}

int run_pipeline(Run& run, const std::string& spec_path, int jobs, bool timings);

int verify_manifest(Run& run, const std::string& path, std::ostream& err);

void add_shared(CLI::App& app, Shared& sh)
{
    app.add_option("--seed", sh.seed, "PRNG seed");
    app.add_option("--budget-nodes", sh.budget_nodes, "search nodes / game positions / WL work before giving up");
    app.add_option("--budget-bytes", sh.budget_bytes, "memory budget for WL tables and game positions");
    app.add_option("--out", sh.out, "output file (stdout if absent); writes <out>.manifest.json");
    app.add_option("--format", sh.format, "json|dimacs|dreadnaut")->check(CLI::IsMember({"json", "dimacs", "dreadnaut"}));
}

// Option storage for one parse; deques keep references stable.
struct Store {
    std::deque<std::string> s;
    std::deque<int> i;
    std::deque<double> d;
    std::deque<bool> b;
    std::deque<std::vector<std::string>> v;
    std::string& str() { return s.emplace_back(); }
    int& num() { return i.emplace_back(0); }
    double& real() { return d.emplace_back(0.0); }
    bool& flag() { return b.emplace_back(false); }
    std::vector<std::string>& strs() { return v.emplace_back(); }
};

int dispatch(const std::vector<std::string>& args, Run& run, std::ostream& err)
{
    Store st;
    CLI::App app{"wscfi: CFI graphs, multipedes, equivalence games and witnessed symmetric choice"};
    app.require_subcommand(1);
    app.fallthrough();
    add_shared(app, run.sh);
    std::function<void()> action;
    auto& sh = run.sh;

    // cfi
    auto* cfi = app.add_subcommand("cfi", "CFI graphs")->require_subcommand(1);
    {
        auto* gen = cfi->add_subcommand("gen", "build CFI(G, f)");
        auto &base = st.str(), &twist = st.str(), &variant = st.str();
        gen->add_option("--base", base, "base graph JSON")->required();
        twist = "all-zero";
        variant = "two-pair";
        auto &gl = st.flag();
        gl = false;
        gen->add_option("--twist", twist, "hex, bit string over sorted edges, all-zero, or u-v,u-v edge list");
        gen->add_option("--variant", variant, "two-pair|relational|single-pair");
        gen->add_flag("--gadgets-last", gl, "edge vertices first, gadget vertices last");
        gen->callback([&] {
            action = [&] {
                run.construction = "cfi gen";
                auto b = run.structure(base);
                auto c = build_cfi(b, parse_twist(twist, b), parse_variant(variant), gl);
                run.emit_structure(cfi_to_json(c), c.graph);
            };
        });
        auto* rec = cfi->add_subcommand("recover", "recover the base of a CFI graph");
        auto &in = st.str();
        rec->add_option("--in", in)->required();
        rec->callback([&] {
            action = [&] {
                run.construction = "cfi recover";
                run.emit_json_only(recovered_json(recover_base(run.structure(in))));
            };
        });
    }

    // join
    auto* join = app.add_subcommand("join", "color class joins")->require_subcommand(1);
    {
        auto* build = join->add_subcommand("build", "color class join of connected graphs");
        auto &inputs = st.strs();
        inputs.clear();
        build->add_option("--inputs", inputs)->required();
        build->callback([&] {
            action = [&] {
                run.construction = "join build";
                std::vector<ColoredGraph> gs;
                for (const auto& p : inputs)
                    gs.push_back(run.structure(p));
                auto j = color_class_join(gs);
                run.emit_structure(joined_to_json(j), j.graph);
            };
        });
        auto* om = join->add_subcommand("cfi-omega", "k copies each of CFI(G,0), CFI(G,g), CFI(G,1), joined");
        auto &base = st.str();
        auto &g = st.num(), &k = st.num();
        g = 0;
        k = 1;
        om->add_option("--base", base)->required();
        om->add_option("--g", g)->check(CLI::Range(0, 1));
        om->add_option("--k", k)->check(CLI::PositiveNumber);
        om->callback([&] {
            action = [&] {
                run.construction = "join cfi-omega";
                auto j = cfi_omega(run.structure(base), g, k);
                run.emit_structure(joined_to_json(j), j.graph);
            };
        });
        auto* lab = join->add_subcommand("labels", "part label per vertex of a CFI graph over a join");
        auto &jpath = st.str(), &cpath = st.str();
        lab->add_option("--join", jpath)->required();
        lab->add_option("--cfi", cpath);
        lab->callback([&] {
            action = [&] {
                run.construction = "join labels";
                auto j = joined_from_json(run.load(jpath));
                auto labels = part_labels(j);
                if (!cpath.empty())
                    labels = cfi_part_labels(cfi_from_json(run.load(cpath)), labels);
                run.emit_json_only(ojson(labels));
            };
        });
    }

    // multipede
    auto* mp = app.add_subcommand("multipede", "bipartite bases and multipedes")->require_subcommand(1);
    {
        auto* sample = mp->add_subcommand("sample", "sample a bipartite base");
        auto &n = st.num(), &meager = st.num();
        auto &eps = st.real();
        auto &odd = st.flag();
        n = 0;
        meager = 0;
        eps = 0.1;
        odd = false;
        sample->add_option("--n", n)->required()->check(CLI::PositiveNumber);
        sample->add_option("--epsilon", eps);
        sample->add_flag("--odd", odd, "resample until odd");
        sample->add_option("--meager", meager, "resample until k-meager");
        auto& tries = st.num();
        tries = 1000;
        sample->add_option("--max-tries", tries, "rejection-sampling attempts")->check(CLI::PositiveNumber);
        sample->callback([&] {
            action = [&] {
                run.construction = "multipede sample";
                ojson j;
                if (odd || meager > 0) {
                    auto [b, meta] = sample_verified(n, eps, sh.seed, odd, meager, tries);
                    j = base_to_json(b);
                    j["sample"] = {{"n", meta.n}, {"epsilon", meta.epsilon}, {"seed", meta.seed}, {"attempt", meta.attempt}};
                } else {
                    j = base_to_json(sample_bipartite(n, eps, sh.seed));
                    j["sample"] = {{"n", n}, {"epsilon", eps}, {"seed", sh.seed}, {"attempt", 0}};
                }
                run.emit_json_only(j);
            };
        });
        auto* check = mp->add_subcommand("check", "oddness, meagerness, scattered sets");
        auto &in = st.str();
        auto &mk = st.num(), &sk = st.num(), &target = st.num();
        auto &codd = st.flag();
        mk = 0;
        sk = 0;
        target = 2;
        codd = false;
        check->add_option("--in", in)->required();
        check->add_flag("--odd", codd);
        check->add_option("--meager", mk);
        check->add_option("--scattered", sk);
        check->add_option("--target", target, "scattered set size required");
        check->callback([&] {
            action = [&] {
                run.construction = "multipede check";
                auto b = base_from_json(run.load(in));
                ojson j;
                bool ok = true;
                j["segments"] = b.w;
                j["constraints"] = b.constraints.size();
                if (codd) {
                    bool o = is_odd(b);
                    j["odd"] = o;
                    j["rank"] = gf2_rank(b);
                    ok = ok && o;
                }
                if (mk > 0) {
                    MeagerLimits ml;
                    ml.max_segments = std::max(ml.max_segments, b.w);
                    if (sh.budget_nodes)
                        ml.max_nodes = sh.budget_nodes;
                    bool m = is_k_meager(b, mk, ml);
                    j["meager"] = {{"k", mk}, {"holds", m}};
                    ok = ok && m;
                }
                if (sk > 0) {
                    auto s = scattered_set(b, sk, target);
                    j["scattered"] = {{"k", sk}, {"segments", s.segments}, {"complete", s.complete}};
                    ok = ok && s.complete;
                }
                j["pass"] = ok;
                run.emit_json_only(j);
                run.code = ok ? 0 : 1;
            };
        });
        auto* build = mp->add_subcommand("build", "multipede structure of a base");
        auto &bin = st.str();
        build->add_option("--in", bin)->required();
        build->callback([&] {
            action = [&] {
                run.construction = "multipede build";
                auto m = build_multipede(base_from_json(run.load(bin)));
                run.emit_json_only(to_json(m.structure));
            };
        });
    }

    // glue
    auto* glue_cmd = app.add_subcommand("glue", "multipede and CFI gluings")->require_subcommand(1);
    {
        auto* build = glue_cmd->add_subcommand("build", "glue a multipede onto a single-pair CFI graph");
        auto &mpath = st.str(), &cpath = st.str(), &segs = st.str();
        build->add_option("--multipede", mpath, "bipartite base JSON")->required();
        build->add_option("--cfi", cpath, "single-pair CFI graph JSON")->required();
        build->add_option("--segments", segs, "s0,s1,... one segment per base edge")->required();
        build->callback([&] {
            action = [&] {
                run.construction = "glue build";
                auto m = build_multipede(base_from_json(run.load(mpath)));
                auto c = cfi_from_json(run.load(cpath));
                run.emit_json_only(gluing_to_json(glue(m, int_list(segs), c)));
            };
        });
        auto* ex = glue_cmd->add_subcommand("extract", "CFI graph inside a gluing");
        auto &in = st.str();
        ex->add_option("--in", in)->required();
        ex->callback([&] {
            action = [&] {
                run.construction = "glue extract";
                auto g = extract_cfi(run.structure(in));
                run.emit_structure(to_json(g), g);
            };
        });
    }

    // eq
    auto* eq = app.add_subcommand("eq", "WL, counting logic and pebble games")->require_subcommand(1);
    {
        auto* wl = eq->add_subcommand("wl", "stable d-dimensional WL colouring");
        auto &in = st.str();
        auto &dim = st.num();
        dim = 1;
        wl->add_option("--in", in)->required();
        wl->add_option("--dim", dim)->check(CLI::PositiveNumber);
        wl->callback([&] {
            action = [&] {
                run.construction = "eq wl";
                auto c = wl_refine(run.structure(in), dim, run.wl());
                run.emit_json_only(ojson{{"d", c.d}, {"n", c.n}, {"rounds", c.rounds}, {"classes", c.histogram.size()},
                                         {"histogram", c.histogram}, {"color", c.color}});
            };
        });
        auto &a = st.str(), &b = st.str();
        auto &k = st.num();
        k = 2;
        auto* ck = eq->add_subcommand("ck", "C^k equivalence");
        ck->add_option("--a", a)->required();
        ck->add_option("--b", b)->required();
        ck->add_option("--k", k)->check(CLI::PositiveNumber);
        ck->callback([&] {
            action = [&] {
                run.construction = "eq ck";
                bool e = ck_equivalent(run.structure(a), run.structure(b), k, run.wl());
                run.emit_json_only(ojson{{"k", k}, {"equivalent", e}});
                run.code = e ? 0 : 1;
            };
        });
        auto* game = eq->add_subcommand("game", "bijective k-pebble game, or the P^k game with --pk");
        auto &pk = st.flag();
        auto &apins = st.str(), &bpins = st.str(), &alab = st.str(), &blab = st.str();
        pk = false;
        game->add_option("--a", a)->required();
        game->add_option("--b", b)->required();
        game->add_option("--k", k)->check(CLI::PositiveNumber);
        game->add_flag("--pk", pk);
        game->add_option("--a-pins", apins, "initial pebbles in a, comma separated");
        game->add_option("--b-pins", bpins);
        game->add_option("--a-labels", alab, "part labels of a (JSON array, see join labels); needed with --pk");
        game->add_option("--b-labels", blab);
        game->callback([&] {
            action = [&] {
                run.construction = "eq game";
                auto sa = run.structure(a);
                auto sb = run.structure(b);
                GameVerdict v;
                if (pk) {
                    if (alab.empty() || blab.empty())
                        throw Error(ErrorKind::Usage, "--pk needs --a-labels and --b-labels");
                    auto la = run.load(alab).get<std::vector<int>>();
                    auto lb = run.load(blab).get<std::vector<int>>();
                    v = pk_game_decide(sa, la, sb, lb, k, run.game());
                } else {
                    v = bijective_game_decide(sa, int_list(apins), sb, int_list(bpins), k, run.game());
                }
                ojson j{{"k", k}, {"pk", pk}, {"winner", v.winner == Winner::Spoiler ? "spoiler" : "duplicator"}};
                j["depth"] = v.depth ? ojson(*v.depth) : ojson(nullptr);
                run.emit_json_only(j);
                run.code = v.winner == Winner::Duplicator ? 0 : 1;
            };
        });
    }

    // wsc
    auto* wsc = app.add_subcommand("wsc", "witnessed symmetric choice")->require_subcommand(1);
    {
        auto &in = st.str(), &oracle = st.str(), &pick = st.str();
        oracle = "brute";
        pick = "least";
        auto* can = wsc->add_subcommand("canonize", "canonize through individualization choices");
        can->add_option("--in", in)->required();
        can->add_option("--oracle", oracle)->check(CLI::IsMember({"brute", "cfi"}));
        can->add_option("--pick", pick)->check(CLI::IsMember({"least", "greatest", "random"}));
        can->callback([&] {
            action = [&] {
                run.construction = "wsc canonize";
                auto s = run.structure(in);
                CanonOptions opt;
                opt.search = run.search();
                opt.wsc.pick = parse_pick(pick);
                opt.wsc.seed = sh.seed;
                auto lim = opt.search;
                ReadyOracle ready = oracle == "cfi" ? ReadyOracle([lim](const RelStructure& t) { return cfi_ready(t, lim); })
                                                    : ReadyOracle([lim](const RelStructure& t) { return brute_ready(t, lim); });
                auto c = gurevich_canonize(s, ready, opt);
                auto j = to_json(c.canon);
                j["canonization"] = {{"oracle", oracle},
                                     {"order", c.order},
                                     {"verdict", verdict_name(c.outcome.verdict)},
                                     {"rounds", c.outcome.log.size()}};
                run.emit_structure(j, c.canon);
            };
        });
        auto* th = wsc->add_subcommand("threshold", "threshold graph recognition by witnessed elimination");
        th->add_option("--in", in)->required();
        th->add_option("--pick", pick)->check(CLI::IsMember({"least", "greatest", "random"}));
        th->callback([&] {
            action = [&] {
                run.construction = "wsc threshold";
                WscOptions o;
                o.pick = parse_pick(pick);
                o.seed = sh.seed;
                auto res = threshold_via_wsc(run.structure(in), o);
                run.emit_json_only(outcome_to_json(res));
                run.code = res.verdict == WscVerdict::AcceptedTrue ? 0 : 1;
            };
        });
    }

    // export
    auto* exp = app.add_subcommand("export", "write a graph as DIMACS or dreadnaut");
    {
        auto &in = st.str();
        exp->add_option("--in", in)->required();
        exp->callback([&] {
            action = [&] {
                run.construction = "export";
                auto s = run.structure(in);
                run.emit_structure(to_json(s), s);
            };
        });
    }

    // gen
    auto* gen = app.add_subcommand("gen", "base graphs and random colored graphs")->require_subcommand(1);
    {
        auto* base = gen->add_subcommand("base", "named base graph");
        auto &family = st.str();
        auto &n = st.num();
        n = 3;
        base->add_option("--family", family)->required();
        base->add_option("--n", n);
        auto& ordered = st.flag();
        base->add_flag("--ordered", ordered, "one color class per vertex");
        base->callback([&] {
            action = [&] {
                run.construction = "gen base";
                auto g = base_family(family, n);
                if (ordered) {
                    g.colors.clear();
                    for (int v = 0; v < g.n; ++v)
                        g.colors.push_back({v});
                }
                run.emit_structure(to_json(g), g);
            };
        });
        auto* rnd = gen->add_subcommand("random", "G(n,p) with random vertex colors");
        auto &p = st.real();
        auto &colors = st.num();
        p = 0.5;
        colors = 1;
        rnd->add_option("--n", n)->required();
        rnd->add_option("--p", p)->check(CLI::Range(0.0, 1.0));
        rnd->add_option("--colors", colors)->check(CLI::PositiveNumber);
        rnd->callback([&] {
            action = [&] {
                run.construction = "gen random";
                auto g = random_colored_graph(n, p, colors, sh.seed);
                run.emit_structure(to_json(g), g);
            };
        });
    }

    // verify-manifest
    auto* vm = app.add_subcommand("verify-manifest", "replay a manifest and compare output hashes");
    {
        auto &path = st.str();
        vm->add_option("--manifest", path)->required();
        vm->callback([&] {
            action = [&] {
                run.manifest = false;
                run.code = verify_manifest(run, path, err);
            };
        });
    }

    // pipeline
    auto* pipe = app.add_subcommand("pipeline", "run a JSON list of steps and report pass/fail");
    {
        auto &spec = st.str();
        auto &jobs = st.num();
        auto &no_timings = st.flag();
        jobs = 1;
        no_timings = false;
        pipe->add_option("--spec", spec)->required();
        pipe->add_option("--jobs", jobs)->check(CLI::PositiveNumber);
        pipe->add_flag("--no-timings", no_timings, "omit timings so reports compare byte for byte");
        pipe->callback([&] {
            action = [&] {
                run.manifest = false;
                run.code = run_pipeline(run, spec, jobs, !no_timings);
            };
        });
    }

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        run.text = app.help();
        return -1;
    } catch (const CLI::CallForAllHelp&) {
        run.text = app.help("", CLI::AppFormatMode::All);
        return -1;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    }
    if (!action)
        throw Error(ErrorKind::Usage, "no command");
    action();
    return run.code;
}

int run_once(const std::vector<std::string>& args, Run& run, std::ostream& err)
{
    try {
        return dispatch(args, run, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return e.kind() == ErrorKind::BudgetExceeded ? 3 : 2;
    } catch (const nlohmann::json::exception& e) {
        err << "error: invalid-structure: " << e.what() << "\n";
        return 2;
    }
}

std::string manifest_path(const std::string& out) { return out + ".manifest.json"; }

ojson make_manifest(const Run& run, const std::vector<std::string>& args)
{
    ojson m;
    m["construction"] = run.construction;
    ojson params = ojson::object();
    for (std::size_t i = 0; i < args.size(); ++i)
        if (args[i].rfind("--", 0) == 0 && args[i] != "--out") {
            std::vector<std::string> vals;
            while (i + 1 < args.size() && args[i + 1].rfind("--", 0) != 0)
                vals.push_back(args[++i]);
            params[args[i - vals.size()].substr(2)] = vals.empty() ? ojson(true) : vals.size() == 1 ? ojson(vals[0]) : ojson(vals);
        }
    m["parameters"] = params;
    m["seed"] = run.sh.seed;
    ojson parents = ojson::array();
    for (const auto& [p, h] : run.parents)
        parents.push_back({{"path", p}, {"sha256", h}});
    m["parents"] = parents;
    m["command"] = args;
    m["output"] = {{"path", run.sh.out}, {"format", run.sh.format}, {"sha256", sha256_hex(run.text)}};
    return m;
}

int verify_manifest(Run& run, const std::string& path, std::ostream& err)
{
    auto m = run.load(path);
    std::vector<std::string> args;
    std::string expect;
    try {
        args = m.at("command").get<std::vector<std::string>>();
        expect = m.at("output").at("sha256").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidStructure, "malformed manifest: " + std::string(e.what()));
    }
    ojson report;
    bool parents_ok = true;
    ojson parents = ojson::array();
    for (const auto& p : m.value("parents", nlohmann::json::array())) {
        auto file = p.at("path").get<std::string>();
        std::string now;
        try {
            now = sha256_hex(read_text(file));
        } catch (const Error&) {
            now = "missing";
        }
        bool same = now == p.at("sha256").get<std::string>();
        parents_ok = parents_ok && same;
        parents.push_back({{"path", file}, {"match", same}});
    }
    // replay without --out so nothing on disk is touched
    std::vector<std::string> replay;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--out") {
            ++i;
            continue;
        }
        replay.push_back(args[i]);
    }
    Run again;
    int code = run_once(replay, again, err);
    std::string got = sha256_hex(again.text);
    bool match = code != 2 && code != 3 && got == expect;
    report["manifest"] = path;
    report["parents"] = parents;
    report["replay_exit"] = code;
    report["expected_sha256"] = expect;
    report["replayed_sha256"] = got;
    report["match"] = match && parents_ok;
    run.emit_json_only(report);
    return match && parents_ok ? 0 : 1;
}

int run_pipeline(Run& run, const std::string& spec_path, int jobs, bool timings)
{
    auto spec = run.load(spec_path);
    std::vector<nlohmann::json> steps;
    if (spec.is_object() && spec.contains("steps"))
        for (const auto& s : spec.at("steps"))
            steps.push_back(s);
    else if (!spec.is_object() && !spec.is_array())
        throw Error(ErrorKind::InvalidStructure, "pipeline spec must be an object with \"steps\"");
    else if (spec.is_array())
        for (const auto& s : spec)
            steps.push_back(s);

    auto lim = run.search();
    auto one = [&](const nlohmann::json& st, std::size_t idx) -> ojson {
        std::string id = st.value("id", "step" + std::to_string(idx));
        auto t0 = std::chrono::steady_clock::now();
        ojson r;
        r["id"] = id;
        if (st.contains("suite")) {
            auto suite = st.at("suite").get<std::string>();
            if (suite != "cfi-parity")
                throw Error(ErrorKind::StepFailure, "step " + id + ": unknown suite " + suite);
            ColoredGraph base;
            if (st.contains("base"))
                base = read_structure(st.at("base").get<std::string>());
            else
                base = base_family(st.value("family", "cycle"), st.value("n", 3));
            bool ok = true;
            r["suite"] = suite;
            r["verdicts"] = parity_suite(base, parse_variant(st.value("variant", "two-pair")), lim, ok);
            r["pass"] = ok;
        } else if (st.contains("args")) {
            auto args = st.at("args").get<std::vector<std::string>>();
            if (!args.empty() && args[0] == "pipeline")
                throw Error(ErrorKind::StepFailure, "step " + id + ": pipelines do not nest");
            int expect = st.value("expect", 0);
            Run sub;
            std::ostringstream e;
            int code = run_once(args, sub, e);
            r["exit"] = code;
            r["expect"] = expect;
            if (!sub.text.empty()) {
                auto parsed = nlohmann::ordered_json::parse(sub.text, nullptr, false);
                r["output"] = parsed.is_discarded() ? ojson(sub.text) : parsed;
            }
            if (!e.str().empty())
                r["stderr"] = e.str();
            r["pass"] = code == expect;
        } else {
            throw Error(ErrorKind::StepFailure, "step " + id + ": needs \"args\" or \"suite\"");
        }
        if (timings)
            r["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return r;
    };

    std::vector<ojson> results(steps.size());
    for (std::size_t lo = 0; lo < steps.size(); lo += static_cast<std::size_t>(jobs)) {
        std::size_t hi = std::min(steps.size(), lo + static_cast<std::size_t>(jobs));
        if (hi - lo == 1) {
            results[lo] = one(steps[lo], lo);
            continue;
        }
        std::vector<std::future<ojson>> fs;
        for (std::size_t i = lo; i < hi; ++i)
            fs.push_back(std::async(std::launch::async, one, std::cref(steps[i]), i));
        for (std::size_t i = lo; i < hi; ++i)
            results[i] = fs[i - lo].get();
    }
    ojson report;
    int passed = 0;
    ojson arr = ojson::array();
    for (auto& r : results) {
        passed += r.at("pass").get<bool>();
        arr.push_back(std::move(r));
    }
    report["steps"] = arr;
    report["passed"] = passed;
    report["failed"] = static_cast<int>(results.size()) - passed;
    run.emit_json_only(report);
    return passed == static_cast<int>(results.size()) ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    Run run;
    int code = run_once(args, run, err);
    if (code == -1) {
        out << run.text;
        return 0;
    }
    if (code == 2 || code == 3)
        return code;
    try {
        if (run.sh.out.empty()) {
            out << run.text;
        } else {
            write_text(run.sh.out, run.text);
            if (run.manifest)
                write_text(manifest_path(run.sh.out), make_manifest(run, args).dump(2) + "\n");
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return code;
}

}  // namespace wscfi
