#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Replayable operation scripts for the differential test driver.  A
// script is a seed plus a flat list of tagged operations; binary set
// operations carry their right-hand operand as a key list.  Scripts
// serialize to line-oriented text: "seed=<hex>" followed by one op per
// line.

namespace setforge::script {

// splitmix64; deterministic across platforms.
class rng {
  public:
    explicit rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, n); n = 0 yields 0.
    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }

    // Uniform in [0, 100).
    int percent() { return static_cast<int>(below(100)); }

    bool chance(int pct) { return percent() < pct; }

  private:
    std::uint64_t state_;
};

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    rng r(seed ^ (0xD1B54A32D192ED03ULL * (index + 1)));
    return r.next();
}

enum class opcode {
    from_list,        // replace the working set with fromList(keys)
    insert,           // insert keys[0]
    erase,            // delete keys[0]
    union_with,       // working := union(working, fromList(keys))
    intersect_with,   // working := intersection(working, fromList(keys))
    difference_with,  // working := difference(working, fromList(keys))
    filter_parity,    // keep only even or only odd keys
    split_at_key,     // split at keys[0], check both halves, relink
    fold_check,       // assert the fold laws on the working set
};

struct op {
    opcode code;
    bool keep_odd = false;           // filter_parity only
    std::vector<std::uint64_t> keys;
};

struct op_script {
    std::uint64_t seed = 0;
    std::vector<op> ops;
};

inline std::string_view opcode_name(opcode c) {
    switch (c) {
        case opcode::from_list: return "fromlist";
        case opcode::insert: return "insert";
        case opcode::erase: return "delete";
        case opcode::union_with: return "union-with";
        case opcode::intersect_with: return "intersect-with";
        case opcode::difference_with: return "difference-with";
        case opcode::filter_parity: return "filter";
        case opcode::split_at_key: return "split";
        case opcode::fold_check: return "fold-check";
    }
    return "?";
}

inline std::string to_text(const op_script& s) {
    char seed_buf[32];
    std::snprintf(seed_buf, sizeof seed_buf, "seed=%016llx",
                  static_cast<unsigned long long>(s.seed));
    std::string out = seed_buf;
    out += '\n';
    for (const op& o : s.ops) {
        out += opcode_name(o.code);
        if (o.code == opcode::filter_parity) {
            out += o.keep_odd ? " odd" : " even";
        } else {
            for (std::uint64_t k : o.keys) {
                out += ' ';
                out += std::to_string(k);
            }
        }
        out += '\n';
    }
    return out;
}

// Inverse of to_text; returns nothing on malformed input.
inline std::optional<op_script> from_text(std::string_view text) {
    op_script s;
    bool have_seed = false;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        if (line.empty()) continue;
        if (!have_seed) {
            if (!line.starts_with("seed=")) return std::nullopt;
            std::uint64_t v = 0;
            const auto* b = line.data() + 5;
            const auto* e = line.data() + line.size();
            if (std::from_chars(b, e, v, 16).ptr != e) return std::nullopt;
            s.seed = v;
            have_seed = true;
            continue;
        }
        const std::size_t sp = line.find(' ');
        const std::string_view name = line.substr(0, sp);
        std::string_view rest = sp == std::string_view::npos ? std::string_view{} : line.substr(sp + 1);
        op o;
        if (name == "fromlist") o.code = opcode::from_list;
        else if (name == "insert") o.code = opcode::insert;
        else if (name == "delete") o.code = opcode::erase;
        else if (name == "union-with") o.code = opcode::union_with;
        else if (name == "intersect-with") o.code = opcode::intersect_with;
        else if (name == "difference-with") o.code = opcode::difference_with;
        else if (name == "filter") o.code = opcode::filter_parity;
        else if (name == "split") o.code = opcode::split_at_key;
        else if (name == "fold-check") o.code = opcode::fold_check;
        else return std::nullopt;
        if (o.code == opcode::filter_parity) {
            if (rest == "odd") o.keep_odd = true;
            else if (rest != "even") return std::nullopt;
        } else {
            while (!rest.empty()) {
                const std::size_t k = rest.find(' ');
                const std::string_view tok = rest.substr(0, k);
                rest = k == std::string_view::npos ? std::string_view{} : rest.substr(k + 1);
                if (tok.empty()) continue;
                std::uint64_t v = 0;
                if (std::from_chars(tok.data(), tok.data() + tok.size(), v).ptr !=
                    tok.data() + tok.size())
                    return std::nullopt;
                o.keys.push_back(v);
            }
        }
        s.ops.push_back(std::move(o));
    }
    if (!have_seed) return std::nullopt;
    return s;
}

// Key sequences mix uniform draws with ascending runs and dense clusters,
// so both sparse branching and packed tip bitmaps get exercised.
inline std::vector<std::uint64_t> gen_keys(rng& r, std::size_t n, std::uint64_t range) {
    std::vector<std::uint64_t> keys;
    keys.reserve(n);
    const int mode = r.percent();
    if (mode < 60) {
        for (std::size_t i = 0; i < n; ++i) keys.push_back(r.below(range));
    } else if (mode < 80) {
        std::uint64_t k = r.below(range);
        const std::uint64_t step = 1 + r.below(3);
        for (std::size_t i = 0; i < n; ++i) {
            keys.push_back(k % range);
            k += step;
        }
    } else {
        const std::uint64_t base = r.below(range);
        for (std::size_t i = 0; i < n; ++i) keys.push_back((base + r.below(64)) % range);
    }
    return keys;
}

inline std::uint64_t pick_range(rng& r) {
    static constexpr std::uint64_t ranges[] = {
        16, 64, 256, 1024, 65536, std::uint64_t{1} << 32, std::uint64_t{1} << 62};
    return ranges[r.below(std::size(ranges))];
}

// A mixed workload script for the lockstep runner.
inline op_script generate_script(std::uint64_t seed, int num_ops) {
    op_script s;
    s.seed = seed;
    rng r(seed);
    const std::uint64_t range = pick_range(r);
    s.ops.reserve(static_cast<std::size_t>(num_ops));
    for (int i = 0; i < num_ops; ++i) {
        const int roll = r.percent();
        op o;
        if (roll < 35) {
            o.code = opcode::insert;
            o.keys = {r.below(range)};
        } else if (roll < 50) {
            o.code = opcode::erase;
            o.keys = {r.below(range)};
        } else if (roll < 60) {
            o.code = opcode::union_with;
            o.keys = gen_keys(r, r.below(24), range);
        } else if (roll < 68) {
            o.code = opcode::intersect_with;
            o.keys = gen_keys(r, r.below(24), range);
        } else if (roll < 76) {
            o.code = opcode::difference_with;
            o.keys = gen_keys(r, r.below(24), range);
        } else if (roll < 84) {
            o.code = opcode::from_list;
            o.keys = gen_keys(r, r.below(32), range);
        } else if (roll < 90) {
            o.code = opcode::filter_parity;
            o.keep_odd = r.chance(50);
        } else if (roll < 96) {
            o.code = opcode::split_at_key;
            o.keys = {r.below(range)};
        } else {
            o.code = opcode::fold_check;
        }
        s.ops.push_back(std::move(o));
    }
    return s;
}

// A script of exactly `arity` fromlist lines; input shape for algebraic
// properties over independently generated sets.
inline op_script generate_sets_script(std::uint64_t seed, int arity) {
    op_script s;
    s.seed = seed;
    rng r(seed);
    const std::uint64_t range = pick_range(r);
    for (int i = 0; i < arity; ++i) {
        op o;
        o.code = opcode::from_list;
        o.keys = gen_keys(r, r.below(40), range);
        s.ops.push_back(std::move(o));
    }
    return s;
}

}  // namespace setforge::script
