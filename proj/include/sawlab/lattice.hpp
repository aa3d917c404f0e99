// Integer cubic-lattice geometry: sites, walks, the 48 signed-permutation
// symmetries, occupancy indexing and exact small-N enumeration.
#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <vector>

namespace sawlab {

struct Point {
    std::int32_t x = 0, y = 0, z = 0;

    friend constexpr Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend constexpr Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend constexpr bool operator==(Point a, Point b) { return a.x == b.x && a.y == b.y && a.z == b.z; }
    friend constexpr bool operator!=(Point a, Point b) { return !(a == b); }

    constexpr std::int32_t operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
    constexpr std::int64_t norm2() const {
        return std::int64_t(x) * x + std::int64_t(y) * y + std::int64_t(z) * z;
    }
};

// Walk = ordered site sequence; sites.size() == n_steps + 1, sites[0] == origin.
using Walk = std::vector<Point>;

inline int n_steps(const Walk& w) { return static_cast<int>(w.size()) - 1; }

// Signed permutation of the coordinate axes. out[i] = sign[i] * p[perm[i]].
struct Symmetry {
    std::array<std::int8_t, 3> perm{0, 1, 2};
    std::array<std::int8_t, 3> sign{1, 1, 1};

    constexpr Point apply(Point p) const {
        return {sign[0] * p[perm[0]], sign[1] * p[perm[1]], sign[2] * p[perm[2]]};
    }
    constexpr bool is_identity() const {
        return perm == std::array<std::int8_t, 3>{0, 1, 2} && sign == std::array<std::int8_t, 3>{1, 1, 1};
    }
    friend constexpr bool operator==(const Symmetry& a, const Symmetry& b) {
        return a.perm == b.perm && a.sign == b.sign;
    }
};

inline Point apply_symmetry(const Symmetry& g, Point p) { return g.apply(p); }

// (a*b)(p) = a(b(p))
inline Symmetry compose(const Symmetry& a, const Symmetry& b) {
    Symmetry c;
    for (int i = 0; i < 3; ++i) {
        c.perm[i] = b.perm[a.perm[i]];
        c.sign[i] = static_cast<std::int8_t>(a.sign[i] * b.sign[a.perm[i]]);
    }
    return c;
}

inline Symmetry inverse(const Symmetry& g) {
    Symmetry inv;
    for (int i = 0; i < 3; ++i) {
        inv.perm[g.perm[i]] = static_cast<std::int8_t>(i);
        inv.sign[g.perm[i]] = g.sign[i];
    }
    return inv;
}

// All 48 symmetries of the cubic lattice; index 0 is the identity.
inline const std::vector<Symmetry>& symmetry_group() {
    static const std::vector<Symmetry> group = [] {
        std::vector<Symmetry> g;
        g.reserve(48);
        std::array<std::int8_t, 3> perm{0, 1, 2};
        std::array<std::array<std::int8_t, 3>, 6> perms{};
        int np = 0;
        std::array<std::int8_t, 3> p = perm;
        // enumerate the 6 permutations in a fixed order, identity first
        do {
            perms[np++] = p;
        } while (std::next_permutation(p.begin(), p.end()));
        for (int pi = 0; pi < 6; ++pi)
            for (int s = 0; s < 8; ++s)
                g.push_back(Symmetry{perms[pi],
                                     {std::int8_t(s & 1 ? -1 : 1), std::int8_t(s & 2 ? -1 : 1),
                                      std::int8_t(s & 4 ? -1 : 1)}});
        return g;
    }();
    return group;
}

// 64-bit packing of a site; valid for |coord| < 2^20.
constexpr std::int32_t kPackOffset = 1 << 20;

inline std::uint64_t pack_site(Point p) {
    return (std::uint64_t(std::uint32_t(p.x + kPackOffset)) << 42) |
           (std::uint64_t(std::uint32_t(p.y + kPackOffset)) << 21) |
           std::uint64_t(std::uint32_t(p.z + kPackOffset));
}

// Open-addressing site -> walk-index map used for occupancy tests.
// Entries are never deleted; a lookup is validated against the walk array,
// and the table is rebuilt from the walk when it fills up. Duplicate keys
// may coexist (stale entries); probes scan the full cluster. Keys and
// indices live in separate arrays so probing only touches the key array.
class SiteIndex {
  public:
    explicit SiteIndex(std::size_t capacity_hint = 64) { reset_capacity(capacity_hint); }

    void reset_capacity(std::size_t n_sites) {
        std::size_t cap = 64;
        while (cap < 8 * (n_sites + 1)) cap <<= 1;
        keys_.assign(cap, kEmpty);
        idx_.assign(cap, -1);
        mask_ = cap - 1;
        occupied_ = 0;
        shift_ = 64 - std::countr_zero(cap);
    }

    void clear() {
        std::fill(keys_.begin(), keys_.end(), kEmpty);
        occupied_ = 0;
    }

    bool needs_rebuild() const { return occupied_ > (keys_.size() >> 1); }

    void insert(std::uint64_t key, std::int32_t idx) {
        std::size_t s = slot_of(key);
        while (keys_[s] != kEmpty) s = (s + 1) & mask_;
        keys_[s] = key;
        idx_[s] = idx;
        ++occupied_;
    }

    // Visits every entry whose key matches; pred(idx) decides whether the
    // entry counts as a hit (the caller checks liveness + side there).
    template <class Pred>
    bool contains_if(std::uint64_t key, Pred&& pred) const {
        std::size_t s = slot_of(key);
        while (keys_[s] != kEmpty) {
            if (keys_[s] == key && pred(idx_[s])) return true;
            s = (s + 1) & mask_;
        }
        return false;
    }

  private:
    static constexpr std::uint64_t kEmpty = ~std::uint64_t(0);

    std::size_t slot_of(std::uint64_t key) const {
        return (key * 0x9E3779B97F4A7C15ull) >> shift_;
    }

    std::vector<std::uint64_t> keys_;
    std::vector<std::int32_t> idx_;
    std::size_t mask_ = 0;
    std::size_t occupied_ = 0;
    int shift_ = 0;
};

enum class Constraint { FullSpace, HalfSpace };

inline Point axis_step(int axis_index, int dir) {
    Point p;
    if (axis_index == 0) p.x = dir;
    else if (axis_index == 1) p.y = dir;
    else p.z = dir;
    return p;
}

// Straight N-step walk from the origin along a unit axis direction.
inline Walk new_rod(int n, Point axis) {
    if (n < 1) throw std::invalid_argument("new_rod: N must be >= 1");
    if (axis.norm2() != 1) throw std::invalid_argument("new_rod: axis must be a unit lattice vector");
    Walk w(n + 1);
    Point s{0, 0, 0};
    for (int i = 0; i <= n; ++i) {
        w[i] = s;
        s = s + axis;
    }
    return w;
}

// Distinctness of all sites. Precondition: nearest-neighbor path from origin.
inline bool is_self_avoiding(const Walk& w) {
    SiteIndex idx(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        const std::uint64_t key = pack_site(w[i]);
        if (idx.contains_if(key, [&](std::int32_t j) { return w[j] == w[i]; })) return false;
        idx.insert(key, static_cast<std::int32_t>(i));
    }
    return true;
}

// Full structural check, used by tests and debug assertions.
inline bool is_valid_walk(const Walk& w, Constraint c = Constraint::FullSpace) {
    if (w.size() < 2) return false;
    if (!(w[0] == Point{0, 0, 0})) return false;
    for (std::size_t i = 1; i < w.size(); ++i) {
        if ((w[i] - w[i - 1]).norm2() != 1) return false;
        if (c == Constraint::HalfSpace && w[i].z < 1) return false;
    }
    return is_self_avoiding(w);
}

struct EnumerationResult {
    int n_steps = 0;
    std::uint64_t count = 0;
};

namespace detail {

// Dense occupancy grid over the [-N, N]^3 cube (N <= 10, so at most 21^3 cells).
class EnumGrid {
  public:
    explicit EnumGrid(int n) : n_(n), dim_(2 * n + 1), cells_(std::size_t(dim_) * dim_ * dim_, 0) {}
    bool occupied(Point p) const { return cells_[cell(p)] != 0; }
    void set(Point p) { cells_[cell(p)] = 1; }
    void unset(Point p) { cells_[cell(p)] = 0; }

  private:
    std::size_t cell(Point p) const {
        return (std::size_t(p.x + n_) * dim_ + std::size_t(p.y + n_)) * dim_ + std::size_t(p.z + n_);
    }
    int n_, dim_;
    std::vector<std::uint8_t> cells_;
};

template <class Visitor>
void enumerate_rec(Walk& w, EnumGrid& grid, int remaining, Constraint c, std::uint64_t& count,
                   Visitor&& visit) {
    if (remaining == 0) {
        ++count;
        visit(const_cast<const Walk&>(w));
        return;
    }
    const Point cur = w.back();
    for (int axis = 0; axis < 3; ++axis) {
        for (int dir = -1; dir <= 1; dir += 2) {
            const Point next = cur + axis_step(axis, dir);
            if (c == Constraint::HalfSpace && next.z < 1) continue;
            if (grid.occupied(next)) continue;
            grid.set(next);
            w.push_back(next);
            enumerate_rec(w, grid, remaining - 1, c, count, visit);
            w.pop_back();
            grid.unset(next);
        }
    }
}

}  // namespace detail

constexpr int kEnumerationLimit = 10;

// Exact depth-first enumeration of N-step SAWs from the origin. The visitor
// (if any) is invoked once per walk.
template <class Visitor>
EnumerationResult enumerate_saws(int n, Constraint c, Visitor&& visit) {
    if (n < 1) throw std::invalid_argument("enumerate_saws: N must be >= 1");
    if (n > kEnumerationLimit)
        throw std::invalid_argument("enumerate_saws: N exceeds enumeration guard (10)");
    detail::EnumGrid grid(n);
    Walk w;
    w.reserve(n + 1);
    w.push_back({0, 0, 0});
    grid.set({0, 0, 0});
    std::uint64_t count = 0;
    detail::enumerate_rec(w, grid, n, c, count, visit);
    return {n, count};
}

inline EnumerationResult enumerate_saws(int n, Constraint c = Constraint::FullSpace) {
    return enumerate_saws(n, c, [](const Walk&) {});
}

}  // namespace sawlab
