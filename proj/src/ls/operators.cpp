#include "hvrp/ls/operators.hpp"

#include <algorithm>
#include <vector>

namespace hvrp::ls {

namespace {

struct Best {
    double delta = std::numeric_limits<double>::infinity();
    int r1 = -1;
    std::vector<int> c1;
    int r2 = -1;
    std::vector<int> c2;
    bool found = false;

    void offer(double d, int ra, const std::vector<int>& ca, int rb = -1, const std::vector<int>* cb = nullptr) {
        if (found && d >= delta) return;
        found = true;
        delta = d;
        r1 = ra;
        c1 = ca;
        r2 = rb;
        if (cb) c2 = *cb;
    }
};

MoveResult commit(SearchState& s, Best& best, ApplyMode mode) {
    MoveResult res;
    if (!best.found) return res;
    res.applicable = true;
    res.delta = best.delta;
    const bool go = mode == ApplyMode::always || (mode == ApplyMode::if_improving && best.delta < -kImprovement);
    if (!go) return res;
    s.set_route(best.r1, std::move(best.c1));
    if (best.r2 >= 0) s.set_route(best.r2, std::move(best.c2));
    res.applied = true;
    return res;
}

double eval(const SearchState& s, int r, const std::vector<int>& seq) {
    return s.evaluate(s.route(r).depot, seq);
}

// Relocates the x-segment starting at a after b (or in front of b when b is
// first in its route), optionally reversed.
MoveResult relocate_segment(SearchState& s, int a, int b, int x, bool reversed, ApplyMode mode) {
    if (a == b) return {};
    const int ri = s.route_of(a), rj = s.route_of(b);
    const int pa = s.pos_of(a), pb = s.pos_of(b);
    const std::vector<int>& ra = s.route(ri).customers;
    if (pa + x > static_cast<int>(ra.size())) return {};
    if (ri == rj && pb >= pa && pb < pa + x) return {};

    std::vector<int> seg(ra.begin() + pa, ra.begin() + pa + x);
    if (reversed) std::reverse(seg.begin(), seg.end());
    std::vector<int> rest;
    rest.reserve(ra.size());
    rest.insert(rest.end(), ra.begin(), ra.begin() + pa);
    rest.insert(rest.end(), ra.begin() + pa + x, ra.end());

    Best best;
    std::vector<int> work;
    const auto build = [&](const std::vector<int>& base, int at) {
        work.assign(base.begin(), base.begin() + at);
        work.insert(work.end(), seg.begin(), seg.end());
        work.insert(work.end(), base.begin() + at, base.end());
    };
    if (ri == rj) {
        const int pbr = pb < pa ? pb : pb - x;
        const double old = s.route_cost(ri);
        build(rest, pbr + 1);
        best.offer(eval(s, ri, work) - old, ri, work);
        if (pb == 0) {
            build(rest, 0);
            best.offer(eval(s, ri, work) - old, ri, work);
        }
    } else {
        const std::vector<int>& rb = s.route(rj).customers;
        const double base = eval(s, ri, rest) - s.route_cost(ri) - s.route_cost(rj);
        build(rb, pb + 1);
        best.offer(base + eval(s, rj, work), ri, rest, rj, &work);
        if (pb == 0) {
            build(rb, 0);
            best.offer(base + eval(s, rj, work), ri, rest, rj, &work);
        }
    }
    return commit(s, best, mode);
}

}  // namespace

MoveResult op_exchange(SearchState& s, int a, int b, int x, int m, ApplyMode mode) {
    if (x < 1 || m < 0 || m > x || a == b) return {};
    if (m == 0) return relocate_segment(s, a, b, x, false, mode);

    const int ri = s.route_of(a), rj = s.route_of(b);
    const int pa = s.pos_of(a), pb = s.pos_of(b);
    const std::vector<int>& ra = s.route(ri).customers;
    const std::vector<int>& rb = s.route(rj).customers;
    if (pa + x > static_cast<int>(ra.size()) || pb + m > static_cast<int>(rb.size())) return {};

    Best best;
    if (ri == rj) {
        if (pa < pb + m && pb < pa + x) return {};
        // Order the two segments by position: [lo, lo+len_lo) before [hi, hi+len_hi).
        const bool a_first = pa < pb;
        const int lo = a_first ? pa : pb, lo_len = a_first ? x : m;
        const int hi = a_first ? pb : pa, hi_len = a_first ? m : x;
        std::vector<int> work;
        work.reserve(ra.size());
        work.insert(work.end(), ra.begin(), ra.begin() + lo);
        work.insert(work.end(), ra.begin() + hi, ra.begin() + hi + hi_len);
        work.insert(work.end(), ra.begin() + lo + lo_len, ra.begin() + hi);
        work.insert(work.end(), ra.begin() + lo, ra.begin() + lo + lo_len);
        work.insert(work.end(), ra.begin() + hi + hi_len, ra.end());
        best.offer(eval(s, ri, work) - s.route_cost(ri), ri, work);
    } else {
        std::vector<int> ni, nj;
        ni.insert(ni.end(), ra.begin(), ra.begin() + pa);
        ni.insert(ni.end(), rb.begin() + pb, rb.begin() + pb + m);
        ni.insert(ni.end(), ra.begin() + pa + x, ra.end());
        nj.insert(nj.end(), rb.begin(), rb.begin() + pb);
        nj.insert(nj.end(), ra.begin() + pa, ra.begin() + pa + x);
        nj.insert(nj.end(), rb.begin() + pb + m, rb.end());
        const double d = eval(s, ri, ni) + eval(s, rj, nj) - s.route_cost(ri) - s.route_cost(rj);
        best.offer(d, ri, ni, rj, &nj);
    }
    return commit(s, best, mode);
}

MoveResult op_move_two_reversed(SearchState& s, int a, int b, ApplyMode mode) {
    return relocate_segment(s, a, b, 2, true, mode);
}

MoveResult op_two_opt(SearchState& s, int a, int b, ApplyMode mode) {
    if (a == b) return {};
    const int r = s.route_of(a);
    if (s.route_of(b) != r) return {};
    const int i = std::min(s.pos_of(a), s.pos_of(b));
    const int j = std::max(s.pos_of(a), s.pos_of(b));
    const std::vector<int>& seq = s.route(r).customers;
    const double old = s.route_cost(r);
    Best best;
    std::vector<int> work;
    for (int from : {i + 1, i}) {
        work = seq;
        std::reverse(work.begin() + from, work.begin() + j + 1);
        best.offer(eval(s, r, work) - old, r, work);
    }
    return commit(s, best, mode);
}

MoveResult op_relocate_star(SearchState& s, int ri, int rj, ApplyMode mode) {
    if (ri == rj) return {};
    Best best;
    std::vector<int> rest, work;
    for (const auto& [from, to] : {std::pair{ri, rj}, std::pair{rj, ri}}) {
        const std::vector<int>& src = s.route(from).customers;
        const std::vector<int>& dst = s.route(to).customers;
        const double old = s.route_cost(from) + s.route_cost(to);
        for (std::size_t k = 0; k < src.size(); ++k) {
            rest = src;
            rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(k));
            const double rest_cost = eval(s, from, rest);
            for (std::size_t p = 0; p <= dst.size(); ++p) {
                work = dst;
                work.insert(work.begin() + static_cast<std::ptrdiff_t>(p), src[k]);
                best.offer(rest_cost + eval(s, to, work) - old, from, rest, to, &work);
            }
        }
    }
    return commit(s, best, mode);
}

namespace {

// Cheapest insertion of c into base at route r: returns (cost, position).
std::pair<double, std::size_t> best_insertion(const SearchState& s, int r, const std::vector<int>& base, int c,
                                              std::vector<int>& work) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t at = 0;
    for (std::size_t p = 0; p <= base.size(); ++p) {
        work = base;
        work.insert(work.begin() + static_cast<std::ptrdiff_t>(p), c);
        const double v = eval(s, r, work);
        if (v < best) {
            best = v;
            at = p;
        }
    }
    return {best, at};
}

}  // namespace

MoveResult op_swap_star(SearchState& s, int ri, int rj, ApplyMode mode) {
    if (ri == rj) return {};
    const std::vector<int>& a = s.route(ri).customers;
    const std::vector<int>& b = s.route(rj).customers;
    if (a.empty() || b.empty()) return {};
    const double old = s.route_cost(ri) + s.route_cost(rj);
    Best best;
    std::vector<int> ai, bj, work;
    for (std::size_t k = 0; k < a.size(); ++k) {
        for (std::size_t l = 0; l < b.size(); ++l) {
            ai = a;
            ai.erase(ai.begin() + static_cast<std::ptrdiff_t>(k));
            bj = b;
            bj.erase(bj.begin() + static_cast<std::ptrdiff_t>(l));
            const auto [cu, pu] = best_insertion(s, rj, bj, a[k], work);
            const auto [cv, pv] = best_insertion(s, ri, ai, b[l], work);
            const double d = cu + cv - old;
            if (best.found && d >= best.delta) continue;
            bj.insert(bj.begin() + static_cast<std::ptrdiff_t>(pu), a[k]);
            ai.insert(ai.begin() + static_cast<std::ptrdiff_t>(pv), b[l]);
            best.offer(d, ri, ai, rj, &bj);
        }
    }
    return commit(s, best, mode);
}

}  // namespace hvrp::ls
