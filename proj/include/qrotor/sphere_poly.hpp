#pragma once

// Exact polynomial functions on the sphere S^{k-1} in R^k, with variables
// x_1..x_k and coefficients in the Gaussian rationals. Elements live in the
// quotient ring modulo (x_1^2 + ... + x_k^2 - 1); the canonical form keeps
// the exponent of the last variable below 2 by rewriting
//   x_k^2  ->  1 - sum_{i<k} x_i^2
// to a fixpoint. Equality of canonical forms is equality of functions on
// the sphere, so identity checks built on this type are zero-tolerance.

#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qrotor/rational.hpp"

namespace qrotor {

using Mono = std::vector<int>;  // exponent vector, one entry per variable

namespace detail {

using TermMap = std::map<Mono, GaussianRational>;

inline void add_term(TermMap& m, const Mono& e, const GaussianRational& c) {
    if (c.is_zero()) return;
    auto it = m.find(e);
    if (it == m.end()) {
        m.emplace(e, c);
    } else {
        it->second += c;
        if (it->second.is_zero()) m.erase(it);
    }
}

inline TermMap raw_mul(const TermMap& a, const TermMap& b, int k) {
    TermMap out;
    Mono e(k);
    for (const auto& [ea, ca] : a)
        for (const auto& [eb, cb] : b) {
            for (int i = 0; i < k; ++i) e[i] = ea[i] + eb[i];
            add_term(out, e, ca * cb);
        }
    return out;
}

// d/dx_i on the plain polynomial ring (does not respect the quotient).
inline TermMap raw_diff(const TermMap& a, int i) {
    TermMap out;
    for (const auto& [e, c] : a) {
        if (e[i] == 0) continue;
        Mono d = e;
        --d[i];
        add_term(out, d, GaussianRational(Rational(e[i])) * c);
    }
    return out;
}

}  // namespace detail

class SpherePoly {
public:
    explicit SpherePoly(int k) : k_(k) {
        if (k < 2) throw std::invalid_argument("SpherePoly: need k >= 2");
    }

    static SpherePoly zero(int k) { return SpherePoly(k); }
    static SpherePoly constant(int k, GaussianRational c) {
        SpherePoly p(k);
        detail::add_term(p.terms_, Mono(k, 0), c);
        return p;
    }
    static SpherePoly variable(int k, int i) {  // x_i, 1-based
        check_index(k, i);
        SpherePoly p(k);
        Mono e(k, 0);
        e[i - 1] = 1;
        detail::add_term(p.terms_, e, GaussianRational(1));
        return p;
    }
    static SpherePoly monomial(int k, const Mono& e,
                               GaussianRational c = GaussianRational(1)) {
        if (int(e.size()) != k) throw std::invalid_argument("monomial: bad exponent length");
        SpherePoly p(k);
        detail::add_term(p.terms_, e, c);
        p.reduce_in_place();
        return p;
    }
    static SpherePoly from_terms(int k, detail::TermMap terms) {
        SpherePoly p(k);
        p.terms_ = std::move(terms);
        p.reduce_in_place();
        return p;
    }

    int k() const { return k_; }
    const detail::TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    int degree() const {
        int d = 0;
        for (const auto& [e, c] : terms_) {
            int t = 0;
            for (int v : e) t += v;
            if (t > d) d = t;
        }
        return d;
    }

    friend SpherePoly operator+(const SpherePoly& a, const SpherePoly& b) {
        a.check_same(b);
        SpherePoly out = a;
        for (const auto& [e, c] : b.terms_) detail::add_term(out.terms_, e, c);
        return out;  // sum of canonical forms is canonical
    }
    friend SpherePoly operator-(const SpherePoly& a, const SpherePoly& b) {
        a.check_same(b);
        SpherePoly out = a;
        for (const auto& [e, c] : b.terms_) detail::add_term(out.terms_, e, -c);
        return out;
    }
    SpherePoly operator-() const {
        SpherePoly out(k_);
        for (const auto& [e, c] : terms_) out.terms_.emplace(e, -c);
        return out;
    }
    friend SpherePoly operator*(const SpherePoly& a, const SpherePoly& b) {
        a.check_same(b);
        return from_terms(a.k_, detail::raw_mul(a.terms_, b.terms_, a.k_));
    }
    friend SpherePoly operator*(const GaussianRational& c, const SpherePoly& a) {
        SpherePoly out(a.k_);
        for (const auto& [e, t] : a.terms_) detail::add_term(out.terms_, e, c * t);
        return out;
    }

    friend bool operator==(const SpherePoly& a, const SpherePoly& b) {
        return a.k_ == b.k_ && a.terms_ == b.terms_;
    }
    friend bool operator!=(const SpherePoly& a, const SpherePoly& b) { return !(a == b); }

    std::string str() const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto& [e, c] : terms_) {
            if (!first) os << " + ";
            first = false;
            os << "(" << c.str() << ")";
            std::string m = mono_str(e);
            if (m != "1") os << "*" << m;
        }
        return os.str();
    }

    static std::string mono_str(const Mono& e) {
        std::ostringstream os;
        bool any = false;
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (e[i] == 0) continue;
            if (any) os << "*";
            any = true;
            os << "x" << (i + 1);
            if (e[i] > 1) os << "^" << e[i];
        }
        return any ? os.str() : "1";
    }

private:
    static void check_index(int k, int i) {
        if (i < 1 || i > k) throw std::out_of_range("SpherePoly: variable index");
    }
    void check_same(const SpherePoly& o) const {
        if (k_ != o.k_) throw std::invalid_argument("SpherePoly: dimension mismatch");
    }

    // Rewrite x_k^2 -> 1 - sum_{i<k} x_i^2 until the last exponent is <= 1.
    void reduce_in_place() {
        for (;;) {
            auto it = terms_.begin();
            for (; it != terms_.end(); ++it)
                if (it->first[k_ - 1] >= 2) break;
            if (it == terms_.end()) return;
            Mono e = it->first;
            GaussianRational c = it->second;
            terms_.erase(it);
            Mono base = e;
            base[k_ - 1] -= 2;
            detail::add_term(terms_, base, c);  // the "1" branch
            for (int i = 0; i < k_ - 1; ++i) {
                Mono m = base;
                m[i] += 2;
                detail::add_term(terms_, m, -c);
            }
        }
    }

    int k_;
    detail::TermMap terms_;
};

// reduce: canonicalize an arbitrary exponent->coefficient map.
inline SpherePoly reduce(int k, const detail::TermMap& raw_terms) {
    return SpherePoly::from_terms(k, raw_terms);
}

}  // namespace qrotor
