#pragma once

// First-order operators on the sphere and the machine-checked catalogue of
// their algebraic relations.
//
// Conventions (used consistently across the library):
//   * the sphere is S^{k-1} in R^k; indices run 1..k;
//   * ptilde_i is the tangential derivative  d_i - x_i * (sum_j x_j d_j),
//     the directional derivative along the projected coordinate field;
//   * q_i := i*ptilde_i - (i(k-1)/2) x_i  (symmetrized momentum);
//   * v_ij := x_i d_j - x_j d_i  (real rotation generators, i < j);
//   * the Laplacian is positive semidefinite: Delta = -div grad, with
//     Delta = -sum_i ptilde_i^2 and spherical-harmonic eigenvalues
//     l(l+k-2).
//
// check_relation applies both sides of an operator identity to every
// canonical monomial up to a degree bound and compares canonical forms in
// exact arithmetic, returning the first failing monomial if any.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qrotor/sphere_poly.hpp"

namespace qrotor {

struct OperatorLabel {
    enum class Kind { X, P, Q, V, Laplacian };
    Kind kind;
    int i = 0;  // 1-based; unused for Laplacian
    int j = 0;  // only for V, requires i < j

    static OperatorLabel x(int i) { return {Kind::X, i, 0}; }
    static OperatorLabel p(int i) { return {Kind::P, i, 0}; }
    static OperatorLabel q(int i) { return {Kind::Q, i, 0}; }
    static OperatorLabel v(int i, int j) { return {Kind::V, i, j}; }
    static OperatorLabel laplacian() { return {Kind::Laplacian, 0, 0}; }
};

namespace detail {

inline TermMap tangential_derivative(const SpherePoly& f, int i) {
    // ptilde_i f = d_i f - x_i * sum_j x_j d_j f   (descends to the quotient)
    int k = f.k();
    TermMap out = raw_diff(f.terms(), i - 1);
    for (int j = 1; j <= k; ++j) {
        TermMap dj = raw_diff(f.terms(), j - 1);
        Mono shift(k, 0);
        shift[i - 1] += 1;
        shift[j - 1] += 1;
        TermMap xx;
        add_term(xx, shift, GaussianRational(-1));
        for (const auto& [e, c] : raw_mul(xx, dj, k)) add_term(out, e, c);
    }
    return out;
}

}  // namespace detail

inline SpherePoly apply(const OperatorLabel& op, const SpherePoly& f) {
    int k = f.k();
    auto check = [&](int idx) {
        if (idx < 1 || idx > k) throw std::out_of_range("apply: operator index");
    };
    switch (op.kind) {
        case OperatorLabel::Kind::X:
            check(op.i);
            return SpherePoly::variable(k, op.i) * f;
        case OperatorLabel::Kind::P:
            check(op.i);
            return SpherePoly::from_terms(k, detail::tangential_derivative(f, op.i));
        case OperatorLabel::Kind::Q: {
            check(op.i);
            GaussianRational i_unit = GaussianRational::i();
            SpherePoly pf = SpherePoly::from_terms(k, detail::tangential_derivative(f, op.i));
            GaussianRational half_div(Rational(0), Rational(k - 1, 2));
            return i_unit * pf - half_div * (SpherePoly::variable(k, op.i) * f);
        }
        case OperatorLabel::Kind::V: {
            check(op.i);
            check(op.j);
            if (op.i == op.j) throw std::invalid_argument("apply: v_ij needs i != j");
            detail::TermMap out;
            detail::TermMap di = detail::raw_diff(f.terms(), op.j - 1);
            detail::TermMap dj = detail::raw_diff(f.terms(), op.i - 1);
            Mono xi(k, 0), xj(k, 0);
            xi[op.i - 1] = 1;
            xj[op.j - 1] = 1;
            detail::TermMap mi, mj;
            detail::add_term(mi, xi, GaussianRational(1));
            detail::add_term(mj, xj, GaussianRational(1));
            out = detail::raw_mul(mi, di, k);
            for (const auto& [e, c] : detail::raw_mul(mj, dj, k))
                detail::add_term(out, e, -c);
            return SpherePoly::from_terms(k, out);
        }
        case OperatorLabel::Kind::Laplacian: {
            SpherePoly out(k);
            for (int i = 1; i <= k; ++i)
                out = out - apply(OperatorLabel::p(i), apply(OperatorLabel::p(i), f));
            return out;
        }
    }
    throw std::logic_error("apply: unreachable");
}

// --- independent Laplacian via the 0-homogeneous extension -----------------
//
// Working in the module of expressions  sum c * x^e * |x|^s  (s an integer),
// the extension of a spherical polynomial is g(x) = f(x/|x|); its Euclidean
// Laplacian restricted to |x| = 1 equals div grad f, so the positive
// Laplacian is minus that restriction.

namespace detail {

using HomogKey = std::pair<Mono, int>;  // (exponents, power of |x|)
using HomogMap = std::map<HomogKey, GaussianRational>;

inline void homog_add(HomogMap& m, const HomogKey& key, const GaussianRational& c) {
    if (c.is_zero()) return;
    auto it = m.find(key);
    if (it == m.end()) {
        m.emplace(key, c);
    } else {
        it->second += c;
        if (it->second.is_zero()) m.erase(it);
    }
}

// d/dx_i of x^e |x|^s = e_i x^{e - delta_i} |x|^s + s x^{e + delta_i} |x|^{s-2}
inline HomogMap homog_diff(const HomogMap& m, int i) {
    HomogMap out;
    for (const auto& [key, c] : m) {
        const auto& [e, s] = key;
        if (e[i] > 0) {
            Mono d = e;
            --d[i];
            homog_add(out, {d, s}, GaussianRational(Rational(e[i])) * c);
        }
        if (s != 0) {
            Mono u = e;
            ++u[i];
            homog_add(out, {u, s - 2}, GaussianRational(Rational(s)) * c);
        }
    }
    return out;
}

inline SpherePoly homog_restrict(int k, const HomogMap& m) {
    TermMap t;
    for (const auto& [key, c] : m) add_term(t, key.first, c);  // |x| = 1
    return SpherePoly::from_terms(k, t);
}

}  // namespace detail

inline SpherePoly laplacian_via_extension(const SpherePoly& f) {
    int k = f.k();
    detail::HomogMap g;
    for (const auto& [e, c] : f.terms()) {
        int deg = 0;
        for (int v : e) deg += v;
        detail::homog_add(g, {e, -deg}, c);  // x^e / |x|^deg is 0-homogeneous
    }
    detail::HomogMap lap;
    for (int i = 0; i < k; ++i) {
        detail::HomogMap dii = detail::homog_diff(detail::homog_diff(g, i), i);
        for (const auto& [key, c] : dii) detail::homog_add(lap, key, c);
    }
    return -detail::homog_restrict(k, lap);
}

// div ptilde_i computed via the Euclidean divergence of the 0-homogeneous
// extension (components delta_ij - x_i x_j / |x|^2), then compared to the
// closed form -(k-1) x_i.
inline SpherePoly divergence_of_ptilde(int i, int k) {
    if (i < 1 || i > k) throw std::out_of_range("divergence_of_ptilde: index");
    detail::HomogMap div;
    for (int j = 1; j <= k; ++j) {
        detail::HomogMap comp;
        if (j == i) detail::homog_add(comp, {Mono(k, 0), 0}, GaussianRational(1));
        Mono e(k, 0);
        e[i - 1] += 1;
        e[j - 1] += 1;
        detail::homog_add(comp, {e, -2}, GaussianRational(-1));
        for (const auto& [key, c] : detail::homog_diff(comp, j - 1))
            detail::homog_add(div, key, c);
    }
    SpherePoly result = detail::homog_restrict(k, div);
    SpherePoly closed = GaussianRational(Rational(-(k - 1))) * SpherePoly::variable(k, i);
    if (result != closed)
        throw std::logic_error("divergence_of_ptilde: extension and closed form disagree");
    return result;
}

// --- relation catalogue -----------------------------------------------------

// The catalogue states each identity in the form that verifies exactly.
// Two commutators are often quoted with the opposite sign or a missing
// factor of i; the versions below are confirmed both symbolically (every
// monomial, every k in the test range) and against the circle k = 2 where
// p_1 = -sin(t) d/dt, p_2 = cos(t) d/dt gives [p_1, p_2] = d/dt = x_1 p_2
// - x_2 p_1 and [q_1, q_2] = -d/dt = i(x_1 q_2 - x_2 q_1).
enum class RelationId {
    R1,   // [x_i, x_j] = 0
    R2,   // [p_j, x_i] = delta_ij - x_i x_j
    R3,   // [p_i, p_j] = x_i p_j - x_j p_i
    R4,   // sum_i x_i p_i = 0
    R5,   // [q_j, x_i] = i (delta_ij - x_i x_j)
    R6,   // [q_i, q_j] = i (x_i q_j - x_j q_i)
    R7,   // sum_i x_i q_i = -i(k-1)/2
    R8,   // Delta (as -sum p_i^2) matches the 0-homogeneous-extension Laplacian
    R9,   // Delta = sum q_i^2 - (k-1)^2/4
    R10,  // Delta = -sum_{i<j} v_ij^2
    R11,  // [v_ij, x_l] = delta_jl x_i - delta_il x_j
};

inline const std::vector<RelationId>& relation_catalogue() {
    static const std::vector<RelationId> all = {
        RelationId::R1, RelationId::R2, RelationId::R3, RelationId::R4,
        RelationId::R5, RelationId::R6, RelationId::R7, RelationId::R8,
        RelationId::R9, RelationId::R10, RelationId::R11};
    return all;
}

inline std::string relation_name(RelationId id) {
    switch (id) {
        case RelationId::R1: return "R1";
        case RelationId::R2: return "R2";
        case RelationId::R3: return "R3";
        case RelationId::R4: return "R4";
        case RelationId::R5: return "R5";
        case RelationId::R6: return "R6";
        case RelationId::R7: return "R7";
        case RelationId::R8: return "R8";
        case RelationId::R9: return "R9";
        case RelationId::R10: return "R10";
        case RelationId::R11: return "R11";
    }
    return "?";
}

inline std::optional<RelationId> relation_from_name(const std::string& name) {
    for (RelationId id : relation_catalogue())
        if (relation_name(id) == name) return id;
    return std::nullopt;
}

struct RelationReport {
    RelationId id;
    int k = 0;
    int degree_bound = 0;
    bool holds = false;
    std::string witness;  // empty when holds
    std::size_t monomials_checked = 0;

    std::string to_line() const {
        std::string line = relation_name(id) + " " + std::to_string(k) + " " +
                           std::to_string(degree_bound) + " " + (holds ? "PASS" : "FAIL");
        if (!holds) line += " " + witness;
        return line;
    }
};

namespace detail {

inline std::vector<Mono> canonical_monomials(int k, int degree_bound) {
    std::vector<Mono> out;
    Mono e(k, 0);
    std::function<void(int, int)> rec = [&](int pos, int left) {
        if (pos == k) {
            out.push_back(e);
            return;
        }
        int cap = (pos == k - 1) ? std::min(left, 1) : left;  // canonical: e_k <= 1
        for (int v = 0; v <= cap; ++v) {
            e[pos] = v;
            rec(pos + 1, left - v);
        }
        e[pos] = 0;
    };
    rec(0, degree_bound);
    return out;
}

// One indexed instance of a relation: names plus lhs/rhs as functions.
struct RelationCase {
    std::string label;
    std::function<SpherePoly(const SpherePoly&)> lhs;
    std::function<SpherePoly(const SpherePoly&)> rhs;
};

inline std::vector<RelationCase> relation_cases(RelationId id, int k) {
    using OL = OperatorLabel;
    std::vector<RelationCase> cases;
    auto commutator = [](OL a, OL b, const SpherePoly& f) {
        return apply(a, apply(b, f)) - apply(b, apply(a, f));
    };
    switch (id) {
        case RelationId::R1:
            for (int i = 1; i <= k; ++i)
                for (int j = i + 1; j <= k; ++j)
                    cases.push_back({"(i=" + std::to_string(i) + ",j=" + std::to_string(j) + ")",
                        [=](const SpherePoly& f) { return commutator(OL::x(i), OL::x(j), f); },
                        [=](const SpherePoly& f) { return SpherePoly::zero(f.k()); }});
            break;
        case RelationId::R2:
            for (int i = 1; i <= k; ++i)
                for (int j = 1; j <= k; ++j)
                    cases.push_back({"(i=" + std::to_string(i) + ",j=" + std::to_string(j) + ")",
                        [=](const SpherePoly& f) { return commutator(OL::p(j), OL::x(i), f); },
                        [=](const SpherePoly& f) {
                            SpherePoly rhs = (i == j)
                                ? SpherePoly::constant(f.k(), GaussianRational(1)) * f
                                : SpherePoly::zero(f.k());
                            return rhs - apply(OL::x(i), apply(OL::x(j), f));
                        }});
            break;
        case RelationId::R3:
            for (int i = 1; i <= k; ++i)
                for (int j = i + 1; j <= k; ++j)
                    cases.push_back({"(i=" + std::to_string(i) + ",j=" + std::to_string(j) + ")",
                        [=](const SpherePoly& f) { return commutator(OL::p(i), OL::p(j), f); },
                        [=](const SpherePoly& f) {
                            return apply(OL::x(i), apply(OL::p(j), f)) -
                                   apply(OL::x(j), apply(OL::p(i), f));
                        }});
            break;
        case RelationId::R4:
            cases.push_back({"",
                [=](const SpherePoly& f) {
                    SpherePoly acc(f.k());
                    for (int i = 1; i <= k; ++i)
                        acc = acc + apply(OL::x(i), apply(OL::p(i), f));
                    return acc;
                },
                [=](const SpherePoly& f) { return SpherePoly::zero(f.k()); }});
            break;
        case RelationId::R5:
            for (int i = 1; i <= k; ++i)
                for (int j = 1; j <= k; ++j)
                    cases.push_back({"(i=" + std::to_string(i) + ",j=" + std::to_string(j) + ")",
                        [=](const SpherePoly& f) { return commutator(OL::q(j), OL::x(i), f); },
                        [=](const SpherePoly& f) {
                            SpherePoly delta = (i == j)
                                ? SpherePoly::constant(f.k(), GaussianRational(1)) * f
                                : SpherePoly::zero(f.k());
                            return GaussianRational::i() *
                                   (delta - apply(OL::x(i), apply(OL::x(j), f)));
                        }});
            break;
        case RelationId::R6:
            for (int i = 1; i <= k; ++i)
                for (int j = i + 1; j <= k; ++j)
                    cases.push_back({"(i=" + std::to_string(i) + ",j=" + std::to_string(j) + ")",
                        [=](const SpherePoly& f) { return commutator(OL::q(i), OL::q(j), f); },
                        [=](const SpherePoly& f) {
                            return GaussianRational::i() *
                                   (apply(OL::x(i), apply(OL::q(j), f)) -
                                    apply(OL::x(j), apply(OL::q(i), f)));
                        }});
            break;
        case RelationId::R7:
            cases.push_back({"",
                [=](const SpherePoly& f) {
                    SpherePoly acc(f.k());
                    for (int i = 1; i <= k; ++i)
                        acc = acc + apply(OL::x(i), apply(OL::q(i), f));
                    return acc;
                },
                [=](const SpherePoly& f) {
                    return GaussianRational(Rational(0), Rational(-(k - 1), 2)) * f;
                }});
            break;
        case RelationId::R8:
            cases.push_back({"",
                [=](const SpherePoly& f) { return apply(OL::laplacian(), f); },
                [=](const SpherePoly& f) { return laplacian_via_extension(f); }});
            break;
        case RelationId::R9:
            cases.push_back({"",
                [=](const SpherePoly& f) { return apply(OL::laplacian(), f); },
                [=](const SpherePoly& f) {
                    SpherePoly acc(f.k());
                    for (int i = 1; i <= k; ++i)
                        acc = acc + apply(OL::q(i), apply(OL::q(i), f));
                    return acc - GaussianRational(Rational((k - 1) * (k - 1), 4)) * f;
                }});
            break;
        case RelationId::R10:
            cases.push_back({"",
                [=](const SpherePoly& f) { return apply(OL::laplacian(), f); },
                [=](const SpherePoly& f) {
                    SpherePoly acc(f.k());
                    for (int i = 1; i <= k; ++i)
                        for (int j = i + 1; j <= k; ++j)
                            acc = acc - apply(OL::v(i, j), apply(OL::v(i, j), f));
                    return acc;
                }});
            break;
        case RelationId::R11:
            for (int i = 1; i <= k; ++i)
                for (int j = i + 1; j <= k; ++j)
                    for (int l = 1; l <= k; ++l)
                        cases.push_back({"(i=" + std::to_string(i) + ",j=" + std::to_string(j) +
                                             ",l=" + std::to_string(l) + ")",
                            [=](const SpherePoly& f) {
                                return commutator(OL::v(i, j), OL::x(l), f);
                            },
                            [=](const SpherePoly& f) {
                                SpherePoly rhs(f.k());
                                if (j == l) rhs = rhs + apply(OL::x(i), f);
                                if (i == l) rhs = rhs - apply(OL::x(j), f);
                                return rhs;
                            }});
            break;
    }
    return cases;
}

}  // namespace detail

inline RelationReport check_relation(RelationId id, int k, int degree_bound) {
    if (degree_bound < 1) throw std::invalid_argument("check_relation: degree_bound >= 1");
    RelationReport report{id, k, degree_bound, true, "", 0};
    auto cases = detail::relation_cases(id, k);
    for (const Mono& e : detail::canonical_monomials(k, degree_bound)) {
        SpherePoly m = SpherePoly::monomial(k, e);
        ++report.monomials_checked;
        for (const auto& rc : cases) {
            if (rc.lhs(m) != rc.rhs(m)) {
                report.holds = false;
                report.witness = SpherePoly::mono_str(e) +
                                 (rc.label.empty() ? "" : " " + rc.label);
                return report;
            }
        }
    }
    return report;
}

inline RelationReport check_relation(const std::string& name, int k, int degree_bound) {
    auto id = relation_from_name(name);
    if (!id) throw std::invalid_argument("check_relation: unknown relation " + name);
    return check_relation(*id, k, degree_bound);
}

}  // namespace qrotor
