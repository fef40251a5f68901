#pragma once

// Independent re-implementations of the defining formulas. They share no code
// with the library beyond its data types and deliberately take the naive
// route (direct products, explicit normal equations, exhaustive scans).

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "fb/cart/cart.hpp"
#include "fb/core/dataset.hpp"
#include "fb/core/tsk.hpp"
#include "fb/moe/moe.hpp"
#include "fb/rbfn/rbfn.hpp"

namespace oracle {

inline double gauss(double x, double c, double s) { return std::exp(-(x - c) * (x - c) / (2.0 * s * s)); }
inline double sig_up(double x, double a, double t) { return 1.0 / (1.0 + std::exp(-a * (x - t))); }
inline double sig_down(double x, double a, double t) { return 1.0 / (1.0 + std::exp(a * (x - t))); }

inline double grade(const fb::MembershipFunction& mf, double x)
{
    const auto& s = mf.shape();
    if (const auto* g = std::get_if<fb::Gaussian>(&s))
        return gauss(x, g->center, g->width);
    if (const auto* u = std::get_if<fb::SigmoidUp>(&s))
        return sig_up(x, u->steepness, u->threshold);
    const auto& d = std::get<fb::SigmoidDown>(s);
    return sig_down(x, d.steepness, d.threshold);
}

inline double affine(const fb::Affine& a, std::span<const double> x)
{
    double y = a.intercept;
    for (std::size_t i = 0; i < x.size(); ++i)
        y += a.slopes[i] * x[i];
    return y;
}

inline double output(const fb::Consequent& c, std::span<const double> x)
{
    return c.affine() ? affine(*c.affine(), x) : c.constant()->value;
}

inline double firing(const fb::Rule& r, std::span<const double> x)
{
    double f = 1.0;
    for (const fb::Clause& c : r.antecedent.clauses)
        f *= grade(c.mf, x[c.feature]);
    return f;
}

inline double tsk(const fb::TskModel& m, std::span<const double> x)
{
    double num = 0.0;
    double den = 0.0;
    for (const fb::Rule& r : m.rules()) {
        const double f = firing(r, x);
        num += f * output(r.consequent, x);
        den += f;
    }
    return m.aggregation() == fb::Aggregation::WeightedSum ? num : num / den;
}

inline double rbfn(const fb::rbfn::RbfnModel& m, std::span<const double> x)
{
    double num = 0.0;
    double den = 0.0;
    for (const auto& u : m.units()) {
        double f = 1.0;
        for (std::size_t j = 0; j < u.features.size(); ++j) {
            const double w = u.width(j);
            f *= std::exp(-(x[u.features[j]] - u.centers[j]) * (x[u.features[j]] - u.centers[j]) / (w * w));
        }
        num += f * output(u.output, x);
        den += f;
    }
    return m.normalized() ? num / den : num;
}

inline std::vector<double> gate_weights(const fb::moe::MoeModel& m, std::span<const double> x)
{
    std::vector<double> e;
    for (const auto& g : m.gates()) {
        double v = 0.0;
        if (const auto* q = std::get_if<fb::moe::QuadraticGate>(&g)) {
            for (std::size_t i = 0; i < x.size(); ++i)
                v -= (x[i] - q->centers[i]) * (x[i] - q->centers[i]) / (2.0 * q->widths[i] * q->widths[i]);
        } else {
            const auto& a = std::get<fb::moe::AffineGate>(g);
            v = a.bias;
            for (std::size_t i = 0; i < x.size(); ++i)
                v += a.weights[i] * x[i];
        }
        e.push_back(std::exp(v));
    }
    double total = 0.0;
    for (double v : e)
        total += v;
    for (double& v : e)
        v /= total;
    return e;
}

inline double moe(const fb::moe::MoeModel& m, std::span<const double> x)
{
    const std::vector<double> g = gate_weights(m, x);
    double y = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k)
        y += g[k] * affine(m.experts()[k], x);
    return y;
}

inline double loss_competitive(const fb::moe::MoeModel& m, const fb::Dataset& d)
{
    double s = 0.0;
    for (std::size_t n = 0; n < d.size(); ++n) {
        const std::vector<double> g = gate_weights(m, d.row(n));
        for (std::size_t k = 0; k < g.size(); ++k) {
            const double e = d.target(n) - affine(m.experts()[k], d.row(n));
            s += g[k] * e * e;
        }
    }
    return s;
}

inline double loss_coupled(const fb::moe::MoeModel& m, const fb::Dataset& d)
{
    double s = 0.0;
    for (std::size_t n = 0; n < d.size(); ++n) {
        const double e = d.target(n) - moe(m, d.row(n));
        s += e * e;
    }
    return s;
}

// Recursive leaf enumeration for a fuzzy tree.
inline void fuzzy_leaves(const fb::cart::FuzzyRegressionTree& t, std::size_t node, double grade_so_far,
                         std::span<const double> x, double& num, double& den)
{
    const fb::cart::TreeNode& n = t.tree().node(node);
    if (n.is_leaf()) {
        num += grade_so_far * output(n.leaf, x);
        den += grade_so_far;
        return;
    }
    const double a = t.steepness(node);
    fuzzy_leaves(t, static_cast<std::size_t>(n.left), grade_so_far * sig_down(x[n.feature], a, n.threshold), x, num,
                 den);
    fuzzy_leaves(t, static_cast<std::size_t>(n.right), grade_so_far * sig_up(x[n.feature], a, n.threshold), x, num,
                 den);
}

inline double fuzzy_tree(const fb::cart::FuzzyRegressionTree& t, std::span<const double> x)
{
    double num = 0.0;
    double den = 0.0;
    fuzzy_leaves(t, 0, 1.0, x, num, den);
    return num / den;
}

inline double mse_loop(const std::vector<double>& p, const std::vector<double>& y)
{
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        s += (p[i] - y[i]) * (p[i] - y[i]);
    return s / static_cast<double>(p.size());
}

// Gauss-Jordan elimination with partial pivoting on a small dense system.
inline std::vector<double> solve(std::vector<std::vector<double>> a, std::vector<double> b)
{
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a[r][c]) > std::abs(a[p][c]))
                p = r;
        std::swap(a[c], a[p]);
        std::swap(b[c], b[p]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c)
                continue;
            const double f = a[r][c] / a[c][c];
            for (std::size_t k = c; k < n; ++k)
                a[r][k] -= f * a[c][k];
            b[r] -= f * b[c];
        }
    }
    for (std::size_t c = 0; c < n; ++c)
        b[c] /= a[c][c];
    return b;
}

// Weighted least squares for y ~ slopes . x + intercept through the normal
// equations; returns slopes followed by the intercept.
inline std::vector<double> weighted_ols(const fb::Dataset& d, const std::vector<double>& w = {})
{
    const std::size_t p = d.dim() + 1;
    std::vector<std::vector<double>> ata(p, std::vector<double>(p, 0.0));
    std::vector<double> aty(p, 0.0);
    for (std::size_t n = 0; n < d.size(); ++n) {
        std::vector<double> row(d.row(n).begin(), d.row(n).end());
        row.push_back(1.0);
        const double wn = w.empty() ? 1.0 : w[n];
        for (std::size_t i = 0; i < p; ++i) {
            aty[i] += wn * row[i] * d.target(n);
            for (std::size_t j = 0; j < p; ++j)
                ata[i][j] += wn * row[i] * row[j];
        }
    }
    return solve(ata, aty);
}

template <class F>
std::vector<double> central_difference(const std::vector<double>& p, F&& f, double h = 1e-5)
{
    std::vector<double> g(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        std::vector<double> up = p;
        std::vector<double> down = p;
        up[i] += h;
        down[i] -= h;
        g[i] = (f(up) - f(down)) / (2.0 * h);
    }
    return g;
}

// Largest per-component relative error, with a floor of 1e-3 of the largest
// numeric component (components that are zero up to differencing noise).
inline double relative_error(const std::vector<double>& a, const std::vector<double>& n)
{
    double scale = 0.0;
    for (double v : n)
        scale = std::max(scale, std::abs(v));
    const double floor = std::max(1e-3 * scale, 1e-8);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, std::abs(a[i] - n[i]) / std::max({std::abs(a[i]), std::abs(n[i]), floor}));
    return worst;
}

inline double sse(const std::vector<double>& v)
{
    if (v.empty())
        return 0.0;
    double m = 0.0;
    for (double e : v)
        m += e;
    m /= static_cast<double>(v.size());
    double s = 0.0;
    for (double e : v)
        s += (e - m) * (e - m);
    return s;
}

struct Split {
    std::size_t feature = 0;
    double threshold = 0.0;
    double reduction = -1.0;
};

// Every midpoint between consecutive distinct values of every feature.
inline Split best_split(const fb::Dataset& d)
{
    std::vector<double> all(d.targets().begin(), d.targets().end());
    const double total = sse(all);
    Split best;
    for (std::size_t f = 0; f < d.dim(); ++f) {
        std::vector<double> values;
        for (std::size_t n = 0; n < d.size(); ++n)
            values.push_back(d.row(n)[f]);
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
        for (std::size_t i = 0; i + 1 < values.size(); ++i) {
            const double t = 0.5 * (values[i] + values[i + 1]);
            std::vector<double> left;
            std::vector<double> right;
            for (std::size_t n = 0; n < d.size(); ++n)
                (d.row(n)[f] < t ? left : right).push_back(d.target(n));
            const double r = total - sse(left) - sse(right);
            if (r > best.reduction)
                best = Split{f, t, r};
        }
    }
    return best;
}

inline double split_reduction(const fb::Dataset& d, std::size_t f, double t)
{
    std::vector<double> all(d.targets().begin(), d.targets().end());
    std::vector<double> left;
    std::vector<double> right;
    for (std::size_t n = 0; n < d.size(); ++n)
        (d.row(n)[f] < t ? left : right).push_back(d.target(n));
    return sse(all) - sse(left) - sse(right);
}

}  // namespace oracle
