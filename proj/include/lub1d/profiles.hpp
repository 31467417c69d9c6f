#pragma once

// Scalar profiles on the unit interval and space-time force fields.
//
// Profiles are closed-form presets (constant, sinusoid, gaussian-bump) plus a
// tabulated piecewise-linear fallback; no arbitrary code injection, so scenario
// files stay reproducible. Every preset carries an exact antiderivative, which
// the initializer inverts to machine precision when it partitions mass.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace lub1d {

class Profile {
public:
    enum class Kind { Constant, Sinusoid, GaussianBump, Tabulated };

    static Profile constant(double value) {
        Profile p;
        p.kind_ = Kind::Constant;
        p.a_ = value;
        return p;
    }

    // offset + amplitude * sin(2*pi*k*x); integer k keeps the endpoints at `offset`.
    static Profile sinusoid(double offset, double amplitude, int wavenumber) {
        if (wavenumber == 0) throw std::invalid_argument("sinusoid wavenumber must be nonzero");
        Profile p;
        p.kind_ = Kind::Sinusoid;
        p.a_ = offset;
        p.b_ = amplitude;
        p.k_ = wavenumber;
        return p;
    }

    // base + amplitude * exp(-(x-center)^2 / (2 width^2)); amplitude may be negative.
    static Profile gaussian_bump(double base, double amplitude, double center, double width) {
        if (width <= 0.0) throw std::invalid_argument("gaussian width must be positive");
        Profile p;
        p.kind_ = Kind::GaussianBump;
        p.a_ = base;
        p.b_ = amplitude;
        p.c_ = center;
        p.w_ = width;
        return p;
    }

    // Piecewise-linear through (x[i], y[i]); x strictly increasing, spanning [0,1].
    static Profile tabulated(std::vector<double> x, std::vector<double> y) {
        if (x.size() < 2 || x.size() != y.size())
            throw std::invalid_argument("tabulated profile needs >= 2 matching knots");
        for (std::size_t i = 1; i < x.size(); ++i)
            if (!(x[i] > x[i - 1])) throw std::invalid_argument("tabulated knots must increase");
        if (x.front() > 0.0 || x.back() < 1.0)
            throw std::invalid_argument("tabulated grid must cover [0,1]");
        Profile p;
        p.kind_ = Kind::Tabulated;
        p.xs_ = std::move(x);
        p.ys_ = std::move(y);
        return p;
    }

    Kind kind() const { return kind_; }

    double operator()(double x) const {
        switch (kind_) {
            case Kind::Constant: return a_;
            case Kind::Sinusoid: return a_ + b_ * std::sin(two_pi() * k_ * x);
            case Kind::GaussianBump: {
                const double z = (x - c_) / w_;
                return a_ + b_ * std::exp(-0.5 * z * z);
            }
            case Kind::Tabulated: return eval_tabulated(x);
        }
        return 0.0;
    }

    // Exact integral over [lo, hi] (antiderivative in closed form for every kind).
    double integral(double lo, double hi) const {
        return antiderivative(hi) - antiderivative(lo);
    }

    double cdf(double x) const { return antiderivative(x) - antiderivative(0.0); }

    double min_on_unit_interval() const { return extremum(false); }
    double max_on_unit_interval() const { return extremum(true); }

    // Upper bound on the Lipschitz constant over [0,1] (exact for the presets).
    double lipschitz_bound() const {
        switch (kind_) {
            case Kind::Constant: return 0.0;
            case Kind::Sinusoid: return std::abs(b_) * two_pi() * std::abs(k_);
            case Kind::GaussianBump:
                // |d/dx| maximised at |x-c| = w.
                return std::abs(b_) * std::exp(-0.5) / w_;
            case Kind::Tabulated: {
                double m = 0.0;
                for (std::size_t i = 1; i < xs_.size(); ++i)
                    m = std::max(m, std::abs(ys_[i] - ys_[i - 1]) / (xs_[i] - xs_[i - 1]));
                return m;
            }
        }
        return 0.0;
    }

    // Accessors used by serialization.
    double param_a() const { return a_; }
    double param_b() const { return b_; }
    double param_center() const { return c_; }
    double param_width() const { return w_; }
    int param_wavenumber() const { return k_; }
    const std::vector<double>& knots_x() const { return xs_; }
    const std::vector<double>& knots_y() const { return ys_; }

    bool operator==(const Profile& o) const {
        return kind_ == o.kind_ && a_ == o.a_ && b_ == o.b_ && c_ == o.c_ && w_ == o.w_ &&
               k_ == o.k_ && xs_ == o.xs_ && ys_ == o.ys_;
    }

private:
    static constexpr double two_pi() { return 2.0 * std::numbers::pi; }

    double eval_tabulated(double x) const {
        if (x <= xs_.front()) return ys_.front();
        if (x >= xs_.back()) return ys_.back();
        const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - xs_.begin());
        const double t = (x - xs_[i - 1]) / (xs_[i] - xs_[i - 1]);
        return ys_[i - 1] + t * (ys_[i] - ys_[i - 1]);
    }

    double antiderivative(double x) const {
        switch (kind_) {
            case Kind::Constant: return a_ * x;
            case Kind::Sinusoid:
                return a_ * x - b_ / (two_pi() * k_) * std::cos(two_pi() * k_ * x);
            case Kind::GaussianBump: {
                const double s2 = std::numbers::sqrt2 * w_;
                return a_ * x +
                       b_ * w_ * std::sqrt(std::numbers::pi / 2.0) * std::erf((x - c_) / s2);
            }
            case Kind::Tabulated: return tabulated_antiderivative(x);
        }
        return 0.0;
    }

    // Piecewise-quadratic antiderivative with F(xs_[0]) = 0; linear continuation
    // outside the knot range (profile held at the end value).
    double tabulated_antiderivative(double x) const {
        if (x <= xs_.front()) return ys_.front() * (x - xs_.front());
        double acc = 0.0;
        for (std::size_t i = 1; i < xs_.size(); ++i) {
            const double x0 = xs_[i - 1], x1 = xs_[i];
            if (x >= x1) {
                acc += 0.5 * (ys_[i - 1] + ys_[i]) * (x1 - x0);
                continue;
            }
            const double t = (x - x0) / (x1 - x0);
            const double yx = ys_[i - 1] + t * (ys_[i] - ys_[i - 1]);
            acc += 0.5 * (ys_[i - 1] + yx) * (x - x0);
            return acc;
        }
        return acc + ys_.back() * (x - xs_.back());
    }

    double extremum(bool want_max) const {
        switch (kind_) {
            case Kind::Constant: return a_;
            case Kind::Sinusoid:
                // Integer wavenumber: full periods fit in [0,1], both extremes attained.
                return want_max ? a_ + std::abs(b_) : a_ - std::abs(b_);
            case Kind::GaussianBump: {
                // Candidates: the two endpoints and the center (if inside).
                double lo = std::min(operator()(0.0), operator()(1.0));
                double hi = std::max(operator()(0.0), operator()(1.0));
                if (c_ >= 0.0 && c_ <= 1.0) {
                    lo = std::min(lo, a_ + b_);
                    hi = std::max(hi, a_ + b_);
                }
                return want_max ? hi : lo;
            }
            case Kind::Tabulated: {
                double lo = ys_.front(), hi = ys_.front();
                for (double v : ys_) {
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
                return want_max ? hi : lo;
            }
        }
        return 0.0;
    }

    Kind kind_ = Kind::Constant;
    double a_ = 0.0, b_ = 0.0, c_ = 0.0, w_ = 1.0;
    int k_ = 1;
    std::vector<double> xs_, ys_;
};

// External force density f(t,x) on [0,T] x [0,1].
class ForceField {
public:
    enum class Kind { Zero, Constant, Tabulated };

    static ForceField zero() { return ForceField(); }

    static ForceField constant(double value) {
        ForceField f;
        f.kind_ = Kind::Constant;
        f.value_ = value;
        return f;
    }

    // Bilinear interpolation on a (t, x) grid; values[i][j] = f(t[i], x[j]).
    static ForceField tabulated(std::vector<double> t, std::vector<double> x,
                                std::vector<std::vector<double>> values) {
        if (t.size() < 2 || x.size() < 2 || values.size() != t.size())
            throw std::invalid_argument("tabulated force needs a full (t,x) grid");
        for (const auto& row : values)
            if (row.size() != x.size()) throw std::invalid_argument("ragged force table");
        for (std::size_t i = 1; i < t.size(); ++i)
            if (!(t[i] > t[i - 1])) throw std::invalid_argument("force t-knots must increase");
        for (std::size_t j = 1; j < x.size(); ++j)
            if (!(x[j] > x[j - 1])) throw std::invalid_argument("force x-knots must increase");
        ForceField f;
        f.kind_ = Kind::Tabulated;
        f.ts_ = std::move(t);
        f.xs_ = std::move(x);
        f.values_ = std::move(values);
        return f;
    }

    Kind kind() const { return kind_; }
    bool is_zero() const { return kind_ == Kind::Zero; }

    double operator()(double t, double x) const {
        switch (kind_) {
            case Kind::Zero: return 0.0;
            case Kind::Constant: return value_;
            case Kind::Tabulated: return eval_bilinear(t, x);
        }
        return 0.0;
    }

    // Grid must cover [0,T] x [0,1] for the scenario horizon T.
    bool covers(double horizon) const {
        if (kind_ != Kind::Tabulated) return true;
        return ts_.front() <= 0.0 && ts_.back() >= horizon && xs_.front() <= 0.0 &&
               xs_.back() >= 1.0;
    }

    // sup_x |f(t,x)|; a bilinear slice is piecewise linear in x, so knots suffice.
    double linf_norm_at(double t) const {
        switch (kind_) {
            case Kind::Zero: return 0.0;
            case Kind::Constant: return std::abs(value_);
            case Kind::Tabulated: {
                double m = 0.0;
                for (double x : xs_) m = std::max(m, std::abs(eval_bilinear(t, x)));
                m = std::max(m, std::abs(eval_bilinear(t, 0.0)));
                m = std::max(m, std::abs(eval_bilinear(t, 1.0)));
                return m;
            }
        }
        return 0.0;
    }

    // ||f(t,.)||_{L1(0,1)}, exact for the piecewise-linear-in-x slice.
    double l1_norm_at(double t) const {
        switch (kind_) {
            case Kind::Zero: return 0.0;
            case Kind::Constant: return std::abs(value_);
            case Kind::Tabulated: {
                double acc = 0.0;
                double xa = 0.0, fa = eval_bilinear(t, 0.0);
                for (std::size_t j = 0; j <= xs_.size(); ++j) {
                    const double xb = (j < xs_.size()) ? xs_[j] : 1.0;
                    if (xb <= xa) continue;
                    if (xb > 1.0) break;
                    const double fb = eval_bilinear(t, xb);
                    acc += abs_linear_integral(fa, fb, xb - xa);
                    xa = xb;
                    fa = fb;
                }
                if (xa < 1.0) acc += abs_linear_integral(fa, eval_bilinear(t, 1.0), 1.0 - xa);
                return acc;
            }
        }
        return 0.0;
    }

    const std::vector<double>& knots_t() const { return ts_; }
    const std::vector<double>& knots_x() const { return xs_; }
    const std::vector<std::vector<double>>& table() const { return values_; }
    double constant_value() const { return value_; }

    bool operator==(const ForceField& o) const {
        return kind_ == o.kind_ && value_ == o.value_ && ts_ == o.ts_ && xs_ == o.xs_ &&
               values_ == o.values_;
    }

private:
    // Integral of |linear segment| running from fa to fb over length h.
    static double abs_linear_integral(double fa, double fb, double h) {
        if (fa * fb >= 0.0) return 0.5 * std::abs(fa + fb) * h;
        const double xc = fa / (fa - fb);  // sign change, in [0,1]
        return 0.5 * (std::abs(fa) * xc + std::abs(fb) * (1.0 - xc)) * h;
    }

    double eval_bilinear(double t, double x) const {
        const double tc = std::clamp(t, ts_.front(), ts_.back());
        const double xc = std::clamp(x, xs_.front(), xs_.back());
        const auto ti = segment_index(ts_, tc);
        const auto xi = segment_index(xs_, xc);
        const double at = (tc - ts_[ti]) / (ts_[ti + 1] - ts_[ti]);
        const double ax = (xc - xs_[xi]) / (xs_[xi + 1] - xs_[xi]);
        const double f00 = values_[ti][xi], f01 = values_[ti][xi + 1];
        const double f10 = values_[ti + 1][xi], f11 = values_[ti + 1][xi + 1];
        return (1 - at) * ((1 - ax) * f00 + ax * f01) + at * ((1 - ax) * f10 + ax * f11);
    }

    static std::size_t segment_index(const std::vector<double>& knots, double v) {
        const auto it = std::upper_bound(knots.begin(), knots.end(), v);
        std::size_t i = static_cast<std::size_t>(it - knots.begin());
        if (i == 0) return 0;
        if (i >= knots.size()) return knots.size() - 2;
        return i - 1;
    }

    Kind kind_ = Kind::Zero;
    double value_ = 0.0;
    std::vector<double> ts_, xs_;
    std::vector<std::vector<double>> values_;
};

}  // namespace lub1d
