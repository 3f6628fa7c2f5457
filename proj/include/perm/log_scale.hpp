#pragma once

#include <cmath>
#include <limits>

namespace perm {

/// A scalar stored as sign plus natural-log magnitude, so products of many
/// bound factors and scaling corrections survive far beyond double range.
class LogScale {
public:
    LogScale() = default;

    static LogScale from_value(double v) {
        LogScale x;
        if (v > 0.0) {
            x.sign_ = 1;
            x.log_ = std::log(v);
        } else if (v < 0.0) {
            x.sign_ = -1;
            x.log_ = std::log(-v);
        }
        return x;
    }

    /// exp(lg), optionally negated.
    static LogScale from_log(double lg, int sign = 1) {
        LogScale x;
        if (sign != 0 && lg != -std::numeric_limits<double>::infinity()) {
            x.sign_ = sign < 0 ? -1 : 1;
            x.log_ = lg;
        }
        return x;
    }

    static LogScale one() { return from_log(0.0); }

    double log() const { return log_; }
    int sign() const { return sign_; }
    bool zero() const { return sign_ == 0; }

    /// Plain double; overflows to +-inf / underflows to 0 outside range.
    double value() const { return sign_ == 0 ? 0.0 : sign_ * std::exp(log_); }

    LogScale operator*(const LogScale& o) const {
        LogScale r;
        if (sign_ != 0 && o.sign_ != 0) {
            r.sign_ = sign_ * o.sign_;
            r.log_ = log_ + o.log_;
        }
        return r;
    }

    LogScale operator/(const LogScale& o) const {
        LogScale r;
        if (sign_ != 0 && o.sign_ != 0) {
            r.sign_ = sign_ * o.sign_;
            r.log_ = log_ - o.log_;
        }
        return r;
    }

    LogScale operator*(double v) const { return *this * from_value(v); }

    LogScale operator+(const LogScale& o) const {
        if (sign_ == 0) return o;
        if (o.sign_ == 0) return *this;
        if (sign_ == o.sign_) return from_log(log_add(log_, o.log_), sign_);
        // opposite signs: subtract the smaller magnitude
        if (log_ == o.log_) return LogScale();
        if (log_ > o.log_) return from_log(log_sub(log_, o.log_), sign_);
        return from_log(log_sub(o.log_, log_), o.sign_);
    }

    LogScale operator-(const LogScale& o) const {
        LogScale n = o;
        n.sign_ = -n.sign_;
        return *this + n;
    }

    bool operator<(const LogScale& o) const {
        if (sign_ != o.sign_) return sign_ < o.sign_;
        if (sign_ == 0) return false;
        return sign_ > 0 ? log_ < o.log_ : log_ > o.log_;
    }
    bool operator>(const LogScale& o) const { return o < *this; }

private:
    static double log_add(double a, double b) {
        if (a < b) std::swap(a, b);
        return a + std::log1p(std::exp(b - a));
    }
    static double log_sub(double a, double b) {
        // requires a > b
        return a + std::log1p(-std::exp(b - a));
    }

    double log_ = -std::numeric_limits<double>::infinity();
    int sign_ = 0;
};

inline double log_sum_exp(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    if (a < b) std::swap(a, b);
    return a + std::log1p(std::exp(b - a));
}

} // namespace perm
