#include "sklab/special.hpp"

#include <cmath>
#include <string>

#include "sklab/core.hpp"

namespace sklab {

const char* error_kind_name(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::DomainError: return "DomainError";
        case ErrorKind::ZeroSection: return "ZeroSection";
        case ErrorKind::Degenerate: return "Degenerate";
        case ErrorKind::BinTooWide: return "BinTooWide";
        case ErrorKind::NotRandom: return "NotRandom";
        case ErrorKind::QuadratureNotConverged: return "QuadratureNotConverged";
        case ErrorKind::NotConverged: return "NotConverged";
        case ErrorKind::StepTooLarge: return "StepTooLarge";
        case ErrorKind::ConfigError: return "ConfigError";
    }
    return "UnknownError";
}

namespace {

double dilog_series(double x) {
    // x <= 0.5: terms fall at least like 2^-n.
    double sum = 0.0;
    double xn = x;
    for (int n = 1; n < 80; ++n) {
        double term = xn / (double(n) * n);
        sum += term;
        if (term < 1e-18 * sum) break;
        xn *= x;
    }
    return sum;
}

}  // namespace

double dilog(double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw LabError(ErrorKind::DomainError, "dilog argument outside [0,1]: " + std::to_string(x));
    if (x == 0.0) return 0.0;
    if (x == 1.0) return kPi * kPi / 6.0;
    if (x <= 0.5) return dilog_series(x);
    double y = 1.0 - x;
    return kPi * kPi / 6.0 - std::log(x) * std::log(y) - dilog_series(y);
}

double zeta_value(double s) {
    if (!(s > 1.0)) throw LabError(ErrorKind::DomainError, "zeta_value needs s > 1, got " + std::to_string(s));
    // Borwein's accelerated alternating series for eta(s), then zeta = eta / (1 - 2^(1-s)).
    constexpr int n = 40;
    double d[n + 1];
    double term = 1.0 / n;
    double acc = term;
    d[0] = acc * n;
    for (int i = 1; i <= n; ++i) {
        term *= 4.0 * double(n + i - 1) * double(n - i + 1) / (double(2 * i - 1) * double(2 * i));
        acc += term;
        d[i] = acc * n;
    }
    double eta = 0.0;
    for (int k = 0; k < n; ++k) {
        double sign = (k % 2 == 0) ? 1.0 : -1.0;
        eta += sign * (d[k] - d[n]) * std::exp(-s * std::log(double(k + 1)));
    }
    eta = -eta / d[n];
    return eta / -std::expm1((1.0 - s) * std::log(2.0));
}

double log_factorial(double n) { return std::lgamma(n + 1.0); }

double log_binomial(double n, double k) { return log_factorial(n) - log_factorial(k) - log_factorial(n - k); }

}  // namespace sklab
