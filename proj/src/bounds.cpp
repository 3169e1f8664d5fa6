#include "rsvd/bounds.hpp"

#include <cmath>

#include "rsvd/errors.hpp"

namespace rsvd {

namespace {

constexpr double kE = 2.718281828459045235360287471353;
constexpr double kPi = 3.141592653589793238462643383280;

struct TailSums {
    double s1 = 0.0;      // sigma_{k+1}
    double rms2 = 0.0;    // sqrt(sum sigma^2)
    double rmsP2 = 0.0;   // sqrt(sum sigma^(2(2P+1)))
};

void validate_common(const BoundInputs& in) {
    if (in.k < 2) throw ConfigError("bounds: k must be at least 2");
    if (in.h < 2) throw ConfigError("bounds: h must be at least 2");
    if (in.power < 0) throw ConfigError("bounds: power must be non-negative");
    double prev = -1.0;
    for (std::size_t i = 0; i < in.tail.size(); ++i) {
        double s = in.tail[i];
        if (!(s >= 0.0)) throw ConfigError("bounds: tail entries must be non-negative");
        if (i > 0 && s > prev) throw ConfigError("bounds: tail must be non-increasing");
        prev = s;
    }
}

TailSums tail_sums(const BoundInputs& in) {
    TailSums t;
    if (in.tail.empty()) return t;
    t.s1 = in.tail.front();
    double q = 2.0 * (2 * in.power + 1);
    double acc2 = 0.0, accq = 0.0;
    for (double s : in.tail) {
        acc2 += s * s;
        accq += std::pow(s, q);
    }
    t.rms2 = std::sqrt(acc2);
    t.rmsP2 = std::sqrt(accq);
    return t;
}

double root_2p1(double x, int power) {
    return std::pow(x, 1.0 / double(2 * power + 1));
}

}  // namespace

BoundSet classical_bounds(const BoundInputs& in, bool probabilistic) {
    validate_common(in);
    const double k = in.k, h = in.h;
    const TailSums ts = tail_sums(in);
    const double q = double(2 * in.power + 1);
    const double s1q = std::pow(ts.s1, q);

    BoundSet out;
    out.frob_expected = std::sqrt(1.0 + k / (h - 1.0)) * ts.rms2;
    out.spec_expected = root_2p1(
        (1.0 + std::sqrt(k / (h - 1.0))) * s1q +
            (kE * std::sqrt(k + h) / h) * ts.rmsP2,
        in.power);
    if (!probabilistic) return out;

    if (in.h < 4)
        throw ConfigError("classical_bounds: probabilistic part needs h >= 4");
    if (in.u < 1.0 || in.t < 1.0)
        throw ConfigError("classical_bounds: probabilistic part needs u, t >= 1");
    const double u = in.u, t = in.t;
    const double lead = 1.0 + t * std::sqrt(3.0 * k / (h + 1.0));
    const double conc = kE * std::sqrt(k + h) / (h + 1.0);
    out.frob_prob = lead * ts.rms2 + u * t * conc * ts.s1;
    out.spec_prob =
        root_2p1(lead * s1q + t * conc * ts.rmsP2 + u * t * conc * s1q, in.power);
    out.fail_prob = 2.0 * std::pow(t, -h) + std::exp(-u * u / 2.0);
    return out;
}

BoundSet asymptotic_bounds(const BoundInputs& in, bool probabilistic) {
    validate_common(in);
    const double k = in.k, h = in.h;
    const TailSums ts = tail_sums(in);
    const double q = double(2 * in.power + 1);
    const double s1q = std::pow(ts.s1, q);
    const double lead = 1.0 + std::sqrt(k / h);
    const double conc = (std::sqrt(k + h) + std::sqrt(k)) / h;

    BoundSet out;
    out.frob_expected = std::sqrt(1.0 + k / h) * ts.rms2;
    out.spec_expected = root_2p1(lead * s1q + conc * ts.rmsP2, in.power);
    if (!probabilistic) return out;

    if (!(in.u > 0.0))
        throw ConfigError("asymptotic_bounds: probabilistic part needs u > 0");
    const double u = in.u;
    out.frob_prob = lead * ts.rms2 + u * conc * ts.s1;
    out.spec_prob = root_2p1(lead * s1q + conc * ts.rmsP2 + u * conc * s1q, in.power);
    out.fail_prob = std::exp(-u * u / 2.0);
    return out;
}

PinvLimits pinv_norm_asymptotics(int m, int n) {
    if (m < 1 || n < 1) throw ConfigError("pinv_norm_asymptotics: sizes must be positive");
    if (m >= n)
        throw ConfigError("pinv_norm_asymptotics: requires m < n (gamma in (0,1))");
    double gamma = double(m) / double(n);
    PinvLimits out;
    out.frob_limit = std::sqrt(gamma / (1.0 - gamma));
    double root = 1.0 - std::sqrt(gamma);
    out.spec_limit_bound = 1.0 / std::sqrt(double(n) * root * root);
    return out;
}

double MpLaw::lower() const {
    double r = 1.0 - std::sqrt(gamma);
    return var * r * r;
}

double MpLaw::upper() const {
    double r = 1.0 + std::sqrt(gamma);
    return var * r * r;
}

double MpLaw::point_mass_at_zero() const {
    return gamma > 1.0 ? 1.0 - 1.0 / gamma : 0.0;
}

double mp_density(const MpLaw& law, double x) {
    if (!(law.gamma > 0.0) || !(law.var > 0.0))
        throw ConfigError("mp_density: gamma and variance must be positive");
    double a = law.lower(), b = law.upper();
    if (x <= a || x >= b) return 0.0;
    return std::sqrt((b - x) * (x - a)) / (2.0 * kPi * x * law.gamma * law.var);
}

namespace {

double simpson_adapt(const std::function<double(double)>& f, double a,
                     double b, double fa, double fm, double fb, double whole,
                     double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return simpson_adapt(f, a, m, fa, flm, fm, left, tol * 0.5, depth - 1) +
           simpson_adapt(f, m, b, fm, frm, fb, right, tol * 0.5, depth - 1);
}

}  // namespace

double mp_integrate(const MpLaw& law, const std::function<double(double)>& f) {
    double a = law.lower(), b = law.upper();
    auto g = [&](double x) { return f(x) * mp_density(law, x); };
    double m = 0.5 * (a + b);
    double fa = g(a), fm = g(m), fb = g(b);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_adapt(g, a, b, fa, fm, fb, whole, 1e-8, 48);
}

}  // namespace rsvd
