#pragma once

#include <functional>
#include <vector>

namespace rsvd {

// Inputs for the randomized range-finder error bounds. tail holds the
// singular values past the target rank, sigma_{k+1..n}, non-increasing; the
// bounds sum over exactly the entries supplied, so a truncated tail yields an
// underestimate and callers of truncated spectra must treat it as such.
struct BoundInputs {
    int k = 0;                  // target rank, >= 2
    int h = 0;                  // oversampling, >= 2 (>= 4 probabilistic classical)
    int power = 0;              // power-iteration passes P
    std::vector<double> tail;   // sigma_{k+1} first
    double u = 1.0;             // Gaussian-concentration parameter
    double t = 1.0;             // classical probabilistic parameter
};

struct BoundSet {
    double frob_expected = 0.0;
    double spec_expected = 0.0;
    double frob_prob = 0.0;
    double spec_prob = 0.0;
    double fail_prob = 1.0;  // probability the probabilistic bounds fail
};

// Finite-sample bounds. With probabilistic on, requires h >= 4 and u, t >= 1;
// failure probability is 2 t^-h + exp(-u^2/2). With it off the prob fields
// stay zero with fail_prob one, which is vacuously true.
BoundSet classical_bounds(const BoundInputs& in, bool probabilistic = true);

// Large-k limits; strictly tighter than the classical set on the expected
// side since k/h < k/(h-1). Probabilistic part needs u > 0 only; failure
// probability exp(-u^2/2).
BoundSet asymptotic_bounds(const BoundInputs& in, bool probabilistic = true);

struct PinvLimits {
    double frob_limit = 0.0;        // limit of ||G+||_F
    double spec_limit_bound = 0.0;  // upper bound on the limit of ||G+||
};

// Limits for an m x n (m < n) standard Gaussian matrix as n grows with
// gamma = m/n fixed: ||G+||_F -> sqrt(gamma/(1-gamma)) and
// lim ||G+|| <= (n (1-sqrt(gamma))^2)^{-1/2}. The spectral value is an upper
// bound, never an estimate.
PinvLimits pinv_norm_asymptotics(int m, int n);

// Marchenko-Pastur law with aspect ratio gamma and entry variance var.
struct MpLaw {
    double gamma = 1.0;
    double var = 1.0;

    double lower() const;  // var (1 - sqrt(gamma))^2
    double upper() const;  // var (1 + sqrt(gamma))^2
    // Continuous density integrates to min(1, 1/gamma); the rest sits in an
    // atom at zero when gamma > 1.
    double point_mass_at_zero() const;
};

// Density value; zero at and outside the support endpoints.
double mp_density(const MpLaw& law, double x);

// Integral of f(x) d F_gamma(x) over the continuous support, adaptive
// Simpson to a 1e-8 target. The atom at zero is not included.
double mp_integrate(const MpLaw& law, const std::function<double(double)>& f);

}  // namespace rsvd
