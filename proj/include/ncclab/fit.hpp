#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace ncclab {

/// Ordinary least squares y ~ slope * x + intercept.
struct LinearFit {
    double slope{0.0};
    double intercept{0.0};
    double correlation{0.0};  // Pearson r of (x, y)
    double residual_rms{0.0};
};

inline LinearFit fit_linear(const std::vector<double>& x,
                            const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n != y.size() || n < 2)
        throw std::invalid_argument("fit_linear: need >= 2 paired samples");
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_linear: degenerate x");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.correlation = (syy > 0.0) ? sxy / std::sqrt(sxx * syy) : 1.0;
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (f.slope * x[i] + f.intercept);
        ss += r * r;
    }
    f.residual_rms = std::sqrt(ss / n);
    return f;
}

/// Slope of log(y) against log(x); inputs must be positive.
inline LinearFit fit_loglog(const std::vector<double>& x,
                            const std::vector<double>& y) {
    std::vector<double> lx(x.size()), ly(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw std::invalid_argument("fit_loglog: nonpositive sample");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    return fit_linear(lx, ly);
}

}  // namespace ncclab
