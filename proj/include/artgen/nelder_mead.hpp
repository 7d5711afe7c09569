#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

namespace artgen {

struct NelderMeadOptions {
    int max_iters = 600;
    double simplex_tol = 1e-6;  // convergence on simplex diameter
    double f_tol = 1e-12;       // or on the function-value spread
};

struct NelderMeadResult {
    std::vector<double> x;
    double fx = 0.0;
    int iterations = 0;
};

// Standard downhill simplex (reflection / expansion / contraction / shrink).
// `scale` sets the initial per-dimension simplex displacement.
inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                    const std::vector<double>& x0,
                                    const std::vector<double>& scale,
                                    const NelderMeadOptions& opts = {}) {
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> simplex(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += scale[i];
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i <= n; ++i) fv[i] = f(simplex[i]);

    std::vector<std::size_t> order(n + 1);
    auto sort_simplex = [&] {
        std::iota(order.begin(), order.end(), 0u);
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    };

    int it = 0;
    for (; it < opts.max_iters; ++it) {
        sort_simplex();
        std::size_t best = order[0], worst = order[n], second = order[n - 1];

        double diam = 0.0;
        for (std::size_t i = 1; i <= n; ++i)
            for (std::size_t d = 0; d < n; ++d)
                diam = std::max(diam, std::abs(simplex[order[i]][d] - simplex[best][d]));
        if (diam < opts.simplex_tol || fv[worst] - fv[best] < opts.f_tol) break;

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t d = 0; d < n; ++d) centroid[d] += simplex[i][d];
        }
        for (double& c : centroid) c /= static_cast<double>(n);

        auto blend = [&](double alpha) {
            std::vector<double> x(n);
            for (std::size_t d = 0; d < n; ++d)
                x[d] = centroid[d] + alpha * (simplex[worst][d] - centroid[d]);
            return x;
        };

        auto xr = blend(-1.0);
        double fr = f(xr);
        if (fr < fv[best]) {
            auto xe = blend(-2.0);
            double fe = f(xe);
            if (fe < fr) {
                simplex[worst] = std::move(xe);
                fv[worst] = fe;
            } else {
                simplex[worst] = std::move(xr);
                fv[worst] = fr;
            }
        } else if (fr < fv[second]) {
            simplex[worst] = std::move(xr);
            fv[worst] = fr;
        } else {
            auto xc = blend(fr < fv[worst] ? -0.5 : 0.5);
            double fc = f(xc);
            if (fc < std::min(fr, fv[worst])) {
                simplex[worst] = std::move(xc);
                fv[worst] = fc;
            } else {
                for (std::size_t i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    for (std::size_t d = 0; d < n; ++d)
                        simplex[i][d] = simplex[best][d] + 0.5 * (simplex[i][d] - simplex[best][d]);
                    fv[i] = f(simplex[i]);
                }
            }
        }
    }
    sort_simplex();
    return {simplex[order[0]], fv[order[0]], it};
}

}  // namespace artgen
