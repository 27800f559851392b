#include "ineq/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ineq {

namespace {

double diameter(const std::vector<std::vector<double>>& verts) {
    double d = 0.0;
    for (std::size_t i = 1; i < verts.size(); ++i)
        for (std::size_t k = 0; k < verts[0].size(); ++k)
            d = std::max(d, std::abs(verts[i][k] - verts[0][k]));
    return d;
}

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::span<const double> x0,
                             std::span<const double> step,
                             double diameter_tol, int max_iter) {
    const std::size_t n = x0.size();
    if (n == 0 || step.size() != n)
        throw std::invalid_argument("nelder_mead: bad dimensions");

    auto eval = [&](const std::vector<double>& x) {
        const double v = f(std::span<const double>(x));
        return std::isfinite(v) ? v : std::numeric_limits<double>::max();
    };

    std::vector<std::vector<double>> verts(n + 1, std::vector<double>(x0.begin(), x0.end()));
    for (std::size_t i = 0; i < n; ++i) verts[i + 1][i] += step[i];
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i <= n; ++i) fv[i] = eval(verts[i]);

    auto order = [&] {
        std::vector<std::size_t> idx(n + 1);
        for (std::size_t i = 0; i <= n; ++i) idx[i] = i;
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        std::vector<std::vector<double>> v2(n + 1);
        std::vector<double> f2(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            v2[i] = std::move(verts[idx[i]]);
            f2[i] = fv[idx[i]];
        }
        verts = std::move(v2);
        fv = std::move(f2);
    };
    order();

    NelderMeadResult res;
    int iter = 0;
    std::vector<double> centroid(n), xr(n), xe(n), xc(n);
    while (iter < max_iter) {
        if (diameter(verts) < diameter_tol) {
            res.converged = true;
            break;
        }
        ++iter;
        for (std::size_t k = 0; k < n; ++k) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += verts[i][k];
            centroid[k] = s / static_cast<double>(n);
        }
        for (std::size_t k = 0; k < n; ++k)
            xr[k] = centroid[k] + (centroid[k] - verts[n][k]);
        const double fr = eval(xr);
        if (fr < fv[0]) {
            for (std::size_t k = 0; k < n; ++k)
                xe[k] = centroid[k] + 2.0 * (centroid[k] - verts[n][k]);
            const double fe = eval(xe);
            if (fe < fr) { verts[n] = xe; fv[n] = fe; }
            else         { verts[n] = xr; fv[n] = fr; }
        } else if (fr < fv[n - 1]) {
            verts[n] = xr;
            fv[n] = fr;
        } else {
            if (fr < fv[n]) {  // outside contraction
                for (std::size_t k = 0; k < n; ++k)
                    xc[k] = centroid[k] + 0.5 * (xr[k] - centroid[k]);
                const double fc = eval(xc);
                if (fc <= fr) { verts[n] = xc; fv[n] = fc; }
                else goto shrink;
            } else {  // inside contraction
                for (std::size_t k = 0; k < n; ++k)
                    xc[k] = centroid[k] - 0.5 * (centroid[k] - verts[n][k]);
                const double fc = eval(xc);
                if (fc < fv[n]) { verts[n] = xc; fv[n] = fc; }
                else goto shrink;
            }
        }
        order();
        continue;
    shrink:
        for (std::size_t i = 1; i <= n; ++i) {
            for (std::size_t k = 0; k < n; ++k)
                verts[i][k] = verts[0][k] + 0.5 * (verts[i][k] - verts[0][k]);
            fv[i] = eval(verts[i]);
        }
        order();
    }
    res.x = verts[0];
    res.fx = fv[0];
    res.iterations = iter;
    return res;
}

}  // namespace ineq
