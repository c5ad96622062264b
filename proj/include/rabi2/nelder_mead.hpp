// nelder_mead.hpp: downhill simplex minimizer

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

namespace rabi2 {

struct NelderMeadOptions {
    double initial_step{0.3};   // simplex edge along each axis
    double f_tol{1e-13};        // stop when the simplex spread in f drops below this
    double x_tol{1e-9};         // and the simplex diameter drops below this
    int max_evaluations{20000};
    // Standard coefficients.
    double reflect{1.0};
    double expand{2.0};
    double contract{0.5};
    double shrink{0.5};
};

struct NelderMeadResult {
    Eigen::VectorXd x;
    double f{0.0};
    int evaluations{0};
    bool converged{false};
};

/// Minimizes f starting from a regular axis-aligned simplex around x0.
/// The best vertex value is nonincreasing, so the result is never worse than f(x0).
inline NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                                    const Eigen::VectorXd& x0, const NelderMeadOptions& opt = {}) {
    const Eigen::Index n = x0.size();
    std::vector<Eigen::VectorXd> pts(static_cast<std::size_t>(n + 1), x0);
    std::vector<double> val(pts.size());
    int evals = 0;
    auto eval = [&](const Eigen::VectorXd& x) {
        ++evals;
        const double v = f(x);
        return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
    };
    for (Eigen::Index i = 0; i < n; ++i) pts[static_cast<std::size_t>(i + 1)](i) += opt.initial_step;
    for (std::size_t i = 0; i < pts.size(); ++i) val[i] = eval(pts[i]);

    std::vector<std::size_t> order(pts.size());
    bool converged = false;
    while (evals < opt.max_evaluations) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return val[a] < val[b]; });
        const std::size_t best = order.front(), worst = order.back(), second = order[order.size() - 2];

        double diameter = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i)
            diameter = std::max(diameter, (pts[i] - pts[best]).cwiseAbs().maxCoeff());
        if (std::abs(val[worst] - val[best]) <= opt.f_tol && diameter <= opt.x_tol) {
            converged = true;
            break;
        }

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (std::size_t i = 0; i < pts.size(); ++i)
            if (i != worst) centroid += pts[i];
        centroid /= static_cast<double>(n);

        const Eigen::VectorXd xr = centroid + opt.reflect * (centroid - pts[worst]);
        const double fr = eval(xr);
        if (fr < val[best]) {
            const Eigen::VectorXd xe = centroid + opt.expand * (xr - centroid);
            const double fe = eval(xe);
            if (fe < fr) {
                pts[worst] = xe;
                val[worst] = fe;
            } else {
                pts[worst] = xr;
                val[worst] = fr;
            }
            continue;
        }
        if (fr < val[second]) {
            pts[worst] = xr;
            val[worst] = fr;
            continue;
        }
        const bool outside = fr < val[worst];
        const Eigen::VectorXd xc = outside ? Eigen::VectorXd(centroid + opt.contract * (xr - centroid))
                                           : Eigen::VectorXd(centroid + opt.contract * (pts[worst] - centroid));
        const double fc = eval(xc);
        if (fc < (outside ? fr : val[worst])) {
            pts[worst] = xc;
            val[worst] = fc;
            continue;
        }
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i == best) continue;
            pts[i] = pts[best] + opt.shrink * (pts[i] - pts[best]);
            val[i] = eval(pts[i]);
        }
    }
    const auto it = std::min_element(val.begin(), val.end());
    const auto ib = static_cast<std::size_t>(it - val.begin());
    return {pts[ib], val[ib], evals, converged};
}

}  // namespace rabi2
