#include "sizespec/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace sizespec {

namespace {

double safe_eval(const std::function<double(const std::vector<double>&)>& f, const std::vector<double>& x)
{
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                             std::vector<double> start, const NelderMeadOptions& options)
{
    const std::size_t n = start.size();
    if (n == 0) throw std::invalid_argument("nelder_mead: empty start vector");

    // Standard coefficients: reflection, expansion, contraction, shrink.
    constexpr double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;

    std::vector<std::vector<double>> simplex(n + 1, start);
    for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += options.initial_step;
    std::vector<double> values(n + 1);
    for (std::size_t i = 0; i <= n; ++i) values[i] = safe_eval(objective, simplex[i]);

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), trial(n), trial2(n);

    NelderMeadResult result;
    int iteration = 0;
    for (; iteration < options.max_iterations; ++iteration) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second_worst = order[n - 1];

        const double fb = values[best];
        const double fw = values[worst];
        if (std::isfinite(fw) && std::abs(fw - fb) <= options.ftol * 0.5 * (std::abs(fw) + std::abs(fb))) {
            result.converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t d = 0; d < n; ++d) centroid[d] += simplex[i][d] / static_cast<double>(n);
        }

        for (std::size_t d = 0; d < n; ++d) trial[d] = centroid[d] + alpha * (centroid[d] - simplex[worst][d]);
        const double fr = safe_eval(objective, trial);

        if (fr < fb) {
            for (std::size_t d = 0; d < n; ++d) trial2[d] = centroid[d] + gamma * (trial[d] - centroid[d]);
            const double fe = safe_eval(objective, trial2);
            if (fe < fr) {
                simplex[worst] = trial2;
                values[worst] = fe;
            } else {
                simplex[worst] = trial;
                values[worst] = fr;
            }
            continue;
        }
        if (fr < values[second_worst]) {
            simplex[worst] = trial;
            values[worst] = fr;
            continue;
        }

        // Contraction, outside when the reflected point improved on the worst.
        const bool outside = fr < fw;
        const auto& anchor = outside ? trial : simplex[worst];
        for (std::size_t d = 0; d < n; ++d) trial2[d] = centroid[d] + rho * (anchor[d] - centroid[d]);
        const double fc = safe_eval(objective, trial2);
        if (fc < (outside ? fr : fw)) {
            simplex[worst] = trial2;
            values[worst] = fc;
            continue;
        }

        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) continue;
            for (std::size_t d = 0; d < n; ++d)
                simplex[i][d] = simplex[best][d] + sigma * (simplex[i][d] - simplex[best][d]);
            values[i] = safe_eval(objective, simplex[i]);
        }
    }

    const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
    result.x = simplex[best];
    result.value = values[best];
    result.iterations = iteration;
    return result;
}

}  // namespace sizespec
