#pragma once

// Random generators shared by the unit and acceptance tests.

#include "novflow/flowcat.hpp"

#include <random>

namespace novflow::testing {

inline FlowObject obj(std::string id, long long mu, long long energy) { return {std::move(id), mu, Rational(energy)}; }

inline MorphismRecord rigid(std::string s, std::string t, long long count, std::vector<long long> g = {}) {
    return {std::move(s), std::move(t), std::move(g), LabelKind::sized, 0, Integer(count)};
}

inline MorphismRecord sized(std::string s, std::string t, int r, std::vector<long long> g = {}) {
    return {std::move(s), std::move(t), std::move(g), LabelKind::sized, r, std::nullopt};
}

/// A random valid category with two parts. Objects "p<i>" have mu in
/// {0, 1, 2} and energy 2 * mu. No record goes from part 2 to part 1. The
/// differential is a conjugate of a sum of elementary pieces, so d^2 = 0.
struct TwoPart {
    FlowCategoryDesc category;
    std::vector<std::string> c1, c2;
};

inline TwoPart random_two_part(std::mt19937& rng, std::size_t max_objects = 6) {
    std::uniform_int_distribution<std::size_t> count_dist(2, max_objects);
    std::uniform_int_distribution<int> mu_dist(0, 2), coin(0, 1), small(-2, 2), factor(1, 3);
    const std::size_t n = count_dist(rng);
    TwoPart out;
    std::vector<int> mu(n), part(n);
    for (std::size_t i = 0; i < n; ++i) {
        mu[i] = mu_dist(rng);
        part[i] = coin(rng);
    }
    part[0] = 0;
    part[n - 1] = 1;
    for (std::size_t i = 0; i < n; ++i) {
        out.category.objects.push_back(obj("p" + std::to_string(i), mu[i], 2 * mu[i]));
        (part[i] == 0 ? out.c1 : out.c2).push_back("p" + std::to_string(i));
    }
    // allowed(x, y): entry (x, y) i.e. a record x -> y; forbidden from part 2 to part 1
    auto allowed = [&](std::size_t x, std::size_t y) { return !(part[x] == 1 && part[y] == 0); };

    // elementary pieces: disjoint pairs (x, y) with mu(x) = mu(y) + 1
    std::vector<std::vector<long long>> d(n, std::vector<long long>(n, 0));
    std::vector<bool> used(n, false);
    for (std::size_t y = 0; y < n; ++y)
        for (std::size_t x = 0; x < n; ++x) {
            if (used[x] || used[y] || x == y || mu[x] != mu[y] + 1 || !allowed(x, y) || coin(rng)) continue;
            d[x][y] = factor(rng);
            used[x] = used[y] = true;
        }
    // conjugate by unipotent basis changes B = I + w E_{qp} with deg p == deg q;
    // D -> B^{-1} D B keeps the block structure when allowed(q, p)
    for (int step = 0; step < 6; ++step) {
        const std::size_t p = rng() % n, q = rng() % n;
        if (p == q || mu[p] != mu[q] || !allowed(q, p)) continue;
        const long long w = small(rng);
        for (std::size_t i = 0; i < n; ++i) d[i][p] += w * d[i][q];
        for (std::size_t j = 0; j < n; ++j) d[q][j] -= w * d[p][j];
    }
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y) {
            const std::string sx = "p" + std::to_string(x), sy = "p" + std::to_string(y);
            if (mu[x] == mu[y] + 1 && d[x][y] != 0) out.category.morphisms.push_back(rigid(sx, sy, d[x][y]));
            if (mu[x] == mu[y] + 2 && allowed(x, y)) out.category.morphisms.push_back(sized(sx, sy, 1));
        }
    for (const auto& o : out.category.objects)
        out.category.morphisms.push_back({o.id, o.id, {}, LabelKind::unit, 0, std::nullopt});
    return out;
}

}  // namespace novflow::testing
