#include "mg/pair_game.hpp"

#include "mg/lp.hpp"
#include "mg/qcqp.hpp"

namespace mg {

bool exact_class(GameClass c) { return c != GameClass::General; }

namespace {

PairOption from_qcqp(const BimatrixGame& game, const QcqpSolution& s) {
    PairOption o;
    if (!s.feasible) return o;
    o.feasible = true;
    o.approximate = s.approximate;
    o.profile.x = s.x;
    o.profile.y = s.y;
    o.f = bilinear(s.x, game.A, s.y);
    o.g = bilinear(s.x, game.M, s.y);
    return o;
}

PairOption from_joint(const BimatrixGame& game, const JointDistribution& jd) {
    PairOption o;
    if (!jd.feasible) return o;
    o.feasible = true;
    o.profile.cycle = distribution_to_cycle(jd.lambda);
    o.f = cycle_average(*o.profile.cycle, game.A);
    o.g = cycle_average(*o.profile.cycle, game.M);
    return o;
}

PairOption constant_option(const BimatrixGame& game) {
    PairOption o;
    o.feasible = true;
    o.profile.x = pure(game.rows(), 0);
    o.profile.y = pure(game.cols(), 0);
    o.f = game.A[0][0];
    o.g = game.M[0][0];
    return o;
}

}  // namespace

Rational max_doctor(const BimatrixGame& game) { return max_entry(game.A); }
Rational max_partner(const BimatrixGame& game) { return max_entry(game.M); }

PairOption best_for_doctor(const BimatrixGame& game, const Rational& thr, int grid) {
    switch (game.cls) {
        case GameClass::ZeroSum:
            return from_qcqp(game, solve_qcqp_zero_sum(game.A, -thr));
        case GameClass::StrictlyCompetitive: {
            AffineTransform t = affine_transform(game.A, game.M);
            if (t.constant) return game.M[0][0] >= thr ? constant_option(game) : PairOption{};
            auto [lam, mu] = t.a_from_b();
            return from_qcqp(game, solve_qcqp_zero_sum(game.A, mu - lam * thr));
        }
        case GameClass::Repeated:
            return from_joint(game, solve_qcqp_repeated(game.A, game.M, thr));
        case GameClass::General:
            return from_qcqp(game, solve_qcqp_grid_oracle(game.A, game.M, thr, grid));
    }
    return {};
}

PairOption best_for_partner(const BimatrixGame& game, const Rational& thr, int grid) {
    switch (game.cls) {
        case GameClass::ZeroSum:
            return from_qcqp(game, solve_qcqp_zero_sum(game.M, -thr));
        case GameClass::StrictlyCompetitive: {
            AffineTransform t = affine_transform(game.A, game.M);
            if (t.constant) return game.A[0][0] >= thr ? constant_option(game) : PairOption{};
            auto [lam, mu] = t.a_from_b();
            return from_qcqp(game, solve_qcqp_zero_sum(game.M, (mu - thr) / lam));
        }
        case GameClass::Repeated: {
            JointDistribution jd = solve_qcqp_repeated(game.M, game.A, thr);
            PairOption o = from_joint(game, jd);
            return o;
        }
        case GameClass::General: {
            QcqpSolution s = solve_qcqp_grid_oracle(game.M, game.A, thr, grid);
            return from_qcqp(game, s);
        }
    }
    return {};
}

PairOption strict_improvement(const BimatrixGame& game, const Rational& a, const Rational& b, int grid) {
    switch (game.cls) {
        case GameClass::ZeroSum:
        case GameClass::StrictlyCompetitive: {
            Rational cap;
            if (game.cls == GameClass::ZeroSum) {
                cap = -b;
            } else {
                AffineTransform t = affine_transform(game.A, game.M);
                if (t.constant) {
                    if (game.A[0][0] > a && game.M[0][0] > b) return constant_option(game);
                    return {};
                }
                auto [lam, mu] = t.a_from_b();
                cap = mu - lam * b;  // g > b  <=>  f < cap
            }
            Rational lo = a, hi = cap;
            const Rational mn = min_entry(game.A), mx = max_entry(game.A);
            if (mn > lo) lo = mn;
            if (mx < hi) hi = mx;
            if (mn == mx) {
                // Degenerate zero-sum constant game.
                if (mn > a && mn < cap) return from_qcqp(game, solve_qcqp_zero_sum(game.A, mn));
                return {};
            }
            if (!(lo < hi)) return {};
            Rational v = (lo + hi) / 2;
            return from_qcqp(game, solve_qcqp_zero_sum(game.A, v));
        }
        case GameClass::Repeated: {
            const std::size_t n = game.rows(), k = game.cols(), nv = n * k;
            LinearProgram lp;
            lp.objective.assign(nv + 1, Rational(0));
            lp.objective[nv] = 1;
            lp.lower.assign(nv + 1, Rational(0));
            lp.lower[nv] = std::nullopt;
            lp.upper.assign(nv + 1, std::nullopt);
            Vec fa(nv + 1), ga(nv + 1), one(nv + 1, Rational(1));
            for (std::size_t s = 0; s < n; ++s)
                for (std::size_t t = 0; t < k; ++t) {
                    fa[s * k + t] = game.A[s][t];
                    ga[s * k + t] = game.M[s][t];
                }
            fa[nv] = -1;
            ga[nv] = -1;
            one[nv] = 0;
            lp.add(fa, Relation::Ge, a);
            lp.add(ga, Relation::Ge, b);
            lp.add(one, Relation::Eq, 1);
            LpResult r = solve_lp(lp);
            if (r.status != LpStatus::Optimal || r.value <= 0) return {};
            JointDistribution jd;
            jd.feasible = true;
            jd.lambda.assign(n, Vec(k));
            for (std::size_t s = 0; s < n; ++s)
                for (std::size_t t = 0; t < k; ++t) jd.lambda[s][t] = r.x[s * k + t];
            return from_joint(game, jd);
        }
        case GameClass::General: {
            const auto xs = simplex_grid(game.rows(), grid);
            const auto ys = simplex_grid(game.cols(), grid);
            for (const auto& x : xs)
                for (const auto& y : ys) {
                    Rational f = bilinear(x, game.A, y);
                    if (f <= a) continue;
                    Rational g = bilinear(x, game.M, y);
                    if (g <= b) continue;
                    PairOption o;
                    o.feasible = true;
                    o.approximate = true;
                    o.profile.x = x;
                    o.profile.y = y;
                    o.f = f;
                    o.g = g;
                    return o;
                }
            return {};
        }
    }
    return {};
}

}  // namespace mg
