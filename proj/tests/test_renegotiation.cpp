#include <doctest.h>

#include <random>

#include "builders.hpp"
#include "mg/dac.hpp"
#include "mg/fixtures.hpp"
#include "mg/generator.hpp"
#include "mg/lp.hpp"
#include "mg/payoffs.hpp"
#include "mg/qcqp.hpp"
#include "mg/renegotiation.hpp"
#include "mg/stability.hpp"
#include "oracles.hpp"

using namespace mg;

namespace {

const Matrix kPennies = {{1, -1}, {-1, 1}};

// Saddle value certified by the two best-response bounds.
Rational certified_value(const Matrix& a) {
    GameValue gv = game_value(a);
    REQUIRE(oracle::max_row_payoff(a, gv.y) == gv.value);
    REQUIRE(oracle::min_col_payoff(a, gv.x) == gv.value);
    return gv.value;
}

Matrix pd_a() { return {{2, -1}, {3, 0}}; }
Matrix pd_m() { return {{2, 3}, {-1, 0}}; }

}  // namespace

TEST_CASE("zero-sum CNE at the saddle when reservations straddle the value") {
    // doctor-unit cap 1 is hospital reservation -1
    CneResult r = compute_cne_zero_sum(kPennies, -1, -1, frac(1, 10));
    CHECK(r.f == 0);
    CHECK(r.tag == CneCase::SaddleValue);
    CHECK(r.profile.x == Vec{frac(1, 2), frac(1, 2)});
    CHECK(r.profile.y == Vec{frac(1, 2), frac(1, 2)});
    CHECK(oracle::no_deviation(kPennies, negate(kPennies), r.profile, -1, -1, frac(1, 10)));
}

TEST_CASE("zero-sum CNE binds the doctor reservation") {
    CneResult r = compute_cne_zero_sum(kPennies, frac(1, 2), -1, frac(1, 10));
    CHECK(r.f == frac(3, 10));
    CHECK(r.g == frac(-3, 10));
    CHECK(r.tag == CneCase::DoctorBinding);
    CHECK(oracle::no_deviation(kPennies, negate(kPennies), r.profile, frac(1, 2), -1, frac(1, 10)));
    // 3/10 + 1/10 < 1/2: the 2 eps median is not eps-feasible
    CHECK_FALSE(r.eps_feasible);
    CneResult s = compute_cne_zero_sum(kPennies, frac(1, 2), -1, frac(1, 10), frac(1, 10));
    CHECK(s.f == frac(2, 5));
    CHECK(s.eps_feasible);
}

TEST_CASE("zero-sum CNE binds the hospital reservation") {
    // hospital wants at least 1/2, i.e. doctor at most -1/2
    CneResult r = compute_cne_zero_sum(kPennies, -1, frac(1, 2), frac(1, 10));
    CHECK(r.f == frac(-3, 10));
    CHECK(r.tag == CneCase::HospitalBinding);
    CHECK(oracle::no_deviation(kPennies, negate(kPennies), r.profile, -1, frac(1, 2), frac(1, 10)));
}

TEST_CASE("zero-sum CNE rejects infeasible reservations") {
    CHECK_THROWS_AS(compute_cne_zero_sum(kPennies, 2, -5, frac(1, 10)), InfeasibleReservations);
    CHECK_THROWS_AS(compute_cne_zero_sum(kPennies, -5, 2, frac(1, 10)), InfeasibleReservations);
    CHECK_THROWS_AS(compute_cne_zero_sum(kPennies, frac(1, 2), frac(1, 2), frac(1, 10)), InfeasibleReservations);
}

TEST_CASE("zero-sum CNE matches the median on random games") {
    std::mt19937 rng(2024);
    int checked = 0;
    for (int it = 0; it < 300; ++it) {
        const std::size_t n = 1 + rng() % 4, k = 1 + rng() % 4;
        Matrix a = oracle::random_matrix(rng, n, k, -10, 10);
        const Rational eps = it % 2 ? frac(1, 10) : frac(1, 4);
        const Rational f_res = oracle::rnd(rng, -12, 12, 4);
        const Rational cap = oracle::rnd(rng, -12, 12, 4);
        const Rational lo = f_res - 2 * eps, hi = cap + 2 * eps;
        if (lo > hi || hi < min_entry(a) || lo > max_entry(a)) {
            CHECK_THROWS_AS(compute_cne_zero_sum(a, f_res, -cap, eps), InfeasibleReservations);
            continue;
        }
        const Rational w = certified_value(a);
        CneResult r = compute_cne_zero_sum(a, f_res, -cap, eps);
        CHECK(r.f == median3(lo, w, hi));
        CHECK(bilinear(r.profile.x, a, r.profile.y) == r.f);
        CHECK(oracle::no_deviation(a, negate(a), r.profile, f_res, -cap, eps));
        ++checked;
    }
    CHECK(checked > 100);
}

TEST_CASE("zero-sum CNE is symmetric under swapping the roles") {
    std::mt19937 rng(77);
    for (int it = 0; it < 100; ++it) {
        Matrix a = oracle::random_matrix(rng, 3, 2, -5, 5);
        const Rational eps = frac(1, 10);
        const Rational f_res = oracle::rnd(rng, -5, 5, 2), g_res = oracle::rnd(rng, -5, 5, 2);
        // hospital as the row player of -A^T
        const Matrix b = negate(transpose(a));
        bool thrown = false, thrown2 = false;
        CneResult r, s;
        try {
            r = compute_cne_zero_sum(a, f_res, g_res, eps);
        } catch (const InfeasibleReservations&) {
            thrown = true;
        }
        try {
            s = compute_cne_zero_sum(b, g_res, f_res, eps);
        } catch (const InfeasibleReservations&) {
            thrown2 = true;
        }
        REQUIRE(thrown == thrown2);
        if (!thrown) {
            CHECK(r.f == s.g);
            CHECK(r.g == s.f);
        }
    }
}

TEST_CASE("strictly competitive CNE through the zero-sum image") {
    const Matrix a = {{5, 1}, {1, 3}};
    const Matrix m = {{-2, 0}, {0, -1}};  // A = 2 (-M) + 1
    const Rational eps = frac(1, 5);
    CneResult r = compute_cne_strictly_competitive(a, m, 2, frac(-3, 2), eps);
    CHECK(r.tag == CneCase::SaddleValue);
    CHECK(r.f == frac(7, 3));
    CHECK(r.g == frac(-2, 3));
    CHECK(oracle::no_deviation(a, m, r.profile, 2, frac(-3, 2), eps));

    CneResult b = compute_cne_strictly_competitive(a, m, 3, frac(-3, 2), eps);
    CHECK(b.tag == CneCase::DoctorBinding);
    CHECK(b.f == frac(13, 5));
    CHECK(oracle::no_deviation(a, m, b.profile, 3, frac(-3, 2), eps));
}

TEST_CASE("strictly competitive CNE on a constant game") {
    CneResult r = compute_cne_strictly_competitive({{2, 2}, {2, 2}}, {{1, 1}, {1, 1}}, 1, 0, frac(1, 10));
    CHECK(r.profile.x == pure(2, 0));
    CHECK(r.profile.y == pure(2, 0));
    CHECK_THROWS_AS(compute_cne_strictly_competitive({{2, 2}}, {{1, 1}}, 3, 0, frac(1, 10)), InfeasibleReservations);
}

TEST_CASE("strictly competitive CNEs pass deviation checks in the original game") {
    int solved = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        Rng rng(seed);
        BimatrixGame g = random_game(rng, GameClass::StrictlyCompetitive, 1 + seed % 3, 1 + seed / 3 % 3, 10, 1);
        const Rational eps = frac(1, 10);
        std::mt19937 r2(static_cast<unsigned>(seed));
        const Rational f_res = oracle::rnd(r2, -10, 10, 2), g_res = oracle::rnd(r2, -10, 10, 2);
        try {
            CneResult c = compute_cne_strictly_competitive(g.A, g.M, f_res, g_res, eps, eps);
            CHECK(c.eps_feasible);
            CHECK(oracle::no_deviation(g.A, g.M, c.profile, f_res, g_res, eps));
            CHECK(is_eps_cne(g, c.profile, f_res, g_res, eps));
            ++solved;
        } catch (const InfeasibleReservations&) {
            // no profile at all within eps of both reservations
            auto best = oracle::repeated_value(g.A, g.M, g_res - eps);
            CHECK((!best || *best < f_res - eps));
        }
    }
    CHECK(solved > 20);
}

TEST_CASE("punishment levels") {
    PunishmentLevels pd = punishment_levels(pd_a(), pd_m());
    CHECK(pd.alpha == 0);
    CHECK(pd.beta == 0);
    CHECK(pd.hospital_punishment == pure(2, 1));
    CHECK(pd.doctor_punishment == pure(2, 1));

    std::mt19937 rng(5);
    for (int it = 0; it < 30; ++it) {
        Matrix a = oracle::random_matrix(rng, 3, 3, -6, 6);
        const Rational w = certified_value(a);
        PunishmentLevels z = punishment_levels(a, negate(a));
        CHECK(z.alpha == w);
        CHECK(z.beta == -w);
        CHECK(oracle::max_row_payoff(a, z.hospital_punishment) == z.alpha);
    }
    PunishmentLevels c = punishment_levels({{4, 4}, {4, 4}}, {{-1, -1}, {-1, -1}});
    CHECK(c.alpha == 4);
    CHECK(c.beta == -1);
}

TEST_CASE("repeated CNE: uniform equilibrium for the prisoners' dilemma") {
    CneResult r = compute_cne_repeated(pd_a(), pd_m(), frac(1, 2), frac(1, 2), frac(1, 10));
    CHECK(r.tag == CneCase::UniformEquilibrium);
    CHECK(r.f == 2);
    CHECK(r.g == 2);
    REQUIRE(r.profile.cycle);
    CHECK(r.profile.cycle->cycle == std::vector<std::pair<int, int>>{{0, 0}});
    CHECK(r.profile.cycle->hospital_punishes);
    CHECK(r.profile.cycle->doctor_punishes);

    // (1, 1) is acceptable, yet the selection returns the dominating (2, 2)
    CneResult s = compute_cne_repeated(pd_a(), pd_m(), frac(11, 10), frac(11, 10), frac(1, 10));
    CHECK(s.f == 2);
    CHECK(s.g == 2);
}

TEST_CASE("repeated CNE: hospital punishes when the doctor demands a lot") {
    const Rational eps = frac(1, 10);
    CneResult r = compute_cne_repeated(pd_a(), pd_m(), frac(14, 5), frac(-9, 10), eps);
    CHECK(r.tag == CneCase::PunishmentSupported);
    CHECK(r.f == frac(27, 10));
    CHECK(r.g == frac(-1, 10));
    REQUIRE(r.profile.cycle);
    CHECK(r.profile.cycle->hospital_punishes);
    CHECK_FALSE(r.profile.cycle->doctor_punishes);
    CHECK(cycle_average(*r.profile.cycle, pd_a()) == r.f);
    CHECK(cycle_average(*r.profile.cycle, pd_m()) == r.g);
    CHECK(r.profile.cycle->length() == 10);
    BimatrixGame g = build::game(GameClass::Repeated, pd_a(), pd_m());
    CHECK(is_eps_cne(g, r.profile, frac(14, 5), frac(-9, 10), eps));
}

TEST_CASE("repeated CNE: infeasible reservations") {
    CHECK_THROWS_AS(compute_cne_repeated(pd_a(), pd_m(), 3, 3, frac(1, 10)), InfeasibleReservations);
}

TEST_CASE("repeated CNEs on random games have no profitable deviation") {
    int solved = 0;
    for (std::uint64_t seed = 1; seed <= 80; ++seed) {
        Rng rng(seed);
        BimatrixGame g = random_game(rng, GameClass::Repeated, 1 + seed % 3, 1 + seed / 3 % 3, 6, 1);
        std::mt19937 r2(static_cast<unsigned>(seed));
        const Rational eps = frac(1, 10);
        const Rational f_res = oracle::rnd(r2, -6, 6, 2), g_res = oracle::rnd(r2, -6, 6, 2);
        CneResult c;
        try {
            c = compute_cne_repeated(g.A, g.M, f_res, g_res, eps);
        } catch (const InfeasibleReservations&) {
            auto best = oracle::repeated_value(g.A, g.M, g_res - eps);
            CHECK((!best || *best < f_res - eps));
            continue;
        }
        ++solved;
        const CycleStrategy& cyc = *c.profile.cycle;
        CHECK(cycle_average(cyc, g.A) == c.f);
        CHECK(cycle_average(cyc, g.M) == c.g);
        CHECK(c.f + eps >= f_res);
        CHECK(c.g + eps >= g_res);
        // Punished deviators get at most their best reply to the punishment;
        // unpunished ones at most the best acceptable point of the hull.
        if (cyc.hospital_punishes)
            CHECK(oracle::max_row_payoff(g.A, cyc.hospital_punishment) <= c.f + eps);
        else
            CHECK(*oracle::repeated_value(g.A, g.M, g_res - eps) <= c.f + eps);
        if (cyc.doctor_punishes)
            CHECK(oracle::max_row_payoff(transpose(g.M), cyc.doctor_punishment) <= c.g + eps);
        else
            CHECK(*oracle::repeated_value(g.M, g.A, f_res - eps) <= c.g + eps);
        CHECK(is_eps_cne(g, c.profile, f_res, g_res, eps));
    }
    CHECK(solved > 30);
}

TEST_CASE("reservation payoffs") {
    const Rational eps = frac(1, 2);
    SUBCASE("isolated couple falls back to the IRPs") {
        build::Market mk;
        mk.doctor("d", -3).hospital("h", 2, 1).pair(0, 0, build::zero_sum(kPennies));
        Allocation al = empty_allocation(mk.inst);
        al.match[0] = 0;
        al.profiles[{0, 0}] = {pure(2, 0), pure(2, 0), std::nullopt};
        ReservationPair r = reservation_payoffs(mk.inst, al, 0, 0, eps);
        CHECK(r.doctor == -3);
        CHECK(r.hospital == 2);
    }
    SUBCASE("outside hospital with a free seat") {
        build::Market mk;
        mk.doctor("d", -5).hospital("h", 0, 1).hospital("k", 0, 1);
        mk.pair(0, 0, build::zero_sum(kPennies)).pair(0, 1, build::zero_sum({{-1, 3}, {1, 1}}));
        Allocation al = empty_allocation(mk.inst);
        al.match[0] = 0;
        al.profiles[{0, 0}] = {pure(2, 0), pure(2, 0), std::nullopt};
        CHECK(reservation_payoffs(mk.inst, al, 0, 0, eps).doctor == frac(-1, 2));
        // unshifted matrix: no profile leaves k above eps
        mk.pair(0, 1, build::zero_sum({{0, 4}, {2, 2}}));
        CHECK(reservation_payoffs(mk.inst, al, 0, 0, eps).doctor == -5);
    }
    SUBCASE("outside doctor already at her maximum") {
        build::Market mk;
        mk.doctor("d", -5).doctor("e", -5).hospital("h", 0, 2).hospital("k", 0, 1);
        mk.pair(0, 0, build::zero_sum(kPennies)).pair(1, 0, build::zero_sum({{1, 0}}));
        mk.pair(1, 1, build::zero_sum({{1, 1}}));
        Allocation al = empty_allocation(mk.inst);
        al.match = {0, 1};
        al.profiles[{0, 0}] = {pure(2, 0), pure(2, 1), std::nullopt};
        al.profiles[{1, 1}] = {pure(1, 0), pure(2, 0), std::nullopt};
        CHECK(reservation_payoffs(mk.inst, al, 0, 0, eps).hospital == 0);
    }
}

namespace {

Instance couple_instance(const Matrix& a, const Rational& f_irp, const Rational& g_irp) {
    build::Market mk;
    mk.doctor("d", f_irp).hospital("h", g_irp, 1).pair(0, 0, build::zero_sum(a));
    return mk.inst;
}

}  // namespace

TEST_CASE("renegotiation of an isolated couple ends at the saddle") {
    Instance inst = couple_instance(kPennies, -1, -1);
    Allocation al = empty_allocation(inst);
    al.match[0] = 0;
    al.profiles[{0, 0}] = {pure(2, 0), pure(2, 0), std::nullopt};
    RenegotiationOptions opt;
    opt.epsilon = frac(1, 10);
    RenegotiationResult r = run_renegotiation(inst, al, opt);
    CHECK(r.changing_sweeps == 1);
    CHECK(r.sweeps == 2);
    CHECK(evaluate_payoffs(inst, r.allocation).doctor[0] == 0);
    CHECK(verify_renegotiation_proof(inst, r.allocation, opt.epsilon).holds);

    RenegotiationResult again = run_renegotiation(inst, r.allocation, opt);
    CHECK(again.sweeps == 1);
    CHECK(again.changing_sweeps == 0);
}

TEST_CASE("renegotiation refuses unstable input") {
    build::Market mk;
    mk.doctor("d", -5).hospital("h", -5, 1).hospital("k", -10, 1);
    mk.pair(0, 0, build::zero_sum(kPennies)).pair(0, 1, build::zero_sum({{5}}));
    Allocation al = empty_allocation(mk.inst);
    al.match[0] = 0;
    al.profiles[{0, 0}] = {pure(2, 0), pure(2, 0), std::nullopt};
    RenegotiationOptions opt;
    opt.epsilon = frac(1, 10);
    CHECK_THROWS_AS(run_renegotiation(mk.inst, al, opt), InputNotPairwiseStable);
    // the same allocation also fails the renegotiation check: the doctor's
    // outside option at k exceeds what she gets
    auto v = verify_renegotiation_proof(mk.inst, al, opt.epsilon);
    CHECK_FALSE(v.holds);
    CHECK(v.failure == RenegotiationVerdict::Failure::DoctorInfeasible);
}

TEST_CASE("renegotiation check names a deviating doctor") {
    Instance inst = couple_instance(kPennies, -5, -5);
    Allocation al = empty_allocation(inst);
    al.match[0] = 0;
    al.profiles[{0, 0}] = {pure(2, 0), pure(2, 1), std::nullopt};
    auto v = verify_renegotiation_proof(inst, al, frac(1, 10));
    CHECK_FALSE(v.holds);
    CHECK(v.doctor == 0);
    CHECK(v.failure == RenegotiationVerdict::Failure::DoctorDeviation);
    CHECK(v.deviation_value == 1);
}

TEST_CASE("renegotiation of DAC outputs") {
    for (GameClass cls : {GameClass::ZeroSum, GameClass::StrictlyCompetitive, GameClass::Repeated}) {
        for (std::uint64_t seed = 1; seed <= 25; ++seed) {
            GenConfig cfg;
            cfg.cls = cls;
            cfg.seed = seed;
            cfg.doctors = 2 + seed % 4;
            cfg.hospitals = 1 + seed % 3;
            Instance inst = generate_instance(cfg);
            DacOptions dopt;
            dopt.epsilon = frac(1, 10);
            Allocation al = run_dac(inst, dopt).allocation;
            RenegotiationOptions opt;
            opt.epsilon = dopt.epsilon;
            RenegotiationResult r = run_renegotiation(inst, al, opt);
            CHECK(r.stable_every_sweep);
            CHECK(verify_renegotiation_proof(inst, r.allocation, opt.epsilon).holds);
            if (r.bound) CHECK(Rational(r.changing_sweeps) <= std::max<Rational>(1, *r.bound));
        }
    }
}

TEST_CASE("batch sweeps can cycle") {
    // Two couples whose reservations depend on each other's seats: updating
    // both at once flips them back and forth.
    GenConfig cfg;
    cfg.seed = 16;
    cfg.doctors = 2;
    cfg.hospitals = 2;
    Instance inst = generate_instance(cfg);
    DacOptions dopt;
    dopt.epsilon = frac(1, 10);
    Allocation al = run_dac(inst, dopt).allocation;
    RenegotiationOptions opt;
    opt.epsilon = dopt.epsilon;
    opt.mode = SweepMode::Jacobi;
    opt.max_sweeps = 50;
    CHECK_THROWS_AS(run_renegotiation(inst, al, opt), std::runtime_error);
    opt.mode = SweepMode::GaussSeidel;
    RenegotiationResult r = run_renegotiation(inst, al, opt);
    CHECK(r.sweeps <= 3);
    CHECK(verify_renegotiation_proof(inst, r.allocation, opt.epsilon).holds);
}
