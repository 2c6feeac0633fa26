#include <doctest.h>

#include "builders.hpp"
#include "mg/fixtures.hpp"
#include "mg/generator.hpp"
#include "mg/io.hpp"
#include "mg/payoffs.hpp"
#include "oracles.hpp"

using namespace mg;

namespace {

const char* kTwoDoctors = R"({
  "model": "additive_separable",
  "doctors": [
    {"id": "d1", "irp": "-1", "strategies": ["s1", "s2"]},
    {"id": "d2", "irp": "3/2", "strategies": ["s1"]}
  ],
  "hospitals": [
    {"id": "h", "irp": "0", "quota": 2, "strategies": ["t1", "t2"]}
  ],
  "games": [
    {"doctor": "d1", "hospital": "h", "class": "zero_sum",
     "A": [["1", "-2"], ["0", "1/3"]], "M": [["-1", "2"], ["0", "-1/3"]]},
    {"doctor": "d2", "hospital": "h", "class": "general",
     "A": [[4, 5]], "M": [[1, 1]]}
  ]
})";

}  // namespace

TEST_CASE("rationals are canonical and exact") {
    Rational q = frac(6, -4);
    CHECK(q.get_num() == -3);
    CHECK(q.get_den() == 2);
    CHECK(frac(1, 3) + frac(1, 6) == frac(1, 2));
    CHECK(parse_rational("-10/4") == frac(-5, 2));
    CHECK(parse_rational("7") == 7);
    CHECK_THROWS_AS(parse_rational("1/0"), ParseError);
    CHECK_THROWS_AS(parse_rational("x"), ParseError);
}

TEST_CASE("load a two-doctor document") {
    Instance inst = load_instance(kTwoDoctors);
    CHECK(inst.doctors.size() == 2);
    CHECK(inst.games.size() == 2);
    CHECK(inst.doctors[1].irp == frac(3, 2));
    CHECK(inst.hospitals[0].quota == 2);
    CHECK(inst.games.at({0, 0}).A[1][1] == frac(1, 3));
}

TEST_CASE("load errors") {
    auto edit = [](auto&& fn) {
        nlohmann::json j = nlohmann::json::parse(kTwoDoctors);
        fn(j);
        return j.dump();
    };
    auto code_of = [](const std::string& text) {
        try {
            load_instance(text);
        } catch (const InputError& e) {
            return e.code;
        }
        return std::string("none");
    };
    CHECK(code_of(edit([](auto& j) { j["hospitals"][0]["quota"] = 0; })) == "QuotaOutOfRange");
    std::string bad_tag = edit([](auto& j) { j["games"][0]["M"][0][1] = "3"; });
    CHECK(code_of(bad_tag) == "ClassTagViolation");
    try {
        load_instance(bad_tag);
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("(1,2)") != std::string::npos);
    }
    CHECK(code_of(edit([](auto& j) { j["games"][0]["A"][0].erase(1); })) == "DimensionMismatch");
    CHECK(code_of(edit([](auto& j) { j["doctors"][0]["irp"] = "1/x"; })) != "none");
    CHECK(code_of(edit([](auto& j) { j["games"][1]["doctor"] = "nobody"; })) != "none");
}

TEST_CASE("strictly competitive tag needs an affine variant") {
    nlohmann::json j = nlohmann::json::parse(kTwoDoctors);
    j["games"][0]["class"] = "strictly_competitive";
    // A = [[1, -2], [0, 1/3]] and -M = A/2 - 1/2
    j["games"][0]["M"] = nlohmann::json::parse(R"([["0", "3/2"], ["1/2", "1/3"]])");
    CHECK_NOTHROW(load_instance(j.dump()));
    j["games"][0]["M"][1][1] = "0";
    try {
        load_instance(j.dump());
        FAIL("expected an error");
    } catch (const InputError& e) {
        CHECK(e.code == "NotStrictlyCompetitive");
    }
    // same order for both players
    j["games"][0]["M"] = nlohmann::json::parse(R"([["1", "-2"], ["0", "1/3"]])");
    CHECK_THROWS_AS(load_instance(j.dump()), InputError);
}

TEST_CASE("serialization round trip") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        GenConfig cfg;
        cfg.seed = seed;
        cfg.cls = static_cast<GameClass>(seed % 3);
        cfg.kind = seed % 4 == 0 ? ModelKind::Roommates : ModelKind::AdditiveSeparable;
        cfg.denominator = 1 + static_cast<int>(seed % 3);
        Instance inst = generate_instance(cfg);
        std::string text = serialize_instance(inst);
        Instance back = load_instance(text);
        CHECK(serialize_instance(back) == text);
        CHECK(back.games.size() == inst.games.size());
        for (const auto& [key, g] : inst.games) {
            CHECK(back.games.at(key).A == g.A);
            CHECK(back.games.at(key).M == g.M);
        }
        for (std::size_t d = 0; d < inst.doctors.size(); ++d) CHECK(back.doctors[d].irp == inst.doctors[d].irp);
        for (std::size_t h = 0; h < inst.hospitals.size(); ++h) CHECK(back.hospitals[h].quota == inst.hospitals[h].quota);
    }
    Instance hed = hedonic_instance();
    CHECK(serialize_instance(load_instance(serialize_instance(hed))) == serialize_instance(hed));
}

TEST_CASE("payoffs of the hedonic example") {
    Instance inst = hedonic_instance();
    Allocation a = empty_allocation(inst);
    a.match = {0, 0, 1};  // {1,2 | a}, {3 | b}
    PayoffReport r = evaluate_payoffs(inst, a);
    CHECK(r.doctor == std::vector<Rational>{1, 1, 0});
    for (const auto& g : r.hospital) CHECK(*g == 0);
}

TEST_CASE("unmatched agents get their IRP") {
    Instance inst = load_instance(kTwoDoctors);
    Allocation a = empty_allocation(inst);
    PayoffReport r = evaluate_payoffs(inst, a);
    CHECK(r.doctor[1] == frac(3, 2));
    CHECK(r.doctor[0] == -1);
    CHECK(*r.hospital[0] == 0);
}

TEST_CASE("quota violation gives the minus infinity sentinel") {
    Instance inst = load_instance(kTwoDoctors);
    inst.hospitals[0].quota = 1;
    Allocation a = empty_allocation(inst);
    a.match = {0, 0};
    a.profiles[{0, 0}] = {{1, 0}, {1, 0}, std::nullopt};
    a.profiles[{1, 0}] = {{1}, {0, 1}, std::nullopt};
    CHECK_FALSE(evaluate_payoffs(inst, a).hospital[0].has_value());
}

TEST_CASE("strategies must sum to one") {
    Instance inst = load_instance(kTwoDoctors);
    Allocation a = empty_allocation(inst);
    a.match = {0, -1};
    a.profiles[{0, 0}] = {{frac(1, 2), frac(1, 3)}, {1, 0}, std::nullopt};
    CHECK_THROWS_AS(evaluate_payoffs(inst, a), InputError);
}

TEST_CASE("zero-sum seats sum to zero and payoffs are linear in each strategy") {
    std::mt19937 rng(11);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 1 + rng() % 4, k = 1 + rng() % 4;
        Matrix a = oracle::random_matrix(rng, n, k, -10, 10, 3);
        Instance inst;
        inst.doctors.push_back(build::agent("d", 0, n));
        inst.hospitals.push_back(build::agent("h", 0, k));
        inst.games[{0, 0}] = build::zero_sum(a);
        auto simplex = [&](std::size_t m) {
            Vec v(m);
            Rational left = 1;
            for (std::size_t i = 0; i + 1 < m; ++i) {
                v[i] = left * frac(static_cast<long>(rng() % 5), 4);
                left -= v[i];
            }
            v[m - 1] = left;
            return v;
        };
        Vec x = simplex(n), x2 = simplex(n), y = simplex(k);
        Allocation al = empty_allocation(inst);
        al.match = {0};
        al.profiles[{0, 0}] = {x, y, std::nullopt};
        PayoffReport r = evaluate_payoffs(inst, al);
        CHECK(r.doctor[0] + r.seat.at({0, 0}) == 0);

        const Rational alpha = frac(static_cast<long>(rng() % 7), 6);
        Vec mix(n);
        for (std::size_t i = 0; i < n; ++i) mix[i] = alpha * x[i] + (1 - alpha) * x2[i];
        const BimatrixGame& g = inst.games.at({0, 0});
        CHECK(profile_payoffs(g, {mix, y, std::nullopt}).first ==
              alpha * profile_payoffs(g, {x, y, std::nullopt}).first +
                  (1 - alpha) * profile_payoffs(g, {x2, y, std::nullopt}).first);
    }
}

TEST_CASE("allocation round trip") {
    Instance inst = load_instance(kTwoDoctors);
    Allocation a = empty_allocation(inst);
    a.match = {0, 0};
    a.profiles[{0, 0}] = {{frac(1, 3), frac(2, 3)}, {frac(1, 2), frac(1, 2)}, std::nullopt};
    a.profiles[{1, 0}] = {{1}, {0, 1}, std::nullopt};
    std::string text = serialize_allocation(inst, a);
    Allocation b = load_allocation(inst, text);
    CHECK(b.match == a.match);
    CHECK(serialize_allocation(inst, b) == text);
    CHECK(evaluate_payoffs(inst, b).doctor == evaluate_payoffs(inst, a).doctor);
}
