// Command-line driver. Exit codes: 0 success, 1 bad input, 2 verification failure.
#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <variant>

#include "mg/contracts.hpp"
#include "mg/dac.hpp"
#include "mg/generator.hpp"
#include "mg/io.hpp"
#include "mg/payoffs.hpp"
#include "mg/renegotiation.hpp"
#include "mg/roommates.hpp"
#include "mg/stability.hpp"

using namespace mg;
using nlohmann::json;

namespace {

constexpr int kOk = 0, kInput = 1, kVerify = 2;

struct Flags {
    std::string input, output, allocation, profile;
    std::string epsilon = "1/10";
    std::string baseline;
    bool trace = false, oracle = false, audit = false, renegotiation = false;
    std::uint64_t seed = 7;
    int grid = 8;
    int coalitions = 0;
    // cne
    std::string doctor, hospital, f_res, g_res;
    // gen
    std::string cls = "zero_sum", kind = "additive_separable";
    int doctors = 4, hospitals = 2, quota = 2, strategies = 3, bound = 10, denominator = 1, contracts = 0;
};

void emit(const Flags& fl, const std::string& text) {
    if (fl.output.empty())
        std::cout << text;
    else
        write_file(fl.output, text);
}

void emit(const Flags& fl, const json& j) { emit(fl, j.dump(2) + "\n"); }

Rational epsilon_of(const Flags& fl) {
    Rational e = parse_rational(fl.epsilon);
    if (e <= 0) throw EpsilonNotPositive();
    return e;
}

std::optional<Rational> baseline_of(const Flags& fl) {
    if (fl.baseline.empty()) return std::nullopt;
    return parse_rational(fl.baseline);
}

Instance input_instance(const Flags& fl) {
    if (fl.input.empty()) throw InputError("MissingFlag", "--input is required");
    return load_instance_file(fl.input);
}

Allocation input_allocation(const Flags& fl, const Instance& inst) {
    if (fl.allocation.empty()) throw InputError("MissingFlag", "--allocation is required");
    return load_allocation(inst, read_file(fl.allocation));
}

PayoffProfile input_profile(const Flags& fl, const Instance& inst) {
    json j = json::parse(read_file(fl.profile));
    const json& arr = j.is_object() ? j.at("f") : j;
    PayoffProfile f;
    for (const auto& v : arr) f.push_back(rational_from_json(v));
    if (f.size() != inst.doctors.size())
        throw InputError("DimensionMismatch", "profile has " + std::to_string(f.size()) + " values for " +
                                                  std::to_string(inst.doctors.size()) + " doctors");
    return f;
}

json profile_json(const PayoffProfile& f) {
    json a = json::array();
    for (const auto& v : f) a.push_back(to_json(v));
    return a;
}

int finish_report(const Instance& inst, const StabilityReport& rep) {
    json j = report_to_json(inst, rep);
    if (rep.passed()) return kOk;
    std::cerr << "verification failed: " << j.dump() << "\n";
    return kVerify;
}

int cmd_solve_dac(const Flags& fl) {
    Instance inst = input_instance(fl);
    DacOptions opt;
    opt.epsilon = epsilon_of(fl);
    opt.baseline = baseline_of(fl);
    DacResult r = run_dac(inst, opt);
    emit(fl, serialize_allocation(inst, r.allocation));
    if (fl.trace) std::cerr << format_trace(inst, r.trace);
    VerifyOptions vo;
    vo.stability.baseline = opt.baseline;
    vo.stability.grid = fl.grid;
    vo.coalitions = fl.oracle ? std::max<int>(fl.coalitions, static_cast<int>(inst.doctors.size())) : fl.coalitions;
    return finish_report(inst, verify_allocation(inst, r.allocation, opt.epsilon, vo));
}

json witness_json(const ContractModel& m, const std::optional<SubstitutesWitness>& w) {
    if (!w) return nullptr;
    return {{"base", contract_set_to_json(m, w->base)},
            {"rejected", m.contracts[w->rejected].id},
            {"added", m.contracts[w->added].id}};
}

int cmd_contracts_da(const Flags& fl) {
    if (fl.input.empty()) throw InputError("MissingFlag", "--input is required");
    ContractModel m = load_contract_model(json::parse(read_file(fl.input)));
    DaContractsResult r = run_da_contracts(m);
    json out{{"accepted", contract_set_to_json(m, r.accepted)},
             {"rejected", contract_set_to_json(m, r.rejected)},
             {"proposals", r.proposals}};
    auto block = find_pairwise_block(m, r.accepted);
    out["pairwise_stable"] = !block.has_value();
    if (block) out["pairwise_block"] = m.contracts[*block].id;
    if (fl.audit) {
        ContractAudit a = audit_contracts(m, r.accepted);
        json hs = json::array();
        for (std::size_t h = 0; h < m.hospitals.size(); ++h) {
            json irc = nullptr;
            if (a.irc[h]) irc = {{"base", contract_set_to_json(m, a.irc[h]->base)}, {"added", m.contracts[a.irc[h]->added].id}};
            hs.push_back({{"hospital", m.hospitals[h]},
                          {"substitutes", !a.substitutes[h].has_value()},
                          {"substitutes_witness", witness_json(m, a.substitutes[h])},
                          {"irc", !a.irc[h].has_value()},
                          {"irc_witness", irc}});
        }
        json hm{{"stable", a.hm.stable}, {"individually_rational", a.hm.individually_rational}};
        if (a.hm.hospital >= 0) {
            hm["hospital"] = m.hospitals[a.hm.hospital];
            hm["blocking"] = contract_set_to_json(m, a.hm.blocking);
        }
        out["audit"] = {{"hospitals", hs}, {"stability", hm}};
    }
    emit(fl, out);
    return kOk;
}

int cmd_roommates_aspiration(const Flags& fl) {
    Instance inst = input_instance(fl);
    if (!fl.profile.empty()) {
        PayoffProfile f = input_profile(fl, inst);
        AspirationCheck c = is_aspiration(inst, f);
        json out{{"f", profile_json(f)}, {"aspiration", c.holds}};
        if (!c.holds) {
            out["doctor"] = inst.doctors[c.doctor].id;
            out["expected"] = to_json(c.expected);
        } else {
            out["balanced"] = is_balanced(inst, f);
        }
        emit(fl, out);
        return c.holds ? kOk : kVerify;
    }
    AspirationSearch s = search_aspiration(inst);
    emit(fl, json{{"f", profile_json(s.f)},
                  {"aspiration", true},
                  {"balanced", s.balanced},
                  {"realizable", s.realizable},
                  {"nodes", s.nodes}});
    return kOk;
}

int cmd_roommates_realize(const Flags& fl) {
    Instance inst = input_instance(fl);
    PayoffProfile f = fl.profile.empty() ? search_aspiration(inst).f : input_profile(fl, inst);
    Realization r;
    try {
        r = realize_aspiration(inst, f);
    } catch (const NotAnAspiration& e) {
        std::cerr << e.what() << "\n";
        return kVerify;
    }
    if (auto* rep = std::get_if<UnrealizableReport>(&r)) {
        json comp = json::array();
        for (int d : rep->component) comp.push_back(inst.doctors[d].id);
        emit(fl, json{{"realizable", false},
                      {"doctor", inst.doctors[rep->doctor].id},
                      {"component", comp},
                      {"reason", rep->reason}});
        return kVerify;
    }
    const Allocation& a = std::get<Allocation>(r);
    emit(fl, serialize_allocation(inst, a));
    VerifyOptions vo;
    vo.stability.grid = fl.grid;
    return finish_report(inst, verify_allocation(inst, a, 0, vo));
}

int cmd_renegotiate(const Flags& fl) {
    Instance inst = input_instance(fl);
    Allocation a = input_allocation(fl, inst);
    RenegotiationOptions opt;
    opt.epsilon = epsilon_of(fl);
    opt.baseline = baseline_of(fl);
    RenegotiationResult r = run_renegotiation(inst, a, opt);
    emit(fl, serialize_allocation(inst, r.allocation));
    if (fl.trace)
        std::cerr << "sweeps " << r.sweeps << ", changing " << r.changing_sweeps
                  << (r.bound ? ", bound " + to_string(*r.bound) : std::string()) << "\n";
    VerifyOptions vo;
    vo.stability.baseline = opt.baseline;
    vo.stability.grid = fl.grid;
    vo.coalitions = fl.coalitions;
    vo.renegotiation = true;
    StabilityReport rep = verify_allocation(inst, r.allocation, opt.epsilon, vo);
    if (!r.stable_every_sweep) rep.notes.push_back("an intermediate sweep was not eps-pairwise stable");
    return r.stable_every_sweep ? finish_report(inst, rep) : kVerify;
}

int cmd_cne(const Flags& fl) {
    Instance inst = input_instance(fl);
    if (fl.doctor.empty() || fl.hospital.empty()) throw InputError("MissingFlag", "--doctor and --hospital are required");
    const int d = inst.doctor_index(fl.doctor);
    const int h = inst.kind == ModelKind::Roommates ? inst.doctor_index(fl.hospital) : inst.hospital_index(fl.hospital);
    if (d < 0 || h < 0) throw InputError("UnknownAgent", "no agent " + (d < 0 ? fl.doctor : fl.hospital));
    const BimatrixGame* g = inst.game(d, h);
    if (!g) throw InputError("UnknownAgent", "no game between " + fl.doctor + " and " + fl.hospital);
    const Rational eps = epsilon_of(fl);
    Rational f_res, g_res;
    if (!fl.allocation.empty()) {
        ReservationPair rp = reservation_payoffs(inst, input_allocation(fl, inst), d, h, eps, baseline_of(fl));
        f_res = rp.doctor;
        g_res = rp.hospital;
    } else {
        if (fl.f_res.empty() || fl.g_res.empty())
            throw InputError("MissingFlag", "give --f-res and --g-res, or --allocation");
        f_res = parse_rational(fl.f_res);
        g_res = parse_rational(fl.g_res);
    }
    CneResult c;
    switch (g->cls) {
        case GameClass::ZeroSum: c = compute_cne_zero_sum(g->A, f_res, g_res, eps); break;
        case GameClass::StrictlyCompetitive: c = compute_cne_strictly_competitive(g->A, g->M, f_res, g_res, eps); break;
        case GameClass::Repeated: c = compute_cne_repeated(g->A, g->M, f_res, g_res, eps); break;
        default: throw InputError("UnsupportedClass", "CNE needs a zero-sum, strictly competitive or repeated pair");
    }
    // reuse the allocation writer for the profile
    Allocation one = empty_allocation(inst);
    one.match[d] = h;
    if (inst.kind == ModelKind::Roommates) one.match[h] = d;
    one.profiles[{d, h}] = c.profile;
    json al = allocation_to_json(inst, one);
    const bool ok = is_eps_cne(*g, c.profile, f_res, g_res, eps);
    emit(fl, json{{"f", to_json(c.f)},
                  {"g", to_json(c.g)},
                  {"case", to_string(c.tag)},
                  {"f_res", to_json(f_res)},
                  {"g_res", to_json(g_res)},
                  {"eps_feasible", c.eps_feasible},
                  {"eps_cne", ok},
                  {"allocation", al}});
    return ok ? kOk : kVerify;
}

int cmd_verify(const Flags& fl) {
    Instance inst = input_instance(fl);
    Allocation a = input_allocation(fl, inst);
    const Rational eps = parse_rational(fl.epsilon);
    if (eps < 0) throw InputError("EpsilonNegative", "epsilon must be >= 0");
    VerifyOptions vo;
    vo.stability.baseline = baseline_of(fl);
    vo.stability.grid = fl.grid;
    vo.coalitions = fl.coalitions;
    vo.renegotiation = fl.renegotiation;
    StabilityReport rep = verify_allocation(inst, a, eps, vo);
    emit(fl, report_to_json(inst, rep));
    return rep.passed() ? kOk : kVerify;
}

GameClass class_of(const std::string& s) {
    if (s == "zero_sum") return GameClass::ZeroSum;
    if (s == "strictly_competitive") return GameClass::StrictlyCompetitive;
    if (s == "repeated") return GameClass::Repeated;
    throw InputError("Schema", "gen supports zero_sum, strictly_competitive and repeated, not '" + s + "'");
}

int cmd_gen(const Flags& fl) {
    if (fl.kind == "contracts") {
        ContractGenConfig cfg;
        cfg.doctors = fl.doctors;
        cfg.hospitals = fl.hospitals;
        cfg.contracts = fl.contracts > 0 ? fl.contracts : 8;
        cfg.max_quota = fl.quota;
        cfg.seed = fl.seed;
        emit(fl, contract_model_to_json(generate_contract_model(cfg)));
        return kOk;
    }
    GenConfig cfg;
    cfg.cls = class_of(fl.cls);
    if (fl.kind == "roommates")
        cfg.kind = ModelKind::Roommates;
    else if (fl.kind != "additive_separable")
        throw InputError("Schema", "unknown kind '" + fl.kind + "'");
    cfg.doctors = fl.doctors;
    cfg.hospitals = fl.hospitals;
    cfg.max_quota = fl.quota;
    cfg.max_strategies = fl.strategies;
    cfg.entry_bound = fl.bound;
    cfg.denominator = fl.denominator;
    cfg.seed = fl.seed;
    if (cfg.doctors < 1 || cfg.hospitals < 0 || cfg.max_quota < 1 || cfg.max_strategies < 1 || cfg.denominator < 1)
        throw InputError("Schema", "sizes must be positive");
    emit(fl, serialize_instance(generate_instance(cfg)));
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Matching games: stable allocations, contracts, roommates and renegotiation"};
    app.require_subcommand(1);
    Flags fl;

    auto common = [&](CLI::App* c) {
        c->add_option("--input", fl.input, "instance or contract model (JSON)");
        c->add_option("--output", fl.output, "output file (default stdout)");
        c->add_option("--epsilon", fl.epsilon, "tolerance as P/Q")->capture_default_str();
        c->add_flag("--trace", fl.trace, "print a trace to stderr");
        c->add_flag("--oracle", fl.oracle, "also run the coalition scan");
        c->add_option("--seed", fl.seed, "random seed")->capture_default_str();
        c->add_option("--grid", fl.grid, "mesh for general-class pairs")->capture_default_str();
        c->add_option("--coalitions", fl.coalitions, "coalition scan size (0: skip)")->capture_default_str();
        c->add_option("--allocation", fl.allocation, "allocation file (JSON)");
        c->add_option("--profile", fl.profile, "roommates payoff profile (JSON)");
        c->add_option("--baseline", fl.baseline, "empty-seat value, default the hospital IRP");
    };

    std::map<std::string, std::function<int(const Flags&)>> run;
    auto sub = [&](const std::string& name, const std::string& help, std::function<int(const Flags&)> fn) {
        CLI::App* c = app.add_subcommand(name, help);
        common(c);
        run[name] = std::move(fn);
        return c;
    };
    sub("solve-dac", "deferred acceptance with competitions", cmd_solve_dac);
    sub("contracts-da", "deferred acceptance with contracts", cmd_contracts_da)
        ->add_flag("--audit", fl.audit, "substitutes, IRC and stability audit");
    sub("roommates-aspiration", "solve or check an aspiration", cmd_roommates_aspiration);
    sub("roommates-realize", "realize an aspiration as an allocation", cmd_roommates_realize);
    sub("renegotiate", "renegotiation process from a stable allocation", cmd_renegotiate);
    CLI::App* cne = sub("cne", "constrained Nash equilibrium of one couple", cmd_cne);
    cne->add_option("--doctor", fl.doctor, "doctor id");
    cne->add_option("--hospital", fl.hospital, "hospital id (partner doctor for roommates)");
    cne->add_option("--f-res", fl.f_res, "doctor reservation payoff");
    cne->add_option("--g-res", fl.g_res, "hospital reservation payoff, hospital units");
    sub("verify", "stability report for an allocation", cmd_verify)
        ->add_flag("--renegotiation", fl.renegotiation, "also check renegotiation proofness");
    CLI::App* gen = sub("gen", "random instance", cmd_gen);
    gen->add_option("--class", fl.cls, "zero_sum, strictly_competitive or repeated")->capture_default_str();
    gen->add_option("--kind", fl.kind, "additive_separable, roommates or contracts")->capture_default_str();
    gen->add_option("--doctors", fl.doctors)->capture_default_str();
    gen->add_option("--hospitals", fl.hospitals)->capture_default_str();
    gen->add_option("--quota", fl.quota, "max quota")->capture_default_str();
    gen->add_option("--strategies", fl.strategies, "max pure strategies")->capture_default_str();
    gen->add_option("--bound", fl.bound, "entry bound")->capture_default_str();
    gen->add_option("--denominator", fl.denominator)->capture_default_str();
    gen->add_option("--contracts", fl.contracts, "contract count (kind contracts)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInput;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        return run.at(name)(fl);
    } catch (const InputError& e) {
        std::cerr << e.what() << "\n";
        return kInput;
    } catch (const ParseError& e) {
        std::cerr << "MalformedRational: " << e.what() << "\n";
        return kInput;
    } catch (const EpsilonNotPositive& e) {
        std::cerr << e.what() << "\n";
        return kInput;
    } catch (const json::exception& e) {
        std::cerr << "Schema: " << e.what() << "\n";
        return kInput;
    } catch (const InfeasibleReservations& e) {
        std::cerr << e.what() << "\n";
        return kInput;
    } catch (const InputNotPairwiseStable& e) {
        std::cerr << e.what() << "\n";
        return kInput;
    } catch (const CapExceeded& e) {
        std::cerr << e.what() << "\n";
        return kInput;
    } catch (const ScanCapExceeded& e) {
        std::cerr << e.what() << "\n";
        return kInput;
    } catch (const NoAspirationFound& e) {
        std::cerr << e.what() << "\n";
        return kVerify;
    }
}
